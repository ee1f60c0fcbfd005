"""Command-line front end: classify -> select -> score, plus evaluation reports.

Errors end the process with a single ``error[<code>] <message>`` line on
stderr. Exit status 2 means bad usage, 3 bad input data, 4 an internal
invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from curatekit import balancer, classifier, corpus_io, evaluation, metrics, oracle
from curatekit.errors import CurateError, InvariantError, ParseError, SchemaError
from curatekit.taxonomy import AXIS_NAMES, default_taxonomy_path, load_taxonomy, validate_lexicon

OUTPUT_DIR_ENV = "CURATEKIT_OUTPUT_DIR"


class UsageError(CurateError):
    code = "usage"
    exit_status = 2


class StrictWarning(CurateError):
    code = "strict"


@dataclass(frozen=True)
class PipelineConfig:
    taxonomy_path: str
    alpha: float = metrics.DEFAULT_ALPHA
    counting_mode: str = metrics.Counting.OCCURRENCE.value
    scheme: str = evaluation.VoteScheme.STRICT.value
    threshold: float = 0.5
    seed: int = 0
    output_dir: str = "."
    strict: bool = False

    def validate(self) -> None:
        if self.alpha < 0:
            raise UsageError("alpha must be >= 0")
        if not 0.0 <= self.threshold <= 1.0:
            raise UsageError("threshold must lie in [0, 1]")
        if self.counting_mode not in {c.value for c in metrics.Counting}:
            raise UsageError(f"unknown counting mode {self.counting_mode!r}")
        if self.scheme not in {s.value for s in evaluation.VoteScheme}:
            raise UsageError(f"unknown vote scheme {self.scheme!r}")
        if not Path(self.taxonomy_path).is_file():
            raise UsageError(f"taxonomy file not found: {self.taxonomy_path}")

    def digest(self) -> str:
        body = {k: v for k, v in asdict(self).items() if k != "output_dir"}
        return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()[:16]


_CONFIG_KEYS = {
    "taxonomy": "taxonomy_path",
    "taxonomy_path": "taxonomy_path",
    "alpha": "alpha",
    "counting": "counting_mode",
    "counting_mode": "counting_mode",
    "scheme": "scheme",
    "threshold": "threshold",
    "seed": "seed",
    "output_dir": "output_dir",
    "strict": "strict",
}


def build_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig(
        taxonomy_path=str(default_taxonomy_path()),
        output_dir=os.environ.get(OUTPUT_DIR_ENV, "."),
    )
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot load config {args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(doc) - set(_CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **{_CONFIG_KEYS[k]: v for k, v in doc.items()})
    overrides = {
        "taxonomy_path": getattr(args, "taxonomy", None),
        "alpha": getattr(args, "alpha", None),
        "counting_mode": getattr(args, "counting", None),
        "scheme": getattr(args, "scheme", None),
        "threshold": getattr(args, "threshold", None),
        "seed": getattr(args, "seed", None),
        "output_dir": args.output_dir,
    }
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    if args.strict:
        cfg = replace(cfg, strict=True)
    cfg.validate()
    return cfg


class Run:
    """Per-invocation state: resolved config, warnings, output paths."""

    def __init__(self, cfg: PipelineConfig, command: str):
        self.cfg = cfg
        self.command = command
        self._tax = None

    @property
    def tax(self):
        if self._tax is None:
            self._tax = load_taxonomy(self.cfg.taxonomy_path)
        return self._tax

    def out(self, given: str | None, default_name: str) -> str:
        if given:
            return given
        return str(Path(self.cfg.output_dir) / default_name)

    def warn(self, code: str, message: str) -> None:
        if self.cfg.strict:
            err = StrictWarning(message)
            err.code = code
            raise err
        print(f"warning[{code}] {message}", file=sys.stderr)

    def provenance(self) -> dict:
        return {
            "command": self.command,
            "config_hash": self.cfg.digest(),
            "taxonomy_version": self.tax.version,
        }

    def write_json(self, path: str, payload: dict) -> None:
        doc = {"provenance": self.provenance(), **payload}
        corpus_io.atomic_write(path, json.dumps(doc, indent=2, sort_keys=False) + "\n")


# --------------------------------------------------------------------------
# commands


def cmd_classify(run: Run, args) -> int:
    prompts = corpus_io.read_prompts(args.input)
    corpus = classifier.classify_corpus(prompts, run.tax, workers=args.workers)
    text = corpus_io.dumps_jsonl(corpus_io.labeled_to_dict(lp, run.tax) for lp in corpus)
    corpus_io.atomic_write(run.out(args.output, "labels.jsonl"), text)
    return 0


def _read_valid_labeled(run: Run, path: str):
    corpus = corpus_io.read_labeled(path)
    classifier.validate_labels(corpus, run.tax)
    return corpus


def cmd_select(run: Run, args) -> int:
    corpus = _read_valid_labeled(run, args.input)
    part = balancer.partition_corpus(corpus, run.tax)
    result = balancer.select_balanced(part.subsets, run.tax, part.residual_ids)
    _check_selection(result, corpus)
    if result.residual_ids:
        run.warn("residual", f"{len(result.residual_ids)} prompts lack a content axis and were skipped")
    empty = sum(
        1
        for sel in result.per_subset.values()
        for k, v in sel.quota_shortfalls.items()
        if sel.coverage.get(k, 0) == 0
    )
    if empty:
        run.warn("empty_category", f"{empty} theoretical categories hold no prompts")
    out = run.out(args.output, "selection.json")
    run.write_json(out, result.to_dict())
    ids_path = args.ids
    if ids_path is None and out != "-":
        ids_path = str(Path(out).with_suffix(".ids.txt"))
    if ids_path:
        corpus_io.atomic_write(ids_path, "".join(pid + "\n" for pid in result.selected_ids))
    if args.labeled_out:
        by_id = {lp.id: lp for lp in corpus}
        corpus_io.atomic_write(
            args.labeled_out,
            corpus_io.dumps_jsonl(
                corpus_io.labeled_to_dict(by_id[pid], run.tax) for pid in result.selected_ids
            ),
        )
    return 0


def _check_selection(result: balancer.SelectionResult, corpus) -> None:
    ids = {lp.id for lp in corpus}
    if len(set(result.selected_ids)) != len(result.selected_ids):
        raise InvariantError("selection contains duplicate ids")
    if not set(result.selected_ids) <= ids:
        raise InvariantError("selection contains ids absent from the input")


def _cu_rows(args) -> dict[str, list[float]]:
    if args.cu is not None:
        return {"input": list(args.cu)}
    try:
        doc = json.loads(Path(args.cu_file).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot load {args.cu_file}: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("CU file must map dataset names to per-axis CU values")
    rows = {}
    for name, entry in doc.items():
        if isinstance(entry, dict):
            try:
                rows[name] = [float(entry[a]) for a in AXIS_NAMES]
            except KeyError as exc:
                raise SchemaError(f"{name}: missing CU for axis {exc.args[0]}") from None
        elif isinstance(entry, list):
            rows[name] = [float(v) for v in entry]
        else:
            raise SchemaError(f"{name}: CU entry must be an object or list")
    return rows


def cmd_score(run: Run, args) -> int:
    if args.cu is not None or args.cu_file:
        results = {}
        for name, cu in _cu_rows(args).items():
            g = metrics.global_balance(cu)
            results[name] = {"CU": dict(zip(AXIS_NAMES, cu)), **asdict(g)}
            print(f"{name} MCU {g.MCU:.4f} UCO {g.UCO:.4f} PGBS {g.PGBS:.4f}")
        run.write_json(run.out(args.output, "balance.json"), {"datasets": results})
        return 0
    if not args.input:
        raise UsageError("score needs a labeled corpus, --cu or --cu-file")
    corpus = _read_valid_labeled(run, args.input)
    report = metrics.score_corpus(corpus, run.tax, run.cfg.alpha, run.cfg.counting_mode)
    if abs(report.PGBS - report.MCU * (1 - report.UCO)) > 0:
        raise InvariantError("PGBS != MCU * (1 - UCO)")
    for axis in report.zero_mass_axes:
        run.warn("zero_mass", f"axis {axis} has no labels; CU reported as 0")
    print(f"MCU {report.MCU:.4f} UCO {report.UCO:.4f} PGBS {report.PGBS:.4f}")
    run.write_json(run.out(args.output, "balance.json"), report.to_dict())
    return 0


def _expected(args) -> list[str] | None:
    return [g for g in args.expect_generators.split(",") if g] if args.expect_generators else None


def cmd_eval(run: Run, args) -> int:
    records = corpus_io.read_eval_log(args.input)
    expected = _expected(args)
    if records and isinstance(records[0], evaluation.FrameVerdictRecord):
        videos = evaluation.videos_from_frames(records, run.cfg.scheme)
        report = evaluation.evaluate_frames(records, run.cfg.scheme)
        payload = {
            **report.to_dict(),
            "videos": [
                {"sample_id": v.sample_id, "generator": v.generator, "truth": v.truth.value,
                 "verdict": v.verdict.value}
                for v in videos
            ],
        }
    else:
        metric = evaluation.Scheme.SCORE_AUC if args.metric == "auc" else evaluation.Scheme.SCORE_ACC
        report = evaluation.evaluate_scores(records, metric, run.cfg.threshold)
        payload = report.to_dict()
        if metric is evaluation.Scheme.SCORE_ACC:
            payload["threshold"] = run.cfg.threshold
    if expected:
        missing = [g for g in expected if g not in report.per_generator]
        if missing:
            run.warn("missing_cell", f"no records for generators: {', '.join(missing)}")
            payload["missing"] = missing
            payload["average"] = None
    run.write_json(run.out(args.output, "eval.json"), payload)
    print(f"{payload['scheme']} average {payload['average']}")
    return 0


def _read_manifest(path: str):
    base = Path(path).parent if path != "-" else Path(".")
    runs = []
    for n, obj in corpus_io.iter_jsonl(path):
        where = f"{path}:{n}"
        try:
            train, test = str(obj["train"]), str(obj["test"])
        except KeyError as exc:
            raise SchemaError(f"{where}: missing {exc.args[0]!r}") from None
        if "auc" in obj:
            runs.append((train, test, float(obj["auc"])))
        elif "log" in obj:
            log = Path(obj["log"])
            runs.append((train, test, corpus_io.read_score_log(log if log.is_absolute() else base / log)))
        else:
            raise SchemaError(f"{where}: run needs 'auc' or 'log'")
    return runs


def cmd_matrix(run: Run, args) -> int:
    matrix = evaluation.build_cross_matrix(_read_manifest(args.input))
    if matrix.missing:
        pairs = ", ".join(f"{r}->{c}" for r, c in matrix.missing)
        run.warn("missing_cell", f"{len(matrix.missing)} train/test runs missing: {pairs}")
    out = run.out(args.output, "matrix.csv")
    corpus_io.atomic_write(out, matrix.to_csv())
    json_out = args.json or (str(Path(out).with_suffix(".json")) if out != "-" else None)
    if json_out:
        run.write_json(json_out, matrix.to_dict())
    return 0


def cmd_correlate(run: Run, args) -> int:
    quality = evaluation.load_quality_metrics(args.quality)
    try:
        report = json.loads(Path(args.auc_report).read_text(encoding="utf-8"))
        aucs = {str(k): float(v) for k, v in report["per_generator"].items()}
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"cannot read AUC report {args.auc_report}: {exc}") from None
    unmatched = sorted(set(aucs) - set(quality))
    if unmatched:
        run.warn("unmatched_model", f"no quality metrics for: {', '.join(unmatched)}")
    fits = evaluation.correlate_quality(quality, aucs)
    for name, fit in fits.items():
        if fit.degenerate:
            run.warn("degenerate", f"{name}: zero variance, r2 reported as 0")
    payload = {
        "models": [m for m in aucs if m in quality],
        "fits": {k: asdict(v) for k, v in fits.items()},
    }
    run.write_json(run.out(args.output, "correlation.json"), payload)
    return 0


def cmd_validate(run: Run, args) -> int:
    for w in validate_lexicon(run.tax):
        print(w)
    return 0


def cmd_oracle(run: Run, args) -> int:
    corpus = _read_valid_labeled(run, args.input)
    if args.oracle_cmd == "random-pgbs":
        values = oracle.random_subset_pgbs(
            corpus, args.size, args.trials, run.cfg.seed, run.tax, run.cfg.alpha
        )
        payload = {"size": args.size, "trials": args.trials, "seed": run.cfg.seed, "pgbs": values}
    elif args.oracle_cmd == "exhaustive":
        tagged = [t for t in (balancer.tag_prompt(lp, run.tax) for lp in corpus) if t]
        ids, best = oracle.exhaustive_best_subset(tagged, args.size, run.tax, run.cfg.alpha)
        payload = {"size": args.size, "best_ids": ids, "best_pgbs": best}
    else:
        report = metrics.score_corpus(corpus, run.tax, run.cfg.alpha)
        naive = oracle.naive_balance(corpus, run.tax, run.cfg.alpha)
        diff = abs(report.PGBS - naive["PGBS"])
        payload = {"pgbs": report.PGBS, "oracle_pgbs": naive["PGBS"], "abs_diff": diff}
        if diff > 1e-12:
            raise InvariantError(f"metric pipeline disagrees with oracle by {diff:g}")
    run.write_json(run.out(args.output, f"oracle_{args.oracle_cmd}.json"), payload)
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--strict", action="store_true", help="treat warnings as errors")
    common.add_argument("--output-dir", help=f"default output directory (env {OUTPUT_DIR_ENV})")
    common.add_argument("--taxonomy", help="taxonomy JSON (default: bundled)")

    parser = argparse.ArgumentParser(prog="curatekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="label prompts from the lexicon")
    p.add_argument("input", help="prompt JSON-lines ('-' for stdin)")
    p.add_argument("output", nargs="?", help="labeled JSON-lines ('-' for stdout)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("select", parents=[common], help="attribute-balanced subset selection")
    p.add_argument("input", help="labeled JSON-lines")
    p.add_argument("output", nargs="?", help="selection.json")
    p.add_argument("--ids", help="flat id list (default: <output>.ids.txt)")
    p.add_argument("--labeled-out", help="write the selected prompts as labeled JSON-lines")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("score", parents=[common], help="balance metrics")
    p.add_argument("input", nargs="?", help="labeled JSON-lines")
    p.add_argument("--output", "-o")
    p.add_argument("--alpha", type=float)
    p.add_argument("--counting", choices=[c.value for c in metrics.Counting])
    src = p.add_mutually_exclusive_group()
    src.add_argument("--cu", type=float, nargs=len(AXIS_NAMES), metavar="CU")
    src.add_argument("--cu-file", help="JSON mapping dataset -> per-axis CU values")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", parents=[common], help="per-generator AUC/ACC or frame voting")
    p.add_argument("input", help="score log or frame log (JSON-lines)")
    p.add_argument("output", nargs="?")
    p.add_argument("--scheme", choices=[s.value for s in evaluation.VoteScheme])
    p.add_argument("--metric", choices=["auc", "acc"], default="auc")
    p.add_argument("--threshold", type=float)
    p.add_argument("--expect-generators", help="comma-separated generators that must be present")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("matrix", parents=[common], help="train x test AUC matrix")
    p.add_argument("input", help="runs manifest (JSON-lines of train, test, log|auc)")
    p.add_argument("output", nargs="?", help="matrix CSV")
    p.add_argument("--json", help="annotated JSON (default: <output>.json)")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("correlate", parents=[common], help="R^2 of AUC against quality metrics")
    p.add_argument("quality", help="quality-metric CSV")
    p.add_argument("auc_report", help="eval JSON report with per_generator AUCs")
    p.add_argument("output", nargs="?")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("validate", parents=[common], help="lexicon diagnostics")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", parents=[common])
    p.add_argument("oracle_cmd", choices=["random-pgbs", "exhaustive", "check-metrics"])
    p.add_argument("input", help="labeled JSON-lines")
    p.add_argument("--output", "-o")
    p.add_argument("--size", type=int, default=1)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return args.func(Run(cfg, args.command), args)
    except CurateError as exc:
        print(f"error[{exc.code}] {exc}", file=sys.stderr)
        return exc.exit_status
    except Exception as exc:  # noqa: BLE001
        print(f"error[internal] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
