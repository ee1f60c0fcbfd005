"""JSON-lines readers and writers for prompts, labels and detector logs."""

from __future__ import annotations

import json
import os
import sys
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterable, Iterator

from curatekit.classifier import LabeledPrompt, Prompt
from curatekit.errors import ParseError, SchemaError
from curatekit.evaluation import FrameVerdictRecord, PredictionRecord, Truth, Verdict
from curatekit.taxonomy import AXIS_NAMES, Taxonomy

STDIO = "-"


@contextmanager
def open_input(path: str | Path) -> Iterator[IO[str]]:
    if str(path) == STDIO:
        yield sys.stdin
        return
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        yield fh


def atomic_write(path: str | Path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file in the same directory."""
    if str(path) == STDIO:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    with open_input(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise ParseError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def dumps_jsonl(objs: Iterable[dict]) -> str:
    return "".join(json.dumps(o, ensure_ascii=False) + "\n" for o in objs)


def _field(obj: dict, key: str, kind, where: str):
    value = obj.get(key)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise SchemaError(f"{where}: field {key!r} missing or not {getattr(kind, '__name__', kind)}")
    return value


def read_prompts(path: str | Path) -> list[Prompt]:
    return [
        Prompt(_field(o, "id", str, f"{path}:{n}"), _field(o, "text", str, f"{path}:{n}"))
        for n, o in iter_jsonl(path)
    ]


def read_labeled(path: str | Path) -> list[LabeledPrompt]:
    out = []
    for n, o in iter_jsonl(path):
        where = f"{path}:{n}"
        pid = _field(o, "id", str, where)
        raw = _field(o, "labels", dict, where)
        labels = {}
        for axis in AXIS_NAMES:
            cats = raw.get(axis, [])
            if not isinstance(cats, list) or not all(isinstance(c, str) for c in cats):
                raise SchemaError(f"{where}: labels.{axis} must be a list of strings")
            labels[axis] = frozenset(cats)
        unknown = set(raw) - set(AXIS_NAMES)
        if unknown:
            raise SchemaError(f"{where}: unknown axes {sorted(unknown)}")
        out.append(LabeledPrompt(pid, labels))
    return out


def labeled_to_dict(lp: LabeledPrompt, tax: Taxonomy) -> dict:
    return {
        "id": lp.id,
        "labels": {
            axis: sorted(lp.labels.get(axis, ()), key=lambda c: tax.rank.get(c, 0))
            for axis in AXIS_NAMES
        },
    }


def _truth(value, where: str) -> Truth:
    try:
        return Truth(str(value).lower())
    except ValueError:
        raise SchemaError(f"{where}: truth must be 'real' or 'fake', got {value!r}") from None


def read_score_log(path: str | Path) -> list[PredictionRecord]:
    return _score_records(iter_jsonl(path), path)


def _score_records(rows: Iterable[tuple[int, dict]], path) -> list[PredictionRecord]:
    out = []
    for n, o in rows:
        where = f"{path}:{n}"
        score = o.get("score")
        if score is not None and (not isinstance(score, (int, float)) or isinstance(score, bool)):
            raise SchemaError(f"{where}: score must be a number")
        out.append(
            PredictionRecord(
                _field(o, "sample_id", str, where),
                _field(o, "generator", str, where),
                _truth(o.get("truth"), where),
                None if score is None else float(score),
            )
        )
    return out


def read_frame_log(path: str | Path) -> list[FrameVerdictRecord]:
    return _frame_records(iter_jsonl(path), path)


def _frame_records(rows: Iterable[tuple[int, dict]], path) -> list[FrameVerdictRecord]:
    out = []
    for n, o in rows:
        where = f"{path}:{n}"
        try:
            verdict = Verdict(str(o.get("verdict")).lower())
        except ValueError:
            raise SchemaError(f"{where}: verdict must be real, fake or no_answer") from None
        out.append(
            FrameVerdictRecord(
                _field(o, "sample_id", str, where),
                _field(o, "generator", str, where),
                _truth(o.get("truth"), where),
                _field(o, "frame", int, where),
                verdict,
            )
        )
    return out


def read_eval_log(path: str | Path) -> list[PredictionRecord] | list[FrameVerdictRecord]:
    """Read a score log or a frame log, told apart by a ``verdict`` field."""
    rows = list(iter_jsonl(path))
    if rows and "verdict" in rows[0][1]:
        return _frame_records(rows, path)
    return _score_records(rows, path)
