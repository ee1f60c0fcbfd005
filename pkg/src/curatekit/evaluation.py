"""Detector score aggregation.

Covers per-generator AUC and accuracy, frame-to-video voting for detectors
that only return per-frame verdicts, train x test cross-generator AUC
matrices and least-squares fits of detector AUC against generation-quality
metrics.

Scores follow the convention "higher means more likely fake".
"""

from __future__ import annotations

import csv
import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from curatekit.errors import (
    DomainError,
    DuplicatePairError,
    EmptyError,
    LengthMismatchError,
    MissingCellError,
    OneClassError,
    ParseError,
    SchemaError,
)

QUALITY_COLUMNS = (
    "model",
    "aesthetic",
    "imaging",
    "frame_level",
    "background",
    "dynamic",
    "motion",
    "subject",
    "final",
)


class Truth(str, enum.Enum):
    REAL = "real"
    FAKE = "fake"


class Verdict(str, enum.Enum):
    REAL = "real"
    FAKE = "fake"
    NO_ANSWER = "no_answer"


class VoteScheme(str, enum.Enum):
    STRICT = "strict"  # Real if any frame Real, Fake only if every frame Fake
    ANY_FAKE = "any_fake"  # Fake if any frame Fake, Real only if every frame Real
    MAJORITY = "majority"  # majority of valid frames, ties -> NoAnswer


class Scheme(str, enum.Enum):
    SCORE_AUC = "ScoreAUC"
    SCORE_ACC = "ScoreACC"
    VOTE_STRICT = "VoteStrict"
    VOTE_ANY_FAKE = "VoteAnyFake"
    VOTE_MAJORITY = "VoteMajority"


VOTE_TO_SCHEME = {
    VoteScheme.STRICT: Scheme.VOTE_STRICT,
    VoteScheme.ANY_FAKE: Scheme.VOTE_ANY_FAKE,
    VoteScheme.MAJORITY: Scheme.VOTE_MAJORITY,
}


@dataclass(frozen=True)
class PredictionRecord:
    sample_id: str
    generator: str
    truth: Truth
    score: float | None = None

    def __post_init__(self):
        if self.score is not None and not math.isfinite(self.score):
            raise SchemaError(f"{self.sample_id}: score must be finite")


@dataclass(frozen=True)
class FrameVerdictRecord:
    sample_id: str
    generator: str
    truth: Truth
    frame_index: int
    verdict: Verdict


@dataclass(frozen=True)
class VideoVerdict:
    sample_id: str
    generator: str
    truth: Truth
    verdict: Verdict


@dataclass
class EvalReport:
    scheme: Scheme
    per_generator: dict[str, float]
    average: float
    missing: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "per_generator": dict(self.per_generator),
            "average": self.average,
            "missing": list(self.missing),
        }


# --------------------------------------------------------------------------
# AUC / ACC


def auc_from_scores(reals: Sequence[float], fakes: Sequence[float]) -> float:
    """Mann-Whitney AUC: P(fake score > real score), ties count one half.

    Uses midranks over the pooled sample, so it runs in O(n log n).
    """
    n_real, n_fake = len(reals), len(fakes)
    if n_real == 0 or n_fake == 0:
        raise OneClassError("AUC needs at least one real and one fake sample")
    pooled = np.concatenate([np.asarray(fakes, dtype=float), np.asarray(reals, dtype=float)])
    _, inverse, counts = np.unique(pooled, return_inverse=True, return_counts=True)
    # twice the midrank of each distinct value; integral, so the sum is exact
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    twice_mid = 2 * starts + counts + 1
    twice_rank_sum = int(twice_mid[inverse[:n_fake]].sum())
    twice_u = twice_rank_sum - n_fake * (n_fake + 1)
    return (twice_u / 2) / (n_fake * n_real)


def _split_scores(records: Iterable[PredictionRecord]) -> tuple[list[float], list[float]]:
    reals, fakes = [], []
    for r in records:
        if r.score is None:
            raise SchemaError(f"{r.sample_id}: AUC requires a score")
        (fakes if Truth(r.truth) is Truth.FAKE else reals).append(r.score)
    return reals, fakes


def auc(records: Iterable[PredictionRecord]) -> float:
    reals, fakes = _split_scores(records)
    return auc_from_scores(reals, fakes)


def acc(records: Sequence[PredictionRecord | VideoVerdict], threshold: float = 0.5) -> float:
    """Accuracy. Scores at or above ``threshold`` predict Fake.

    Discrete verdicts are compared directly; a NoAnswer verdict earns half
    credit.
    """
    if not records:
        raise EmptyError("accuracy of an empty record set")
    correct = 0.0
    for r in records:
        truth = Truth(r.truth)
        if isinstance(r, VideoVerdict):
            verdict = Verdict(r.verdict)
            if verdict is Verdict.NO_ANSWER:
                correct += 0.5
            elif verdict.value == truth.value:
                correct += 1.0
        else:
            if r.score is None:
                raise SchemaError(f"{r.sample_id}: score record without a score")
            predicted = Truth.FAKE if r.score >= threshold else Truth.REAL
            correct += predicted is truth
    return correct / len(records)


# --------------------------------------------------------------------------
# Frame voting


def aggregate_frames(frames: Sequence[FrameVerdictRecord | Verdict | str], scheme: VoteScheme | str) -> Verdict:
    if not frames:
        raise EmptyError("cannot aggregate zero frames")
    scheme = VoteScheme(scheme)
    verdicts = [Verdict(f.verdict if isinstance(f, FrameVerdictRecord) else f) for f in frames]
    tally = Counter(verdicts)
    n_real, n_fake, n = tally[Verdict.REAL], tally[Verdict.FAKE], len(verdicts)
    if scheme is VoteScheme.STRICT:
        if n_real:
            return Verdict.REAL
        return Verdict.FAKE if n_fake == n else Verdict.NO_ANSWER
    if scheme is VoteScheme.ANY_FAKE:
        if n_fake:
            return Verdict.FAKE
        return Verdict.REAL if n_real == n else Verdict.NO_ANSWER
    if n_real > n_fake:
        return Verdict.REAL
    if n_fake > n_real:
        return Verdict.FAKE
    return Verdict.NO_ANSWER


def videos_from_frames(frames: Iterable[FrameVerdictRecord], scheme: VoteScheme | str) -> list[VideoVerdict]:
    """Group frame verdicts by sample and vote each sample; input order kept."""
    groups: dict[str, list[FrameVerdictRecord]] = {}
    for f in frames:
        group = groups.setdefault(f.sample_id, [])
        if group:
            first = group[0]
            if (f.generator, Truth(f.truth)) != (first.generator, Truth(first.truth)):
                raise SchemaError(f"{f.sample_id}: frames disagree on generator or truth")
            if any(g.frame_index == f.frame_index for g in group):
                raise SchemaError(f"{f.sample_id}: duplicate frame index {f.frame_index}")
        group.append(f)
    return [
        VideoVerdict(sid, g[0].generator, Truth(g[0].truth), aggregate_frames(g, scheme))
        for sid, g in groups.items()
    ]


# --------------------------------------------------------------------------
# Reports


def _by_generator(records: Iterable) -> dict[str, list]:
    out: dict[str, list] = {}
    for r in records:
        out.setdefault(r.generator, []).append(r)
    return out


def _report(scheme: Scheme, per_generator: dict[str, float], expected: Sequence[str] | None) -> EvalReport:
    missing = [g for g in (expected or ()) if g not in per_generator]
    if missing:
        raise MissingCellError(f"no records for generators: {', '.join(missing)}")
    if not per_generator:
        raise EmptyError("no records to evaluate")
    average = sum(per_generator.values()) / len(per_generator)
    return EvalReport(scheme, per_generator, average)


def evaluate_scores(
    records: Iterable[PredictionRecord],
    metric: Scheme | str = Scheme.SCORE_AUC,
    threshold: float = 0.5,
    expected_generators: Sequence[str] | None = None,
) -> EvalReport:
    """Per-generator AUC or ACC and their unweighted mean.

    Each generator slice must hold its fake videos and the real videos they
    are scored against. ``expected_generators`` makes a missing slice an
    error instead of silently shrinking the average.
    """
    metric = Scheme(metric)
    groups = _by_generator(records)
    if metric is Scheme.SCORE_AUC:
        per = {g: auc(rs) for g, rs in groups.items()}
    elif metric is Scheme.SCORE_ACC:
        per = {g: acc(rs, threshold) for g, rs in groups.items()}
    else:
        raise DomainError(f"{metric.value} is a frame-vote scheme; use evaluate_frames")
    return _report(metric, per, expected_generators)


def evaluate_frames(
    frames: Iterable[FrameVerdictRecord],
    scheme: VoteScheme | str,
    expected_generators: Sequence[str] | None = None,
) -> EvalReport:
    scheme = VoteScheme(scheme)
    videos = videos_from_frames(frames, scheme)
    per = {g: acc(vs) for g, vs in _by_generator(videos).items()}
    return _report(VOTE_TO_SCHEME[scheme], per, expected_generators)


# --------------------------------------------------------------------------
# Cross-generator matrix


@dataclass
class CrossMatrix:
    """AUC of detectors trained on one generator (rows), tested on others (cols).

    Missing (train, test) runs stay ``None``. Summary annotations use the
    off-diagonal cells when a row or column has any:

    * ``optimal_train`` / ``least_favorable_train``: row with the highest /
      lowest mean AUC, i.e. the training source that generalises best / worst.
    * ``best_test`` / ``worst_test``: column with the lowest / highest mean
      AUC, i.e. the generator hardest / easiest to detect.
    """

    rows: list[str]
    cols: list[str]
    cells: list[list[float | None]]
    missing: list[tuple[str, str]]
    row_best: dict[str, str]
    row_worst: dict[str, str]
    col_best: dict[str, str]
    col_worst: dict[str, str]
    optimal_train: str | None
    least_favorable_train: str | None
    best_test: str | None
    worst_test: str | None

    def cell(self, train: str, test: str) -> float | None:
        return self.cells[self.rows.index(train)][self.cols.index(test)]

    def to_csv(self) -> str:
        lines = [",".join(["train\\test", *self.cols])]
        for name, row in zip(self.rows, self.cells):
            lines.append(",".join([name, *("" if v is None else repr(v) for v in row)]))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "cells": self.cells,
            "missing": [list(p) for p in self.missing],
            "row_best": self.row_best,
            "row_worst": self.row_worst,
            "col_best": self.col_best,
            "col_worst": self.col_worst,
            "optimal_train": self.optimal_train,
            "least_favorable_train": self.least_favorable_train,
            "best_test": self.best_test,
            "worst_test": self.worst_test,
        }


def _argext(pairs: list[tuple[str, float]], pick_max: bool) -> str | None:
    if not pairs:
        return None
    best = pairs[0]
    for name, v in pairs[1:]:
        if (v > best[1]) if pick_max else (v < best[1]):
            best = (name, v)
    return best[0]


def _summary_values(pairs: list[tuple[str, float | None]], own: str) -> list[float]:
    present = [(k, v) for k, v in pairs if v is not None]
    off = [v for k, v in present if k != own]
    return off if off else [v for _, v in present]


def build_cross_matrix(
    runs: Iterable[tuple[str, str, Sequence[PredictionRecord]]] | Iterable[tuple[str, str, float]],
) -> CrossMatrix:
    """Assemble a train x test AUC matrix.

    Each run is ``(train_model, test_model, records)``; a precomputed AUC may
    be passed in place of the records.
    """
    values: dict[tuple[str, str], float] = {}
    rows: list[str] = []
    cols: list[str] = []
    for train, test, payload in runs:
        if (train, test) in values:
            raise DuplicatePairError(f"run ({train}, {test}) given twice")
        value = float(payload) if isinstance(payload, (int, float)) else auc(payload)
        if not 0.0 <= value <= 1.0:
            raise SchemaError(f"AUC {value} for ({train}, {test}) outside [0, 1]")
        values[(train, test)] = value
        if train not in rows:
            rows.append(train)
        if test not in cols:
            cols.append(test)
    cells = [[values.get((r, c)) for c in cols] for r in rows]
    missing = [(r, c) for r in rows for c in cols if (r, c) not in values]

    row_best, row_worst, col_best, col_worst = {}, {}, {}, {}
    row_means, col_means = [], []
    for i, r in enumerate(rows):
        present = [(c, v) for c, v in zip(cols, cells[i]) if v is not None]
        row_best[r] = _argext(present, True)
        row_worst[r] = _argext(present, False)
        vals = _summary_values(list(zip(cols, cells[i])), r)
        row_means.append((r, sum(vals) / len(vals)))
    for j, c in enumerate(cols):
        column = [(r, cells[i][j]) for i, r in enumerate(rows)]
        present = [(r, v) for r, v in column if v is not None]
        if present:
            col_best[c] = _argext(present, True)
            col_worst[c] = _argext(present, False)
            vals = _summary_values(column, c)
            col_means.append((c, sum(vals) / len(vals)))
    return CrossMatrix(
        rows,
        cols,
        cells,
        missing,
        row_best,
        row_worst,
        col_best,
        col_worst,
        optimal_train=_argext(row_means, True),
        least_favorable_train=_argext(row_means, False),
        best_test=_argext(col_means, False),
        worst_test=_argext(col_means, True),
    )


# --------------------------------------------------------------------------
# Quality correlation


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float
    degenerate: bool = False


def correlate_r2(x: Sequence[float], y: Sequence[float]) -> LinearFit:
    """Least-squares line ``y ~ slope * x + intercept`` and its R^2.

    Constant ``y`` (zero total variance) gives r2 = 0 flagged degenerate, as
    does constant ``x``, where the slope is undefined and reported as 0.
    """
    if len(x) != len(y):
        raise LengthMismatchError(f"x has {len(x)} values, y has {len(y)}")
    if len(x) < 2:
        raise LengthMismatchError("need at least two points")
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    xc = xs - xs.mean()
    yc = ys - ys.mean()
    sxx = float(xc @ xc)
    ss_tot = float(yc @ yc)
    if sxx == 0.0:
        return LinearFit(0.0, float(ys.mean()), 0.0, degenerate=True)
    slope = float(xc @ yc) / sxx
    intercept = float(ys.mean() - slope * xs.mean())
    if ss_tot == 0.0:
        return LinearFit(slope, intercept, 0.0, degenerate=True)
    resid = ys - (slope * xs + intercept)
    r2 = 1.0 - float(resid @ resid) / ss_tot
    return LinearFit(slope, intercept, r2)


def load_quality_metrics(path: str | Path) -> dict[str, dict[str, float]]:
    """Read a generation-quality CSV keyed by model name."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = tuple(h.strip() for h in (reader.fieldnames or ()))
            if header != QUALITY_COLUMNS:
                raise SchemaError(f"{path}: expected header {','.join(QUALITY_COLUMNS)}")
            out: dict[str, dict[str, float]] = {}
            for lineno, row in enumerate(reader, start=2):
                model = row["model"].strip()
                if model in out:
                    raise SchemaError(f"{path}:{lineno}: duplicate model {model!r}")
                try:
                    out[model] = {k: float(row[k]) for k in QUALITY_COLUMNS[1:]}
                except (TypeError, ValueError):
                    raise ParseError(f"{path}:{lineno}: non-numeric metric value") from None
            return out
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def correlate_quality(
    quality: Mapping[str, Mapping[str, float]],
    aucs: Mapping[str, float],
    metrics: Sequence[str] = QUALITY_COLUMNS[1:],
) -> dict[str, LinearFit]:
    """Fit detector AUC against each quality metric over the shared models."""
    models = [m for m in aucs if m in quality]
    if len(models) < 2:
        raise LengthMismatchError("fewer than two models shared between quality table and AUCs")
    y = [aucs[m] for m in models]
    return {k: correlate_r2([quality[m][k] for m in models], y) for k in metrics}
