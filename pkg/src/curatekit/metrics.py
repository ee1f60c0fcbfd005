"""Entropy-based balance metrics for a labeled corpus.

Per axis ``i`` with ``n_i`` theoretical categories:

    RU_i = H_i / log(n_i)                  relative uniformity
    R_i  = observed categories / n_i       completeness ratio
    CU_i = RU_i * R_i ** alpha             complete uniformity

Across the axes:

    MCU  = mean(CU)
    UCO  = mean((CU - MCU) ** 2)           population variance
    PGBS = MCU * (1 - UCO)

Entropies are in nats; RU does not depend on the log base.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from curatekit.classifier import LabeledPrompt
from curatekit.errors import ArityError, DomainError, SchemaError, ZeroMassError
from curatekit.taxonomy import AXIS_NAMES, Taxonomy

DEFAULT_ALPHA = 2.0
N_AXES = len(AXIS_NAMES)


class Counting(str, enum.Enum):
    """How a multi-label prompt contributes to an axis distribution."""

    OCCURRENCE = "occurrence"  # one count per carried label
    FRACTIONAL = "fractional"  # 1/|labels| per carried label


@dataclass(frozen=True)
class AxisDistribution:
    axis: str
    counts: Mapping[str, float]
    n_theoretical: int

    @property
    def total(self) -> float:
        return float(sum(self.counts.values()))

    @property
    def observed(self) -> int:
        return sum(1 for v in self.counts.values() if v > 0)


@dataclass(frozen=True)
class AxisBalance:
    H: float
    RU: float
    R: float
    CU: float
    zero_mass: bool = False


@dataclass(frozen=True)
class GlobalBalance:
    MCU: float
    UCO: float
    PGBS: float


@dataclass(frozen=True)
class BalanceReport:
    alpha: float
    counting: str
    per_axis: Mapping[str, AxisBalance]
    MCU: float
    UCO: float
    PGBS: float

    @property
    def cu_values(self) -> list[float]:
        return [self.per_axis[a].CU for a in AXIS_NAMES]

    @property
    def zero_mass_axes(self) -> list[str]:
        return [a for a in AXIS_NAMES if self.per_axis[a].zero_mass]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "counting": self.counting,
            "per_axis": {a: asdict(self.per_axis[a]) for a in AXIS_NAMES},
            "MCU": self.MCU,
            "UCO": self.UCO,
            "PGBS": self.PGBS,
        }


def axis_distribution(
    corpus: Iterable[LabeledPrompt],
    axis: str,
    tax: Taxonomy,
    counting: Counting | str = Counting.OCCURRENCE,
) -> AxisDistribution:
    counting = Counting(counting)
    cats = tax.categories(axis)
    counts: dict[str, float] = dict.fromkeys(cats, 0)
    for lp in corpus:
        labels = lp.labels.get(axis) or ()
        if not labels:
            continue
        weight = 1 if counting is Counting.OCCURRENCE else 1.0 / len(labels)
        for cat in labels:
            if cat not in counts:
                raise SchemaError(f"{lp.id}: {cat!r} is not a category of {axis}")
            counts[cat] += weight
    return AxisDistribution(axis, counts, len(cats))


def _probabilities(dist: AxisDistribution) -> np.ndarray:
    counts = np.fromiter(dist.counts.values(), dtype=float, count=len(dist.counts))
    if np.any(counts < 0):
        raise DomainError(f"negative count on axis {dist.axis}")
    total = counts.sum()
    if total <= 0:
        raise ZeroMassError(f"axis {dist.axis} has no labelled mass")
    return counts[counts > 0] / total


def entropy(dist: AxisDistribution) -> float:
    p = _probabilities(dist)
    return float(-(p * np.log(p)).sum())


def relative_uniformity(dist: AxisDistribution) -> float:
    h = entropy(dist)
    if dist.n_theoretical <= 1:
        # a one-category axis is uniform by construction
        return 1.0
    return min(1.0, max(0.0, h / math.log(dist.n_theoretical)))


def completeness_ratio(dist: AxisDistribution) -> float:
    return dist.observed / dist.n_theoretical


def complete_uniformity(dist: AxisDistribution, alpha: float = DEFAULT_ALPHA) -> float:
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    return relative_uniformity(dist) * completeness_ratio(dist) ** alpha


def axis_balance(dist: AxisDistribution, alpha: float = DEFAULT_ALPHA) -> AxisBalance:
    try:
        h = entropy(dist)
    except ZeroMassError:
        return AxisBalance(0.0, 0.0, 0.0, 0.0, zero_mass=True)
    ru = relative_uniformity(dist)
    r = completeness_ratio(dist)
    return AxisBalance(h, ru, r, ru * r**alpha)


def global_balance(cu_values: Sequence[float]) -> GlobalBalance:
    values = [float(v) for v in cu_values]
    if len(values) != N_AXES:
        raise ArityError(f"expected {N_AXES} CU values, got {len(values)}")
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"CU value {v} outside [0, 1]")
    mcu = sum(values) / N_AXES
    uco = sum((v - mcu) ** 2 for v in values) / N_AXES
    return GlobalBalance(mcu, uco, mcu * (1.0 - uco))


def score_corpus(
    corpus: Sequence[LabeledPrompt],
    tax: Taxonomy,
    alpha: float = DEFAULT_ALPHA,
    counting: Counting | str = Counting.OCCURRENCE,
) -> BalanceReport:
    """Full balance report. A zero-mass axis scores CU = 0 and is flagged."""
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    counting = Counting(counting)
    per_axis = {
        axis: axis_balance(axis_distribution(corpus, axis, tax, counting), alpha)
        for axis in AXIS_NAMES
    }
    g = global_balance([per_axis[a].CU for a in AXIS_NAMES])
    return BalanceReport(float(alpha), counting.value, per_axis, g.MCU, g.UCO, g.PGBS)


def pgbs(corpus: Sequence[LabeledPrompt], tax: Taxonomy, alpha: float = DEFAULT_ALPHA) -> float:
    return score_corpus(corpus, tax, alpha).PGBS
