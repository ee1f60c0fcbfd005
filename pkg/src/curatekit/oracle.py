"""Brute-force reference implementations for verification at toy scale.

Nothing here reuses the arithmetic of the production modules: entropy, AUC,
least squares and the greedy selection trace are rewritten from their
textbook definitions with plain loops. ``exhaustive_best_subset`` and
``random_subset_pgbs`` deliberately score with :func:`score_corpus`, because
they check the selection, not the metric.
"""

from __future__ import annotations

import itertools
import math
import random
from typing import Iterable, Mapping, Sequence

from curatekit.balancer import SUBSET_AXES, CategoryKey, TaggedPrompt
from curatekit.classifier import LabeledPrompt
from curatekit.errors import EmptyError, OneClassError, SizeError, TooLargeError
from curatekit.metrics import score_corpus
from curatekit.taxonomy import AXIS_NAMES, Taxonomy

MAX_EXHAUSTIVE = 20


def naive_entropy(counts: Iterable[float]) -> float:
    counts = list(counts)
    total = 0.0
    for c in counts:
        total += c
    if not counts or total <= 0:
        raise EmptyError("entropy of an empty distribution")
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log(p)
    return h


def naive_balance(corpus: Sequence[LabeledPrompt], tax: Taxonomy, alpha: float = 2.0) -> dict:
    """Recompute RU/CU per axis and MCU/UCO/PGBS with occurrence counting."""
    cu = {}
    for axis in AXIS_NAMES:
        cats = tax.categories(axis)
        counts = {c: 0 for c in cats}
        for lp in corpus:
            for c in lp.labels.get(axis, ()):
                counts[c] += 1
        if sum(counts.values()) == 0:
            cu[axis] = 0.0
            continue
        ru = naive_entropy(counts.values()) / math.log(len(cats))
        observed = len([c for c in counts if counts[c] > 0])
        cu[axis] = ru * (observed / len(cats)) ** alpha
    values = [cu[a] for a in AXIS_NAMES]
    mcu = sum(values) / len(values)
    uco = sum((v - mcu) * (v - mcu) for v in values) / len(values)
    return {"CU": cu, "MCU": mcu, "UCO": uco, "PGBS": mcu * (1 - uco)}


def pairwise_auc_oracle(reals: Sequence[float], fakes: Sequence[float]) -> float:
    if not reals or not fakes:
        raise OneClassError("need at least one real and one fake score")
    credit = 0.0
    for r in reals:
        for f in fakes:
            if f > r:
                credit += 1.0
            elif f == r:
                credit += 0.5
    return credit / (len(reals) * len(fakes))


def naive_ols(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Closed-form simple regression: (slope, intercept, r2)."""
    n = len(x)
    sx = sum(x)
    sy = sum(y)
    sxx = sum(a * a for a in x)
    sxy = sum(a * b for a, b in zip(x, y))
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
    intercept = (sy - slope * sx) / n
    mean_y = sy / n
    ss_tot = sum((b - mean_y) ** 2 for b in y)
    ss_res = sum((b - (slope * a + intercept)) ** 2 for a, b in zip(x, y))
    return slope, intercept, 1 - ss_res / ss_tot


def labels_from_keys(tp: TaggedPrompt) -> LabeledPrompt:
    """Project a tagged prompt's category keys back onto per-axis label sets."""
    axes = SUBSET_AXES[tp.subset]
    labels = {a: set() for a in AXIS_NAMES}
    for key in tp.category_keys:
        for axis, cat in zip(axes, key):
            labels[axis].add(cat)
    return LabeledPrompt(tp.prompt_id, {a: frozenset(v) for a, v in labels.items()})


def exhaustive_best_subset(
    tagged: Sequence[TaggedPrompt],
    size: int,
    tax: Taxonomy,
    alpha: float = 2.0,
) -> tuple[list[str], float]:
    """Highest-PGBS subset of exactly ``size`` prompts by full enumeration.

    Ties go to the lexicographically smallest sorted id tuple.
    """
    n = len(tagged)
    if n > MAX_EXHAUSTIVE:
        raise TooLargeError(f"{n} prompts exceeds the exhaustive limit of {MAX_EXHAUSTIVE}")
    if not 1 <= size <= n:
        raise SizeError(f"size {size} not in [1, {n}]")
    labeled = sorted((labels_from_keys(tp) for tp in tagged), key=lambda lp: lp.id)
    best_ids: tuple[str, ...] | None = None
    best = -math.inf
    for combo in itertools.combinations(labeled, size):
        value = score_corpus(combo, tax, alpha).PGBS
        ids = tuple(lp.id for lp in combo)
        if value > best or (value == best and ids < best_ids):
            best, best_ids = value, ids
    return list(best_ids), best


def random_subset_pgbs(
    corpus: Sequence[LabeledPrompt],
    size: int,
    trials: int,
    seed: int,
    tax: Taxonomy,
    alpha: float = 2.0,
) -> list[float]:
    if not 0 < size <= len(corpus):
        raise SizeError(f"size {size} not in [1, {len(corpus)}]")
    if trials < 1:
        raise SizeError("trials must be >= 1")
    rng = random.Random(seed)
    return [score_corpus(rng.sample(list(corpus), size), tax, alpha).PGBS for _ in range(trials)]


def reference_selection(
    tagged: Sequence[TaggedPrompt],
    key_rank: Mapping[str, int] | None = None,
) -> tuple[list[str], int, list[dict[CategoryKey, int]]]:
    """Step-by-step greedy selection for one subset, recomputed from scratch.

    Returns the selection order, the base quota ``m`` and the coverage map
    after every processed category, so tests can check per-state invariants.
    """

    def order(key: CategoryKey):
        return tuple(key_rank[c] for c in key) if key_rank else key

    keys = {tp.prompt_id: set(tp.category_keys) for tp in tagged}
    categories = sorted({k for ks in keys.values() for k in ks}, key=order)
    m = min(sum(1 for ks in keys.values() if c in ks) for c in categories)
    selected: list[str] = []
    remaining = list(categories)
    states = []
    while remaining:

        def live(c):
            return sum(1 for pid, ks in keys.items() if c in ks and pid not in selected)

        remaining.sort(key=lambda c: (live(c), order(c)))
        c = remaining.pop(0)
        covered = sum(1 for pid in selected if c in keys[pid])
        need = max(0, m - covered)
        pool = [pid for pid, ks in keys.items() if c in ks and pid not in selected]
        singles = sorted(pid for pid in pool if len(keys[pid]) == 1)
        multis = sorted(pid for pid in pool if len(keys[pid]) > 1)
        selected.extend((singles + multis)[:need])
        states.append({k: sum(1 for pid in selected if k in keys[pid]) for k in categories})
    return selected, m, states


def coverage_feasible_subsets(tagged: Sequence[TaggedPrompt]) -> list[frozenset[str]]:
    """Every id subset meeting the coverage floor min(m, available) on all keys."""
    if len(tagged) > 12:
        raise TooLargeError("feasibility enumeration is limited to 12 prompts")
    keys = {tp.prompt_id: set(tp.category_keys) for tp in tagged}
    categories = {k for ks in keys.values() for k in ks}
    avail = {c: sum(1 for ks in keys.values() if c in ks) for c in categories}
    m = min(avail.values())
    ids = sorted(keys)
    out = []
    for r in range(len(ids) + 1):
        for combo in itertools.combinations(ids, r):
            cov = {c: sum(1 for pid in combo if c in keys[pid]) for c in categories}
            if all(cov[c] >= min(m, avail[c]) for c in categories):
                out.append(frozenset(combo))
    return out

