"""Attribute-balanced subset selection.

The corpus is split into four disjoint subsets by which attribute axes a
prompt carries, each prompt is expanded into the Cartesian product of its
per-axis labels (its category keys), and a greedy pass then fills every
category key up to a common quota ``m``, the size of the smallest non-empty
category in the subset. Prompts that cover several keys ("Multi") count
towards all of them, so the quota of a later category shrinks by the Multi
prompts already taken for it.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from curatekit.classifier import LabeledPrompt
from curatekit.errors import EmptyInputError
from curatekit.taxonomy import (
    SPATIAL_ATTRIBUTE,
    SPATIAL_CONTENT,
    TEMPORAL_ATTRIBUTE,
    TEMPORAL_CONTENT,
    Taxonomy,
)

CategoryKey = tuple[str, ...]


class SubsetId(str, enum.Enum):
    P1 = "P1"
    P2 = "P2"
    P3 = "P3"
    P4 = "P4"


class Tag(str, enum.Enum):
    SINGLE = "Single"
    MULTI = "Multi"


SUBSET_AXES: dict[SubsetId, tuple[str, ...]] = {
    SubsetId.P1: (SPATIAL_CONTENT, TEMPORAL_CONTENT),
    SubsetId.P2: (SPATIAL_CONTENT, TEMPORAL_CONTENT, TEMPORAL_ATTRIBUTE),
    SubsetId.P3: (SPATIAL_CONTENT, TEMPORAL_CONTENT, SPATIAL_ATTRIBUTE),
    SubsetId.P4: (SPATIAL_CONTENT, TEMPORAL_CONTENT, SPATIAL_ATTRIBUTE, TEMPORAL_ATTRIBUTE),
}


@dataclass(frozen=True)
class TaggedPrompt:
    prompt_id: str
    subset: SubsetId
    category_keys: tuple[CategoryKey, ...]

    @property
    def tag(self) -> Tag:
        return Tag.SINGLE if len(self.category_keys) == 1 else Tag.MULTI


@dataclass
class Partition:
    subsets: dict[SubsetId, list[TaggedPrompt]]
    residual_ids: list[str]


@dataclass
class SubsetSelection:
    m: int
    coverage: dict[CategoryKey, int]
    quota_shortfalls: dict[CategoryKey, int]
    selected_ids: list[str] = field(default_factory=list)


@dataclass
class SelectionResult:
    selected_ids: list[str]
    per_subset: dict[SubsetId, SubsetSelection]
    residual_ids: list[str]

    def to_dict(self) -> dict:
        return {
            "selected_ids": list(self.selected_ids),
            "per_subset": {
                sid.value: {
                    "m": sel.m,
                    "selected": len(sel.selected_ids),
                    "coverage": {key_str(k): v for k, v in sel.coverage.items()},
                    "quota_shortfalls": {key_str(k): v for k, v in sel.quota_shortfalls.items()},
                }
                for sid, sel in self.per_subset.items()
            },
            "residual_ids": list(self.residual_ids),
        }


def key_str(key: CategoryKey) -> str:
    return "|".join(key)


def subset_of(labels: Mapping[str, Iterable[str]]) -> SubsetId | None:
    """Subset a label vector belongs to, or None if a content axis is empty."""
    if not labels.get(SPATIAL_CONTENT) or not labels.get(TEMPORAL_CONTENT):
        return None
    has_sa = bool(labels.get(SPATIAL_ATTRIBUTE))
    has_ta = bool(labels.get(TEMPORAL_ATTRIBUTE))
    if has_sa and has_ta:
        return SubsetId.P4
    if has_sa:
        return SubsetId.P3
    if has_ta:
        return SubsetId.P2
    return SubsetId.P1


def _sorted_cats(cats: Iterable[str], tax: Taxonomy | None) -> list[str]:
    if tax is None:
        return sorted(cats)
    return sorted(cats, key=lambda c: (tax.rank[c], c))


def tag_prompt(lp: LabeledPrompt, tax: Taxonomy | None = None) -> TaggedPrompt | None:
    subset = subset_of(lp.labels)
    if subset is None:
        return None
    per_axis = [_sorted_cats(lp.labels[axis], tax) for axis in SUBSET_AXES[subset]]
    keys = tuple(itertools.product(*per_axis))
    return TaggedPrompt(lp.id, subset, keys)


def partition_corpus(corpus: Iterable[LabeledPrompt], tax: Taxonomy | None = None) -> Partition:
    subsets: dict[SubsetId, list[TaggedPrompt]] = {sid: [] for sid in SubsetId}
    residual: list[str] = []
    for lp in corpus:
        tp = tag_prompt(lp, tax)
        if tp is None:
            residual.append(lp.id)
        else:
            subsets[tp.subset].append(tp)
    return Partition(subsets, residual)


def enumerate_category_space(subset: SubsetId, tax: Taxonomy) -> int:
    n = 1
    for axis in SUBSET_AXES[SubsetId(subset)]:
        n *= len(tax.categories(axis))
    return n


def category_space(subset: SubsetId, tax: Taxonomy) -> list[CategoryKey]:
    return list(itertools.product(*(tax.categories(a) for a in SUBSET_AXES[SubsetId(subset)])))


def _key_order(tax: Taxonomy | None) -> Callable[[CategoryKey], tuple]:
    if tax is None:
        return lambda key: key
    return lambda key: tuple(tax.rank[c] for c in key)


def _select_subset(
    prompts: Sequence[TaggedPrompt],
    key_order: Callable[[CategoryKey], tuple],
    space: Sequence[CategoryKey] = (),
) -> SubsetSelection:
    members: dict[CategoryKey, list[str]] = {}
    keys_of: dict[str, tuple[CategoryKey, ...]] = {}
    for tp in prompts:
        keys_of[tp.prompt_id] = tp.category_keys
        for key in tp.category_keys:
            members.setdefault(key, []).append(tp.prompt_id)

    # Single-tagged ids first, ascending; then Multi-tagged ids, ascending.
    queues = {
        key: sorted(ids, key=lambda pid: (len(keys_of[pid]) > 1, pid))
        for key, ids in members.items()
    }
    size = {key: len(ids) for key, ids in members.items()}
    m = min(size.values())
    coverage = dict.fromkeys(members, 0)
    selected: set[str] = set()
    order: list[str] = []
    pending = set(members)

    while pending:
        current = min(pending, key=lambda k: (size[k], key_order(k)))
        pending.discard(current)
        quota = max(0, m - coverage[current])
        picked = []
        if quota:
            for pid in queues[current]:
                if pid not in selected:
                    picked.append(pid)
                    if len(picked) == quota:
                        break
        for pid in picked:
            selected.add(pid)
            order.append(pid)
            for key in keys_of[pid]:
                coverage[key] += 1
                size[key] -= 1

    shortfalls = {key: m - cov for key, cov in coverage.items() if cov < m}
    for key in space:
        if key not in members:
            coverage[key] = 0
            shortfalls[key] = m
    coverage = {k: coverage[k] for k in sorted(coverage, key=key_order)}
    shortfalls = {k: shortfalls[k] for k in sorted(shortfalls, key=key_order)}
    return SubsetSelection(m, coverage, shortfalls, order)


def select_balanced(
    tagged: Mapping[SubsetId, Sequence[TaggedPrompt]],
    tax: Taxonomy | None = None,
    residual_ids: Sequence[str] = (),
) -> SelectionResult:
    """Greedy balanced selection, independently per subset.

    Categories are visited smallest-first, where size counts the members not
    yet selected; ties go to the key that sorts first in taxonomy order (plain
    string order without a taxonomy). With a taxonomy, theoretical categories
    that hold no prompts are reported as shortfalls of ``m``.
    """
    if not any(tagged.get(sid) for sid in SubsetId):
        raise EmptyInputError("no prompt carries both content axes; nothing to select")
    key_order = _key_order(tax)
    per_subset: dict[SubsetId, SubsetSelection] = {}
    selected: list[str] = []
    for sid in SubsetId:
        prompts = tagged.get(sid) or []
        if not prompts:
            continue
        space = category_space(sid, tax) if tax is not None else ()
        sel = _select_subset(prompts, key_order, space)
        per_subset[sid] = sel
        selected.extend(sel.selected_ids)
    return SelectionResult(selected, per_subset, list(residual_ids))


def select_corpus(corpus: Sequence[LabeledPrompt], tax: Taxonomy | None = None) -> SelectionResult:
    part = partition_corpus(corpus, tax)
    return select_balanced(part.subsets, tax, part.residual_ids)
