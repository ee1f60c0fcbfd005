"""Rule-based multi-label prompt classification.

Text is lowercased and split on non-alphanumeric characters. A keyword fires
when it equals a text token or one of that token's suffix-stripped variants
(see :func:`stem_candidates`). A phrase fires when its tokens occur
contiguously in the raw token stream. Every match fires independently, so a
prompt may carry several categories on one axis and categories on every axis.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from curatekit.errors import DuplicateIdError, SchemaError
from curatekit.taxonomy import AXIS_NAMES, Taxonomy, tokenize

LabelVector = dict[str, frozenset[str]]

_VOWELS = set("aeiou")
_MIN_STEM = 3


@dataclass(frozen=True)
class Prompt:
    id: str
    text: str


@dataclass(frozen=True)
class LabeledPrompt:
    id: str
    labels: Mapping[str, frozenset[str]]

    def axis(self, name: str) -> frozenset[str]:
        return self.labels.get(name, frozenset())


Corpus = list[LabeledPrompt]


def empty_labels() -> LabelVector:
    return {axis: frozenset() for axis in AXIS_NAMES}


@lru_cache(maxsize=1 << 16)
def stem_candidates(token: str) -> tuple[str, ...]:
    """Return ``token`` plus the base forms a crude suffix stripper proposes.

    Handles plural ``-s``/``-es``/``-ies``, past ``-ed``/``-ied`` and ``-ing``,
    including consonant doubling (``running`` -> ``run``) and a dropped ``e``
    (``riding`` -> ``ride``). Stems shorter than three characters are never
    proposed, which keeps ``as`` from turning into ``a`` and ``shed`` into
    ``she``.
    """
    out = [token]

    def add(stem: str) -> None:
        if len(stem) >= _MIN_STEM and stem not in out:
            out.append(stem)

    def add_undoubled(stem: str) -> None:
        if len(stem) < _MIN_STEM:
            return
        add(stem)
        if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS:
            add(stem[:-1])
        add(stem + "e")

    if token.endswith("ies"):
        add(token[:-3] + "y")
    if token.endswith("es"):
        add(token[:-2])
    if token.endswith("s") and not token.endswith("ss"):
        add(token[:-1])
    if token.endswith("ied"):
        add(token[:-3] + "y")
    if token.endswith("ed"):
        add_undoubled(token[:-2])
    if token.endswith("ing"):
        add_undoubled(token[:-3])
    return tuple(out)


class Matcher:
    """Lexicon compiled into lookup tables for one taxonomy."""

    def __init__(self, tax: Taxonomy) -> None:
        self.tax = tax
        self.keywords: dict[str, list[str]] = {}
        self.phrases: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        for ax in tax.axes:
            for cat in ax.categories:
                entry = tax.entry(cat)
                for kw in entry.keywords:
                    self.keywords.setdefault(kw, []).append(cat)
                for phrase in entry.phrases:
                    toks = tuple(phrase.split(" "))
                    self.phrases.setdefault(toks[0], []).append((toks, cat))

    def categories(self, text: str) -> set[str]:
        tokens = tokenize(text)
        found: set[str] = set()
        keywords, phrases = self.keywords, self.phrases
        n = len(tokens)
        for i, tok in enumerate(tokens):
            for cand in stem_candidates(tok):
                hit = keywords.get(cand)
                if hit:
                    found.update(hit)
            starts = phrases.get(tok)
            if starts:
                for toks, cat in starts:
                    k = len(toks)
                    if i + k <= n and tuple(tokens[i : i + k]) == toks:
                        found.add(cat)
        return found


_MATCHERS: dict[int, tuple[Taxonomy, Matcher]] = {}


def matcher_for(tax: Taxonomy) -> Matcher:
    cached = _MATCHERS.get(id(tax))
    if cached is None or cached[0] is not tax:
        cached = (tax, Matcher(tax))
        _MATCHERS[id(tax)] = cached
    return cached[1]


def classify_prompt(text: str, tax: Taxonomy) -> LabelVector:
    found = matcher_for(tax).categories(text)
    labels = {axis: set() for axis in AXIS_NAMES}
    for cat in found:
        labels[tax.axis_of[cat]].add(cat)
    return {axis: frozenset(cats) for axis, cats in labels.items()}


def _classify_chunk(args: tuple[Taxonomy, list[Prompt]]) -> list[LabeledPrompt]:
    tax, chunk = args
    return [LabeledPrompt(p.id, classify_prompt(p.text, tax)) for p in chunk]


def check_unique_ids(ids: Iterable[str]) -> None:
    seen: set[str] = set()
    for pid in ids:
        if not pid:
            raise SchemaError("prompt id must be a non-empty string")
        if pid in seen:
            raise DuplicateIdError(f"duplicate prompt id {pid!r}")
        seen.add(pid)


def classify_corpus(
    prompts: Sequence[Prompt],
    tax: Taxonomy,
    workers: int | None = 1,
    chunk_size: int = 2000,
) -> Corpus:
    """Classify every prompt, preserving input order.

    ``workers`` > 1 spreads chunks over a process pool; ``None`` uses every
    CPU. The result does not depend on the worker count.
    """
    check_unique_ids(p.id for p in prompts)
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(prompts) <= chunk_size:
        return _classify_chunk((tax, list(prompts)))
    chunks = [(tax, list(prompts[i : i + chunk_size])) for i in range(0, len(prompts), chunk_size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_classify_chunk, chunks))
    return [lp for chunk in results for lp in chunk]


def validate_labels(corpus: Iterable[LabeledPrompt], tax: Taxonomy) -> None:
    """Raise SchemaError if any label names a category outside its axis."""
    ids = []
    for lp in corpus:
        ids.append(lp.id)
        for axis, cats in lp.labels.items():
            if axis not in AXIS_NAMES:
                raise SchemaError(f"{lp.id}: unknown axis {axis!r}")
            for cat in cats:
                if tax.axis_of.get(cat) != axis:
                    raise SchemaError(f"{lp.id}: {cat!r} is not a category of {axis}")
    check_unique_ids(ids)
