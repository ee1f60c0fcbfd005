"""Seeded synthetic corpora for tests, benchmarks and the oracle command."""

from __future__ import annotations

import random
from typing import Sequence

from curatekit.classifier import LabeledPrompt, Prompt
from curatekit.taxonomy import AXIS_NAMES, Taxonomy


def _skewed_weights(n: int, rng: random.Random, skew: float) -> list[float]:
    # Zipf-like weights over a shuffled category order
    ranks = list(range(1, n + 1))
    rng.shuffle(ranks)
    return [1.0 / r**skew for r in ranks]


def labeled_corpus(
    n: int,
    tax: Taxonomy,
    rng: random.Random,
    skew: float = 1.2,
    max_labels: int = 2,
    p_attribute: float = 1.0,
) -> list[LabeledPrompt]:
    """``n`` prompts with 1..max_labels Zipf-distributed labels per axis.

    Attribute axes are present with probability ``p_attribute`` each, so
    ``p_attribute=1`` puts every prompt in the four-axis subset.
    """
    weights = {a: _skewed_weights(len(tax.categories(a)), rng, skew) for a in AXIS_NAMES}
    out = []
    for i in range(n):
        labels = {}
        for axis in AXIS_NAMES:
            attribute = axis in ("SpatialAttribute", "TemporalAttribute")
            if attribute and rng.random() >= p_attribute:
                labels[axis] = frozenset()
                continue
            cats = tax.categories(axis)
            k = rng.randint(1, max_labels)
            labels[axis] = frozenset(rng.choices(cats, weights=weights[axis], k=k))
        out.append(LabeledPrompt(f"p{i:06d}", labels))
    return out


def prompt_texts(
    n: int,
    tax: Taxonomy,
    rng: random.Random,
    words_per_prompt: int = 40,
    filler: Sequence[str] = ("the", "of", "in", "with", "scene", "video", "is", "and", "on", "its"),
) -> list[Prompt]:
    """Random prompts mixing lexicon terms with filler words."""
    terms = sorted({t for e in tax.lexicon.values() for t in e.keywords | e.phrases})
    out = []
    for i in range(n):
        words = [
            rng.choice(terms) if rng.random() < 0.25 else rng.choice(filler)
            for _ in range(words_per_prompt)
        ]
        out.append(Prompt(f"t{i:07d}", " ".join(words)))
    return out
