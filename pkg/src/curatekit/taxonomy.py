"""Classification taxonomy: four attribute axes, their categories and lexicons.

A taxonomy file is JSON of the form::

    {"version": "...",
     "axes": [{"name": "SpatialContent", "categories": ["People", ...]}, ...],
     "lexicon": {"People": {"keywords": [...], "phrases": [...],
                            "match": "lexicon"}}}

Lexicon entries are canonicalised on load: lowercased and split into
alphanumeric tokens, so ``"Close-Up"`` becomes the phrase ``"close up"``.
An entry that canonicalises to a single token is a keyword, anything longer
is a phrase, whichever list it was written in.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterator, Mapping

from curatekit.errors import ParseError, SchemaError

SPATIAL_CONTENT = "SpatialContent"
TEMPORAL_CONTENT = "TemporalContent"
SPATIAL_ATTRIBUTE = "SpatialAttribute"
TEMPORAL_ATTRIBUTE = "TemporalAttribute"

AXIS_NAMES = (SPATIAL_CONTENT, TEMPORAL_CONTENT, SPATIAL_ATTRIBUTE, TEMPORAL_ATTRIBUTE)
AXIS_SIZES = {
    SPATIAL_CONTENT: 9,
    TEMPORAL_CONTENT: 4,
    SPATIAL_ATTRIBUTE: 3,
    TEMPORAL_ATTRIBUTE: 3,
}

MATCH_LEXICON = "lexicon"
MATCH_NONE = "none"

_TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it on every non-alphanumeric character."""
    return _TOKEN_RE.findall(text.lower())


def normalize_entry(entry: str) -> str:
    return " ".join(tokenize(entry))


@dataclass(frozen=True)
class Axis:
    name: str
    categories: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.categories)


@dataclass(frozen=True)
class LexiconEntry:
    keywords: frozenset[str] = frozenset()
    phrases: frozenset[str] = frozenset()
    match: str = MATCH_LEXICON

    @property
    def is_empty(self) -> bool:
        return not self.keywords and not self.phrases


@dataclass(frozen=True, eq=True)
class Taxonomy:
    """Immutable taxonomy; safe to share across worker processes."""

    version: str
    axes: tuple[Axis, ...]
    lexicon: Mapping[str, LexiconEntry] = field(hash=False)

    def __post_init__(self) -> None:
        _check_axes(self.axes)
        for cat in self.lexicon:
            if cat not in self.axis_of:
                raise SchemaError(f"lexicon entry for unknown category {cat!r}")

    def axis(self, name: str) -> Axis:
        for ax in self.axes:
            if ax.name == name:
                return ax
        raise KeyError(name)

    def categories(self, axis: str) -> tuple[str, ...]:
        return self.axis(axis).categories

    @cached_property
    def axis_of(self) -> dict[str, str]:
        """Category name to owning axis name."""
        return {c: ax.name for ax in self.axes for c in ax.categories}

    @cached_property
    def rank(self) -> dict[str, int]:
        """Position of each category within its axis, in file order."""
        return {c: i for ax in self.axes for i, c in enumerate(ax.categories)}

    def entry(self, category: str) -> LexiconEntry:
        return self.lexicon.get(category, LexiconEntry())

    def __iter__(self) -> Iterator[Axis]:
        return iter(self.axes)

    def __getstate__(self):
        # drop cached properties; they are rebuilt lazily after unpickling
        return {k: v for k, v in self.__dict__.items() if k in ("version", "axes", "lexicon")}

    def __setstate__(self, state):
        self.__dict__.update(state)


def _check_axes(axes: tuple[Axis, ...]) -> None:
    names = [ax.name for ax in axes]
    if sorted(names) != sorted(AXIS_NAMES):
        raise SchemaError(f"expected axes {list(AXIS_NAMES)}, got {names}")
    seen: dict[str, str] = {}
    for ax in axes:
        if len(ax.categories) != AXIS_SIZES[ax.name]:
            raise SchemaError(
                f"axis {ax.name} needs {AXIS_SIZES[ax.name]} categories, has {len(ax.categories)}"
            )
        for cat in ax.categories:
            if not isinstance(cat, str) or not cat.strip():
                raise SchemaError(f"bad category name {cat!r} on axis {ax.name}")
            if cat in seen:
                raise SchemaError(f"duplicate category {cat!r} (axes {seen[cat]}, {ax.name})")
            seen[cat] = ax.name


def _entry_from_dict(cat: str, raw) -> LexiconEntry:
    if not isinstance(raw, dict):
        raise SchemaError(f"lexicon entry for {cat!r} must be an object")
    match = raw.get("match", MATCH_LEXICON)
    if match not in (MATCH_LEXICON, MATCH_NONE):
        raise SchemaError(f"lexicon entry for {cat!r}: bad match mode {match!r}")
    keywords: set[str] = set()
    phrases: set[str] = set()
    for key in ("keywords", "phrases"):
        values = raw.get(key, [])
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise SchemaError(f"lexicon entry for {cat!r}: {key} must be a list of strings")
        for value in values:
            norm = normalize_entry(value)
            if not norm:
                raise SchemaError(f"lexicon entry for {cat!r}: {value!r} has no word characters")
            (phrases if " " in norm else keywords).add(norm)
    return LexiconEntry(frozenset(keywords), frozenset(phrases), match)


def taxonomy_from_dict(doc) -> Taxonomy:
    if not isinstance(doc, dict):
        raise SchemaError("taxonomy document must be a JSON object")
    try:
        version = str(doc["version"])
        raw_axes = doc["axes"]
        raw_lexicon = doc.get("lexicon", {})
    except KeyError as exc:
        raise SchemaError(f"taxonomy missing field {exc.args[0]!r}") from None
    if not isinstance(raw_axes, list) or not isinstance(raw_lexicon, dict):
        raise SchemaError("'axes' must be a list and 'lexicon' an object")
    axes = []
    for raw in raw_axes:
        if not isinstance(raw, dict) or "name" not in raw or "categories" not in raw:
            raise SchemaError(f"malformed axis {raw!r}")
        axes.append(Axis(raw["name"], tuple(raw["categories"])))
    lexicon = {cat: _entry_from_dict(cat, raw) for cat, raw in raw_lexicon.items()}
    return Taxonomy(version, tuple(axes), lexicon)


def taxonomy_to_dict(tax: Taxonomy) -> dict:
    lexicon = {}
    for ax in tax.axes:
        for cat in ax.categories:
            if cat in tax.lexicon:
                e = tax.lexicon[cat]
                lexicon[cat] = {
                    "keywords": sorted(e.keywords),
                    "phrases": sorted(e.phrases),
                    "match": e.match,
                }
    return {
        "version": tax.version,
        "axes": [{"name": ax.name, "categories": list(ax.categories)} for ax in tax.axes],
        "lexicon": lexicon,
    }


def load_taxonomy(path: str | Path) -> Taxonomy:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read taxonomy {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return taxonomy_from_dict(doc)


def write_taxonomy(tax: Taxonomy, path: str | Path) -> None:
    Path(path).write_text(json.dumps(taxonomy_to_dict(tax), indent=2) + "\n", encoding="utf-8")


def default_taxonomy_path() -> Path:
    return Path(str(resources.files("curatekit") / "data" / "taxonomy.json"))


def default_taxonomy() -> Taxonomy:
    return load_taxonomy(default_taxonomy_path())


def validate_lexicon(tax: Taxonomy) -> list[str]:
    """Diagnostic pass over the lexicon. Returns human-readable warnings.

    Reports categories that can never match, entries shared between
    categories (expected for a multi-label scheme, listed for review) and
    phrases that are a token prefix of a longer phrase in the same category.
    """
    warnings: list[str] = []
    owners: dict[str, list[str]] = {}
    for ax in tax.axes:
        for cat in ax.categories:
            e = tax.entry(cat)
            if e.is_empty and e.match != MATCH_NONE:
                warnings.append(f"unmatchable category: {cat!r} has no keywords or phrases")
            for term in sorted(e.keywords | e.phrases):
                owners.setdefault(term, []).append(cat)
            phrases = sorted(e.phrases)
            for short in phrases:
                for long in phrases:
                    if long != short and long.startswith(short + " "):
                        warnings.append(
                            f"phrase prefix: {short!r} is a prefix of {long!r} in {cat!r}"
                        )
    for term in sorted(owners):
        cats = owners[term]
        if len(cats) > 1:
            warnings.append(f"shared entry: {term!r} appears in {', '.join(cats)}")
    return warnings
