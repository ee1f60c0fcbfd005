import json

import pytest

from curatekit.errors import ParseError, SchemaError
from curatekit.taxonomy import (
    AXIS_NAMES,
    load_taxonomy,
    taxonomy_to_dict,
    tokenize,
    validate_lexicon,
    write_taxonomy,
)


def _doc(tax):
    return taxonomy_to_dict(tax)


def _write(tmp_path, doc, name="tax.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_default_axis_sizes(tax):
    assert [len(tax.axis(a)) for a in AXIS_NAMES] == [9, 4, 3, 3]


def test_categories_keep_file_order(tax, tmp_path):
    doc = _doc(tax)
    doc["axes"][0]["categories"] = list(reversed(doc["axes"][0]["categories"]))
    loaded = load_taxonomy(_write(tmp_path, doc))
    assert loaded.categories("SpatialContent") == tuple(doc["axes"][0]["categories"])


def test_eight_spatial_categories_rejected(tax, tmp_path):
    doc = _doc(tax)
    dropped = doc["axes"][0]["categories"].pop()
    doc["lexicon"].pop(dropped)
    with pytest.raises(SchemaError):
        load_taxonomy(_write(tmp_path, doc))


def test_duplicate_category_rejected(tax, tmp_path):
    doc = _doc(tax)
    doc["axes"][1]["categories"][0] = doc["axes"][0]["categories"][0]
    with pytest.raises(SchemaError):
        load_taxonomy(_write(tmp_path, doc))


def test_unknown_lexicon_category_rejected(tax, tmp_path):
    doc = _doc(tax)
    doc["lexicon"]["Robots"] = {"keywords": ["robot"], "phrases": []}
    with pytest.raises(SchemaError):
        load_taxonomy(_write(tmp_path, doc))


def test_missing_axis_rejected(tax, tmp_path):
    doc = _doc(tax)
    doc["axes"] = doc["axes"][:3]
    with pytest.raises(SchemaError):
        load_taxonomy(_write(tmp_path, doc))


def test_malformed_json_is_parse_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_taxonomy(path)


def test_keywords_are_normalised(tax, tmp_path):
    doc = _doc(tax)
    doc["lexicon"]["Color"]["keywords"].append("White")
    doc["lexicon"]["Camera View"]["keywords"].append("Close-Up")
    loaded = load_taxonomy(_write(tmp_path, doc))
    assert "white" in loaded.entry("Color").keywords
    # a hyphenated keyword becomes a phrase on the token boundary
    assert "close up" in loaded.entry("Camera View").phrases
    for e in loaded.lexicon.values():
        assert all(" " not in k and k == k.lower() for k in e.keywords)
        assert all(" " in p and p == p.lower() for p in e.phrases)


def test_round_trip(tax, tmp_path):
    path = tmp_path / "rt.json"
    write_taxonomy(tax, path)
    assert load_taxonomy(path) == tax


def test_loading_is_deterministic(tax, tmp_path):
    path = tmp_path / "a.json"
    write_taxonomy(tax, path)
    assert load_taxonomy(path) == load_taxonomy(path)


def test_tokenize_splits_punctuation():
    assert tokenize("A Close-Up, bird's-eye") == ["a", "close", "up", "bird", "s", "eye"]


def test_default_warnings_flag_shared_fire(tax):
    warnings = validate_lexicon(tax)
    fire = [w for w in warnings if w.startswith("shared entry: 'fire' ")]
    assert len(fire) == 1
    assert "Fluid Motions" in fire[0] and "Light Change" in fire[0]


def test_disjoint_lexicon_has_no_warnings(tax, tmp_path):
    doc = _doc(tax)
    for i, cat in enumerate(doc["lexicon"]):
        doc["lexicon"][cat] = {"keywords": [f"word{i}"], "phrases": [], "match": "lexicon"}
    assert validate_lexicon(load_taxonomy(_write(tmp_path, doc))) == []


def test_unmatchable_category_warns(tax, tmp_path):
    doc = _doc(tax)
    doc["lexicon"]["Plants"] = {"keywords": [], "phrases": []}
    warnings = validate_lexicon(load_taxonomy(_write(tmp_path, doc)))
    assert any(w.startswith("unmatchable category: 'Plants'") for w in warnings)
    doc["lexicon"]["Plants"]["match"] = "none"
    warnings = validate_lexicon(load_taxonomy(_write(tmp_path, doc)))
    assert not any("unmatchable" in w for w in warnings)


def test_phrase_prefix_warns(tax, tmp_path):
    doc = _doc(tax)
    doc["lexicon"]["Speed"]["phrases"].append("stop motion blur")
    warnings = validate_lexicon(load_taxonomy(_write(tmp_path, doc)))
    assert "phrase prefix: 'stop motion' is a prefix of 'stop motion blur' in 'Speed'" in warnings
