import math
import random

import pytest

from curatekit.balancer import SubsetId, TaggedPrompt, partition_corpus
from curatekit.errors import EmptyError, OneClassError, SizeError, TooLargeError
from curatekit.metrics import score_corpus
from curatekit.oracle import (
    exhaustive_best_subset,
    labels_from_keys,
    naive_balance,
    naive_entropy,
    naive_ols,
    pairwise_auc_oracle,
    random_subset_pgbs,
)
from curatekit.synthetic import labeled_corpus

from conftest import lp


def _p4(pid, sc, tc, sa, ta):
    return lp(pid, sc={sc}, tc={tc}, sa={sa}, ta={ta})


def _tagged(corpus, tax):
    return partition_corpus(corpus, tax).subsets[SubsetId.P4]


def test_naive_entropy_uniform():
    assert naive_entropy([3, 3, 3, 3]) == pytest.approx(math.log(4), abs=1e-15)


def test_naive_entropy_empty():
    with pytest.raises(EmptyError):
        naive_entropy([0, 0])


def test_pairwise_auc():
    assert pairwise_auc_oracle([0.4, 0.8], [0.6, 0.9]) == 0.75
    assert pairwise_auc_oracle([0.3, 0.3], [0.3, 0.3]) == 0.5
    with pytest.raises(OneClassError):
        pairwise_auc_oracle([], [0.1])


def test_naive_ols_hand_case():
    slope, intercept, r2 = naive_ols([1, 2, 3], [1, 2, 2])
    assert slope == pytest.approx(0.5)
    assert intercept == pytest.approx(2 / 3)
    assert r2 == pytest.approx(0.75)


def test_labels_from_keys_round_trip(tax):
    original = lp("x", sc={"People", "Animals"}, tc={"Actions"}, sa={"Color"}, ta={"Speed", "Event Order"})
    (tp,) = _tagged([original], tax)
    assert labels_from_keys(tp) == original


def test_exhaustive_symmetric_tie(tax):
    corpus = [_p4(pid, "People", "Actions", "Color", "Speed") for pid in "dcba"]
    ids, _ = exhaustive_best_subset(_tagged(corpus, tax), 2, tax)
    assert ids == ["a", "b"]


def test_exhaustive_drops_dominant_category(tax):
    corpus = [_p4(f"p{i}", "People", "Actions", "Color", "Speed") for i in range(1, 5)]
    corpus.append(_p4("p5", "Animals", "Fluid Motions", "Quantity", "Event Order"))
    corpus.append(_p4("p6", "Plants", "Light Change", "Camera View", "Motion Direction"))
    ids, best = exhaustive_best_subset(_tagged(corpus, tax), 3, tax)
    assert ids == ["p1", "p5", "p6"]
    assert best == pytest.approx(score_corpus([corpus[0], corpus[4], corpus[5]], tax).PGBS)


def test_exhaustive_guards(tax):
    tps = [TaggedPrompt(f"p{i}", SubsetId.P1, (("People", "Actions"),)) for i in range(25)]
    with pytest.raises(TooLargeError):
        exhaustive_best_subset(tps, 2, tax)
    with pytest.raises(SizeError):
        exhaustive_best_subset(tps[:3], 4, tax)


def test_random_subset_full_size(tax):
    corpus = labeled_corpus(30, tax, random.Random(1))
    assert random_subset_pgbs(corpus, 30, 1, 5, tax) == [
        pytest.approx(score_corpus(corpus, tax).PGBS, abs=1e-12)
    ]


def test_random_subset_seeded(tax):
    corpus = labeled_corpus(60, tax, random.Random(2))
    a = random_subset_pgbs(corpus, 20, 10, 42, tax)
    assert a == random_subset_pgbs(corpus, 20, 10, 42, tax)
    assert a != random_subset_pgbs(corpus, 20, 10, 43, tax)
    with pytest.raises(SizeError):
        random_subset_pgbs(corpus, 61, 1, 0, tax)
    with pytest.raises(SizeError):
        random_subset_pgbs(corpus, 5, 0, 0, tax)


def test_naive_balance_agrees_on_example(tax):
    corpus = labeled_corpus(50, tax, random.Random(3), p_attribute=0.6)
    report = score_corpus(corpus, tax)
    naive = naive_balance(corpus, tax)
    assert naive["PGBS"] == pytest.approx(report.PGBS, abs=1e-12)
