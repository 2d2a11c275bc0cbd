import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clonelog.metrics import (
    BleuConfig,
    ConfusionMatrix,
    bleu,
    brevity_penalty,
    confusion_stats,
    lcs_length,
    modified_precision,
    rouge_l,
    rouge_n,
)

B = {n: BleuConfig.cumulative(n) for n in range(1, 5)}


def toks(s):
    return s.split()


# (candidate, reference, metric, expected); every value worked out by hand.
ORACLE = [
    # worked example: one substituted word in a four-word description
    ("successfully created floating ip", "successfully deleted floating ip", "B-1", 75.00),
    ("successfully created floating ip", "successfully deleted floating ip", "B-2", 50.00),
    ("successfully created floating ip", "successfully deleted floating ip", "B-3", 0.00),
    ("successfully created floating ip", "successfully deleted floating ip", "R-1", 75.00),
    ("successfully created floating ip", "successfully deleted floating ip", "R-2", 33.33),
    ("successfully created floating ip", "successfully deleted floating ip", "R-3", 0.00),
    ("successfully created floating ip", "successfully deleted floating ip", "R-L", 75.00),
    # identity
    ("a b c d", "a b c d", "B-4", 100.00),
    ("a b c d", "a b c d", "R-2", 100.00),
    ("a b c d", "a b c d", "R-L", 100.00),
    # disjoint
    ("a b", "c d", "B-1", 0.00),
    ("a b", "c d", "R-1", 0.00),
    ("a b", "c d", "R-L", 0.00),
    # short candidate: full precision, brevity penalty exp(1 - 4/2)
    ("the cat", "the cat sat on", "B-1", 36.79),
    ("the cat", "the cat sat on", "B-2", 36.79),
    ("the cat", "the cat sat on", "R-1", 50.00),
    # clipped counts
    ("the the the the", "the cat", "B-1", 25.00),
    ("the the the the", "the cat", "R-1", 50.00),
    ("a a a", "a a b", "B-2", 57.74),
    ("a a a", "a a b", "R-1", 66.67),
    ("a a a", "a a b", "R-2", 50.00),
    # long candidate, no penalty
    ("a b c d e", "a b c", "B-1", 60.00),
    ("a b c d e", "a b c", "B-2", 54.77),
    ("a b c d e", "a b c", "R-L", 100.00),
    # order matters beyond unigrams
    ("d c b a", "a b c d", "B-1", 100.00),
    ("d c b a", "a b c d", "B-2", 0.00),
    ("d c b a", "a b c d", "R-L", 25.00),
    # three-word suffix of a four-word reference; no 4-grams in the candidate
    ("deleted floating ip", "successfully deleted floating ip", "B-3", 71.65),
    ("deleted floating ip", "successfully deleted floating ip", "B-4", 0.00),
    ("deleted floating ip", "successfully deleted floating ip", "R-2", 66.67),
    ("deleted floating ip", "successfully deleted floating ip", "R-3", 50.00),
    ("police killed the gunman", "police kill the gunman", "R-L", 75.00),
    ("the cat sat", "the cat sat on the mat", "B-2", 36.79),
    # empty candidate
    ("", "a b", "B-1", 0.00),
    ("", "a b", "R-1", 0.00),
    ("", "a b", "R-L", 0.00),
]


def score(metric, cand, ref):
    kind, n = metric.split("-")
    if kind == "B":
        return bleu(cand, ref, B[int(n)])
    if n == "L":
        return rouge_l(cand, ref)
    return rouge_n(cand, ref, int(n))


@pytest.mark.parametrize("cand,ref,metric,expected", ORACLE)
def test_text_metric_oracle(cand, ref, metric, expected):
    assert round(score(metric, toks(cand), toks(ref)), 2) == expected


def test_oracle_suite_is_large_enough():
    assert len(ORACLE) >= 20


def test_end_marker_is_ignored():
    a = toks("successfully created floating ip")
    r = toks("successfully deleted floating ip")
    assert bleu(a + ["<eos>"], r + ["<eos>"], B[2]) == bleu(a, r, B[2])
    assert rouge_l(a + ["<eos>"], r) == rouge_l(a, r)


def test_rouge_n_undefined_for_short_reference():
    assert rouge_n(["done"], ["done"], 2) is None
    assert rouge_n(["done"], ["done"], 1) == 100.0


def test_rouge_l_f_measure():
    # lcs 2, recall 2/4, precision 2/3
    assert round(rouge_l(toks("a b c"), toks("a c d e"), f_measure=True), 2) == 57.14


def test_bleu_rejects_empty_reference():
    with pytest.raises(ValueError):
        bleu(["a"], [])


def test_bleu_weights_validated():
    with pytest.raises(ValueError):
        BleuConfig((0.5, 0.4))
    with pytest.raises(ValueError):
        BleuConfig((1.5, -0.5))


def test_bleu3_preset_is_uniform():
    assert B[3].weights[:3] == (1 / 3, 1 / 3, 1 / 3)
    assert B[3].max_order == 3


def test_brevity_penalty_edges():
    assert brevity_penalty(0, 3) == 0.0
    assert brevity_penalty(5, 3) == 1.0
    assert brevity_penalty(3, 3) == 1.0
    assert brevity_penalty(2, 4) == pytest.approx(math.exp(-1))


def test_modified_precision_clips():
    assert modified_precision(toks("the the the"), toks("the cat the"), 1) == pytest.approx(2 / 3)


# confusion statistics ------------------------------------------------------

def test_confusion_reference_rows():
    full_row = confusion_stats(ConfusionMatrix(tp=862, tn=217, fp=18, fn=17))
    assert full_row["precision"] == pytest.approx(97.95, abs=0.01)
    assert full_row["recall"] == pytest.approx(98.07, abs=0.01)
    assert full_row["f_measure"] == pytest.approx(98.01, abs=0.01)
    assert full_row["balanced_accuracy"] == pytest.approx(95.20, abs=0.01)
    baseline_row = confusion_stats(ConfusionMatrix(tp=560, tn=219, fp=16, fn=319))
    assert baseline_row["precision"] == pytest.approx(97.22, abs=0.01)
    assert baseline_row["recall"] == pytest.approx(63.71, abs=0.01)
    assert baseline_row["balanced_accuracy"] == pytest.approx(78.45, abs=0.01)


def test_confusion_undefined_stats_are_none():
    s = confusion_stats(ConfusionMatrix(tp=0, tn=5, fp=0, fn=0))
    assert s["precision"] is None and s["recall"] is None and s["balanced_accuracy"] is None
    assert confusion_stats(ConfusionMatrix(0, 0, 0, 3))["recall"] == 0.0


def test_confusion_rejects_negative():
    with pytest.raises(ValueError):
        ConfusionMatrix(-1, 0, 0, 0)


def test_confusion_addition():
    assert ConfusionMatrix(1, 2, 3, 4) + ConfusionMatrix(1, 1, 1, 1) == ConfusionMatrix(2, 3, 4, 5)


# properties -----------------------------------------------------------------

words = st.lists(st.sampled_from("abcde"), min_size=0, max_size=7)


def brute_lcs(a, b):
    best = 0
    for k in range(len(a) + 1):
        for idx in itertools.combinations(range(len(a)), k):
            sub = [a[i] for i in idx]
            it = iter(b)
            if all(x in it for x in sub):
                best = max(best, k)
    return best


@given(words, words)
def test_lcs_matches_brute_force(a, b):
    assert lcs_length(a, b) == brute_lcs(a, b)


@given(words.filter(bool), words.filter(bool))
def test_scores_are_bounded(a, b):
    for n in range(1, 5):
        assert 0.0 <= bleu(a, b, B[n]) <= 100.0 + 1e-9
    assert 0.0 <= rouge_l(a, b) <= 100.0
    r1 = rouge_n(a, b, 1)
    assert r1 is not None and 0.0 <= r1 <= 100.0


@given(words.filter(bool))
def test_identity_scores_full(a):
    assert rouge_l(a, a) == 100.0
    assert bleu(a, a, B[1]) == pytest.approx(100.0)
    if len(a) >= 4:
        assert bleu(a, a, B[4]) == pytest.approx(100.0)
