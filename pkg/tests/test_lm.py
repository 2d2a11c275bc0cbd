import math

import numpy as np
import pytest

from clonelog.corpus import EOS, START, UNK, TestCase, build_vocabulary
from clonelog.lm import modelio
from clonelog.lm.decode import generate, next_token_distribution, sequence_logprob, suggest_lsd
from clonelog.lm.ngram import train_ngram
from clonelog.lm.recurrent import (
    LmHyperparams,
    PARAM_NAMES,
    RecurrentModel,
    forward_backward,
    init_params,
    train_recurrent,
)
from conftest import lsd

TINY = LmHyperparams(hidden=4, dense=3, embed=3, dropout=0.0, epochs=1, window=3)


@pytest.fixture(scope="module")
def worked_models(worked_train):
    vocab = build_vocabulary(worked_train)
    hp1 = LmHyperparams.desk(window=1, seed=0)
    hp3 = LmHyperparams.desk(window=3, seed=0)
    return vocab, train_recurrent(worked_train, vocab, hp1), train_recurrent(worked_train, vocab, hp3)


# n-gram ---------------------------------------------------------------------

def test_bigram_counts(worked_train):
    m = train_ngram(worked_train, order=2)
    assert m.prob("deleted", ["successfully"]) == pytest.approx(0.8)
    assert m.prob("created", ["successfully"]) == pytest.approx(0.2)


def test_single_sequence_and_smoothing():
    train = [lsd("a b")]
    assert train_ngram(train, 2).prob("b", ["a"]) == 1.0
    assert train_ngram(train, 2, k=1.0).prob("b", ["a"]) == pytest.approx(0.5)


def test_ngram_empty_context_uses_start_padding(worked_train):
    m = train_ngram(worked_train, 2)
    p = m.next_token_distribution([])
    assert m.tokens[int(np.argmax(p))] == "elastistor"  # three of five sequences start with it


def test_ngram_rejects_bad_input(worked_train):
    with pytest.raises(ValueError):
        train_ngram([], 2)
    with pytest.raises(ValueError):
        train_ngram(worked_train, 0)


def test_ngram_distributions_normalized(worked_train):
    m = train_ngram(worked_train, 3, vocab=build_vocabulary(worked_train))
    for ctx in ([], ["successfully"], ["volume", "successfully"], ["zzz"]):
        assert m.next_token_distribution(ctx).sum() == pytest.approx(1.0, abs=1e-9)


# recurrent --------------------------------------------------------------------

def test_gradient_check():
    rng = np.random.default_rng(1)
    V = 6
    params = init_params(V, TINY, rng)
    for k in params:
        params[k] = params[k] + rng.normal(0, 0.3, params[k].shape)
    x = rng.integers(0, V + 1, size=(5, TINY.window))
    y = rng.integers(0, V, size=5)
    _, grads = forward_backward(params, x, y)
    eps = 1e-6
    for name in PARAM_NAMES:
        p = params[name]
        num = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + eps
            lp = forward_backward(params, x, y)[0]
            p[idx] = old - eps
            lm = forward_backward(params, x, y)[0]
            p[idx] = old
            num[idx] = (lp - lm) / (2 * eps)
        denom = np.maximum(np.abs(num) + np.abs(grads[name]), 1e-8)
        rel = np.abs(num - grads[name]) / denom
        # entries where both gradients are ~0 carry no signal
        rel[(np.abs(num) < 1e-9) & (np.abs(grads[name]) < 1e-9)] = 0
        assert rel.max() < 1e-4, name


def test_softmax_normalized(worked_models):
    vocab, m1, m3 = worked_models
    rng = np.random.default_rng(0)
    for _ in range(100):
        ctx = list(rng.choice(vocab.tokens + [START, "oov"], size=rng.integers(0, 5)))
        for m in (m1, m3):
            p = m.next_token_distribution(ctx)
            assert p.min() >= 0 and abs(p.sum() - 1) < 1e-6


def test_recurrent_agrees_with_bigram_argmax(worked_train, worked_models):
    vocab, m1, _ = worked_models
    bigram = train_ngram(worked_train, 2, vocab=vocab)
    for ctx in [[START]] + [[t] for t in vocab.tokens if t not in (EOS, UNK)]:
        pb = bigram.next_token_distribution(ctx)
        top = np.sort(pb)[-2:]
        if top[1] - top[0] < 1e-12 or pb.sum() == 0:
            continue
        assert np.argmax(m1.next_token_distribution(ctx)) == np.argmax(pb), ctx
    p = m1.next_token_distribution(["successfully"])
    assert p[vocab.lookup("deleted")] > p[vocab.lookup("created")]


def test_two_continuation_fixture():
    train = [lsd("x y")] * 4 + [lsd("x z")]
    vocab = build_vocabulary(train)
    m = train_recurrent(train, vocab, LmHyperparams.desk(window=1))
    p = m.next_token_distribution(["x"])
    assert p[vocab.lookup("y")] > p[vocab.lookup("z")]
    (cand,) = generate(m, ["x", "z"], 1, 1)
    assert cand.tokens == ("x", "y")


def test_memorization():
    train = [lsd("open socket read frame close")]
    vocab = build_vocabulary(train)
    m = train_recurrent(train, vocab, LmHyperparams.desk(window=3, dropout=0.0))
    (cand,) = generate(m, ["open"], 3, 1)
    assert cand.tokens == ("open", "socket", "read", "frame", "close")


def test_loss_decreases(worked_models):
    _, m1, m3 = worked_models
    for m in (m1, m3):
        assert m.loss_curve[9] < m.loss_curve[0]
        assert len(m.loss_curve) == m.hp.epochs


def test_training_is_deterministic(worked_train):
    vocab = build_vocabulary(worked_train)
    hp = LmHyperparams.desk(window=1, epochs=5, seed=7)
    a = modelio.dumps(train_recurrent(worked_train, vocab, hp))
    b = modelio.dumps(train_recurrent(worked_train, vocab, hp))
    assert a == b
    c = modelio.dumps(train_recurrent(worked_train, vocab, LmHyperparams.desk(window=1, epochs=5, seed=8)))
    assert a != c


def test_hyperparam_profiles():
    assert LmHyperparams.paper().hidden == 500 and LmHyperparams.paper().dense == 250
    desk = LmHyperparams.desk()
    assert (desk.hidden, desk.dense, desk.epochs) == (64, 32, 50)
    with pytest.raises(ValueError):
        LmHyperparams(dropout=1.0)
    with pytest.raises(ValueError):
        LmHyperparams(optimizer="rmsprop")


def test_empty_training_set_rejected(worked_train):
    vocab = build_vocabulary(worked_train)
    with pytest.raises(ValueError):
        train_recurrent([], vocab, TINY)


# decoding -----------------------------------------------------------------------

def test_bigram_decode_rewrites_seed(worked_train):
    m = train_ngram(worked_train, 2)
    (best,) = generate(m, "successfully created floating ip".split(), 1, 1)
    assert best.tokens == ("successfully", "deleted", "floating", "ip")


def test_beam_contract(worked_train):
    m = train_ngram(worked_train, 4)
    cands = generate(m, "successfully created floating ip".split(), 3, 3)
    assert 1 <= len(cands) <= 3
    assert len({c.tokens for c in cands}) == len(cands)
    assert [c.score for c in cands] == sorted((c.score for c in cands), reverse=True)
    with pytest.raises(ValueError):
        generate(m, ["a"], 1, 0)
    with pytest.raises(ValueError):
        generate(m, [], 1, 1)


def test_max_len_bounds_output(worked_train):
    m = train_ngram(worked_train, 2)
    for c in generate(m, ["elastistor"], 1, 2, max_len=3):
        assert len(c.tokens) <= 3


def test_sequence_logprob_is_sum_of_steps(worked_models):
    _, m1, _ = worked_models
    seq = ["successfully", "deleted", "condition", EOS]
    total = 0.0
    for t in range(len(seq)):
        p = next_token_distribution(m1, seq[:t], 1)
        total += math.log(p[m1.vocab.lookup(seq[t])])
    assert sequence_logprob(m1, seq, 1) == pytest.approx(total)


def test_suggest_modes(worked_train, worked_models):
    _, m1, m3 = worked_models
    case = TestCase("q", "c", 0, lsd("successfully created floating ip"), lsd("successfully deleted floating ip"))
    (echo,) = suggest_lsd(case, None, "no_nlp")
    assert echo.words == case.seed.words
    (one,) = suggest_lsd(case, m1, "nlp_1")
    assert one.words == ("successfully", "deleted", "floating", "ip")
    three = suggest_lsd(case, m3, "nlp_3")
    assert 1 <= len(three) <= 3
    with pytest.raises(ValueError):
        suggest_lsd(case, None, "nlp_1")


# model files -----------------------------------------------------------------

def test_model_round_trip_bit_exact(worked_train, worked_models, tmp_path):
    vocab, m1, _ = worked_models
    path = tmp_path / "m.model"
    modelio.save(m1, path, "abc")
    back = modelio.load(path)
    assert isinstance(back, RecurrentModel)
    assert all(np.array_equal(back.params[k], m1.params[k]) for k in PARAM_NAMES)
    assert modelio.dumps(back, "abc") == path.read_bytes()
    head = modelio.read_header(path.read_bytes())
    assert head["config_hash"] == "abc" and head["model_kind"] == "lstm"

    ng = train_ngram(worked_train, 2, vocab=vocab)
    ng_back = modelio.loads(modelio.dumps(ng))
    assert np.array_equal(ng_back.next_token_distribution(["successfully"]), ng.next_token_distribution(["successfully"]))


def test_model_version_mismatch(worked_train):
    data = modelio.dumps(train_ngram(worked_train, 2))
    bad = data.replace(b'"format_version":1', b'"format_version":99')
    with pytest.raises(modelio.ModelFormatError):
        modelio.loads(bad)
    with pytest.raises(modelio.ModelFormatError):
        modelio.loads(b"garbage")
