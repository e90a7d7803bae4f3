import dataclasses

import numpy as np
import pytest

from structblock import corpus as C
from structblock.errors import DataError, DigestMismatchError, DivergenceError
from structblock.model import ModelConfig
from structblock.train import (
    TrainConfig,
    ablation,
    ensemble_proba,
    evaluate,
    format_ablation,
    train,
)


def small_config(vocab, **kw):
    base = ModelConfig(
        d_w=8, kernel_widths=(2, 3), filters=6, hidden_dim=16,
        num_classes=len(vocab.labels), vocab_size=len(vocab.words),
        max_block_len=16, max_entity_len=4, dropout=0.0, seed=1,
    )
    return dataclasses.replace(base, **kw)


def test_training_is_deterministic(small_corpus):
    tr, te, vocab = small_corpus
    cfg = small_config(vocab, dropout=0.3)
    tc = TrainConfig(epochs=3, batch_size=16, patience=0)
    ck1, h1 = train(cfg, tc, tr, te, vocab)
    ck2, h2 = train(cfg, tc, tr, te, vocab)
    assert h1.to_csv() == h2.to_csv()
    assert ck1.params.digest() == ck2.params.digest()
    ck3, _ = train(dataclasses.replace(cfg, seed=2), tc, tr, te, vocab)
    assert ck3.params.digest() != ck1.params.digest()


def test_zero_learning_rate_keeps_loss_constant(small_corpus):
    tr, _, vocab = small_corpus
    cfg = small_config(vocab)
    # full-batch so every epoch sees the same mean
    _, hist = train(cfg, TrainConfig(lr=0.0, epochs=3, batch_size=len(tr), patience=0), tr, [], vocab)
    losses = [r.loss for r in hist.epochs]
    assert max(losses) - min(losses) < 1e-12


def test_loss_decreases(small_corpus):
    tr, _, vocab = small_corpus
    _, hist = train(small_config(vocab), TrainConfig(lr=1e-2, epochs=15, batch_size=20, patience=0), tr, [], vocab)
    assert hist.epochs[-1].loss < hist.epochs[0].loss


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_raises(small_corpus):
    tr, _, vocab = small_corpus
    cfg = small_config(vocab)
    table = C.EmbeddingTable(cfg.d_w, np.full((cfg.vocab_size, cfg.d_w), 1e306), 1.0)
    with pytest.raises(DivergenceError):
        train(cfg, TrainConfig(epochs=1), tr, [], vocab, embeddings=table)


def test_config_vocab_mismatch(small_corpus):
    tr, _, vocab = small_corpus
    with pytest.raises(DataError):
        train(small_config(vocab, num_classes=2), TrainConfig(epochs=1), tr, [], vocab)


def test_early_stopping_and_metadata(small_corpus):
    tr, te, vocab = small_corpus
    ck, hist = train(small_config(vocab), TrainConfig(lr=0.0, epochs=20, patience=2), tr, te, vocab)
    # constant parameters never improve after the first epoch
    assert len(hist.epochs) == 3 and hist.best_epoch == 1
    assert ck.metadata["epochs"] == 3 and ck.metadata["seed"] == 1
    assert hist.timing_csv().count("\n") == 4
    assert hist.to_csv().splitlines()[0] == "epoch,loss,acc,f1"


@pytest.fixture(scope="module")
def three_models(small_corpus):
    tr, te, vocab = small_corpus
    tc = TrainConfig(lr=5e-3, epochs=2, batch_size=20, patience=0)
    return [train(small_config(vocab, seed=s), tc, tr, [], vocab)[0] for s in (11, 12, 13)]


def test_ensemble_of_one_equals_single(small_corpus, three_models):
    _, te, vocab = small_corpus
    ck = three_models[0]
    m1, p1 = evaluate(ck, te, vocab)
    m2, p2 = evaluate([ck, ck], te, vocab)
    np.testing.assert_allclose(p1, p2, atol=1e-15)
    assert m1.macro_f1 == m2.macro_f1


def test_ensemble_order_invariant(small_corpus, three_models):
    _, te, vocab = small_corpus
    a = ensemble_proba(three_models, te, vocab)
    b = ensemble_proba(three_models[::-1], te, vocab)
    assert np.array_equal(a, b)
    assert np.max(np.abs(a.sum(axis=1) - 1)) < 1e-12
    singles = [ensemble_proba([m], te, vocab) for m in three_models]
    np.testing.assert_allclose(a, sum(singles) / 3, atol=1e-14)


def test_evaluate_rejects_other_vocab(small_corpus, three_models):
    _, te, vocab = small_corpus
    other = C.build_vocab(te)
    with pytest.raises(DigestMismatchError):
        evaluate(three_models[0], te, other)


def test_ablation_report(small_corpus):
    tr, te, vocab = small_corpus
    res = ablation(small_config(vocab), TrainConfig(epochs=1, patience=0), tr, te, vocab)
    text = format_ablation(res, "synthetic")
    assert "with-children" in text and "without-children" in text and "delta" in text
