"""Training loop, evaluation, probability-averaging ensembles and the
with/without-children ablation."""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import tensor as T
from .corpus import Vocab
from .errors import DataError, DigestMismatchError, DivergenceError, NonFiniteError
from .metrics import SCORE_MODES, Metrics, compute_metrics
from .model import Checkpoint, ModelConfig, featurize_instances, forward, init_params, predict_proba

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 50
    epochs: int = 100
    patience: int = 10
    score_mode: str = "official"

    def __post_init__(self):
        if self.batch_size < 1 or self.epochs < 1:
            raise DataError("batch_size and epochs must be positive")
        if self.score_mode not in SCORE_MODES:
            raise DataError(f"score_mode must be one of {SCORE_MODES}")


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    train_acc: float
    eval_f1: float
    seconds: float


@dataclass
class TrainHistory:
    seed: int
    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0

    def to_csv(self):
        """Deterministic columns only; wall-clock times go to :meth:`timing_csv`."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", "loss", "acc", "f1"])
        for r in self.epochs:
            w.writerow([r.epoch, repr(r.loss), repr(r.train_acc), repr(r.eval_f1)])
        return buf.getvalue()

    def timing_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", "seconds"])
        for r in self.epochs:
            w.writerow([r.epoch, f"{r.seconds:.6f}"])
        return buf.getvalue()

    @property
    def mean_epoch_seconds(self):
        if not self.epochs:
            return 0.0
        return math.fsum(r.seconds for r in self.epochs) / len(self.epochs)


def _evaluate_params(params, feats, label_names, mode):
    probs = predict_proba(params, feats)
    return compute_metrics(feats.labels, probs.argmax(axis=1), label_names, mode)


def train(
    config: ModelConfig,
    train_cfg: TrainConfig,
    train_set,
    eval_set,
    vocab: Vocab,
    embeddings=None,
    progress=None,
) -> tuple[Checkpoint, TrainHistory]:
    """Mini-batch Adam training with early stopping on eval macro-F1.

    Everything random (initialisation, shuffling, dropout) derives from
    ``config.seed``. The returned checkpoint holds the parameters of the best
    eval epoch (the last epoch when ``eval_set`` is empty).
    """
    if not train_set:
        raise DataError("empty training set")
    if config.num_classes != len(vocab.labels) or config.vocab_size != len(vocab.words):
        raise DataError("model config does not match vocabulary sizes")
    label_names = vocab.label_names()
    train_feats = featurize_instances(list(train_set), vocab, config)
    eval_feats = featurize_instances(list(eval_set), vocab, config) if eval_set else None

    params = init_params(config, embeddings)
    trainable = params.trainable()
    state = T.AdamState(train_cfg.lr, train_cfg.beta1, train_cfg.beta2, train_cfg.eps)
    seeds = np.random.SeedSequence(config.seed).spawn(2)
    shuffle_rng = np.random.default_rng(seeds[0])
    dropout_rng = np.random.default_rng(seeds[1])

    history = TrainHistory(config.seed)
    best = None
    best_f1 = -1.0
    stale = 0
    n = len(train_feats)
    for epoch in range(1, train_cfg.epochs + 1):
        t0 = time.perf_counter()
        order = shuffle_rng.permutation(n)
        losses = []
        correct = 0
        for bstart in range(0, n, train_cfg.batch_size):
            idx = order[bstart:bstart + train_cfg.batch_size]
            batch = train_feats.take(idx)
            params.zero_grad()
            try:
                res = forward(params, batch, training=True, rng=dropout_rng)
                T.backward(res.loss)
            except NonFiniteError as exc:
                raise DivergenceError(
                    f"non-finite values at epoch {epoch}, batch starting {bstart}: {exc}"
                ) from None
            loss = float(res.loss.data)
            if not math.isfinite(loss):
                raise DivergenceError(f"loss is {loss} at epoch {epoch}")
            losses.append(loss * len(idx))
            correct += int((res.probs.argmax(axis=1) == batch.labels).sum())
            T.adam_step(trainable, [p.grad for p in trainable], state)
        epoch_loss = math.fsum(losses) / n
        train_acc = correct / n
        if eval_feats is not None and len(eval_feats):
            eval_f1 = _evaluate_params(params, eval_feats, label_names, train_cfg.score_mode).macro_f1
        else:
            eval_f1 = 0.0
        seconds = time.perf_counter() - t0
        history.epochs.append(EpochRecord(epoch, epoch_loss, train_acc, eval_f1, seconds))
        if progress is not None:
            progress(history.epochs[-1])
        logger.info("epoch %d loss %.4f acc %.4f f1 %.4f (%.1fs)", epoch, epoch_loss, train_acc, eval_f1, seconds)

        if eval_feats is None or not len(eval_feats):
            best, history.best_epoch = None, epoch
            continue
        if eval_f1 > best_f1:
            best_f1, best, stale = eval_f1, params.copy(), 0
            history.best_epoch = epoch
        else:
            stale += 1
            if train_cfg.patience and stale >= train_cfg.patience:
                logger.info("early stop at epoch %d (best %d)", epoch, history.best_epoch)
                break
    final = best if best is not None else params
    meta = {
        "epochs": len(history.epochs),
        "best_epoch": history.best_epoch,
        "final_loss": history.epochs[-1].loss,
        "seed": config.seed,
        "train_config": dataclasses.asdict(train_cfg),
    }
    return Checkpoint(final, vocab.digests(), meta), history


def ensemble_proba(checkpoints, instances, vocab: Vocab) -> np.ndarray:
    """Uniform average of softmax outputs.

    Checkpoints are summed in the order of their parameter digests so the
    result does not depend on the order they were given in.
    """
    if not checkpoints:
        raise ValueError("no checkpoints given")
    ordered = sorted(checkpoints, key=lambda c: c.params.digest())
    feats_cache = {}
    total = None
    for ck in ordered:
        cfg = ck.config
        key = (cfg.include_children, cfg.max_block_len, cfg.max_entity_len)
        if key not in feats_cache:
            feats_cache[key] = featurize_instances(list(instances), vocab, cfg)
        probs = predict_proba(ck.params, feats_cache[key])
        total = probs if total is None else total + probs
    return total / len(ordered)


def evaluate(checkpoints, instances, vocab: Vocab, mode="official") -> tuple[Metrics, np.ndarray]:
    """Score one checkpoint or a probability-averaged ensemble.

    Returns the metrics and the (averaged) probability rows.
    """
    if isinstance(checkpoints, Checkpoint):
        checkpoints = [checkpoints]
    for ck in checkpoints:
        if ck.vocab_digests and ck.vocab_digests != vocab.digests():
            raise DigestMismatchError("checkpoint was trained with a different vocabulary")
    probs = ensemble_proba(checkpoints, instances, vocab)
    gold = np.array([vocab.labels[i.label] for i in instances], dtype=np.int64)
    metrics = compute_metrics(gold, probs.argmax(axis=1), vocab.label_names(), mode)
    return metrics, probs


def ablation(config: ModelConfig, train_cfg: TrainConfig, train_set, eval_set, vocab, embeddings=None):
    """Train and score both block variants under the same seed."""
    out = {}
    for include in (True, False):
        cfg = dataclasses.replace(config, include_children=include)
        ck, hist = train(cfg, train_cfg, train_set, eval_set, vocab, embeddings)
        metrics, _ = evaluate(ck, eval_set, vocab, train_cfg.score_mode)
        metrics.epoch_seconds = hist.mean_epoch_seconds
        out["with-children" if include else "without-children"] = (metrics, hist)
    return out


def format_ablation(results: dict, dataset_name="corpus") -> str:
    w = results["with-children"][0]
    wo = results["without-children"][0]
    title = dataset_name + " macro F1 (%)"
    c = max(len(title), 8)
    rule = "-" * (24 + c + 17)
    rows = [
        f"{'Block variant':<24} | {title:>{c}} | {'s/epoch':>8}",
        rule,
        f"{'with-children':<24} | {100 * w.macro_f1:>{c}.1f} | {w.epoch_seconds:>8.2f}",
        f"{'without-children':<24} | {100 * wo.macro_f1:>{c}.1f} | {wo.epoch_seconds:>8.2f}",
        rule,
        f"{'delta (without - with)':<24} | {100 * (wo.macro_f1 - w.macro_f1):>+{c}.1f} |",
    ]
    return "\n".join(rows) + "\n"
