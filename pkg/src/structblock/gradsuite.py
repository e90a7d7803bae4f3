"""Finite-difference gradient checks for every differentiable op and for the
full model on a miniature configuration."""

from __future__ import annotations

import dataclasses
import time

import numpy as np

from . import tensor as T
from .corpus import PAD_ID
from .model import Features, ModelConfig, SequenceBatch, forward, init_params

MINI_CONFIG = ModelConfig(
    d_w=4,
    kernel_widths=(2, 3),
    filters=3,
    hidden_dim=5,
    num_classes=3,
    vocab_size=12,
    max_block_len=7,
    max_entity_len=3,
    dropout=0.0,
    seed=5,
)

TOLERANCE = 1e-4


def _leaf(rng, *shape, scale=1.0):
    return T.Tensor(rng.normal(0.0, scale, size=shape), requires_grad=True)


def _projected(out, rng):
    # random projection turns any output into a scalar with O(1) gradients
    r = T.Tensor(rng.normal(size=out.shape))
    return T.sum_all(T.mul(out, r))


def op_cases(rng):
    """Yield ``(name, fn, params)`` triples over random shapes."""
    for trial in range(4):
        V, d = int(rng.integers(3, 8)), int(rng.integers(1, 5))
        table = _leaf(rng, V, d)
        ids = rng.integers(0, V, size=int(rng.integers(1, 7)))
        proj = rng.normal(size=(len(ids), d))
        yield f"embed_lookup[{trial}]", (lambda t=table, i=ids, p=proj: T.sum_all(T.mul(T.embed_lookup(t, i), p))), [table]

        L, D, k, F = int(rng.integers(3, 8)), int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
        x, W, b = _leaf(rng, L, D), _leaf(rng, k, D, F), _leaf(rng, F)
        proj = rng.normal(size=(L - k + 1, F))
        yield f"conv1d[{trial}]", (lambda x=x, W=W, b=b, p=proj: T.sum_all(T.mul(T.conv1d(x, W, b), p))), [x, W, b]

        Bt = int(rng.integers(1, 3))
        xb = _leaf(rng, Bt, L, D)
        projb = rng.normal(size=(Bt, L - k + 1, F))
        yield f"conv1d_batched[{trial}]", (lambda x=xb, W=W, b=b, p=projb: T.sum_all(T.mul(T.conv1d(x, W, b), p))), [xb, W, b]

        xm = _leaf(rng, int(rng.integers(1, 6)), int(rng.integers(1, 4)))
        projm = rng.normal(size=xm.shape[1])
        yield f"max_over_time[{trial}]", (lambda x=xm, p=projm: T.sum_all(T.mul(T.max_over_time(x), p))), [xm]

        n, m = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        xd, Wd, bd = _leaf(rng, n), _leaf(rng, m, n), _leaf(rng, m)
        for act in ("identity", "relu", "tanh"):
            pd = rng.normal(size=m)
            yield f"dense_{act}[{trial}]", (lambda x=xd, W=Wd, b=bd, a=act, p=pd: T.sum_all(T.mul(T.dense(x, W, b, a), p))), [xd, Wd, bd]

        dim = int(rng.integers(1, 6))
        u, v, w = _leaf(rng, dim), _leaf(rng, dim), _leaf(rng, dim)
        yield f"concat[{trial}]", (lambda u=u, v=v, w=w, r=rng.normal(size=3 * dim): T.sum_all(T.mul(T.concat([u, v, w]), r))), [u, v, w]
        yield f"subtract3[{trial}]", (lambda u=u, v=v, w=w, r=rng.normal(size=dim): T.sum_all(T.mul(T.subtract3(u, v, w), r))), [u, v, w]
        yield f"hadamard[{trial}]", (lambda u=u, v=v, r=rng.normal(size=dim): T.sum_all(T.mul(T.hadamard(u, v), r))), [u, v]

        K = int(rng.integers(2, 6))
        logits = _leaf(rng, K)
        gold = int(rng.integers(0, K))
        yield f"softmax_xent[{trial}]", (lambda z=logits, g=gold: T.softmax_xent(z, g)[0]), [logits]
        zb = _leaf(rng, 3, K)
        gb = rng.integers(0, K, size=3)
        yield f"softmax_xent_batched[{trial}]", (lambda z=zb, g=gb: T.softmax_xent(z, g)[0]), [zb]


def random_features(config: ModelConfig, batch, rng) -> Features:
    def seqs(L):
        lengths = rng.integers(1, L + 1, size=batch)
        words = np.full((batch, L), PAD_ID)
        roles = np.full((batch, L), -1)
        pos = np.full((batch, L), -1)
        for i, n in enumerate(lengths):
            words[i, :n] = rng.integers(1, config.vocab_size, size=n)
            roles[i, :n] = rng.integers(0, config.d_dep, size=n)
            pos[i, :n] = rng.integers(0, config.d_pos, size=n)
        return SequenceBatch(words, roles, pos, lengths)

    labels = rng.integers(0, config.num_classes, size=batch)
    return Features(seqs(config.max_block_len), seqs(config.max_entity_len), seqs(config.max_entity_len), labels)


def model_case(config: ModelConfig = MINI_CONFIG, batch=3, seed=0):
    rng = np.random.default_rng(seed)
    params = init_params(config)
    # non-zero biases keep relu/max decisions away from exact ties
    for name in params.names():
        if name.endswith(".b"):
            params[name].data[:] = rng.normal(0.0, 0.1, size=params[name].shape)
    feats = random_features(config, batch, rng)

    def fn():
        return forward(params, feats, training=False).loss

    return fn, params.trainable()


def run_gradient_suite(config: ModelConfig | None = None, seed=0, eps=1e-5):
    """Run every check; returns ``(results, seconds)`` with ``results`` a list
    of ``(name, max_relative_error)``."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    results = []
    for name, fn, params in op_cases(rng):
        results.append((name, T.grad_check(fn, params, eps=eps, rng=rng)))
    config = config or MINI_CONFIG
    config = dataclasses.replace(config, dropout=0.0)
    for trial in range(2):
        fn, params = model_case(config, seed=seed + trial)
        results.append((f"model[{trial}]", T.grad_check(fn, params, eps=eps, rng=rng)))
    return results, time.perf_counter() - start
