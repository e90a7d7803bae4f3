"""A small reverse-mode autodiff core on float64 numpy arrays.

Only the operations the relation model needs are provided. Each op builds a
:class:`Tensor` node that remembers its parents and a rule mapping the
output gradient to parent gradients; :func:`backward` sweeps the graph once
in reverse topological order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteError

DTYPE = np.float64


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "parents", "grad_fn", "op", "name")

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.asarray(data, dtype=DTYPE)
        self.grad = None
        self.requires_grad = requires_grad
        self.parents = ()
        self.grad_fn = None
        self.op = "leaf"
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    def zero_grad(self):
        self.grad = None

    def backward(self):
        return backward(self)

    def numpy(self):
        return self.data

    def __repr__(self):
        label = self.name or self.op
        return f"Tensor({label}, shape={self.shape})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return mul(self, -1.0)


def as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(data, parents, grad_fn, op):
    if not np.all(np.isfinite(data)):
        raise NonFiniteError(f"non-finite value produced by {op}")
    out = Tensor(data)
    out.op = op
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out.parents = tuple(parents)
        out.grad_fn = grad_fn
    return out


def _unbroadcast(g, shape):
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g


def backward(root: Tensor):
    """Accumulate d(root)/d(leaf) into ``.grad`` of every leaf reachable from
    ``root``. ``root`` must be a scalar. Returns the leaves in visit order."""
    if root.data.size != 1:
        raise ValueError("backward needs a scalar root")
    order = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in reversed(node.parents):
            if id(p) not in seen:
                stack.append((p, False))

    grads = {id(root): np.ones_like(root.data)}
    leaves = []
    for node in reversed(order):
        g = grads.pop(id(node), None)
        if node.grad_fn is None:
            if node.requires_grad and g is not None:
                node.grad = g if node.grad is None else node.grad + g
                leaves.append(node)
            continue
        for p, pg in zip(node.parents, node.grad_fn(g)):
            if pg is None or not p.requires_grad:
                continue
            key = id(p)
            grads[key] = pg if key not in grads else grads[key] + pg
    return leaves


# ---------------------------------------------------------------------------
# elementwise
# ---------------------------------------------------------------------------


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    return _node(
        a.data + b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
        "add",
    )


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    return _node(
        a.data - b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
        "sub",
    )


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    return _node(
        a.data * b.data,
        (a, b),
        lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)),
        "mul",
    )


def hadamard(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ValueError(f"hadamard needs equal shapes, got {a.shape} and {b.shape}")
    return mul(a, b)


def subtract3(b, e1, e2):
    """``b - e1 - e2``."""
    b, e1, e2 = as_tensor(b), as_tensor(e1), as_tensor(e2)
    if not b.shape == e1.shape == e2.shape:
        raise ValueError(f"subtract3 needs equal shapes, got {b.shape}, {e1.shape}, {e2.shape}")
    return _node(b.data - e1.data - e2.data, (b, e1, e2), lambda g: (g, -g, -g), "subtract3")


def relu(x):
    x = as_tensor(x)
    mask = x.data > 0
    return _node(np.where(mask, x.data, 0.0), (x,), lambda g: (g * mask,), "relu")


def tanh(x):
    x = as_tensor(x)
    y = np.tanh(x.data)
    return _node(y, (x,), lambda g: (g * (1.0 - y * y),), "tanh")


def sum_all(x):
    x = as_tensor(x)
    return _node(np.array(x.data.sum()), (x,), lambda g: (np.full(x.shape, g),), "sum")


def dropout(x, rate, rng, training=True):
    """Inverted dropout; identity when not training or ``rate == 0``."""
    if not training or rate <= 0.0:
        return x
    keep = 1.0 - rate
    mask = (rng.random(x.shape) < keep) / keep
    return _node(x.data * mask, (x,), lambda g: (g * mask,), "dropout")


def concat(tensors, axis=-1):
    tensors = [as_tensor(t) for t in tensors]
    data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def grad_fn(g):
        return tuple(np.split(g, sizes, axis=axis))

    return _node(data, tensors, grad_fn, "concat")


# ---------------------------------------------------------------------------
# layers
# ---------------------------------------------------------------------------


def embed_lookup(table, ids, padding_idx=None):
    """Gather rows of ``table`` (V x d) for an integer array of ``ids``.

    Gradients are scattered back onto the looked-up rows. Positions holding
    ``padding_idx`` produce zero vectors and send no gradient.
    """
    table = as_tensor(table)
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise IndexError("embedding id out of range")

    def grad_fn(g):
        gt = np.zeros_like(table.data)
        np.add.at(gt, ids.reshape(-1), g.reshape(-1, table.shape[1]))
        if padding_idx is not None:
            gt[padding_idx] = 0.0
        return (gt,)

    out = table.data[ids]
    if padding_idx is not None:
        out[ids == padding_idx] = 0.0
    return _node(out, (table,), grad_fn, "embed_lookup")


def _unfold(x, k):
    # (..., L, D) -> (..., L-k+1, k*D); window a occupies columns [a*D, (a+1)*D)
    T = x.shape[-2] - k + 1
    return np.concatenate([x[..., a:a + T, :] for a in range(k)], axis=-1)


def conv1d(x, kernels, bias):
    """Valid 1-D cross-correlation over time.

    ``x`` is (..., L, D), ``kernels`` (k, D, F), ``bias`` (F,). Returns
    (..., L-k+1, F) with ``out[t, f] = sum_{a,c} x[t+a, c] kernels[a, c, f] + bias[f]``.
    """
    x, kernels, bias = as_tensor(x), as_tensor(kernels), as_tensor(bias)
    k, D, F = kernels.shape
    L = x.shape[-2]
    if x.shape[-1] != D:
        raise ValueError(f"conv1d: input width {x.shape[-1]} != kernel depth {D}")
    if L < k:
        raise ValueError(f"conv1d: sequence length {L} shorter than kernel width {k}")
    T = L - k + 1
    U = _unfold(x.data, k)
    W = kernels.data.reshape(k * D, F)
    out = U @ W + bias.data

    def grad_fn(g):
        gW = (U.reshape(-1, k * D).T @ g.reshape(-1, F)).reshape(k, D, F)
        gb = g.reshape(-1, F).sum(axis=0)
        gU = g @ W.T
        gx = np.zeros_like(x.data)
        for a in range(k):
            gx[..., a:a + T, :] += gU[..., a * D:(a + 1) * D]
        return gx, gW, gb

    return _node(out, (x, kernels, bias), grad_fn, "conv1d")


def max_over_time(x):
    """Per-filter max over the time axis (-2); ties resolve to the lowest t."""
    x = as_tensor(x)
    arg = np.argmax(x.data, axis=-2)
    out = np.take_along_axis(x.data, arg[..., None, :], axis=-2)[..., 0, :]

    def grad_fn(g):
        gx = np.zeros_like(x.data)
        np.put_along_axis(gx, arg[..., None, :], g[..., None, :], axis=-2)
        return (gx,)

    return _node(out, (x,), grad_fn, "max_over_time")


_ACTIVATIONS = {"relu": relu, "tanh": tanh, "identity": lambda t: t}


def dense(x, W, b, activation="identity"):
    """``activation(x @ W.T + b)`` for ``W`` of shape (m, n)."""
    x, W, b = as_tensor(x), as_tensor(W), as_tensor(b)
    if activation not in _ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}")

    def grad_fn(g):
        gx = g @ W.data
        gW = g.reshape(-1, W.shape[0]).T @ x.data.reshape(-1, W.shape[1])
        gb = g.reshape(-1, W.shape[0]).sum(axis=0)
        return gx, gW, gb

    z = _node(x.data @ W.data.T + b.data, (x, W, b), grad_fn, "dense")
    return _ACTIVATIONS[activation](z)


def softmax(logits):
    z = np.asarray(logits, dtype=DTYPE)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_xent(logits, gold):
    """Mean cross-entropy of softmax(logits) against integer ``gold``.

    Returns ``(loss, probs)``; ``loss`` is a scalar node, ``probs`` a plain
    array with the same shape as ``logits``.
    """
    logits = as_tensor(logits)
    gold = np.asarray(gold, dtype=np.int64)
    z = logits.data - logits.data.max(axis=-1, keepdims=True)
    logsum = np.log(np.exp(z).sum(axis=-1, keepdims=True))
    logp = z - logsum
    probs = np.exp(logp)
    picked = np.take_along_axis(logp, gold[..., None], axis=-1)[..., 0]
    count = max(gold.size, 1)
    loss = -picked.sum() / count

    def grad_fn(g):
        onehot = np.zeros_like(probs)
        np.put_along_axis(onehot, gold[..., None], 1.0, axis=-1)
        return ((probs - onehot) * (g / count),)

    return _node(np.array(loss), (logits,), grad_fn, "softmax_xent"), probs


# ---------------------------------------------------------------------------
# verification and optimisation
# ---------------------------------------------------------------------------


def grad_check(fn, params, eps=1e-5, max_coords=200, rng=None, floor=1e-8):
    """Maximum relative error between backprop and central differences.

    ``fn`` takes no arguments and returns a scalar :class:`Tensor` computed
    from ``params``. At most ``max_coords`` coordinates per parameter are
    probed. The relative error of a coordinate is
    ``|a - n| / max(|a| + |n|, floor)``.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    for p in params:
        p.zero_grad()
    backward(fn())
    analytic = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in params]
    worst = 0.0
    for p, a in zip(params, analytic):
        flat = p.data.reshape(-1)
        n = flat.size
        coords = np.arange(n) if n <= max_coords else rng.choice(n, max_coords, replace=False)
        a_flat = a.reshape(-1)
        for c in coords:
            orig = flat[c]
            flat[c] = orig + eps
            fp = float(fn().data)
            flat[c] = orig - eps
            fm = float(fn().data)
            flat[c] = orig
            num = (fp - fm) / (2 * eps)
            err = abs(a_flat[c] - num) / max(abs(a_flat[c]) + abs(num), floor)
            worst = max(worst, err)
    for p in params:
        p.zero_grad()
    return worst


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)


def adam_step(params, grads, state: AdamState):
    """One bias-corrected Adam update, applied in place to ``params``."""
    if not state.m:
        state.m = [np.zeros_like(p.data) for p in params]
        state.v = [np.zeros_like(p.data) for p in params]
    if len(state.m) != len(params):
        raise ValueError("Adam state does not match parameter list")
    state.t += 1
    c1 = 1.0 - state.beta1 ** state.t
    c2 = 1.0 - state.beta2 ** state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if g is None:
            g = 0.0
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * np.square(g)
        p.data -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
    return params
