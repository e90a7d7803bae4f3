"""Block/entity encoders, prediction head, initialisation and checkpoints.

Each token is a row ``word vector ++ one-hot(deprel) ++ one-hot(POS)``. The
structural block and the two entity spans are encoded by separate
multi-scale CNNs (conv -> relu -> max over time, one branch per kernel
width). The classifier sees::

    s = [b, v1, v2, b - v1 - v2, v1 * v2]
    h = relu(W_h dropout(s) + b_h)
    p = softmax(M h + bias)
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import tensor as T
from .blocks import StructuralBlock, block_indices, enrich, entity_sequence
from .corpus import PAD_ID, SentenceInstance, Vocab
from .errors import CheckpointFormatError, DataError

logger = logging.getLogger(__name__)

ENCODERS = ("block", "e1", "e2")

MAGIC = b"SBCNNRE1"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModelConfig:
    d_w: int = 100
    d_pos: int = 24
    d_dep: int = 41
    kernel_widths: tuple[int, ...] = (2, 3, 4, 5)
    filters: int = 64
    hidden_dim: int = 256
    num_classes: int = 19
    vocab_size: int = 2
    max_block_len: int = 40
    max_entity_len: int = 8
    dropout: float = 0.5
    freeze_word_embeddings: bool = False
    include_children: bool = True
    channel_mode: str = "per_token"
    seed: int = 13

    def __post_init__(self):
        if not self.kernel_widths:
            raise DataError("kernel_widths must not be empty")
        if any(k < 1 or k > self.max_block_len for k in self.kernel_widths):
            raise DataError(f"kernel widths {self.kernel_widths} must lie in 1..max_block_len")
        if self.num_classes < 1:
            raise DataError("num_classes must be positive")
        if self.channel_mode != "per_token":
            raise DataError(f"channel_mode {self.channel_mode!r} is not implemented")
        if not 0.0 <= self.dropout < 1.0:
            raise DataError("dropout must lie in [0, 1)")

    @property
    def token_dim(self):
        return self.d_w + self.d_dep + self.d_pos

    @property
    def repr_dim(self):
        return self.filters * len(self.kernel_widths)

    @property
    def concat_dim(self):
        return 5 * self.repr_dim

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["kernel_widths"] = list(self.kernel_widths)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["kernel_widths"] = tuple(d["kernel_widths"])
        return cls(**d)


class ModelParams:
    """Named trainable arrays, held as autodiff leaves."""

    def __init__(self, config: ModelConfig, arrays: dict[str, np.ndarray]):
        self.config = config
        self.tensors = {
            name: T.Tensor(np.array(a, dtype=np.float64), requires_grad=True, name=name)
            for name, a in arrays.items()
        }
        if config.freeze_word_embeddings:
            self.tensors["word_table"].requires_grad = False

    def __getitem__(self, name):
        return self.tensors[name]

    def names(self):
        return list(self.tensors)

    def arrays(self):
        return {n: t.data for n, t in self.tensors.items()}

    def trainable(self):
        return [t for t in self.tensors.values() if t.requires_grad]

    def zero_grad(self):
        for t in self.tensors.values():
            t.zero_grad()

    def copy(self):
        return ModelParams(self.config, {n: a.copy() for n, a in self.arrays().items()})

    def digest(self):
        h = hashlib.sha256()
        for name, a in self.arrays().items():
            h.update(name.encode())
            h.update(np.ascontiguousarray(a, dtype="<f8").tobytes())
        return h.hexdigest()


def _glorot(rng, shape, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def param_shapes(config: ModelConfig):
    shapes = {"word_table": (config.vocab_size, config.d_w)}
    for enc in ENCODERS:
        for k in config.kernel_widths:
            shapes[f"{enc}.k{k}.W"] = (k, config.token_dim, config.filters)
            shapes[f"{enc}.k{k}.b"] = (config.filters,)
    shapes["hidden.W"] = (config.hidden_dim, config.concat_dim)
    shapes["hidden.b"] = (config.hidden_dim,)
    shapes["out.W"] = (config.num_classes, config.hidden_dim)
    shapes["out.b"] = (config.num_classes,)
    return shapes


def init_params(config: ModelConfig, embeddings=None) -> ModelParams:
    """Seeded initialisation.

    The word table comes from ``embeddings`` (an :class:`EmbeddingTable`)
    when given, otherwise from uniform(-0.25, 0.25); the padding row is zero
    either way. Convolution and dense weights are Glorot-uniform, biases zero.
    """
    rng = np.random.default_rng(config.seed)
    arrays = {}
    V, d = config.vocab_size, config.d_w
    if embeddings is not None:
        if embeddings.matrix.shape != (V, d):
            raise DataError(
                f"embedding matrix {embeddings.matrix.shape} does not match config ({V}, {d})"
            )
        table = embeddings.matrix.copy()
    else:
        table = rng.uniform(-0.25, 0.25, size=(V, d))
    table[PAD_ID] = 0.0
    arrays["word_table"] = table
    for name, shape in param_shapes(config).items():
        if name == "word_table":
            continue
        if name.endswith(".b"):
            arrays[name] = np.zeros(shape)
        elif len(shape) == 3:
            k, D, F = shape
            arrays[name] = _glorot(rng, shape, k * D, k * F)
        else:
            m, n = shape
            arrays[name] = _glorot(rng, shape, n, m)
    return ModelParams(config, arrays)


# ---------------------------------------------------------------------------
# features
# ---------------------------------------------------------------------------


@dataclass
class SequenceBatch:
    """Padded id arrays (B x L); tag ids are -1 on padding positions."""

    words: np.ndarray
    roles: np.ndarray
    pos: np.ndarray
    lengths: np.ndarray

    def __len__(self):
        return self.words.shape[0]

    def take(self, idx):
        return SequenceBatch(self.words[idx], self.roles[idx], self.pos[idx], self.lengths[idx])


@dataclass
class Features:
    block: SequenceBatch
    e1: SequenceBatch
    e2: SequenceBatch
    labels: np.ndarray
    truncated: int = 0

    def __len__(self):
        return len(self.labels)

    def take(self, idx):
        idx = np.asarray(idx)
        return Features(self.block.take(idx), self.e1.take(idx), self.e2.take(idx), self.labels[idx])


def truncate_window(length, max_len, anchors):
    """Start of a ``max_len`` window centred on the anchor positions."""
    if length <= max_len:
        return 0
    if anchors:
        centre = (min(anchors) + max(anchors)) // 2
    else:
        centre = length // 2
    return int(min(max(centre - max_len // 2, 0), length - max_len))


def pad_sequences(seqs: list[StructuralBlock], max_len, anchors=None) -> tuple[SequenceBatch, int]:
    B = len(seqs)
    words = np.full((B, max_len), PAD_ID, dtype=np.int64)
    roles = np.full((B, max_len), -1, dtype=np.int64)
    pos = np.full((B, max_len), -1, dtype=np.int64)
    lengths = np.zeros(B, dtype=np.int64)
    truncated = 0
    for i, seq in enumerate(seqs):
        n = len(seq)
        start = 0
        if n > max_len:
            truncated += 1
            start = truncate_window(n, max_len, anchors[i] if anchors else ())
        m = min(n, max_len)
        words[i, :m] = seq.word_ids[start:start + m]
        roles[i, :m] = seq.role_ids[start:start + m]
        pos[i, :m] = seq.pos_ids[start:start + m]
        lengths[i] = m
    return SequenceBatch(words, roles, pos, lengths), truncated


def featurize_instances(instances: list[SentenceInstance], vocab: Vocab, config: ModelConfig) -> Features:
    """Blocks and entity sequences for a list of instances, as padded ids."""
    blocks, e1s, e2s, anchors = [], [], [], []
    for inst in instances:
        blk = enrich(inst, block_indices(inst, config.include_children), vocab)
        blocks.append(blk)
        anchors.append(blk.e1_positions + blk.e2_positions)
        e1s.append(entity_sequence(inst, "e1", vocab))
        e2s.append(entity_sequence(inst, "e2", vocab))
    block, n_trunc = pad_sequences(blocks, config.max_block_len, anchors)
    e1, t1 = pad_sequences(e1s, config.max_entity_len)
    e2, t2 = pad_sequences(e2s, config.max_entity_len)
    if n_trunc or t1 or t2:
        logger.info("truncated %d blocks and %d entity spans", n_trunc, t1 + t2)
    labels = np.array([vocab.labels[i.label] for i in instances], dtype=np.int64)
    return Features(block, e1, e2, labels, n_trunc + t1 + t2)


def one_hot(ids, width):
    ids = np.asarray(ids)
    out = np.zeros(ids.shape + (width,))
    real = ids >= 0
    if np.any(ids[real] >= width):
        raise DataError(f"tag id exceeds one-hot width {width}")
    np.put_along_axis(out, np.where(real, ids, 0)[..., None], real[..., None].astype(float), axis=-1)
    return out


def featurize(seq: SequenceBatch, word_table, config: ModelConfig):
    """(B, L, d_w + d_dep + d_pos) input matrix; padding rows are all zero."""
    words = T.embed_lookup(word_table, seq.words, padding_idx=PAD_ID)
    tags = np.concatenate([one_hot(seq.roles, config.d_dep), one_hot(seq.pos, config.d_pos)], axis=-1)
    return T.concat([words, T.Tensor(tags)], axis=-1)


def encode(x, params: ModelParams, prefix, config: ModelConfig):
    """Multi-scale CNN: per width conv -> relu -> max over time, concatenated."""
    x = T.as_tensor(x)
    need = max(config.kernel_widths)
    L = x.shape[-2]
    if L < need:
        pad_shape = x.shape[:-2] + (need - L, x.shape[-1])
        x = T.concat([x, T.Tensor(np.zeros(pad_shape))], axis=-2)
    branches = []
    for k in config.kernel_widths:
        c = T.conv1d(x, params[f"{prefix}.k{k}.W"], params[f"{prefix}.k{k}.b"])
        branches.append(T.max_over_time(T.relu(c)))
    return T.concat(branches, axis=-1)


@dataclass
class ForwardResult:
    probs: np.ndarray
    logits: T.Tensor
    parts: dict = field(default_factory=dict)
    loss: T.Tensor | None = None


def forward(params: ModelParams, feats: Features, training=False, rng=None, with_loss=True) -> ForwardResult:
    config = params.config
    table = params["word_table"]
    b = encode(featurize(feats.block, table, config), params, "block", config)
    v1 = encode(featurize(feats.e1, table, config), params, "e1", config)
    v2 = encode(featurize(feats.e2, table, config), params, "e2", config)
    sub = T.subtract3(b, v1, v2)
    mul = T.hadamard(v1, v2)
    s = T.concat([b, v1, v2, sub, mul], axis=-1)
    s_in = T.dropout(s, config.dropout, rng, training=training)
    h = T.dense(s_in, params["hidden.W"], params["hidden.b"], "relu")
    logits = T.dense(h, params["out.W"], params["out.b"])
    parts = {"block": b, "e1": v1, "e2": v2, "subtract": sub, "multiply": mul, "s": s, "hidden": h}
    if with_loss:
        loss, probs = T.softmax_xent(logits, feats.labels)
    else:
        loss, probs = None, T.softmax(logits.data)
    return ForwardResult(probs, logits, parts, loss)


def predict_proba(params: ModelParams, feats: Features, batch_size=256) -> np.ndarray:
    out = []
    for start in range(0, len(feats), batch_size):
        part = feats.take(np.arange(start, min(start + batch_size, len(feats))))
        out.append(forward(params, part, training=False, with_loss=False).probs)
    if not out:
        return np.zeros((0, params.config.num_classes))
    return np.concatenate(out, axis=0)


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------


@dataclass
class Checkpoint:
    params: ModelParams
    vocab_digests: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def config(self):
        return self.params.config


def _array_digest(raw: bytes):
    return hashlib.sha256(raw).hexdigest()


def save_checkpoint(params: ModelParams, path, vocab_digests=None, metadata=None, dtype="<f8"):
    """Write ``MAGIC | u64 header length | JSON header | raw arrays``.

    Arrays are little-endian, row-major, in header order. The header is
    serialised with sorted keys so equal inputs give identical bytes.
    """
    if dtype not in ("<f8", "<f4"):
        raise ValueError("dtype must be '<f8' or '<f4'")
    blobs, entries = [], []
    for name, a in params.arrays().items():
        raw = np.ascontiguousarray(a, dtype=dtype).tobytes()
        blobs.append(raw)
        entries.append({
            "name": name,
            "shape": list(a.shape),
            "dtype": dtype,
            "sha256": _array_digest(raw),
        })
    header = {
        "format_version": FORMAT_VERSION,
        "config": params.config.to_dict(),
        "arrays": entries,
        "vocab_digests": vocab_digests or {},
        "metadata": metadata or {},
    }
    hbytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(hbytes)))
        fh.write(hbytes)
        for raw in blobs:
            fh.write(raw)


def load_checkpoint(path) -> Checkpoint:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read checkpoint {path}: {exc}") from None
    if data[:8] != MAGIC:
        raise CheckpointFormatError(f"{path}: bad magic bytes {data[:8]!r}")
    if len(data) < 16:
        raise CheckpointFormatError(f"{path}: truncated header")
    (hlen,) = struct.unpack("<Q", data[8:16])
    try:
        header = json.loads(data[16:16 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as exc:
        raise CheckpointFormatError(f"{path}: unreadable header ({exc})") from None
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointFormatError(
            f"{path}: format version {header.get('format_version')} != {FORMAT_VERSION}"
        )
    config = ModelConfig.from_dict(header["config"])
    offset = 16 + hlen
    arrays = {}
    for entry in header["arrays"]:
        dt = np.dtype(entry["dtype"])
        count = int(np.prod(entry["shape"], dtype=np.int64))
        nbytes = count * dt.itemsize
        raw = data[offset:offset + nbytes]
        if len(raw) != nbytes:
            raise CheckpointFormatError(f"{path}: array {entry['name']} truncated")
        if _array_digest(raw) != entry["sha256"]:
            raise CheckpointFormatError(f"{path}: checksum mismatch for {entry['name']}")
        arrays[entry["name"]] = np.frombuffer(raw, dtype=dt).astype(np.float64).reshape(entry["shape"])
        offset += nbytes
    if offset != len(data):
        raise CheckpointFormatError(f"{path}: {len(data) - offset} trailing bytes")
    expected = param_shapes(config)
    if {n: tuple(a.shape) for n, a in arrays.items()} != expected:
        raise CheckpointFormatError(f"{path}: array shapes inconsistent with config")
    params = ModelParams(config, arrays)
    return Checkpoint(params, header["vocab_digests"], header["metadata"])
