import numpy as np
import pytest

from structblock import corpus as C
from structblock import synthetic

# "I prefer the morning flight through Denver"
FLIGHT_FORMS = ["I", "prefer", "the", "morning", "flight", "through", "Denver"]
FLIGHT_HEADS = [2, 0, 5, 5, 2, 5, 6]
FLIGHT_DEPRELS = ["nsubj", "root", "det", "compound", "obj", "prep", "pobj"]
FLIGHT_POS = ["PRP", "VBP", "DT", "NN", "NN", "IN", "NNP"]


def flight_tokens():
    return tuple(
        C.Token(i, f, p, d, h)
        for i, (f, p, d, h) in enumerate(zip(FLIGHT_FORMS, FLIGHT_POS, FLIGHT_DEPRELS, FLIGHT_HEADS), start=1)
    )


@pytest.fixture
def flight():
    return flight_tokens()


def random_tree_heads(n, rng):
    """Random rooted tree: each node (in a shuffled order) attaches to an
    earlier one."""
    nodes = list(rng.permutation(np.arange(1, n + 1)))
    heads = [0] * n
    for k in range(1, n):
        heads[nodes[k] - 1] = int(nodes[rng.integers(0, k)])
    return heads


def ingest_synthetic(n_train, n_test, dialect="semeval", seed=0):
    out = {}
    for split, n, s, start in (("train", n_train, seed, 1), ("test", n_test, seed + 1, n_train + 1)):
        sp = synthetic.generate_split(n, dialect, s, start)
        raws = C.parse_raw(sp.raw, dialect)
        parses = C.read_conllu(sp.conllu)
        insts, _ = C.ingest_split(raws, parses, split, C.read_manifest(sp.manifest), strict=True)
        out[split] = insts
    vocab = C.build_vocab(out["train"], out["test"])
    return out["train"], out["test"], vocab


@pytest.fixture(scope="session")
def small_corpus():
    return ingest_synthetic(60, 20, seed=7)
