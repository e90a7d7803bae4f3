"""Synthetic corpora in the raw relation + CoNLL-U formats.

Sentences get a random dependency tree; the relation label is encoded by the
word sitting at the head of the first e1 token, so a model that looks at the
structural block can learn it while a bag of random surrounding words
cannot. Used by the test-suite and the demos when the real datasets are not
at hand.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SEMEVAL_CLASSES = (
    "Cause-Effect",
    "Instrument-Agency",
    "Product-Producer",
    "Content-Container",
    "Entity-Origin",
    "Entity-Destination",
    "Component-Whole",
    "Member-Collection",
    "Message-Topic",
)

KBP37_CLASSES = (
    "org:alternate_names",
    "org:city_of_headquarters",
    "org:country_of_headquarters",
    "org:founded",
    "org:founded_by",
    "org:members",
    "org:stateorprovince_of_headquarters",
    "org:subsidiaries",
    "org:top_members/employees",
    "per:alternate_names",
    "per:cities_of_residence",
    "per:countries_of_residence",
    "per:country_of_birth",
    "per:employee_of",
    "per:origin",
    "per:spouse",
    "per:stateorprovinces_of_residence",
    "per:title",
)

POS_TAGS = ("NOUN", "VERB", "ADJ", "ADP", "DET", "PRON", "PROPN", "ADV")
DEPRELS = ("nsubj", "obj", "amod", "det", "case", "nmod", "obl", "advmod", "compound", "conj")


def directed_labels(dialect):
    if dialect == "semeval":
        classes, negative = SEMEVAL_CLASSES, "Other"
    else:
        classes, negative = KBP37_CLASSES, "no_relation"
    out = []
    for c in classes:
        out += [f"{c}(e1,e2)", f"{c}(e2,e1)"]
    return out + [negative]


def random_heads(n, rng):
    """Heads (1-based, 0 = root) of a random rooted tree on n tokens."""
    order = rng.permutation(n) + 1
    heads = [0] * n
    for k in range(1, n):
        node = order[k]
        heads[node - 1] = int(order[rng.integers(0, k)])
    return heads


@dataclass
class SyntheticSplit:
    raw: str
    conllu: str
    manifest: str


def _sentence(sid, label, trigger, rng, dialect, n_filler):
    for _ in range(100):
        n = int(rng.integers(6, 19))
        heads = random_heads(n, rng)
        root = heads.index(0) + 1
        l1 = int(rng.integers(1, 3))
        l2 = int(rng.integers(1, 3))
        a1 = int(rng.integers(1, n - l1 - l2 + 1))
        a2 = int(rng.integers(a1 + l1, n - l2 + 2))
        if a1 == root:
            continue
        h = heads[a1 - 1]
        span1 = range(a1, a1 + l1)
        span2 = range(a2, a2 + l2)
        if h in span1 or h in span2:
            continue
        break
    else:  # pragma: no cover - vanishingly unlikely
        raise RuntimeError("could not place entities")
    forms = [f"w{int(rng.integers(0, n_filler))}" for _ in range(n)]
    forms[h - 1] = trigger
    for j in span1:
        forms[j - 1] = f"ent{int(rng.integers(0, 50))}"
    for j in span2:
        forms[j - 1] = f"ent{int(rng.integers(0, 50))}"
    pos = [POS_TAGS[int(rng.integers(0, len(POS_TAGS)))] for _ in range(n)]
    deps = [DEPRELS[int(rng.integers(0, len(DEPRELS)))] for _ in range(n)]
    deps[root - 1] = "root"
    # trailing full stop attached to the root
    forms.append(".")
    pos.append("PUNCT")
    deps.append("punct")
    heads.append(root)

    words = []
    for i, f in enumerate(forms, start=1):
        w = f
        if dialect == "semeval":
            if i == a1:
                w = "<e1>" + w
            if i == a1 + l1 - 1:
                w = w + "</e1>"
            if i == a2:
                w = "<e2>" + w
            if i == a2 + l2 - 1:
                w = w + "</e2>"
        else:
            if i == a1:
                w = "<e1> " + w
            if i == a1 + l1 - 1:
                w = w + " </e1>"
            if i == a2:
                w = "<e2> " + w
            if i == a2 + l2 - 1:
                w = w + " </e2>"
        words.append(w)
    text = " ".join(words[:-1]) + words[-1]
    raw = f'{sid}\t"{text}"\n{label}\n'
    if dialect == "semeval":
        raw += "Comment:\n"
    conll = [f"# sent_id = {sid}"]
    for i, (f, p, d, hh) in enumerate(zip(forms, pos, deps, heads), start=1):
        conll.append(f"{i}\t{f}\t_\t{p}\t{p}\t_\t{hh}\t{d}\t_\t_")
    return raw, "\n".join(conll) + "\n"


def generate_split(n, dialect="semeval", seed=0, start_id=1, n_filler=200, labels=None) -> SyntheticSplit:
    """``n`` instances; labels cycle through ``labels`` (all directed types by
    default) so every type appears once ``n`` reaches their count."""
    rng = np.random.default_rng(seed)
    labels = list(labels or directed_labels(dialect))
    raws, parses = [], []
    for k in range(n):
        label = labels[k % len(labels)]
        if label in ("Other", "no_relation"):
            trigger = f"w{int(rng.integers(0, n_filler))}"
        else:
            trigger = "trig_" + label.replace("(", "_").replace(")", "").replace(",", "_").replace("/", "_")
        raw, conll = _sentence(start_id + k, label, trigger, rng, dialect, n_filler)
        raws.append(raw)
        parses.append(conll)
    # parses are stored in shuffled order and located through the manifest
    perm = rng.permutation(n)
    conllu = "\n".join(parses[i] for i in perm) + ("\n" if n else "")
    position = {int(i): k for k, i in enumerate(perm)}
    manifest = "".join(
        json.dumps({"id": start_id + i, "conllu_sentence_index": position[i]}) + "\n" for i in range(n)
    )
    return SyntheticSplit("\n".join(raws) + ("\n" if n else ""), conllu, manifest)


def write_corpus(directory, n_train, n_test, dialect="semeval", seed=0, **kw):
    """Write ``train.txt``, ``train.conllu``, ``train.manifest.jsonl`` and the
    test equivalents into ``directory``; returns the paths."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = {}
    for split, n, s, start in (("train", n_train, seed, 1), ("test", n_test, seed + 1, n_train + 1)):
        sp = generate_split(n, dialect, s, start, **kw)
        for suffix, content in (("txt", sp.raw), ("conllu", sp.conllu), ("manifest.jsonl", sp.manifest)):
            p = d / f"{split}.{suffix}"
            p.write_text(content, encoding="utf-8")
            paths[f"{split}.{suffix}"] = p
    return paths


def write_embeddings(path, words, dim, seed=0):
    """A GloVe-format text file with random vectors for ``words``."""
    rng = np.random.default_rng(seed)
    with open(path, "w", encoding="utf-8") as fh:
        for w in words:
            vec = rng.normal(0.0, 0.3, size=dim)
            fh.write(w + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")
