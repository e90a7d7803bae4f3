"""Corpus ingestion: raw relation files, CoNLL-U parses, vocabularies, embeddings.

The raw format is the one shared by the SemEval-2010 Task 8 and KBP37
distributions::

    1<TAB>"The <e1>company</e1> fabricates plastic <e2>chairs</e2>."
    Product-Producer(e2,e1)
    Comment: optional, SemEval only
    <blank>

Parses are standard 10-column CoNLL-U produced by any external parser.  A
sentence is matched to its raw record through a JSON-lines manifest
(``{"id": ..., "conllu_sentence_index": ...}``), a ``# sent_id`` comment, or
file order, in that priority.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import AlignmentError, CapacityError, CorpusFormatError, DataError, TreeError

logger = logging.getLogger(__name__)

DIALECTS = ("semeval", "kbp37")
NEGATIVE_LABELS = {"semeval": "Other", "kbp37": "no_relation"}

POS_CAPACITY = 24
DEPREL_CAPACITY = 41

PAD_ID = 0
UNK_ID = 1
PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"

# Class order used for KBP37 confusion matrices (no_relation first, then
# org_* and per_* alphabetically, directions merged).
KBP37_CLASS_ORDER = (
    "no_relation",
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

_MARKER_RE = re.compile(r"</?e[12]>")
_DIRECTED_RE = re.compile(r"^(?P<cls>.+)\((?P<dir>e1,e2|e2,e1)\)$")


def relation_class(label: str) -> str:
    """Strip the argument-order suffix: ``Cause-Effect(e2,e1)`` -> ``Cause-Effect``."""
    m = _DIRECTED_RE.match(label)
    return m.group("cls") if m else label


def relation_direction(label: str) -> str | None:
    m = _DIRECTED_RE.match(label)
    return m.group("dir") if m else None


def is_negative_label(label: str) -> bool:
    return label in NEGATIVE_LABELS.values()


# ---------------------------------------------------------------------------
# raw relation files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RawInstance:
    id: int
    text: str
    label: str
    comment: str | None = None


@dataclass(frozen=True)
class MarkedText:
    """Marker-free text plus character ranges (end exclusive) of both entities."""

    plain: str
    e1: tuple[int, int]
    e2: tuple[int, int]

    @property
    def e1_text(self):
        return self.plain[self.e1[0]:self.e1[1]]

    @property
    def e2_text(self):
        return self.plain[self.e2[0]:self.e2[1]]


def strip_markers(text: str) -> MarkedText:
    """Remove ``<e1>``/``<e2>`` markers and locate the entity substrings.

    Raises ``ValueError`` when a marker is missing, repeated, nested or when
    the two entities overlap.
    """
    pieces = []
    pos = 0
    out_len = 0
    opened: dict[str, int] = {}
    closed: dict[str, tuple[int, int]] = {}
    for m in _MARKER_RE.finditer(text):
        chunk = text[pos:m.start()]
        pieces.append(chunk)
        out_len += len(chunk)
        pos = m.end()
        tag = m.group(0)
        name = tag.strip("</>")
        if tag.startswith("</"):
            if name not in opened or name in closed:
                raise ValueError(f"unbalanced closing marker {tag}")
            closed[name] = (opened[name], out_len)
        else:
            if name in opened:
                raise ValueError(f"repeated marker {tag}")
            other = "e2" if name == "e1" else "e1"
            if other in opened and other not in closed:
                raise ValueError(f"marker {tag} nested inside <{other}>")
            opened[name] = out_len
    pieces.append(text[pos:])
    for name in ("e1", "e2"):
        if name not in opened:
            raise ValueError(f"missing <{name}> marker")
        if name not in closed:
            raise ValueError(f"unclosed <{name}> marker")
    plain = "".join(pieces)
    spans = {}
    for name, (s, e) in closed.items():
        # markers are usually padded by spaces in KBP37; trim them off the span
        while s < e and plain[s].isspace():
            s += 1
        while e > s and plain[e - 1].isspace():
            e -= 1
        if s == e:
            raise ValueError(f"empty <{name}> entity")
        spans[name] = (s, e)
    (s1, e1), (s2, e2) = spans["e1"], spans["e2"]
    if s1 < e2 and s2 < e1:
        raise ValueError("entity spans overlap")
    return MarkedText(plain, spans["e1"], spans["e2"])


def _check_label(label, dialect):
    if dialect == "semeval":
        ok = label == "Other" or _DIRECTED_RE.match(label) is not None
    else:
        ok = label == "no_relation" or _DIRECTED_RE.match(label) is not None
    return ok


def _lines(stream):
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    for lineno, line in enumerate(stream, start=1):
        yield lineno, line.rstrip("\r\n")


def parse_raw(stream, dialect: str = "semeval", path=None) -> list[RawInstance]:
    """Parse a raw relation file into :class:`RawInstance` records.

    Parameters
    ----------
    stream : str or iterable of lines
        File contents or an open text file.
    dialect : {"semeval", "kbp37"}
        Selects the label grammar that is validated.
    path : optional
        Only used to decorate error messages.

    Returns
    -------
    list of RawInstance, in file order. ``text`` keeps the markers verbatim.
    """
    if dialect not in DIALECTS:
        raise ValueError(f"unknown dialect {dialect!r}")
    records: list[RawInstance] = []
    seen: dict[int, int] = {}
    block: list[tuple[int, str]] = []

    def flush():
        if not block:
            return
        first_line, head = block[0]
        parts = head.split("\t", 1)
        if len(parts) != 2:
            raise CorpusFormatError("expected '<id><TAB><sentence>'", first_line, path)
        try:
            rid = int(parts[0].strip())
        except ValueError:
            raise CorpusFormatError(f"non-integer id {parts[0]!r}", first_line, path) from None
        text = parts[1].strip()
        if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
            text = text[1:-1]
        try:
            strip_markers(text)
        except ValueError as exc:
            raise CorpusFormatError(f"malformed entity markers: {exc}", first_line, path) from None
        if len(block) < 2:
            raise CorpusFormatError("missing relation label line", first_line, path)
        label_line, label = block[1]
        label = label.strip()
        if not label or not _check_label(label, dialect):
            raise CorpusFormatError(f"invalid {dialect} label {label!r}", label_line, path)
        comment = None
        for extra_line, extra in block[2:]:
            if extra.startswith("Comment"):
                comment = extra
            else:
                raise CorpusFormatError(f"unexpected line {extra!r}", extra_line, path)
        if rid in seen:
            raise CorpusFormatError(
                f"duplicate id {rid} (first seen at line {seen[rid]})", first_line, path
            )
        seen[rid] = first_line
        records.append(RawInstance(rid, text, label, comment))
        block.clear()

    for lineno, line in _lines(stream):
        if line.strip():
            block.append((lineno, line))
        else:
            flush()
    flush()
    return records


def serialize_raw(instances: Iterable[RawInstance]) -> str:
    """Inverse of :func:`parse_raw`."""
    out = []
    for inst in instances:
        out.append(f'{inst.id}\t"{inst.text}"\n{inst.label}\n')
        if inst.comment is not None:
            out.append(inst.comment + "\n")
        out.append("\n")
    return "".join(out)


def read_raw(path, dialect="semeval") -> list[RawInstance]:
    with open(path, encoding="utf-8") as fh:
        return parse_raw(fh, dialect, path=path)


# ---------------------------------------------------------------------------
# CoNLL-U
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    pos: str
    deprel: str
    head: int


@dataclass
class ConlluSentence:
    tokens: list[Token]
    comments: dict[str, str] = field(default_factory=dict)
    # multi-word token ranges: (first word, last word, surface form)
    multiword: list[tuple[int, int, str]] = field(default_factory=list)

    @property
    def sent_id(self):
        return self.comments.get("sent_id")


def read_conllu(stream, tag_column="upos", strip_deprel_subtypes=False) -> list[ConlluSentence]:
    """Read CoNLL-U sentences.

    Only ID, FORM, UPOS/XPOS, HEAD and DEPREL are kept. Empty nodes
    (decimal ids) are dropped; multi-word token lines are remembered so
    alignment can use their surface form.
    """
    if tag_column not in ("upos", "xpos"):
        raise ValueError("tag_column must be 'upos' or 'xpos'")
    tag_idx = 3 if tag_column == "upos" else 4
    sentences = []
    tokens: list[Token] = []
    comments: dict[str, str] = {}
    mwts: list[tuple[int, int, str]] = []
    start_line = None

    def flush():
        nonlocal tokens, comments, mwts
        if tokens:
            sentences.append(ConlluSentence(tokens, comments, mwts))
        elif mwts:
            raise CorpusFormatError("sentence without words", start_line)
        tokens, comments, mwts = [], {}, []

    for lineno, line in _lines(stream):
        if not line.strip():
            flush()
            start_line = None
            continue
        if start_line is None:
            start_line = lineno
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                comments[key.strip()] = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise CorpusFormatError(f"expected 10 columns, got {len(cols)}", lineno)
        tid = cols[0]
        if "." in tid:
            continue
        if "-" in tid:
            a, b = tid.split("-")
            mwts.append((int(a), int(b), cols[1]))
            continue
        try:
            index = int(tid)
            head = int(cols[6])
        except ValueError:
            raise CorpusFormatError(f"non-integer ID/HEAD in {line!r}", lineno) from None
        if index != len(tokens) + 1:
            raise CorpusFormatError(f"token ids not consecutive at id {index}", lineno)
        deprel = cols[7]
        if strip_deprel_subtypes:
            deprel = deprel.split(":", 1)[0]
        tokens.append(Token(index, cols[1], cols[tag_idx], deprel, head))
    flush()
    for sent in sentences:
        n = len(sent.tokens)
        for tok in sent.tokens:
            if not 0 <= tok.head <= n or tok.head == tok.index:
                raise CorpusFormatError(
                    f"token {tok.index} has invalid head {tok.head} (sentence length {n})"
                )
    return sentences


def format_conllu(sentence: ConlluSentence) -> str:
    lines = [f"# {k} = {v}" for k, v in sentence.comments.items()]
    mwt_at = {a: (a, b, form) for a, b, form in sentence.multiword}
    for tok in sentence.tokens:
        if tok.index in mwt_at:
            a, b, form = mwt_at[tok.index]
            lines.append(f"{a}-{b}\t{form}\t_\t_\t_\t_\t_\t_\t_\t_")
        lines.append(
            f"{tok.index}\t{tok.form}\t_\t{tok.pos}\t{tok.pos}\t_\t{tok.head}\t{tok.deprel}\t_\t_"
        )
    return "\n".join(lines) + "\n\n"


# ---------------------------------------------------------------------------
# alignment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SentenceInstance:
    id: int
    tokens: tuple[Token, ...]
    e1_span: tuple[int, int]  # inclusive, 1-based token indices
    e2_span: tuple[int, int]
    label: str
    split: str = "train"

    def __post_init__(self):
        n = len(self.tokens)
        for name, (a, b) in (("e1", self.e1_span), ("e2", self.e2_span)):
            if not 1 <= a <= b <= n:
                raise DataError(f"instance {self.id}: {name} span {(a, b)} outside 1..{n}")
        (a1, b1), (a2, b2) = self.e1_span, self.e2_span
        if a1 <= b2 and a2 <= b1:
            raise DataError(f"instance {self.id}: entity spans overlap")

    @property
    def heads(self):
        return [t.head for t in self.tokens]

    def span_indices(self, which):
        a, b = self.e1_span if which == "e1" else self.e2_span
        return list(range(a, b + 1))

    def to_json(self):
        return {
            "id": self.id,
            "tokens": [[t.form, t.pos, t.deprel, t.head] for t in self.tokens],
            "e1": list(self.e1_span),
            "e2": list(self.e2_span),
            "label": self.label,
            "split": self.split,
        }

    @classmethod
    def from_json(cls, obj):
        toks = tuple(
            Token(i, form, pos, deprel, head)
            for i, (form, pos, deprel, head) in enumerate(obj["tokens"], start=1)
        )
        return cls(obj["id"], toks, tuple(obj["e1"]), tuple(obj["e2"]), obj["label"], obj["split"])


def _nows(s):
    return "".join(s.split())


def align_conllu(raw: RawInstance, parse: ConlluSentence, split="train") -> SentenceInstance:
    """Map the marked entities of ``raw`` onto token ranges of ``parse``.

    Matching ignores whitespace but is case sensitive. Every entity boundary
    must coincide with a token boundary (or a multi-word token boundary).
    """
    marked = strip_markers(raw.text)
    forms = [t.form for t in parse.tokens]
    # surface units: (first word, last word, surface form)
    mwt_at = {a: (a, b, form) for a, b, form in parse.multiword}
    units = []
    i = 1
    while i <= len(parse.tokens):
        if i in mwt_at:
            a, b, form = mwt_at[i]
            units.append((a, b, form))
            i = b + 1
        else:
            units.append((i, i, parse.tokens[i - 1].form))
            i += 1
    starts, ends = {}, {}
    offset = 0
    for a, b, form in units:
        starts[offset] = a
        offset += len(_nows(form))
        ends[offset] = b
    flat_text = _nows(marked.plain)
    flat_tokens = "".join(_nows(form) for _, _, form in units)
    if flat_text != flat_tokens:
        raise AlignmentError(
            f"instance {raw.id}: tokenization does not cover the sentence", marked.plain, forms
        )

    def locate(span, name):
        s, e = span
        fs = len(_nows(marked.plain[:s]))
        fe = fs + len(_nows(marked.plain[s:e]))
        if fs not in starts or fe not in ends:
            raise AlignmentError(
                f"instance {raw.id}: <{name}> {marked.plain[s:e]!r} does not fall on token boundaries",
                marked.plain,
                forms,
            )
        return starts[fs], ends[fe]

    e1 = locate(marked.e1, "e1")
    e2 = locate(marked.e2, "e2")
    return SentenceInstance(raw.id, tuple(parse.tokens), e1, e2, raw.label, split)


def read_manifest(stream) -> dict[int, int]:
    mapping = {}
    for lineno, line in _lines(stream):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            mapping[int(rec["id"])] = int(rec["conllu_sentence_index"])
        except (ValueError, KeyError, TypeError) as exc:
            raise CorpusFormatError(f"bad manifest record: {exc}", lineno) from None
    return mapping


def match_parses(raws: Sequence[RawInstance], parses: Sequence[ConlluSentence], manifest=None):
    """Pair every raw record with its parse; see module docstring for the rules."""
    if manifest is not None:
        pairs = []
        for raw in raws:
            if raw.id not in manifest:
                raise DataError(f"no parse listed in manifest for instance {raw.id}")
            k = manifest[raw.id]
            if not 0 <= k < len(parses):
                raise DataError(f"manifest index {k} for instance {raw.id} out of range")
            pairs.append((raw, parses[k]))
        return pairs
    if parses and all(p.sent_id is not None for p in parses):
        by_id = {}
        for p in parses:
            by_id[p.sent_id] = p
        pairs = []
        for raw in raws:
            p = by_id.get(str(raw.id))
            if p is None:
                raise DataError(f"missing parse for instance {raw.id}")
            pairs.append((raw, p))
        return pairs
    if len(parses) != len(raws):
        raise DataError(
            f"{len(raws)} raw records but {len(parses)} parsed sentences and no manifest"
        )
    return list(zip(raws, parses))


@dataclass
class IngestReport:
    split: str
    total: int = 0
    kept: int = 0
    skipped: list[tuple[int, str]] = field(default_factory=list)


def ingest_split(raws, parses, split, manifest=None, strict=False):
    """Align a whole split. Instances whose parse is not a single rooted tree
    are skipped and logged unless ``strict``; alignment failures always raise."""
    from .deptree import build_tree

    report = IngestReport(split)
    out = []
    for raw, parse in match_parses(raws, parses, manifest):
        report.total += 1
        inst = align_conllu(raw, parse, split)
        try:
            build_tree(inst.tokens)
        except TreeError as exc:
            if strict:
                raise
            logger.warning("skipping instance %s: %s", raw.id, exc)
            report.skipped.append((raw.id, str(exc)))
            continue
        out.append(inst)
        report.kept += 1
    return out, report


# ---------------------------------------------------------------------------
# vocabulary
# ---------------------------------------------------------------------------


@dataclass
class Vocab:
    words: dict[str, int]
    pos: dict[str, int]
    deprels: dict[str, int]
    labels: dict[str, int]

    def word_id(self, form):
        return self.words.get(form, UNK_ID)

    def label_name(self, idx):
        return self._inverse("labels")[idx]

    def label_names(self):
        return sorted(self.labels, key=self.labels.get)

    def _inverse(self, attr):
        cache = self.__dict__.setdefault("_inv", {})
        if attr not in cache:
            cache[attr] = {v: k for k, v in getattr(self, attr).items()}
        return cache[attr]

    def to_json(self):
        # lists in id order keep the mapping injective and ordered
        return {
            "words": sorted(self.words, key=self.words.get),
            "pos": sorted(self.pos, key=self.pos.get),
            "deprels": sorted(self.deprels, key=self.deprels.get),
            "labels": sorted(self.labels, key=self.labels.get),
        }

    @classmethod
    def from_json(cls, obj):
        return cls(*({w: i for i, w in enumerate(obj[k])} for k in ("words", "pos", "deprels", "labels")))

    def digests(self) -> dict[str, str]:
        js = self.to_json()
        return {
            k: hashlib.sha256(json.dumps(v, ensure_ascii=False).encode()).hexdigest()
            for k, v in js.items()
        }


def build_vocab(train, test=(), pos_capacity=POS_CAPACITY, deprel_capacity=DEPREL_CAPACITY) -> Vocab:
    """Build vocabularies with ids in first-occurrence order.

    Words come from ``train`` only; tags and labels from both splits.
    """
    words = {PAD_TOKEN: PAD_ID, UNK_TOKEN: UNK_ID}
    pos: dict[str, int] = {}
    deprels: dict[str, int] = {}
    labels: dict[str, int] = {}

    def add(table, key, capacity=None, kind=None):
        if key not in table:
            if capacity is not None and len(table) >= capacity:
                raise CapacityError(kind, key, capacity)
            table[key] = len(table)

    for split_name, insts in (("train", train), ("test", test)):
        for inst in insts:
            for tok in inst.tokens:
                if split_name == "train":
                    add(words, tok.form)
                add(pos, tok.pos, pos_capacity, "POS")
                add(deprels, tok.deprel, deprel_capacity, "dependency-relation")
            add(labels, inst.label)
    return Vocab(words, pos, deprels, labels)


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------


@dataclass
class EmbeddingTable:
    dim: int
    matrix: np.ndarray
    coverage: float
    exact_matches: int = 0
    lowercase_matches: int = 0
    missing: int = 0

    def report(self):
        return {
            "dim": self.dim,
            "coverage": self.coverage,
            "exact_matches": self.exact_matches,
            "lowercase_matches": self.lowercase_matches,
            "missing": self.missing,
        }


def load_embeddings(path, vocab: Vocab) -> EmbeddingTable:
    """Load a GloVe-format text file for the words in ``vocab``.

    Exact-case matches win; a lowercased match is used otherwise. Rows for
    padding, unknown and unmatched words stay zero. Coverage is the fraction
    of real vocabulary words (reserved entries excluded) found in the file.
    """
    wanted_exact = {w: i for w, i in vocab.words.items() if i not in (PAD_ID, UNK_ID)}
    wanted_lower: dict[str, list[int]] = {}
    for w, i in wanted_exact.items():
        wanted_lower.setdefault(w.lower(), []).append(i)
    dim = None
    exact_rows: dict[int, np.ndarray] = {}
    lower_rows: dict[int, np.ndarray] = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read embeddings {path}: {exc}") from None
    with fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip().split(" ")
            if len(parts) < 2:
                if not line.strip():
                    continue
                raise CorpusFormatError("embedding line without values", lineno, path)
            word, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise CorpusFormatError(
                    f"expected {dim} floats, got {len(values)}", lineno, path
                )
            if word not in wanted_exact and word not in wanted_lower:
                continue
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise CorpusFormatError("non-numeric embedding value", lineno, path) from None
            if word in wanted_exact:
                exact_rows[wanted_exact[word]] = vec
            if word in wanted_lower:
                for i in wanted_lower[word]:
                    lower_rows.setdefault(i, vec)
    if dim is None:
        raise DataError(f"embedding file {path} is empty")
    matrix = np.zeros((len(vocab.words), dim))
    n_exact = n_lower = 0
    for i in wanted_exact.values():
        if i in exact_rows:
            matrix[i] = exact_rows[i]
            n_exact += 1
        elif i in lower_rows:
            matrix[i] = lower_rows[i]
            n_lower += 1
    total = len(wanted_exact)
    coverage = (n_exact + n_lower) / total if total else 1.0
    return EmbeddingTable(dim, matrix, coverage, n_exact, n_lower, total - n_exact - n_lower)


# ---------------------------------------------------------------------------
# statistics and persistence
# ---------------------------------------------------------------------------


def _length(inst):
    if isinstance(inst, SentenceInstance):
        return len(inst.tokens)
    return len(strip_markers(inst.text).plain.split())


def dataset_stats(splits: dict[str, Sequence]) -> dict:
    """Counts per split and label, sentence-length histogram and mean length.

    ``splits`` maps split name to a list of RawInstance or SentenceInstance.
    """
    out = {"splits": {}, "labels": {}, "relation_types": 0, "relation_classes": 0}
    all_labels = Counter()
    for name, insts in splits.items():
        lengths = [_length(i) for i in insts]
        labels = Counter(i.label for i in insts)
        all_labels.update(labels)
        hist = Counter(lengths)
        out["splits"][name] = {
            "count": len(insts),
            "labels": dict(sorted(labels.items())),
            "length_histogram": {str(k): hist[k] for k in sorted(hist)},
            "mean_length": math.fsum(lengths) / len(lengths) if lengths else 0.0,
        }
    out["labels"] = dict(sorted(all_labels.items()))
    out["relation_types"] = len(all_labels)
    out["relation_classes"] = len({relation_class(lab) for lab in all_labels})
    return out


def save_corpus(path, dialect, vocab: Vocab, train, test, reports=()):
    obj = {
        "dialect": dialect,
        "vocab": vocab.to_json(),
        "train": [i.to_json() for i in train],
        "test": [i.to_json() for i in test],
        "ingest": [
            {"split": r.split, "total": r.total, "kept": r.kept, "skipped": r.skipped}
            for r in reports
        ],
    }
    Path(path).write_text(json.dumps(obj, ensure_ascii=False), encoding="utf-8")


@dataclass
class Corpus:
    dialect: str
    vocab: Vocab
    train: list[SentenceInstance]
    test: list[SentenceInstance]


def load_corpus(path) -> Corpus:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return Corpus(
            obj["dialect"],
            Vocab.from_json(obj["vocab"]),
            [SentenceInstance.from_json(o) for o in obj["train"]],
            [SentenceInstance.from_json(o) for o in obj["test"]],
        )
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"cannot load corpus {path}: {exc}") from None
