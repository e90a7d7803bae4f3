"""Entity-anchored structural blocks.

For every token of an entity the block collects the token itself, its head,
its siblings and (optionally) its children. The blocks of both entities are
merged, deduplicated and put back into surface order; each selected token is
then described by its word, dependency-relation and POS ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .corpus import SentenceInstance, Vocab
from .deptree import DepTree, build_tree
from .errors import StructBlockError


@dataclass(frozen=True)
class StructuralBlock:
    indices: tuple[int, ...]
    word_ids: tuple[int, ...]
    role_ids: tuple[int, ...]
    pos_ids: tuple[int, ...]
    e1_positions: tuple[int, ...]
    e2_positions: tuple[int, ...]

    def __len__(self):
        return len(self.indices)


def single_block(tree: DepTree, span, include_children=True) -> set[int]:
    """Token indices structurally attached to one entity.

    ``span`` is an inclusive ``(first, last)`` pair or an iterable of indices.
    """
    selected = set()
    for j in _span_indices(span):
        selected.add(j)
        h = tree.head_of(j)
        if h is not None:
            selected.add(h)
        selected.update(tree.siblings_of(j))
        if include_children:
            selected.update(tree.children_of(j))
    return selected


def aggreg_block(tree: DepTree, spans, include_children=True) -> set[int]:
    out = set()
    for span in spans:
        out |= single_block(tree, span, include_children)
    return out


def seq_tokens(indices: Iterable[int]) -> list[int]:
    return sorted(set(indices))


def _span_indices(span):
    if isinstance(span, tuple) and len(span) == 2 and all(isinstance(x, int) for x in span):
        return range(span[0], span[1] + 1)
    return span


def enrich(sentence: SentenceInstance, ranked, vocab: Vocab) -> StructuralBlock:
    """Attach (word, role, POS) ids to each selected token, role being the
    dependency-relation label."""
    word_ids, role_ids, pos_ids = [], [], []
    for j in ranked:
        tok = sentence.tokens[j - 1]
        try:
            role_ids.append(vocab.deprels[tok.deprel])
            pos_ids.append(vocab.pos[tok.pos])
        except KeyError as exc:
            raise StructBlockError(
                f"instance {sentence.id}: tag {exc.args[0]!r} missing from vocabulary"
            ) from None
        word_ids.append(vocab.word_id(tok.form))
    e1 = set(sentence.span_indices("e1"))
    e2 = set(sentence.span_indices("e2"))
    return StructuralBlock(
        tuple(ranked),
        tuple(word_ids),
        tuple(role_ids),
        tuple(pos_ids),
        tuple(p for p, j in enumerate(ranked) if j in e1),
        tuple(p for p, j in enumerate(ranked) if j in e2),
    )


def block_indices(sentence: SentenceInstance, include_children=True, tree=None) -> list[int]:
    tree = tree or build_tree(sentence.tokens)
    spans = (sentence.e1_span, sentence.e2_span)
    return seq_tokens(aggreg_block(tree, spans, include_children))


def structural_block(sentence: SentenceInstance, vocab: Vocab, include_children=True) -> StructuralBlock:
    """Full pipeline for one sentence: detect, aggregate, order, enrich."""
    return enrich(sentence, block_indices(sentence, include_children), vocab)


def entity_sequence(sentence: SentenceInstance, which, vocab: Vocab) -> StructuralBlock:
    """The enriched token sequence of one entity span."""
    return enrich(sentence, sentence.span_indices(which), vocab)


def block_record(sentence: SentenceInstance, include_children=True) -> dict:
    """JSON-ready description of a block (used by the ``blocks`` command)."""
    idx = block_indices(sentence, include_children)
    toks = [sentence.tokens[j - 1] for j in idx]
    return {
        "id": sentence.id,
        "indices": idx,
        "forms": [t.form for t in toks],
        "roles": [t.deprel for t in toks],
        "pos": [t.pos for t in toks],
        "variant": "with-children" if include_children else "without-children",
    }
