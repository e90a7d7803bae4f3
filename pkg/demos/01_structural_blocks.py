"""
Structural blocks on a toy sentence
===================================

Parse of "I prefer the morning flight through Denver", written out by hand,
then the block of the entity "flight" with and without its children.
"""

from structblock import corpus as C
from structblock.blocks import aggreg_block, seq_tokens, single_block, structural_block
from structblock.deptree import build_tree

forms = ["I", "prefer", "the", "morning", "flight", "through", "Denver"]
heads = [2, 0, 5, 5, 2, 5, 6]
deprels = ["nsubj", "root", "det", "compound", "obj", "prep", "pobj"]
pos = ["PRP", "VBP", "DT", "NN", "NN", "IN", "NNP"]
tokens = tuple(C.Token(i, *t) for i, t in enumerate(zip(forms, pos, deprels, heads), start=1))

# the tree, root first, one indent per level
tree = build_tree(tokens)
print(tree.format(forms))

# flight (token 5): itself, its head "prefer", its sibling "I" ...
without = single_block(tree, (5, 5), include_children=False)
print("without children:", [forms[i - 1] for i in seq_tokens(without)])

# ... plus its children "the", "morning", "through"
with_children = single_block(tree, (5, 5), include_children=True)
print("with children:   ", [forms[i - 1] for i in seq_tokens(with_children)])

# a relation between "I" (e1) and "Denver" (e2): blocks are merged by union
# and put back into sentence order
merged = aggreg_block(tree, [(1, 1), (7, 7)])
print("e1=I, e2=Denver: ", [forms[i - 1] for i in seq_tokens(merged)])

# what the network sees: word, deprel and POS ids per block token
inst = C.SentenceInstance(1, tokens, (1, 1), (7, 7), "Other")
vocab = C.build_vocab([inst])
blk = structural_block(inst, vocab)
for i, w, r, p in zip(blk.indices, blk.word_ids, blk.role_ids, blk.pos_ids):
    print(f"{i:>2} {forms[i - 1]:<8} word={w:<3} deprel={r:<3} pos={p}")
print("entity positions inside the block:", blk.e1_positions, blk.e2_positions)
