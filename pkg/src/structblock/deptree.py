"""Rooted dependency trees over 1-based token indices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import TreeError


@dataclass(frozen=True)
class DepTree:
    """Validated dependency tree.

    ``head[i - 1]`` is the head of token ``i`` (0 for the root);
    ``children[i]`` lists the dependents of ``i`` in surface order, with
    ``children[0] == (root_index,)``.
    """

    n: int
    head: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    root_index: int

    def _check(self, i):
        if not 1 <= i <= self.n:
            raise IndexError(f"token index {i} outside 1..{self.n}")

    def head_of(self, i):
        self._check(i)
        h = self.head[i - 1]
        return None if h == 0 else h

    def children_of(self, i):
        self._check(i)
        return list(self.children[i])

    def siblings_of(self, i):
        self._check(i)
        h = self.head[i - 1]
        if h == 0:
            return []
        return [j for j in self.children[h] if j != i]

    def format(self, forms: Sequence[str] | None = None, indent="  "):
        """Indented text rendering, one token per line."""
        lines = []

        def label(i):
            return f"{i}:{forms[i - 1]}" if forms is not None else str(i)

        stack = [(self.root_index, 0)]
        while stack:
            i, depth = stack.pop()
            lines.append(indent * depth + label(i))
            for c in reversed(self.children[i]):
                stack.append((c, depth + 1))
        return "\n".join(lines)


def build_tree(tokens) -> DepTree:
    """Build a :class:`DepTree` from tokens (objects with ``.head``) or raw heads.

    Raises
    ------
    TreeError
        On a head out of range, zero or several roots, or a cycle (the
        offending node set is attached as ``nodes``).
    """
    heads = tuple(t if isinstance(t, int) else t.head for t in tokens)
    n = len(heads)
    if n == 0:
        raise TreeError("empty sentence")
    for i, h in enumerate(heads, start=1):
        if not 0 <= h <= n:
            raise TreeError(f"head {h} of token {i} outside 0..{n}", {i})
        if h == i:
            raise TreeError(f"token {i} is its own head", {i})
    roots = [i for i, h in enumerate(heads, start=1) if h == 0]
    if len(roots) != 1:
        raise TreeError(f"expected exactly one root, found {len(roots)}", set(roots))

    # every node must reach the root; walk up, colouring finished paths
    state = [0] * (n + 1)  # 0 unseen, 1 on current path, 2 reaches root
    state[roots[0]] = 2
    for start in range(1, n + 1):
        path = []
        i = start
        while state[i] == 0:
            state[i] = 1
            path.append(i)
            i = heads[i - 1]
        if state[i] == 1:
            cycle = path[path.index(i):]
            raise TreeError(f"cycle among tokens {sorted(cycle)}", set(cycle))
        for j in path:
            state[j] = 2

    children = [[] for _ in range(n + 1)]
    for i, h in enumerate(heads, start=1):
        children[h].append(i)
    return DepTree(n, heads, tuple(tuple(c) for c in children), roots[0])


def head_of(tree: DepTree, i):
    return tree.head_of(i)


def children_of(tree: DepTree, i):
    return tree.children_of(i)


def siblings_of(tree: DepTree, i):
    return tree.siblings_of(i)
