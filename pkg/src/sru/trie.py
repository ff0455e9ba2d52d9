"""Trie over leading cubical sub-words of parsed words.

A node at depth l stands for one distinct leading l-word. The edge from depth
l-1 to depth l is keyed by the symbols of the layer ``Λ_l ∖ Λ_{l-1}`` in lex
order, so walking a word down the trie compares it shell by shell.
"""

from __future__ import annotations

from bisect import bisect_left

from .grid import Word, layer_index


class _Node:
    __slots__ = ("first_index", "children")

    def __init__(self, first_index):
        self.first_index = first_index
        self.children = {}


class LeadingWordTrie:
    def __init__(self):
        self.root = _Node(None)
        self.size = 0
        # depth -> first_index of every node at that depth, in creation order
        self.firsts = {}

    def _layers(self, w: Word):
        for l in range(1, w.side + 1):
            yield w.symbols[layer_index(w.d, w.side, l)].tobytes()

    def longest_match(self, w: Word) -> tuple:
        """Deepest ``l`` whose leading l-sub-word of ``w`` was seen, and its first index.

        Returns ``(0, None)`` when not even the first symbol was seen before.
        """
        node, depth = self.root, 0
        for key in self._layers(w):
            child = node.children.get(key)
            if child is None:
                break
            node, depth = child, depth + 1
        return depth, node.first_index

    def match_and_insert(self, w: Word, index: int) -> tuple:
        """:meth:`longest_match` followed by :meth:`insert`, in one walk."""
        node, l, p = self.root, 0, None
        for depth, key in enumerate(self._layers(w), 1):
            child = node.children.get(key)
            if child is None:
                # fresh nodes have no children, so the match ends here for good
                child = node.children[key] = _Node(index)
                self.size += 1
                self.firsts.setdefault(depth, []).append(index)
            else:
                l, p = depth, child.first_index
            node = child
        return l, p

    def insert(self, w: Word, index: int) -> None:
        node = self.root
        for depth, key in enumerate(self._layers(w), 1):
            child = node.children.get(key)
            if child is None:
                child = node.children[key] = _Node(index)
                self.size += 1
                self.firsts.setdefault(depth, []).append(index)
            node = child

    def count_before(self, depth: int, index: int) -> int:
        """Number of distinct leading depth-words among words ``1..index-1``."""
        return bisect_left(self.firsts.get(depth, ()), index)

    def rank(self, depth: int, first_index: int) -> int:
        """Creation rank of the depth node whose first index is ``first_index``."""
        firsts = self.firsts.get(depth, ())
        r = bisect_left(firsts, first_index)
        if r == len(firsts) or firsts[r] != first_index:
            raise KeyError((depth, first_index))
        return r

    def walk(self):
        """Yield ``(depth, node)`` for every node, parents before children."""
        stack = [(0, self.root)]
        while stack:
            depth, node = stack.pop()
            yield depth, node
            stack.extend((depth + 1, c) for c in node.children.values())


def longest_match(t: LeadingWordTrie, w: Word) -> tuple:
    return t.longest_match(w)


def insert(t: LeadingWordTrie, w: Word, i: int) -> None:
    t.insert(w, i)
