"""Tries and PATRICIA trees over lazily sampled binary strings.

A ``PatriciaTree`` keeps its nodes in flat arrays. Internal node ``x`` tests
bit ``split[x]`` and continues to ``zero[x]`` or ``one[x]``. A child
reference ``r >= 0`` is an internal node, ``r < 0`` is the leaf ``~r``.

Three construction paths produce the same tree:

* ``compress(build_trie(strings))``, the explicit node-per-prefix oracle;
* repeated ``PatriciaTree.insert``;
* ``build_patricia``, a bulk builder that groups strings by the position of
  their next 1 bit, so long shared zero runs cost one sort instead of one
  node visit per string.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field

from .bitstreams import DepthGuardError, LazyBitString, first_difference

TRIE_NODE_LIMIT = 1 << 22


def _check_distinct(strings):
    if len({id(s) for s in strings}) != len(strings):
        raise DepthGuardError("the same string object appears twice")


# ---------------------------------------------------------------------------
# trie


@dataclass
class Trie:
    depth: list = field(default_factory=list)
    zero: list = field(default_factory=list)
    one: list = field(default_factory=list)
    leaf_id: list = field(default_factory=list)
    strings: dict = field(default_factory=dict)
    root: int | None = None

    def _new(self, depth, leaf_id=None):
        self.depth.append(depth)
        self.zero.append(None)
        self.one.append(None)
        self.leaf_id.append(leaf_id)
        return len(self.depth) - 1

    @property
    def leaf_count(self):
        return sum(1 for x in self.leaf_id if x is not None)

    def leaf_depths(self) -> dict:
        return {sid: self.depth[x] for x, sid in enumerate(self.leaf_id) if sid is not None}

    def height(self) -> int:
        return max(self.leaf_depths().values(), default=0)


def build_trie(strings) -> Trie:
    """Node-per-prefix trie. Only meant for small inputs and oracle checks."""
    strings = list(strings)
    if not strings:
        raise ValueError("build_trie needs at least one string")
    _check_distinct(strings)
    trie = Trie(strings={s.string_id: s for s in strings})
    if len(trie.strings) != len(strings):
        raise ValueError("string ids must be unique")
    trie.root = trie._new(0)
    stack = [(trie.root, strings)]
    while stack:
        node, group = stack.pop()
        d = trie.depth[node]
        if len(group) == 1:
            trie.leaf_id[node] = group[0].string_id
            continue
        if len(trie.depth) > TRIE_NODE_LIMIT:
            raise ValueError("trie too large for the explicit representation")
        parts = ([], [])
        for s in group:
            parts[s.bit_at(d + 1)].append(s)
        for b, part in enumerate(parts):
            if part:
                child = trie._new(d + 1)
                (trie.one if b else trie.zero)[node] = child
                stack.append((child, part))
    return trie


# ---------------------------------------------------------------------------
# PATRICIA tree


class PatriciaTree:
    def __init__(self):
        self.split = []
        self.zero = []
        self.one = []
        self.leaves = []
        self.root = None

    def __len__(self):
        return len(self.leaves)

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)

    @property
    def internal_count(self) -> int:
        return len(self.split)

    def _leaf(self, s):
        self.leaves.append(s)
        return ~(len(self.leaves) - 1)

    def _node(self, split, zero, one):
        self.split.append(split)
        self.zero.append(zero)
        self.one.append(one)
        return len(self.split) - 1

    def insert(self, s: LazyBitString) -> "PatriciaTree":
        """Add one string, splicing a node at its first divergence."""
        if self.root is None:
            self.root = self._leaf(s)
            return self
        split, zero, one = self.split, self.zero, self.one
        ts, ones = s.tail_start, s.ones
        node = self.root
        path = []
        while node >= 0:
            path.append(node)
            i = split[node]
            if i < ts:
                node = one[node] if i in ones else zero[node]
            else:
                node = one[node] if s.bit_at(i) else zero[node]
        d = first_difference(s, self.leaves[~node])
        j = bisect_right(path, d, key=split.__getitem__)
        below = path[j] if j < len(path) else node
        leaf = self._leaf(s)
        new = self._node(d, below, leaf) if s.bit_at(d) else self._node(d, leaf, below)
        if j == 0:
            self.root = new
        else:
            parent = path[j - 1]
            if one[parent] == below:
                one[parent] = new
            else:
                zero[parent] = new
        return self

    def height(self) -> int:
        if self.root is None:
            return 0
        zero, one = self.zero, self.one
        best = 0
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            if node is None:
                continue
            if node < 0:
                if d > best:
                    best = d
            else:
                stack.append((zero[node], d + 1))
                stack.append((one[node], d + 1))
        return best

    def max_split_index(self) -> int:
        return max(self.split, default=0)

    def witness_prefix_lengths(self) -> dict:
        """Leaf depth in the uncompressed trie: the parent's split (0 at the root)."""
        out = {}
        if self.root is None:
            return out
        stack = [(self.root, 0)]
        while stack:
            node, parent_split = stack.pop()
            if node < 0:
                out[self.leaves[~node].string_id] = parent_split
            else:
                sp = self.split[node]
                stack.append((self.zero[node], sp))
                stack.append((self.one[node], sp))
        return out

    def shape(self) -> tuple:
        """Canonical pre-order encoding; equal shapes mean identical trees."""
        if self.root is None:
            return ()
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node is None:
                out.append(("missing",))
            elif node < 0:
                out.append(("leaf", self.leaves[~node].string_id))
            else:
                out.append(("node", self.split[node]))
                stack.append(self.one[node])
                stack.append(self.zero[node])
        return tuple(out)

    def to_json(self) -> str:
        """Debug dump; the layout is not a stable format."""
        def ref(r):
            if r is None:
                return None
            return {"node": r} if r >= 0 else {"leaf": self.leaves[~r].string_id}
        return json.dumps({
            "root": ref(self.root),
            "nodes": [
                {"id": x, "split_index": self.split[x],
                 "zero": ref(self.zero[x]), "one": ref(self.one[x])}
                for x in range(len(self.split))
            ],
            "leaves": [s.string_id for s in self.leaves],
        })


def insert(tree: PatriciaTree, s: LazyBitString) -> PatriciaTree:
    return tree.insert(s)


def build_by_insertion(strings) -> PatriciaTree:
    tree = PatriciaTree()
    for s in strings:
        tree.insert(s)
    return tree


def compress(trie: Trie) -> PatriciaTree:
    """Drop every out-degree-1 trie node; a branching node at depth d splits on d+1."""
    if trie.root is None:
        raise ValueError("empty trie")
    tree = PatriciaTree()
    # (trie node, patricia parent, side)
    stack = [(trie.root, None, 0)]
    while stack:
        x, parent, side = stack.pop()
        while trie.leaf_id[x] is None and (trie.zero[x] is None) != (trie.one[x] is None):
            x = trie.zero[x] if trie.zero[x] is not None else trie.one[x]
        if trie.leaf_id[x] is not None:
            if trie.zero[x] is not None or trie.one[x] is not None:
                raise ValueError(f"trie leaf {x} has children")
            ref = tree._leaf(trie.strings[trie.leaf_id[x]])
        elif trie.zero[x] is None:
            raise ValueError(f"trie node {x} has no children and no leaf")
        else:
            ref = tree._node(trie.depth[x] + 1, None, None)
            stack.append((trie.zero[x], ref, 0))
            stack.append((trie.one[x], ref, 1))
        if parent is None:
            tree.root = ref
        elif side:
            tree.one[parent] = ref
        else:
            tree.zero[parent] = ref
    return tree


def build_patricia(strings) -> PatriciaTree:
    """Bulk construction, identical in shape to inserting the strings one by one.

    A group of strings agreeing on positions ``< pos`` is ordered by each
    string's next 1 at or after ``pos``. With distinct next-one positions
    m_1 < m_2 < ... the group forms a chain of nodes splitting at m_1, m_2, ...,
    each hanging the strings whose next 1 is m_i on its one-side.
    """
    strings = list(strings)
    tree = PatriciaTree()
    if not strings:
        return tree
    _check_distinct(strings)
    # (group, pos, parent, side)
    stack = [(strings, 1, None, 0)]
    while stack:
        group, pos, parent, side = stack.pop()
        if len(group) == 1:
            ref = tree._leaf(group[0])
            _attach(tree, parent, side, ref)
            continue
        keyed = sorted(((s.next_one(pos), k) for k, s in enumerate(group)))
        runs = []
        start = 0
        for k in range(1, len(keyed) + 1):
            if k == len(keyed) or keyed[k][0] != keyed[start][0]:
                runs.append((keyed[start][0], [group[i] for _, i in keyed[start:k]]))
                start = k
        for m, members in runs[:-1]:
            ref = tree._node(m, None, None)
            _attach(tree, parent, side, ref)
            stack.append((members, m + 1, ref, 1))
            parent, side = ref, 0
        m, members = runs[-1]
        stack.append((members, m + 1, parent, side))
    return tree


def _attach(tree, parent, side, ref):
    if parent is None:
        tree.root = ref
    elif side:
        tree.one[parent] = ref
    else:
        tree.zero[parent] = ref


def height(tree) -> int:
    return tree.height()


def distinct_first_one_count(strings) -> int:
    """|{first_one_index(s)}|; any PATRICIA tree over ``strings`` has height >= this - 1."""
    return len({s.first_one_index() for s in strings})


def validate(tree: PatriciaTree) -> list:
    """All broken invariants of ``tree`` as messages; empty when it is sound."""
    problems = []
    if tree.root is None:
        return problems
    split, zero, one, leaves = tree.split, tree.zero, tree.one, tree.leaves
    seen_leaves = set()
    seen_nodes = set()
    # node, list of (split, direction) on the path from the root
    stack = [(tree.root, ())]
    while stack:
        node, path = stack.pop()
        if node < 0:
            li = ~node
            if li in seen_leaves:
                problems.append(f"leaf {li} reachable twice")
                continue
            seen_leaves.add(li)
            s = leaves[li]
            for i, b in path:
                if s.bit_at(i) != b:
                    problems.append(
                        f"leaf bit mismatch: string {s.string_id} has bit {1 - b} at {i}")
                    break
            continue
        if node in seen_nodes:
            problems.append(f"node {node} reachable twice")
            continue
        seen_nodes.add(node)
        sp = split[node]
        if sp < 1:
            problems.append(f"node {node}: split index {sp} < 1")
        if path and sp <= path[-1][0]:
            problems.append(
                f"non-increasing split index: node {node} splits at {sp} below {path[-1][0]}")
        kids = [c for c in (zero[node], one[node]) if c is not None]
        if len(kids) == 1:
            problems.append(f"out-degree 1 at node {node}")
        elif not kids:
            problems.append(f"out-degree 0 at node {node}")
        else:
            a, b = _any_leaf(tree, zero[node]), _any_leaf(tree, one[node])
            if a is not None and b is not None:
                try:
                    d = first_difference(a, b)
                except DepthGuardError:
                    d = None
                if d != sp:
                    problems.append(
                        f"node {node}: children first differ at {d}, not at split {sp}")
        if zero[node] is not None:
            stack.append((zero[node], path + ((sp, 0),)))
        if one[node] is not None:
            stack.append((one[node], path + ((sp, 1),)))
    if len(seen_leaves) != len(leaves):
        problems.append(f"{len(leaves) - len(seen_leaves)} leaves unreachable")
    if len(seen_nodes) != len(split):
        problems.append(f"{len(split) - len(seen_nodes)} internal nodes unreachable")
    if len(split) != len(leaves) - 1:
        problems.append(f"internal node count {len(split)} != leaf count {len(leaves)} - 1")
    return problems


def _any_leaf(tree, ref):
    while ref is not None and ref >= 0:
        ref = tree.zero[ref] if tree.zero[ref] is not None else tree.one[ref]
    return None if ref is None else tree.leaves[~ref]
