"""Quasi-reduced multi-valued decision diagram forest.

Every level keeps its own unique table and operation cache.  A node at
level k branches on the level-k variable and all its edges point to level
k-1 nodes; level 0 holds the two terminals (id 0 = empty, id 1 = accept).
Child vectors are stored with trailing zeros trimmed, so a node keeps its
identity when the level's domain grows: indices past the stored width read
as the empty set.  Every level's id 0 is the canonical empty ("zero") node,
so an all-zero child vector always canonicalizes to it.

Path counts are exact integers cached per node; they never change, because
they only depend on stored children.  Fullness (paths / size of the whole
sub-space) does depend on the current domain sizes and is recomputed on
demand.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass


class NodeCapExceeded(RuntimeError):
    """Live node count exceeded the configured cap (state explosion)."""


@dataclass(frozen=True)
class NodeRef:
    """Handle to one node: its level and its id in that level's table."""

    level: int
    idx: int


TERM_ZERO = NodeRef(0, 0)
TERM_ONE = NodeRef(0, 1)


class MddForest:
    def __init__(self, levels, domains=None, node_cap=None):
        if levels < 1:
            raise ValueError("forest needs at least one level")
        self.levels = levels
        if domains is None:
            self.domains = [1] * (levels + 1)
        else:
            if len(domains) != levels + 1:
                raise ValueError("domains must have levels+1 entries")
            self.domains = list(domains)
        self.domains_version = 0
        self.node_cap = node_cap
        self.union_calls = 0
        self.peak_nodes = 0
        # recursions walk one frame per level
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * levels + 2000))
        # per level: unique table, children store, path counts, op cache
        self._ut = [dict() for _ in range(levels + 1)]
        self._children = [dict() for _ in range(levels + 1)]
        self._paths = [dict() for _ in range(levels + 1)]
        self._cache = [dict() for _ in range(levels + 1)]
        self._next_id = [0] * (levels + 1)
        self._paths[0] = {0: 0, 1: 1}
        self._next_id[0] = 2
        self._space_cache = {}
        self._live = 0
        for k in range(1, levels + 1):
            self._store(k, ())  # id 0 everywhere: the canonical empty node

    # -- node construction -------------------------------------------------

    def _store(self, k, children):
        idx = self._next_id[k]
        self._next_id[k] += 1
        self._ut[k][children] = idx
        self._children[k][idx] = children
        self._paths[k][idx] = sum(self._paths[k - 1][c] for c in children)
        self._live += 1
        if self._live > self.peak_nodes:
            self.peak_nodes = self._live
        if self.node_cap is not None and self._live > self.node_cap:
            raise NodeCapExceeded(
                f"live nodes {self._live} exceed cap {self.node_cap}")
        return idx

    def _mk(self, k, children):
        """Canonicalize a child-id vector into a level-k node id."""
        end = len(children)
        while end and children[end - 1] == 0:
            end -= 1
        if end == 0:
            return 0
        key = tuple(children[:end])
        idx = self._ut[k].get(key)
        if idx is None:
            idx = self._store(k, key)
        return idx

    def mk_node(self, level, children):
        """Public constructor from NodeRef children (all at level-1)."""
        if not 1 <= level <= self.levels:
            raise ValueError(f"bad level {level}")
        if len(children) > self.domains[level]:
            raise ValueError("child vector wider than the level's domain")
        ids = []
        for ref in children:
            if ref.level != level - 1:
                raise ValueError(
                    f"child at level {ref.level}, expected {level - 1}")
            ids.append(ref.idx)
        return NodeRef(level, self._mk(level, ids))

    # -- structure access --------------------------------------------------

    def width(self, ref):
        return len(self._children[ref.level][ref.idx]) if ref.level else 0

    def child(self, ref, i):
        """i-th child as a NodeRef; indices past the stored width are empty."""
        children = self._children[ref.level][ref.idx]
        return NodeRef(ref.level - 1, children[i] if i < len(children) else 0)

    def child_ids(self, level, idx):
        return self._children[level][idx]

    def live_nodes(self):
        return self._live

    def grow_domain(self, level, value):
        if value >= self.domains[level]:
            self.domains[level] = value + 1
            self.domains_version += 1

    def space_size(self, level):
        """|X_level x ... x X_1| under the current domains."""
        key = (level, self.domains_version)
        size = self._space_cache.get(key)
        if size is None:
            size = 1
            for k in range(1, level + 1):
                size *= self.domains[k]
            self._space_cache[key] = size
        return size

    # -- set operations ----------------------------------------------------

    def _union(self, k, a, b):
        if a == b or b == 0:
            return a
        if a == 0:
            return b
        if k == 0:
            return 1
        self.union_calls += 1
        key = ("u", a, b) if a < b else ("u", b, a)
        cache = self._cache[k]
        hit = cache.get(key)
        if hit is not None:
            return hit
        ca = self._children[k][a]
        cb = self._children[k][b]
        n = max(len(ca), len(cb))
        ids = [
            self._union(k - 1,
                        ca[i] if i < len(ca) else 0,
                        cb[i] if i < len(cb) else 0)
            for i in range(n)
        ]
        r = self._mk(k, ids)
        cache[key] = r
        return r

    def _intersect(self, k, a, b):
        if a == b:
            return a
        if a == 0 or b == 0:
            return 0
        if k == 0:
            return 0  # distinct terminals
        key = ("i", a, b) if a < b else ("i", b, a)
        cache = self._cache[k]
        hit = cache.get(key)
        if hit is not None:
            return hit
        ca = self._children[k][a]
        cb = self._children[k][b]
        n = min(len(ca), len(cb))
        ids = [self._intersect(k - 1, ca[i], cb[i]) for i in range(n)]
        r = self._mk(k, ids)
        cache[key] = r
        return r

    def _difference(self, k, a, b):
        if a == b or a == 0:
            return 0
        if b == 0:
            return a
        if k == 0:
            return a  # a == 1, b == 0 here
        key = ("d", a, b)
        cache = self._cache[k]
        hit = cache.get(key)
        if hit is not None:
            return hit
        ca = self._children[k][a]
        cb = self._children[k][b]
        ids = [
            self._difference(k - 1, ca[i], cb[i] if i < len(cb) else 0)
            for i in range(len(ca))
        ]
        r = self._mk(k, ids)
        cache[key] = r
        return r

    # -- relational product ------------------------------------------------

    def rel_product(self, ref, rel, call_log=None):
        """Image of the set under a level relation view.

        ``rel`` exposes ``arcs(i) -> iterable of (j, continuation)`` and a
        hashable ``key``; a continuation of None means identity below.
        Column indices past the current domain extend it.  ``call_log``
        collects the (i, j) pairs of recursive calls actually issued.
        """
        return NodeRef(ref.level, self._relprod(ref.level, ref.idx, rel, call_log))

    def _relprod(self, k, p, rel, log):
        if p == 0:
            return 0
        if rel is None or k == 0:
            return p
        key = ("r", rel.key, p)
        cache = self._cache[k]
        hit = cache.get(key)
        if hit is not None and log is None:
            return hit
        acc = []
        for i, pi in enumerate(self._children[k][p]):
            if pi == 0:
                continue
            for j, cont in rel.arcs(i):
                if log is not None:
                    log.append((i, j))
                f = self._relprod(k - 1, pi, cont, log)
                if f == 0:
                    continue
                self.grow_domain(k, j)
                if j >= len(acc):
                    acc.extend([0] * (j + 1 - len(acc)))
                acc[j] = self._union(k - 1, acc[j], f)
        r = self._mk(k, acc)
        cache[key] = r
        return r

    # -- counting and enumeration -------------------------------------------

    def path_count(self, ref):
        return self._paths[ref.level][ref.idx]

    def fullness(self, ref):
        """Fraction of the level's sub-space the node encodes, in [0, 1]."""
        space = self.space_size(ref.level)
        if space == 0:
            return 0.0
        return self._paths[ref.level][ref.idx] / space

    def is_full(self, level, idx):
        return self._paths[level][idx] == self.space_size(level)

    def enumerate(self, ref, limit=100_000):
        """All encoded tuples in lexicographic order; refuses above ``limit``."""
        count = self._paths[ref.level][ref.idx]
        if count > limit:
            raise ValueError(f"set has {count} states, above limit {limit}")
        out = []
        prefix = []

        def walk(k, idx):
            if k == 0:
                if idx == 1:
                    out.append(tuple(prefix))
                return
            for i, c in enumerate(self._children[k][idx]):
                if c == 0:
                    continue
                prefix.append(i)
                walk(k - 1, c)
                prefix.pop()

        walk(ref.level, ref.idx)
        return out

    def first_tuples(self, ref, n):
        """The first ``n`` encoded tuples in lexicographic order."""
        out = []
        prefix = []

        def walk(k, idx):
            if len(out) >= n:
                return
            if k == 0:
                if idx == 1:
                    out.append(tuple(prefix))
                return
            for i, c in enumerate(self._children[k][idx]):
                if c == 0:
                    continue
                prefix.append(i)
                walk(k - 1, c)
                prefix.pop()
                if len(out) >= n:
                    return

        walk(ref.level, ref.idx)
        return out

    # -- sets over the full height ------------------------------------------

    def empty_set(self):
        return StateSet(self, NodeRef(self.levels, 0))

    def full_set(self):
        """Everything in the potential space under the current domains."""
        idx = 1
        for k in range(1, self.levels + 1):
            idx = self._mk(k, [idx] * self.domains[k])
        return StateSet(self, NodeRef(self.levels, idx))

    def from_tuples(self, states):
        """Encode an iterable of full-height tuples."""
        root = 0
        for state in states:
            if len(state) != self.levels:
                raise ValueError("tuple length does not match forest levels")
            idx = 1
            for k in range(1, self.levels + 1):
                value = state[self.levels - k]
                self.grow_domain(k, value)
                vec = [0] * (value + 1)
                vec[value] = idx
                idx = self._mk(k, vec)
            root = self._union(self.levels, root, idx)
        return StateSet(self, NodeRef(self.levels, root))

    # -- maintenance ---------------------------------------------------------

    def clear_caches(self):
        for cache in self._cache:
            cache.clear()

    def collect(self, keep):
        """Mark-and-sweep from the given refs; zero nodes always survive.

        Operation caches are cleared because entries may name swept nodes.
        Node ids are never reused, so surviving refs stay valid.
        """
        marked = [set() for _ in range(self.levels + 1)]

        def mark(k, idx):
            if k == 0 or idx in marked[k]:
                return
            marked[k].add(idx)
            for c in self._children[k][idx]:
                mark(k - 1, c)

        for ref in keep:
            mark(ref.level, ref.idx)
        for k in range(1, self.levels + 1):
            marked[k].add(0)
            for idx in list(self._children[k]):
                if idx not in marked[k]:
                    children = self._children[k].pop(idx)
                    del self._ut[k][children]
                    del self._paths[k][idx]
                    self._live -= 1
        self.clear_caches()

    def subgraph_nodes(self, ref):
        """Stored nodes reachable from ref, terminals and zero nodes excluded."""
        seen = [set() for _ in range(self.levels + 1)]

        def walk(k, idx):
            if k == 0 or idx == 0 or idx in seen[k]:
                return
            seen[k].add(idx)
            for c in self._children[k][idx]:
                walk(k - 1, c)

        walk(ref.level, ref.idx)
        return sum(len(s) for s in seen)

    def dump_lines(self, ref):
        """Debug dump of the reachable subgraph, one stable line per node."""
        seen = [set() for _ in range(self.levels + 1)]

        def walk(k, idx):
            if k == 0 or idx in seen[k]:
                return
            seen[k].add(idx)
            for c in self._children[k][idx]:
                walk(k - 1, c)

        walk(ref.level, ref.idx)
        lines = []
        for k in range(self.levels, 0, -1):
            for idx in sorted(seen[k]):
                children = ",".join(str(c) for c in self._children[k][idx])
                lines.append(f"L{k}:{idx} -> [{children}]")
        return lines


class StateSet:
    """A set of global states: a root handle into a forest.

    Canonicity makes equality a root-id comparison (same forest only).
    """

    __slots__ = ("forest", "root")

    def __init__(self, forest, root):
        if root.level != forest.levels:
            raise ValueError("state set root must sit at the top level")
        self.forest = forest
        self.root = root

    def _check(self, other):
        if other.forest is not self.forest:
            raise ValueError("state sets belong to different forests")

    def union(self, other):
        self._check(other)
        f = self.forest
        return StateSet(f, NodeRef(f.levels, f._union(f.levels, self.root.idx, other.root.idx)))

    def intersect(self, other):
        self._check(other)
        f = self.forest
        return StateSet(f, NodeRef(f.levels, f._intersect(f.levels, self.root.idx, other.root.idx)))

    def difference(self, other):
        self._check(other)
        f = self.forest
        return StateSet(f, NodeRef(f.levels, f._difference(f.levels, self.root.idx, other.root.idx)))

    __or__ = union
    __and__ = intersect
    __sub__ = difference

    def count(self):
        return self.forest.path_count(self.root)

    def is_empty(self):
        return self.root.idx == 0

    def tuples(self, limit=100_000):
        return self.forest.enumerate(self.root, limit)

    def __eq__(self, other):
        return (isinstance(other, StateSet)
                and other.forest is self.forest
                and other.root == self.root)

    def __hash__(self):
        return hash((id(self.forest), self.root))

    def __len__(self):
        count = self.count()
        if count > 10**18:
            raise OverflowError("set too large for len(); use count()")
        return count

    def __repr__(self):
        return f"StateSet(root=L{self.root.level}:{self.root.idx}, count={self.count()})"


def count_states(stateset):
    return stateset.count()


def enumerate_states(stateset, limit=100_000):
    return stateset.tuples(limit)
