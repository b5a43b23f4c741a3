"""Explicit state storage, sequential generation, and partition functions.

The two partition families route states to owner workstations for the
distributed simulator: a component hash (owner = hash of a few chosen
state components) and a shared-top search tree (owner = the leaf interval
a state's full lexicographic key falls into, with whole leaves movable
between owners for rebalancing).
"""

from __future__ import annotations

import time
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field

from .symbolic import GenerationMetrics


class StateCapExceeded(RuntimeError):
    """Visited-state count exceeded the configured cap (state explosion)."""


@dataclass
class ExplicitStore:
    """Visited set plus FIFO frontier of states still to explore."""

    visited: set = field(default_factory=set)
    frontier: deque = field(default_factory=deque)

    def add(self, state):
        """Record a state; returns True when it is new."""
        if state in self.visited:
            return False
        self.visited.add(state)
        self.frontier.append(state)
        return True

    def dump_lines(self):
        """Sorted tuple list, one state per line, decimal components."""
        return [" ".join(str(c) for c in s) for s in sorted(self.visited)]


def explicit_generate(model, state_cap=None):
    """Breadth-first explicit generation; returns (store, metrics)."""
    t0 = time.perf_counter()
    store = ExplicitStore()
    for state in model.initial_states:
        store.add(state)
    if state_cap is not None and len(store.visited) > state_cap:
        raise StateCapExceeded(f"visited exceeds cap {state_cap}")
    depth = 0
    level_left = len(store.frontier)
    next_level = 0
    while store.frontier:
        if level_left == 0:
            depth += 1
            level_left = next_level
            next_level = 0
        state = store.frontier.popleft()
        level_left -= 1
        for succ in model.next_states(state):
            if store.add(succ):
                next_level += 1
                if state_cap is not None and len(store.visited) > state_cap:
                    raise StateCapExceeded(f"visited exceeds cap {state_cap}")
    metrics = GenerationMetrics(
        strategy="explicit",
        iterations=depth,
        peak_nodes=len(store.visited),
        final_nodes=len(store.visited),
        state_count=str(len(store.visited)),
        wall_time_ms=int((time.perf_counter() - t0) * 1000),
    )
    return store, metrics


_FNV_OFFSET = 0xcbf29ce484222325
_FNV_PRIME = 0x100000001b3
_MASK64 = (1 << 64) - 1


def _fnv1a(values):
    """64-bit FNV-1a over the values, each fed as 8 little-endian bytes."""
    h = _FNV_OFFSET
    for value in values:
        for byte in int(value).to_bytes(8, "little"):
            h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class HashPartition:
    """Ownership by hashing a chosen subset of state components.

    The owner depends only on the selected levels, so transitions that do
    not touch them stay within one workstation.  An empty selection maps
    every state to the same owner.
    """

    n_workers: int
    selected_levels: tuple

    def __post_init__(self):
        if self.n_workers < 1:
            raise ValueError("need at least one workstation")
        levels = tuple(sorted(set(self.selected_levels), reverse=True))
        object.__setattr__(self, "selected_levels", levels)

    @classmethod
    def over_all_levels(cls, model, n_workers):
        return cls(n_workers, tuple(range(model.levels, 0, -1)))

    def route(self, state):
        total = len(state)
        values = (state[total - k] for k in self.selected_levels)
        h = _fnv1a(values)
        # xor-fold before the modulo: FNV's low bits mix poorly when
        # states differ in few bytes, which matters for small worker counts
        return (h ^ (h >> 32)) % self.n_workers + 1


class TreePartition:
    """Ownership by a shared search tree over full-state lexicographic order.

    The boundary keys split the state space into ``leaves`` intervals; every
    interval (leaf) is owned by one workstation, and reassigning a leaf
    moves exactly that interval's states.  Realized as a sorted boundary
    array with binary search, which routes identically to the shared-top
    tree it stands for.
    """

    def __init__(self, n_workers, boundaries, owners):
        if n_workers < 1:
            raise ValueError("need at least one workstation")
        if len(owners) != len(boundaries) + 1:
            raise ValueError("owners must have one entry per leaf")
        if len(owners) < n_workers:
            raise ValueError("fewer leaves than workstations")
        if sorted(set(boundaries)) != list(boundaries):
            raise ValueError("boundary keys must be strictly increasing")
        self.n_workers = n_workers
        self.boundaries = list(boundaries)
        self.owners = list(owners)
        self.leaf_sizes = [0] * len(owners)

    @classmethod
    def build(cls, model, n_workers, leaves=None, warmup_cap=1000):
        """Freeze boundary keys from a warm-up exploration.

        Explores up to ``warmup_cap`` states breadth-first, sorts them, and
        takes evenly spaced keys as leaf boundaries; leaves are assigned to
        owners in contiguous blocks.  Default leaf count is 16 per
        workstation.
        """
        if leaves is None:
            leaves = 16 * n_workers
        store = ExplicitStore()
        for state in model.initial_states:
            store.add(state)
        while store.frontier and len(store.visited) < warmup_cap:
            state = store.frontier.popleft()
            for succ in model.next_states(state):
                store.add(succ)
                if len(store.visited) >= warmup_cap:
                    break
        sample = sorted(store.visited)
        keys = []
        for i in range(1, leaves):
            key = sample[min(i * len(sample) // leaves, len(sample) - 1)]
            if not keys or key > keys[-1]:
                keys.append(key)
        if len(keys) + 1 < n_workers:
            raise ValueError(
                f"warm-up found only {len(sample)} distinct states, "
                f"not enough leaves for {n_workers} workstations")
        n_leaves = len(keys) + 1
        owners = [i * n_workers // n_leaves + 1 for i in range(n_leaves)]
        return cls(n_workers, keys, owners)

    def leaf_of(self, state):
        return bisect_right(self.boundaries, tuple(state))

    def route(self, state):
        return self.owners[self.leaf_of(state)]

    def note_insert(self, state):
        self.leaf_sizes[self.leaf_of(state)] += 1

    def owner_loads(self):
        loads = {w: 0 for w in range(1, self.n_workers + 1)}
        for leaf, size in enumerate(self.leaf_sizes):
            loads[self.owners[leaf]] += size
        return loads

    def rebalance(self, loads, threshold=2.0):
        """Plan whole-leaf moves from the most to the least loaded owner.

        Repeats until max/min load drops to ``threshold`` or no single-leaf
        move shrinks the load spread; each move is the leaf minimizing the
        resulting spread.  Returns (leaf, old_owner, new_owner) moves
        without applying them; use apply_move for that.
        """
        loads = dict(loads)
        owners = list(self.owners)
        moves = []
        while True:
            hi = min((w for w in loads), key=lambda w: (-loads[w], w))
            lo = min((w for w in loads), key=lambda w: (loads[w], w))
            if hi == lo or loads[hi] == 0:
                break
            if loads[lo] > 0 and loads[hi] / loads[lo] <= threshold:
                break
            spread = loads[hi] - loads[lo]
            best = None
            best_spread = spread
            for leaf, owner in enumerate(owners):
                if owner != hi or self.leaf_sizes[leaf] == 0:
                    continue
                size = self.leaf_sizes[leaf]
                trial = dict(loads)
                trial[hi] -= size
                trial[lo] += size
                trial_spread = max(trial.values()) - min(trial.values())
                if trial_spread < best_spread:
                    best, best_spread = leaf, trial_spread
            if best is None:
                break
            size = self.leaf_sizes[best]
            loads[hi] -= size
            loads[lo] += size
            owners[best] = lo
            moves.append((best, hi, lo))
        return moves

    def apply_move(self, leaf, new_owner):
        self.owners[leaf] = new_owner

    def states_in_leaf(self, leaf, states):
        # leaf i holds boundaries[i-1] <= s < boundaries[i], open at the rims
        lower = self.boundaries[leaf - 1] if leaf > 0 else None
        upper = self.boundaries[leaf] if leaf < len(self.boundaries) else None
        out = []
        for state in states:
            if lower is not None and state < lower:
                continue
            if upper is not None and state >= upper:
                continue
            out.append(state)
        return out


def route(partition, state):
    """Owner workstation of a state under either partition family."""
    return partition.route(state)
