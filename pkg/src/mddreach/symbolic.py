"""Symbolic state-space generation strategies and CTL base operators.

Three strategies over the MDD kernel:

* ``bfs``: the classic frontier loop — image the unexplored set, subtract
  the known states, union the rest back in, until the frontier empties.
* ``saturation``: saturate the initial-state diagram bottom up.  Events are
  bucketed by their top level; a node at level k is brought to a fixpoint
  of every event whose top is at or below k, and any node created below
  during a firing is saturated before the higher node finishes.
* ``chained saturation``: same fixpoint, but within each node the firing
  order follows the node's dynamic firing graph: process the strongly
  connected components of that graph in topological order and, inside a
  component, greedily pick the pair whose estimated fullness gain is
  largest.

CTL base operators EX, EU and EG are backward fixpoints over a caller
supplied universe (normally the reachable set), using the reversed local
functions of each event.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .mdd import MddForest, NodeRef, StateSet


@dataclass
class GenerationMetrics:
    """Per-run counters, JSON-stable field order."""

    strategy: str
    iterations: int = 0
    relprod_calls: int = 0
    union_calls: int = 0
    peak_nodes: int = 0
    final_nodes: int = 0
    state_count: str = "0"
    wall_time_ms: int | None = None

    def to_dict(self, include_timings=False):
        out = {
            "strategy": self.strategy,
            "iterations": self.iterations,
            "relprod_calls": self.relprod_calls,
            "union_calls": self.union_calls,
            "peak_nodes": self.peak_nodes,
            "final_nodes": self.final_nodes,
            "state_count": self.state_count,
        }
        if include_timings and self.wall_time_ms is not None:
            out["wall_time_ms"] = self.wall_time_ms
        return out


class EventSchedule:
    """Model events bucketed by their top level (the disjunctive partition)."""

    def __init__(self, model):
        self.model = model
        self.buckets = {k: [] for k in range(1, model.levels + 1)}
        for event in model.events:
            self.buckets[event.top].append(event)
        self._arc_cache = {}

    def events_at(self, level):
        return self.buckets[level]

    def arcs_at(self, level, width):
        """Level-k rows of the union relation: i -> {j -> [events]}.

        Covers sources 0..width-1; targets may lie past the current domain
        (firing them grows it).  Cached per (level, width).
        """
        key = (level, width)
        arcs = self._arc_cache.get(key)
        if arcs is None:
            arcs = {}
            for event in self.buckets[level]:
                fn = event.locals[level]
                for i in range(fn.take, width):
                    arcs.setdefault(i, {}).setdefault(
                        i - fn.take + fn.put, []).append(event)
            self._arc_cache[key] = arcs
        return arcs


class EventRel:
    """Relation view of a single event from ``level`` down, for rel_product."""

    __slots__ = ("event", "level", "key")

    def __init__(self, event, level):
        self.event = event
        self.level = level
        self.key = ("ev", event.index, level)

    def arcs(self, i):
        if self.level < self.event.bot:
            # identity from here down; rel_product treats None as identity
            yield i, None
            return
        fn = self.event.locals.get(self.level)
        if fn is None:
            yield i, EventRel(self.event, self.level - 1)
            return
        j = fn.apply(i)
        if j is not None:
            cont = None if self.level - 1 < self.event.bot \
                else EventRel(self.event, self.level - 1)
            yield j, cont


class DynamicGraph:
    """Firing graph of one node: local states with the orderable firings.

    An edge (i, j) is present when the source child is nonempty, the level
    relation can move i to j, and the target child is not yet full.  The
    condensation (iterative Tarjan) is exposed in topological order.
    """

    def __init__(self, n_vertices, edges):
        self.n = n_vertices
        self.edges = set(edges)
        self.sccs, self.scc_index = self._condense()

    def _condense(self):
        succ = {}
        for i, j in self.edges:
            if i < self.n and j < self.n:
                succ.setdefault(i, []).append(j)
        for targets in succ.values():
            targets.sort()

        index = {}
        lowlink = {}
        on_stack = set()
        stack = []
        sccs = []
        counter = 0

        for start in range(self.n):
            if start in index:
                continue
            index[start] = lowlink[start] = counter
            counter += 1
            stack.append(start)
            on_stack.add(start)
            work = [(start, iter(succ.get(start, ())))]
            while work:
                v, it = work[-1]
                advanced = False
                for w in it:
                    if w not in index:
                        index[w] = lowlink[w] = counter
                        counter += 1
                        stack.append(w)
                        on_stack.add(w)
                        work.append((w, iter(succ.get(w, ()))))
                        advanced = True
                        break
                    if w in on_stack:
                        lowlink[v] = min(lowlink[v], index[w])
                if advanced:
                    continue
                work.pop()
                if work:
                    parent = work[-1][0]
                    lowlink[parent] = min(lowlink[parent], lowlink[v])
                if lowlink[v] == index[v]:
                    component = []
                    while True:
                        w = stack.pop()
                        on_stack.remove(w)
                        component.append(w)
                        if w == v:
                            break
                    component.sort()
                    sccs.append(component)

        sccs.reverse()  # Tarjan emits reverse topological order
        scc_index = {}
        for pos, component in enumerate(sccs):
            for v in component:
                scc_index[v] = pos
        return sccs, scc_index

    def has_path(self, a, b):
        """Directed path a -> b of length >= 1."""
        succ = {}
        for i, j in self.edges:
            succ.setdefault(i, set()).add(j)
        seen = set()
        frontier = [a]
        while frontier:
            v = frontier.pop()
            for w in succ.get(v, ()):
                if w == b:
                    return True
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return False


def chaining_score(space_size, src_fullness, rel_fullness, dst_fullness):
    """Estimated fullness gain of firing (i, j): the greedy chaining score."""
    return space_size * src_fullness * rel_fullness * (1.0 - dst_fullness)


def _log_or_ninf(x):
    return math.log(x) if x > 0.0 else -math.inf


def _log_score(src_fullness, rel_fullness, dst_fullness):
    """Chaining score in log space (the space factor is constant per level,
    so dropping it keeps the argmax; logs avoid overflow on huge spaces)."""
    return (_log_or_ninf(src_fullness)
            + _log_or_ninf(rel_fullness)
            + _log_or_ninf(1.0 - dst_fullness))


def firing_schedule(forest, ref, arcs, rel_fullness=None):
    """Static chained order for one node, plus the parallel-safe pairs.

    ``arcs`` maps source local states to target sets (the level relation
    rows).  Returns ``(order, safe_pairs)``: the (i, j) firing order that
    follows the condensation, and the unordered pairs of firing sources
    with no directed path between them either way.  Analysis only, nothing
    is executed.
    """
    k = ref.level
    n = forest.domains[k]
    edges = []
    for i, targets in arcs.items():
        if i >= n or forest.child(ref, i).idx == 0:
            continue
        for j in targets:
            if j >= n:
                continue
            cj = forest.child(ref, j)
            if forest.is_full(k - 1, cj.idx):
                continue
            edges.append((i, j))
    graph = DynamicGraph(n, edges)

    if rel_fullness is None:
        rel_fullness = lambda i, j: 1.0

    def key(pair):
        i, j = pair
        score = _log_score(forest.fullness(forest.child(ref, i)),
                           rel_fullness(i, j),
                           forest.fullness(forest.child(ref, j)))
        return (-score, pair)

    order = []
    for pos, component in enumerate(graph.sccs):
        members = set(component)
        intra = sorted(((i, j) for (i, j) in graph.edges
                        if i in members and j in members), key=key)
        cross = sorted((i, j) for (i, j) in graph.edges
                       if i in members and graph.scc_index[j] > pos)
        order.extend(intra)
        order.extend(cross)

    sources = sorted({i for (i, _) in graph.edges})
    safe = set()
    for a_pos, a in enumerate(sources):
        for b in sources[a_pos + 1:]:
            if not graph.has_path(a, b) and not graph.has_path(b, a):
                safe.add((a, b))
    return order, safe


class SymbolicEngine:
    """One forest plus the strategy implementations that run inside it.

    Strategies run in the same forest yield root-identical sets for equal
    state spaces, which the cross-strategy checks rely on.
    """

    def __init__(self, model, forest=None, node_cap=None, record_schedule=False):
        self.model = model
        self.forest = forest or MddForest(
            model.levels, domains=model.domains, node_cap=node_cap)
        self.schedule = EventSchedule(model)
        self.relprod_calls = 0
        self.record_schedule = record_schedule
        self.schedule_log = []
        self.descend_hook = None  # distsim instrumentation: f(from_level, to_level)
        self._loop_count = 0
        self._relful_cache = {}

    # -- shared plumbing ----------------------------------------------------

    def initial_set(self):
        return self.forest.from_tuples(self.model.initial_states)

    def _start(self, strategy):
        return {
            "strategy": strategy,
            "t0": time.perf_counter(),
            "relprod0": self.relprod_calls,
            "union0": self.forest.union_calls,
        }

    def _finish(self, run, root_idx, iterations):
        f = self.forest
        root = NodeRef(f.levels, root_idx)
        f.collect([root])
        metrics = GenerationMetrics(
            strategy=run["strategy"],
            iterations=iterations,
            relprod_calls=self.relprod_calls - run["relprod0"],
            union_calls=f.union_calls - run["union0"],
            peak_nodes=f.peak_nodes,
            final_nodes=f.live_nodes(),
            state_count=str(f.path_count(root)),
            wall_time_ms=int((time.perf_counter() - run["t0"]) * 1000),
        )
        return StateSet(f, root), metrics

    def _descend(self, from_level, to_level):
        if self.descend_hook is not None:
            self.descend_hook(from_level, to_level)

    # -- forward image (per event, no saturation) -----------------------------

    def _fire(self, event, k, q):
        """Forward image of node q under one event, levels k and below."""
        self.relprod_calls += 1
        if q == 0 or k == 0 or k < event.bot:
            return q
        f = self.forest
        cache = f._cache[k]
        key = ("f", event.index, q)
        hit = cache.get(key)
        if hit is not None:
            return hit
        self._descend(k + 1, k)  # computation happens at this level's owner
        fn = event.locals.get(k)
        vec = []
        for i, qi in enumerate(f._children[k][q]):
            if qi == 0:
                continue
            j = fn.apply(i) if fn is not None else i
            if j is None:
                continue
            img = self._fire(event, k - 1, qi)
            if img == 0:
                continue
            f.grow_domain(k, j)
            if j >= len(vec):
                vec.extend([0] * (j + 1 - len(vec)))
            vec[j] = f._union(k - 1, vec[j], img)
        r = f._mk(k, vec)
        cache[key] = r
        return r

    def image(self, stateset, events=None):
        """N(X): union of single-event images, as a StateSet."""
        f = self.forest
        acc = 0
        for event in (events if events is not None else self.model.events):
            acc = f._union(f.levels, acc,
                           self._fire(event, f.levels, stateset.root.idx))
        return StateSet(f, NodeRef(f.levels, acc))

    # -- breadth-first generation ----------------------------------------------

    def bfs(self):
        run = self._start("bfs")
        f = self.forest
        L = f.levels
        known = self.initial_set().root.idx
        frontier = known
        iterations = 0
        while frontier != 0:
            iterations += 1
            potential = 0  # image of the frontier; may rediscover old states
            for event in self.model.events:
                potential = f._union(L, potential, self._fire(event, L, frontier))
            frontier = f._difference(L, potential, known)
            known = f._union(L, known, frontier)
        return self._finish(run, known, iterations)

    # -- saturation ---------------------------------------------------------------

    def saturate(self, chained=False):
        run = self._start("saturation-chained" if chained else "saturation")
        self._loop_count = 0
        root = self.initial_set().root.idx
        result = self._sat_top(self.forest.levels, root, chained)
        return self._finish(run, result, self._loop_count)

    def _sat_top(self, k, p, chained):
        """Saturate a node of the initial diagram, children first."""
        if k == 0 or p == 0:
            return p
        f = self.forest
        cache = f._cache[k]
        hit = cache.get(("st", p))
        if hit is not None:
            return hit
        self._descend(k + 1, k)
        vec = [self._sat_top(k - 1, c, chained) for c in f._children[k][p]]
        r = self._sat_loop(k, vec, chained)
        cache[("st", p)] = r
        cache[("st", r)] = r  # a saturated node is its own fixpoint
        return r

    def _sat_fire(self, event, m, q, chained):
        """Saturated image of a saturated node under one event, m and below."""
        self.relprod_calls += 1
        if q == 0 or m == 0 or m < event.bot:
            return q
        f = self.forest
        cache = f._cache[m]
        key = ("sf", event.index, q)
        hit = cache.get(key)
        if hit is not None:
            return hit
        self._descend(m + 1, m)
        fn = event.locals.get(m)
        vec = []
        for i, qi in enumerate(f._children[m][q]):
            if qi == 0:
                continue
            j = fn.apply(i) if fn is not None else i
            if j is None:
                continue
            img = self._sat_fire(event, m - 1, qi, chained)
            if img == 0:
                continue
            f.grow_domain(m, j)
            if j >= len(vec):
                vec.extend([0] * (j + 1 - len(vec)))
            vec[j] = f._union(m - 1, vec[j], img)
        r = self._sat_loop(m, vec, chained)
        cache[key] = r
        return r

    def _sat_loop(self, k, vec, chained):
        """Bring a mutable child vector to the fixpoint of the level-k bucket."""
        self._loop_count += 1
        f = self.forest
        if not self.schedule.events_at(k) or not any(vec):
            return f._mk(k, vec)
        if chained:
            self._chained_loop(k, vec)
        else:
            self._naive_loop(k, vec)
        return f._mk(k, vec)

    def _fire_into(self, k, vec, event, i, chained):
        """Fire one event out of vec[i]; returns True if the target grew."""
        f = self.forest
        fn = event.locals[k]
        j = i - fn.take + fn.put
        img = self._sat_fire(event, k - 1, vec[i], chained)
        if img == 0:
            return False
        f.grow_domain(k, j)
        if j >= len(vec):
            vec.extend([0] * (j + 1 - len(vec)))
        merged = f._union(k - 1, vec[j], img)
        if merged == vec[j]:
            return False
        vec[j] = merged
        return True

    def _naive_loop(self, k, vec):
        """Fixed-order saturation: sweep all (event, source) pairs until stable."""
        bucket = self.schedule.events_at(k)
        changed = True
        while changed:
            changed = False
            for event in bucket:
                i = event.locals[k].take
                while i < len(vec):
                    if vec[i] != 0:
                        if self._fire_into(k, vec, event, i, chained=False):
                            changed = True
                    i += 1

    def _chained_loop(self, k, vec):
        """Graph-ordered saturation of one node.

        Each pass snapshots the dynamic firing graph and walks its
        condensation in topological order: converge the firings inside a
        component (best chaining score first, fullness refreshed after
        every union), then issue the firings that leave it toward later
        components.  Firings the graph excludes (already-full targets, or
        targets past the current domain) are swept afterwards so the
        fixpoint is exactly the fixed-order one even when domains grow.
        ``fired_at`` remembers the source node each (event, i) pair last
        fired from; re-firing from an unchanged source cannot add states,
        so such pairs are skipped instead of re-swept.
        """
        f = self.forest
        fired_at = {}

        def pending(event, i):
            return fired_at.get((event.index, i)) != vec[i]

        def fire_pair(i, j, events, log):
            grew = False
            for event in events:
                if not pending(event, i):
                    continue
                src = vec[i]
                if self._fire_into(k, vec, event, i, chained=True):
                    grew = True
                fired_at[(event.index, i)] = src
                if log is not None:
                    log.append((i, j))
            return grew

        while True:
            n_k = f.domains[k]
            arcs = self.schedule.arcs_at(k, n_k)
            edges = []
            for i, targets in arcs.items():
                if i >= len(vec) or vec[i] == 0:
                    continue
                for j in targets:
                    if j >= n_k:
                        continue
                    dst = vec[j] if j < len(vec) else 0
                    if f.is_full(k - 1, dst):
                        continue
                    edges.append((i, j))
            graph = DynamicGraph(n_k, edges)
            record = None
            if self.record_schedule:
                record = {"level": k, "n": n_k, "edges": sorted(edges),
                          "calls": [], "guard_calls": []}
                self.schedule_log.append(record)
            calls = record["calls"] if record else None

            changed = False
            for pos, component in enumerate(graph.sccs):
                members = set(component)
                while True:  # converge the intra-component firings greedily
                    best = None
                    best_score = None
                    for i in component:
                        if i >= len(vec) or vec[i] == 0:
                            continue
                        for j, events in arcs.get(i, {}).items():
                            if j not in members:
                                continue
                            dst = vec[j] if j < len(vec) else 0
                            if f.is_full(k - 1, dst):
                                continue
                            if not any(pending(ev, i) for ev in events):
                                continue
                            score = _log_score(
                                f.fullness(NodeRef(k - 1, vec[i])),
                                self._rel_fullness(k, events),
                                f.fullness(NodeRef(k - 1, dst)))
                            if (best is None or score > best_score
                                    or (score == best_score and (i, j) < best)):
                                best, best_score = (i, j), score
                    if best is None:
                        break
                    if fire_pair(*best, arcs[best[0]][best[1]], calls):
                        changed = True
                # firings leaving the component toward later ones
                cross = []
                for i in component:
                    if i >= len(vec) or vec[i] == 0:
                        continue
                    for j, events in arcs.get(i, {}).items():
                        if j >= n_k or graph.scc_index[j] <= pos:
                            continue
                        dst = vec[j] if j < len(vec) else 0
                        if f.is_full(k - 1, dst):
                            continue
                        if any(pending(ev, i) for ev in events):
                            cross.append((i, j))
                for i, j in sorted(cross):
                    if fire_pair(i, j, arcs[i][j], calls):
                        changed = True

            # guard sweep: pairs the graph excluded must still converge for
            # exactness when domains grow past a previously-full child
            guard = record["guard_calls"] if record else None
            for event in self.schedule.events_at(k):
                fn = event.locals[k]
                i = fn.take
                while i < len(vec):
                    if vec[i] != 0 and pending(event, i):
                        src = vec[i]
                        if self._fire_into(k, vec, event, i, chained=True):
                            changed = True
                        fired_at[(event.index, i)] = src
                        if guard is not None:
                            guard.append((i, i - fn.take + fn.put))
                    i += 1
            if not changed:
                break

    def _rel_fullness(self, k, events):
        """Density estimate of the relation continuation below level k.

        Per event: the product over levels below k of (enabled pairs within
        the current domain) / (domain squared), with identity rows at the
        untouched levels.  Multiple events on one pair combine as
        independent unions.  Static while the domains stay put.
        """
        key = (k, tuple(ev.index for ev in events), self.forest.domains_version)
        hit = self._relful_cache.get(key)
        if hit is not None:
            return hit
        miss = 1.0
        for event in events:
            density = 1.0
            for m in range(1, k):
                n = self.forest.domains[m]
                fn = event.locals.get(m)
                pairs = n if fn is None else max(0, n - max(fn.take, fn.put))
                density *= pairs / (n * n) if n else 0.0
            miss *= 1.0 - density
        value = 1.0 - miss
        self._relful_cache[key] = value
        return value

    # -- backward image and CTL operators -------------------------------------

    def _fire_back(self, event, k, q):
        """Preimage under one event; values past the current domain are cut
        (safe: callers intersect with a universe built inside the domains)."""
        self.relprod_calls += 1
        if q == 0 or k == 0 or k < event.bot:
            return q
        f = self.forest
        cache = f._cache[k]
        key = ("b", event.index, q)
        hit = cache.get(key)
        if hit is not None:
            return hit
        fn = event.locals.get(k)
        rev = fn.reversed() if fn is not None else None
        vec = []
        for i, qi in enumerate(f._children[k][q]):
            if qi == 0:
                continue
            j = rev.apply(i) if rev is not None else i
            if j is None or j >= f.domains[k]:
                continue
            img = self._fire_back(event, k - 1, qi)
            if img == 0:
                continue
            if j >= len(vec):
                vec.extend([0] * (j + 1 - len(vec)))
            vec[j] = f._union(k - 1, vec[j], img)
        r = f._mk(k, vec)
        cache[key] = r
        return r

    def preimage(self, stateset):
        f = self.forest
        acc = 0
        for event in self.model.events:
            acc = f._union(f.levels, acc,
                           self._fire_back(event, f.levels, stateset.root.idx))
        return StateSet(f, NodeRef(f.levels, acc))

    def ex(self, a, universe):
        """States in the universe with a successor in a."""
        return self.preimage(a.intersect(universe)).intersect(universe)

    def eu(self, a, b, universe):
        """Least fixpoint of Z = B + (A & pre(Z)), within the universe."""
        a = a.intersect(universe)
        z = b.intersect(universe)
        while True:
            grown = z.union(a.intersect(self.preimage(z)))
            if grown == z:
                return z
            z = grown

    def eg(self, a, universe):
        """Greatest fixpoint of Z = A & pre(Z), within the universe."""
        z = a.intersect(universe)
        while True:
            shrunk = z.intersect(self.preimage(z))
            if shrunk == z:
                return z
            z = shrunk


def bfs_generate(model, forest=None, node_cap=None):
    """Breadth-first symbolic generation; returns (StateSet, metrics)."""
    return SymbolicEngine(model, forest=forest, node_cap=node_cap).bfs()


def saturate(model, forest=None, node_cap=None):
    """Saturation in fixed firing order; returns (StateSet, metrics)."""
    return SymbolicEngine(model, forest=forest, node_cap=node_cap).saturate()


def chained_saturate(model, forest=None, node_cap=None):
    """Saturation in dynamic-graph chained order; returns (StateSet, metrics)."""
    engine = SymbolicEngine(model, forest=forest, node_cap=node_cap)
    return engine.saturate(chained=True)
