"""Deterministic single-process simulator of distributed generation.

N virtual workstations are stepped round-robin; "communication" is message
queues plus metric accounting, so every run is reproducible byte for byte.
Three schemes:

* ``explicit``: each workstation owns the states a partition function maps
  to it, explores its own frontier, and buffers non-owned successors into
  per-destination messages (flushed at the buffer threshold or when the
  workstation would otherwise go idle).
* ``vertical``: each workstation owns a window of the potential space,
  iterates the symbolic frontier loop on its slice, and ships non-owned
  image slices to their owners as encoded sets.
* ``horizontal``: levels are split into contiguous ranges; saturation runs
  exactly as the sequential strategy does, with every computation descent
  that crosses a range boundary charged as a request/reply pair and an
  idle wait on the requester.  Nodes live only at their level's owner, so
  nothing is ever duplicated.

Quiescence in the first two schemes is detected with a two-phase colored
token: senders and receivers turn black, a passing workstation folds its
color into the token, and the master only concludes after two consecutive
clean rounds.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .explicit import ExplicitStore, HashPartition, StateCapExceeded, TreePartition
from .mdd import MddForest, NodeRef, StateSet
from .symbolic import SymbolicEngine


class ConfigError(ValueError):
    """Invalid scenario configuration or window partition."""


@dataclass
class WorkerStats:
    states: int = 0
    nodes: int = 0
    cache_entries: int = 0
    iterations: int = 0
    msgs_sent: int = 0
    msgs_received: int = 0
    bytes_sent: int = 0
    cross_transitions: int = 0
    duplicates_received: int = 0
    boundary_requests: int = 0
    idle_steps: int = 0

    def to_dict(self):
        return {
            "states": self.states,
            "nodes": self.nodes,
            "cache_entries": self.cache_entries,
            "iterations": self.iterations,
            "msgs_sent": self.msgs_sent,
            "msgs_received": self.msgs_received,
            "bytes_sent": self.bytes_sent,
            "cross_transitions": self.cross_transitions,
            "duplicates_received": self.duplicates_received,
            "boundary_requests": self.boundary_requests,
            "idle_steps": self.idle_steps,
        }


@dataclass
class SimMetrics:
    mode: str
    n_workers: int
    state_count: str
    per_worker: list
    termination_rounds: int = 0
    duplicated_nodes: int | None = None
    steps: int = 0
    wall_time_ms: int | None = None

    def totals(self):
        out = {}
        for stats in self.per_worker:
            for key, value in stats.to_dict().items():
                out[key] = out.get(key, 0) + value
        return out

    def to_dict(self, include_timings=False):
        out = {
            "mode": self.mode,
            "N": self.n_workers,
            "state_count": self.state_count,
            "steps": self.steps,
            "termination_rounds": self.termination_rounds,
        }
        if self.duplicated_nodes is not None:
            out["duplicated_nodes"] = self.duplicated_nodes
        out["totals"] = self.totals()
        out["per_worker"] = [
            {"worker": w + 1, **stats.to_dict()}
            for w, stats in enumerate(self.per_worker)
        ]
        if include_timings and self.wall_time_ms is not None:
            out["wall_time_ms"] = self.wall_time_ms
        return out

    def to_table(self):
        columns = ["worker"] + list(self.per_worker[0].to_dict())
        rows = [[str(w + 1)] + [str(v) for v in stats.to_dict().values()]
                for w, stats in enumerate(self.per_worker)]
        rows.append(["total"] + [str(v) for v in self.totals().values()])
        widths = [max(len(col), *(len(row[i]) for row in rows))
                  for i, col in enumerate(columns)]
        lines = ["  ".join(col.rjust(widths[i]) for i, col in enumerate(columns))]
        for row in rows:
            lines.append("  ".join(cell.rjust(widths[i]) for i, cell in enumerate(row)))
        return "\n".join(lines)


class SimCluster:
    """Message plumbing and termination token shared by the schemes."""

    def __init__(self, n_workers, delay_seed=None, max_delay=3):
        self.n = n_workers
        self.now = 0
        self.inboxes = [deque() for _ in range(n_workers + 1)]  # 1-based
        self.pending = []  # (deliver_at, seq, dst, payload)
        self._seq = 0
        self.stats = [WorkerStats() for _ in range(n_workers)]
        self._rng = random.Random(delay_seed) if delay_seed is not None else None
        self._max_delay = max_delay
        # two-phase colored token; worker 1 is the master
        self.token_holder = 1
        self.token_color = "white"
        self.colors = ["white"] * (n_workers + 1)
        self.clean_rounds = 0
        self.rounds = 0
        self.terminated = False
        self.posted = 0
        self.consumed = 0

    def post(self, src, dst, payload, size_bytes):
        delay = self._rng.randint(0, self._max_delay) if self._rng else 0
        self._seq += 1
        self.pending.append((self.now + 1 + delay, self._seq, dst, payload))
        self.stats[src - 1].msgs_sent += 1
        self.stats[src - 1].bytes_sent += size_bytes
        self.colors[src] = "black"
        self.posted += 1

    def deliver_due(self):
        due = [m for m in self.pending if m[0] <= self.now]
        if due:
            self.pending = [m for m in self.pending if m[0] > self.now]
            for _, _, dst, payload in sorted(due):
                self.inboxes[dst].append(payload)

    def receive(self, w):
        payload = self.inboxes[w].popleft()
        self.stats[w - 1].msgs_received += 1
        self.colors[w] = "black"
        self.consumed += 1
        return payload

    def has_mail(self, w):
        return bool(self.inboxes[w])

    def pass_token(self, w):
        """Pass from an idle workstation; the master evaluates the round."""
        if w == 1:
            self.rounds += 1
            if self.token_color == "white" and self.colors[1] == "white":
                self.clean_rounds += 1
                if self.clean_rounds >= 2:
                    self.terminated = True
                    return
            else:
                self.clean_rounds = 0
            self.token_color = "white"
            self.colors[1] = "white"
            self.token_holder = 2 if self.n > 1 else 1
            if self.n == 1:
                # degenerate ring: a round is a self-pass
                return
        else:
            if self.colors[w] == "black":
                self.token_color = "black"
                self.colors[w] = "white"
            self.token_holder = w % self.n + 1

    def quiescent(self):
        """Omniscient observer: nothing queued or in flight anywhere."""
        return not self.pending and all(not box for box in self.inboxes)


def detect_termination(cluster):
    """Verdict of the token protocol (never true with messages in flight)."""
    return cluster.terminated


def _run_scheduler(cluster, worker_turn, extra_idle_check=None, step_cap=50_000_000):
    """Round-robin loop: deliver due mail, let one workstation act, and let
    idle workstations circulate the token.  ``worker_turn(w)`` returns True
    when the workstation did work this turn."""
    w = 1
    while not cluster.terminated:
        cluster.now += 1
        if cluster.now > step_cap:
            raise RuntimeError("simulation exceeded the step cap")
        cluster.deliver_due()
        worked = worker_turn(w)
        if not worked:
            idle = not cluster.has_mail(w)
            if idle and extra_idle_check is not None:
                idle = extra_idle_check(w)
            if idle:
                cluster.stats[w - 1].idle_steps += 1
                if cluster.token_holder == w:
                    cluster.pass_token(w)
        w = w % cluster.n + 1


# -- explicit scheme ---------------------------------------------------------


def run_explicit(model, partition, n_workers, buffer_size=64,
                 state_cap=None, delay_seed=None,
                 rebalance_threshold=2.0):
    """Distributed explicit generation under a partition function.

    Returns (stores, metrics): per-workstation visited sets (disjoint, and
    their union is the reachable set) plus the accounting.
    """
    cluster = SimCluster(n_workers, delay_seed=delay_seed)
    stores = [ExplicitStore() for _ in range(n_workers + 1)]  # 1-based
    outboxes = [[[] for _ in range(n_workers + 1)] for _ in range(n_workers + 1)]
    levels = model.levels
    is_tree = isinstance(partition, TreePartition)
    total_states = 0

    def owner_loads():
        return {w: len(stores[w].visited) for w in range(1, n_workers + 1)}

    def add_state(w, state):
        nonlocal total_states
        if state in stores[w].visited:
            return False
        stores[w].add(state)
        cluster.stats[w - 1].states += 1
        total_states += 1
        if is_tree:
            partition.note_insert(state)
        if state_cap is not None and total_states > state_cap:
            raise StateCapExceeded(f"visited exceeds cap {state_cap}")
        return True

    for state in model.initial_states:
        add_state(partition.route(state), state)

    def flush(w, dst):
        batch = outboxes[w][dst]
        if batch:
            outboxes[w][dst] = []
            cluster.post(w, dst, ("states", batch), len(batch) * levels * 8)

    def turn(w):
        stats = cluster.stats[w - 1]
        store = stores[w]
        if store.frontier:
            state = store.frontier.popleft()
            for event in model.events:
                for succ in model.fire_event(event, state):
                    dst = partition.route(succ)
                    if dst == w:
                        add_state(w, succ)
                    else:
                        stats.cross_transitions += 1
                        outboxes[w][dst].append(succ)
                        if len(outboxes[w][dst]) >= buffer_size:
                            flush(w, dst)
            return True
        if cluster.has_mail(w):
            kind, batch = cluster.receive(w)
            for state in batch:
                dst = partition.route(state)
                if dst != w:
                    # ownership moved while the state was in flight; forward
                    cluster.post(w, dst, ("states", [state]), levels * 8)
                elif not add_state(w, state):
                    stats.duplicates_received += 1
            return True
        if any(outboxes[w][dst] for dst in range(1, n_workers + 1)):
            for dst in range(1, n_workers + 1):
                flush(w, dst)
            return True
        return False

    def maybe_rebalance(w):
        # tree-based ownership: the master checks the balance when idle
        if not is_tree or w != 1:
            return True
        loads = owner_loads()
        hi, lo = max(loads.values()), min(loads.values())
        if hi == 0 or (lo > 0 and hi / lo < rebalance_threshold):
            return True
        moves = partition.rebalance(loads, threshold=rebalance_threshold)
        if not moves:
            return True
        for leaf, old, new in moves:
            partition.apply_move(leaf, new)
            moved = partition.states_in_leaf(leaf, stores[old].visited)
            for state in moved:
                stores[old].visited.discard(state)
                stores[new].visited.add(state)
            moved_frontier = [s for s in stores[old].frontier
                              if partition.leaf_of(s) == leaf]
            stores[old].frontier = deque(
                s for s in stores[old].frontier if partition.leaf_of(s) != leaf)
            for state in sorted(moved_frontier):
                stores[new].frontier.append(state)
            cluster.stats[old - 1].states -= len(moved)
            cluster.stats[new - 1].states += len(moved)
            cluster.post(old, new, ("migrate", ()), len(moved) * levels * 8)
        return False  # not idle: the move counts as activity

    _run_scheduler(cluster, turn, extra_idle_check=maybe_rebalance)

    assert cluster.quiescent(), "terminated with messages in flight"
    assert all(not stores[w].frontier for w in range(1, n_workers + 1))
    seen = set()
    for w in range(1, n_workers + 1):
        overlap = seen & stores[w].visited
        assert not overlap, f"states owned twice: {sorted(overlap)[:3]}"
        seen |= stores[w].visited

    metrics = SimMetrics(
        mode="explicit",
        n_workers=n_workers,
        state_count=str(total_states),
        per_worker=cluster.stats,
        termination_rounds=cluster.rounds,
        steps=cluster.now,
    )
    return stores[1:], metrics


# -- vertical scheme ---------------------------------------------------------


class ValueWindows:
    """Potential-space windows keyed by value ranges of a few top variables.

    ``boundaries`` are strictly increasing tuples over the selected levels'
    values (lexicographic); window w holds the states whose selected tuple
    falls between boundary w-1 and boundary w.  Ranges are open at the rims,
    so the partition stays total when domains grow.
    """

    def __init__(self, levels, boundaries, n_windows):
        levels = tuple(levels)
        if not levels or any(levels[i] - 1 != levels[i + 1]
                             for i in range(len(levels) - 1)):
            raise ConfigError("split levels must be contiguous, top first")
        if len(boundaries) != n_windows - 1:
            raise ConfigError("need exactly N-1 window boundaries")
        if any(len(b) != len(levels) for b in boundaries):
            raise ConfigError("boundary arity must match the split levels")
        if sorted(set(map(tuple, boundaries))) != [tuple(b) for b in boundaries]:
            raise ConfigError("window boundaries must be strictly increasing")
        self.levels = levels
        self.boundaries = [tuple(b) for b in boundaries]
        self.n_windows = n_windows
        self._mat_cache = {}

    @classmethod
    def split_top(cls, model, n_windows):
        """Evenly split the value tuples of a short top-variable prefix."""
        levels = []
        combos = 1
        for k in range(model.levels, 0, -1):
            levels.append(k)
            combos *= model.domains[k]
            if combos >= n_windows:
                break
        if combos < n_windows:
            raise ConfigError(
                f"potential space has only {combos} top-value combinations, "
                f"cannot form {n_windows} windows")
        tuples = [()]
        for k in levels:
            tuples = [t + (v,) for t in tuples for v in range(model.domains[k])]
        boundaries = [tuples[i * len(tuples) // n_windows]
                      for i in range(1, n_windows)]
        return cls(levels, boundaries, n_windows)

    def window_of(self, selected_tuple):
        from bisect import bisect_right
        return bisect_right(self.boundaries, tuple(selected_tuple)) + 1

    def route(self, model, state):
        return self.window_of(tuple(model.value_at(state, k) for k in self.levels))

    def materialize(self, forest, w):
        """Window w as a set over the current domains (cached per growth)."""
        if self.levels[0] != forest.levels:
            raise ConfigError("split levels must start at the top level")
        key = (w, forest.domains_version)
        hit = self._mat_cache.get(key)
        if hit is not None:
            return StateSet(forest, NodeRef(forest.levels, hit))
        below_top = min(self.levels) - 1
        full_below = 1
        for k in range(1, below_top + 1):
            full_below = forest._mk(k, [full_below] * forest.domains[k])
        combos = [()]
        for k in self.levels:
            combos = [t + (v,) for t in combos for v in range(forest.domains[k])]
        root = 0
        for combo in combos:
            if self.window_of(combo) != w:
                continue
            idx = full_below
            for pos in range(len(self.levels) - 1, -1, -1):
                k = self.levels[pos]
                value = combo[pos]
                vec = [0] * (value + 1)
                vec[value] = idx
                idx = forest._mk(k, vec)
            root = forest._union(forest.levels, root, idx)
        self._mat_cache[key] = root
        return StateSet(forest, NodeRef(forest.levels, root))


def check_window_partition(forest, window_sets):
    """Spec precondition: pairwise disjoint and jointly covering."""
    union = forest.empty_set()
    for i, wset in enumerate(window_sets):
        for other in window_sets[i + 1:]:
            if not wset.intersect(other).is_empty():
                raise ConfigError("windows overlap")
        union = union.union(wset)
    if union != forest.full_set():
        raise ConfigError("windows do not cover the potential space")


def run_vertical_bfs(model, windows, n_workers, node_cap=None, delay_seed=None):
    """Distributed symbolic frontier iteration under state-space windows.

    ``windows`` is a ValueWindows or a list of N StateSets over a shared
    forest (checked to partition the potential space).  Returns
    (engine, per-worker sets, union set, metrics).
    """
    raw_windows = not isinstance(windows, ValueWindows)
    if raw_windows:
        if len(windows) != n_workers:
            raise ConfigError("need exactly one window per workstation")
        forest = windows[0].forest
        engine = SymbolicEngine(model, forest=forest)

        def window_set(w):
            return windows[w - 1]
    else:
        engine = SymbolicEngine(model, node_cap=node_cap)
        forest = engine.forest

        def window_set(w):
            return windows.materialize(forest, w)

    check_window_partition(forest, [window_set(w) for w in range(1, n_workers + 1)])

    cluster = SimCluster(n_workers, delay_seed=delay_seed)
    init = engine.initial_set()
    known = [None] * (n_workers + 1)
    frontier = [None] * (n_workers + 1)
    for w in range(1, n_workers + 1):
        known[w] = init.intersect(window_set(w))
        frontier[w] = known[w]

    def turn(w):
        stats = cluster.stats[w - 1]
        if not frontier[w].is_empty():
            stats.iterations += 1
            image = engine.image(frontier[w])
            if raw_windows:
                # fixed window sets cannot absorb domain growth; refuse leaks
                leak = image
                for v in range(1, n_workers + 1):
                    leak = leak.difference(window_set(v))
                if not leak.is_empty():
                    raise ConfigError(
                        "windows no longer cover the grown potential space")
            own = image.intersect(window_set(w)).difference(known[w])
            known[w] = known[w].union(own)
            frontier[w] = own
            for v in range(1, n_workers + 1):
                if v == w:
                    continue
                slice_v = image.intersect(window_set(v))
                if not slice_v.is_empty():
                    nodes = forest.subgraph_nodes(slice_v.root)
                    cluster.post(w, v, ("set", slice_v.root.idx), nodes * 8)
            return True
        if cluster.has_mail(w):
            kind, root_idx = cluster.receive(w)
            received = StateSet(forest, NodeRef(forest.levels, root_idx))
            fresh = received.intersect(window_set(w)).difference(known[w])
            if fresh.is_empty():
                stats.duplicates_received += 1
            else:
                known[w] = known[w].union(fresh)
                frontier[w] = frontier[w].union(fresh)
            return True
        return False

    _run_scheduler(cluster, turn)

    assert cluster.quiescent(), "terminated with messages in flight"
    union = forest.empty_set()
    for w in range(1, n_workers + 1):
        assert known[w].difference(window_set(w)).is_empty(), \
            "workstation stores states outside its window"
        union = union.union(known[w])

    duplicated = sum(
        forest.subgraph_nodes(known[w].root) for w in range(1, n_workers + 1)
    ) - forest.subgraph_nodes(union.root)
    for w in range(1, n_workers + 1):
        cluster.stats[w - 1].states = known[w].count()
        cluster.stats[w - 1].nodes = forest.subgraph_nodes(known[w].root)

    metrics = SimMetrics(
        mode="vertical",
        n_workers=n_workers,
        state_count=str(union.count()),
        per_worker=cluster.stats,
        termination_rounds=cluster.rounds,
        duplicated_nodes=duplicated,
        steps=cluster.now,
    )
    return engine, known[1:], union, metrics


# -- horizontal scheme --------------------------------------------------------


@dataclass(frozen=True)
class LevelRange:
    """Contiguous level interval owned by one workstation."""

    worker: int
    top: int
    bot: int


def equal_ranges(levels, n_workers):
    """Split levels into contiguous ranges, workstation 1 on top."""
    if n_workers > levels:
        raise ConfigError("more workstations than levels")
    base, extra = divmod(levels, n_workers)
    ranges = []
    top = levels
    for w in range(1, n_workers + 1):
        size = base + (1 if w <= extra else 0)
        ranges.append(LevelRange(w, top, top - size + 1))
        top -= size
    return ranges


def validate_ranges(ranges, levels):
    if [r.worker for r in ranges] != list(range(1, len(ranges) + 1)):
        raise ConfigError("ranges must be listed as workstations 1..N")
    top = levels
    for r in ranges:
        if r.top != top or r.bot > r.top or r.bot < 1:
            raise ConfigError("ranges must tile the levels top-down")
        top = r.bot - 1
    if top != 0:
        raise ConfigError("ranges do not cover all levels")


def run_horizontal_saturation(model, ranges, node_cap=None):
    """Sequential saturation with level-range ownership accounting.

    Exactly one workstation is ever active; each computation descent that
    crosses a range boundary charges a request/reply pair and an idle wait
    on the requester.  Returns (result set, generation metrics, sim metrics).
    """
    validate_ranges(ranges, model.levels)
    n_workers = len(ranges)
    owner = {}
    for r in ranges:
        for k in range(r.bot, r.top + 1):
            owner[k] = r.worker

    engine = SymbolicEngine(model, node_cap=node_cap)
    stats = [WorkerStats() for _ in range(n_workers)]
    requests = 0

    def hook(from_level, to_level):
        nonlocal requests
        if from_level > model.levels:
            return  # top-of-operation call, no requester above
        src = owner[from_level]
        dst = owner[to_level]
        if src == dst:
            return
        requests += 1
        stats[src - 1].boundary_requests += 1
        stats[src - 1].msgs_sent += 1          # the request
        stats[src - 1].bytes_sent += 24
        stats[src - 1].idle_steps += 1         # waiting for the reply
        stats[dst - 1].msgs_received += 1
        stats[dst - 1].msgs_sent += 1          # the reply
        stats[dst - 1].bytes_sent += 8
        stats[src - 1].msgs_received += 1

    engine.descend_hook = hook
    run = engine._start("saturation")
    engine._loop_count = 0
    root_idx = engine._sat_top(model.levels, engine.initial_set().root.idx, False)
    cache_sizes = [len(engine.forest._cache[k])
                   for k in range(model.levels + 1)]
    result, gen_metrics = engine._finish(run, root_idx, engine._loop_count)

    forest = engine.forest
    for k in range(1, model.levels + 1):
        stats[owner[k] - 1].nodes += len(forest._children[k])
        cache_owner = owner[max(1, k - 1)]  # caches sit one level above their results
        stats[cache_owner - 1].cache_entries += cache_sizes[k]

    metrics = SimMetrics(
        mode="horizontal",
        n_workers=n_workers,
        state_count=gen_metrics.state_count,
        per_worker=stats,
        termination_rounds=0,
        steps=requests,
    )
    return result, gen_metrics, metrics


# -- scenario configuration ----------------------------------------------------


VALID_MODES = ("explicit", "vertical", "horizontal")


@dataclass
class SimConfig:
    mode: str
    n_workers: int
    partition: dict = field(default_factory=dict)
    buffer_size: int = 64
    node_cap: int | None = None
    state_cap: int | None = None
    delay_seed: int | None = None

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("scenario config must be a JSON object")
        mode = raw.get("mode")
        if mode not in VALID_MODES:
            raise ConfigError(f"mode must be one of {VALID_MODES}, got {mode!r}")
        n = raw.get("N", 1)
        if not isinstance(n, int) or n < 1:
            raise ConfigError("N must be a positive integer")
        buffer_size = raw.get("B", 64)
        if not isinstance(buffer_size, int) or buffer_size < 1:
            raise ConfigError("B must be a positive integer")
        caps = raw.get("caps", {})
        if not isinstance(caps, dict):
            raise ConfigError("caps must be an object")
        partition = raw.get("partition", {})
        if not isinstance(partition, dict):
            raise ConfigError("partition must be an object")
        return cls(
            mode=mode,
            n_workers=n,
            partition=partition,
            buffer_size=buffer_size,
            node_cap=caps.get("node_cap"),
            state_cap=caps.get("state_cap"),
            delay_seed=raw.get("delay_seed"),
        )


def build_partition(model, config):
    """Materialize the per-mode ownership structure from a scenario config."""
    spec = config.partition
    if config.mode == "explicit":
        kind = spec.get("kind", "hash")
        if kind == "hash":
            levels = spec.get("levels", "all")
            if levels == "all":
                return HashPartition.over_all_levels(model, config.n_workers)
            if (not isinstance(levels, list)
                    or not all(isinstance(k, int) and 1 <= k <= model.levels
                               for k in levels)):
                raise ConfigError("hash partition levels must be valid levels")
            return HashPartition(config.n_workers, tuple(levels))
        if kind == "tree":
            return TreePartition.build(
                model, config.n_workers,
                leaves=spec.get("leaves"),
                warmup_cap=spec.get("warmup", 1000))
        raise ConfigError(f"unknown explicit partition kind {kind!r}")
    if config.mode == "vertical":
        if "boundaries" in spec:
            levels = spec.get("levels", [model.levels])
            try:
                return ValueWindows(levels, [tuple(b) for b in spec["boundaries"]],
                                    config.n_workers)
            except TypeError as exc:
                raise ConfigError(f"bad window boundaries: {exc}") from exc
        return ValueWindows.split_top(model, config.n_workers)
    # horizontal
    if "ranges" in spec:
        raw = spec["ranges"]
        if not isinstance(raw, list):
            raise ConfigError("ranges must be a list of [top, bot] pairs")
        ranges = [LevelRange(w + 1, pair[0], pair[1]) for w, pair in enumerate(raw)]
        validate_ranges(ranges, model.levels)
        return ranges
    return equal_ranges(model.levels, config.n_workers)


def run_scenario(model, config):
    """Run one configured simulation; returns (metrics, payload) where the
    payload carries what the mode needs for verification."""
    partition = build_partition(model, config)
    if config.mode == "explicit":
        stores, metrics = run_explicit(
            model, partition, config.n_workers,
            buffer_size=config.buffer_size,
            state_cap=config.state_cap,
            delay_seed=config.delay_seed)
        return metrics, {"stores": stores, "partition": partition}
    if config.mode == "vertical":
        engine, known, union, metrics = run_vertical_bfs(
            model, partition, config.n_workers,
            node_cap=config.node_cap,
            delay_seed=config.delay_seed)
        return metrics, {"engine": engine, "known": known, "union": union}
    result, gen_metrics, metrics = run_horizontal_saturation(
        model, partition, node_cap=config.node_cap)
    return metrics, {"result": result, "gen_metrics": gen_metrics}
