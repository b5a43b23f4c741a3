import math
import random

import pytest

from helpers import (path_closure, random_conservative_net, reachable_oracle,
                     sccs_from_closure)
from mddreach import corpus
from mddreach.mdd import MddForest, NodeCapExceeded, NodeRef
from mddreach.model import parse_model
from mddreach.symbolic import (DynamicGraph, EventRel, EventSchedule,
                               SymbolicEngine, bfs_generate, chaining_score,
                               chained_saturate, firing_schedule, saturate)


class TestBfs:
    def test_no_events(self):
        m = parse_model("place A B\ninit A=1\n")
        result, metrics = bfs_generate(m)
        assert result.tuples() == [(1, 0)]
        assert metrics.iterations == 1

    def test_toggle_two_iterations(self, toggle):
        result, metrics = bfs_generate(toggle)
        assert result.count() == 2
        assert metrics.iterations == 2  # second pass finds nothing new

    def test_philosophers_matches_explicit_oracle(self, phils3):
        expected = reachable_oracle(phils3)
        result, _ = bfs_generate(parse_model(corpus.philosophers(3)))
        assert set(result.tuples()) == expected

    def test_node_cap_signals_explosion(self):
        m = parse_model(corpus.independent_toggles(20))
        with pytest.raises(NodeCapExceeded):
            bfs_generate(m, node_cap=10)


class TestSaturate:
    def test_no_events(self):
        m = parse_model("place A\ninit A=2\n")
        result, _ = saturate(m)
        assert result.tuples() == [(2,)]

    def test_independent_toggles_closed_form(self):
        m = parse_model(corpus.independent_toggles(40))
        result, metrics = saturate(m)
        assert result.count() == 2 ** 40
        assert metrics.peak_nodes < 10_000

    def test_root_identical_to_bfs(self, small_model):
        _, m = small_model
        engine = SymbolicEngine(m)
        b, _ = engine.bfs()
        s, _ = engine.saturate()
        assert b.root == s.root

    def test_saturation_is_a_local_fixpoint(self, small_model):
        """Applying any single event to the result adds nothing."""
        _, m = small_model
        engine = SymbolicEngine(m)
        result, _ = engine.saturate()
        for event in m.events:
            image = engine.image(result, events=[event])
            assert image.difference(result).is_empty()


class TestChained:
    def test_matches_saturate_on_corpus(self, small_model):
        _, m = small_model
        engine = SymbolicEngine(m)
        s, _ = engine.saturate()
        c, _ = engine.saturate(chained=True)
        assert s.root == c.root

    def test_matches_on_random_nets(self):
        rng = random.Random(21)
        for _ in range(25):
            text = random_conservative_net(rng)
            engine = SymbolicEngine(parse_model(text))
            s, _ = engine.saturate()
            c, _ = engine.saturate(chained=True)
            assert s.root == c.root, text

    def test_call_log_respects_condensation(self, phils3):
        engine = SymbolicEngine(phils3, record_schedule=True)
        engine.saturate(chained=True)
        assert engine.schedule_log, "no schedules recorded"
        for record in engine.schedule_log:
            check_schedule_legality(record)

    def test_acyclic_chain_order(self):
        """With arcs 0->1->2 every call out of 0 precedes calls out of 1,
        which precede calls out of 2 (each source converges before the next
        component starts)."""
        m = parse_model(
            "place HI LO\n"
            "init LO=0\n"
            "trans a: take LO=0 HI=1 put LO=1 HI=1\n"
            "trans b: take LO=1 HI=1 put LO=2 HI=1\n")
        # give HI a token so the events are enabled, Top(a)=Top(b)=2
        m.initial_states = [(1, 0)]
        m.domains[2] = 2
        engine = SymbolicEngine(m, record_schedule=True)
        result, _ = engine.saturate(chained=True)
        assert set(result.tuples()) == {(1, 0), (1, 1), (1, 2)}
        level1 = [r for r in engine.schedule_log if r["level"] == 1 and r["calls"]]
        assert level1
        calls = level1[0]["calls"]
        sources = [i for (i, _) in calls]
        assert sources == sorted(sources)

    def test_chaining_score_formula(self):
        assert chaining_score(16, 0.5, 0.25, 0.5) == pytest.approx(1.0)

    def test_chaining_inclusion_property(self):
        """X + Na(X) + Nb(X) is contained in X + Na(X) + Nb(X + Na(X))."""
        rng = random.Random(22)
        for _ in range(60):
            m = parse_model(random_conservative_net(rng, max_levels=4))
            if len(m.events) < 2:
                continue
            engine = SymbolicEngine(m)
            forest = engine.forest
            universe = [
                tuple(rng.randrange(0, forest.domains[m.levels - p])
                      for p in range(m.levels))
                for _ in range(rng.randint(1, 10))]
            x = forest.from_tuples(
                tuple(min(v, forest.domains[m.levels - p] - 1)
                      for p, v in enumerate(t)) for t in universe)
            alpha, beta = rng.sample(m.events, 2)
            na = engine.image(x, events=[alpha])
            nb = engine.image(x, events=[beta])
            left = x.union(na).union(nb)
            nb_chained = engine.image(x.union(na), events=[beta])
            right = x.union(na).union(nb_chained)
            assert left.difference(right).is_empty()

    def test_call_count_not_worse_on_ring_family(self):
        for k in (8, 16, 32):
            _, naive = saturate(parse_model(corpus.ring(k)))
            _, chained = chained_saturate(parse_model(corpus.ring(k)))
            assert chained.relprod_calls <= naive.relprod_calls
            assert chained.state_count == naive.state_count == str(k)


def check_schedule_legality(record):
    """Independent oracle: calls must follow the snapshot's condensation.

    For components A strictly before B (a path A -> B exists), every call
    into A must precede every call out of B.
    """
    n, edges, calls = record["n"], record["edges"], record["calls"]
    assert n <= 64, "oracle meant for small graphs"
    reach = path_closure(n, edges)
    comps, member = sccs_from_closure(n, reach)
    last_target = {}
    first_source = {}
    for pos, (i, j) in enumerate(calls):
        first_source.setdefault(member[i], pos)
        last_target[member.get(j, -1)] = pos
    for a in range(len(comps)):
        for b in range(len(comps)):
            if a == b or a not in last_target or b not in first_source:
                continue
            va, vb = comps[a][0], comps[b][0]
            if reach[va][vb] and not reach[vb][va]:  # a strictly before b
                assert last_target[a] <= first_source[b], (
                    f"call out of component {b} before component {a} converged")


class TestDynamicGraph:
    def test_condensation_topological(self):
        g = DynamicGraph(4, [(0, 1), (1, 2), (2, 1), (3, 3)])
        flat = [set(c) for c in g.sccs]
        assert {1, 2} in flat
        assert g.scc_index[0] < g.scc_index[1] == g.scc_index[2]

    def test_edges_checkable(self):
        edges = [(0, 0), (0, 1), (1, 2), (2, 1), (2, 2), (3, 3)]
        g = DynamicGraph(4, edges)
        assert g.has_path(0, 2)
        assert not g.has_path(3, 0)
        assert g.has_path(3, 3)  # self loop

    def test_matches_brute_force_sccs(self):
        rng = random.Random(23)
        for _ in range(40):
            n = rng.randint(1, 10)
            edges = {(rng.randrange(n), rng.randrange(n))
                     for _ in range(rng.randint(0, 2 * n))}
            g = DynamicGraph(n, edges)
            reach = path_closure(n, edges)
            comps, member = sccs_from_closure(n, reach)
            got = {frozenset(c) for c in g.sccs}
            want = {frozenset(c) for c in comps}
            assert got == want
            # topological: no edge goes from a later to an earlier component
            for (i, j) in edges:
                assert g.scc_index[i] <= g.scc_index[j]


class TestFiringSchedule:
    def test_empty_relation(self):
        f = MddForest(2, domains=[0, 4, 4])
        p = f.from_tuples([(0, 0), (1, 1)]).root
        order, safe = firing_schedule(f, p, {})
        assert order == []
        assert safe == set()

    def test_single_edge(self):
        f = MddForest(2, domains=[0, 4, 4])
        p = f.from_tuples([(0, 0), (1, 1)]).root
        order, safe = firing_schedule(f, p, {0: {1}})
        assert order == [(0, 1)]
        assert safe == set()  # only one firing source

    def test_fig7_pattern_against_oracle(self):
        f = MddForest(2, domains=[0, 4, 4])
        p = f.from_tuples([(i, i) for i in range(4)]).root
        arcs = {0: {0, 1}, 1: {2}, 2: {1, 2}, 3: {3}}
        order, safe = firing_schedule(f, p, arcs)
        edges = [(i, j) for i, targets in arcs.items() for j in targets]
        assert sorted(order) == sorted(edges)
        reach = path_closure(4, edges)
        comps, member = sccs_from_closure(4, reach)
        seen_comp_positions = [member[i] for i, _ in order]
        # schedule follows the condensation: component positions never go
        # back to an earlier component once left
        first_seen = {}
        for pos, comp in enumerate(seen_comp_positions):
            first_seen.setdefault(comp, pos)
        for a in range(len(comps)):
            for b in range(len(comps)):
                if a == b or a not in first_seen or b not in first_seen:
                    continue
                va, vb = comps[a][0], comps[b][0]
                if reach[va][vb] and not reach[vb][va]:
                    assert first_seen[a] < first_seen[b]
        # parallel-safe pairs: sources with no path either way
        assert safe == {(0, 3), (1, 3), (2, 3)}

    def test_full_targets_are_not_scheduled(self):
        f = MddForest(2, domains=[0, 2, 2])
        full_child = f.mk_node(1, [NodeRef(0, 1), NodeRef(0, 1)])
        part_child = f.mk_node(1, [NodeRef(0, 1)])
        p = f.mk_node(2, [f.child(NodeRef(2, 0), 0).__class__(1, full_child.idx),
                          part_child])
        p = f.mk_node(2, [full_child, part_child])
        order, _ = firing_schedule(f, p, {0: {1}, 1: {0}})
        assert (1, 0) not in order  # target 0 already full
        assert (0, 1) in order


class TestEventSchedule:
    def test_buckets_partition_events(self, small_model):
        _, m = small_model
        schedule = EventSchedule(m)
        seen = []
        for level, bucket in schedule.buckets.items():
            for event in bucket:
                assert event.top == level
                seen.append(event.name)
        assert sorted(seen) == sorted(e.name for e in m.events)

    def test_arcs_rows(self, toggle):
        schedule = EventSchedule(toggle)
        arcs = schedule.arcs_at(2, 2)
        assert set(arcs[1]) == {0}  # t1 moves the top variable 1 -> 0


class TestEventRel:
    def test_image_through_rel_product(self, toggle):
        engine = SymbolicEngine(toggle)
        forest = engine.forest
        src = forest.from_tuples([(1, 0)])
        out = forest.rel_product(src.root, EventRel(toggle.events[0], 2))
        assert forest.enumerate(out) == [(0, 1)]


class TestMetrics:
    def test_fields_and_order(self, toggle):
        _, metrics = saturate(toggle)
        d = metrics.to_dict()
        assert list(d) == ["strategy", "iterations", "relprod_calls",
                           "union_calls", "peak_nodes", "final_nodes",
                           "state_count"]
        assert d["state_count"] == "2"
        timed = metrics.to_dict(include_timings=True)
        assert "wall_time_ms" in timed

    def test_final_nodes_counts_live_after_collect(self, ring10):
        result, metrics = saturate(ring10)
        assert metrics.final_nodes == result.forest.live_nodes()


class TestDomainsGrowDuringSymbolicRun:
    def test_prodcons_buffer_growth(self):
        m = parse_model(corpus.producer_consumer(3))
        engine = SymbolicEngine(m)
        bu_level = m.level_of["BU"]
        assert engine.forest.domains[bu_level] == 1
        result, _ = engine.saturate()
        assert engine.forest.domains[bu_level] == 4
        assert result.count() == 16
