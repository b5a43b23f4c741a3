"""Independent oracles and generators shared by the test modules.

Everything here recomputes results from first principles (dict/set BFS,
boolean path closure, direct arithmetic on take/put) so the engine under
test never checks itself.
"""

from __future__ import annotations

from collections import deque


def fire_oracle(model, event, state):
    """Reference semantics of one firing, straight from take/put arithmetic."""
    out = list(state)
    for level, fn in event.locals.items():
        pos = model.levels - level
        if state[pos] < fn.take:
            return None
        out[pos] = state[pos] - fn.take + fn.put
    return tuple(out)


def successors_oracle(model, state):
    out = set()
    for event in model.events:
        succ = fire_oracle(model, event, state)
        if succ is not None:
            out.add(succ)
    return out


def reachable_oracle(model, cap=200_000):
    """Set-based BFS over the oracle firing rule."""
    visited = set(model.initial_states)
    queue = deque(model.initial_states)
    while queue:
        state = queue.popleft()
        for succ in successors_oracle(model, state):
            if succ not in visited:
                visited.add(succ)
                queue.append(succ)
                if len(visited) > cap:
                    raise RuntimeError("oracle cap exceeded")
    return visited


def transition_graph_oracle(model, states):
    """Adjacency over an explicit state set, via the oracle firing rule."""
    succ = {}
    for state in states:
        succ[state] = {s for s in successors_oracle(model, state) if s in states}
    return succ


def predecessors(graph):
    pred = {s: set() for s in graph}
    for s, targets in graph.items():
        for t in targets:
            pred[t].add(s)
    return pred


def ex_oracle(graph, a):
    """States with a successor in a, on the explicit graph."""
    return {s for s, targets in graph.items() if targets & a}


def eu_oracle(graph, a, b):
    """Backward least fixpoint of B + (A & pre(Z)) on the explicit graph."""
    pred = predecessors(graph)
    result = set(b)
    queue = deque(b)
    while queue:
        t = queue.popleft()
        for s in pred[t]:
            if s in a and s not in result:
                result.add(s)
                queue.append(s)
    return result


def eg_oracle(graph, a):
    """Greatest fixpoint of A & pre(Z) on the explicit graph."""
    z = set(a)
    while True:
        keep = {s for s in z if graph[s] & z}
        if keep == z:
            return z
        z = keep


def path_closure(n, edges):
    """Boolean reachability matrix (paths of length >= 1), brute force."""
    reach = [[False] * n for _ in range(n)]
    for i, j in edges:
        reach[i][j] = True
    for mid in range(n):
        for i in range(n):
            if reach[i][mid]:
                row = reach[i]
                for j in range(n):
                    if reach[mid][j]:
                        row[j] = True
    return reach


def sccs_from_closure(n, reach):
    """SCC membership from mutual reachability (a vertex alone unless on a cycle
    with another, or looping on itself)."""
    assigned = {}
    comps = []
    for v in range(n):
        if v in assigned:
            continue
        comp = [v]
        assigned[v] = len(comps)
        for w in range(v + 1, n):
            if w not in assigned and reach[v][w] and reach[w][v]:
                comp.append(w)
                assigned[w] = len(comps)
        comps.append(comp)
    return comps, assigned


def random_conservative_net(rng, max_levels=6, max_events=8, max_tokens=3):
    """Model text for a randomly wired net that cannot gain tokens.

    Every event puts at most as many tokens as it takes, so the reachable
    space stays bounded by the initial token count spread over the places.
    """
    levels = rng.randint(2, max_levels)
    places = [f"P{i}" for i in range(1, levels + 1)]
    init = {}
    for _ in range(rng.randint(1, max_tokens)):
        p = rng.choice(places)
        init[p] = init.get(p, 0) + 1
    lines = ["place " + " ".join(places),
             "init " + " ".join(f"{p}={c}" for p, c in init.items())]
    for e in range(rng.randint(1, max_events)):
        sources = rng.sample(places, rng.randint(1, min(2, levels)))
        takes = {p: rng.randint(1, 2) for p in sources}
        total = sum(takes.values())
        puts = {}
        for _ in range(rng.randint(0, total)):
            p = rng.choice(places)
            puts[p] = puts.get(p, 0) + 1
        line = f"trans t{e}: take " + " ".join(f"{p}={c}" for p, c in takes.items())
        line += " put"
        if puts:
            line += " " + " ".join(f"{p}={c}" for p, c in puts.items())
        lines.append(line)
    return "\n".join(lines) + "\n"
