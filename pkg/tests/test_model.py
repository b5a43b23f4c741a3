import random

import pytest

from helpers import fire_oracle, successors_oracle, random_conservative_net
from mddreach import corpus
from mddreach.model import Event, LocalFn, ParseError, parse_model

SPEC_EXAMPLE = """\
place P1 P2
init P1=1
trans t1: take P1=1 put P2=1
trans t2: take P2=1 put P1=1
"""


def test_parse_basic_toggle():
    m = parse_model(SPEC_EXAMPLE)
    assert m.levels == 2
    assert m.places == ["P1", "P2"]
    assert m.level_of == {"P1": 2, "P2": 1}
    assert len(m.events) == 2
    assert m.events[0].top == 2 and m.events[1].top == 2
    assert m.initial_states == [(1, 0)]
    assert m.domains == [1, 1, 2]  # index 0 unused


def test_parse_zero_transitions():
    m = parse_model("place A B\ninit A=1\n")
    assert m.events == []
    assert m.initial_states == [(1, 0)]


def test_parse_no_init_means_zero_marking():
    m = parse_model("place A B\ntrans t: take A=1 put B=1\n")
    assert m.initial_states == [(0, 0)]


def test_parse_multiple_initial_states():
    m = parse_model("place A B\ninit A=1\ninit+ B=2\n")
    assert m.initial_states == [(1, 0), (0, 2)]
    assert m.domains[1] == 3  # B is level 1, values up to 2


def test_parse_comments_and_blanks():
    text = "# heading\n\nplace A  # trailing\ninit A=2\n"
    m = parse_model(text)
    assert m.initial_states == [(2,)]


@pytest.mark.parametrize("bad, fragment", [
    ("flace A\n", "unknown keyword"),
    ("place A\nnonsense B\n", "unknown keyword"),
    ("place A\ninit B=1\n", "undeclared place"),
    ("place A\ntrans t: take B=1 put\n", "undeclared place"),
    ("place A\ninit A=-1\n", "negative"),
    ("place A\ninit A=1\ninit A=2\n", "second init"),
    ("place A\ninit+ A=1\n", "init+ requires"),
    ("place A\ntrans t: put A=1\n", "expected 'take'"),
    ("place A\ntrans t: take A=1\n", "expected 'put'"),
    ("place A\ntrans t: take put\n", "touches no places"),
    ("place A A\n", "duplicate place"),
    ("place A\ninit A=1 A=2\n", "repeated"),
    ("place A\ninit A\n", "expected <place>=<nat>"),
    ("", "no places"),
    ("place A\ninit A=1\nplace B\n", "must precede"),
])
def test_parse_errors(bad, fragment):
    with pytest.raises(ParseError) as err:
        parse_model(bad)
    assert fragment in str(err.value)


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as err:
        parse_model("place A\ninit A=1\ntrans t: take A=oops put\n")
    assert err.value.line == 3
    assert "line 3" in str(err.value)


def test_ring_levels_and_roundtrip():
    m = parse_model(corpus.ring(10))
    assert len(m.events) == 10
    assert all(len(e.locals) == 2 for e in m.events)
    # follow the token all the way around: 10 distinct states, then back
    state = m.initial_states[0]
    seen = [state]
    for _ in range(10):
        succs = m.next_states(state)
        assert len(succs) == 1
        state = next(iter(succs))
        seen.append(state)
    assert state == m.initial_states[0]
    assert len(set(seen)) == 10


def test_fire_event_enabled_and_disabled(toggle):
    t1, t2 = toggle.events
    assert toggle.fire_event(t1, (1, 0)) == {(0, 1)}
    assert toggle.fire_event(t1, (0, 1)) == set()
    assert toggle.fire_event(t2, (0, 1)) == {(1, 0)}


def test_fire_event_grows_domains():
    m = parse_model("place A B\ninit A=3\ntrans t: take A=1 put B=1\n")
    assert m.domains[1] == 1  # B starts with only value 0
    state = (3, 0)
    for expected in (1, 2, 3):
        (state,) = m.fire_event(m.events[0], state)
        assert m.domains[1] == expected + 1
    assert state == (0, 3)
    assert m.fire_event(m.events[0], state) == set()


def test_next_states_toggle(toggle):
    assert toggle.next_states((1, 0)) == {(0, 1)}


def test_next_states_no_events():
    m = parse_model("place A\ninit A=1\n")
    assert m.next_states((1,)) == set()


def test_next_states_matches_per_event_oracle(phils3):
    state = phils3.initial_states[0]
    assert phils3.next_states(state) == successors_oracle(phils3, state)


def test_locality_and_determinism_random_models():
    rng = random.Random(7)
    for _ in range(25):
        m = parse_model(random_conservative_net(rng))
        for _ in range(10):
            state = tuple(rng.randrange(0, 3) for _ in range(m.levels))
            for event in m.events:
                succs = m.fire_event(event, state)
                assert len(succs) <= 1  # plain nets are deterministic per event
                oracle = fire_oracle(m, event, state)
                assert succs == ({oracle} if oracle is not None else set())
                for succ in succs:
                    for k in range(1, m.levels + 1):
                        if k not in event.locals:
                            assert succ[m.levels - k] == state[m.levels - k]


def test_domains_monotone_under_firing():
    rng = random.Random(11)
    m = parse_model(random_conservative_net(rng))
    before = list(m.domains)
    state = m.initial_states[0]
    for _ in range(50):
        succs = m.next_states(state)
        assert all(m.domains[k] >= before[k] for k in range(1, m.levels + 1))
        before = list(m.domains)
        if not succs:
            break
        state = min(succs)


def test_top_matches_reconstruction(small_model):
    _, m = small_model
    for event in m.events:
        assert event.top == max(event.locals)
        assert event.bot == min(event.locals)


def test_event_rejects_empty_locals():
    with pytest.raises(ValueError):
        Event("t", {})


def test_localfn_semantics():
    fn = LocalFn(2, 1)
    assert fn.apply(1) is None
    assert fn.apply(2) == 1
    assert fn.apply(5) == 4
    assert fn.reversed() == LocalFn(1, 2)
