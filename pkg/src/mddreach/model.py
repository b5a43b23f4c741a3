"""Place/transition Petri nets as structured discrete-state models.

A model has L state variables, one per place.  The first declared place is
the top variable (level L), the last one is level 1.  A global state is a
tuple ``(x_L, ..., x_1)``; component ``state[levels - k]`` is the value of
the level-k variable.  Each transition factors into per-level local
functions (consume ``take`` tokens, add ``put`` tokens), so its effect on a
state is the independent product of its local effects.

Per-level domain sizes are not known up front: they start at one past the
largest initial marking and grow as firing discovers larger values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

State = tuple[int, ...]


class ParseError(ValueError):
    """Malformed model file; carries the offending 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class LocalFn:
    """Local effect of one event at one level: i -> i - take + put if i >= take."""

    take: int
    put: int

    def apply(self, i):
        if i < self.take:
            return None
        return i - self.take + self.put

    def reversed(self):
        # Backward local function: preimages of j are j + take - put,
        # defined when j >= put.  Exactly the same shape with take/put swapped.
        return LocalFn(self.put, self.take)


@dataclass
class Event:
    """A transition with its per-level local functions.

    ``locals`` maps each touched level to a LocalFn and is kept in
    descending level order.  ``top``/``bot`` are the highest and lowest
    touched levels; ``index`` is the position in the model's event list.
    """

    name: str
    locals: dict[int, LocalFn]
    index: int = 0
    top: int = field(init=False)
    bot: int = field(init=False)

    def __post_init__(self):
        if not self.locals:
            raise ValueError(f"event {self.name!r} touches no levels")
        self.locals = dict(sorted(self.locals.items(), reverse=True))
        self.top = max(self.locals)
        self.bot = min(self.locals)


@dataclass
class Model:
    """A parsed net: places, growable domains, initial states and events."""

    places: list[str]                  # places[0] is level L
    level_of: dict[str, int]
    domains: list[int]                 # indexed by level, entry 0 unused
    initial_states: list[State]
    events: list[Event]

    @property
    def levels(self):
        return len(self.places)

    def place_at_level(self, k):
        return self.places[self.levels - k]

    def value_at(self, state, level):
        return state[self.levels - level]

    def grow_domain(self, level, value):
        if value >= self.domains[level]:
            self.domains[level] = value + 1

    def fire_event(self, event, state):
        """States reached by firing ``event`` in ``state`` (empty or singleton).

        Components at levels the event does not touch are left unchanged.
        Domains grow to cover newly produced component values.
        """
        if len(state) != self.levels:
            raise ValueError("state length does not match model levels")
        comps = None
        for level, fn in event.locals.items():
            j = fn.apply(state[self.levels - level])
            if j is None:
                return set()
            if comps is None:
                comps = list(state)
            comps[self.levels - level] = j
        if comps is None:
            return {state}
        for level in event.locals:
            self.grow_domain(level, comps[self.levels - level])
        return {tuple(comps)}

    def next_states(self, state):
        """Union of fire_event over all events; empty for a dead state."""
        out = set()
        for event in self.events:
            out |= self.fire_event(event, state)
        return out


_NAME_RE = re.compile(r"[A-Za-z_]\w*\Z")
_ASSIGN_RE = re.compile(r"([A-Za-z_]\w*)=(-?\d+)\Z")


def _parse_assignments(tokens, level_of, lineno, what):
    """Parse ``name=nat`` tokens into a place->count dict."""
    out = {}
    for tok in tokens:
        m = _ASSIGN_RE.match(tok)
        if not m:
            raise ParseError(f"expected <place>=<nat> in {what}, got {tok!r}", lineno)
        name, count = m.group(1), int(m.group(2))
        if name not in level_of:
            raise ParseError(f"undeclared place {name!r} in {what}", lineno)
        if count < 0:
            raise ParseError(f"negative count for place {name!r} in {what}", lineno)
        if name in out:
            raise ParseError(f"place {name!r} repeated in {what}", lineno)
        out[name] = count
    return out


def parse_model(text):
    """Parse the line-oriented model format into a Model.

    Grammar (one directive per line, ``#`` starts a comment):

        place <name> [<name> ...]      declaration order defines levels,
                                       first declared place = level L
        init <place>=<nat> ...         the first initial state (omitted
                                       places are 0; at most one such line)
        init+ <place>=<nat> ...        one additional initial state per line
        trans <name>: take <place>=<nat> ... put <place>=<nat> ...

    A model with no ``init`` line has the all-zero marking as its single
    initial state.  Unknown keywords are rejected.
    """
    places: list[str] = []
    level_of: dict[str, int] = {}
    init_markings: list[dict[str, int]] = []
    events: list[Event] = []
    body_seen = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]

        if keyword == "place":
            if body_seen:
                raise ParseError("place lines must precede init/trans lines", lineno)
            if len(tokens) == 1:
                raise ParseError("place line declares no places", lineno)
            for name in tokens[1:]:
                if not _NAME_RE.match(name):
                    raise ParseError(f"bad place name {name!r}", lineno)
                if name in level_of:
                    raise ParseError(f"duplicate place {name!r}", lineno)
                level_of[name] = 0
                places.append(name)
            continue

        if keyword not in ("init", "init+", "trans"):
            raise ParseError(f"unknown keyword {keyword!r}", lineno)

        if not body_seen:
            # place declarations are complete; levels are now fixed
            if not places:
                raise ParseError("no places declared", lineno)
            body_seen = True
            for pos, name in enumerate(places):
                level_of[name] = len(places) - pos

        if keyword in ("init", "init+"):
            if keyword == "init" and init_markings:
                raise ParseError("second init line (use init+ for more states)", lineno)
            if keyword == "init+" and not init_markings:
                raise ParseError("init+ requires a preceding init line", lineno)
            init_markings.append(_parse_assignments(tokens[1:], level_of, lineno, keyword))

        elif keyword == "trans":
            if len(tokens) < 2 or not tokens[1].endswith(":"):
                raise ParseError("expected 'trans <name>:'", lineno)
            name = tokens[1][:-1]
            if not _NAME_RE.match(name):
                raise ParseError(f"bad transition name {name!r}", lineno)
            rest = tokens[2:]
            if not rest or rest[0] != "take":
                raise ParseError("expected 'take' after transition name", lineno)
            try:
                put_at = rest.index("put")
            except ValueError:
                raise ParseError("expected 'put' in transition", lineno) from None
            takes = _parse_assignments(rest[1:put_at], level_of, lineno, f"trans {name}")
            puts = _parse_assignments(rest[put_at + 1:], level_of, lineno, f"trans {name}")
            fns = {}
            for place in {**takes, **puts}:
                fn = LocalFn(takes.get(place, 0), puts.get(place, 0))
                if fn.take == 0 and fn.put == 0:
                    continue  # no-op entry: neither enabling nor effect depends on it
                fns[level_of[place]] = fn
            if not fns:
                raise ParseError(f"transition {name!r} touches no places", lineno)
            events.append(Event(name, fns, index=len(events)))

    if not places:
        raise ParseError("no places declared")
    levels = len(places)
    if not body_seen:
        for pos, name in enumerate(places):
            level_of[name] = levels - pos

    if not init_markings:
        init_markings = [{}]
    initial_states = []
    for marking in init_markings:
        state = [0] * levels
        for place, count in marking.items():
            state[levels - level_of[place]] = count
        initial_states.append(tuple(state))

    domains = [1] * (levels + 1)
    for state in initial_states:
        for k in range(1, levels + 1):
            domains[k] = max(domains[k], state[levels - k] + 1)

    return Model(places, level_of, domains, initial_states, events)
