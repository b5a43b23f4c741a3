"""Bundled example nets, written in the model file format.

Generators return model-file text so the parser stays on the hot path of
every consumer.  ``SMALL`` lists the members small enough for explicit
enumeration; ``independent_toggles`` is the closed-form family whose
reachable count is exactly 2**cells.
"""

from __future__ import annotations


def toggle():
    """Two places, one token bouncing between them: 2 reachable states."""
    return (
        "# one token moving between two places\n"
        "place P1 P2\n"
        "init P1=1\n"
        "trans t1: take P1=1 put P2=1\n"
        "trans t2: take P2=1 put P1=1\n"
    )


def ring(k):
    """Single token moving around k places: exactly k reachable states."""
    lines = ["# single token on a ring of %d places" % k,
             "place " + " ".join(f"P{i}" for i in range(1, k + 1)),
             "init P1=1"]
    for i in range(1, k + 1):
        succ = i % k + 1
        lines.append(f"trans t{i}: take P{i}=1 put P{succ}=1")
    return "\n".join(lines) + "\n"


def independent_toggles(cells=40):
    """Independent two-place toggle cells: exactly 2**cells states.

    A single place cannot toggle 0 <-> 1 under plain take/put semantics
    (nothing guards the upward step), so each cell is the standard
    complementary-place pair; the pair's two events top out at the cell's
    higher level.
    """
    names = []
    for c in range(1, cells + 1):
        names.extend([f"A{c}", f"B{c}"])
    lines = ["# %d independent toggle cells" % cells,
             "place " + " ".join(names),
             "init " + " ".join(f"A{c}=1" for c in range(1, cells + 1))]
    for c in range(1, cells + 1):
        lines.append(f"trans flip{c}: take A{c}=1 put B{c}=1")
        lines.append(f"trans flop{c}: take B{c}=1 put A{c}=1")
    return "\n".join(lines) + "\n"


def producer_consumer(slots=3):
    """Producer/consumer around a bounded buffer of ``slots`` cells.

    The used-slots place starts empty and its domain grows to slots+1 as
    tokens accumulate: 2 * 2 * (slots + 1) reachable states.
    """
    return (
        "# producer/consumer with a %d-slot buffer\n" % slots
        + "place PI PB BF BU CI CB\n"
        + f"init PI=1 BF={slots} CI=1\n"
        + "trans produce: take PI=1 put PB=1\n"
        + "trans deposit: take PB=1 BF=1 put PI=1 BU=1\n"
        + "trans withdraw: take CI=1 BU=1 put CB=1 BF=1\n"
        + "trans consume: take CB=1 put CI=1\n"
    )


def philosophers(n=3):
    """Dining philosophers, left fork first; deadlocks when all hold left."""
    places = []
    for i in range(1, n + 1):
        places.extend([f"Think{i}", f"HasL{i}", f"Eat{i}", f"Fork{i}"])
    lines = ["# %d dining philosophers" % n,
             "place " + " ".join(places),
             "init " + " ".join(f"Think{i}=1 Fork{i}=1" for i in range(1, n + 1))]
    for i in range(1, n + 1):
        right = i % n + 1
        lines.append(f"trans takeL{i}: take Think{i}=1 Fork{i}=1 put HasL{i}=1")
        lines.append(f"trans takeR{i}: take HasL{i}=1 Fork{right}=1 put Eat{i}=1")
        lines.append(
            f"trans release{i}: take Eat{i}=1 put Think{i}=1 Fork{i}=1 Fork{right}=1")
    return "\n".join(lines) + "\n"


SMALL = {
    "toggle": toggle(),
    "ring10": ring(10),
    "prodcons": producer_consumer(3),
    "phils3": philosophers(3),
}

CORPUS = dict(SMALL)
CORPUS["toggles40"] = independent_toggles(40)
