"""Reachability engine for place/transition nets over quasi-reduced MDDs.

Explicit, symbolic breadth-first, saturation and chained-saturation
generation; CTL base operators as backward fixpoints; and a deterministic
simulator of three distributed generation schemes.
"""

from .mdd import MddForest, NodeRef, StateSet, count_states, enumerate_states
from .model import Event, LocalFn, Model, ParseError, parse_model
from .symbolic import (GenerationMetrics, SymbolicEngine, bfs_generate,
                       chained_saturate, saturate)

__version__ = "0.1.0"

__all__ = [
    "Event", "GenerationMetrics", "LocalFn", "MddForest", "Model", "NodeRef",
    "ParseError", "StateSet", "SymbolicEngine", "bfs_generate",
    "chained_saturate", "count_states", "enumerate_states", "parse_model",
    "saturate",
]
