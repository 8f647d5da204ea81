"""Reference interpreter used as ground truth for the static analyses."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .interp import (
    FUEL_EXHAUSTED,
    INCONCLUSIVE,
    RUNTIME_ERROR,
    RUNTIME_ERRORS,
    TERMINATED,
    ExecEvent,
    ExecutionTrace,
    OracleError,
    Outcome,
    StoreEvent,
    run,
)

DEFAULT_GRID = tuple(range(-2, 3))


@dataclass
class SweepResult:
    """What a set of concrete runs witnessed."""

    ever_executed: set = field(default_factory=set)
    witnessed_live_stores: set = field(default_factory=set)
    outcomes: dict = field(default_factory=dict)  # outcome kind -> count
    runs: int = 0


def sweep(unit, entry: str, grid=DEFAULT_GRID, fuel: int = 10_000) -> SweepResult:
    """Run ``entry`` on every point of ``grid`` raised to its arity."""
    fn = unit.functions.get(entry)
    if fn is None:
        raise OracleError(f"no function named '{entry}'")
    out = SweepResult()
    for args in itertools.product(grid, repeat=len(fn.params)):
        trace = run(unit, entry, args, fuel)
        out.runs += 1
        out.ever_executed.update(trace.executed)
        out.witnessed_live_stores |= trace.witnessed_live_stores
        kind = trace.outcome.kind
        out.outcomes[kind] = out.outcomes.get(kind, 0) + 1
    return out


__all__ = [
    "DEFAULT_GRID",
    "ExecEvent",
    "ExecutionTrace",
    "FUEL_EXHAUSTED",
    "INCONCLUSIVE",
    "OracleError",
    "Outcome",
    "RUNTIME_ERROR",
    "RUNTIME_ERRORS",
    "StoreEvent",
    "SweepResult",
    "TERMINATED",
    "run",
    "sweep",
]
