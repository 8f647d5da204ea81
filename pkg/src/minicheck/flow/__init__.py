"""Control-flow graphs, call graph and dataflow facts."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..sema.resolve import TypedUnit
from .callgraph import CallGraph, IndirectSite, build_call_graph
from .cfg import BasicBlock, Cfg, CfgError, Edge, Element, build_cfg
from .dataflow import (
    Definition,
    Event,
    EventCollector,
    constant_env,
    definite_assignment,
    element_events,
    fold_conditions,
    is_tracked,
    liveness,
    liveness_dead_stores,
    reaching_definitions,
    static_unreachable,
)


@dataclass
class FunctionFacts:
    cfg: Cfg
    unreachable: set
    dead_stores: set
    maybe_uninit_reads: set
    unknown_uninit: set
    reaching: dict
    folded: object


@dataclass
class DataflowFacts:
    """All flow facts of one unit, per function and merged."""

    functions: dict = field(default_factory=dict)  # name -> FunctionFacts
    call_graph: CallGraph = None

    @property
    def unreachable(self) -> set:
        return set().union(*(f.unreachable for f in self.functions.values()))

    @property
    def reachable(self) -> set:
        ids = set().union(*(f.cfg.stmt_ids for f in self.functions.values()))
        return ids - self.unreachable

    @property
    def dead_stores(self) -> set:
        return set().union(*(f.dead_stores for f in self.functions.values()))

    @property
    def maybe_uninit_reads(self) -> set:
        return set().union(*(f.maybe_uninit_reads for f in self.functions.values()))

    @property
    def unknown_uninit(self) -> set:
        return set().union(*(f.unknown_uninit for f in self.functions.values()))

    def reaching(self, ident):
        for f in self.functions.values():
            if ident in f.reaching:
                return f.reaching[ident]
        return None

    def dump_cfgs(self) -> str:
        return "\n".join(self.functions[n].cfg.dump() for n in sorted(self.functions))


def analyze(unit: TypedUnit) -> DataflowFacts:
    """Build every CFG and run all dataflow analyses."""
    facts = DataflowFacts()
    facts.call_graph = build_call_graph(unit)
    for fn in unit.ast.functions:
        cfg = build_cfg(fn)
        events = element_events(unit, cfg)
        live = liveness(cfg, unit, events)
        assign = definite_assignment(cfg, unit, events)
        facts.functions[fn.name] = FunctionFacts(
            cfg=cfg,
            unreachable=static_unreachable(cfg, unit),
            dead_stores=live.dead_stores,
            maybe_uninit_reads=assign.maybe_uninit_reads,
            unknown_uninit=assign.unknown,
            reaching=reaching_definitions(cfg, unit, events),
            folded=fold_conditions(cfg, unit),
        )
    return facts


__all__ = [
    "BasicBlock",
    "CallGraph",
    "Cfg",
    "CfgError",
    "DataflowFacts",
    "Definition",
    "Edge",
    "Element",
    "Event",
    "EventCollector",
    "FunctionFacts",
    "IndirectSite",
    "analyze",
    "build_call_graph",
    "build_cfg",
    "constant_env",
    "definite_assignment",
    "element_events",
    "fold_conditions",
    "is_tracked",
    "liveness",
    "liveness_dead_stores",
    "reaching_definitions",
    "static_unreachable",
]
