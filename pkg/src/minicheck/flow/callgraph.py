"""Whole-unit call graph."""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from ..frontend import ast
from ..frontend.tokens import SourceSpan
from ..sema.resolve import Symbol, TypedUnit


@dataclass(frozen=True)
class IndirectSite:
    caller: str
    span: SourceSpan
    call: ast.Call = field(compare=False, hash=False)


@dataclass
class CallGraph:
    nodes: dict[str, Symbol]
    direct_edges: set[tuple[str, str]]
    indirect_sites: list[IndirectSite]

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(sorted(self.nodes))
        g.add_edges_from(sorted(self.direct_edges))
        return g

    def cycles(self) -> list[list[str]]:
        """Recursive groups: non-trivial SCCs and self-loops, sorted."""
        g = self.graph()
        out = []
        for comp in nx.strongly_connected_components(g):
            members = sorted(comp)
            if len(members) > 1 or g.has_edge(members[0], members[0]):
                out.append(members)
        return sorted(out)

    def callees(self, name: str) -> set[str]:
        return {b for a, b in self.direct_edges if a == name}


def build_call_graph(unit: TypedUnit) -> CallGraph:
    """Direct call edges plus indirect call sites.

    Any use of a function designator other than as the callee of a direct
    call marks that function ``address_taken``.
    """
    nodes = {
        name: sym for name, sym in unit.globals.items() if sym.storage == "function"
    }
    edges = set()
    sites = []
    for fn in unit.ast.functions:
        for node in fn.body.walk():
            if isinstance(node, ast.Call):
                callee = unit.callee(node)
                if callee is None:
                    sites.append(IndirectSite(fn.name, node.span, node))
                elif callee.name in nodes and nodes[callee.name] is callee:
                    edges.add((fn.name, callee.name))
    for node in unit.ast.walk():
        if isinstance(node, ast.Ident):
            sym = unit.resolutions.get(node)
            if sym is None or sym.storage != "function":
                continue
            parent = unit.parent(node)
            if isinstance(parent, ast.Call) and parent.func is node:
                continue
            sym.address_taken = True
    sites.sort(key=lambda s: (s.span, s.caller))
    return CallGraph(nodes, edges, sites)
