"""Intraprocedural dataflow: reachability, liveness, definite assignment and
reaching definitions over the CFGs built by :mod:`cfg`.

Only *tracked* symbols take part in the value analyses: automatic scalar
locals and parameters that are neither address-taken nor volatile.  Every
other object may be reached through memory the analyses do not model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..frontend import ast
from ..sema import types as T
from ..sema.consteval import fold
from ..sema.resolve import Symbol, TypedUnit
from .cfg import Cfg, Edge, Element

# -- expression events -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Event:
    kind: str  # use | def | decl | addr
    sym: Symbol
    node: ast.Node
    must: bool = True  # for defs: False when the store may not happen
    value: Optional[ast.Expr] = None  # for simple defs: the stored value
    simple: bool = False  # plain ``=`` or initializer (value fully known)


def is_tracked(sym: Symbol) -> bool:
    return (
        sym.function is not None
        and sym.storage == "automatic"
        and not sym.address_taken
        and not sym.type.volatile
        and T.decay(sym.type).is_scalar
        and not isinstance(sym.type, T.ArrayType)
    )


class EventCollector:
    """Expression events in evaluation order (left to right)."""

    def __init__(self, unit: TypedUnit):
        self.unit = unit

    def sym(self, e) -> Optional[Symbol]:
        if isinstance(e, ast.Ident):
            return self.unit.resolutions.get(e)
        return None

    def expr(self, e, out: list, must: bool = True):
        if e is None:
            return out
        u = self.unit
        if isinstance(e, ast.Ident):
            sym = u.resolutions[e]
            if sym.storage in ("automatic", "static", "extern"):
                out.append(Event("use", sym, e))
        elif isinstance(e, ast.Assign):
            target_sym = self.sym(e.target)
            if target_sym is None:
                self.lvalue(e.target, out, must)
            elif e.op != "=":
                out.append(Event("use", target_sym, e.target))
            self.expr(e.value, out, must)
            if target_sym is not None:
                out.append(Event("def", target_sym, e, must, e.value if e.op == "=" else None, e.op == "="))
        elif isinstance(e, (ast.Unary, ast.Postfix)) and e.op in ("++", "--"):
            s = self.sym(e.operand)
            if s is None:
                self.lvalue(e.operand, out, must)
            else:
                out.append(Event("use", s, e.operand))
                out.append(Event("def", s, e, must))
        elif isinstance(e, ast.Unary) and e.op == "&":
            s = self.sym(e.operand)
            if s is not None:
                out.append(Event("addr", s, e))
            else:
                self.lvalue(e.operand, out, must)
        elif isinstance(e, ast.Binary) and e.op in ("&&", "||"):
            self.expr(e.left, out, must)
            self.expr(e.right, out, False)
        elif isinstance(e, ast.Conditional):
            self.expr(e.cond, out, must)
            self.expr(e.then, out, False)
            self.expr(e.otherwise, out, False)
        elif isinstance(e, (ast.SizeofExpr, ast.SizeofType)):
            pass  # operand is not evaluated
        elif isinstance(e, ast.Cast):
            self.expr(e.operand, out, must)
        else:
            for child in e.children():
                if isinstance(child, ast.Expr):
                    self.expr(child, out, must)
        return out

    def lvalue(self, e, out, must):
        """Events of evaluating ``e`` as a storage location."""
        if isinstance(e, ast.Ident):
            return
        if isinstance(e, ast.Member) and not e.arrow:
            self.lvalue(e.obj, out, must)
        elif isinstance(e, ast.Index) and isinstance(self.unit.expr_types.get(e.base), T.ArrayType):
            self.lvalue(e.base, out, must)
            self.expr(e.index, out, must)
        else:
            self.expr(e, out, must)

    def declaration(self, decl: ast.Declaration, out: list):
        for d in decl.declarators:
            sym = self.unit.declared.get(d)
            if sym is None or sym.storage != "automatic":
                continue
            if d.init is None:
                out.append(Event("decl", sym, d))
            else:
                self.expr(d.init, out)
                simple = not isinstance(d.init, ast.InitList)
                out.append(Event("def", sym, d, True, d.init if simple else None, simple))
        return out

    def element(self, el: Element) -> list[Event]:
        out: list[Event] = []
        if el.decl is not None:
            self.declaration(el.decl, out)
        elif el.expr is not None:
            self.expr(el.expr, out)
        return out


def element_events(unit: TypedUnit, cfg: Cfg) -> dict[Element, list[Event]]:
    coll = EventCollector(unit)
    return {el: coll.element(el) for _, el in cfg.elements()}


# -- constant-condition reachability ----------------------------------------


def constant_env(unit: TypedUnit):
    """Identifier valuation for condition folding.

    Enumerators, plus const-qualified non-volatile locals whose initializer
    is itself constant under this valuation.  Parameters never qualify.
    """
    cache: dict[Symbol, Optional[int]] = {}
    active: set = set()

    def value(sym: Symbol) -> Optional[int]:
        if sym.storage == "enumerator":
            return sym.value
        if sym in cache:
            return cache[sym]
        result = None
        decl = sym.decl
        if (
            sym.function is not None
            and not sym.is_parameter
            and sym.storage in ("automatic", "static")
            and sym.type.const
            and not sym.type.volatile
            and sym.type.is_integer
            and isinstance(decl, ast.InitDeclarator)
            and decl.init is not None
            and not isinstance(decl.init, ast.InitList)
            and sym not in active
        ):
            active.add(sym)
            result = fold(unit, decl.init, value)
            if result is not None:
                from ..sema.consteval import convert_int

                result = convert_int(result, sym.type)
            active.discard(sym)
        cache[sym] = result
        return result

    return value


@dataclass
class ConstantConditions:
    """Folded controlling expressions and the edges they make infeasible."""

    values: dict = field(default_factory=dict)  # Element -> int
    infeasible: set = field(default_factory=set)  # Edge


def fold_conditions(cfg: Cfg, unit: TypedUnit, env=None) -> ConstantConditions:
    env = env or constant_env(unit)
    out = ConstantConditions()
    for b in cfg.blocks:
        term = b.terminator
        if term is None:
            continue
        v = fold(unit, term.expr, env)
        if v is None:
            continue
        out.values[term] = v
        succ = cfg.succ(b.id)
        if term.kind == "cond":
            dead = "branch-false" if v else "branch-true"
            out.infeasible.update(e for e in succ if e.kind == dead)
        else:
            case_values = {}
            for e in succ:
                if e.kind == "switch-case" and e.value != "default":
                    case_values[e] = fold(unit, e.value, env)
            taken = [e for e, cv in case_values.items() if cv == v]
            if not taken:
                taken = [e for e in succ if e.value == "default"]
            out.infeasible.update(e for e in succ if e not in taken)
    return out


def static_unreachable(cfg: Cfg, unit: TypedUnit) -> set[int]:
    """Statement ids unreachable from entry once constant conditions are folded."""
    folded = fold_conditions(cfg, unit)
    feasible = [e for e in cfg.edges if e not in folded.infeasible]
    reached = cfg.reachable_blocks(feasible)
    out = set()
    for b in cfg.blocks:
        if b.id not in reached:
            out.update(b.stmt_ids)
    return out


# -- generic worklist --------------------------------------------------------


def _order(cfg: Cfg, backward: bool) -> list[int]:
    seen, order = set(), []

    def visit(b):
        stack = [(b, iter(cfg.succ(b)))]
        seen.add(b)
        while stack:
            node, it = stack[-1]
            for e in it:
                if e.dst not in seen:
                    seen.add(e.dst)
                    stack.append((e.dst, iter(cfg.succ(e.dst))))
                    break
            else:
                stack.pop()
                order.append(node)

    visit(cfg.entry)
    for b in cfg.blocks:
        if b.id not in seen:
            visit(b.id)
    return order if backward else list(reversed(order))


# -- liveness and dead stores ------------------------------------------------


@dataclass
class Liveness:
    live_in: dict
    live_out: dict
    dead_stores: set  # (owner stmt_id, Symbol)
    store_sites: dict  # (owner, Symbol) -> list of (Event, dead: bool)


def liveness(cfg: Cfg, unit: TypedUnit, events=None) -> Liveness:
    events = events if events is not None else element_events(unit, cfg)
    live_in = {b.id: frozenset() for b in cfg.blocks}
    live_out = {b.id: frozenset() for b in cfg.blocks}

    def transfer(b, live, record=None):
        live = set(live)
        for el in reversed(cfg.blocks[b].elements):
            for ev in reversed(events[el]):
                if not is_tracked(ev.sym):
                    continue
                if ev.kind == "use":
                    live.add(ev.sym)
                elif ev.kind == "def":
                    if record is not None and not isinstance(ev.node, ast.InitDeclarator):
                        record.append((el.owner, ev, ev.sym not in live))
                    if ev.must:
                        live.discard(ev.sym)
                elif ev.kind == "decl":
                    live.discard(ev.sym)
        return frozenset(live)

    order = _order(cfg, backward=True)
    changed = True
    while changed:
        changed = False
        for b in order:
            out = frozenset().union(*(live_in[e.dst] for e in cfg.succ(b)))
            new_in = transfer(b, out)
            if out != live_out[b] or new_in != live_in[b]:
                live_out[b], live_in[b] = out, new_in
                changed = True
    stores: dict = {}
    for b in cfg.blocks:
        rec = []
        transfer(b.id, live_out[b.id], rec)
        for owner, ev, dead in reversed(rec):
            stores.setdefault((owner, ev.sym), []).append((ev, dead))
    dead = {k for k, sites in stores.items() if all(d for _, d in sites)}
    return Liveness(live_in, live_out, dead, stores)


def liveness_dead_stores(cfg: Cfg, unit: TypedUnit) -> set:
    return liveness(cfg, unit).dead_stores


# -- definite assignment -----------------------------------------------------


@dataclass
class Assignment:
    maybe_uninit_reads: set  # (stmt_id, Symbol)
    unknown: set  # (stmt_id, Symbol): arrays, records, address-taken locals


def definite_assignment(cfg: Cfg, unit: TypedUnit, events=None) -> Assignment:
    events = events if events is not None else element_events(unit, cfg)
    state_in = {b.id: None for b in cfg.blocks}
    state_in[cfg.entry] = frozenset()

    def transfer(b, state, reads=None):
        state = set(state)
        for el in cfg.blocks[b].elements:
            for ev in events[el]:
                if not is_tracked(ev.sym):
                    continue
                if ev.kind == "decl":
                    state.add(ev.sym)
                elif ev.kind == "use":
                    if ev.sym in state and reads is not None:
                        reads.add((el.owner, ev.sym))
                elif ev.kind == "def" and ev.must:
                    state.discard(ev.sym)
        return frozenset(state)

    order = _order(cfg, backward=False)
    changed = True
    while changed:
        changed = False
        for b in order:
            preds = [state_in[e.src] for e in cfg.pred(b)]
            preds = [p for p in preds if p is not None]
            if b == cfg.entry:
                new = frozenset()
            elif not preds:
                # Unreachable block: nothing is known to be initialized.
                new = None
            else:
                new = frozenset().union(*[transfer(e.src, state_in[e.src]) for e in cfg.pred(b) if state_in[e.src] is not None])
            if new != state_in[b]:
                state_in[b] = new
                changed = True
    reads: set = set()
    for b in cfg.blocks:
        if state_in[b.id] is not None:
            transfer(b.id, state_in[b.id], reads)
    unknown = set()
    for _, el in cfg.elements():
        if el.decl is None:
            continue
        for d in el.decl.declarators:
            sym = unit.declared.get(d)
            if sym is None or sym.storage != "automatic" or d.init is not None:
                continue
            if not is_tracked(sym):
                unknown.add((el.owner, sym))
    return Assignment(reads, unknown)


# -- reaching definitions ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class Definition:
    sym: Symbol
    kind: str  # assign | init | param | uninit | update
    value: Optional[ast.Expr] = None
    node: Optional[ast.Node] = None


def reaching_definitions(cfg: Cfg, unit: TypedUnit, events=None) -> dict:
    """Map every use ``Ident`` of a tracked symbol to the definitions
    that may reach it."""
    events = events if events is not None else element_events(unit, cfg)
    defs_of: dict = {}
    params = {}
    for p in cfg.function.params:
        sym = unit.declared.get(p)
        if sym is not None and is_tracked(sym):
            params[sym] = Definition(sym, "param", node=p)
    site_def = {}
    for _, el in cfg.elements():
        for ev in events[el]:
            if ev.kind in ("def", "decl") and is_tracked(ev.sym):
                if ev.kind == "decl":
                    d = Definition(ev.sym, "uninit", node=ev.node)
                elif ev.simple:
                    kind = "init" if isinstance(ev.node, ast.InitDeclarator) else "assign"
                    d = Definition(ev.sym, kind, ev.value, ev.node)
                else:
                    d = Definition(ev.sym, "update", node=ev.node)
                site_def[ev] = d
                defs_of.setdefault(ev.sym, set()).add(d)

    def transfer(b, state, record=None):
        state = dict(state)
        for el in cfg.blocks[b].elements:
            for ev in events[el]:
                if not is_tracked(ev.sym):
                    continue
                if ev.kind == "use":
                    if record is not None:
                        record[ev.node] = state.get(ev.sym, frozenset())
                elif ev.kind in ("def", "decl"):
                    d = site_def[ev]
                    if ev.kind == "decl" or ev.must:
                        state[ev.sym] = frozenset({d})
                    else:
                        state[ev.sym] = state.get(ev.sym, frozenset()) | {d}
        return state

    start = {s: frozenset({d}) for s, d in params.items()}
    state_in = {b.id: None for b in cfg.blocks}
    state_in[cfg.entry] = start
    order = _order(cfg, backward=False)
    changed = True
    while changed:
        changed = False
        for b in order:
            if b == cfg.entry:
                continue
            merged: dict = {}
            any_pred = False
            for e in cfg.pred(b):
                if state_in[e.src] is None:
                    continue
                any_pred = True
                for s, ds in transfer(e.src, state_in[e.src]).items():
                    merged[s] = merged.get(s, frozenset()) | ds
            new = merged if any_pred else None
            if new != state_in[b]:
                state_in[b] = new
                changed = True
    record: dict = {}
    for b in cfg.blocks:
        if state_in[b.id] is not None:
            transfer(b.id, state_in[b.id], record)
    return record
