"""Shared plumbing for the checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from ..flow import DataflowFacts
from ..frontend import ast
from ..sema import types as T
from ..sema.consteval import fold
from ..sema.resolve import TypedUnit
from .diagnostics import Diagnostic, make

STRICT = "strict"
HEURISTIC = "heuristic"
PROFILES = (STRICT, HEURISTIC)


@dataclass
class CheckContext:
    unit: TypedUnit
    facts: DataflowFacts
    profile: str = STRICT
    found: list[Diagnostic] = field(default_factory=list)

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")
        self._unreachable = self.facts.unreachable
        self._stmts = None

    @property
    def heuristic(self) -> bool:
        return self.profile == HEURISTIC

    def live(self, node) -> bool:
        """False if the heuristic profile proves ``node`` never executes."""
        if not self.heuristic:
            return True
        stmt = self.unit.enclosing_stmt(node)
        return stmt is None or stmt.stmt_id not in self._unreachable

    def report(self, rule, check, kind, relation, node, message, at=None):
        if self.live(node):
            self.found.append(make(rule, check, kind, relation, at if at is not None else node, message))

    def stmt(self, stmt_id: int) -> ast.Stmt:
        if self._stmts is None:
            self._stmts = {s.stmt_id: s for s in self.unit.ast.statements()}
        return self._stmts[stmt_id]

    def exprs(self) -> Iterator[ast.Node]:
        return self.unit.ast.walk()


def strip_casts(e: ast.Expr) -> ast.Expr:
    while isinstance(e, ast.Cast):
        e = e.operand
    return e


def pointee(t) -> Optional[T.TypeRepr]:
    return t.pointee if isinstance(t, T.PointerType) else None


def const_pointee(t) -> bool:
    p = pointee(t)
    return p is not None and p.const


def own_exprs(stmt: ast.Stmt) -> Iterator[ast.Node]:
    """Nodes evaluated by ``stmt`` itself, not by nested statements."""
    stack = [c for c in stmt.children() if not isinstance(c, ast.Stmt)]
    stack.reverse()
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed([c for c in n.children() if not isinstance(c, ast.Stmt)]))


def is_null(unit, e) -> bool:
    return fold(unit, strip_casts(e)) == 0


def callee_param(unit, call: ast.Call, index: int) -> Optional[T.TypeRepr]:
    """Declared type of the parameter receiving argument ``index``."""
    ft = unit.value_type(call.func)
    if isinstance(ft, T.PointerType):
        ft = ft.pointee
    if isinstance(ft, T.FunctionType) and ft.prototyped and index < len(ft.params):
        return ft.params[index]
    return None


def pointer_fate(unit, e) -> Optional[ast.Node]:
    """Where the pointer value ``e`` may be used to modify its target.

    Returns the node at which the target is written or the pointer leaves
    the reach of this analysis (stored, passed, returned, cast to a
    non-const pointer), or ``None`` if it is only ever read through.
    A const-qualified pointee is a pledge: no cast can take it back.
    """
    p = unit.parent(e)
    if isinstance(p, ast.Unary):
        if p.op == "*":
            return lvalue_fate(unit, p)
        return None  # ! and friends only look at the value
    if isinstance(p, ast.Index):
        return lvalue_fate(unit, p)
    if isinstance(p, ast.Member):
        return lvalue_fate(unit, p)
    if isinstance(p, ast.Binary):
        if p.op in ("+", "-") and isinstance(unit.type_of(p), T.PointerType):
            return pointer_fate(unit, p)
        if p.op == "," and p.right is e:
            return pointer_fate(unit, p)
        return None
    if isinstance(p, ast.Conditional):
        return None if p.cond is e else pointer_fate(unit, p)
    if isinstance(p, ast.Cast):
        t = unit.type_of(p)
        if isinstance(t, T.VoidType) or (isinstance(t, T.IntType) and t.name == "_Bool"):
            return None
        return None if const_pointee(t) else p
    if isinstance(p, ast.Call):
        if p.func is e:
            return None
        return None if const_pointee(callee_param(unit, p, p.args.index(e))) else p
    if isinstance(p, ast.Assign):
        if p.target is e:
            return None
        return None if const_pointee(unit.type_of(p.target)) else p
    if isinstance(p, ast.InitDeclarator):
        sym = unit.declared.get(p)
        return None if sym is not None and const_pointee(sym.type) else p
    if isinstance(p, ast.Return):
        fn = unit.enclosing_function(p)
        ret = unit.declared[fn].type.ret if fn is not None else None
        return None if const_pointee(ret) else p
    if isinstance(p, (ast.SizeofExpr, ast.ExprStmt, ast.If, ast.While, ast.DoWhile, ast.Switch, ast.For)):
        return None
    return p


def lvalue_fate(unit, lv) -> Optional[ast.Node]:
    """Like :func:`pointer_fate` for an lvalue designating the target."""
    p = unit.parent(lv)
    if isinstance(p, ast.Assign) and p.target is lv:
        return p
    if isinstance(p, (ast.Unary, ast.Postfix)) and p.op in ("++", "--"):
        return p
    if isinstance(p, ast.Unary) and p.op == "&":
        return pointer_fate(unit, p)
    if isinstance(p, ast.Member) and not p.arrow:
        return lvalue_fate(unit, p)
    if isinstance(unit.type_of(lv), T.ArrayType):
        if isinstance(p, ast.Index) and p.base is lv:
            return lvalue_fate(unit, p)
        if not isinstance(p, (ast.SizeofExpr,)):
            return pointer_fate(unit, lv)
    return None
