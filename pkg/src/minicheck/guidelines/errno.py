"""The errno protocol: zero before, test right after, test nowhere else.

One syntactic automaton over statement lists yields three finding kinds:
an errno-setting call not directly preceded by ``errno = 0;`` (R22.8), a
call not directly followed by an ``==``/``!=`` test of errno (R22.9), and a
read of errno outside such a licensed position (R22.10).
"""

from __future__ import annotations

from ..frontend import ast
from ..sema.libc import ERRNO_OBJECT, ERRNO_SETTING
from .common import CheckContext, own_exprs, strip_casts
from .diagnostics import DEFINITE, OVER
from ..sema.consteval import fold

CHECK_ERRNO = "errno-protocol-r22-8-9-10"


def _is_errno(unit, e) -> bool:
    e = strip_casts(e)
    if not isinstance(e, ast.Ident):
        return False
    sym = unit.symbol_of(e)
    return sym is not None and sym.libc_tag == ERRNO_OBJECT


def _siblings(unit, stmt):
    """(previous, following) statements in the same block."""
    parent = unit.parent(stmt)
    if not isinstance(parent, ast.Compound):
        return None, []
    i = parent.items.index(stmt)
    return (parent.items[i - 1] if i > 0 else None), parent.items[i + 1:]


def is_errno_reset(unit, stmt) -> bool:
    if not isinstance(stmt, ast.ExprStmt) or not isinstance(stmt.expr, ast.Assign):
        return False
    a = stmt.expr
    return a.op == "=" and _is_errno(unit, a.target) and fold(unit, a.value) == 0


def _tests_errno(unit, stmt) -> bool:
    return any(
        isinstance(n, ast.Binary) and n.op in ("==", "!=") and (_is_errno(unit, n.left) or _is_errno(unit, n.right))
        for n in own_exprs(stmt)
    )


def _result_variable(unit, call, host):
    """Symbol receiving the call result when ``host`` is ``v = call(...);``."""
    if not isinstance(host, ast.ExprStmt) or not isinstance(host.expr, ast.Assign):
        return None
    a = host.expr
    if a.op != "=" or not isinstance(a.target, ast.Ident) or strip_casts(a.value) is not call:
        return None
    return unit.symbol_of(a.target)


def _passes_result_on(unit, stmt, result) -> bool:
    """``stmt`` is a call-free plain assignment reading ``result``."""
    if result is None or not isinstance(stmt, ast.ExprStmt) or not isinstance(stmt.expr, ast.Assign):
        return False
    a = stmt.expr
    if any(isinstance(n, ast.Call) or _is_errno(unit, n) for n in a.walk()):
        return False
    return any(isinstance(n, ast.Ident) and unit.symbol_of(n) is result for n in a.value.walk())


def _errno_tests(unit, root):
    """Reads of errno that decide something: comparisons, negation,
    logical operands and bare controlling expressions."""
    for n in root.walk():
        if not (isinstance(n, ast.Ident) and _is_errno(unit, n)):
            continue
        e, p = n, unit.parent(n)
        while isinstance(p, ast.Cast):
            e, p = p, unit.parent(p)
        if isinstance(p, ast.Binary) and p.op in ("==", "!=", "<", ">", "<=", ">=", "&&", "||"):
            yield n
        elif isinstance(p, ast.Unary) and p.op == "!":
            yield n
        elif isinstance(p, (ast.If, ast.While, ast.DoWhile, ast.Switch)) and p.cond is e:
            yield n
        elif isinstance(p, (ast.For, ast.Conditional)) and p.cond is e:
            yield n


def check_errno_protocol_R22_8_9_10(ctx: CheckContext):
    unit = ctx.unit
    licensed = set()
    calls = [n for n in ctx.exprs() if isinstance(n, ast.Call) and unit.callee_tag(n) == ERRNO_SETTING]
    for call in calls:
        host = unit.enclosing_stmt(call)
        name = unit.callee(call).name
        prev, following = _siblings(unit, host) if host is not None else (None, [])
        if prev is None or not is_errno_reset(unit, prev):
            ctx.report("R22.8", CHECK_ERRNO, DEFINITE, OVER, call,
                       f"call to {name} is not immediately preceded by 'errno = 0;'")
        result = _result_variable(unit, call, host)
        if len(following) > 1 and _passes_result_on(unit, following[0], result):
            following = following[1:]
        test = following[0] if following else None
        if test is not None:
            licensed.add(test)
        if test is None or not _tests_errno(unit, test):
            ctx.report("R22.9", CHECK_ERRNO, DEFINITE, OVER, call,
                       f"errno is not tested with == or != right after the call to {name}")
    for fn in unit.ast.functions:
        for n in _errno_tests(unit, fn.body):
            if unit.enclosing_stmt(n) not in licensed:
                ctx.report("R22.10", CHECK_ERRNO, DEFINITE, OVER, n,
                           "errno is tested without a preceding errno-setting call")
