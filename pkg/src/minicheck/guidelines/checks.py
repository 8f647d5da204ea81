"""Decidable approximations of individual rules.

Every check takes a :class:`CheckContext` and appends diagnostics to it.
All checks over-approximate the rule they stand in for: they may flag code
the official rule accepts, never the other way round.
"""

from __future__ import annotations

from dataclasses import replace

from ..frontend import ast
from ..sema import types as T
from ..sema.consteval import fold
from ..sema.eof import UNSAFE, eof_domain
from ..sema.libc import EOF_CONSUMER, SEARCH_FUNCTIONS, STREAM_TYPE, STRING_FAMILY
from .common import CheckContext, const_pointee, callee_param, own_exprs, pointee, pointer_fate, strip_casts
from .diagnostics import DEFINITE, OVER, POSSIBLE

INCDEC = ("++", "--")


def lvalue_root(unit, e):
    """Identifier whose own storage the lvalue ``e`` designates."""
    while True:
        if isinstance(e, ast.Ident):
            return e
        if isinstance(e, ast.Member) and not e.arrow:
            e = e.obj
        elif isinstance(e, ast.Index) and isinstance(unit.type_of(e.base), T.ArrayType):
            e = e.base
        else:
            return None


def modified_target(n):
    """The lvalue written by ``n`` if it is an assignment or ++/--."""
    if isinstance(n, ast.Assign):
        return n.target
    if isinstance(n, (ast.Unary, ast.Postfix)) and n.op in INCDEC:
        return n.operand
    return None


def _name(unit, call) -> str:
    sym = unit.callee(call)
    return sym.name if sym is not None else "call"


# -- R22.5 --------------------------------------------------------------------

CHECK_FILE_DEREF = "file-deref-r22-5"


def _is_file(unit, t) -> bool:
    return isinstance(t, T.OpaqueType) and unit.profile.tag(t.name) == STREAM_TYPE


def _file_pointer(unit, e) -> bool:
    return _is_file(unit, pointee(unit.value_type(e)))


def _file_deref_form(unit, n) -> str | None:
    if isinstance(n, ast.Unary) and n.op == "*" and _file_pointer(unit, n.operand):
        return "dereference of a pointer to FILE"
    if isinstance(n, ast.Member) and n.arrow and _file_pointer(unit, n.obj):
        return "member access through a pointer to FILE"
    if isinstance(n, ast.Index) and (_file_pointer(unit, n.base) or _file_pointer(unit, n.index)):
        return "subscript of a pointer to FILE"
    return None


def _copied(unit, n) -> bool:
    p = unit.parent(n)
    if isinstance(p, ast.InitDeclarator):
        return True
    if isinstance(p, ast.Assign):
        return p.value is n
    return isinstance(p, (ast.Call, ast.Return, ast.InitList)) and getattr(p, "func", None) is not n


def check_file_deref_R22_5(ctx: CheckContext):
    unit = ctx.unit
    for n in ctx.exprs():
        if not isinstance(n, ast.Expr) or n not in unit.expr_types:
            continue
        msg = _file_deref_form(unit, n)
        if msg is None and _is_file(unit, unit.type_of(n)) and _copied(unit, n):
            msg = "by-value copy of a FILE object"
        if msg is not None:
            ctx.report("R22.5", CHECK_FILE_DEREF, DEFINITE, OVER, n, msg)


# -- R17.8 --------------------------------------------------------------------

CHECK_READONLY_PARAMS = "readonly-params-r17-8"


def check_readonly_params_R17_8(ctx: CheckContext):
    unit = ctx.unit
    for n in ctx.exprs():
        target = modified_target(n)
        if target is not None:
            root = lvalue_root(unit, target)
            sym = unit.symbol_of(root) if root is not None else None
            if sym is not None and sym.is_parameter:
                ctx.report("R17.8", CHECK_READONLY_PARAMS, DEFINITE, OVER, n,
                           f"parameter '{sym.name}' is modified")
        elif isinstance(n, ast.Unary) and n.op == "&":
            root = lvalue_root(unit, n.operand)
            sym = unit.symbol_of(root) if root is not None else None
            if sym is not None and sym.is_parameter and pointer_fate(unit, n) is not None:
                ctx.report("R17.8", CHECK_READONLY_PARAMS, DEFINITE, OVER, n,
                           f"address of parameter '{sym.name}' reaches a context that may modify it")


# -- R8.13 --------------------------------------------------------------------

CHECK_CONST_CANDIDATES = "const-candidates-r8-13"


def _may_write_through(unit, fn, sym) -> bool:
    for n in fn.body.walk():
        if not isinstance(n, ast.Ident) or unit.symbol_of(n) is not sym:
            continue
        p = unit.parent(n)
        if isinstance(p, ast.Assign) and p.target is n:
            continue
        if isinstance(p, (ast.Unary, ast.Postfix)) and p.op in INCDEC:
            continue
        if isinstance(p, ast.Unary) and p.op == "&":
            return True
        if pointer_fate(unit, n) is not None:
            return True
    return False


def check_const_candidates_R8_13(ctx: CheckContext):
    unit = ctx.unit
    for fn in unit.ast.functions:
        for sym in unit.locals.get(fn.name, ()):
            t = sym.type
            if sym.storage != "automatic" or not isinstance(t, T.PointerType):
                continue
            target = t.pointee
            # Only the first level: a pointer-to-pointer would need const
            # at an inner level the rule does not talk about.
            if target.const or isinstance(target, (T.FunctionType, T.PointerType)):
                continue
            if _may_write_through(unit, fn, sym):
                continue
            better = T.render(replace(t.unqualified(), pointee=target.qualified(const=True)))
            ctx.report("R8.13", CHECK_CONST_CANDIDATES, DEFINITE, OVER, sym.decl,
                       f"pointer '{sym.name}' never modifies its target; it should be '{better}'",
                       at=sym.decl_span)


# -- R9.1 ---------------------------------------------------------------------

CHECK_INIT_AT_DECL = "init-at-decl-r9-1"


def _local_declarators(unit):
    for fn in unit.ast.functions:
        for n in fn.body.walk():
            if isinstance(n, ast.InitDeclarator):
                sym = unit.declared.get(n)
                if sym is not None and sym.storage == "automatic":
                    yield n, sym


def check_init_at_decl_R9_1(ctx: CheckContext):
    unit = ctx.unit
    if not ctx.heuristic:
        for d, sym in _local_declarators(unit):
            if d.init is None:
                ctx.report("R9.1", CHECK_INIT_AT_DECL, DEFINITE, OVER, d,
                           f"automatic variable '{sym.name}' is not initialized at its declaration")
        return
    for owner, sym in sorted(ctx.facts.maybe_uninit_reads, key=lambda k: (k[0], k[1].name)):
        stmt = ctx.stmt(owner)
        use = next((n for n in own_exprs(stmt) if isinstance(n, ast.Ident) and unit.symbol_of(n) is sym), stmt)
        ctx.report("R9.1", CHECK_INIT_AT_DECL, POSSIBLE, OVER, use,
                   f"'{sym.name}' may be read before it is initialized")
    seen = set()
    for owner, sym in sorted(ctx.facts.unknown_uninit, key=lambda k: (k[0], k[1].name)):
        if sym in seen:
            continue
        seen.add(sym)
        ctx.report("R9.1", CHECK_INIT_AT_DECL, POSSIBLE, OVER, sym.decl,
                   f"initialization of '{sym.name}' is not tracked; it may be read before it is set",
                   at=sym.decl_span)


# -- R14.1 / R14.2 ------------------------------------------------------------

CHECK_DETERMINATE_FOR = "determinate-for-r14-1-2"


def _loop_counter(unit, loop: ast.For):
    init = loop.init
    if isinstance(init, ast.Declaration):
        if len(init.declarators) == 1:
            d = init.declarators[0]
            if d.init is not None and not isinstance(d.init, ast.InitList):
                return unit.declared.get(d)
    elif isinstance(init, ast.Assign) and init.op == "=" and isinstance(init.target, ast.Ident):
        sym = unit.symbol_of(init.target)
        if sym is not None and sym.storage == "automatic":
            return sym
    return None


def _modification(unit, nodes, sym):
    """First node among ``nodes`` (and their subtrees) that writes ``sym``
    or takes its address."""
    for top in nodes:
        if top is None:
            continue
        for n in top.walk():
            target = modified_target(n)
            if target is None and isinstance(n, ast.Unary) and n.op == "&":
                target = n.operand
            if target is not None:
                root = lvalue_root(unit, target)
                if root is not None and unit.symbol_of(root) is sym:
                    return n
    return None


def loop_invariant(unit, e, loop: ast.For) -> bool:
    """Syntactic loop invariance of a bound expression."""
    parts = (loop.cond, loop.step, loop.body)
    calls = any(isinstance(n, ast.Call) for p in parts if p is not None for n in p.walk())
    for n in e.walk():
        if isinstance(n, ast.Call) or modified_target(n) is not None:
            return False
        if isinstance(n, ast.Ident):
            sym = unit.symbol_of(n)
            if sym.storage in ("enumerator", "function"):
                continue
            if sym.is_volatile:
                return False
            if sym.type.const:
                continue
            if _modification(unit, parts, sym) is not None:
                return False
            if not sym.is_local and calls:
                return False
    return True


def _is_counter(unit, e, sym) -> bool:
    return isinstance(e, ast.Ident) and unit.symbol_of(e) is sym


def _step_ok(unit, step, sym) -> bool:
    if isinstance(step, (ast.Unary, ast.Postfix)) and step.op in INCDEC:
        return _is_counter(unit, step.operand, sym)
    if not isinstance(step, ast.Assign) or not _is_counter(unit, step.target, sym):
        return False
    if step.op in ("+=", "-="):
        k = step.value
    elif step.op == "=" and isinstance(step.value, ast.Binary) and step.value.op in ("+", "-"):
        v = step.value
        if _is_counter(unit, v.left, sym):
            k = v.right
        elif v.op == "+" and _is_counter(unit, v.right, sym):
            k = v.left
        else:
            return False
    else:
        return False
    return fold(unit, k) is not None


def check_determinate_for_R14_1_2(ctx: CheckContext):
    unit = ctx.unit

    def finding(node, message):
        ctx.report("R14.2", CHECK_DETERMINATE_FOR, DEFINITE, OVER, loop, message, at=node.span)

    for loop in unit.ast.walk():
        if not isinstance(loop, ast.For):
            continue
        sym = _loop_counter(unit, loop)
        if sym is not None and isinstance(sym.type, T.FloatType):
            ctx.report("R14.1", CHECK_DETERMINATE_FOR, DEFINITE, OVER, loop,
                       f"loop counter '{sym.name}' has floating type", at=loop.init.span)
            continue
        if sym is None or not sym.type.is_integer or sym.type.name == "_Bool":
            finding(loop.init or loop, "for-init does not initialize a single integer loop counter")
            sym = None
        c = loop.cond
        if not (sym is not None and isinstance(c, ast.Binary) and c.op in ("<", "<=", ">", ">=")
                and ((_is_counter(unit, c.left, sym) and loop_invariant(unit, c.right, loop))
                     or (_is_counter(unit, c.right, sym) and loop_invariant(unit, c.left, loop)))):
            if sym is not None or c is None:
                finding(c or loop, "condition does not compare the loop counter with a loop-invariant bound")
        if sym is None:
            if loop.step is None:
                finding(loop, "increment is not the loop counter plus or minus a constant")
            continue
        if loop.step is None or not _step_ok(unit, loop.step, sym):
            finding(loop.step or loop, "increment is not the loop counter plus or minus a constant")
        touched = _modification(unit, (loop.body,), sym)
        if touched is not None:
            finding(touched, f"loop counter '{sym.name}' modified in body")


# -- R17.2 --------------------------------------------------------------------

CHECK_NO_RECURSION = "no-recursion-r17-2"


def check_no_recursion_R17_2(ctx: CheckContext):
    unit, graph = ctx.unit, ctx.facts.call_graph
    functions = unit.functions
    for cycle in graph.cycles():
        members = ", ".join(cycle)
        for name in cycle:
            fn = functions[name]
            ctx.report("R17.2", CHECK_NO_RECURSION, DEFINITE, OVER, fn,
                       f"function '{name}' is part of a recursive call cycle ({members})")
    if ctx.heuristic and not any(
        s.address_taken for s in unit.globals.values() if s.storage == "function"
    ):
        return
    for site in graph.indirect_sites:
        ctx.report("R17.2", CHECK_NO_RECURSION, POSSIBLE, OVER, site.call,
                   "recursion not excludable through function pointer", at=site.span)


# -- R21.13 -------------------------------------------------------------------

CHECK_EOF_DOMAIN = "eof-domain-r21-13"


def check_eof_domain_R21_13(ctx: CheckContext):
    unit = ctx.unit
    for n in ctx.exprs():
        if isinstance(n, ast.Call) and unit.callee_tag(n) == EOF_CONSUMER:
            for arg in n.args:
                if eof_domain(arg, unit, ctx.facts) == UNSAFE:
                    ctx.report("R21.13", CHECK_EOF_DOMAIN, DEFINITE, OVER, arg,
                               f"argument to {_name(unit, n)} is neither EOF nor an unsigned char value")


# -- R21.14 / R21.19 ----------------------------------------------------------

CHECK_CSTRING = "cstring-r21-14-19"


def _library(unit, call, names) -> bool:
    sym = unit.callee(call)
    return sym is not None and sym.builtin and sym.name in names


def _char_pointer(unit, e) -> bool:
    p = pointee(unit.value_type(strip_casts(e)))
    return p is not None and T.is_char_type(p.unqualified())


def _const_object(unit, e) -> bool:
    e = strip_casts(e)
    return isinstance(e, ast.StringLit) or const_pointee(unit.value_type(e))


def _non_const_destination(unit, e) -> bool:
    """Is the pointer value ``e`` stored (or passed or returned) as a
    pointer to non-const?"""
    p = unit.parent(e)
    while isinstance(p, ast.Cast) or (isinstance(p, ast.Conditional) and p.cond is not e) \
            or (isinstance(p, ast.Binary) and p.op == "," and p.right is e):
        e, p = p, unit.parent(p)
    if isinstance(p, ast.InitDeclarator):
        t = unit.declared[p].type
    elif isinstance(p, ast.Assign) and p.value is e:
        t = unit.type_of(p.target)
    elif isinstance(p, ast.Return):
        t = unit.declared[unit.enclosing_function(p)].type.ret
    elif isinstance(p, ast.Call) and p.func is not e:
        t = callee_param(unit, p, p.args.index(e))
        if t is None:
            return True
    else:
        return False
    return isinstance(t, T.PointerType) and not t.pointee.const


def check_cstring_R21_14_19(ctx: CheckContext):
    unit = ctx.unit
    for n in ctx.exprs():
        if not isinstance(n, ast.Call):
            continue
        if _library(unit, n, ("memcmp",)) and unit.callee_tag(n) == STRING_FAMILY:
            if any(_char_pointer(unit, a) for a in n.args[:2]):
                ctx.report("R21.14", CHECK_CSTRING, DEFINITE, OVER, n,
                           "memcmp used on character data")
        elif _library(unit, n, SEARCH_FUNCTIONS) and n.args:
            if _const_object(unit, n.args[0]) and _non_const_destination(unit, n):
                ctx.report("R21.19", CHECK_CSTRING, DEFINITE, OVER, n,
                           f"result of {_name(unit, n)} on a const-qualified object "
                           "is kept in a pointer to non-const")
