"""Intraprocedural ownership automaton for streams and heap memory.

Each local handle that receives the result of an acquiring call is tracked
with the set of states it may be in on some path: ``unowned``, ``owned``,
``released`` or ``escaped``.  States carry the acquiring call so that
findings point at the resource that leaks.
"""

from __future__ import annotations

from ..flow.cfg import Cfg
from ..frontend import ast
from ..sema import types as T
from ..sema.libc import MEMORY_ACQUIRE, RELEASE_FOR, STREAM_ACQUIRE
from .common import CheckContext, is_null, strip_casts
from .diagnostics import DEFINITE, OVER, POSSIBLE

CHECK_OWNERSHIP = "stream-ownership-r22-1"

ACQUIRE = (STREAM_ACQUIRE, MEMORY_ACQUIRE)
RELEASE = {rel: acq for acq, rel in RELEASE_FOR.items()}
UNOWNED = ("unowned", None, None)


class _Function:
    def __init__(self, ctx: CheckContext, cfg: Cfg):
        self.ctx = ctx
        self.unit = ctx.unit
        self.cfg = cfg
        self.handles = self._handles()
        self.findings: dict = {}
        self.recording = False

    # -- setup --------------------------------------------------------------

    def _acquire_tag(self, e):
        e = strip_casts(e) if e is not None else None
        if isinstance(e, ast.Call):
            tag = self.unit.callee_tag(e)
            if tag in ACQUIRE:
                return tag
        return None

    def _handles(self) -> set:
        unit, out = self.unit, set()
        for n in self.cfg.function.body.walk():
            if isinstance(n, ast.InitDeclarator) and self._acquire_tag(n.init):
                out.add(unit.declared.get(n))
            elif isinstance(n, ast.Assign) and n.op == "=" and isinstance(n.target, ast.Ident) \
                    and self._acquire_tag(n.value):
                out.add(unit.symbol_of(n.target))
        return {
            s for s in out
            if s is not None and s.storage == "automatic" and not s.address_taken
            and isinstance(s.type, T.PointerType)
        }

    def handle(self, e):
        e = strip_casts(e)
        if isinstance(e, ast.Ident):
            sym = self.unit.symbol_of(e)
            if sym in self.handles:
                return sym
        return None

    # -- findings -----------------------------------------------------------

    def record(self, rule_kind, node, kind, message):
        if self.recording and self.ctx.live(node):
            self.findings.setdefault((rule_kind, node), (node, kind, message))

    # -- transfer -----------------------------------------------------------

    def escape(self, st, h, node):
        entries = st.get(h)
        if not entries:
            return st
        if any(s == "owned" for s, _, _ in entries) and not self.ctx.heuristic:
            self.record("escape", node, POSSIBLE,
                        f"handle '{h.name}' escapes; its ownership is no longer tracked")
        st = dict(st)
        st[h] = frozenset(("escaped", a, t) if s == "owned" else (s, a, t) for s, a, t in entries)
        return st

    def release(self, st, h, call):
        name = self.unit.callee(call).name
        want = RELEASE[self.unit.callee_tag(call)]
        out = set()
        for s, a, t in st.get(h, ()):
            if s == "owned":
                if t != want:
                    self.record("mismatch", call, DEFINITE,
                                f"resource acquired at line {a.span.line} is released with {name}")
                out.add(("released", a, t))
            elif s == "released":
                self.record("double", call, DEFINITE, f"handle '{h.name}' may be released twice")
                out.add((s, a, t))
            else:
                out.add((s, a, t))
        st = dict(st)
        st[h] = frozenset(out)
        return st

    def bind(self, st, h, value, node):
        if any(s == "owned" for s, _, _ in st.get(h, ())):
            self.record("overwrite", node, DEFINITE,
                        f"handle '{h.name}' is overwritten while it may still own a resource")
        v = strip_casts(value)
        tag = self._acquire_tag(v)
        st = dict(st)
        st[h] = frozenset({("owned", v, tag)}) if tag else frozenset({UNOWNED})
        return st

    def store(self, st, target, value, node):
        """``target = value`` (also initialization when target is a symbol)."""
        src = self.handle(value)
        if isinstance(target, ast.Ident):
            h = self.handle(target)
        else:
            h = None if isinstance(target, ast.Expr) else target
        if src is not None and src is not h:
            st = self.escape(st, src, node)
        if h is not None:
            st = self.bind(st, h, value, node)
        return st

    def call(self, st, call):
        tag = self.unit.callee_tag(call)
        callee = self.unit.callee(call)
        if tag in RELEASE or (tag == MEMORY_ACQUIRE and callee.name == "realloc"):
            h = self.handle(call.args[0]) if call.args else None
            if h is not None:
                if tag in RELEASE:
                    return self.release(st, h, call)
                st = dict(st)
                st[h] = frozenset(("released", a, t) if s == "owned" else (s, a, t) for s, a, t in st.get(h, ()))
                return st
        if callee is not None and callee.builtin:
            return st
        for a in call.args:
            h = self.handle(a)
            if h is not None:
                st = self.escape(st, h, call)
        return st

    def expr(self, st, e):
        if isinstance(e, ast.Assign):
            st = self.expr(st, e.value)
            if not isinstance(e.target, ast.Ident):
                st = self.expr(st, e.target)
            if e.op == "=":
                st = self.store(st, e.target, e.value, e)
            return st
        if isinstance(e, ast.Call):
            for a in e.args:
                st = self.expr(st, a)
            return self.call(st, e)
        if isinstance(e, ast.Conditional):
            st = self.expr(st, e.cond)
            return join(self.expr(st, e.then), self.expr(st, e.otherwise))
        if isinstance(e, ast.Binary) and e.op in ("&&", "||"):
            st = self.expr(st, e.left)
            return join(st, self.expr(st, e.right))
        if isinstance(e, ast.InitList):
            for item in e.items:
                st = self.expr(st, item)
                h = self.handle(item)
                if h is not None:
                    st = self.escape(st, h, item)
            return st
        if isinstance(e, ast.SizeofExpr):
            return st
        for c in e.children():
            if isinstance(c, ast.Expr):
                st = self.expr(st, c)
        return st

    def element(self, st, el):
        if el.decl is not None:
            for d in el.decl.declarators:
                sym = self.unit.declared.get(d)
                if d.init is not None:
                    st = self.expr(st, d.init)
                    if sym in self.handles:
                        st = self.store(st, sym, d.init, d)
                    else:
                        src = self.handle(d.init)
                        if src is not None:
                            st = self.escape(st, src, d)
                elif sym in self.handles:
                    st = dict(st)
                    st[sym] = frozenset({UNOWNED})
            return st
        if el.expr is None:
            return st
        st = self.expr(st, el.expr)
        if el.kind == "return":
            h = self.handle(el.expr)
            if h is not None:
                st = self.escape(st, h, el.expr)
        return st

    def null_test(self, e):
        """(handle, branch on which it is null) for a null test."""
        e = strip_casts(e)
        if isinstance(e, ast.Unary) and e.op == "!":
            h, null_on = self.null_test(e.operand)
            return h, (None if null_on is None else not null_on)
        if isinstance(e, ast.Assign) and e.op == "=":
            return self.handle(e.target), False
        if isinstance(e, ast.Binary) and e.op in ("==", "!="):
            for a, b in ((e.left, e.right), (e.right, e.left)):
                if is_null(self.unit, b):
                    h, null_on = self.null_test(a)
                    if h is not None:
                        return h, (not null_on) if e.op == "==" else null_on
            return None, None
        h = self.handle(e)
        return (h, False) if h is not None else (None, None)

    def edge_state(self, st, edge):
        term = self.cfg.blocks[edge.src].terminator
        if term is None or term.kind != "cond" or edge.kind not in ("branch-true", "branch-false"):
            return st
        h, null_on = self.null_test(term.expr)
        if h is None or (edge.kind == "branch-true") != null_on:
            return st
        st = dict(st)
        st[h] = frozenset(UNOWNED if s == "owned" else (s, a, t) for s, a, t in st.get(h, ()))
        return st

    # -- driver -------------------------------------------------------------

    def block_out(self, b, st):
        for el in self.cfg.blocks[b].elements:
            st = self.element(st, el)
        return st

    def run(self):
        if not self.handles:
            return
        cfg = self.cfg
        init = {h: frozenset({UNOWNED}) for h in self.handles}
        state_in = {b.id: None for b in cfg.blocks}
        state_in[cfg.entry] = init
        changed = True
        while changed:
            changed = False
            for b in cfg.blocks:
                if b.id == cfg.entry:
                    continue
                incoming = [
                    self.edge_state(self.block_out(e.src, state_in[e.src]), e)
                    for e in cfg.pred(b.id) if state_in[e.src] is not None
                ]
                new = join(*incoming) if incoming else None
                if new != state_in[b.id]:
                    state_in[b.id] = new
                    changed = True
        self.recording = True
        merged = set()
        for b in cfg.blocks:
            st = state_in[b.id]
            if st is None:
                continue
            self.block_out(b.id, st)
            for h, entries in st.items():
                owned = {a for s, a, _ in entries if s == "owned"}
                released = {a for s, a, _ in entries if s == "released"}
                if b.id == cfg.exit:
                    for a in owned:
                        if a not in merged:
                            self.record("leak", a, DEFINITE,
                                        f"resource acquired by '{h.name}' is not released on some path")
                else:
                    for a in owned & released:
                        if a not in merged:
                            merged.add(a)
                            self.record("leak", a, DEFINITE,
                                        f"resource acquired by '{h.name}' is released on some paths only")


def join(*states):
    out: dict = {}
    for st in states:
        for h, entries in st.items():
            out[h] = out.get(h, frozenset()) | entries
    return out


def check_stream_ownership_R22_1(ctx: CheckContext):
    unit = ctx.unit
    for name in sorted(ctx.facts.functions):
        f = _Function(ctx, ctx.facts.functions[name].cfg)
        f.run()
        for node, kind, message in f.findings.values():
            ctx.report("R22.1", CHECK_OWNERSHIP, kind, OVER, node, message)
    for n in ctx.exprs():
        if isinstance(n, ast.ExprStmt) and n.expr is not None:
            e = strip_casts(n.expr)
            if isinstance(e, ast.Call) and unit.callee_tag(e) in ACQUIRE:
                ctx.report("R22.1", CHECK_OWNERSHIP, DEFINITE, OVER, e,
                           f"result of {unit.callee(e).name} is discarded")
