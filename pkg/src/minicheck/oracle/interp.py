"""Fuel-bounded reference interpreter over a typed unit.

Every statement execution spends one unit of fuel, except purely
structural statements (compound blocks, null statements and labels),
which are neither counted nor recorded.  The run ends at the first
undefined behaviour, at exit, at a call into an unknown external
function, or when fuel runs out.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Optional

from ..flow.dataflow import is_tracked
from ..frontend import ast
from ..sema import types as T
from ..sema.consteval import ArithmeticFault, convert_int, fold, int_binop, int_unop
from . import memory as M
from .memory import NULL, UNINIT, Fn, Loc, Obj, Ptr, RuntimeFault

TERMINATED = "terminated"
FUEL_EXHAUSTED = "fuel-exhausted"
RUNTIME_ERROR = "runtime-error"
INCONCLUSIVE = "inconclusive"

RUNTIME_ERRORS = (
    "division-by-zero",
    "signed-overflow",
    "uninitialized-read",
    "null-deref",
    "oob-access",
    "bad-free",
)

MAX_CALL_DEPTH = 400

# Statements that only give structure to a body.
_FREE = (ast.Compound, ast.Labeled, ast.Case, ast.Default)


class OracleError(Exception):
    """The requested run cannot be set up (bad entry or arguments)."""


@dataclass
class ExecEvent:
    stmt_id: int

    def render(self) -> str:
        return f"EXEC {self.stmt_id}"


@dataclass(eq=False)
class StoreEvent:
    stmt_id: int
    sym: object
    live: bool = False

    def render(self) -> str:
        return f"STORE {self.stmt_id} {self.sym.name} {'live' if self.live else 'dead'}"


@dataclass
class Outcome:
    kind: str
    status: Optional[int] = None  # exit status for terminated runs
    detail: str = ""  # error kind or inconclusive reason
    where: str = ""

    def render(self) -> str:
        parts = ["OUTCOME", self.kind]
        if self.kind == TERMINATED and self.status is not None:
            parts.append(str(self.status))
        if self.detail:
            parts.append(self.detail)
        if self.where:
            parts.append(f"at {self.where}")
        return " ".join(parts)


@dataclass
class ExecutionTrace:
    entry: str
    inputs: tuple
    fuel: int
    events: list = field(default_factory=list)
    outcome: Outcome = None

    @property
    def executed(self) -> list[int]:
        return [e.stmt_id for e in self.events if isinstance(e, ExecEvent)]

    @property
    def stores(self) -> list[StoreEvent]:
        return [e for e in self.events if isinstance(e, StoreEvent)]

    @property
    def witnessed_live_stores(self) -> set:
        return {(e.stmt_id, e.sym) for e in self.stores if e.live}

    def dump(self) -> str:
        lines = [e.render() for e in self.events]
        lines.append(self.outcome.render())
        return "\n".join(lines) + "\n"


# -- control signals -----------------------------------------------------------


class _Break(Exception):
    pass


class _Continue(Exception):
    pass


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Goto(Exception):
    def __init__(self, label, node):
        self.label = label
        self.node = node


class _Exit(Exception):
    def __init__(self, status):
        self.status = status


class _FuelOut(Exception):
    pass


class _Inconclusive(Exception):
    def __init__(self, reason, node=None):
        super().__init__(reason)
        self.reason = reason
        self.node = node


class Interpreter:
    def __init__(self, unit, fuel: int):
        self.unit = unit
        self.fuel = fuel
        self.events: list = []
        self.functions = unit.functions
        self.statics: dict = {}
        self.frames: list[dict] = []
        self.strings: dict = {}
        self.owners: dict = {}
        self._setup_statics()

    # -- entry ----------------------------------------------------------------

    def run(self, entry: str, args) -> Outcome:
        fn = self.functions.get(entry)
        if fn is None:
            raise OracleError(f"no function named '{entry}'")
        ftype = self.unit.declared[fn].type
        if len(args) != len(ftype.params):
            raise OracleError(f"'{entry}' takes {len(ftype.params)} argument(s), got {len(args)}")
        for pt in ftype.params:
            if not T.decay(pt).is_integer:
                raise OracleError(f"'{entry}' has a non-integer parameter")
        try:
            value = self.call_function(fn, [int(a) for a in args], fn)
            status = value if isinstance(value, int) else None
            return Outcome(TERMINATED, status)
        except _Exit as e:
            return Outcome(TERMINATED, e.status)
        except _FuelOut:
            return Outcome(FUEL_EXHAUSTED)
        except ArithmeticFault as e:
            return Outcome(RUNTIME_ERROR, detail=e.kind, where=self._where(getattr(e, "node", None)))
        except RuntimeFault as e:
            return Outcome(RUNTIME_ERROR, detail=e.kind, where=self._where(e.node))
        except _Inconclusive as e:
            return Outcome(INCONCLUSIVE, detail=e.reason, where=self._where(e.node))

    def _where(self, node) -> str:
        return str(node.span) if node is not None else ""

    # -- statics ----------------------------------------------------------------

    def _static_key(self, sym):
        return sym.name if sym.function is None else sym

    def _setup_statics(self):
        for name in ("stdin", "stdout", "stderr"):
            stream = Obj("stream", [0], [None])
            obj = Obj("static", [Ptr(stream, 0)], [T.PointerType(pointee=T.FILE)])
            self.statics[name] = obj
        self.statics["errno"] = Obj("static", [0], [T.INT])
        pending = []
        for sym in self.unit.symbols:
            if sym.storage not in ("static", "extern") or sym.builtin:
                continue
            if isinstance(sym.type, T.FunctionType):
                continue
            key = self._static_key(sym)
            if key in self.statics:
                continue
            obj = M.new_object("static", sym.type, sym=sym, zero=True)
            self.statics[key] = obj
            decl = sym.decl
            if isinstance(decl, ast.InitDeclarator) and decl.init is not None:
                pending.append((obj, sym.type, decl.init))
        # File-scope definitions may be spread over several declarations.
        for item in self.unit.ast.items:
            if isinstance(item, ast.Declaration):
                for d in item.declarators:
                    sym = self.unit.declared.get(d)
                    if sym is None or d.init is None or sym.decl is d:
                        continue
                    key = self._static_key(sym)
                    if key in self.statics:
                        pending.append((self.statics[key], sym.type, d.init))
        for obj, t, init in pending:
            self.initialize(obj, 0, t, init, track=False)

    # -- fuel and trace -----------------------------------------------------------

    def tick(self, s: ast.Stmt):
        if isinstance(s, _FREE) or (isinstance(s, ast.ExprStmt) and s.expr is None):
            return
        if self.fuel <= 0:
            raise _FuelOut()
        self.fuel -= 1
        self.events.append(ExecEvent(s.stmt_id))

    def owner(self, node) -> int:
        sid = self.owners.get(node)
        if sid is None:
            sid = self.unit.enclosing_stmt(node).stmt_id
            self.owners[node] = sid
        return sid

    # -- functions --------------------------------------------------------------------

    def call_function(self, fn: ast.FunctionDef, args: list, site):
        if len(self.frames) >= MAX_CALL_DEPTH:
            raise _Inconclusive("call depth limit reached", site)
        ftype = self.unit.declared[fn].type
        frame: dict = {}
        for p, pt, value in zip(fn.params, ftype.params, args):
            sym = self.unit.declared[p]
            obj = M.new_object("stack", sym.type, sym=sym)
            self.write(Loc(obj, 0, sym.type), value, site)
            frame[sym] = obj
        self.frames.append(frame)
        try:
            self.exec_stmt(fn.body)
            result = None
        except _Return as r:
            result = r.value
        except (_Break, _Continue):  # pragma: no cover - rejected by the CFG builder
            raise _Inconclusive("stray break or continue", site)
        except _Goto as g:
            raise _Inconclusive(f"goto '{g.label}' into a nested block is not supported", g.node)
        finally:
            for obj in self.frames.pop().values():
                obj.alive = False
        if result is not None and not isinstance(ftype.ret, T.VoidType):
            result = self.convert(result, ftype.ret, site)
        return result

    # -- statements ---------------------------------------------------------------------

    def exec_stmt(self, s: ast.Stmt):
        self.tick(s)
        if isinstance(s, ast.Compound):
            self.exec_items(s.items)
        elif isinstance(s, ast.ExprStmt):
            if s.expr is not None:
                self.eval(s.expr)
        elif isinstance(s, ast.DeclStmt):
            self.declare(s.decl)
        elif isinstance(s, ast.If):
            if self.truth(self.eval(s.cond)):
                self.exec_stmt(s.then)
            elif s.otherwise is not None:
                self.exec_stmt(s.otherwise)
        elif isinstance(s, ast.While):
            while self.truth(self.eval(s.cond)):
                if self.loop_body(s.body):
                    break
                self.tick(s)
        elif isinstance(s, ast.DoWhile):
            while True:
                if self.loop_body(s.body):
                    break
                if not self.truth(self.eval(s.cond)):
                    break
                self.tick(s)
        elif isinstance(s, ast.For):
            self.exec_for(s)
        elif isinstance(s, ast.Switch):
            self.exec_switch(s)
        elif isinstance(s, (ast.Labeled, ast.Case, ast.Default)):
            self.exec_stmt(s.stmt)
        elif isinstance(s, ast.Break):
            raise _Break()
        elif isinstance(s, ast.Continue):
            raise _Continue()
        elif isinstance(s, ast.Goto):
            raise _Goto(s.label, s)
        elif isinstance(s, ast.Return):
            raise _Return(self.eval(s.value) if s.value is not None else None)
        else:  # pragma: no cover
            raise _Inconclusive(f"unsupported statement {type(s).__name__}", s)

    def loop_body(self, body) -> bool:
        """Run one iteration; True when the loop is left by ``break``."""
        try:
            self.exec_stmt(body)
        except _Break:
            return True
        except _Continue:
            pass
        return False

    def exec_for(self, s: ast.For):
        if isinstance(s.init, ast.Declaration):
            self.declare(s.init)
        elif s.init is not None:
            self.eval(s.init)
        while True:
            if s.cond is not None and not self.truth(self.eval(s.cond)):
                return
            if self.loop_body(s.body):
                return
            if s.step is not None:
                self.eval(s.step)
            self.tick(s)

    def exec_items(self, items, start=0):
        i = start
        while i < len(items):
            try:
                for j in range(i, len(items)):
                    self.exec_stmt(items[j])
                return
            except _Goto as g:
                target = _label_index(items, g.label)
                if target is None:
                    raise
                i = target

    def exec_switch(self, s: ast.Switch):
        value = self.eval(s.cond)
        body = s.body
        items = body.items if isinstance(body, ast.Compound) else [body]
        nested = [n for n in _switch_labels(body)]
        index, default = None, None
        for i, item in enumerate(items):
            for lab in _label_chain(item):
                if isinstance(lab, ast.Default):
                    default = i
                elif isinstance(lab, ast.Case) and index is None:
                    if fold(self.unit, lab.value) == value:
                        index = i
        top = {id(lab) for item in items for lab in _label_chain(item)}
        if any(id(n) not in top for n in nested):
            raise _Inconclusive("case label nested inside a switch body statement", s)
        if index is None:
            index = default
        if index is None:
            return
        try:
            self.exec_items(items, index)
        except _Break:
            pass

    def declare(self, decl: ast.Declaration):
        frame = self.frames[-1]
        for d in decl.declarators:
            sym = self.unit.declared.get(d)
            if sym is None or sym.storage in ("static", "extern", "typedef-name", "function"):
                continue
            if isinstance(sym.type, T.FunctionType):
                continue
            obj = M.new_object("stack", sym.type, sym=sym)
            old = frame.get(sym)
            if old is not None:
                old.alive = False
            frame[sym] = obj
            if d.init is not None:
                if isinstance(sym.type, (T.ArrayType, T.RecordType)):
                    obj.cells = [M.zero_of(t) for t in obj.types]
                self.initialize(obj, 0, sym.type, d.init, node=d)

    def initialize(self, obj: Obj, offset: int, t, init, track=True, node=None):
        t = t.unqualified()
        if isinstance(t, T.ArrayType) and isinstance(init, ast.StringLit) and T.is_char_type(t.element):
            data = list(init.value) + [0]
            n = t.length if t.length is not None else len(data)
            for i in range(n):
                obj.cells[offset + i] = M.convert_char(data[i]) if i < len(data) else 0
            return
        if isinstance(t, (T.ArrayType, T.RecordType)):
            if not isinstance(init, ast.InitList):
                value = self.eval(init)
                self.write(Loc(obj, offset, t), value, init)
                return
            self.init_aggregate(obj, offset, t, init.items)
            return
        if isinstance(init, ast.InitList):
            if not init.items:
                return
            init = init.items[0]
        value = self.eval(init)
        loc = Loc(obj, offset, t)
        if track and node is not None:
            self.store(loc, value, node)
        else:
            self.write(loc, value, init)

    def init_aggregate(self, obj, offset, t, items):
        if isinstance(t, T.ArrayType):
            subs = [(offset + i * M.cellcount(t.element), t.element)
                    for i in range(t.length or len(items))]
        elif t.info.kind == "union":
            subs = [(offset, t.info.members[0][1])] if t.info.members else []
        else:
            subs, off = [], offset
            for _, mt in t.info.members:
                subs.append((off, mt))
                off += len(M.flatten(mt))
        if any(isinstance(i, ast.InitList) for i in items) or all(
            not isinstance(st, (T.ArrayType, T.RecordType)) for _, st in subs
        ):
            for (off, st), item in zip(subs, items):
                self.initialize(obj, off, st, item, track=False)
            return
        # Brace elision: scalars fill the leaves in layout order.
        for i, item in enumerate(items[: len(M.flatten(t))]):
            leaf = obj.types[offset + i]
            self.write(Loc(obj, offset + i, leaf), self.eval(item), item)

    # -- memory access ------------------------------------------------------------------

    def check_access(self, loc: Loc, node):
        obj = loc.obj
        if obj is None:
            raise RuntimeFault("null-deref", "dereference of a null pointer", node)
        if not obj.alive or obj.kind == "wild":
            raise RuntimeFault("oob-access", "access to an object outside its lifetime", node)
        if not 0 <= loc.offset < len(obj.cells):
            raise RuntimeFault("oob-access", "access outside the bounds of an object", node)

    def read(self, loc: Loc, node):
        t = loc.type.unqualified()
        if isinstance(t, (T.ArrayType, T.RecordType)):
            n = len(M.flatten(t))
            if n == 0:
                return ()
            self.check_access(loc, node)
            self.check_access(Loc(loc.obj, loc.offset + n - 1, t), node)
            return tuple(loc.obj.cells[loc.offset:loc.offset + n])
        if isinstance(t, T.OpaqueType):
            raise _Inconclusive("copy of an opaque object", node)
        self.check_access(loc, node)
        value = loc.obj.cells[loc.offset]
        if value is UNINIT:
            raise RuntimeFault("uninitialized-read", "read of an uninitialized object", node)
        return value

    def write(self, loc: Loc, value, node):
        t = loc.type.unqualified()
        if isinstance(t, (T.ArrayType, T.RecordType)):
            n = len(value)
            if n:
                self.check_access(loc, node)
                self.check_access(Loc(loc.obj, loc.offset + n - 1, t), node)
                loc.obj.cells[loc.offset:loc.offset + n] = list(value)
            return value
        self.check_access(loc, node)
        value = self.convert(value, t, node)
        loc.obj.cells[loc.offset] = value
        if loc.obj.types[loc.offset] is None:
            loc.obj.types[loc.offset] = t
        return value

    def store(self, loc: Loc, value, node):
        """Write through an assignment, recording stores to tracked locals."""
        value = self.write(loc, value, node)
        sym = loc.obj.sym
        if loc.obj.kind == "stack" and sym is not None and is_tracked(sym):
            ev = StoreEvent(self.owner(node), sym)
            self.events.append(ev)
            loc.obj.pending = ev
        return value

    def lookup(self, sym, node) -> Obj:
        if self.frames and sym in self.frames[-1]:
            return self.frames[-1][sym]
        key = self._static_key(sym)
        obj = self.statics.get(key)
        if obj is None:
            raise _Inconclusive(f"object '{sym.name}' is not available", node)
        return obj

    # -- lvalues --------------------------------------------------------------------------

    def lvalue(self, e) -> Loc:
        t = self.unit.type_of(e)
        if isinstance(e, ast.Ident):
            sym = self.unit.resolutions[e]
            return Loc(self.lookup(sym, e), 0, sym.type)
        if isinstance(e, ast.Unary) and e.op == "*":
            p = self.eval(e.operand)
            return self.deref(p, t, e)
        if isinstance(e, ast.Index):
            base = self.eval(e.base)
            idx = self.eval(e.index)
            if isinstance(idx, Ptr):
                base, idx = idx, base
            return self.deref(self.offset_ptr(base, idx, t, e), t, e)
        if isinstance(e, ast.Member):
            if e.arrow:
                p = self.eval(e.obj)
                rec = T.decay(self.unit.type_of(e.obj)).pointee.unqualified()
                base = self.deref(p, rec, e)
            else:
                base = self.lvalue(e.obj)
                rec = base.type.unqualified()
            off, mt = M.member_offset(rec, e.name)
            return Loc(base.obj, base.offset + off, mt)
        if isinstance(e, ast.StringLit):
            return Loc(self.string(e), 0, t)
        raise _Inconclusive(f"not an lvalue: {type(e).__name__}", e)

    def deref(self, p, t, node) -> Loc:
        if isinstance(p, Fn):
            raise _Inconclusive("object access through a function pointer", node)
        if not isinstance(p, Ptr):
            raise _Inconclusive("dereference of a non-pointer value", node)
        if p.is_null:
            raise RuntimeFault("null-deref", "dereference of a null pointer", node)
        return Loc(p.obj, p.offset, t)

    def string(self, e: ast.StringLit) -> Obj:
        obj = self.strings.get(e)
        if obj is None:
            data = [M.convert_char(b) for b in e.value] + [0]
            obj = Obj("string", data, [T.CHAR] * len(data), readonly=True)
            self.strings[e] = obj
        return obj

    def offset_ptr(self, p, n: int, pointee, node) -> Ptr:
        if not isinstance(p, Ptr):
            raise _Inconclusive("arithmetic on a non-pointer value", node)
        if p.is_null:
            if n == 0:
                return p
            raise RuntimeFault("null-deref", "arithmetic on a null pointer", node)
        return Ptr(p.obj, p.offset + n * M.cellcount(pointee))

    # -- expressions ----------------------------------------------------------------------

    def eval(self, e):
        value = self.raw(e)
        target = self.unit.conversions.get(e)
        if target is not None:
            value = self.convert(value, target, e)
        return value

    def raw(self, e):
        u = self.unit
        if isinstance(e, ast.IntConst):
            return convert_int(e.value, u.type_of(e))
        if isinstance(e, ast.CharConst):
            return e.value
        if isinstance(e, ast.FloatConst):
            return M.round_float(e.value, u.type_of(e))
        if isinstance(e, ast.StringLit):
            return Ptr(self.string(e), 0)
        if isinstance(e, ast.Ident):
            sym = u.resolutions[e]
            if sym.storage == "enumerator":
                return sym.value
            if sym.storage == "function":
                return Fn(sym.name)
            return self.rvalue(e)
        if isinstance(e, (ast.SizeofExpr, ast.SizeofType)):
            return u.sizes[e]
        if isinstance(e, (ast.Index, ast.Member)) or (isinstance(e, ast.Unary) and e.op == "*"):
            return self.rvalue(e)
        if isinstance(e, ast.Unary):
            return self.unary(e)
        if isinstance(e, ast.Postfix):
            return self.incdec(e, e.operand, e.op, postfix=True)
        if isinstance(e, ast.Binary):
            return self.binary(e)
        if isinstance(e, ast.Assign):
            return self.assign(e)
        if isinstance(e, ast.Conditional):
            return self.eval(e.then if self.truth(self.eval(e.cond)) else e.otherwise)
        if isinstance(e, ast.Cast):
            value = self.eval(e.operand)
            t = u.type_of(e)
            if isinstance(t, T.VoidType):
                return None
            return self.convert(value, t, e)
        if isinstance(e, ast.Call):
            return self.call(e)
        raise _Inconclusive(f"unsupported expression {type(e).__name__}", e)

    def rvalue(self, e):
        t = self.unit.type_of(e)
        if isinstance(t, T.FunctionType):
            if isinstance(e, ast.Unary):
                return self.eval(e.operand)
            return Fn(self.unit.resolutions[e].name)
        loc = self.lvalue(e)
        if isinstance(t, T.ArrayType):
            return Ptr(loc.obj, loc.offset)
        value = self.read(loc, e)
        if isinstance(e, ast.Ident) and loc.obj.pending is not None:
            loc.obj.pending.live = True
            loc.obj.pending = None
        return value

    def truth(self, v) -> bool:
        if isinstance(v, Ptr):
            return not v.is_null
        if isinstance(v, Fn):
            return True
        return v != 0

    def unary(self, e: ast.Unary):
        if e.op == "&":
            if isinstance(self.unit.type_of(e.operand), T.FunctionType):
                return self.eval(e.operand)
            loc = self.lvalue(e.operand)
            return Ptr(loc.obj, loc.offset)
        if e.op in ("++", "--"):
            return self.incdec(e, e.operand, e.op, postfix=False)
        v = self.eval(e.operand)
        if e.op == "!":
            return int(not self.truth(v))
        t = self.unit.arith_types[e]
        if isinstance(t, T.FloatType):
            return M.round_float(-v if e.op == "-" else v, t)
        return self._int(lambda: int_unop(e.op, v, t), e)

    def _int(self, thunk, node):
        try:
            return thunk()
        except ArithmeticFault as f:
            raise RuntimeFault(f.kind, str(f), node) from None

    def incdec(self, e, target, op, postfix):
        loc = self.lvalue(target)
        old = self.read(loc, target)
        t = loc.type.unqualified()
        delta = 1 if op == "++" else -1
        if isinstance(t, T.PointerType):
            new = self.offset_ptr(old, delta, t.pointee, e)
        elif isinstance(t, T.FloatType):
            new = M.round_float(old + delta, t)
        else:
            pt = T.promote(t)
            new = self._int(lambda: int_binop("+", convert_int(old, pt), delta, pt), e)
        self._note_read(target, loc)
        self.store(loc, new, e)
        return old if postfix else self.convert(new, t, e)

    def _note_read(self, target, loc):
        if isinstance(target, ast.Ident) and loc.obj.pending is not None:
            loc.obj.pending.live = True
            loc.obj.pending = None

    def binary(self, e: ast.Binary):
        op = e.op
        if op == ",":
            self.eval(e.left)
            return self.eval(e.right)
        if op == "&&":
            return int(self.truth(self.eval(e.left)) and self.truth(self.eval(e.right)))
        if op == "||":
            return int(self.truth(self.eval(e.left)) or self.truth(self.eval(e.right)))
        a = self.eval(e.left)
        b = self.eval(e.right)
        return self.arith(op, a, b, e, self.unit.arith_types.get(e))

    def arith(self, op, a, b, e, at):
        if isinstance(a, (Ptr, Fn)) or isinstance(b, (Ptr, Fn)):
            return self.pointer_op(op, a, b, e)
        if isinstance(at, T.FloatType):
            return self.float_op(op, float(a), float(b), at)
        return self._int(lambda: int_binop(op, a, b, at), e)

    def float_op(self, op, a, b, t):
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        elif op == "/":
            if b == 0:
                r = math.nan if a == 0 or math.isnan(a) else math.copysign(math.inf, a) * math.copysign(1, b)
            else:
                r = a / b
        else:
            return int({
                "<": a < b, ">": a > b, "<=": a <= b, ">=": a >= b, "==": a == b, "!=": a != b,
            }[op])
        return M.round_float(r, t)

    def pointer_op(self, op, a, b, e):
        if op in ("+", "-") and isinstance(a, Ptr) and isinstance(b, int):
            pointee = T.decay(self.unit.type_of(e)).pointee
            return self.offset_ptr(a, b if op == "+" else -b, pointee, e)
        if op == "+" and isinstance(b, Ptr) and isinstance(a, int):
            pointee = T.decay(self.unit.type_of(e)).pointee
            return self.offset_ptr(b, a, pointee, e)
        if isinstance(a, int) and a == 0:
            a = NULL
        if isinstance(b, int) and b == 0:
            b = NULL
        if op == "-" and isinstance(a, Ptr) and isinstance(b, Ptr):
            if a.obj is not b.obj:
                raise RuntimeFault("oob-access", "subtraction of pointers into different objects", e)
            pointee = T.decay(self.unit.type_of(e.left)).pointee
            return (a.offset - b.offset) // M.cellcount(pointee)
        if op in ("==", "!="):
            same = a == b
            return int(same if op == "==" else not same)
        if op in ("<", ">", "<=", ">=") and isinstance(a, Ptr) and isinstance(b, Ptr):
            ka, kb = (a.obj.serial if a.obj else 0, a.offset), (b.obj.serial if b.obj else 0, b.offset)
            return int({"<": ka < kb, ">": ka > kb, "<=": ka <= kb, ">=": ka >= kb}[op])
        raise _Inconclusive(f"unsupported pointer operation '{op}'", e)

    def assign(self, e: ast.Assign):
        if e.op == "=":
            value = self.eval(e.value)
            loc = self.lvalue(e.target)
            return self.store(loc, value, e)
        loc = self.lvalue(e.target)
        old = self.read(loc, e.target)
        value = self.eval(e.value)
        op = e.op[:-1]
        t = loc.type.unqualified()
        if isinstance(t, T.PointerType):
            new = self.offset_ptr(old, value if op == "+" else -value, t.pointee, e)
        else:
            at = self.unit.arith_types[e]
            lhs = self.convert(old, at, e)
            new = self.arith(op, lhs, value, e, at)
        self._note_read(e.target, loc)
        return self.store(loc, new, e)

    # -- conversions ----------------------------------------------------------------------

    def convert(self, value, t, node):
        t = t.unqualified() if isinstance(t, T.TypeRepr) else t
        if value is None:
            raise RuntimeFault("uninitialized-read", "use of a missing return value", node)
        if isinstance(t, (T.IntType, T.EnumType)):
            if isinstance(value, float):
                if isinstance(t, T.IntType) and t.name == "_Bool":
                    return int(value != 0)
                if math.isnan(value) or math.isinf(value):
                    raise RuntimeFault("signed-overflow", "conversion of a non-finite value", node)
                iv = math.trunc(value)
                lo, hi = M.dialect.int_range(t.width, t.signed)
                if not lo <= iv <= hi:
                    raise RuntimeFault("signed-overflow", "floating value out of range", node)
                return iv
            if isinstance(value, Ptr):
                if isinstance(t, T.IntType) and t.name == "_Bool":
                    return int(not value.is_null)
                return convert_int(value.address(), t)
            if isinstance(value, Fn):
                return 1
            return convert_int(value, t)
        if isinstance(t, T.FloatType):
            if isinstance(value, (Ptr, Fn)):
                raise _Inconclusive("pointer converted to floating", node)
            return M.round_float(float(value), t)
        if isinstance(t, T.PointerType):
            if isinstance(value, (Ptr, Fn)):
                return value
            if isinstance(value, float):
                raise _Inconclusive("floating value converted to pointer", node)
            return NULL if value == 0 else Ptr(Obj("wild", [], []), 0)
        return value

    # -- calls --------------------------------------------------------------------------

    def call(self, e: ast.Call):
        target = self.eval(e.func)
        if isinstance(target, Ptr):
            if target.is_null:
                raise RuntimeFault("null-deref", "call through a null function pointer", e)
            raise _Inconclusive("call through a non-function pointer", e)
        if not isinstance(target, Fn):
            raise _Inconclusive("call of a non-function value", e)
        args = [self.eval(a) for a in e.args]
        fn = self.functions.get(target.name)
        if fn is not None:
            return self.call_function(fn, args, e)
        from .libc import call_builtin

        return call_builtin(self, target.name, args, e)


def _label_chain(item):
    while isinstance(item, (ast.Labeled, ast.Case, ast.Default)):
        yield item
        item = item.stmt


def _label_index(items, label) -> Optional[int]:
    for i, item in enumerate(items):
        for lab in _label_chain(item):
            if isinstance(lab, ast.Labeled) and lab.label == label:
                return i
    return None


def _switch_labels(body):
    """Case and default labels belonging to a switch body."""
    stack = [body]
    while stack:
        n = stack.pop()
        if isinstance(n, (ast.Case, ast.Default)):
            yield n
        if isinstance(n, ast.Switch) and n is not body:
            continue
        stack.extend(c for c in n.children() if isinstance(c, ast.Stmt))


def run(unit, entry: str, args=(), fuel: int = 10_000) -> ExecutionTrace:
    """Execute ``entry`` on integer ``args`` with a statement budget."""
    interp = Interpreter(unit, fuel)
    trace = ExecutionTrace(entry, tuple(args), fuel)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 50 * MAX_CALL_DEPTH))
    try:
        trace.outcome = interp.run(entry, list(args))
    finally:
        sys.setrecursionlimit(limit)
    trace.events = interp.events
    return trace
