"""Per-function control-flow graphs.

Each statement contributes exactly one *element* carrying its ``stmt_id``.
Expressions evaluated on behalf of a statement without being the statement
itself (a ``for`` step, the second operand of a lowered ``&&`` in a
condition) get elements with ``stmt_id=None`` and ``owner`` set to the
statement they belong to.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..frontend import ast
from ..frontend.tokens import FrontendError

EDGE_KINDS = ("fallthrough", "branch-true", "branch-false", "switch-case", "loop-back", "goto")


class CfgError(FrontendError):
    pass


@dataclass(eq=False)
class Element:
    kind: str  # marker | decl | expr | cond | switch | return
    stmt_id: Optional[int]
    owner: int
    node: ast.Node
    expr: Optional[ast.Expr] = None
    decl: Optional[ast.Declaration] = None

    def __repr__(self):
        sid = self.stmt_id if self.stmt_id is not None else f"({self.owner})"
        return f"<{self.kind} {sid}>"


@dataclass(eq=False)
class BasicBlock:
    id: int
    elements: list[Element] = field(default_factory=list)

    @property
    def stmt_ids(self) -> list[int]:
        return [e.stmt_id for e in self.elements if e.stmt_id is not None]

    @property
    def terminator(self) -> Optional[Element]:
        if self.elements and self.elements[-1].kind in ("cond", "switch"):
            return self.elements[-1]
        return None


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    kind: str
    # Case value for switch-case edges, or "default".
    value: object = None

    def label(self) -> str:
        if self.kind == "switch-case":
            return f"switch-case({_case_text(self.value)})"
        return self.kind


def _case_text(value) -> str:
    """Compact rendering of a case label for the debug dump."""
    if isinstance(value, (ast.IntConst, ast.CharConst)):
        return value.text
    if isinstance(value, ast.Ident):
        return value.name
    if isinstance(value, ast.Unary) and value.op in "-+~":
        return value.op + _case_text(value.operand)
    if isinstance(value, ast.Node):
        return f"@{value.span.line}:{value.span.column}"
    return str(value)


@dataclass(eq=False)
class Cfg:
    function: ast.FunctionDef
    blocks: list[BasicBlock]
    entry: int
    exit: int
    edges: list[Edge]

    def __post_init__(self):
        self._succ = {b.id: [] for b in self.blocks}
        self._pred = {b.id: [] for b in self.blocks}
        for e in self.edges:
            self._succ[e.src].append(e)
            self._pred[e.dst].append(e)
        self.block_of = {}
        for b in self.blocks:
            for el in b.elements:
                if el.stmt_id is not None:
                    self.block_of[el.stmt_id] = b.id

    @property
    def name(self) -> str:
        return self.function.name

    def succ(self, block_id: int) -> list[Edge]:
        return self._succ[block_id]

    def pred(self, block_id: int) -> list[Edge]:
        return self._pred[block_id]

    @property
    def stmt_ids(self) -> set[int]:
        return set(self.block_of)

    def reachable_blocks(self, edges=None) -> set[int]:
        """Blocks reachable from entry, optionally over a subset of edges."""
        allowed = None if edges is None else set(edges)
        seen = {self.entry}
        stack = [self.entry]
        while stack:
            b = stack.pop()
            for e in self._succ[b]:
                if allowed is not None and e not in allowed:
                    continue
                if e.dst not in seen:
                    seen.add(e.dst)
                    stack.append(e.dst)
        return seen

    def elements(self):
        for b in self.blocks:
            for el in b.elements:
                yield b, el

    def dump(self) -> str:
        lines = [f"function {self.name}: entry {self.entry}, exit {self.exit}"]
        for b in self.blocks:
            succ = ", ".join(f"{e.dst}({e.label()})" for e in self._succ[b.id])
            lines.append(f"block {b.id}: {b.stmt_ids} -> {succ}")
        return "\n".join(lines)


class _Builder:
    def __init__(self, fn: ast.FunctionDef):
        self.fn = fn
        self.blocks: list[BasicBlock] = []
        self.edges: list[Edge] = []
        self.labels: dict[str, int] = {}
        self.pending_gotos: list[tuple[int, ast.Goto]] = []
        self.breaks: list[int] = []
        self.continues: list[int] = []
        self.switches: list[dict] = []
        self.cur: Optional[int] = None

    def new_block(self) -> int:
        b = BasicBlock(len(self.blocks))
        self.blocks.append(b)
        return b.id

    def edge(self, src, dst, kind, value=None):
        self.edges.append(Edge(src, dst, kind, value))

    def ensure(self) -> int:
        """Current block, opening an (unreachable) one if control ended."""
        if self.cur is None:
            self.cur = self.new_block()
        return self.cur

    def emit(self, el: Element):
        self.blocks[self.ensure()].elements.append(el)

    def start_block(self) -> int:
        """Begin a new block that control may enter from several places."""
        b = self.new_block()
        if self.cur is not None:
            self.edge(self.cur, b, "fallthrough")
        self.cur = b
        return b

    def jump(self, target: int, kind: str):
        self.edge(self.ensure(), target, kind)
        self.cur = None

    # -- building -----------------------------------------------------------

    def build(self) -> Cfg:
        entry = self.new_block()
        self.cur = entry
        exit_placeholder = []
        self.exit_target = None
        self._return_sources = exit_placeholder
        self.stmt(self.fn.body)
        falls_off = self.cur
        exit_id = self.new_block()
        for src in self._return_sources:
            self.edge(src, exit_id, "fallthrough")
        if falls_off is not None:
            self.edge(falls_off, exit_id, "fallthrough")
        for src, g in self.pending_gotos:
            if g.label not in self.labels:
                raise CfgError(f"use of undeclared label '{g.label}'", g.span)
            self.edge(src, self.labels[g.label], "goto")
        # Blocks that were opened after a jump and never closed fall
        # through to the exit so every non-exit block has a successor.
        has_succ = {e.src for e in self.edges}
        for b in self.blocks:
            if b.id != exit_id and b.id not in has_succ:
                self.edge(b.id, exit_id, "fallthrough")
        self.edges.sort(key=lambda e: (e.src, EDGE_KINDS.index(e.kind), e.dst))
        return Cfg(self.fn, self.blocks, entry, exit_id, self.edges)

    def cond_jump(self, expr, t: int, f: int, sid: Optional[int], owner: int, node):
        """Lower a controlling expression, splitting ``&&``/``||``."""
        if isinstance(expr, ast.Binary) and expr.op in ("&&", "||"):
            mid = self.new_block()
            if expr.op == "&&":
                self.cond_jump(expr.left, mid, f, sid, owner, node)
            else:
                self.cond_jump(expr.left, t, mid, sid, owner, node)
            self.cur = mid
            self.cond_jump(expr.right, t, f, None, owner, node)
            return
        self.emit(Element("cond", sid, owner, node, expr=expr))
        b = self.cur
        self.edge(b, t, "branch-true")
        self.edge(b, f, "branch-false")
        self.cur = None

    def stmt(self, s: ast.Stmt):
        sid = s.stmt_id
        if isinstance(s, ast.Compound):
            self.emit(Element("marker", sid, sid, s))
            for item in s.items:
                self.stmt(item)
        elif isinstance(s, ast.DeclStmt):
            self.emit(Element("decl", sid, sid, s, decl=s.decl))
        elif isinstance(s, ast.ExprStmt):
            self.emit(Element("expr", sid, sid, s, expr=s.expr))
        elif isinstance(s, ast.If):
            t, after = self.new_block(), None
            f = self.new_block()
            self.cond_jump(s.cond, t, f, sid, sid, s)
            self.cur = t
            self.stmt(s.then)
            then_end = self.cur
            if s.otherwise is not None:
                self.cur = f
                self.stmt(s.otherwise)
                else_end = self.cur
                after = self.new_block()
                for end in (then_end, else_end):
                    if end is not None:
                        self.edge(end, after, "fallthrough")
            else:
                after = f
                if then_end is not None:
                    self.edge(then_end, after, "fallthrough")
            self.cur = after
        elif isinstance(s, ast.While):
            header = self.start_block()
            body, after = self.new_block(), self.new_block()
            self.cond_jump(s.cond, body, after, sid, sid, s)
            self.loop_body(s.body, body, after, header)
            self.cur = after
        elif isinstance(s, ast.DoWhile):
            body = self.start_block()
            self.emit(Element("marker", sid, sid, s))
            cond_block, after = self.new_block(), self.new_block()
            self.breaks.append(after)
            self.continues.append(cond_block)
            self.stmt(s.body)
            self.breaks.pop()
            self.continues.pop()
            if self.cur is not None:
                self.edge(self.cur, cond_block, "fallthrough")
            self.cur = cond_block
            self.cond_jump(s.cond, body, after, None, sid, s)
            self.cur = after
        elif isinstance(s, ast.For):
            if isinstance(s.init, ast.Declaration):
                self.emit(Element("decl", None, sid, s, decl=s.init))
            elif s.init is not None:
                self.emit(Element("expr", None, sid, s, expr=s.init))
            header = self.start_block()
            body, after = self.new_block(), self.new_block()
            if s.cond is not None:
                self.cond_jump(s.cond, body, after, sid, sid, s)
            else:
                self.emit(Element("marker", sid, sid, s))
                self.edge(header, body, "fallthrough")
                self.cur = None
            step = self.new_block()
            self.loop_body(s.body, body, after, step, back_from_body=False)
            self.blocks[step].elements.append(Element("expr", None, sid, s, expr=s.step))
            self.edge(step, header, "loop-back")
            self.cur = after
        elif isinstance(s, ast.Switch):
            self.emit(Element("switch", sid, sid, s, expr=s.cond))
            head = self.cur
            after = self.new_block()
            self.cur = None
            self.switches.append({"head": head, "has_default": False})
            self.breaks.append(after)
            self.stmt(s.body)
            self.breaks.pop()
            info = self.switches.pop()
            if self.cur is not None:
                self.edge(self.cur, after, "fallthrough")
            if not info["has_default"]:
                self.edge(head, after, "switch-case", "default")
            self.cur = after
        elif isinstance(s, (ast.Case, ast.Default)):
            b = self.start_block()
            if not self.switches:
                word = "case" if isinstance(s, ast.Case) else "default"
                raise CfgError(f"'{word}' label not within a switch statement", s.span)
            info = self.switches[-1]
            if isinstance(s, ast.Case):
                self.edge(info["head"], b, "switch-case", s.value)
            else:
                info["has_default"] = True
                self.edge(info["head"], b, "switch-case", "default")
            self.emit(Element("marker", sid, sid, s))
            self.stmt(s.stmt)
        elif isinstance(s, ast.Labeled):
            b = self.start_block()
            self.labels[s.label] = b
            self.emit(Element("marker", sid, sid, s))
            self.stmt(s.stmt)
        elif isinstance(s, ast.Goto):
            self.emit(Element("marker", sid, sid, s))
            self.pending_gotos.append((self.cur, s))
            self.cur = None
        elif isinstance(s, ast.Break):
            self.emit(Element("marker", sid, sid, s))
            if not self.breaks:
                raise CfgError("'break' statement not in loop or switch", s.span)
            self.jump(self.breaks[-1], "fallthrough")
        elif isinstance(s, ast.Continue):
            self.emit(Element("marker", sid, sid, s))
            if not self.continues:
                raise CfgError("'continue' statement not in loop", s.span)
            self.jump(self.continues[-1], "loop-back")
        elif isinstance(s, ast.Return):
            self.emit(Element("return", sid, sid, s, expr=s.value))
            self._return_sources.append(self.cur)
            self.cur = None
        else:  # pragma: no cover - parser produces no other statements
            raise CfgError(f"unexpected statement {type(s).__name__}", s.span)

    def loop_body(self, body_stmt, body, after, cont, back_from_body=True):
        self.breaks.append(after)
        self.continues.append(cont)
        self.cur = body
        self.stmt(body_stmt)
        self.breaks.pop()
        self.continues.pop()
        if self.cur is not None:
            self.edge(self.cur, cont, "loop-back" if back_from_body else "fallthrough")
        self.cur = None


def build_cfg(fn: ast.FunctionDef) -> Cfg:
    """Lower one function body to a control-flow graph."""
    return _Builder(fn).build()
