"""Syntax tree for MiniC.

Nodes compare by identity so they can key side tables (types, symbols,
parents).  Every node carries the span and macro origin of its principal
token; every statement also gets a ``stmt_id`` that is dense per unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterator, Optional, Union

from .tokens import DIRECT, MacroOrigin, SourceSpan


@dataclass(eq=False, kw_only=True)
class Node:
    span: SourceSpan
    origin: MacroOrigin = DIRECT

    def children(self) -> Iterator["Node"]:
        for f in fields(self):
            if f.name in ("span", "origin"):
                continue
            value = getattr(self, f.name)
            if isinstance(value, Node):
                yield value
            elif isinstance(value, (list, tuple)):
                for item in value:
                    if isinstance(item, Node):
                        yield item

    def walk(self) -> Iterator["Node"]:
        """Pre-order traversal including ``self``."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(list(node.children())))


# -- type syntax -------------------------------------------------------------


@dataclass(eq=False, kw_only=True)
class StructSpec(Node):
    kind: str  # "struct" | "union"
    tag: Optional[str]
    members: Optional[list["Declaration"]]


@dataclass(eq=False, kw_only=True)
class Enumerator(Node):
    name: str
    value: Optional["Expr"]


@dataclass(eq=False, kw_only=True)
class EnumSpec(Node):
    tag: Optional[str]
    enumerators: Optional[list[Enumerator]]


@dataclass(eq=False, kw_only=True)
class DeclSpec(Node):
    storage: Optional[str] = None
    qualifiers: frozenset = frozenset()
    # Exactly one of these describes the base type.
    base: tuple[str, ...] = ()
    typedef_name: Optional[str] = None
    record: Optional[StructSpec] = None
    enum: Optional[EnumSpec] = None
    inline: bool = False


@dataclass(eq=False, kw_only=True)
class ParamDecl(Node):
    spec: DeclSpec
    name: Optional[str]
    derivations: list


@dataclass(frozen=True)
class PointerDerivation:
    qualifiers: frozenset = frozenset()


@dataclass(frozen=True, eq=False)
class ArrayDerivation:
    size: Optional["Expr"]


@dataclass(frozen=True, eq=False)
class FunctionDerivation:
    params: tuple[ParamDecl, ...]
    variadic: bool


Derivation = Union[PointerDerivation, ArrayDerivation, FunctionDerivation]


@dataclass(eq=False, kw_only=True)
class TypeName(Node):
    spec: DeclSpec
    derivations: list

    def children(self):
        yield self.spec
        yield from _derivation_children(self.derivations)


def _derivation_children(derivs):
    for d in derivs:
        if isinstance(d, ArrayDerivation) and d.size is not None:
            yield d.size
        elif isinstance(d, FunctionDerivation):
            yield from d.params


# -- declarations ------------------------------------------------------------


@dataclass(eq=False, kw_only=True)
class InitDeclarator(Node):
    name: str
    derivations: list
    init: Optional["Expr"] = None

    def children(self):
        yield from _derivation_children(self.derivations)
        if self.init is not None:
            yield self.init


@dataclass(eq=False, kw_only=True)
class Declaration(Node):
    spec: DeclSpec
    declarators: list[InitDeclarator]


@dataclass(eq=False, kw_only=True)
class FunctionDef(Node):
    spec: DeclSpec
    name: str
    derivations: list
    body: "Compound"
    end_span: SourceSpan

    def children(self):
        yield self.spec
        yield from _derivation_children(self.derivations)
        yield self.body

    @property
    def params(self) -> tuple[ParamDecl, ...]:
        return self.derivations[0].params


@dataclass(eq=False, kw_only=True)
class TranslationUnit(Node):
    items: list[Union[Declaration, FunctionDef]]
    statement_count: int = 0
    # Spans of conditional directives (#if...#endif) seen while preprocessing.
    conditionals: list[SourceSpan] = field(default_factory=list)
    includes: list = field(default_factory=list)

    @property
    def functions(self) -> list[FunctionDef]:
        return [i for i in self.items if isinstance(i, FunctionDef)]

    def function(self, name: str) -> FunctionDef:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)

    def statements(self) -> list["Stmt"]:
        """All statements ordered by ``stmt_id``."""
        out = [n for n in self.walk() if isinstance(n, Stmt)]
        out.sort(key=lambda s: s.stmt_id)
        return out


# -- expressions -------------------------------------------------------------


@dataclass(eq=False, kw_only=True)
class Expr(Node):
    pass


@dataclass(eq=False, kw_only=True)
class Ident(Expr):
    name: str


@dataclass(eq=False, kw_only=True)
class IntConst(Expr):
    value: int
    text: str
    suffix: str = ""


@dataclass(eq=False, kw_only=True)
class FloatConst(Expr):
    value: float
    text: str


@dataclass(eq=False, kw_only=True)
class CharConst(Expr):
    value: int
    text: str


@dataclass(eq=False, kw_only=True)
class StringLit(Expr):
    value: bytes
    text: str


@dataclass(eq=False, kw_only=True)
class Unary(Expr):
    """Prefix operators: ``- + ! ~ * &`` and ``++``/``--``."""

    op: str
    operand: Expr


@dataclass(eq=False, kw_only=True)
class Postfix(Expr):
    op: str  # "++" | "--"
    operand: Expr


@dataclass(eq=False, kw_only=True)
class Binary(Expr):
    """All binary operators, including ``&&``, ``||`` and the comma."""

    op: str
    left: Expr
    right: Expr


@dataclass(eq=False, kw_only=True)
class Assign(Expr):
    op: str  # "=", "+=", ...
    target: Expr
    value: Expr


@dataclass(eq=False, kw_only=True)
class Conditional(Expr):
    cond: Expr
    then: Expr
    otherwise: Expr


@dataclass(eq=False, kw_only=True)
class Call(Expr):
    func: Expr
    args: list[Expr]


@dataclass(eq=False, kw_only=True)
class Cast(Expr):
    type_name: TypeName
    operand: Expr


@dataclass(eq=False, kw_only=True)
class SizeofType(Expr):
    type_name: TypeName


@dataclass(eq=False, kw_only=True)
class SizeofExpr(Expr):
    operand: Expr


@dataclass(eq=False, kw_only=True)
class Member(Expr):
    obj: Expr
    name: str
    arrow: bool


@dataclass(eq=False, kw_only=True)
class Index(Expr):
    base: Expr
    index: Expr


@dataclass(eq=False, kw_only=True)
class InitList(Expr):
    items: list[Expr]


# -- statements --------------------------------------------------------------


@dataclass(eq=False, kw_only=True)
class Stmt(Node):
    stmt_id: int = -1


@dataclass(eq=False, kw_only=True)
class Compound(Stmt):
    items: list[Stmt]
    end_span: Optional[SourceSpan] = None


@dataclass(eq=False, kw_only=True)
class DeclStmt(Stmt):
    decl: Declaration


@dataclass(eq=False, kw_only=True)
class ExprStmt(Stmt):
    expr: Optional[Expr]


@dataclass(eq=False, kw_only=True)
class If(Stmt):
    cond: Expr
    then: Stmt
    otherwise: Optional[Stmt] = None


@dataclass(eq=False, kw_only=True)
class Switch(Stmt):
    cond: Expr
    body: Stmt


@dataclass(eq=False, kw_only=True)
class While(Stmt):
    cond: Expr
    body: Stmt


@dataclass(eq=False, kw_only=True)
class DoWhile(Stmt):
    body: Stmt
    cond: Expr


@dataclass(eq=False, kw_only=True)
class For(Stmt):
    init: Union[Declaration, Expr, None]
    cond: Optional[Expr]
    step: Optional[Expr]
    body: Stmt


@dataclass(eq=False, kw_only=True)
class Goto(Stmt):
    label: str


@dataclass(eq=False, kw_only=True)
class Continue(Stmt):
    pass


@dataclass(eq=False, kw_only=True)
class Break(Stmt):
    pass


@dataclass(eq=False, kw_only=True)
class Return(Stmt):
    value: Optional[Expr]


@dataclass(eq=False, kw_only=True)
class Labeled(Stmt):
    label: str
    stmt: Stmt


@dataclass(eq=False, kw_only=True)
class Case(Stmt):
    value: Expr
    stmt: Stmt


@dataclass(eq=False, kw_only=True)
class Default(Stmt):
    stmt: Stmt


