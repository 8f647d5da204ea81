"""Semantic types for MiniC.

Types are immutable values.  Records compare by the identity of their
``RecordInfo`` so two distinct ``struct S`` definitions never unify.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .. import dialect


@dataclass(frozen=True)
class TypeRepr:
    const: bool = field(default=False, kw_only=True)
    volatile: bool = field(default=False, kw_only=True)
    # Typedef name the type was spelled with, kept for messages only.
    alias: Optional[str] = field(default=None, kw_only=True, compare=False)

    kind = "?"

    def unqualified(self) -> "TypeRepr":
        if not (self.const or self.volatile or self.alias):
            return self
        return replace(self, const=False, volatile=False, alias=None)

    def qualified(self, const=False, volatile=False) -> "TypeRepr":
        if not (const or volatile):
            return self
        return replace(self, const=self.const or const, volatile=self.volatile or volatile)

    def same(self, other: "TypeRepr") -> bool:
        """Equality ignoring top-level qualifiers."""
        return self.unqualified() == other.unqualified()

    @property
    def is_integer(self):
        return False

    @property
    def is_arithmetic(self):
        return False

    @property
    def is_scalar(self):
        return self.is_arithmetic or isinstance(self, PointerType)

    def quals_str(self):
        out = []
        if self.const:
            out.append("const")
        if self.volatile:
            out.append("volatile")
        return " ".join(out)

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class VoidType(TypeRepr):
    kind = "void"


@dataclass(frozen=True)
class IntType(TypeRepr):
    name: str = "int"
    signed: bool = True
    width: int = 32

    kind = "integer"

    @property
    def is_integer(self):
        return True

    @property
    def is_arithmetic(self):
        return True

    @property
    def rank(self) -> int:
        return _RANK[self.name.replace("unsigned ", "").replace("signed ", "")]


_RANK = {"_Bool": 0, "char": 1, "short": 2, "int": 3, "long": 4, "long long": 5}


@dataclass(frozen=True)
class FloatType(TypeRepr):
    name: str = "double"
    width: int = 64

    kind = "floating"

    @property
    def is_arithmetic(self):
        return True


@dataclass(frozen=True)
class PointerType(TypeRepr):
    pointee: TypeRepr = None

    kind = "pointer"

    @property
    def pointee_const(self) -> bool:
        return self.pointee.const


@dataclass(frozen=True)
class ArrayType(TypeRepr):
    element: TypeRepr = None
    length: Optional[int] = None

    kind = "array"


@dataclass(frozen=True)
class FunctionType(TypeRepr):
    ret: TypeRepr = None
    params: tuple = ()
    param_names: tuple = field(default=(), compare=False)
    variadic: bool = False
    # False for ``f()`` declarations, whose arguments are never checked.
    prototyped: bool = True

    kind = "function"


@dataclass(eq=False)
class RecordInfo:
    kind: str  # "struct" | "union"
    tag: Optional[str]
    members: Optional[list[tuple[str, TypeRepr]]] = None

    @property
    def complete(self) -> bool:
        return self.members is not None

    def member(self, name: str) -> Optional[TypeRepr]:
        for mname, mtype in self.members or ():
            if mname == name:
                return mtype
        return None


@dataclass(frozen=True)
class RecordType(TypeRepr):
    info: RecordInfo = None

    kind = "record"

    @property
    def tag(self):
        return self.info.tag


@dataclass(frozen=True)
class EnumType(TypeRepr):
    tag: Optional[str] = None
    # Enums are compatible with int in this dialect.
    is_integer = True
    is_arithmetic = True
    signed = True
    width = 32
    name = "int"
    rank = 3

    kind = "enum"


@dataclass(frozen=True)
class OpaqueType(TypeRepr):
    name: str = "FILE"

    kind = "opaque"


VOID = VoidType()
BOOL = IntType("_Bool", False, dialect.INT_WIDTHS["_Bool"])
CHAR = IntType("char", dialect.CHAR_IS_SIGNED, dialect.INT_WIDTHS["char"])
SCHAR = IntType("signed char", True, 8)
UCHAR = IntType("unsigned char", False, 8)
INT = IntType("int", True, dialect.INT_WIDTHS["int"])
UINT = IntType("unsigned int", False, dialect.INT_WIDTHS["int"])
LONG = IntType("long", True, dialect.INT_WIDTHS["long"])
ULONG = IntType("unsigned long", False, dialect.INT_WIDTHS["long"])
SIZE_T = ULONG
DOUBLE = FloatType("double", dialect.FLOAT_WIDTHS["double"])
FILE = OpaqueType("FILE")


def int_type(name: str) -> IntType:
    """Integer type for a canonical spelling like ``unsigned short``."""
    if name == "char":
        return CHAR
    if name == "signed char":
        return SCHAR
    if name == "unsigned char":
        return UCHAR
    if name == "_Bool":
        return BOOL
    unsigned = name.startswith("unsigned ")
    base = name[len("unsigned "):] if unsigned else name
    return IntType(name, not unsigned, dialect.INT_WIDTHS[base])


def is_char_type(t: TypeRepr) -> bool:
    """Plain ``char`` only; signed/unsigned char are small integers."""
    return isinstance(t, IntType) and t.name == "char"


def is_null_constant_type(t: TypeRepr) -> bool:
    return isinstance(t, PointerType) and isinstance(t.pointee, VoidType)


def decay(t: TypeRepr) -> TypeRepr:
    """Array-to-pointer and function-to-pointer conversion."""
    if isinstance(t, ArrayType):
        return PointerType(pointee=t.element)
    if isinstance(t, FunctionType):
        return PointerType(pointee=t)
    return t


def promote(t: TypeRepr) -> TypeRepr:
    if isinstance(t, EnumType):
        return INT
    if isinstance(t, IntType) and t.rank < INT.rank:
        return INT
    if isinstance(t, IntType):
        return t.unqualified()
    return t.unqualified()


def usual_arithmetic(a: TypeRepr, b: TypeRepr) -> TypeRepr:
    if isinstance(a, FloatType) or isinstance(b, FloatType):
        fa = a.width if isinstance(a, FloatType) else 0
        fb = b.width if isinstance(b, FloatType) else 0
        return (a if fa >= fb else b).unqualified()
    a, b = promote(a), promote(b)
    if a == b:
        return a
    if a.signed == b.signed:
        return a if a.rank >= b.rank else b
    u, s = (a, b) if not a.signed else (b, a)
    if u.rank >= s.rank:
        return u
    if s.width > u.width:
        return s
    return int_type("unsigned " + s.name)


def sizeof(t: TypeRepr) -> Optional[int]:
    """Size in bytes, or ``None`` for unsized types."""
    if isinstance(t, (IntType, EnumType)):
        return t.width // dialect.CHAR_BIT
    if isinstance(t, FloatType):
        return t.width // dialect.CHAR_BIT
    if isinstance(t, PointerType):
        return dialect.POINTER_WIDTH // dialect.CHAR_BIT
    if isinstance(t, ArrayType):
        if t.length is None:
            return None
        inner = sizeof(t.element)
        return None if inner is None else inner * t.length
    if isinstance(t, RecordType):
        return record_layout(t.info)[1] if t.info.complete else None
    return None


def alignof(t: TypeRepr) -> int:
    if isinstance(t, ArrayType):
        return alignof(t.element)
    if isinstance(t, RecordType):
        return record_layout(t.info)[2]
    return sizeof(t) or 1


def record_layout(info: RecordInfo) -> tuple[dict[str, int], int, int]:
    """Member offsets, total size and alignment with natural alignment."""
    offsets = {}
    size = 0
    align = 1
    for name, mtype in info.members:
        msize = sizeof(mtype) or 0
        malign = alignof(mtype)
        align = max(align, malign)
        if info.kind == "union":
            offsets[name] = 0
            size = max(size, msize)
        else:
            size = (size + malign - 1) // malign * malign
            offsets[name] = size
            size += msize
    size = (size + align - 1) // align * align
    return offsets, max(size, 1), align


def render(t: TypeRepr, inner: str = "") -> str:
    """C-like spelling of a type, e.g. ``const char *``."""
    q = t.quals_str()
    if isinstance(t, PointerType):
        ptr = "*" + (" " + q if q else "")
        if isinstance(t.pointee, (ArrayType, FunctionType)):
            return render(t.pointee, f"({ptr}{inner})")
        return render(t.pointee, ptr + inner)
    if isinstance(t, ArrayType):
        n = "" if t.length is None else str(t.length)
        return render(t.element, f"{inner}[{n}]")
    if isinstance(t, FunctionType):
        ps = ", ".join(render(p) for p in t.params) or ("void" if t.prototyped else "")
        if t.variadic and t.params:
            ps += ", ..."
        return render(t.ret, f"{inner}({ps})")
    if t.alias:
        base = t.alias
    elif isinstance(t, IntType):
        base = t.name
    elif isinstance(t, FloatType):
        base = t.name
    elif isinstance(t, RecordType):
        base = f"{t.info.kind} {t.info.tag or '<anonymous>'}"
    elif isinstance(t, EnumType):
        base = f"enum {t.tag or '<anonymous>'}"
    elif isinstance(t, OpaqueType):
        base = t.name
    else:
        base = "void"
    head = f"{q} {base}" if q else base
    if not inner:
        return head
    return head + (" " if not inner.startswith(("[", "(")) else "") + inner
