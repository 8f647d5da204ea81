"""Cell memory for the interpreter.

Every object is a flat list of scalar cells, one per scalar leaf of its
type.  Pointers are (object, cell offset) pairs, so pointer arithmetic
scales by the number of cells of the pointee rather than by bytes.
"""

from __future__ import annotations

import itertools
import struct
import zlib
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .. import dialect
from ..sema import types as T


class _Uninit:
    def __repr__(self):
        return "UNINIT"


UNINIT = _Uninit()

_serial = itertools.count(1)


class RuntimeFault(Exception):
    """Undefined behaviour observed during execution."""

    def __init__(self, kind: str, message: str, node=None):
        super().__init__(message)
        self.kind = kind
        self.node = node


@dataclass(eq=False)
class Obj:
    kind: str  # stack | static | heap | string | stream | wild
    cells: list
    types: list  # leaf type per cell; None for untyped heap cells
    sym: object = None
    readonly: bool = False
    alive: bool = True
    serial: int = field(default_factory=lambda: next(_serial))
    # Pending store of a tracked local, see ``Interpreter.store``.
    pending: object = None

    def __repr__(self):
        name = f" {self.sym.name}" if self.sym is not None else ""
        return f"<{self.kind}{name} #{self.serial}>"


@dataclass(frozen=True, eq=False)
class Ptr:
    obj: Optional[Obj]
    offset: int = 0

    @property
    def is_null(self) -> bool:
        return self.obj is None

    def __eq__(self, other):
        return isinstance(other, Ptr) and self.obj is other.obj and self.offset == other.offset

    def __hash__(self):
        return hash((id(self.obj), self.offset))

    def address(self) -> int:
        if self.obj is None:
            return 0
        return (self.obj.serial << 24) + self.offset


NULL = Ptr(None, 0)


@dataclass(frozen=True)
class Fn:
    name: str


@dataclass(frozen=True)
class Loc:
    obj: Obj
    offset: int
    type: T.TypeRepr


def _leaf(t):
    return t.unqualified() if isinstance(t, T.TypeRepr) else t


@lru_cache(maxsize=None)
def _flatten(t) -> tuple:
    if isinstance(t, T.ArrayType):
        return _flatten(_leaf(t.element)) * (t.length or 0)
    if isinstance(t, T.RecordType):
        if not t.info.complete:
            return ()
        parts = [_flatten(_leaf(m)) for _, m in t.info.members]
        if t.info.kind == "union":
            return max(parts, key=len, default=())
        return tuple(itertools.chain.from_iterable(parts))
    return (t,)


def flatten(t: T.TypeRepr) -> tuple:
    """Scalar leaf types of ``t`` in layout order."""
    return _flatten(_leaf(t))


def cellcount(t: T.TypeRepr) -> int:
    if isinstance(t, (T.VoidType, T.FunctionType)):
        return 1
    return max(len(flatten(t)), 1) if isinstance(t, (T.ArrayType, T.RecordType)) else 1


def member_offset(rec: T.RecordType, name: str) -> tuple[int, T.TypeRepr]:
    off = 0
    for mname, mtype in rec.info.members:
        if mname == name:
            return (0 if rec.info.kind == "union" else off), mtype
        off += len(flatten(mtype))
    raise KeyError(name)


def zero_of(t) -> object:
    if isinstance(t, T.FloatType):
        return 0.0
    if isinstance(t, T.PointerType):
        return NULL
    return 0


def new_object(kind: str, t: T.TypeRepr, sym=None, zero=False) -> Obj:
    types = list(flatten(t))
    cells = [zero_of(x) if zero else UNINIT for x in types]
    return Obj(kind, cells, types, sym=sym)


def round_float(value: float, t) -> float:
    if isinstance(t, T.FloatType) and t.width == 32:
        try:
            return struct.unpack("<f", struct.pack("<f", value))[0]
        except OverflowError:
            return float("inf") if value > 0 else float("-inf")
    return float(value)


def byte_width(t) -> int:
    size = T.sizeof(t) if t is not None else None
    return size or 1


def cell_bytes(value, t) -> bytes:
    """Little-endian object representation of one cell."""
    width = byte_width(t)
    if value is UNINIT:
        raise RuntimeFault("uninitialized-read", "read of uninitialized memory")
    if isinstance(value, float):
        fmt = "<f" if width == 4 else "<d"
        return struct.pack(fmt, value)
    if isinstance(value, Ptr):
        value = value.address()
    if isinstance(value, Fn):
        value = zlib.crc32(value.name.encode())
    return dialect.wrap(int(value), width * dialect.CHAR_BIT, False).to_bytes(width, "little")


def cell_from_bytes(data: bytes, t):
    if isinstance(t, T.FloatType):
        return struct.unpack("<f" if len(data) == 4 else "<d", data)[0]
    raw = int.from_bytes(data, "little")
    if isinstance(t, T.PointerType):
        return NULL if raw == 0 else Ptr(Obj("wild", [], []), 0)
    signed = getattr(t, "signed", False)
    return dialect.wrap(raw, len(data) * dialect.CHAR_BIT, signed)


def convert_char(byte: int) -> int:
    """Value of a source byte stored in a plain ``char``."""
    return dialect.wrap(byte, dialect.CHAR_BIT, dialect.CHAR_IS_SIGNED)
