"""Simulated standard library for the interpreter.

Pure functions are computed from their definitions.  Streams never
produce input and accept all output.  Functions that would consult the
environment end the run as inconclusive.
"""

from __future__ import annotations

import re

from .. import dialect
from ..sema import types as T
from ..sema.consteval import convert_int
from . import memory as M
from .memory import NULL, UNINIT, Loc, Obj, Ptr, RuntimeFault

EOF = dialect.EOF_VALUE
ERANGE = 34
UCHAR_MAX = (1 << dialect.CHAR_BIT) - 1

_CTYPE = {
    "isalnum": str.isalnum,
    "isalpha": str.isalpha,
    "isblank": lambda c: c in " \t",
    "iscntrl": lambda c: ord(c) < 32 or ord(c) == 127,
    "isdigit": lambda c: c in "0123456789",
    "isgraph": lambda c: 33 <= ord(c) <= 126,
    "islower": lambda c: "a" <= c <= "z",
    "isprint": lambda c: 32 <= ord(c) <= 126,
    "ispunct": lambda c: 33 <= ord(c) <= 126 and not c.isalnum(),
    "isspace": lambda c: c in " \t\n\v\f\r",
    "isupper": lambda c: "A" <= c <= "Z",
    "isxdigit": lambda c: c in "0123456789abcdefABCDEF",
}


def _ctype(name, c, node):
    if c != EOF and not 0 <= c <= UCHAR_MAX:
        raise RuntimeFault("oob-access", f"{name} argument {c} outside unsigned char and EOF", node)
    if name == "tolower":
        return c + 32 if 65 <= c <= 90 else c
    if name == "toupper":
        return c - 32 if 97 <= c <= 122 else c
    if c == EOF or c > 127:
        return 0
    return int(_CTYPE[name](chr(c)))


class _Lib:
    def __init__(self, interp, node):
        self.interp = interp
        self.node = node

    # -- memory helpers -------------------------------------------------------

    def ptr(self, p) -> Ptr:
        if not isinstance(p, Ptr):
            raise RuntimeFault("oob-access", "invalid pointer argument", self.node)
        if p.is_null:
            raise RuntimeFault("null-deref", "null pointer argument", self.node)
        return p

    def cell(self, p: Ptr, i: int):
        loc = Loc(p.obj, p.offset + i, p.obj.types[p.offset + i] if 0 <= p.offset + i < len(p.obj.types) else T.CHAR)
        self.interp.check_access(loc, self.node)
        value = p.obj.cells[p.offset + i]
        if value is UNINIT:
            raise RuntimeFault("uninitialized-read", "read of uninitialized memory", self.node)
        return value

    def put(self, p: Ptr, i: int, value):
        loc = Loc(p.obj, p.offset + i, T.CHAR)
        self.interp.check_access(loc, self.node)
        if p.obj.readonly:
            raise RuntimeFault("oob-access", "write to a string literal", self.node)
        p.obj.cells[p.offset + i] = value
        if p.obj.types[p.offset + i] is None:
            p.obj.types[p.offset + i] = T.CHAR

    def cstring(self, p) -> list[int]:
        p = self.ptr(p)
        out, i = [], 0
        while True:
            c = self.cell(p, i)
            if c == 0:
                return out
            out.append(c)
            i += 1

    def byte_cells(self, p: Ptr, n: int) -> int:
        """Number of cells spanned by the first ``n`` bytes at ``p``."""
        count, size, i = 0, 0, 0
        while size < n:
            idx = p.offset + i
            t = p.obj.types[idx] if 0 <= idx < len(p.obj.types) else T.CHAR
            size += M.byte_width(t)
            count += 1
            i += 1
        return count

    def raw_bytes(self, p, n: int) -> bytes:
        p = self.ptr(p)
        data = b""
        i = 0
        while len(data) < n:
            value = self.cell(p, i)
            data += M.cell_bytes(value, p.obj.types[p.offset + i] or T.CHAR)
            i += 1
        return data[:n]

    # -- allocation ----------------------------------------------------------

    def malloc(self, n, zero=False):
        return Ptr(Obj("heap", [0 if zero else UNINIT] * n, [None] * n), 0)

    def free(self, p):
        if isinstance(p, Ptr) and p.is_null:
            return None
        if not isinstance(p, Ptr) or p.obj.kind != "heap" or not p.obj.alive or p.offset != 0:
            raise RuntimeFault("bad-free", "free of a pointer not returned by an allocator", self.node)
        p.obj.alive = False
        return None

    def realloc(self, p, n):
        if isinstance(p, Ptr) and p.is_null:
            return self.malloc(n)
        self.free(p)
        new = self.malloc(n)
        keep = min(n, len(p.obj.cells))
        new.obj.cells[:keep] = p.obj.cells[:keep]
        new.obj.types[:keep] = p.obj.types[:keep]
        return new

    # -- streams -------------------------------------------------------------

    def stream(self, p):
        p = self.ptr(p)
        if p.obj.kind != "stream":
            raise RuntimeFault("oob-access", "not a stream", self.node)
        if not p.obj.alive:
            raise RuntimeFault("oob-access", "use of a closed stream", self.node)
        return p

    def fopen(self):
        return Ptr(Obj("stream", [0], [None]), 0)

    def fclose(self, p):
        if not isinstance(p, Ptr) or p.is_null:
            raise RuntimeFault("null-deref", "fclose of a null stream", self.node)
        if p.obj.kind != "stream" or not p.obj.alive:
            raise RuntimeFault("bad-free", "fclose of a stream that is not open", self.node)
        p.obj.alive = False
        return 0

    # -- string conversions --------------------------------------------------

    def strto(self, name, s, end, base=10):
        text = bytes(c & 0xFF for c in self.cstring(s)).decode("latin-1")
        if name in ("strtod", "strtof"):
            m = re.match(r"\s*[+-]?(\d+\.?\d*([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?)", text)
            value = float(m.group(0)) if m else 0.0
            if name == "strtof":
                value = M.round_float(value, T.FloatType("float", 32))
            used = m.end() if m else 0
            if value in (float("inf"), float("-inf")):
                self.interp.statics["errno"].cells[0] = ERANGE
        else:
            digits = "0123456789abcdefghijklmnopqrstuvwxyz"[: base or 10]
            m = re.match(r"\s*([+-]?)(0[xX])?", text)
            start = m.end() if (base in (0, 16) and m.group(2)) else m.end(1)
            if base == 0:
                base = 16 if m.group(2) else (8 if text[start:start + 1] == "0" else 10)
            digits = digits[:base]
            j = start
            while j < len(text) and text[j].lower() in digits:
                j += 1
            used = j if j > start else 0
            value = int(text[start:j], base) if j > start else 0
            if m.group(1) == "-":
                value = -value
            t = {"strtol": T.LONG, "strtoll": T.LONG, "strtoul": T.ULONG, "strtoull": T.ULONG}[name]
            lo, hi = dialect.int_range(t.width, t.signed)
            if t.signed and not lo <= value <= hi:
                value = hi if value > 0 else lo
                self.interp.statics["errno"].cells[0] = ERANGE
            elif not t.signed:
                if abs(value) > hi:
                    value = hi
                    self.interp.statics["errno"].cells[0] = ERANGE
                else:
                    value = convert_int(value, t)
        if isinstance(end, Ptr) and not end.is_null:
            s = self.ptr(s)
            self.interp.write(Loc(end.obj, end.offset, T.PointerType(pointee=T.CHAR)),
                              Ptr(s.obj, s.offset + used), self.node)
        return value


def call_builtin(interp, name: str, args: list, node):
    from .interp import _Exit, _Inconclusive

    lib = _Lib(interp, node)
    a = args
    if name in _CTYPE or name in ("tolower", "toupper"):
        return _ctype(name, a[0], node)
    if name == "malloc":
        return lib.malloc(a[0])
    if name == "calloc":
        return lib.malloc(a[0] * a[1], zero=True)
    if name == "realloc":
        return lib.realloc(a[0], a[1])
    if name == "free":
        return lib.free(a[0])
    if name == "exit":
        raise _Exit(a[0])
    if name == "abort":
        raise _Exit(134)
    if name in ("abs", "labs"):
        t = T.INT if name == "abs" else T.LONG
        if a[0] == dialect.int_range(t.width, True)[0]:
            raise RuntimeFault("signed-overflow", f"{name} of the most negative value", node)
        return abs(a[0])
    if name in ("fopen", "tmpfile"):
        if name == "fopen":
            lib.cstring(a[0])
            lib.cstring(a[1])
        return lib.fopen()
    if name == "fclose":
        return lib.fclose(a[0])
    if name in ("fgetc", "getc"):
        lib.stream(a[0])
        return EOF
    if name == "getchar":
        return EOF
    if name in ("fputc", "putc"):
        lib.stream(a[1])
        return a[0] & UCHAR_MAX
    if name == "putchar":
        return a[0] & UCHAR_MAX
    if name == "fputs":
        lib.cstring(a[0])
        lib.stream(a[1])
        return 0
    if name == "puts":
        lib.cstring(a[0])
        return 0
    if name == "fgets":
        lib.ptr(a[0])
        lib.stream(a[2])
        return NULL
    if name == "fread":
        lib.stream(a[3])
        return 0
    if name == "fwrite":
        lib.stream(a[3])
        return a[2]
    if name in ("fflush", "ferror"):
        lib.stream(a[0])
        return 0
    if name == "feof":
        lib.stream(a[0])
        return 1
    if name == "printf":
        lib.cstring(a[0])
        return 0
    if name == "fprintf":
        lib.stream(a[0])
        lib.cstring(a[1])
        return 0
    if name == "snprintf":
        lib.cstring(a[2])
        if a[1] > 0:
            lib.put(lib.ptr(a[0]), 0, 0)
        return 0
    if name == "strlen":
        return len(lib.cstring(a[0]))
    if name in ("strcmp", "strncmp"):
        x, y = lib.cstring(a[0]), lib.cstring(a[1])
        if name == "strncmp":
            x, y = x[: a[2]], y[: a[2]]
        x, y = [c & 0xFF for c in x], [c & 0xFF for c in y]
        return (x > y) - (x < y)
    if name == "memcmp":
        x, y = lib.raw_bytes(a[0], a[2]), lib.raw_bytes(a[1], a[2])
        return (x > y) - (x < y)
    if name in ("strchr", "strrchr"):
        p = lib.ptr(a[0])
        s = lib.cstring(p) + [0]
        c = M.convert_char(a[1] & 0xFF)
        hits = [i for i, v in enumerate(s) if v == c]
        if not hits:
            return NULL
        return Ptr(p.obj, p.offset + (hits[0] if name == "strchr" else hits[-1]))
    if name == "memchr":
        p = lib.ptr(a[0])
        for i in range(a[2]):
            if lib.cell(p, i) & 0xFF == a[1] & 0xFF:
                return Ptr(p.obj, p.offset + i)
        return NULL
    if name in ("strstr", "strpbrk"):
        p = lib.ptr(a[0])
        s, t = lib.cstring(p), lib.cstring(a[1])
        for i in range(len(s) + 1):
            if name == "strstr" and s[i:i + len(t)] == t:
                return Ptr(p.obj, p.offset + i)
            if name == "strpbrk" and i < len(s) and s[i] in t:
                return Ptr(p.obj, p.offset + i)
        return NULL
    if name in ("strcpy", "strcat", "strncpy"):
        d = lib.ptr(a[0])
        s = lib.cstring(a[1])
        start = len(lib.cstring(d)) if name == "strcat" else 0
        if name == "strncpy":
            s = (s + [0] * a[2])[: a[2]]
        else:
            s = s + [0]
        for i, c in enumerate(s):
            lib.put(d, start + i, c)
        return d
    if name in ("memcpy", "memmove"):
        d, s = lib.ptr(a[0]), lib.ptr(a[1])
        if a[2] == 0:
            return d
        n = lib.byte_cells(s, a[2])
        cells = []
        for i in range(n):
            lib.interp.check_access(Loc(s.obj, s.offset + i, T.CHAR), node)
            cells.append(s.obj.cells[s.offset + i])
        for i, c in enumerate(cells):
            lib.put(d, i, c)
            d.obj.types[d.offset + i] = s.obj.types[s.offset + i] or d.obj.types[d.offset + i]
        return d
    if name == "memset":
        d = lib.ptr(a[0])
        n = lib.byte_cells(d, a[2]) if a[2] else 0
        for i in range(n):
            idx = d.offset + i
            t = d.obj.types[idx] if 0 <= idx < len(d.obj.types) else None
            data = bytes([a[1] & 0xFF]) * M.byte_width(t)
            lib.put(d, i, M.cell_from_bytes(data, t or T.UCHAR))
            if t is not None:
                d.obj.types[idx] = t
        return d
    if name in ("strtod", "strtof", "strtol", "strtoul", "strtoll", "strtoull"):
        return lib.strto(name, a[0], a[1], *a[2:3])
    raise _Inconclusive(f"environment call '{name}'", node)
