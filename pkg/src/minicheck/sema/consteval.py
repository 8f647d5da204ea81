"""Integer arithmetic of the fixed dialect and constant-expression folding.

``int_binop``/``int_unop`` are shared with the interpreter so that constant
folding and execution can never disagree about a value.
"""

from __future__ import annotations

from typing import Callable, Optional

from .. import dialect
from ..frontend import ast
from .types import EnumType, FloatType, IntType, PointerType, TypeRepr


class ArithmeticFault(Exception):
    """Undefined behaviour in integer arithmetic."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind  # "division-by-zero" | "signed-overflow"


class NotConstant(Exception):
    def __init__(self, node=None, reason="not an integer constant expression"):
        super().__init__(reason)
        self.node = node


def _check(value: int, t) -> int:
    if t.signed:
        if not dialect.fits(value, t.width, True):
            raise ArithmeticFault("signed-overflow", f"signed overflow in {t.name} arithmetic")
        return value
    return dialect.wrap(value, t.width, False)


def convert_int(value: int, t) -> int:
    """Integer conversion to ``t`` (wraps; the dialect defines narrowing)."""
    if isinstance(t, IntType) and t.name == "_Bool":
        return int(value != 0)
    if isinstance(t, PointerType):
        return dialect.wrap(value, dialect.POINTER_WIDTH, False)
    return dialect.wrap(value, t.width, t.signed)


def int_binop(op: str, a: int, b: int, t) -> int:
    """Evaluate ``a op b`` in the (already converted) integer type ``t``.

    Shifts take ``t`` as the promoted type of the left operand.
    """
    if op == "+":
        return _check(a + b, t)
    if op == "-":
        return _check(a - b, t)
    if op == "*":
        return _check(a * b, t)
    if op in ("/", "%"):
        if b == 0:
            raise ArithmeticFault("division-by-zero", "division by zero")
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        if op == "/":
            return _check(q, t)
        _check(q, t)
        return a - q * b
    if op in ("<<", ">>"):
        if b < 0 or b >= t.width:
            raise ArithmeticFault("signed-overflow", f"shift count {b} out of range")
        if op == ">>":
            return a >> b
        if t.signed and a < 0:
            raise ArithmeticFault("signed-overflow", "left shift of negative value")
        return _check(a << b, t)
    if op == "&":
        return convert_int(a & b, t)
    if op == "|":
        return convert_int(a | b, t)
    if op == "^":
        return convert_int(a ^ b, t)
    if op == "<":
        return int(a < b)
    if op == ">":
        return int(a > b)
    if op == "<=":
        return int(a <= b)
    if op == ">=":
        return int(a >= b)
    if op == "==":
        return int(a == b)
    if op == "!=":
        return int(a != b)
    raise ValueError(f"not an integer operator: {op}")


def int_unop(op: str, a: int, t) -> int:
    if op == "-":
        return _check(-a, t)
    if op == "+":
        return a
    if op == "~":
        return convert_int(~a, t)
    if op == "!":
        return int(a == 0)
    raise ValueError(f"not an integer operator: {op}")


def _is_int(t: TypeRepr) -> bool:
    return isinstance(t, (IntType, EnumType))


class ConstEvaluator:
    """Fold an integer constant expression over a typed unit.

    ``ident_value`` returns the value of an identifier or ``None`` if it is
    not a constant; the default accepts enumerators only, as C does.
    """

    def __init__(self, unit, ident_value: Optional[Callable] = None):
        self.unit = unit
        self.ident_value = ident_value or self.enumerator_value

    def enumerator_value(self, sym):
        return sym.value if sym.storage == "enumerator" else None

    def type_of(self, e):
        return self.unit.expr_types[e]

    def eval(self, e: ast.Expr) -> int:
        t = self.type_of(e)
        if not _is_int(t):
            raise NotConstant(e, "not an integer expression")
        if isinstance(e, ast.IntConst):
            return convert_int(e.value, t)
        if isinstance(e, ast.CharConst):
            return e.value
        if isinstance(e, ast.Ident):
            sym = self.unit.resolutions[e]
            value = self.ident_value(sym)
            if value is None:
                raise NotConstant(e, f"'{e.name}' is not a constant")
            return convert_int(value, t)
        if isinstance(e, (ast.SizeofType, ast.SizeofExpr)):
            return self.unit.sizes[e]
        if isinstance(e, ast.Cast):
            inner = self.type_of(e.operand)
            if not _is_int(inner):
                raise NotConstant(e, "cast from non-integer")
            return convert_int(self.eval(e.operand), t)
        if isinstance(e, ast.Unary) and e.op in ("-", "+", "~", "!"):
            v = self.eval(e.operand)
            if e.op == "!":
                return int(v == 0)
            return int_unop(e.op, convert_int(v, t), t)
        if isinstance(e, ast.Binary):
            if e.op == "&&":
                return int(self.eval(e.left) != 0 and self.eval(e.right) != 0)
            if e.op == "||":
                return int(self.eval(e.left) != 0 or self.eval(e.right) != 0)
            if e.op == ",":
                raise NotConstant(e, "comma operator in constant expression")
            at = self.unit.arith_types[e]
            a = self.eval(e.left)
            b = self.eval(e.right)
            if e.op in ("<<", ">>"):
                return int_binop(e.op, convert_int(a, at), b, at)
            return int_binop(e.op, convert_int(a, at), convert_int(b, at), at)
        if isinstance(e, ast.Conditional):
            c = self.eval(e.cond)
            chosen = e.then if c else e.otherwise
            return convert_int(self.eval(chosen), t)
        raise NotConstant(e)


def fold(unit, expr, ident_value=None) -> Optional[int]:
    """Value of ``expr`` or ``None`` if it is not foldable.

    Arithmetic faults also yield ``None``: a faulting condition is left to
    the flow analyses rather than guessed.
    """
    try:
        return ConstEvaluator(unit, ident_value).eval(expr)
    except (NotConstant, ArithmeticFault, KeyError):
        return None


def is_floating(t) -> bool:
    return isinstance(t, FloatType)
