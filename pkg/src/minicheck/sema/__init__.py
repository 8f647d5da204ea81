"""Name resolution, typing and the libc profile."""

from __future__ import annotations

from ..frontend import parse_source
from . import types
from .consteval import ArithmeticFault, fold
from .libc import DEFAULT_PROFILE, LibcProfile
from .resolve import SemaError, Symbol, TypedUnit, resolve_and_type


def load(source: str, file_id: str = "<input>", defines=None, include_paths=(),
         profile: LibcProfile = DEFAULT_PROFILE) -> TypedUnit:
    """Preprocess, parse and type one translation unit."""
    tu = parse_source(source, file_id, defines, include_paths, typedef_names=profile.typedef_names)
    unit = resolve_and_type(tu, profile)
    unit.source = source
    return unit


__all__ = [
    "ArithmeticFault",
    "DEFAULT_PROFILE",
    "LibcProfile",
    "SemaError",
    "Symbol",
    "TypedUnit",
    "fold",
    "load",
    "resolve_and_type",
    "types",
]
