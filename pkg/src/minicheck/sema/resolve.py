"""Name resolution and typing.

The result is a :class:`TypedUnit`: the untouched AST plus side tables
keyed by node identity.  Implicit conversions are recorded in
``conversions`` (expression -> type it is converted to) instead of being
spliced into the tree, so the AST stays exactly what the parser built.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional

from ..frontend import ast
from ..frontend.parser import parse
from ..frontend.preprocessor import preprocess
from ..frontend.tokens import FrontendError, SourceSpan, UnsupportedConstruct
from . import types as T
from .consteval import ArithmeticFault, ConstEvaluator, NotConstant
from .libc import DEFAULT_PROFILE, LibcProfile


class SemaError(FrontendError):
    """Fatal name-resolution or typing error."""


@dataclass(eq=False)
class Symbol:
    name: str
    decl_span: SourceSpan
    storage: str  # automatic | static | extern | typedef-name | enumerator | function
    type: T.TypeRepr
    libc_tag: Optional[str] = None
    is_parameter: bool = False
    address_taken: bool = False
    function: Optional[str] = None  # enclosing function of block-scope symbols
    defined: bool = False
    value: Optional[int] = None  # enumerators
    builtin: bool = False
    internal: bool = False  # declared ``static`` at file scope
    decl: Optional[ast.Node] = None

    @property
    def is_local(self) -> bool:
        return self.function is not None and self.storage == "automatic"

    @property
    def is_volatile(self) -> bool:
        return self.type.volatile

    def __repr__(self):
        where = f" in {self.function}" if self.function else ""
        return f"<Symbol {self.name} {self.storage}{where}>"


class Scope:
    def __init__(self, parent: Optional["Scope"] = None, kind: str = "block"):
        self.parent = parent
        self.kind = kind
        self.names: dict[str, Symbol] = {}
        self.tags: dict[str, T.TypeRepr] = {}

    def lookup(self, name: str) -> Optional[Symbol]:
        scope = self
        while scope is not None:
            if name in scope.names:
                return scope.names[name]
            scope = scope.parent
        return None

    def lookup_tag(self, tag: str):
        scope = self
        while scope is not None:
            if tag in scope.tags:
                return scope.tags[tag]
            scope = scope.parent
        return None


@dataclass(eq=False)
class TypedUnit:
    ast: ast.TranslationUnit
    profile: LibcProfile
    symbols: list[Symbol] = field(default_factory=list)
    globals: dict[str, Symbol] = field(default_factory=dict)
    resolutions: dict = field(default_factory=dict)  # Ident -> Symbol
    expr_types: dict = field(default_factory=dict)  # Expr -> TypeRepr
    conversions: dict = field(default_factory=dict)  # Expr -> TypeRepr
    arith_types: dict = field(default_factory=dict)  # operator -> operation type
    sizes: dict = field(default_factory=dict)  # sizeof node -> bytes
    declared: dict = field(default_factory=dict)  # declaring node -> Symbol
    parents: dict = field(default_factory=dict)
    function_of: dict = field(default_factory=dict)  # stmt_id -> FunctionDef
    locals: dict = field(default_factory=dict)  # function name -> [Symbol]
    builtins: dict = field(default_factory=dict)  # libc name -> Symbol
    source: str = ""

    @property
    def file_id(self) -> str:
        return self.ast.span.file_id

    def type_of(self, expr) -> T.TypeRepr:
        return self.expr_types[expr]

    def value_type(self, expr) -> T.TypeRepr:
        """Type after array/function decay."""
        return T.decay(self.expr_types[expr])

    def symbol_of(self, expr) -> Optional[Symbol]:
        return self.resolutions.get(expr)

    def parent(self, node):
        return self.parents.get(node)

    def ancestors(self, node):
        node = self.parents.get(node)
        while node is not None:
            yield node
            node = self.parents.get(node)

    def enclosing_stmt(self, node) -> Optional[ast.Stmt]:
        if isinstance(node, ast.Stmt):
            return node
        for a in self.ancestors(node):
            if isinstance(a, ast.Stmt):
                return a
        return None

    def enclosing_function(self, node) -> Optional[ast.FunctionDef]:
        for a in self.ancestors(node):
            if isinstance(a, ast.FunctionDef):
                return a
        return None

    @property
    def functions(self) -> dict[str, ast.FunctionDef]:
        return {f.name: f for f in self.ast.functions}

    def function_symbol(self, name: str) -> Optional[Symbol]:
        return self.globals.get(name) or self.builtins.get(name)

    def callee(self, call: ast.Call) -> Optional[Symbol]:
        """Symbol of a direct call target, else ``None``."""
        if isinstance(call.func, ast.Ident):
            sym = self.resolutions.get(call.func)
            if sym is not None and sym.storage == "function":
                return sym
        return None

    def callee_tag(self, call: ast.Call) -> Optional[str]:
        sym = self.callee(call)
        return sym.libc_tag if sym is not None else None


def _canonical_base(spec: ast.DeclSpec) -> str:
    words = Counter(spec.base)
    signed = words.pop("signed", 0)
    unsigned = words.pop("unsigned", 0)
    longs = words.pop("long", 0)
    shorts = words.pop("short", 0)
    rest = sorted(words.elements())
    bad = SemaError("invalid combination of type specifiers", spec.span)
    if signed + unsigned > 1 or longs > 2 or shorts > 1 or (longs and shorts):
        raise bad
    if rest in (["void"], ["_Bool"], ["float"]) and not (signed or unsigned or longs or shorts):
        return rest[0]
    if rest == ["double"] and not (signed or unsigned or shorts) and longs <= 1:
        return "long double" if longs else "double"
    if rest == ["char"]:
        if longs or shorts:
            raise bad
        return "signed char" if signed else "unsigned char" if unsigned else "char"
    if rest not in ([], ["int"]):
        raise bad
    if shorts:
        base = "short"
    elif longs == 2:
        base = "long long"
    elif longs == 1:
        base = "long"
    else:
        base = "int"
    return f"unsigned {base}" if unsigned else base


class Resolver:
    def __init__(self, unit_ast: ast.TranslationUnit, profile: LibcProfile):
        self.profile = profile
        self.unit = TypedUnit(ast=unit_ast, profile=profile)
        self.builtin = Scope(kind="builtin")
        self.file = Scope(self.builtin, kind="file")
        self.scope = self.file
        self.fn: Optional[ast.FunctionDef] = None
        self.fn_type: Optional[T.FunctionType] = None
        self.consts = ConstEvaluator(self.unit)
        self._install_builtins()

    # -- builtins -----------------------------------------------------------

    def _install_builtins(self):
        for name, spelling in self.profile.typedefs.items():
            self._builtin(name, "typedef-name", replace(T.int_type(spelling), alias=name))
        for name in self.profile.opaque:
            self._builtin(name, "typedef-name", T.OpaqueType(name=name, alias=name))
        unit_ast = parse(
            preprocess(self.profile.prototypes, file_id="<libc>", predefined={}).tokens,
            typedef_names=self.profile.typedef_names,
        )
        saved = self.scope
        self.scope = self.builtin
        for item in unit_ast.items:
            self.declaration(item, builtin=True)
        self.scope = saved
        self.unit.builtins = self.builtin.names

    def _builtin(self, name, storage, typ):
        sym = Symbol(name, SourceSpan("<libc>", 1, 1), storage, typ,
                     libc_tag=self.profile.tag(name), builtin=True, defined=True)
        self.builtin.names[name] = sym
        return sym

    # -- helpers ------------------------------------------------------------

    def error(self, message, node):
        return SemaError(message, node.span)

    def push(self, kind="block"):
        self.scope = Scope(self.scope, kind)

    def pop(self):
        self.scope = self.scope.parent

    def set_type(self, expr, t):
        self.unit.expr_types[expr] = t
        return t

    def convert(self, expr, target: T.TypeRepr):
        """Record an implicit conversion of ``expr`` to ``target``."""
        have = self.unit.value_type(expr).unqualified()
        target = target.unqualified()
        if have != target:
            self.unit.conversions[expr] = target

    def ice(self, expr, what: str) -> int:
        try:
            return self.consts.eval(expr)
        except NotConstant:
            raise self.error(f"{what} is not an integer constant expression", expr) from None
        except ArithmeticFault as exc:
            raise self.error(f"{exc} in constant expression", expr) from None

    # -- types --------------------------------------------------------------

    def base_type(self, spec: ast.DeclSpec) -> T.TypeRepr:
        if spec.typedef_name is not None:
            sym = self.scope.lookup(spec.typedef_name)
            if sym is None or sym.storage != "typedef-name":
                raise self.error(f"unknown type name '{spec.typedef_name}'", spec)
            t = sym.type
        elif spec.record is not None:
            t = self.record(spec.record)
        elif spec.enum is not None:
            t = self.enum(spec.enum)
        else:
            name = _canonical_base(spec)
            if name == "void":
                t = T.VOID
            elif name in ("float", "double", "long double"):
                t = T.FloatType(name=name, width=T.dialect.FLOAT_WIDTHS[name])
            else:
                t = T.int_type(name)
        return t.qualified("const" in spec.qualifiers, "volatile" in spec.qualifiers)

    def derive(self, t: T.TypeRepr, derivations, node, param=False) -> T.TypeRepr:
        for d in reversed(derivations):
            if isinstance(d, ast.PointerDerivation):
                t = T.PointerType(
                    pointee=t, const="const" in d.qualifiers, volatile="volatile" in d.qualifiers
                )
            elif isinstance(d, ast.ArrayDerivation):
                if isinstance(t, T.FunctionType):
                    raise self.error("array of functions", node)
                length = None
                if d.size is not None:
                    self.expr(d.size)
                    try:
                        length = self.consts.eval(d.size)
                    except NotConstant:
                        raise UnsupportedConstruct(
                            "variable length array: outside MiniC subset", d.size.span
                        ) from None
                    except ArithmeticFault as exc:
                        raise self.error(f"{exc} in array size", d.size) from None
                    if length <= 0:
                        raise self.error("array size must be positive", d.size)
                t = T.ArrayType(element=t, length=length)
            else:
                if isinstance(t, (T.FunctionType, T.ArrayType)):
                    raise self.error("function cannot return array or function type", node)
                self.push("prototype")
                params = []
                names = []
                for p in d.params:
                    pt = self.param_type(p)
                    if isinstance(pt, T.VoidType):
                        raise self.error("parameter has void type", p)
                    params.append(pt)
                    names.append(p.name)
                self.pop()
                prototyped = bool(d.params) or not d.variadic
                t = T.FunctionType(
                    ret=t, params=tuple(params), param_names=tuple(names),
                    variadic=d.variadic and prototyped, prototyped=prototyped,
                )
        return t

    def param_type(self, p: ast.ParamDecl) -> T.TypeRepr:
        if p.spec.storage not in (None, "register"):
            raise self.error("invalid storage class for parameter", p)
        t = self.derive(self.base_type(p.spec), p.derivations, p, param=True)
        if isinstance(t, T.ArrayType):
            t = T.PointerType(pointee=t.element)
        elif isinstance(t, T.FunctionType):
            t = T.PointerType(pointee=t)
        return t

    def record(self, spec: ast.StructSpec) -> T.TypeRepr:
        if spec.members is None:
            found = self.scope.lookup_tag(spec.tag)
            if found is None:
                found = T.RecordType(info=T.RecordInfo(spec.kind, spec.tag))
                self.scope.tags[spec.tag] = found
            elif not isinstance(found, T.RecordType) or found.info.kind != spec.kind:
                raise self.error(f"'{spec.tag}' defined as wrong kind of tag", spec)
            return found
        found = self.scope.tags.get(spec.tag) if spec.tag else None
        if found is not None and isinstance(found, T.RecordType) and not found.info.complete:
            info = found.info
        elif found is not None:
            raise self.error(f"redefinition of '{spec.kind} {spec.tag}'", spec)
        else:
            info = T.RecordInfo(spec.kind, spec.tag)
        rt = T.RecordType(info=info)
        if spec.tag:
            self.scope.tags[spec.tag] = rt
        members = []
        seen = set()
        for decl in spec.members:
            base = self.base_type(decl.spec)
            for d in decl.declarators:
                mt = self.derive(base, d.derivations, d)
                if T.sizeof(mt) is None or isinstance(mt, T.FunctionType):
                    raise self.error(f"member '{d.name}' has incomplete type", d)
                if d.name in seen:
                    raise self.error(f"duplicate member '{d.name}'", d)
                seen.add(d.name)
                members.append((d.name, mt))
        if not members:
            raise self.error(f"{spec.kind} has no members", spec)
        info.members = members
        return rt

    def enum(self, spec: ast.EnumSpec) -> T.TypeRepr:
        if spec.enumerators is None:
            found = self.scope.lookup_tag(spec.tag)
            if found is None:
                raise self.error(f"use of undeclared enum '{spec.tag}'", spec)
            return found
        et = T.EnumType(tag=spec.tag)
        if spec.tag:
            if spec.tag in self.scope.tags:
                raise self.error(f"redefinition of 'enum {spec.tag}'", spec)
            self.scope.tags[spec.tag] = et
        value = -1
        for e in spec.enumerators:
            if e.value is not None:
                self.expr(e.value)
                value = self.ice(e.value, "enumerator value")
            else:
                value += 1
            if not T.dialect.fits(value, 32, True):
                raise self.error("enumerator value out of range", e)
            sym = self.declare(Symbol(e.name, e.span, "enumerator", T.INT, value=value, decl=e), e)
            self.unit.declared[e] = sym
        return et

    # -- declarations -------------------------------------------------------

    def declare(self, sym: Symbol, node) -> Symbol:
        scope = self.scope
        prev = scope.names.get(sym.name)
        if prev is not None:
            merged = self.merge(prev, sym, node)
            if merged is not None:
                return merged
            raise self.error(f"redefinition of '{sym.name}'", node)
        if sym.libc_tag is None and scope.kind in ("file", "block"):
            if sym.storage in ("function", "extern") or scope.kind == "file":
                sym.libc_tag = self.profile.tag(sym.name)
        scope.names[sym.name] = sym
        if not sym.builtin:
            self.unit.symbols.append(sym)
        if scope is self.file:
            self.unit.globals[sym.name] = sym
        return sym

    def merge(self, prev: Symbol, new: Symbol, node) -> Optional[Symbol]:
        linkage = ("function", "extern", "static")
        if self.scope.kind != "file" and not (
            new.storage in ("function", "extern") and prev.storage in ("function", "extern")
        ):
            return None
        if prev.storage not in linkage or new.storage not in linkage:
            if prev.storage == "typedef-name" and new.storage == "typedef-name" and prev.type.same(new.type):
                return prev
            return None
        if not _compatible(prev.type, new.type):
            raise self.error(f"conflicting types for '{new.name}'", node)
        if prev.defined and new.defined:
            if prev.storage == "function" or new.storage == "function":
                return None
            if getattr(prev.decl, "init", None) is not None and getattr(new.decl, "init", None) is not None:
                return None
        prev.type = _composite(prev.type, new.type)
        if new.defined:
            prev.defined = True
            prev.decl_span = new.decl_span
            prev.decl = new.decl
        prev.internal = prev.internal or new.internal
        return prev

    def declaration(self, decl: ast.Declaration, builtin=False):
        spec = decl.spec
        base = self.base_type(spec)
        file_scope = self.scope.kind in ("file", "builtin")
        if spec.storage in ("auto", "register") and file_scope:
            raise self.error(f"'{spec.storage}' at file scope", decl)
        for d in decl.declarators:
            t = self.derive(base, d.derivations, d)
            if spec.storage == "typedef":
                if d.init is not None:
                    raise self.error("typedef cannot have an initializer", d)
                storage = "typedef-name"
            elif isinstance(t, T.FunctionType):
                if d.init is not None:
                    raise self.error("function declaration cannot have an initializer", d)
                storage = "function"
            elif spec.storage == "static":
                storage = "static"
            elif spec.storage == "extern" or file_scope:
                storage = "extern"
            else:
                storage = "automatic"
            if isinstance(t, T.VoidType) and storage != "typedef-name":
                raise self.error(f"variable '{d.name}' has void type", d)
            defined = storage in ("automatic", "static") or (
                storage == "extern" and (d.init is not None or spec.storage != "extern")
            )
            if d.init is not None and isinstance(t, T.ArrayType) and t.length is None:
                t = T.ArrayType(element=t.element, length=_init_length(d.init), const=t.const)
            if storage in ("automatic", "static") or (storage == "extern" and defined):
                if T.sizeof(t) is None:
                    if isinstance(t, T.OpaqueType) and storage == "automatic":
                        pass  # FILE objects may be declared but never sized
                    else:
                        raise self.error(f"variable '{d.name}' has incomplete type", d)
            sym = Symbol(
                d.name, d.span, storage, t, defined=defined, builtin=builtin, decl=d,
                function=self.fn.name if (self.fn is not None and storage in ("automatic", "static")) else None,
            )
            if builtin:
                sym.libc_tag = self.profile.tag(d.name)
            if file_scope and spec.storage == "static":
                sym.internal = True
            sym = self.declare(sym, d)
            self.unit.declared[d] = sym
            if sym.function is not None:
                self.unit.locals.setdefault(sym.function, []).append(sym)
            if d.init is not None:
                self.initializer(d.init, sym.type, d)

    def initializer(self, init, t: T.TypeRepr, node):
        if isinstance(init, ast.InitList):
            self.set_type(init, t)
            if isinstance(t, T.ArrayType):
                if t.length is not None and len(init.items) > t.length:
                    raise self.error("excess elements in array initializer", init)
                for item in init.items:
                    self.initializer(item, t.element, node)
            elif isinstance(t, T.RecordType):
                members = t.info.members or []
                if t.info.kind == "union":
                    members = members[:1]
                if len(init.items) > len(members):
                    raise self.error("excess elements in struct initializer", init)
                for item, (_, mt) in zip(init.items, members):
                    self.initializer(item, mt, node)
            else:
                if len(init.items) != 1:
                    raise self.error("scalar initializer must have one element", init)
                self.initializer(init.items[0], t, node)
            return
        vt = self.expr(init)
        if isinstance(t, T.ArrayType):
            if isinstance(init, ast.StringLit) and T.is_char_type(t.element.unqualified()) or (
                isinstance(init, ast.StringLit) and isinstance(t.element, T.IntType) and t.element.width == 8
            ):
                if t.length is not None and len(init.value) > t.length:
                    raise self.error("initializer string too long", init)
                return
            raise self.error("array initializer must be an initializer list", init)
        self.assign_check(t, init, vt, init)

    def assign_check(self, target: T.TypeRepr, value, vt, node):
        vt = T.decay(vt)
        if isinstance(target, T.RecordType) or isinstance(vt, T.RecordType):
            if not target.same(vt):
                raise self.error(f"incompatible types assigning '{vt}' to '{target}'", node)
            return
        if isinstance(target, T.OpaqueType) or isinstance(vt, T.OpaqueType):
            if not target.same(vt):
                raise self.error(f"incompatible types assigning '{vt}' to '{target}'", node)
            return
        if isinstance(vt, T.VoidType):
            raise self.error("void value not ignored as it ought to be", node)
        if isinstance(target, T.PointerType) and vt.is_arithmetic and not isinstance(vt, T.FloatType):
            if not self._is_null_constant(value):
                raise self.error(f"integer to pointer conversion assigning to '{target}'", node)
        if isinstance(target, T.PointerType) and isinstance(vt, T.FloatType):
            raise self.error(f"incompatible types assigning '{vt}' to '{target}'", node)
        if target.is_arithmetic and isinstance(vt, T.PointerType) and not (
            isinstance(target, T.IntType) and target.name == "_Bool"
        ):
            raise self.error(f"pointer to integer conversion assigning to '{target}'", node)
        self.convert(value, target)

    def _is_null_constant(self, e) -> bool:
        try:
            return self.consts.eval(e) == 0
        except (NotConstant, ArithmeticFault, KeyError):
            return False

    # -- translation unit ---------------------------------------------------

    def run(self) -> TypedUnit:
        u = self.unit
        for node in u.ast.walk():
            for child in node.children():
                u.parents[child] = node
        for item in u.ast.items:
            if isinstance(item, ast.FunctionDef):
                self.function(item)
            else:
                self.declaration(item)
        return u

    def function(self, fn: ast.FunctionDef):
        if fn.spec.storage not in (None, "static", "extern"):
            raise self.error(f"invalid storage class '{fn.spec.storage}' for function", fn)
        t = self.derive(self.base_type(fn.spec), fn.derivations, fn)
        sym = Symbol(fn.name, fn.span, "function", t, defined=True, decl=fn,
                     internal=fn.spec.storage == "static")
        sym = self.declare(sym, fn)
        self.unit.declared[fn] = sym
        self.fn = fn
        self.fn_type = t
        self.unit.locals.setdefault(fn.name, [])
        self.push("function")
        for p, pt in zip(fn.params, t.params):
            if p.name is None:
                raise self.error("parameter name omitted", p)
            psym = Symbol(p.name, p.span, "automatic", pt, is_parameter=True,
                          function=fn.name, defined=True, decl=p)
            psym = self.declare(psym, p)
            self.unit.declared[p] = psym
            self.unit.locals[fn.name].append(psym)
        labels = set()
        for node in fn.body.walk():
            if isinstance(node, ast.Labeled):
                if node.label in labels:
                    raise self.error(f"redefinition of label '{node.label}'", node)
                labels.add(node.label)
        self.compound(fn.body, new_scope=False)
        self.pop()
        self.fn = None
        self.fn_type = None

    # -- statements ---------------------------------------------------------

    def compound(self, block: ast.Compound, new_scope=True):
        self.unit.function_of[block.stmt_id] = self.fn
        if new_scope:
            self.push()
        for item in block.items:
            self.stmt(item)
        if new_scope:
            self.pop()

    def cond(self, e):
        t = T.decay(self.expr(e))
        if not t.is_scalar:
            raise self.error(f"controlling expression of type '{t}' is not scalar", e)

    def stmt(self, s: ast.Stmt):
        self.unit.function_of[s.stmt_id] = self.fn
        if isinstance(s, ast.Compound):
            self.compound(s)
        elif isinstance(s, ast.DeclStmt):
            self.declaration(s.decl)
        elif isinstance(s, ast.ExprStmt):
            if s.expr is not None:
                self.expr(s.expr)
        elif isinstance(s, ast.If):
            self.cond(s.cond)
            self.stmt(s.then)
            if s.otherwise is not None:
                self.stmt(s.otherwise)
        elif isinstance(s, ast.Switch):
            t = self.expr(s.cond)
            if not t.is_integer:
                raise self.error("switch condition is not an integer", s.cond)
            self.convert(s.cond, T.promote(t))
            seen = {}
            self._switch_labels(s.body, seen, s)
            self.stmt(s.body)
        elif isinstance(s, (ast.While, ast.DoWhile)):
            if isinstance(s, ast.While):
                self.cond(s.cond)
                self.stmt(s.body)
            else:
                self.stmt(s.body)
                self.cond(s.cond)
        elif isinstance(s, ast.For):
            self.push()
            if isinstance(s.init, ast.Declaration):
                if s.init.spec.storage not in (None, "auto", "register"):
                    raise self.error("invalid storage class in for-loop declaration", s.init)
                self.declaration(s.init)
            elif s.init is not None:
                self.expr(s.init)
            if s.cond is not None:
                self.cond(s.cond)
            if s.step is not None:
                self.expr(s.step)
            self.stmt(s.body)
            self.pop()
        elif isinstance(s, ast.Return):
            ret = self.fn_type.ret
            if s.value is None:
                if not isinstance(ret, T.VoidType):
                    raise self.error(f"non-void function '{self.fn.name}' should return a value", s)
            else:
                vt = self.expr(s.value)
                if isinstance(ret, T.VoidType):
                    raise self.error(f"void function '{self.fn.name}' should not return a value", s)
                self.assign_check(ret, s.value, vt, s.value)
        elif isinstance(s, ast.Labeled):
            self.stmt(s.stmt)
        elif isinstance(s, ast.Case):
            self.stmt(s.stmt)
        elif isinstance(s, ast.Default):
            self.stmt(s.stmt)
        elif isinstance(s, (ast.Goto, ast.Break, ast.Continue)):
            self._jump_context(s)

    def _jump_context(self, s):
        if isinstance(s, ast.Goto):
            return
        loops = (ast.While, ast.DoWhile, ast.For)
        ok = loops + (ast.Switch,) if isinstance(s, ast.Break) else loops
        for a in self.unit.ancestors(s):
            if isinstance(a, ok):
                return
            if isinstance(a, ast.FunctionDef):
                break
        word = "break" if isinstance(s, ast.Break) else "continue"
        raise self.error(f"'{word}' statement not in loop" + (" or switch" if word == "break" else ""), s)

    def _switch_labels(self, node, seen, switch):
        """Type and fold case labels that belong to ``switch``."""
        if isinstance(node, ast.Switch) and node is not switch:
            return
        if isinstance(node, ast.Case):
            self.expr(node.value)
            v = self.ice(node.value, "case label")
            key = v
            if key in seen:
                raise self.error(f"duplicate case value '{v}'", node)
            seen[key] = node
        elif isinstance(node, ast.Default):
            if "default" in seen:
                raise self.error("multiple default labels in one switch", node)
            seen["default"] = node
        for child in node.children():
            if isinstance(child, ast.Stmt):
                self._switch_labels(child, seen, switch)

    # -- expressions --------------------------------------------------------

    def lvalue_root(self, e):
        """Identifier whose storage an lvalue designates, if any."""
        while True:
            if isinstance(e, ast.Ident):
                return e
            if isinstance(e, ast.Member) and not e.arrow:
                e = e.obj
            elif isinstance(e, ast.Index) and isinstance(self.unit.expr_types.get(e.base), T.ArrayType):
                e = e.base
            else:
                return None

    def is_lvalue(self, e) -> bool:
        if isinstance(e, ast.Ident):
            sym = self.unit.resolutions[e]
            return sym.storage in ("automatic", "static", "extern")
        if isinstance(e, ast.Unary) and e.op == "*":
            return True
        if isinstance(e, (ast.Index, ast.StringLit)):
            return True
        if isinstance(e, ast.Member):
            return e.arrow or self.is_lvalue(e.obj)
        return False

    def modifiable(self, e, what):
        if not self.is_lvalue(e):
            raise self.error(f"expression is not assignable ({what})", e)
        t = self.unit.expr_types[e]
        if isinstance(t, T.ArrayType):
            raise self.error("assignment to array type", e)
        if t.const:
            raise self.error("assignment to const-qualified object", e)
        if isinstance(t, T.RecordType) and any(mt.const for _, mt in t.info.members or ()):
            raise self.error("assignment to record with const member", e)

    def expr(self, e: ast.Expr) -> T.TypeRepr:
        t = self._expr(e)
        self.unit.expr_types[e] = t
        return t

    def _expr(self, e):
        u = self.unit
        if isinstance(e, ast.Ident):
            sym = self.scope.lookup(e.name)
            if sym is None:
                raise self.error(f"use of undeclared identifier '{e.name}'", e)
            if sym.storage == "typedef-name":
                raise self.error(f"unexpected type name '{e.name}'", e)
            u.resolutions[e] = sym
            return T.INT if sym.storage == "enumerator" else sym.type
        if isinstance(e, ast.IntConst):
            return _int_const_type(e)
        if isinstance(e, ast.FloatConst):
            if e.text[-1] in "fF":
                return T.FloatType(name="float", width=32)
            return T.DOUBLE
        if isinstance(e, ast.CharConst):
            return T.INT
        if isinstance(e, ast.StringLit):
            return T.ArrayType(element=T.CHAR, length=len(e.value) + 1)
        if isinstance(e, ast.Unary):
            return self.unary(e)
        if isinstance(e, ast.Postfix):
            t = self.expr(e.operand)
            self._incdec(e.operand, t)
            return t.unqualified()
        if isinstance(e, ast.Binary):
            return self.binary(e)
        if isinstance(e, ast.Assign):
            return self.assign(e)
        if isinstance(e, ast.Conditional):
            return self.conditional(e)
        if isinstance(e, ast.Call):
            return self.call(e)
        if isinstance(e, ast.Cast):
            target = self.derive(self.base_type(e.type_name.spec), e.type_name.derivations, e)
            vt = T.decay(self.expr(e.operand))
            if not isinstance(target, T.VoidType):
                if not (target.is_scalar and vt.is_scalar):
                    raise self.error(f"invalid cast from '{vt}' to '{target}'", e)
                if isinstance(target, T.PointerType) and isinstance(vt, T.FloatType):
                    raise self.error("cannot cast floating value to pointer", e)
                if isinstance(vt, T.PointerType) and isinstance(target, T.FloatType):
                    raise self.error("cannot cast pointer to floating type", e)
            return target.unqualified()
        if isinstance(e, ast.SizeofType):
            t = self.derive(self.base_type(e.type_name.spec), e.type_name.derivations, e)
            return self._sizeof(e, t)
        if isinstance(e, ast.SizeofExpr):
            return self._sizeof(e, self.expr(e.operand))
        if isinstance(e, ast.Member):
            return self.member(e)
        if isinstance(e, ast.Index):
            bt = T.decay(self.expr(e.base))
            it = T.decay(self.expr(e.index))
            if isinstance(it, T.PointerType) and bt.is_integer:
                bt, it = it, bt
            if not isinstance(bt, T.PointerType) or not it.is_integer:
                raise self.error("subscripted value is not an array or pointer", e)
            if isinstance(bt.pointee, (T.VoidType, T.FunctionType)):
                raise self.error("subscript of pointer to incomplete type", e)
            return bt.pointee
        if isinstance(e, ast.InitList):
            raise self.error("initializer list used as expression", e)
        raise self.error(f"unsupported expression {type(e).__name__}", e)

    def _sizeof(self, e, t):
        size = T.sizeof(t)
        if size is None:
            if isinstance(t, T.OpaqueType):
                raise self.error(f"invalid application of 'sizeof' to opaque type '{t}'", e)
            raise self.error(f"invalid application of 'sizeof' to incomplete type '{t}'", e)
        self.unit.sizes[e] = size
        return T.SIZE_T

    def _incdec(self, operand, t):
        self.modifiable(operand, "increment/decrement")
        if not T.decay(t).is_scalar:
            raise self.error("cannot increment value of this type", operand)

    def unary(self, e: ast.Unary):
        op = e.op
        if op == "&":
            t = self.expr(e.operand)
            o = e.operand
            if isinstance(o, ast.Ident) and self.unit.resolutions[o].storage == "function":
                self.unit.resolutions[o].address_taken = True
                return T.PointerType(pointee=t)
            if not self.is_lvalue(o):
                raise self.error("cannot take the address of an rvalue", e)
            root = self.lvalue_root(o)
            if root is not None:
                sym = self.unit.resolutions[root]
                if sym.storage == "enumerator":
                    raise self.error("cannot take the address of an enumerator", e)
                sym.address_taken = True
            return T.PointerType(pointee=t)
        t = self.expr(e.operand)
        if op == "*":
            pt = T.decay(t)
            if not isinstance(pt, T.PointerType):
                raise self.error(f"indirection requires pointer operand ('{t}' invalid)", e)
            if isinstance(pt.pointee, T.VoidType):
                raise self.error("indirection through pointer to void", e)
            return pt.pointee
        if op in ("++", "--"):
            self._incdec(e.operand, t)
            return t.unqualified()
        if op == "!":
            if not T.decay(t).is_scalar:
                raise self.error("invalid operand to '!'", e)
            return T.INT
        if op == "~" and not t.is_integer:
            raise self.error("invalid operand to '~'", e)
        if op in ("-", "+") and not t.is_arithmetic:
            raise self.error(f"invalid operand to unary '{op}'", e)
        pt = T.promote(t)
        self.convert(e.operand, pt)
        self.unit.arith_types[e] = pt
        return pt

    def arith(self, e, left, right, lt, rt):
        ct = T.usual_arithmetic(lt, rt)
        self.convert(left, ct)
        self.convert(right, ct)
        self.unit.arith_types[e] = ct
        return ct

    def binary(self, e: ast.Binary):
        op = e.op
        lt = T.decay(self.expr(e.left))
        rt = T.decay(self.expr(e.right))
        if op == ",":
            return rt
        if op in ("&&", "||"):
            if not (lt.is_scalar and rt.is_scalar):
                raise self.error(f"invalid operands to '{op}'", e)
            return T.INT
        if op in ("*", "/"):
            if not (lt.is_arithmetic and rt.is_arithmetic):
                raise self.error(f"invalid operands to binary '{op}' ('{lt}' and '{rt}')", e)
            return self.arith(e, e.left, e.right, lt, rt)
        if op in ("%", "&", "|", "^"):
            if not (lt.is_integer and rt.is_integer):
                raise self.error(f"invalid operands to binary '{op}' ('{lt}' and '{rt}')", e)
            return self.arith(e, e.left, e.right, lt, rt)
        if op in ("<<", ">>"):
            if not (lt.is_integer and rt.is_integer):
                raise self.error(f"invalid operands to binary '{op}' ('{lt}' and '{rt}')", e)
            pl = T.promote(lt)
            self.convert(e.left, pl)
            self.convert(e.right, T.promote(rt))
            self.unit.arith_types[e] = pl
            return pl
        if op in ("+", "-"):
            if lt.is_arithmetic and rt.is_arithmetic:
                return self.arith(e, e.left, e.right, lt, rt)
            if isinstance(lt, T.PointerType) and rt.is_integer:
                self._pointer_arith_ok(lt, e)
                return lt.unqualified()
            if op == "+" and lt.is_integer and isinstance(rt, T.PointerType):
                self._pointer_arith_ok(rt, e)
                return rt.unqualified()
            if op == "-" and isinstance(lt, T.PointerType) and isinstance(rt, T.PointerType):
                self._pointer_arith_ok(lt, e)
                return T.LONG
            raise self.error(f"invalid operands to binary '{op}' ('{lt}' and '{rt}')", e)
        # relational and equality
        if lt.is_arithmetic and rt.is_arithmetic:
            self.arith(e, e.left, e.right, lt, rt)
            return T.INT
        if isinstance(lt, T.PointerType) and isinstance(rt, T.PointerType):
            return T.INT
        if op in ("==", "!="):
            if isinstance(lt, T.PointerType) and self._is_null_constant(e.right):
                return T.INT
            if isinstance(rt, T.PointerType) and self._is_null_constant(e.left):
                return T.INT
        raise self.error(f"invalid operands to binary '{op}' ('{lt}' and '{rt}')", e)

    def _pointer_arith_ok(self, pt, e):
        if T.sizeof(pt.pointee) is None:
            raise self.error(f"arithmetic on pointer to incomplete type '{pt.pointee}'", e)

    def assign(self, e: ast.Assign):
        tt = self.expr(e.target)
        vt = T.decay(self.expr(e.value))
        self.modifiable(e.target, "assignment")
        if e.op == "=":
            self.assign_check(tt.unqualified(), e.value, vt, e)
            return tt.unqualified()
        op = e.op[:-1]
        ut = tt.unqualified()
        if op in ("+", "-") and isinstance(ut, T.PointerType):
            if not vt.is_integer:
                raise self.error(f"invalid operands to '{e.op}'", e)
            return ut
        if op in ("<<", ">>"):
            if not (ut.is_integer and vt.is_integer):
                raise self.error(f"invalid operands to '{e.op}'", e)
            self.unit.arith_types[e] = T.promote(ut)
            return ut
        if op in ("%", "&", "|", "^"):
            if not (ut.is_integer and vt.is_integer):
                raise self.error(f"invalid operands to '{e.op}'", e)
        elif not (ut.is_arithmetic and vt.is_arithmetic):
            raise self.error(f"invalid operands to '{e.op}'", e)
        ct = T.usual_arithmetic(ut, vt)
        self.convert(e.value, ct)
        self.unit.arith_types[e] = ct
        return ut

    def conditional(self, e: ast.Conditional):
        self.cond(e.cond)
        a = T.decay(self.expr(e.then))
        b = T.decay(self.expr(e.otherwise))
        if a.is_arithmetic and b.is_arithmetic:
            ct = T.usual_arithmetic(a, b)
            self.convert(e.then, ct)
            self.convert(e.otherwise, ct)
            return ct
        if isinstance(a, T.VoidType) and isinstance(b, T.VoidType):
            return T.VOID
        if isinstance(a, T.PointerType) and isinstance(b, T.PointerType):
            if isinstance(a.pointee, T.VoidType):
                return b
            return a
        if isinstance(a, T.PointerType) and self._is_null_constant(e.otherwise):
            return a
        if isinstance(b, T.PointerType) and self._is_null_constant(e.then):
            return b
        if isinstance(a, T.RecordType) and a.same(b):
            return a.unqualified()
        raise self.error(f"incompatible operand types ('{a}' and '{b}')", e)

    def call(self, e: ast.Call):
        ft = T.decay(self.expr(e.func))
        if not (isinstance(ft, T.PointerType) and isinstance(ft.pointee, T.FunctionType)):
            raise self.error("called object is not a function or function pointer", e)
        ft = ft.pointee
        arg_types = [T.decay(self.expr(a)) for a in e.args]
        if ft.prototyped:
            n = len(ft.params)
            if len(e.args) < n or (len(e.args) > n and not ft.variadic):
                name = e.func.name if isinstance(e.func, ast.Ident) else "function"
                raise self.error(
                    f"type mismatch in call arity: '{name}' expects {n} argument"
                    f"{'s' if n != 1 else ''}, got {len(e.args)}", e,
                )
            for arg, at, pt in zip(e.args, arg_types, ft.params):
                self.assign_check(pt, arg, at, arg)
            extra = list(zip(e.args, arg_types))[n:]
        else:
            extra = list(zip(e.args, arg_types))
        for arg, at in extra:
            if isinstance(at, T.FloatType):
                self.convert(arg, T.DOUBLE)
            elif at.is_integer:
                self.convert(arg, T.promote(at))
        return ft.ret

    def member(self, e: ast.Member):
        ot = self.expr(e.obj)
        if e.arrow:
            pt = T.decay(ot)
            if not isinstance(pt, T.PointerType):
                raise self.error("member reference type is not a pointer", e)
            rt = pt.pointee
        else:
            rt = ot
        if isinstance(rt, T.OpaqueType):
            # Members of opaque library types are unknown; reading them is
            # allowed so the dereference checks can see the access.
            return T.INT.qualified(rt.const, rt.volatile)
        if not isinstance(rt, T.RecordType):
            raise self.error(f"member reference base type '{rt}' is not a structure or union", e)
        if not rt.info.complete:
            raise self.error(f"incomplete definition of type '{rt}'", e)
        mt = rt.info.member(e.name)
        if mt is None:
            raise self.error(f"no member named '{e.name}' in '{rt}'", e)
        return mt.qualified(rt.const, rt.volatile)


def _init_length(init) -> int:
    if isinstance(init, ast.InitList):
        return max(len(init.items), 1)
    if isinstance(init, ast.StringLit):
        return len(init.value) + 1
    raise SemaError("array initializer must be an initializer list", init.span)


def _int_const_type(e: ast.IntConst) -> T.TypeRepr:
    v, suffix = e.value, e.suffix
    decimal = not e.text.startswith("0") or e.text == "0"
    unsigned = "u" in suffix
    longs = suffix.count("l")
    candidates = []
    if not unsigned and longs == 0:
        candidates = [T.INT] + ([] if decimal else [T.UINT]) + [T.LONG] + ([] if decimal else [T.ULONG])
    elif unsigned and longs == 0:
        candidates = [T.UINT, T.ULONG]
    elif not unsigned:
        candidates = [T.LONG] + ([] if decimal else [T.ULONG])
    else:
        candidates = [T.ULONG]
    for c in candidates:
        if T.dialect.fits(v, c.width, c.signed):
            return c
    if decimal and not unsigned:
        raise SemaError(f"integer constant '{e.text}' is too large", e.span)
    return T.ULONG if T.dialect.fits(v, 64, False) else _too_large(e)


def _too_large(e):
    raise SemaError(f"integer constant '{e.text}' is too large", e.span)


def _compatible(a: T.TypeRepr, b: T.TypeRepr) -> bool:
    a, b = a.unqualified(), b.unqualified()
    if isinstance(a, T.FunctionType) and isinstance(b, T.FunctionType):
        if not _compatible(a.ret, b.ret):
            return False
        if not (a.prototyped and b.prototyped):
            return True
        return (
            len(a.params) == len(b.params)
            and a.variadic == b.variadic
            and all(_compatible(x, y) for x, y in zip(a.params, b.params))
        )
    if isinstance(a, T.ArrayType) and isinstance(b, T.ArrayType):
        return _compatible(a.element, b.element) and (
            a.length is None or b.length is None or a.length == b.length
        )
    if isinstance(a, T.PointerType) and isinstance(b, T.PointerType):
        return a.pointee.const == b.pointee.const and _compatible(a.pointee, b.pointee)
    if isinstance(a, T.EnumType) or isinstance(b, T.EnumType):
        return a.is_integer and b.is_integer and a.width == b.width
    return a == b


def _composite(a: T.TypeRepr, b: T.TypeRepr) -> T.TypeRepr:
    if isinstance(a, T.FunctionType) and isinstance(b, T.FunctionType):
        if not a.prototyped:
            return b
        if b.prototyped and any(b.param_names) and not any(a.param_names):
            return b
        return a
    if isinstance(a, T.ArrayType) and isinstance(b, T.ArrayType) and a.length is None:
        return b
    return a


def resolve_and_type(unit_ast: ast.TranslationUnit, profile: LibcProfile = DEFAULT_PROFILE) -> TypedUnit:
    """Resolve every identifier and type every expression of ``unit_ast``."""
    return Resolver(unit_ast, profile).run()
