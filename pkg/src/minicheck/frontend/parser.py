"""Recursive-descent parser for MiniC.

The parser tracks typedef names per scope (the usual C "lexer hack") and
assigns pre-order ``stmt_id`` values.  It stops at the first error.
"""

from __future__ import annotations

from . import ast
from .lexer import decode_escapes, parse_int
from .tokens import FrontendError, SourceSpan, Token, UnsupportedConstruct

TYPE_KEYWORDS = frozenset(
    "void char short int long float double signed unsigned _Bool".split()
)
STORAGE = frozenset("typedef extern static auto register".split())
QUALIFIERS = frozenset("const volatile restrict".split())
ASSIGN_OPS = frozenset("= *= /= %= += -= <<= >>= &= ^= |=".split())

BINARY_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "<": 7, ">": 7, "<=": 7, ">=": 7,
    "<<": 8, ">>": 8, "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}

_OUTSIDE = "outside MiniC subset"


class Parser:
    def __init__(self, tokens: list[Token], typedef_names=()):
        self.toks = tokens
        self.i = 0
        # Each scope maps an identifier to True when it names a typedef.
        self.scopes: list[dict[str, bool]] = [{n: True for n in typedef_names}]
        self.next_id = 0

    # -- token helpers ------------------------------------------------------

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok is not None and tok.text == text and tok.kind in ("punctuator", "keyword")

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.i += 1
        return tok

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.take()
        return None

    def expect(self, text: str, what: str | None = None) -> Token:
        if self.at(text):
            return self.take()
        raise self.error(f"expected {what or repr(text)}")

    def here(self) -> SourceSpan:
        tok = self.peek()
        if tok is not None:
            return tok.span
        if self.toks:
            last = self.toks[-1].span
            return SourceSpan(last.file_id, last.line, last.column + last.length)
        return SourceSpan("<input>", 1, 1)

    def error(self, message: str) -> FrontendError:
        tok = self.peek()
        found = f" at '{tok.text}'" if tok is not None else " at end of input"
        return FrontendError(message + found, self.here())

    def unsupported(self, what: str, tok: Token | None = None) -> UnsupportedConstruct:
        span = tok.span if tok is not None else self.here()
        return UnsupportedConstruct(f"{what}: {_OUTSIDE}", span)

    @staticmethod
    def mk(cls, tok: Token, **kw):
        return cls(span=tok.span, origin=tok.origin, **kw)

    def new_stmt_id(self) -> int:
        sid = self.next_id
        self.next_id += 1
        return sid

    # -- scopes -------------------------------------------------------------

    def push(self):
        self.scopes.append({})

    def pop(self):
        self.scopes.pop()

    def declare(self, name: str, is_typedef: bool):
        self.scopes[-1][name] = is_typedef

    def is_typedef(self, name: str) -> bool:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return False

    def starts_declaration(self, k: int = 0) -> bool:
        tok = self.peek(k)
        if tok is None:
            return False
        if tok.kind == "keyword":
            return (
                tok.text in TYPE_KEYWORDS
                or tok.text in STORAGE
                or tok.text in QUALIFIERS
                or tok.text in ("struct", "union", "enum", "inline")
            )
        if tok.kind == "identifier":
            if tok.text in ("_Complex", "_Imaginary"):
                return True
            nxt = self.peek(k + 1)
            return self.is_typedef(tok.text) and not (nxt is not None and nxt.is_punct(":"))
        return False

    # -- translation unit ---------------------------------------------------

    def translation_unit(self) -> ast.TranslationUnit:
        first = self.peek()
        span = first.span if first is not None else SourceSpan("<input>", 1, 1)
        items = []
        while self.peek() is not None:
            if self.accept(";"):
                continue
            items.append(self.external_declaration())
        return ast.TranslationUnit(span=span, items=items, statement_count=self.next_id)

    def external_declaration(self):
        start = self.peek()
        spec = self.decl_specifiers()
        if self.at(";"):
            self.take()
            return self.mk(ast.Declaration, start, spec=spec, declarators=[])
        name_tok, name, derivs = self.declarator("named")
        if derivs and isinstance(derivs[0], ast.FunctionDerivation) and self.at("{"):
            if spec.storage == "typedef":
                raise self.error("function definition declared 'typedef'")
            self.declare(name, False)
            self.push()
            for p in derivs[0].params:
                if p.name is None:
                    raise FrontendError("parameter name omitted", p.span)
                self.declare(p.name, False)
            body = self.compound()
            self.pop()
            end = self.toks[self.i - 1].span
            return ast.FunctionDef(
                span=name_tok.span, origin=name_tok.origin, spec=spec, name=name,
                derivations=derivs, body=body, end_span=end,
            )
        return self.finish_declaration(start, spec, name_tok, name, derivs)

    def finish_declaration(self, start, spec, name_tok, name, derivs) -> ast.Declaration:
        declarators = []
        while True:
            self.declare(name, spec.storage == "typedef")
            init = None
            if self.accept("="):
                init = self.initializer()
            declarators.append(
                ast.InitDeclarator(
                    span=name_tok.span, origin=name_tok.origin, name=name,
                    derivations=derivs, init=init,
                )
            )
            if not self.accept(","):
                break
            name_tok, name, derivs = self.declarator("named")
        self.expect(";", "';' after declaration")
        return self.mk(ast.Declaration, start, spec=spec, declarators=declarators)

    def declaration(self) -> ast.Declaration:
        start = self.peek()
        spec = self.decl_specifiers()
        if self.at(";"):
            self.take()
            return self.mk(ast.Declaration, start, spec=spec, declarators=[])
        name_tok, name, derivs = self.declarator("named")
        return self.finish_declaration(start, spec, name_tok, name, derivs)

    # -- specifiers ---------------------------------------------------------

    def decl_specifiers(self, allow_storage: bool = True) -> ast.DeclSpec:
        start = self.peek()
        if start is None:
            raise self.error("expected declaration specifiers")
        storage = None
        quals = set()
        base: list[str] = []
        typedef_name = record = enum = None
        inline = False
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.kind == "identifier" and tok.text in ("_Complex", "_Imaginary"):
                raise self.unsupported(f"'{tok.text}' type", tok)
            if tok.kind == "keyword":
                if tok.text in STORAGE:
                    if not allow_storage:
                        raise self.error("storage class not allowed here")
                    if storage is not None:
                        raise self.error("multiple storage classes in declaration")
                    storage = self.take().text
                    continue
                if tok.text in QUALIFIERS:
                    quals.add(self.take().text)
                    continue
                if tok.text == "inline":
                    self.take()
                    inline = True
                    continue
                if tok.text in TYPE_KEYWORDS:
                    if typedef_name or record or enum:
                        raise self.error("conflicting type specifiers")
                    base.append(self.take().text)
                    continue
                if tok.text in ("struct", "union"):
                    if base or typedef_name or record or enum:
                        raise self.error("conflicting type specifiers")
                    record = self.struct_spec()
                    continue
                if tok.text == "enum":
                    if base or typedef_name or record or enum:
                        raise self.error("conflicting type specifiers")
                    enum = self.enum_spec()
                    continue
            if (
                tok.kind == "identifier"
                and not (base or typedef_name or record or enum)
                and self.is_typedef(tok.text)
            ):
                typedef_name = self.take().text
                continue
            break
        if not (base or typedef_name or record or enum):
            raise self.error("expected declaration specifiers")
        return ast.DeclSpec(
            span=start.span, origin=start.origin, storage=storage,
            qualifiers=frozenset(quals), base=tuple(base), typedef_name=typedef_name,
            record=record, enum=enum, inline=inline,
        )

    def struct_spec(self) -> ast.StructSpec:
        kw = self.take()
        tag = None
        if self.peek() is not None and self.peek().kind == "identifier":
            tag = self.take().text
        members = None
        if self.accept("{"):
            members = []
            while not self.accept("}"):
                mstart = self.peek()
                spec = self.decl_specifiers(allow_storage=False)
                decls = []
                if not self.at(";"):
                    while True:
                        if self.at(":"):
                            raise self.unsupported("bit-field")
                        name_tok, name, derivs = self.declarator("named")
                        if self.at(":"):
                            raise self.unsupported("bit-field")
                        decls.append(
                            ast.InitDeclarator(
                                span=name_tok.span, origin=name_tok.origin,
                                name=name, derivations=derivs,
                            )
                        )
                        if not self.accept(","):
                            break
                self.expect(";", "';' after member declaration")
                members.append(self.mk(ast.Declaration, mstart, spec=spec, declarators=decls))
        elif tag is None:
            raise self.error(f"expected '{{' or tag after '{kw.text}'")
        return self.mk(ast.StructSpec, kw, kind=kw.text, tag=tag, members=members)

    def enum_spec(self) -> ast.EnumSpec:
        kw = self.take()
        tag = None
        if self.peek() is not None and self.peek().kind == "identifier":
            tag = self.take().text
        enumerators = None
        if self.accept("{"):
            enumerators = []
            while not self.accept("}"):
                tok = self.take()
                if tok.kind != "identifier":
                    self.i -= 1
                    raise self.error("expected enumerator name")
                value = None
                if self.accept("="):
                    value = self.conditional()
                self.declare(tok.text, False)
                enumerators.append(self.mk(ast.Enumerator, tok, name=tok.text, value=value))
                if not self.accept(","):
                    self.expect("}", "',' or '}' in enumerator list")
                    break
        elif tag is None:
            raise self.error("expected '{' or tag after 'enum'")
        return self.mk(ast.EnumSpec, kw, tag=tag, enumerators=enumerators)

    # -- declarators --------------------------------------------------------

    def declarator(self, mode: str):
        """Parse a declarator; ``mode`` is "named", "abstract" or "either".

        Returns ``(name_token, name, derivations)`` where derivations are
        ordered from the identifier outwards.
        """
        ptrs = []
        while self.at("*"):
            self.take()
            quals = set()
            while self.peek() is not None and self.peek().kind == "keyword" and self.peek().text in QUALIFIERS:
                quals.add(self.take().text)
            ptrs.append(ast.PointerDerivation(frozenset(quals)))
        name_tok = None
        name = None
        inner: list = []
        tok = self.peek()
        if tok is not None and tok.kind == "identifier" and mode != "abstract":
            name_tok = self.take()
            name = name_tok.text
        elif tok is not None and tok.is_punct("(") and self._nested_declarator():
            self.take()
            name_tok, name, inner = self.declarator(mode)
            self.expect(")", "')' in declarator")
        suffixes = []
        while True:
            if self.at("["):
                lb = self.take()
                if self.at("*") and self.at("]", 1):
                    raise self.unsupported("variable length array", lb)
                if self.at("static") or (self.peek() is not None and self.peek().text in QUALIFIERS):
                    raise self.unsupported("array parameter qualifiers", lb)
                size = None if self.at("]") else self.assignment()
                self.expect("]", "']'")
                suffixes.append(ast.ArrayDerivation(size))
            elif self.at("("):
                suffixes.append(self.parameter_list())
            else:
                break
        if name is None and mode == "named":
            raise self.error("expected identifier in declarator")
        if name_tok is None:
            name_tok = tok
        return name_tok, name, inner + suffixes + list(reversed(ptrs))

    def _nested_declarator(self) -> bool:
        nxt = self.peek(1)
        if nxt is None:
            return False
        if nxt.is_punct("*") or nxt.is_punct("("):
            return True
        return nxt.kind == "identifier" and not self.is_typedef(nxt.text)

    def parameter_list(self) -> ast.FunctionDerivation:
        self.expect("(")
        if self.accept(")"):
            return ast.FunctionDerivation((), True)
        if self.at("void") and self.at(")", 1):
            self.take()
            self.take()
            return ast.FunctionDerivation((), False)
        params = []
        variadic = False
        self.push()
        while True:
            if self.accept("..."):
                if not params:
                    raise self.error("expected parameter declaration")
                variadic = True
                break
            if not self.starts_declaration():
                tok = self.peek()
                if tok is not None and tok.kind == "identifier":
                    raise self.unsupported("K&R-style parameter list", tok)
                raise self.error("expected parameter declaration")
            start = self.peek()
            spec = self.decl_specifiers()
            name_tok, name, derivs = self.declarator("either")
            if name is not None:
                self.declare(name, False)
            span = name_tok.span if name is not None else start.span
            params.append(ast.ParamDecl(span=span, origin=start.origin, spec=spec, name=name, derivations=derivs))
            if not self.accept(","):
                break
        self.pop()
        self.expect(")", "')' after parameters")
        return ast.FunctionDerivation(tuple(params), variadic)

    def type_name(self) -> ast.TypeName:
        start = self.peek()
        spec = self.decl_specifiers(allow_storage=False)
        _, name, derivs = self.declarator("abstract")
        return self.mk(ast.TypeName, start, spec=spec, derivations=derivs)

    def initializer(self) -> ast.Expr:
        if self.at("{"):
            lb = self.take()
            items = []
            while not self.accept("}"):
                if self.at(".") or self.at("["):
                    raise self.unsupported("designated initializer")
                items.append(self.initializer())
                if not self.accept(","):
                    self.expect("}", "',' or '}' in initializer list")
                    break
            return self.mk(ast.InitList, lb, items=items)
        return self.assignment()

    # -- statements ---------------------------------------------------------

    def compound(self) -> ast.Compound:
        lb = self.expect("{", "'{'")
        sid = self.new_stmt_id()
        self.push()
        items = []
        while not self.at("}"):
            if self.peek() is None:
                raise self.error("expected '}'")
            items.append(self.block_item())
        rb = self.take()
        self.pop()
        return ast.Compound(span=lb.span, origin=lb.origin, stmt_id=sid, items=items, end_span=rb.span)

    def block_item(self) -> ast.Stmt:
        if self.starts_declaration():
            tok = self.peek()
            sid = self.new_stmt_id()
            decl = self.declaration()
            return ast.DeclStmt(span=tok.span, origin=tok.origin, stmt_id=sid, decl=decl)
        return self.statement()

    def statement(self) -> ast.Stmt:
        tok = self.peek()
        if tok is None:
            raise self.error("expected statement")
        if tok.is_punct("{"):
            return self.compound()
        sid = self.new_stmt_id()
        kw = tok.text if tok.kind == "keyword" else None

        def mk(cls, **kw_):
            return cls(span=tok.span, origin=tok.origin, stmt_id=sid, **kw_)

        if tok.kind == "identifier" and self.at(":", 1):
            self.take()
            self.take()
            return mk(ast.Labeled, label=tok.text, stmt=self.statement())
        if kw == "case":
            self.take()
            value = self.conditional()
            self.expect(":", "':' after case label")
            return mk(ast.Case, value=value, stmt=self.statement())
        if kw == "default":
            self.take()
            self.expect(":", "':' after 'default'")
            return mk(ast.Default, stmt=self.statement())
        if kw == "if":
            self.take()
            self.expect("(", "'(' after 'if'")
            cond = self.expression()
            self.expect(")", "')' after condition")
            then = self.statement()
            otherwise = self.statement() if self.accept("else") else None
            return mk(ast.If, cond=cond, then=then, otherwise=otherwise)
        if kw == "switch":
            self.take()
            self.expect("(", "'(' after 'switch'")
            cond = self.expression()
            self.expect(")", "')' after condition")
            return mk(ast.Switch, cond=cond, body=self.statement())
        if kw == "while":
            self.take()
            self.expect("(", "'(' after 'while'")
            cond = self.expression()
            self.expect(")", "')' after condition")
            return mk(ast.While, cond=cond, body=self.statement())
        if kw == "do":
            self.take()
            body = self.statement()
            self.expect("while", "'while' after do body")
            self.expect("(", "'(' after 'while'")
            cond = self.expression()
            self.expect(")", "')' after condition")
            self.expect(";", "';' after do-while")
            return mk(ast.DoWhile, body=body, cond=cond)
        if kw == "for":
            self.take()
            self.expect("(", "'(' after 'for'")
            self.push()
            if self.accept(";"):
                init = None
            elif self.starts_declaration():
                init = self.declaration()
            else:
                init = self.expression()
                self.expect(";", "';' in for")
            cond = None if self.at(";") else self.expression()
            self.expect(";", "';' in for")
            step = None if self.at(")") else self.expression()
            self.expect(")", "')' in for")
            body = self.statement()
            self.pop()
            return mk(ast.For, init=init, cond=cond, step=step, body=body)
        if kw == "goto":
            self.take()
            label = self.take()
            if label.kind != "identifier":
                self.i -= 1
                raise self.error("expected label after 'goto'")
            self.expect(";", "';' after goto")
            return mk(ast.Goto, label=label.text)
        if kw == "continue":
            self.take()
            self.expect(";", "';' after continue")
            return mk(ast.Continue)
        if kw == "break":
            self.take()
            self.expect(";", "';' after break")
            return mk(ast.Break)
        if kw == "return":
            self.take()
            value = None if self.at(";") else self.expression()
            self.expect(";", "';' after return")
            return mk(ast.Return, value=value)
        if tok.is_punct(";"):
            self.take()
            return mk(ast.ExprStmt, expr=None)
        expr = self.expression()
        self.expect(";", "';' after expression")
        return mk(ast.ExprStmt, expr=expr)

    # -- expressions --------------------------------------------------------

    def expression(self) -> ast.Expr:
        left = self.assignment()
        while self.at(","):
            op = self.take()
            right = self.assignment()
            left = self.mk(ast.Binary, op, op=",", left=left, right=right)
        return left

    def assignment(self) -> ast.Expr:
        left = self.conditional()
        tok = self.peek()
        if tok is not None and tok.kind == "punctuator" and tok.text in ASSIGN_OPS:
            self.take()
            value = self.assignment()
            return self.mk(ast.Assign, tok, op=tok.text, target=left, value=value)
        return left

    def conditional(self) -> ast.Expr:
        cond = self.binary(1)
        if self.at("?"):
            q = self.take()
            then = self.expression()
            self.expect(":", "':' in conditional expression")
            otherwise = self.conditional()
            return self.mk(ast.Conditional, q, cond=cond, then=then, otherwise=otherwise)
        return cond

    def binary(self, min_prec: int) -> ast.Expr:
        left = self.cast()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "punctuator" or tok.text not in BINARY_PREC:
                return left
            prec = BINARY_PREC[tok.text]
            if prec < min_prec:
                return left
            self.take()
            right = self.binary(prec + 1)
            left = self.mk(ast.Binary, tok, op=tok.text, left=left, right=right)

    def _paren_type(self) -> bool:
        return self.at("(") and self.starts_declaration(1)

    def cast(self) -> ast.Expr:
        if self._paren_type():
            lp = self.take()
            tn = self.type_name()
            self.expect(")", "')' after type name")
            if self.at("{"):
                raise self.unsupported("compound literal", lp)
            operand = self.cast()
            return self.mk(ast.Cast, lp, type_name=tn, operand=operand)
        return self.unary()

    def unary(self) -> ast.Expr:
        tok = self.peek()
        if tok is None:
            raise self.error("expected expression")
        if tok.kind == "punctuator" and tok.text in ("++", "--"):
            self.take()
            return self.mk(ast.Unary, tok, op=tok.text, operand=self.unary())
        if tok.kind == "punctuator" and tok.text in ("&", "*", "+", "-", "~", "!"):
            self.take()
            return self.mk(ast.Unary, tok, op=tok.text, operand=self.cast())
        if tok.is_keyword("sizeof"):
            self.take()
            if self._paren_type():
                self.take()
                tn = self.type_name()
                self.expect(")", "')' after type name")
                return self.mk(ast.SizeofType, tok, type_name=tn)
            return self.mk(ast.SizeofExpr, tok, operand=self.unary())
        return self.postfix(self.primary())

    def postfix(self, expr: ast.Expr) -> ast.Expr:
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "punctuator":
                return expr
            if tok.text == "[":
                self.take()
                index = self.expression()
                self.expect("]", "']'")
                expr = self.mk(ast.Index, tok, base=expr, index=index)
            elif tok.text == "(":
                self.take()
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.assignment())
                        if not self.accept(","):
                            break
                self.expect(")", "')' after arguments")
                at = expr if isinstance(expr, ast.Ident) else tok
                expr = ast.Call(span=at.span, origin=at.origin, func=expr, args=args)
            elif tok.text in (".", "->"):
                self.take()
                name = self.take()
                if name.kind != "identifier":
                    self.i -= 1
                    raise self.error("expected member name")
                expr = self.mk(ast.Member, tok, obj=expr, name=name.text, arrow=tok.text == "->")
            elif tok.text in ("++", "--"):
                self.take()
                expr = self.mk(ast.Postfix, tok, op=tok.text, operand=expr)
            else:
                return expr

    def primary(self) -> ast.Expr:
        tok = self.peek()
        if tok is None:
            raise self.error("expected expression")
        if tok.kind == "identifier":
            if self.is_typedef(tok.text):
                raise self.error("unexpected type name in expression")
            self.take()
            return self.mk(ast.Ident, tok, name=tok.text)
        if tok.kind == "integer-constant":
            self.take()
            value, suffix = parse_int(tok.text)
            return self.mk(ast.IntConst, tok, value=value, text=tok.text, suffix=suffix)
        if tok.kind == "floating-constant":
            self.take()
            text = tok.text.rstrip("fFlL")
            return self.mk(ast.FloatConst, tok, value=float(text), text=tok.text)
        if tok.kind == "character-constant":
            self.take()
            body = tok.text[tok.text.index("'") + 1 : -1]
            try:
                units = decode_escapes(body)
            except ValueError as exc:
                raise FrontendError(str(exc), tok.span) from None
            value = units[0]
            if not tok.text.startswith("L") and value >= 128:
                value -= 256
            return self.mk(ast.CharConst, tok, value=value, text=tok.text)
        if tok.kind == "string-literal":
            self.take()
            data = bytearray()
            text = tok.text
            while True:
                body = text[text.index('"') + 1 : -1]
                try:
                    data.extend(decode_escapes(body))
                except ValueError as exc:
                    raise FrontendError(str(exc), tok.span) from None
                nxt = self.peek()
                if nxt is None or nxt.kind != "string-literal":
                    break
                text = self.take().text
            return self.mk(ast.StringLit, tok, value=bytes(data), text=tok.text)
        if tok.is_punct("("):
            self.take()
            expr = self.expression()
            self.expect(")", "')'")
            return expr
        raise self.error("expected expression")


def parse(tokens: list[Token], typedef_names=()) -> ast.TranslationUnit:
    """Parse a preprocessed token stream into a translation unit."""
    return Parser(tokens, typedef_names).translation_unit()
