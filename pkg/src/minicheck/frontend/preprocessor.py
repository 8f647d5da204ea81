"""Macro expansion, conditional inclusion and textual ``#include``.

Every token produced by a macro expansion remembers the chain of macros it
came from (its :class:`MacroOrigin`).  The effectless classifier relies on
this to tell ``x + OFFSET`` apart from ``x + 0``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

from .. import dialect
from .lexer import decode_escapes, lex, parse_int
from .tokens import FrontendError, MacroOrigin, SourceSpan, Token

_CONDITIONALS = {"if", "ifdef", "ifndef", "elif", "else", "endif"}

# Standard macros that would normally come from system headers, which are
# never read.
LIBC_MACROS = {
    "NULL": "((void *)0)",
    "EOF": "(-1)",
    "EDOM": "33",
    "ERANGE": "34",
    "EILSEQ": "84",
    "SEEK_SET": "0",
    "SEEK_CUR": "1",
    "SEEK_END": "2",
    "EXIT_SUCCESS": "0",
    "EXIT_FAILURE": "1",
    "CHAR_BIT": "8",
    "INT_MAX": "2147483647",
    "INT_MIN": "(-2147483647 - 1)",
    "UINT_MAX": "4294967295U",
    "UINT8_MAX": "255",
    "UINT16_MAX": "65535",
    "UINT32_MAX": "4294967295U",
    "INT32_MAX": "2147483647",
    "true": "1",
    "false": "0",
    "__STDC__": "1",
    "__STDC_VERSION__": "199901L",
}


@dataclass
class Macro:
    name: str
    params: list[str] | None
    body: list[Token]
    span: SourceSpan
    variadic: bool = False

    @property
    def function_like(self) -> bool:
        return self.params is not None


@dataclass(frozen=True)
class Include:
    span: SourceSpan
    name: str
    system: bool


@dataclass
class PreprocessResult:
    tokens: list[Token]
    conditionals: list[SourceSpan] = field(default_factory=list)
    includes: list[Include] = field(default_factory=list)
    macros: dict[str, Macro] = field(default_factory=dict)


@dataclass
class _Cond:
    parent_active: bool
    active: bool
    taken: bool
    span: SourceSpan
    seen_else: bool = False


def _split_lines(tokens):
    line = []
    for tok in tokens:
        if tok.bol and line:
            yield line
            line = []
        line.append(tok)
    if line:
        yield line


def _int_token(value: int, at: Token) -> Token:
    return replace(at, kind="integer-constant", text=str(value), hideset=frozenset())


class Preprocessor:
    def __init__(self, defines=None, include_paths=(), predefined=None):
        self.include_paths = list(include_paths)
        self.macros: dict[str, Macro] = {}
        self.result = PreprocessResult([])
        base = LIBC_MACROS if predefined is None else predefined
        for name, text in base.items():
            self._define_text(name, text, "<builtin>")
        for name, text in (defines or {}).items():
            self._define_text(name, "1" if text is None else text, "<command-line>")

    def _define_text(self, name, text, file_id):
        body = [replace(t, bol=False) for t in lex(text, file_id)]
        self.macros[name] = Macro(name, None, body, SourceSpan(file_id, 1, 1, len(name)))

    # -- driver -----------------------------------------------------------

    def run(self, source: str, file_id: str) -> PreprocessResult:
        out = self.result.tokens
        self._process(source, file_id, 0, out)
        self.result.macros = dict(self.macros)
        return self.result

    def _process(self, source, file_id, depth, out):
        tokens = lex(source, file_id)
        stack: list[_Cond] = []
        pending: list[Token] = []

        def active():
            return not stack or stack[-1].active

        for line in _split_lines(tokens):
            if not line[0].is_punct("#"):
                if active():
                    pending.extend(line)
                continue
            if pending:
                out.extend(self.expand(pending))
                pending = []
            self._directive(line, stack, active(), file_id, depth, out)
        if pending:
            out.extend(self.expand(pending))
        if stack:
            raise FrontendError("unterminated conditional directive", stack[-1].span)

    def _directive(self, line, stack, is_active, file_id, depth, out):
        hash_tok = line[0]
        if len(line) == 1:
            return
        name_tok = line[1]
        name = name_tok.text
        args = line[2:]
        if name in _CONDITIONALS:
            self.result.conditionals.append(hash_tok.span)
            self._conditional(name, name_tok, args, stack)
            return
        if not is_active:
            return
        if name == "define":
            self._define(name_tok, args)
        elif name == "undef":
            if not args or args[0].kind not in ("identifier", "keyword"):
                raise FrontendError("macro name missing in #undef", name_tok.span)
            self.macros.pop(args[0].text, None)
        elif name == "include":
            self._include(name_tok, args, file_id, depth, out)
        elif name == "error":
            msg = " ".join(t.text for t in args)
            raise FrontendError(f"#error {msg}".rstrip(), name_tok.span)
        elif name == "pragma":
            pass
        else:
            raise FrontendError(f"unknown directive '#{name}'", name_tok.span)

    def _conditional(self, name, name_tok, args, stack):
        if name in ("if", "ifdef", "ifndef"):
            parent = not stack or stack[-1].active
            value = False
            if parent:
                if name == "if":
                    value = self._eval_if(args, name_tok)
                else:
                    if not args or args[0].kind not in ("identifier", "keyword"):
                        raise FrontendError(f"macro name missing in #{name}", name_tok.span)
                    value = (args[0].text in self.macros) == (name == "ifdef")
            stack.append(_Cond(parent, parent and value, parent and value, name_tok.span))
            return
        if not stack:
            raise FrontendError(f"#{name} without #if", name_tok.span)
        top = stack[-1]
        if name == "elif":
            if top.seen_else:
                raise FrontendError("#elif after #else", name_tok.span)
            if top.parent_active and not top.taken:
                top.active = self._eval_if(args, name_tok)
                top.taken = top.active
            else:
                top.active = False
        elif name == "else":
            if top.seen_else:
                raise FrontendError("#else after #else", name_tok.span)
            top.seen_else = True
            top.active = top.parent_active and not top.taken
            top.taken = True
        else:
            stack.pop()

    def _define(self, name_tok, args):
        if not args or args[0].kind not in ("identifier", "keyword"):
            raise FrontendError("macro name missing in #define", name_tok.span)
        mname = args[0]
        rest = args[1:]
        params = None
        variadic = False
        if rest and rest[0].is_punct("(") and not rest[0].space:
            params = []
            i = 1
            while True:
                if i >= len(rest):
                    raise FrontendError("unterminated macro parameter list", mname.span)
                tok = rest[i]
                if tok.is_punct(")") and not params:
                    i += 1
                    break
                if tok.is_punct("..."):
                    variadic = True
                    params.append("__VA_ARGS__")
                elif tok.kind == "identifier":
                    params.append(tok.text)
                else:
                    raise FrontendError("expected macro parameter name", tok.span)
                i += 1
                if i < len(rest) and rest[i].is_punct(","):
                    i += 1
                    continue
                if i < len(rest) and rest[i].is_punct(")"):
                    i += 1
                    break
                raise FrontendError("expected ',' or ')' in macro parameter list", tok.span)
            rest = rest[i:]
        body = [replace(t, bol=False) for t in rest]
        if body:
            body[0] = replace(body[0], space=False)
        self.macros[mname.text] = Macro(mname.text, params, body, mname.span, variadic)

    def _include(self, name_tok, args, file_id, depth, out):
        if not args:
            raise FrontendError("malformed #include", name_tok.span)
        first = args[0]
        if first.is_punct("<"):
            parts = []
            for tok in args[1:]:
                if tok.is_punct(">"):
                    break
                parts.append(tok.text)
            else:
                raise FrontendError("malformed #include", name_tok.span)
            self.result.includes.append(Include(name_tok.span, "".join(parts), True))
            return
        if first.kind != "string-literal":
            raise FrontendError("malformed #include", name_tok.span)
        fname = first.text[1:-1]
        self.result.includes.append(Include(name_tok.span, fname, False))
        if depth + 1 > dialect.MAX_INCLUDE_DEPTH:
            raise FrontendError("include depth exceeded", name_tok.span)
        candidates = []
        if os.path.dirname(file_id) or os.path.exists(file_id):
            candidates.append(os.path.join(os.path.dirname(file_id), fname))
        candidates += [os.path.join(d, fname) for d in self.include_paths]
        for path in candidates:
            if os.path.isfile(path):
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
                self._process(text, os.path.normpath(path), depth + 1, out)
                return
        raise FrontendError(f"cannot find include file '{fname}'", first.span)

    # -- expansion --------------------------------------------------------

    def expand(self, tokens: list[Token]) -> list[Token]:
        out: list[Token] = []
        stack = list(reversed(tokens))
        while stack:
            tok = stack.pop()
            if tok.kind not in ("identifier", "keyword") or tok.text in tok.hideset:
                out.append(tok)
                continue
            if tok.text == "__LINE__":
                out.append(_int_token(tok.span.line, tok))
                continue
            if tok.text == "__FILE__":
                out.append(replace(tok, kind="string-literal", text=f'"{tok.span.file_id}"'))
                continue
            macro = self.macros.get(tok.text)
            if macro is None:
                out.append(tok)
                continue
            if len(tok.origin.chain) >= dialect.MAX_MACRO_DEPTH:
                raise FrontendError("macro expansion depth exceeded", tok.span)
            if not macro.function_like:
                stack.extend(reversed(self._substitute(macro, tok, {})))
                continue
            if not stack or not stack[-1].is_punct("("):
                out.append(tok)
                continue
            stack.pop()
            args = self._collect_args(macro, tok, stack)
            stack.extend(reversed(self._substitute(macro, tok, args)))
        return out

    def _collect_args(self, macro, tok, stack):
        args: list[list[Token]] = [[]]
        level = 0
        nparams = len(macro.params)
        while True:
            if not stack:
                raise FrontendError(f"unterminated invocation of macro '{macro.name}'", tok.span)
            t = stack.pop()
            if t.is_punct("("):
                level += 1
            elif t.is_punct(")"):
                if level == 0:
                    break
                level -= 1
            elif t.is_punct(",") and level == 0 and not (macro.variadic and len(args) == nparams):
                args.append([])
                continue
            args[-1].append(t)
        if nparams == 0 and args == [[]]:
            args = []
        if len(args) != nparams:
            if macro.variadic and len(args) == nparams - 1:
                args.append([])
            else:
                raise FrontendError(
                    f"macro '{macro.name}' expects {nparams} arguments, got {len(args)}", tok.span
                )
        return dict(zip(macro.params, args))

    def _substitute(self, macro, tok, args):
        origin = tok.origin.extend(macro.name, macro.span)
        hs = tok.hideset | {macro.name}
        body = macro.body
        expanded_cache = {}

        def from_body(t):
            return replace(t, span=tok.span, origin=origin, hideset=t.hideset | hs, bol=False)

        def arg_tokens(name, raw):
            if raw:
                return [replace(t, hideset=t.hideset | hs, bol=False) for t in args[name]]
            if name not in expanded_cache:
                expanded_cache[name] = self.expand(args[name])
            return [replace(t, hideset=t.hideset | hs, bol=False) for t in expanded_cache[name]]

        result: list[Token] = []
        i = 0
        while i < len(body):
            t = body[i]
            if t.is_punct("#") and macro.function_like and i + 1 < len(body) and body[i + 1].text in args:
                result.append(self._stringify(args[body[i + 1].text], from_body(t)))
                i += 2
                continue
            if t.is_punct("##") and result and i + 1 < len(body):
                rhs_tok = body[i + 1]
                if rhs_tok.text in args:
                    rhs = arg_tokens(rhs_tok.text, raw=True)
                else:
                    rhs = [from_body(rhs_tok)]
                lhs = result.pop()
                if lhs is None:
                    result.extend(rhs)
                elif not rhs:
                    result.append(lhs)
                else:
                    result.append(self._paste(lhs, rhs[0]))
                    result.extend(rhs[1:])
                i += 2
                continue
            if t.kind == "identifier" and t.text in args:
                pasted = i + 1 < len(body) and body[i + 1].is_punct("##")
                toks = arg_tokens(t.text, raw=pasted)
                if toks:
                    toks[0] = replace(toks[0], space=t.space)
                    result.extend(toks)
                elif pasted:
                    result.append(None)
                i += 1
                continue
            result.append(from_body(t))
            i += 1
        result = [t for t in result if t is not None]
        if result:
            result[0] = replace(result[0], space=tok.space)
        return result

    def _stringify(self, raw, at):
        parts = []
        for j, t in enumerate(raw):
            text = t.text
            if t.kind in ("string-literal", "character-constant"):
                text = text.replace("\\", "\\\\").replace('"', '\\"')
            if j and t.space:
                parts.append(" ")
            parts.append(text)
        return replace(at, kind="string-literal", text='"' + "".join(parts) + '"')

    def _paste(self, lhs, rhs):
        text = lhs.text + rhs.text
        try:
            toks = lex(text, lhs.span.file_id)
        except FrontendError:
            toks = []
        if len(toks) != 1:
            raise FrontendError(f"pasting '{lhs.text}' and '{rhs.text}' does not give a valid token", lhs.span)
        return replace(lhs, kind=toks[0].kind, text=text)

    # -- #if evaluation ---------------------------------------------------

    def _eval_if(self, args, at):
        toks = []
        i = 0
        while i < len(args):
            t = args[i]
            if t.text == "defined":
                j = i + 1
                paren = j < len(args) and args[j].is_punct("(")
                if paren:
                    j += 1
                if j >= len(args) or args[j].kind not in ("identifier", "keyword"):
                    raise FrontendError("operator 'defined' requires an identifier", t.span)
                toks.append(_int_token(int(args[j].text in self.macros), t))
                j += 1
                if paren:
                    if j >= len(args) or not args[j].is_punct(")"):
                        raise FrontendError("missing ')' after 'defined'", t.span)
                    j += 1
                i = j
                continue
            toks.append(t)
            i += 1
        toks = self.expand(toks)
        if not toks:
            raise FrontendError("#if with no expression", at.span)
        return _IfEvaluator(toks, at).evaluate() != 0


class _IfEvaluator:
    """Precedence-climbing evaluator for ``#if`` expressions (intmax_t)."""

    BINARY = {
        "*": 10, "/": 10, "%": 10, "+": 9, "-": 9, "<<": 8, ">>": 8,
        "<": 7, ">": 7, "<=": 7, ">=": 7, "==": 6, "!=": 6,
        "&": 5, "^": 4, "|": 3, "&&": 2, "||": 1,
    }

    def __init__(self, tokens, at):
        self.toks = tokens
        self.i = 0
        self.at = at

    def error(self, msg, tok=None):
        return FrontendError(f"malformed constant expression: {msg}", (tok or self.at).span)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of expression")
        self.i += 1
        return tok

    def evaluate(self):
        value = self.conditional()
        if self.peek() is not None:
            raise self.error(f"unexpected token '{self.peek().text}'", self.peek())
        return value

    def conditional(self):
        cond = self.binary(1)
        tok = self.peek()
        if tok is not None and tok.is_punct("?"):
            self.take()
            a = self.conditional()
            if not self.take().is_punct(":"):
                raise self.error("expected ':'")
            b = self.conditional()
            return a if cond else b
        return cond

    def binary(self, min_prec):
        lhs = self.unary()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "punctuator" or tok.text not in self.BINARY:
                return lhs
            prec = self.BINARY[tok.text]
            if prec < min_prec:
                return lhs
            self.take()
            rhs = self.binary(prec + 1)
            lhs = self.apply(tok, lhs, rhs)

    def apply(self, tok, a, b):
        op = tok.text
        if op in ("/", "%") and b == 0:
            raise self.error("division by zero", tok)
        if op == "/":
            r = abs(a) // abs(b) * (1 if (a >= 0) == (b >= 0) else -1)
        elif op == "%":
            r = a - b * (abs(a) // abs(b) * (1 if (a >= 0) == (b >= 0) else -1))
        elif op in ("<<", ">>"):
            if b < 0 or b >= 64:
                raise self.error("shift count out of range", tok)
            r = a << b if op == "<<" else a >> b
        elif op == "&&":
            r = int(bool(a) and bool(b))
        elif op == "||":
            r = int(bool(a) or bool(b))
        else:
            r = {
                "*": lambda: a * b, "+": lambda: a + b, "-": lambda: a - b,
                "<": lambda: int(a < b), ">": lambda: int(a > b),
                "<=": lambda: int(a <= b), ">=": lambda: int(a >= b),
                "==": lambda: int(a == b), "!=": lambda: int(a != b),
                "&": lambda: a & b, "^": lambda: a ^ b, "|": lambda: a | b,
            }[op]()
        if not dialect.fits(r, 64, True):
            raise self.error("integer overflow", tok)
        return r

    def unary(self):
        tok = self.take()
        if tok.kind == "punctuator":
            if tok.text == "(":
                v = self.conditional()
                if not self.take().is_punct(")"):
                    raise self.error("expected ')'", tok)
                return v
            if tok.text == "-":
                return -self.unary()
            if tok.text == "+":
                return self.unary()
            if tok.text == "!":
                return int(not self.unary())
            if tok.text == "~":
                return ~self.unary()
            raise self.error(f"unexpected '{tok.text}'", tok)
        if tok.kind == "integer-constant":
            return parse_int(tok.text)[0]
        if tok.kind == "character-constant":
            body = tok.text[tok.text.index("'") + 1 : -1]
            return dialect.wrap(decode_escapes(body)[0], 8, True)
        if tok.kind in ("identifier", "keyword"):
            return 0
        raise self.error(f"unexpected '{tok.text}'", tok)


def preprocess(
    source: str,
    defines: dict[str, str | None] | None = None,
    include_paths=(),
    file_id: str = "<input>",
    predefined: dict[str, str] | None = None,
) -> PreprocessResult:
    """Run the preprocessor over ``source``.

    ``defines`` maps macro names to replacement text (``None`` means ``1``),
    mirroring ``-D NAME[=VALUE]``.  System includes (``<...>``) are recorded
    and otherwise ignored.
    """
    pp = Preprocessor(defines, include_paths, predefined)
    return pp.run(source, file_id)
