"""Random MiniC program generator for oracle cross-checks.

Programs have an entry ``f`` with at most three int parameters and at
most ``MAX_STATEMENTS`` statements.  Loops are mostly counter-driven so
most runs finish well within the fuel budget.
"""

from __future__ import annotations

import random

MAX_PARAMS = 3
MAX_STATEMENTS = 40

_ARITH = ("+", "-", "*", "+", "-", "*", "/", "%")
_CMP = ("<", "<=", ">", ">=", "==", "!=")


class ProgramGenerator:
    def __init__(self, seed: int, max_statements: int = MAX_STATEMENTS):
        self.rng = random.Random(seed)
        self.budget = max_statements
        self.params = [f"p{i}" for i in range(self.rng.randint(0, MAX_PARAMS))]
        self.locals = [f"v{i}" for i in range(self.rng.randint(1, 4))]
        self.loop_depth = 0
        self.counter = 0
        self.use_helper = self.rng.random() < 0.4
        self.statements = 0
        self.visible: list[str] = []

    # -- expressions ---------------------------------------------------------

    def atom(self) -> str:
        r = self.rng.random()
        names = self.params + self.visible
        if r < 0.5 and names:
            return self.rng.choice(names)
        if r < 0.6:
            return self.rng.choice(("K", "E0", "E1", "E2"))
        value = self.rng.randint(-3, 5)
        return f"({value})" if value < 0 else str(value)

    def expr(self, depth: int = 0) -> str:
        r = self.rng.random()
        if depth >= 2 or r < 0.35:
            return self.atom()
        if r < 0.7:
            op = self.rng.choice(_ARITH)
            return f"({self.expr(depth + 1)} {op} {self.expr(depth + 1)})"
        if r < 0.8:
            return self.cond(depth + 1)
        if r < 0.87:
            return f"({self.cond(depth + 1)} ? {self.expr(depth + 1)} : {self.expr(depth + 1)})"
        if r < 0.93 and self.use_helper:
            return f"h({self.expr(depth + 1)})"
        return f"-({self.atom()})"

    def cond(self, depth: int = 0) -> str:
        r = self.rng.random()
        if r < 0.12:
            return self.rng.choice(("0", "1", "K > 3", "K < 3", "E1", "E0", "E2 == 2"))
        if r < 0.75 or depth >= 2:
            return f"({self.expr(depth + 1)} {self.rng.choice(_CMP)} {self.expr(depth + 1)})"
        op = self.rng.choice(("&&", "||"))
        return f"({self.cond(depth + 1)} {op} {self.cond(depth + 1)})"

    # -- statements ----------------------------------------------------------

    def take(self) -> bool:
        if self.statements >= self.budget:
            return False
        self.statements += 1
        return True

    def block(self, indent: str, n: int) -> list[str]:
        out = []
        for _ in range(n):
            if self.statements >= self.budget:
                break
            out.extend(self.stmt(indent))
        return out

    def stmt(self, ind: str) -> list[str]:
        if not self.take():
            return []
        rng = self.rng
        r = rng.random()
        var = rng.choice(self.locals)
        inner = ind + "    "
        if r < 0.3:
            return [f"{ind}{var} = {self.expr()};"]
        if r < 0.4:
            op = rng.choice(("+=", "-=", "*="))
            return [f"{ind}{var} {op} {self.expr()};"]
        if r < 0.45:
            return [f"{ind}{var}{rng.choice(('++', '--'))};"]
        if r < 0.6:
            lines = [f"{ind}if ({self.cond()}) {{"] + self.block(inner, rng.randint(1, 3))
            if rng.random() < 0.5:
                lines += [f"{ind}}} else {{"] + self.block(inner, rng.randint(1, 2))
            return lines + [f"{ind}}}"]
        if r < 0.68 and self.loop_depth < 2:
            c = self.fresh_counter()
            self.loop_depth += 1
            body = self.block(inner, rng.randint(1, 3))
            self.loop_depth -= 1
            return [f"{ind}for (int {c} = 0; {c} < {rng.randint(0, 4)}; {c}++) {{"] + body + [f"{ind}}}"]
        if r < 0.74 and self.loop_depth < 2:
            c = self.fresh_counter()
            self.loop_depth += 1
            body = self.block(inner, rng.randint(1, 3))
            self.loop_depth -= 1
            head = [f"{ind}int {c} = 0;", f"{ind}while ({c} < {rng.randint(0, 3)}) {{", f"{inner}{c}++;"]
            return head + body + [f"{ind}}}"]
        if r < 0.78 and self.loop_depth < 2:
            c = self.fresh_counter()
            self.loop_depth += 1
            body = self.block(inner, rng.randint(1, 2))
            self.loop_depth -= 1
            head = [f"{ind}int {c} = 0;", f"{ind}do {{", f"{inner}{c}++;"]
            return head + body + [f"{ind}}} while ({c} < {rng.randint(1, 3)});"]
        if r < 0.83 and self.loop_depth > 0:
            word = rng.choice(("break", "continue"))
            return [f"{ind}if ({self.cond()}) {{", f"{inner}{word};", f"{ind}}}"]
        if r < 0.87:
            lines = [f"{ind}switch ({self.atom()}) {{"]
            deeper = inner + "    "
            for value in rng.sample(range(-2, 3), rng.randint(1, 3)):
                lines.append(f"{ind}case {value}: {{")
                lines += self.block(deeper, 1)
                if rng.random() < 0.7:
                    lines.append(f"{deeper}break;")
                lines.append(f"{inner}}}")
            if rng.random() < 0.5:
                lines.append(f"{ind}default: {{")
                lines += self.block(deeper, 1)
                lines.append(f"{inner}}}")
            return lines + [f"{ind}}}"]
        if r < 0.92:
            lines = [f"{ind}if ({self.cond()}) {{", f"{inner}return {self.expr()};"]
            lines += self.block(inner, rng.randint(0, 1))
            return lines + [f"{ind}}}"]
        if r < 0.96:
            return [f"{ind}{{"] + self.block(inner, rng.randint(1, 2)) + [f"{ind}}}"]
        return [f"{ind}{var} = {var};"]

    def fresh_counter(self) -> str:
        self.counter += 1
        return f"i{self.counter}"

    def program(self) -> str:
        rng = self.rng
        lines = ["enum { E0, E1, E2 };", ""]
        if self.use_helper:
            lines += ["static int h(int x)", "{", "    return x > 2 ? x - 1 : x + 1;", "}", ""]
        params = ", ".join(f"int {p}" for p in self.params) or "void"
        lines += [f"int f({params})", "{", f"    const int K = {rng.randint(0, 6)};"]
        self.statements = 1
        for v in self.locals:
            self.statements += 1
            if rng.random() < 0.85:
                lines.append(f"    int {v} = {self.expr()};")
            else:
                lines.append(f"    int {v};")
            self.visible.append(v)
        lines += self.block("    ", rng.randint(3, self.budget))
        lines += [f"    return {self.expr()};", "}", ""]
        return "\n".join(lines)


def generate(seed: int, max_statements: int = MAX_STATEMENTS) -> str:
    """Source text of the program for ``seed``.

    The generator budget counts source-level constructs; it is lowered
    until the parsed entry function fits within ``max_statements``.
    """
    from minicheck.sema import load

    budget = max_statements
    while True:
        text = ProgramGenerator(seed, budget).program()
        if statement_count(load(text, f"gen{seed}.c")) <= max_statements or budget <= 4:
            return text
        budget -= 4


def statement_count(unit) -> int:
    """Statements of ``f`` excluding its body block."""
    fn = unit.functions["f"]
    return sum(1 for n in fn.body.walk() if n is not fn.body and type(n).__name__ in _STMT_NAMES)


_STMT_NAMES = {
    "DeclStmt", "ExprStmt", "If", "While", "DoWhile", "For", "Switch", "Return",
    "Break", "Continue", "Compound", "Case", "Default", "Labeled", "Goto",
}
