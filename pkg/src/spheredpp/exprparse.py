"""Small recursive-descent parser for integrand expressions in x, y, z.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | primary
    primary := NUMBER | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

The result is compiled to a closure over numpy arrays.
"""

import re

import numpy as np

from .estimators import Integrand


class ExprSyntaxError(ValueError):
    def __init__(self, msg, char_offset, text):
        offset = len(text[:char_offset].encode("utf-8"))
        super().__init__(f"{msg} at offset {offset}: {text!r}")
        self.offset = offset
        self.text = text


FUNCS = {
    "abs": (1, np.abs),
    "sqrt": (1, np.sqrt),
    "pow": (2, np.power),
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "exp": (1, np.exp),
    "log": (1, np.log),
    "step": (1, lambda t: (t >= 0).astype(float)),
}
VARS = ("x", "y", "z")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/(),]))"
)


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            off = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[off]!r}", off, text)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(msg, tok[2], self.text)

    def expect(self, op):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != op:
            self.fail(f"expected {op!r}")
        return self.advance()

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected trailing input")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            rhs = self.term()
            node = _binary(op, node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            rhs = self.unary()
            node = _binary(op, node, rhs)
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.advance()
            inner = self.unary()
            if tok[1] == "-":
                return lambda x, y, z: -inner(x, y, z)
            return inner
        return self.primary()

    def primary(self):
        tok = self.peek()
        kind, val, _ = tok
        if kind == "num":
            self.advance()
            c = np.float64(val)
            return lambda x, y, z: c
        if kind == "name":
            self.advance()
            if val in VARS:
                idx = VARS.index(val)
                return lambda x, y, z: (x, y, z)[idx]
            if val not in FUNCS:
                self.fail(f"unknown name {val!r}", tok)
            arity, fn = FUNCS[val]
            self.expect("(")
            args = [self.expr()]
            while self.peek()[0] == "op" and self.peek()[1] == ",":
                self.advance()
                args.append(self.expr())
            if len(args) != arity:
                self.fail(f"{val} takes {arity} argument(s), got {len(args)}", tok)
            self.expect(")")
            if arity == 1:
                (a,) = args
                return lambda x, y, z: fn(np.asarray(a(x, y, z), dtype=float))
            a, b = args
            return lambda x, y, z: fn(np.asarray(a(x, y, z), dtype=float), b(x, y, z))
        if kind == "op" and val == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            self.fail("unexpected end of expression")
        self.fail(f"unexpected token {val!r}")


def _binary(op, lhs, rhs):
    if op == "+":
        return lambda x, y, z: lhs(x, y, z) + rhs(x, y, z)
    if op == "-":
        return lambda x, y, z: lhs(x, y, z) - rhs(x, y, z)
    if op == "*":
        return lambda x, y, z: lhs(x, y, z) * rhs(x, y, z)
    return lambda x, y, z: lhs(x, y, z) / rhs(x, y, z)


def parse_integrand(text, name=None):
    """Compile an expression string into an :class:`Integrand`."""
    func = _Parser(text).parse()
    return Integrand(name or f"expr:{text}", func)
