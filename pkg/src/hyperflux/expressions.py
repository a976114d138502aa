"""Tiny arithmetic expression language for config-defined surfaces and currents.

Grammar (documented in the README):

    expr   := term  (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := ("+" | "-") factor | power
    power  := atom ("^" factor)?          right-associative
    atom   := NUMBER | NAME "(" expr ")" | NAME | "(" expr ")"

Functions: sin, cos, sqrt, exp, abs, tanh.  Constants: pi, e.  All other
names must be declared variables; evaluation is vectorized over numpy
arrays bound to them.
"""

import re

import numpy as np

from .errors import ConfigError

_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "sqrt": np.sqrt,
    "exp": np.exp,
    "abs": np.abs,
    "tanh": np.tanh,
}
_CONSTANTS = {"pi": np.pi, "e": np.e}

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?|([A-Za-z_]\w*)|(.))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        number, name, sym = m.groups()
        if number is not None:
            tokens.append(("num", float(m.group(0))))
        elif name is not None:
            tokens.append(("name", name))
        elif sym.strip():
            if sym not in "+-*/^(),":
                raise ConfigError(f"unexpected character {sym!r} in expression")
            tokens.append(("sym", sym))
        pos = m.end()
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.pos = 0
        self.variables = set(variables)

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ConfigError(f"expected {kind}, found {tok[1]!r}")
        if value is not None and tok[1] != value:
            raise ConfigError(f"expected {value!r}, found {tok[1]!r}")
        self.pos += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise ConfigError(f"trailing input after expression: {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("sym", "+") or self.peek() == ("sym", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek() == ("sym", "*") or self.peek() == ("sym", "/"):
            op = self.take()[1]
            rhs = self.factor()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def factor(self):
        if self.peek() == ("sym", "-"):
            self.take()
            return ("neg", self.factor())
        if self.peek() == ("sym", "+"):
            self.take()
            return self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("sym", "^"):
            self.take()
            return ("pow", base, self.factor())
        return base

    def atom(self):
        kind, value = self.peek()
        if kind == "num":
            self.take()
            return ("num", value)
        if kind == "name":
            self.take()
            if self.peek() == ("sym", "("):
                self.take()
                arg = self.expr()
                self.take("sym", ")")
                if value not in _FUNCTIONS:
                    raise ConfigError(f"unknown function {value!r}")
                return ("call", value, arg)
            if value in _CONSTANTS:
                return ("num", _CONSTANTS[value])
            if value not in self.variables:
                raise ConfigError(f"unknown name {value!r} in expression")
            return ("var", value)
        if (kind, value) == ("sym", "("):
            self.take()
            node = self.expr()
            self.take("sym", ")")
            return node
        raise ConfigError(f"unexpected token {value!r} in expression")


def _evaluate(node, env):
    op = node[0]
    if op == "num":
        return node[1]
    if op == "var":
        return env[node[1]]
    if op == "neg":
        return -_evaluate(node[1], env)
    if op == "call":
        return _FUNCTIONS[node[1]](_evaluate(node[2], env))
    a = _evaluate(node[1], env)
    b = _evaluate(node[2], env)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        return a ** b
    raise ConfigError(f"malformed expression node {op!r}")


def compile_expression(text: str, variables):
    """Compile an expression into fn(env) with env mapping names to arrays."""
    node = _Parser(_tokenize(str(text)), variables).parse()

    def fn(env):
        return _evaluate(node, env)

    return fn


def compile_point_function(texts, coord_names):
    """Compile component expressions into fn(points) -> (..., n_components).

    coord_names bind the trailing axis of the input points, e.g.
    ("t", "x", "y") for a 3d chart.
    """
    fns = [compile_expression(t, coord_names) for t in texts]

    def fn(points):
        points = np.asarray(points, dtype=float)
        env = {name: points[..., i] for i, name in enumerate(coord_names)}
        cols = [np.broadcast_to(np.asarray(f(env), dtype=float), points.shape[:-1])
                for f in fns]
        return np.stack(cols, axis=-1)

    return fn


def compile_scalar_function(text: str, coord_names):
    """Compile one expression into fn(points) -> (...,)."""
    f = compile_expression(text, coord_names)

    def fn(points):
        points = np.asarray(points, dtype=float)
        env = {name: points[..., i] for i, name in enumerate(coord_names)}
        return np.broadcast_to(np.asarray(f(env), dtype=float), points.shape[:-1]).copy()

    return fn


COORD_NAMES = {3: ("t", "x", "y"), 4: ("t", "x", "y", "z")}
PARAM_NAMES = ("u", "v", "w")
