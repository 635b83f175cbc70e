"""Expression parsing and exact first derivatives for small vector functions.

Grammar (whitespace insignificant, `^` is exponentiation):

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?          # right-associative
    atom   := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")"

NUMBER is a decimal literal with optional fraction and exponent. NAME is a
declared variable or one of sin, cos, exp, ln, sqrt, abs. Variable names
start with a letter.

Parsed functions are immutable; evaluation builds a fresh environment per
call, so an ExprFunction may be shared freely across threads. Components
are compiled to Python code objects once at construction. Derivatives come
from a forward pass over dual numbers (one seeded pass per variable) and
are exact to roundoff.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from . import dual
from .dual import Dual, DomainViolation
from .errors import (
    DimensionMismatch,
    DomainError,
    ExprSyntaxError,
    UnknownIdentifier,
)
from .linalg import Matrix, Vector

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt", "abs")

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_NUM_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


# ---------------------------------------------------------------------------
# Syntax trees


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Call]


def const(value: float) -> Node:
    """Canonical constant node; negatives become Neg(Const) so that every
    tree prints to text the parser maps back to the identical tree."""
    v = float(value)
    if v < 0.0 or (v == 0.0 and math.copysign(1.0, v) < 0.0):
        return Neg(Const(-v))
    return Const(v)


def linear_combination(offset: float, terms: Sequence[tuple[float, Node]]) -> Node:
    """offset + sum(coef * node) as a tree, keeping every term."""
    out: Node = const(offset)
    for coef, node in terms:
        out = BinOp("+", out, BinOp("*", const(coef), node))
    return out


def substitute(node: Node, mapping: Mapping[str, Node]) -> Node:
    if isinstance(node, Const):
        return node
    if isinstance(node, Var):
        return mapping.get(node.name, node)
    if isinstance(node, Neg):
        return Neg(substitute(node.operand, mapping))
    if isinstance(node, BinOp):
        return BinOp(node.op, substitute(node.left, mapping), substitute(node.right, mapping))
    return Call(node.fn, substitute(node.arg, mapping))


# ---------------------------------------------------------------------------
# Printing. Precedence: Add/Sub 1, Mul/Div 2, Neg 2.5, Pow 3, atoms 4.
# The rules below guarantee parse(format_node(t)) reproduces t exactly.

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


def _prec(node: Node) -> float:
    if isinstance(node, (Const, Var, Call)):
        return 4
    if isinstance(node, Neg):
        return 2.5
    return _PREC[node.op]


def format_node(node: Node) -> str:
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = format_node(node.operand)
        if _prec(node.operand) <= 2:  # -(a + b), -(a * b)
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Call):
        return f"{node.fn}({format_node(node.arg)})"
    op, left, right = node.op, node.left, node.right
    ls = format_node(left)
    rs = format_node(right)
    if op in "+-":
        if _prec(left) < 1:
            ls = f"({ls})"
        if _prec(right) <= 1:  # keep left associativity on reparse
            rs = f"({rs})"
        return f"{ls} {op} {rs}"
    if op in "*/":
        if _prec(left) < 2:
            ls = f"({ls})"
        if _prec(right) <= 2:
            rs = f"({rs})"
        return f"{ls} {op} {rs}"
    # power: base must be an atom, exponent a unary
    if _prec(left) < 4:
        ls = f"({ls})"
    if _prec(right) < 2.5:
        rs = f"({rs})"
    return f"{ls}^{rs}"


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.pos = 0
        self.variables = set(variables)

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else "\0"

    def parse(self) -> Node:
        node = self._expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise ExprSyntaxError(
                f"unexpected trailing input '{self.text[self.pos:]}'", self.pos
            )
        return node

    def _expr(self) -> Node:
        node = self._term()
        while self._peek() in "+-":
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self._term())
        return node

    def _term(self) -> Node:
        node = self._unary()
        while self._peek() in "*/":
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self._unary())
        return node

    def _unary(self) -> Node:
        if self._peek() == "-":
            self.pos += 1
            return Neg(self._unary())
        return self._power()

    def _power(self) -> Node:
        base = self._atom()
        if self._peek() == "^":
            self.pos += 1
            return BinOp("^", base, self._unary())
        return base

    def _atom(self) -> Node:
        ch = self._peek()
        if ch == "\0":
            raise ExprSyntaxError("unexpected end of expression", self.pos)
        if ch == "(":
            self.pos += 1
            node = self._expr()
            if self._peek() != ")":
                raise ExprSyntaxError("expected ')'", self.pos)
            self.pos += 1
            return node
        m = _NUM_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return Const(float(m.group()))
        m = _NAME_RE.match(self.text, self.pos)
        if m:
            name = m.group()
            start = self.pos
            self.pos = m.end()
            if self._peek() == "(":
                if name not in FUNCTIONS:
                    raise UnknownIdentifier(name, start)
                self.pos += 1
                arg = self._expr()
                if self._peek() != ")":
                    raise ExprSyntaxError("expected ')'", self.pos)
                self.pos += 1
                return Call(name, arg)
            if name not in self.variables:
                raise UnknownIdentifier(name, start)
            return Var(name)
        raise ExprSyntaxError(f"unexpected character '{ch}'", self.pos)


# ---------------------------------------------------------------------------
# Evaluation: compiled fast path plus a tree walker that locates failures.

_EVAL_GLOBALS = {
    "__builtins__": {},
    "_div": dual.div,
    "_pow": dual.pow_,
    "_sin": dual.sin,
    "_cos": dual.cos,
    "_exp": dual.exp,
    "_ln": dual.ln,
    "_sqrt": dual.sqrt,
    "_abs": dual.abs_,
}


def _py_source(node: Node) -> str:
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_py_source(node.operand)})"
    if isinstance(node, Call):
        return f"_{node.fn}({_py_source(node.arg)})"
    l, r = _py_source(node.left), _py_source(node.right)
    if node.op == "/":
        return f"_div({l}, {r})"
    if node.op == "^":
        return f"_pow({l}, {r})"
    return f"({l} {node.op} {r})"


class _Located(Exception):
    def __init__(self, node: Node, reason: str):
        self.node = node
        self.reason = reason


_CALL_FNS = {
    "sin": dual.sin,
    "cos": dual.cos,
    "exp": dual.exp,
    "ln": dual.ln,
    "sqrt": dual.sqrt,
    "abs": dual.abs_,
}


def _walk(node: Node, env: Mapping[str, object]):
    """Reference evaluator; raises _Located at the first offending node.
    Semantics match the compiled path (both route through the dual module)."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_walk(node.operand, env)
    if isinstance(node, Call):
        arg = _walk(node.arg, env)
        try:
            out = _CALL_FNS[node.fn](arg)
        except DomainViolation as exc:
            raise _Located(node, str(exc)) from None
    else:
        left = _walk(node.left, env)
        right = _walk(node.right, env)
        try:
            if node.op == "+":
                out = left + right
            elif node.op == "-":
                out = left - right
            elif node.op == "*":
                out = left * right
            elif node.op == "/":
                out = dual.div(left, right)
            else:
                out = dual.pow_(left, right)
        except DomainViolation as exc:
            raise _Located(node, str(exc)) from None
    if not dual.is_finite(out):
        raise _Located(node, "non-finite result (overflow)")
    return out


# ---------------------------------------------------------------------------


class ExprFunction:
    """A parsed vector-valued function of named variables.

    `variables` fixes the input order; evaluation accepts exactly that many
    real (or dual) values and returns one value per component.
    """

    __slots__ = ("components", "variables", "source_text", "_codes")

    def __init__(
        self,
        components: Sequence[Node],
        variables: Sequence[str],
        source_text: Sequence[str] | None = None,
    ):
        self.components = tuple(components)
        self.variables = tuple(variables)
        if source_text is None:
            source_text = tuple(format_node(c) for c in self.components)
        self.source_text = tuple(source_text)
        self._codes = tuple(
            compile(_py_source(c), f"<component {i}>", "eval")
            for i, c in enumerate(self.components)
        )

    @property
    def n_inputs(self) -> int:
        return len(self.variables)

    @property
    def n_outputs(self) -> int:
        return len(self.components)

    def texts(self) -> tuple[str, ...]:
        """Canonical textual form of each component."""
        return tuple(format_node(c) for c in self.components)

    def __repr__(self):
        return f"ExprFunction({list(self.texts())!r}, variables={list(self.variables)!r})"

    def _locate(self, i: int, env: Mapping[str, object], fallback: str) -> DomainError:
        try:
            _walk(self.components[i], env)
        except _Located as loc:
            return DomainError(loc.reason, i, format_node(loc.node))
        return DomainError(fallback, i, self.source_text[i])

    def _values(self, p: Sequence) -> list:
        if len(p) != self.n_inputs:
            raise DimensionMismatch(
                f"function of {self.n_inputs} variables called with {len(p)} values"
            )
        env = dict(zip(self.variables, p))
        out = []
        for i, code in enumerate(self._codes):
            try:
                v = eval(code, _EVAL_GLOBALS, env)
            except DomainViolation as exc:
                raise self._locate(i, env, str(exc)) from None
            if not dual.is_finite(v):
                raise self._locate(i, env, "non-finite result (overflow)")
            out.append(v)
        return out

    def eval(self, p: Sequence[float]) -> Vector:
        return Vector._unchecked(tuple(self._values(p)))

    def partial(self, p: Sequence[float], j: int) -> Vector:
        """Exact jth partial derivative of every component at p (0-based j),
        from one dual-number pass seeded on variable j."""
        if not 0 <= j < self.n_inputs:
            raise DimensionMismatch(f"variable index {j} out of range")
        seeded = [Dual(float(v), 1.0 if k == j else 0.0) for k, v in enumerate(p)]
        # a component with no variable references evaluates to a plain float
        return Vector._unchecked(
            tuple(
                d.derivative if isinstance(d, Dual) else 0.0
                for d in self._values(seeded)
            )
        )

    def jacobian(self, p: Sequence[float]) -> Matrix:
        cols = [self.partial(p, j) for j in range(self.n_inputs)]
        return Matrix.from_rows(
            [[cols[j][i] for j in range(self.n_inputs)] for i in range(self.n_outputs)]
        )

    def jacobian_split(self, point) -> tuple[Matrix, Matrix]:
        """(dF/dx, dF/dy) at a split point: the first n and last m columns.
        The component count must equal the dependent dimension m."""
        n, m = point.n, point.m
        if self.n_outputs != m:
            raise DimensionMismatch(
                f"{self.n_outputs} components but dependent block has dim {m}"
            )
        if self.n_inputs != n + m:
            raise DimensionMismatch(
                f"function of {self.n_inputs} variables, split point has dim {n + m}"
            )
        jac = self.jacobian(point.point())
        from .linalg import split_columns

        return split_columns(jac, n)

    def substituted(
        self, mapping: Mapping[str, Node], variables: Sequence[str]
    ) -> "ExprFunction":
        """New function with variables replaced by expression trees over a
        new variable list."""
        comps = [substitute(c, mapping) for c in self.components]
        return ExprFunction(comps, variables)

    def with_variables(self, variables: Sequence[str]) -> "ExprFunction":
        """Same trees, reordered variable list (binding is by name)."""
        if set(variables) != set(self.variables) or len(variables) != len(self.variables):
            raise DimensionMismatch("reordered variable list must be a permutation")
        return ExprFunction(self.components, variables, self.source_text)

    def component_function(self, i: int, variables: Sequence[str]) -> "ExprFunction":
        """Single component as a scalar function over a permuted variable list."""
        return ExprFunction((self.components[i],), variables)


def parse(text: Sequence[str] | str, variables: Sequence[str]) -> ExprFunction:
    """Parse expression strings over the declared, ordered variables."""
    texts = [text] if isinstance(text, str) else list(text)
    names = list(variables)
    seen = set()
    for name in names:
        if not _NAME_RE.fullmatch(name):
            raise ValueError(f"invalid variable name {name!r}")
        if name in FUNCTIONS:
            raise ValueError(f"variable name {name!r} collides with a function")
        if name in seen:
            raise ValueError(f"duplicate variable name {name!r}")
        seen.add(name)
    components = [_Parser(t, names).parse() for t in texts]
    return ExprFunction(components, names, texts)


def fresh_names(base: str, count: int, taken: Sequence[str]) -> list[str]:
    """count names of the form base1..basecount (suffixed further on
    collision with taken names)."""
    used = set(taken)
    out = []
    for i in range(1, count + 1):
        name = f"{base}{i}"
        while name in used:
            name += "_"
        used.add(name)
        out.append(name)
    return out
