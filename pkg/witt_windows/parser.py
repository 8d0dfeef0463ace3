"""A small recursive-descent parser for ring elements.

The accepted grammar is::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := INT | VAR ('^' INT)? | '(' expr ')' | '-' factor

Whitespace (including newlines) is ignored between tokens. Variables are
``u`` and ``t1 .. tr`` and must exist in the ring the expression is
evaluated in.
"""

import re

from dataclasses import dataclass
from logging import getLogger
from typing import Any, Iterator, List, Tuple, Union

from .errors import ExponentOverflow, ExpressionSyntaxError, SpecMismatch, UnknownVariable
from .frames import eisenstein_coefficients
from .matrix import MatrixOverS
from .ring import RingSpec, TruncatedSeries
from .witt import WittRing


log = getLogger("witt-windows")

#: Largest exponent accepted after ``^``.
MAX_EXPONENT = 4096

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<int>\d+)|(?P<var>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()])"
)


@dataclass(frozen=True)
class Token:
    """A lexical token with its 1-based position."""

    kind: str
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Var:
    name: str
    power: int = 1
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "ExprAst"
    right: "ExprAst"


ExprAst = Union[Int, Var, Neg, BinOp]


def tokenize(src: str) -> List[Token]:
    """Split ``src`` into tokens, ending with an ``eof`` token."""
    tokens = []
    line, column, pos = 1, 1, 0
    while pos < len(src):
        match = _TOKEN_RE.match(src, pos)
        if match is None:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", line, column)
        text = match.group()
        if match.lastgroup != "ws":
            tokens.append(Token(match.lastgroup, text, line, column))
        for char in text:
            if char == "\n":
                line, column = line + 1, 1
            else:
                column += 1
        pos = match.end()
    tokens.append(Token("eof", "", line, column))
    return tokens


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def error(self, message: str, token: Token = None):
        token = token or self.current
        found = "end of input" if token.kind == "eof" else repr(token.text)
        raise ExpressionSyntaxError(f"{message}, found {found}", token.line, token.column)

    def expect_op(self, text: str) -> Token:
        if self.current.kind == "op" and self.current.text == text:
            return self.advance()
        self.error(f"expected {text!r}")

    def parse(self) -> ExprAst:
        node = self.expr()
        if self.current.kind != "eof":
            self.error("expected an operator")
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.factor()
        while self.current.kind == "op" and self.current.text == "*":
            self.advance()
            node = BinOp("*", node, self.factor())
        return node

    def factor(self) -> ExprAst:
        token = self.current
        if token.kind == "int":
            self.advance()
            return Int(int(token.text))
        if token.kind == "var":
            self.advance()
            power = 1
            if self.current.kind == "op" and self.current.text == "^":
                caret = self.advance()
                if self.current.kind != "int":
                    self.error("expected an integer exponent", caret if self.current.kind == "eof" else None)
                exponent = self.advance()
                power = int(exponent.text)
                if power > MAX_EXPONENT:
                    raise ExponentOverflow(
                        f"exponent {power} exceeds {MAX_EXPONENT} "
                        f"(line {exponent.line}, column {exponent.column})"
                    )
            return Var(token.text, power, token.line, token.column)
        if token.kind == "op" and token.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        if token.kind == "op" and token.text == "-":
            self.advance()
            return Neg(self.factor())
        self.error("expected a number, a variable or '('")


def parse(src: str) -> ExprAst:
    """Parse ``src`` into an expression tree."""
    return _Parser(tokenize(src)).parse()


def render(node: ExprAst) -> str:
    """Render an expression tree as fully parenthesised source text."""
    if isinstance(node, Int):
        return str(node.value)
    if isinstance(node, Var):
        return node.name if node.power == 1 else f"{node.name}^{node.power}"
    if isinstance(node, Neg):
        return f"-({render(node.operand)})"
    return f"({render(node.left)} {node.op} {render(node.right)})"


def variables(node: ExprAst) -> Iterator[Var]:
    """All variable occurrences in ``node``."""
    if isinstance(node, Var):
        yield node
    elif isinstance(node, Neg):
        yield from variables(node.operand)
    elif isinstance(node, BinOp):
        yield from variables(node.left)
        yield from variables(node.right)


def _base_spec(ring: Any) -> RingSpec:
    return ring.base if isinstance(ring, WittRing) else ring


def evaluate(node: ExprAst, ring: Union[RingSpec, WittRing]) -> Any:
    """Evaluate an expression tree in ``ring``.

    Over a Witt ring, integers map through the diagonal and variables through
    their Teichmüller representatives.
    """
    spec = _base_spec(ring)
    for var in variables(node):
        if var.name not in spec.variables:
            raise UnknownVariable(
                f"{spec.describe()} has no variable {var.name!r} "
                f"(line {var.line}, column {var.column})"
            )
    return _evaluate(node, ring)


def _evaluate(node: ExprAst, ring: Any) -> Any:
    if isinstance(node, Int):
        return ring.from_int(node.value)
    if isinstance(node, Var):
        if isinstance(ring, WittRing):
            return ring.teichmuller(ring.base.var(node.name)) ** node.power
        return ring.var(node.name) ** node.power
    if isinstance(node, Neg):
        return -_evaluate(node.operand, ring)
    left, right = _evaluate(node.left, ring), _evaluate(node.right, ring)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    return left * right


def parse_expression(src: str, spec: Union[RingSpec, WittRing]) -> Union[TruncatedSeries, Any]:
    """Parse ``src`` and evaluate it in ``spec``.

    Parameters
    ----------
    src : str
        Expression text, e.g. ``"u^2 + 3*u + 9"``.
    spec : RingSpec or WittRing
        The ring the result lives in.

    Returns
    -------
    TruncatedSeries or WittVector
        The canonical element.

    Raises
    ------
    ExpressionSyntaxError
        With the line and column of the offending token.
    UnknownVariable
        When a variable is not a variable of ``spec``.
    ExponentOverflow
        When an exponent exceeds :data:`MAX_EXPONENT`.
    """
    return evaluate(parse(src), spec)


def parse_eisenstein(src: str, p: int, N: int) -> Tuple[int, ...]:
    """Read the coefficients a_0..a_{e-1} of a monic E in ``u``.

    Coefficients are reduced modulo p^N.
    """
    node = parse(src)
    for var in variables(node):
        if var.name != "u":
            raise UnknownVariable(
                f"E may only involve u, not {var.name!r} (line {var.line}, column {var.column})"
            )
    degree = max((var.power for var in variables(node)), default=0)
    spec = RingSpec(p, N, (), degree + 1)
    coefficients = eisenstein_coefficients(evaluate(node, spec))
    log.debug(f"parsed E = {src!r} as coefficients {coefficients}")
    return coefficients


def parse_matrix(src: str, ring: Union[RingSpec, WittRing]) -> MatrixOverS:
    """Parse a matrix, rows separated by ``;`` and entries by ``,``."""
    rows = src.split(";")
    entries = [row.split(",") for row in rows]
    widths = {len(row) for row in entries}
    if len(widths) != 1:
        raise SpecMismatch(f"matrix rows have different lengths: {src!r}")
    values = [[parse_expression(cell, ring) for cell in row] for row in entries]
    return MatrixOverS.from_rows(ring, values)

