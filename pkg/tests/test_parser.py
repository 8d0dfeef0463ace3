#!/usr/bin/env pytest
"""Unit tests for the expression parser."""
import pytest

from witt_windows.errors import (
    BadEisenstein,
    ExponentOverflow,
    ExpressionSyntaxError,
    SpecMismatch,
    UnknownVariable,
)
from witt_windows.parser import (
    BinOp,
    Int,
    Neg,
    Var,
    parse,
    parse_eisenstein,
    parse_expression,
    parse_matrix,
    render,
    tokenize,
)
from witt_windows.ring import RingSpec
from witt_windows.witt import WittRing


S = RingSpec(3, 3, (), 3)
ST = RingSpec(3, 2, (2,), 3)


def test_tokenize_positions():
    tokens = tokenize("u^2 +\n  3*t1")
    kinds = [(t.kind, t.text, t.line, t.column) for t in tokens]
    assert kinds == [
        ("var", "u", 1, 1),
        ("op", "^", 1, 2),
        ("int", "2", 1, 3),
        ("op", "+", 1, 5),
        ("int", "3", 2, 3),
        ("op", "*", 2, 4),
        ("var", "t1", 2, 5),
        ("eof", "", 2, 7),
    ]


def test_tokenize_rejects_characters():
    with pytest.raises(ExpressionSyntaxError) as excinfo:
        tokenize("u + 3 / 2")
    assert (excinfo.value.line, excinfo.value.column) == (1, 7)


def test_parse_tree():
    node = parse("u^2 + 3*u + 9")
    assert node == BinOp("+", BinOp("+", Var("u", 2, 1, 1), BinOp("*", Int(3), Var("u", 1, 1, 9))), Int(9))
    assert render(node) == "((u^2 + (3 * u)) + 9)"
    assert render(parse("-(u - 1)")) == "-((u - 1))"
    assert isinstance(parse("--2"), Neg)


@pytest.mark.parametrize(
    "src, column",
    [
        ("u^", 2),
        ("u + ", 5),
        ("(u + 1", 7),
        ("u 1", 3),
        ("* u", 1),
    ],
)
def test_syntax_error_positions(src, column):
    with pytest.raises(ExpressionSyntaxError) as excinfo:
        parse(src)
    assert excinfo.value.line == 1
    assert excinfo.value.column == column


def test_exponent_overflow():
    assert parse("u^4096") == Var("u", 4096, 1, 1)
    with pytest.raises(ExponentOverflow):
        parse("u^4097")


def test_parse_expression():
    u = S.var("u")
    x = parse_expression("u^2 + 3*u + 9", S)
    assert x == u * u + u + u + u + S.from_int(9)
    assert parse_expression("u^3", S).is_zero()
    assert parse_expression("-1", S) == S.from_int(26)
    assert parse_expression("(1 + t1)*(1 - t1)", ST) == ST.one()


def test_unknown_variable():
    with pytest.raises(UnknownVariable):
        parse_expression("t1 + 1", S)
    with pytest.raises(UnknownVariable):
        parse_expression("t2", ST)


def test_parse_expression_over_witt_vectors():
    ring = WittRing(RingSpec(3, 2, (), 2), 2)
    assert parse_expression("u", ring) == ring.teichmuller(ring.base.var("u"))
    assert parse_expression("3", ring) == ring.from_int(3)


def test_parse_eisenstein():
    assert parse_eisenstein("u+3", 3, 4) == (3,)
    assert parse_eisenstein("u^2 + 3*u + 3", 3, 4) == (3, 3)
    assert parse_eisenstein("u - 3", 3, 2) == (6,)
    with pytest.raises(BadEisenstein):
        parse_eisenstein("2*u + 3", 3, 4)
    with pytest.raises(UnknownVariable):
        parse_eisenstein("u + t1", 3, 4)


def test_parse_matrix():
    m = parse_matrix("1, u; 0, 2", S)
    assert m.shape == (2, 2)
    assert m[0, 1] == S.var("u")
    assert m[1, 1] == S.from_int(2)
    with pytest.raises(SpecMismatch):
        parse_matrix("1, u; 0", S)

