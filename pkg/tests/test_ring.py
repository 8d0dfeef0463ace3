#!/usr/bin/env pytest
"""Unit tests for truncated series rings."""
import numpy as np
import pytest

from hypothesis import given, settings
from hypothesis import strategies as st

from witt_windows.errors import BadPrime, NotAUnit, NotDivisible, RingNotFinite, SpecMismatch
from witt_windows.frames import breuil_residue_ring
from witt_windows.ring import (
    INFINITE_TRUNCATION_BOUND,
    RingSpec,
    resolve_truncation,
    smith_solve,
)


# Z/9[u]/(u^3)
S = RingSpec(3, 2, (), 3)


def series(coefficients):
    """Element of S from the coefficients of 1, u, u^2."""
    return S.element({(i,): c for i, c in enumerate(coefficients)})


coefficient_lists = st.lists(st.integers(-50, 50), min_size=3, max_size=3)


def test_ring_spec_validation():
    with pytest.raises(BadPrime):
        RingSpec(4, 2)
    with pytest.raises(ValueError):
        RingSpec(3, 0)
    with pytest.raises(ValueError):
        RingSpec(3, 2, (0,))
    assert resolve_truncation("inf") == INFINITE_TRUNCATION_BOUND
    assert resolve_truncation(2) == 2


def test_ring_shape():
    spec = RingSpec(3, 2, (2,), 3)
    assert spec.variables == ("u", "t1")
    assert spec.bounds == (3, 2)
    assert len(spec.monomials) == 6
    assert spec.size == 9**6
    assert spec.describe() == "Z/3^2[u,t1]/(u^3, t1^2)"


def test_canonical_form():
    u = S.var("u")
    assert (u + 1) * (u + 1) == series([1, 2, 1])
    assert u**3 == 0
    assert series([10, -1, 9]) == series([1, 8, 0])
    assert str(series([1, 8, 0])) == "1 + 8*u^1"
    assert S.from_int(9).is_zero()


@settings(derandomize=True, max_examples=50)
@given(coefficient_lists, coefficient_lists, coefficient_lists)
def test_ring_axioms(a, b, c):
    x, y, z = series(a), series(b), series(c)
    assert x + y == y + x
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0


@settings(derandomize=True, max_examples=50)
@given(coefficient_lists)
def test_invert_unit(a):
    x = series(a)
    if x.is_unit():
        assert x * x.invert_unit() == 1
    else:
        with pytest.raises(NotAUnit):
            x.invert_unit()


def test_frobenius():
    u = S.var("u")
    assert (u + 1).frobenius() == S.one()
    ring = RingSpec(3, 2, (), 7)
    v = ring.var("u")
    assert (v * 2 + 1).frobenius() == v**3 * 2 + 1


def test_relation_ring():
    # R_1 for E = u^2 + 3u + 3 is F_3[u]/(u^2)
    R = breuil_residue_ring(3, (3, 3), 1)
    u = R.var("u")
    assert u**2 == 0
    assert R.e == 2
    R2 = breuil_residue_ring(3, (3, 3), 2)
    u2 = R2.var("u")
    assert u2**2 == u2 * 6 + 6
    with pytest.raises(SpecMismatch):
        u2.frobenius()


def test_quotient_and_lift():
    x = series([5, 7, 2])
    R = RingSpec(3, 1, (), 3)
    image = x.quotient_map(R)
    assert image == R.element({(0,): 2, (1,): 1, (2,): 2})
    assert image.lift(2).quotient_map(R) == image
    with pytest.raises(SpecMismatch):
        image.quotient_map(S)
    with pytest.raises(SpecMismatch):
        x.lift(1)


def test_map_into():
    source = RingSpec(3, 2, (2,))
    target = RingSpec(3, 1, (2,), 3)
    t = source.var("t1")
    assert (t * 4 + 1).map_into(target, {"t1": "t1"}) == target.var("t1") + 1
    assert t.map_into(target, {"t1": "u"}) == target.var("u")
    with pytest.raises(SpecMismatch):
        t.map_into(RingSpec(3, 3, (2,)))


def test_divide_exact():
    u = S.var("u")
    x = u * 3
    q = x.divide_exact(S.from_int(3))
    assert q * 3 == x
    assert x.divide_exact(3, witness=u) == u
    with pytest.raises(NotDivisible):
        x.divide_exact(3, witness=u + 1)
    with pytest.raises(NotDivisible):
        u.divide_exact(S.from_int(3))


def test_smith_solve():
    assert smith_solve([[3]], [6], 3, 2) == [2]
    assert smith_solve([[3]], [1], 3, 2) is None
    solution = smith_solve([[1, 3], [0, 3]], [4, 3], 3, 2)
    assert (solution[0] + 3 * solution[1]) % 9 == 4
    assert (3 * solution[1]) % 9 == 3


def test_enumeration():
    R = RingSpec(3, 1, (), 2)
    assert len(list(R.elements())) == 9
    with pytest.raises(RingNotFinite):
        list(RingSpec(3, 4, (), 4).elements())


def test_random_is_seeded():
    a = S.random(np.random.default_rng(3))
    b = S.random(np.random.default_rng(3))
    assert a == b
