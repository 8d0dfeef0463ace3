#!/usr/bin/env pytest
"""Unit tests for frames and their deformations."""
import numpy as np
import pytest

from witt_windows.errors import (
    BadEisenstein,
    BadPrime,
    NotInIdeal,
    PrecisionExhausted,
    SpecMismatch,
)
from witt_windows.frames import (
    SHIFT_RULE,
    UValuationKernel,
    breuil_deformation,
    breuil_residue_ring,
    breuil_tower,
    build_breuil_frame,
    build_c_frame,
    build_dieudonne_frame,
    check_eisenstein,
    check_frame_axioms,
    derive_deformation_frame,
    dieudonne_deformation,
    dieudonne_tower,
)
from witt_windows.ring import RingSpec


@pytest.fixture
def rng():
    return np.random.default_rng(2)


@pytest.fixture
def breuil():
    """B_2 for E = u + 3 over Z/3^5."""
    return build_breuil_frame(3, (3,), 2)


def test_breuil_frame(breuil):
    assert breuil.ring == RingSpec(3, 5, (), 2)
    assert breuil.residue_ring == breuil_residue_ring(3, (3,), 2)
    assert breuil.generator == breuil.ring.var("u") + 3
    # f(E) = u^3 + 3 and u^2 = 0 in S
    assert breuil.pi == 3
    assert "kind: breuil" in breuil.describe()
    assert build_breuil_frame(3, (3,), 2, N=4).ring.N == 4


def test_breuil_frame_validation():
    with pytest.raises(BadPrime):
        build_breuil_frame(2, (2,), 1)
    with pytest.raises(BadEisenstein):
        build_breuil_frame(3, (1,), 1)
    with pytest.raises(BadEisenstein):
        build_breuil_frame(3, (9,), 1)
    with pytest.raises(PrecisionExhausted):
        build_breuil_frame(3, (3,), 3, N=2)
    check_eisenstein(3, (6, 3))
    with pytest.raises(BadEisenstein):
        check_eisenstein(3, (3, 1))
    with pytest.raises(BadEisenstein):
        check_eisenstein(3, ())


def test_ideal_elements(breuil):
    u = breuil.ring.var("u")
    a = breuil.from_witness(u)
    assert a.value == u * (u + 3)
    assert breuil.f1(a) == u**3
    assert breuil.ideal_element(a.value, u).witness == u
    with pytest.raises(NotInIdeal):
        breuil.ideal_element(a.value, u + 1)
    assert breuil.f1(breuil.unit_witness()) == 1
    assert breuil.in_ideal(a.value)
    assert not breuil.in_ideal(u + 1)


@pytest.mark.parametrize(
    "build",
    [
        lambda: build_breuil_frame(3, (3,), 1),
        lambda: build_breuil_frame(3, (3, 3), 2),
        lambda: build_breuil_frame(5, (5,), 1, (2,)),
        lambda: build_dieudonne_frame(breuil_residue_ring(3, (3,), 1), 3),
        lambda: build_dieudonne_frame(RingSpec(3, 2), 2),
        lambda: build_c_frame((2,), 3, 3),
    ],
)
def test_frame_axioms(build, rng):
    report = check_frame_axioms(build(), 3, rng)
    assert report.passed, report.render()
    assert "pi-relation" in report
    assert "unit-witness" in report


def test_dieudonne_frame():
    frame = build_dieudonne_frame(RingSpec(3, 2), 3)
    assert frame.budget == 3
    assert frame.pi == 3
    assert frame.residue_ring == RingSpec(3, 2)
    with pytest.raises(NotInIdeal):
        frame.ideal_element(frame.ring.one())
    with pytest.raises(PrecisionExhausted):
        build_dieudonne_frame(RingSpec(3, 2), 1)


def test_c_frame():
    frame = build_c_frame(("inf",), 3, 2)
    assert frame.n == (4,)
    assert frame.pi == 3
    assert frame.residue_ring == RingSpec(3, 1, (4,))


def test_breuil_deformation(breuil, rng):
    derived = breuil_deformation(breuil)
    assert derived.certificate.certified
    assert derived.residue_ring == breuil_residue_ring(3, (3,), 1)
    assert derived.kernel.name == "u^1S"
    report = check_frame_axioms(derived, 2, rng)
    assert report.passed, report.render()
    assert "kernel-square-zero" in report
    with pytest.raises(NotInIdeal):
        derived.ideal_element(breuil.ring.zero())


def test_dieudonne_deformation():
    upper = dieudonne_tower(3, [2, 1])[0]
    derived = dieudonne_deformation(upper, 1)
    assert derived.certificate.certified
    assert derived.residue_ring == RingSpec(3, 1)
    with pytest.raises(ValueError):
        dieudonne_deformation(upper, 2)


def test_rules_must_fit_the_kernel(breuil):
    kernel = UValuationKernel(breuil.ring, 1, breuil_residue_ring(3, (3,), 1))
    with pytest.raises(SpecMismatch):
        derive_deformation_frame(breuil, kernel, SHIFT_RULE)


def test_towers():
    frames = breuil_tower(3, (3,), [3, 2, 1])
    assert [f.level for f in frames] == [3, 2, 1]
    assert {f.ring.N for f in frames} == {6}
    with pytest.raises(ValueError):
        dieudonne_tower(3, [1, 2])
