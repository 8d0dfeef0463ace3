#!/usr/bin/env pytest
"""Unit tests for windows and their morphisms."""
import numpy as np
import pytest

from witt_windows.errors import NotInIdeal, NotInvertible, RankMismatch, SpecMismatch
from witt_windows.frames import (
    breuil_residue_ring,
    build_breuil_frame,
    build_c_frame,
    build_dieudonne_frame,
)
from witt_windows.matrix import MatrixOverS
from witt_windows.morphisms import identity_morphism, kappa_morphism
from witt_windows.windows import (
    HodgeFiltration,
    QElement,
    WindowMorphism,
    base_change,
    canonical_base_change_morphism,
    check_base_change_universal,
    check_window,
    check_window_morphism,
    compose_window_morphisms,
    direct_sum,
    eval_F,
    eval_F1,
    graph_automorphism,
    graph_block,
    hodge_filtration,
    identity_window_morphism,
    induced_morphism,
    random_window,
    window_from_normal_decomposition,
)


@pytest.fixture
def rng():
    return np.random.default_rng(8)


@pytest.fixture
def frame():
    """B_1 for E = u + 3 over Z/27."""
    return build_breuil_frame(3, (3,), 1, N=3)


@pytest.fixture
def window(frame):
    u = frame.ring.var("u")
    A = MatrixOverS.from_rows(frame.ring, [[1, u], [3, 2]])
    return window_from_normal_decomposition(frame, 1, 1, A)


def test_validation(frame):
    ring = frame.ring
    with pytest.raises(RankMismatch):
        window_from_normal_decomposition(frame, 1, 1, MatrixOverS.identity(ring, 3))
    with pytest.raises(NotInvertible):
        window_from_normal_decomposition(frame, 1, 0, MatrixOverS.from_rows(ring, [[3]]))
    other = build_breuil_frame(3, (3,), 1, N=4)
    with pytest.raises(SpecMismatch):
        window_from_normal_decomposition(frame, 1, 0, MatrixOverS.identity(other.ring, 1))
    with pytest.raises(RankMismatch):
        window_from_normal_decomposition(frame, -1, 1, MatrixOverS.identity(ring, 0))


def test_structure_maps(frame, window):
    pi = frame.pi
    e0, e1 = window.basis_vector(0), window.basis_vector(1)
    # F(l) = π·Ψ(l) and F(t) = Ψ(t)
    assert eval_F(window, e0) == [pi * c for c in window.A.column(0)]
    assert eval_F(window, e1) == window.A.column(1)
    assert eval_F1(window, window.l_generator(0)) == window.A.column(0)
    q = window.t_generator(0, frame.unit_witness())
    assert eval_F1(window, q) == window.A.column(1)
    with pytest.raises(NotInIdeal):
        eval_F1(window, QElement((frame.ring.zero(),), (frame.ring.one(),)))
    with pytest.raises(RankMismatch):
        eval_F(window, e0[:1])


@pytest.mark.parametrize(
    "build",
    [
        lambda: build_breuil_frame(3, (3,), 2),
        lambda: build_breuil_frame(3, (3, 3), 1),
        lambda: build_dieudonne_frame(breuil_residue_ring(3, (3,), 1), 3),
        lambda: build_c_frame((2,), 3, 3),
    ],
)
def test_random_windows_validate(build, rng):
    frame = build()
    for d_L, d_T in ((1, 1), (2, 1), (0, 2)):
        w = random_window(frame, d_L, d_T, rng)
        assert w.A.is_invertible()
        report = check_window(w, 2, rng)
        assert report.passed, report.render()


def test_base_change(frame, window, rng):
    assert base_change(identity_morphism(frame), window) == window
    dieudonne = build_dieudonne_frame(frame.residue_ring, 3)
    kappa = kappa_morphism(frame, dieudonne)
    image = base_change(kappa, window)
    assert image.frame == dieudonne
    assert image.A[0, 0] == kappa.unit
    assert image.A[1, 1] == kappa(window.A[1, 1])
    assert check_window(image, 2, rng).passed
    with pytest.raises(SpecMismatch):
        base_change(kappa, image)


def test_direct_sum(frame, window):
    one = MatrixOverS.identity(frame.ring, 1)
    multiplicative = window_from_normal_decomposition(frame, 1, 0, one * 2)
    total = direct_sum(window, multiplicative)
    assert (total.d_L, total.d_T) == (2, 1)
    # basis order L1, L2, T1
    assert total.A[1, 1] == 2
    assert total.A[0, 2] == window.A[0, 1]
    assert total.A[2, 0] == window.A[1, 0]
    assert total.A[1, 2] == 0


def test_hodge_filtration(frame, window):
    hodge = hodge_filtration(window)
    assert hodge == HodgeFiltration.graph(frame.residue_ring, 1, 1)
    assert hodge.rank == 1
    assert hodge.columns.shape == (2, 1)
    with pytest.raises(RankMismatch):
        HodgeFiltration.graph(frame.residue_ring, 1, 1, MatrixOverS.zeros(frame.residue_ring, 2, 1))
    summed = hodge.direct_sum(HodgeFiltration.graph(frame.residue_ring, 1, 0))
    assert (summed.d_L, summed.d_T) == (2, 1)


def test_hodge_filtration_of_a_graph(frame, window):
    ring = frame.ring
    mu = MatrixOverS.from_rows(ring, [[ring.one()]])
    w = window_from_normal_decomposition(frame, 1, 1, window.A, mu)
    residue = frame.residue_ring
    graph = HodgeFiltration.graph(residue, 1, 1, MatrixOverS.from_rows(residue, [[1]]))
    assert hodge_filtration(w) == graph
    assert hodge_filtration(w) != hodge_filtration(window)
    assert w.A == window.A
    dieudonne = build_dieudonne_frame(residue, 3)
    moved = base_change(kappa_morphism(frame, dieudonne), w)
    one = MatrixOverS.from_rows(dieudonne.residue_ring, [[1]])
    assert hodge_filtration(moved) == HodgeFiltration.graph(dieudonne.residue_ring, 1, 1, one)
    with pytest.raises(RankMismatch):
        window_from_normal_decomposition(frame, 1, 1, window.A, MatrixOverS.zeros(ring, 2, 1))


def test_window_morphisms(frame, window, rng):
    ident = identity_window_morphism(window)
    assert check_window_morphism(ident, 2, rng).passed
    dieudonne = build_dieudonne_frame(frame.residue_ring, 3)
    kappa = kappa_morphism(frame, dieudonne)
    canonical = canonical_base_change_morphism(kappa, window)
    report = check_window_morphism(canonical, 2, rng)
    assert report.passed, report.render()
    assert check_window_morphism(induced_morphism(canonical), 2, rng).passed
    composite = compose_window_morphisms(ident, canonical)
    assert check_window_morphism(composite, 2, rng).passed
    assert composite.morphism.name == "kappa o id"


def test_base_change_is_universal(frame, window, rng):
    dieudonne = build_dieudonne_frame(frame.residue_ring, 3)
    kappa = kappa_morphism(frame, dieudonne)
    two = frame.ring.from_int(2)
    doubling = WindowMorphism(
        window, window, identity_morphism(frame), MatrixOverS.diagonal(frame.ring, [two, two])
    )
    assert check_window_morphism(doubling, 2, rng).passed
    g = compose_window_morphisms(doubling, canonical_base_change_morphism(kappa, window))
    report = check_base_change_universal(g, 2, rng)
    assert report.passed, report.render()
    assert {"unique", "factors", "induced.F-compatible"} <= set(report.rows)
    assert induced_morphism(g).matrix == g.matrix


def test_base_change_factorization_failure_is_reported(frame, window, rng):
    dieudonne = build_dieudonne_frame(frame.residue_ring, 3)
    kappa = kappa_morphism(frame, dieudonne)
    canonical = canonical_base_change_morphism(kappa, window)
    shear = MatrixOverS.from_rows(dieudonne.ring, [[1, 0], [1, 1]])
    broken = WindowMorphism(window, canonical.target, kappa, shear)
    report = check_base_change_universal(broken, 1, rng)
    assert not report.passed


def test_wrong_matrix_is_reported(window, rng):
    ident = identity_window_morphism(window)
    broken = type(ident)(window, window, ident.morphism, window.A, {})
    report = check_window_morphism(broken, 1, rng)
    assert not report.passed
    assert report.failures()


def test_graph_automorphism(window):
    ident = identity_window_morphism(window)
    automorphism = graph_automorphism(window, window, ident)
    assert automorphism.shape == (4, 4)
    assert graph_block(window, window, automorphism) == ident.matrix
