#!/usr/bin/env pytest
"""Unit tests for the square-zero lifting machinery."""
import numpy as np
import pytest

from witt_windows.crystalline import (
    Perturbation,
    as_deformation_window,
    breuil_chain,
    crystalline_lift,
    dieudonne_chain,
    enumerate_hodge_lifts,
    enumerate_iso_solutions,
    faithfulness_probe,
    hodge_change_of_basis,
    hodge_deform,
    hom_set,
    kappa_ladder_step,
    lift_hom,
    lift_step,
    reduce_to_squarezero,
    unique_iso_solver,
)
from witt_windows.errors import (
    BudgetExhausted,
    CertificateViolation,
    NotASummandLift,
    NotInIdeal,
    RankMismatch,
    SpecMismatch,
)
from witt_windows.frames import (
    breuil_residue_ring,
    breuil_tower,
    build_breuil_frame,
    build_dieudonne_frame,
    dieudonne_tower,
)
from witt_windows.matrix import MatrixOverS
from witt_windows.morphisms import kappa_morphism, projection_morphism
from witt_windows.windows import (
    HodgeFiltration,
    base_change,
    check_window,
    check_window_morphism,
    hodge_filtration,
    identity_window_morphism,
    random_window,
    window_from_normal_decomposition,
)


E = (3,)


@pytest.fixture
def rng():
    return np.random.default_rng(11)


@pytest.fixture(params=["breuil", "dieudonne"])
def ctx(request):
    if request.param == "breuil":
        return breuil_chain(3, E, [2, 1])[0]
    return dieudonne_chain(3, [2, 1], eisenstein=E)[0]


def tiny_breuil_context():
    upper = build_breuil_frame(3, E, 2, N=2)
    lower = build_breuil_frame(3, E, 1, N=2)
    return reduce_to_squarezero([upper, lower])[0]


def is_congruent_to_one(ctx, matrix):
    one = MatrixOverS.identity(matrix.ring, matrix.nrows)
    return all(ctx.in_kernel(x) for row in (matrix - one).entries for x in row)


def test_chain_shape():
    chain = breuil_chain(3, E, [3, 2, 1])
    assert len(chain) == 2
    assert [ctx.frame.level for ctx in chain] == [3, 2]
    assert [ctx.target.level for ctx in chain] == [2, 1]
    assert all(ctx.nu >= 1 for ctx in chain)
    assert chain[0].kernel.name == "u^2S"


def test_chain_rejects_bad_steps():
    with pytest.raises(CertificateViolation):
        reduce_to_squarezero(breuil_tower(3, E, [3, 1]))
    mixed = [breuil_tower(3, E, [2])[0], dieudonne_tower(3, [1], eisenstein=E)[0]]
    with pytest.raises(SpecMismatch):
        reduce_to_squarezero(mixed)


def test_deformation_window(ctx, rng):
    w = random_window(ctx.frame, 1, 1, rng)
    deformed = as_deformation_window(ctx, w)
    assert deformed.frame == ctx.source
    assert deformed.A == w.A
    assert as_deformation_window(ctx, deformed) is deformed
    with pytest.raises(SpecMismatch):
        as_deformation_window(ctx, random_window(ctx.target, 1, 1, rng))


def test_perturbation_between(ctx, rng):
    w = as_deformation_window(ctx, random_window(ctx.frame, 1, 1, rng))
    pert = Perturbation.random(ctx, w, rng)
    pert.validate(ctx, w)
    moved = pert.apply(w)
    back = Perturbation.between(ctx, w, moved)
    assert back.eta == pert.eta
    assert back.epsilon == pert.epsilon


def test_perturbation_outside_kernel(ctx, rng):
    w = as_deformation_window(ctx, random_window(ctx.frame, 1, 1, rng))
    ring = ctx.source.ring
    bad = Perturbation(
        MatrixOverS.from_rows(ring, [[ring.one()], [ring.zero()]]),
        MatrixOverS.from_rows(ring, [[ring.zero()], [ring.zero()]]),
    )
    with pytest.raises(NotInIdeal):
        bad.validate(ctx, w)
    short = Perturbation(
        MatrixOverS.from_rows(ring, [[ring.zero()]]),
        MatrixOverS.from_rows(ring, [[ring.zero()]]),
    )
    with pytest.raises(RankMismatch):
        short.validate(ctx, w)


@pytest.mark.parametrize("rank", [(1, 1), (1, 0)])
def test_solver_output_is_a_morphism(ctx, rng, rank):
    w = random_window(ctx.frame, *rank, rng)
    for _ in range(3):
        pert = Perturbation.random(ctx, as_deformation_window(ctx, w), rng)
        g = unique_iso_solver(ctx, w, pert)
        assert is_congruent_to_one(ctx, g.matrix)
        assert g.matrix.is_invertible()
        assert g.target.A == pert.apply(as_deformation_window(ctx, w)).A
        assert check_window_morphism(g, 1, rng).passed


def test_solver_zero_perturbation_is_identity(ctx, rng):
    w = as_deformation_window(ctx, random_window(ctx.frame, 1, 1, rng))
    ring = ctx.source.ring
    zero = MatrixOverS.zeros(ring, 2, 1)
    g = unique_iso_solver(ctx, w, Perturbation(zero, zero))
    assert g.matrix == MatrixOverS.identity(ring, 2)


def test_solver_is_unique_by_enumeration(rng):
    ctx = tiny_breuil_context()
    assert len(ctx.kernel.elements()) == 9
    w = random_window(ctx.frame, 1, 0, rng)
    pert = Perturbation.random(ctx, as_deformation_window(ctx, w), rng)
    g = unique_iso_solver(ctx, w, pert)
    solutions = enumerate_iso_solutions(ctx, w, pert)
    assert solutions == [g.matrix]


def test_lift_step_reduces_back(ctx, rng):
    projection = projection_morphism(ctx.frame, ctx.target)
    w = random_window(ctx.target, 1, 1, rng)
    lifted = lift_step(ctx, w)
    assert lifted.frame == ctx.frame
    assert base_change(projection, lifted).A == w.A
    with pytest.raises(SpecMismatch):
        lift_step(ctx, lifted)


def test_crystalline_lift_through_two_steps(rng):
    chain = breuil_chain(3, E, [3, 2, 1])
    w = random_window(chain[-1].target, 1, 1, rng)
    lifted = crystalline_lift(chain, w)
    assert lifted.frame == chain[0].frame
    assert check_window(lifted, 2, rng).passed
    image = lifted
    for ctx in chain:
        image = base_change(projection_morphism(ctx.frame, ctx.target), image)
    assert image.A == w.A


def test_crystalline_lift_of_empty_chain(rng):
    w = random_window(build_breuil_frame(3, E, 1), 1, 1, rng)
    assert crystalline_lift([], w) is w


def test_lift_identity_morphism(rng):
    chain = breuil_chain(3, E, [2, 1])
    ctx = chain[0]
    w = random_window(ctx.target, 1, 1, rng)
    lifted = lift_step(ctx, w)
    g = lift_hom(chain, identity_window_morphism(w), lifted, lifted)
    assert g.matrix == MatrixOverS.identity(ctx.source.ring, 2)
    assert check_window_morphism(g, 1, rng).passed


def test_lift_hom_rank_mismatch(rng):
    chain = breuil_chain(3, E, [2, 1])
    ctx = chain[0]
    w = random_window(ctx.target, 1, 1, rng)
    other = lift_step(ctx, random_window(ctx.target, 1, 0, rng))
    with pytest.raises(RankMismatch):
        lift_hom(chain, identity_window_morphism(w), other, other)


def test_hodge_lifts_are_counted(ctx, rng):
    lifted = lift_step(ctx, random_window(ctx.target, 1, 1, rng))
    lifts = enumerate_hodge_lifts(ctx, lifted)
    assert len(lifts) == len(ctx.source.kernel_representatives()) == 3
    filtrations = [lift.filtration for lift in lifts]
    assert all(filtrations.index(h) == i for i, h in enumerate(filtrations))
    projection = projection_morphism(ctx.frame, ctx.target)
    for lift in lifts:
        assert base_change(projection, lift.window).A == base_change(projection, lifted).A
        assert check_window_morphism(hodge_change_of_basis(ctx, lifted, lift), 1, rng).passed


def test_hodge_filtration_moves_with_the_lift(rng):
    B2, B1 = breuil_tower(3, E, [2, 1])
    F2 = dieudonne_tower(3, [2, 1], eisenstein=E)[0]
    (ctx,) = reduce_to_squarezero([B2, B1])
    kappa = kappa_morphism(B2, F2)
    lifted = lift_step(ctx, random_window(B1, 1, 1, rng))
    trivial = hodge_filtration(lifted)
    assert trivial == HodgeFiltration.graph(B2.residue_ring, 1, 1)
    lifts = enumerate_hodge_lifts(ctx, lifted)
    moved = [lift for lift in lifts if hodge_filtration(lift.window) != trivial]
    assert len(moved) == len(lifts) - 1 == 2
    residue = F2.residue_ring
    for lift in moved:
        assert hodge_filtration(lift.window) == lift.filtration
        image = hodge_filtration(base_change(kappa, lift.window))
        expected = kappa.map_matrix(lift.mu).map(F2.reduce_to_R, ring=residue)
        assert image == HodgeFiltration.graph(residue, 1, 1, expected)
        assert image.rank == lift.filtration.rank == 1
        assert image != hodge_filtration(base_change(kappa, lifted))


def test_hodge_lifts_without_off_diagonal(ctx, rng):
    lifted = lift_step(ctx, random_window(ctx.target, 1, 0, rng))
    assert len(enumerate_hodge_lifts(ctx, lifted)) == 1


def test_trivial_hodge_lift_keeps_the_matrix(ctx, rng):
    w = random_window(ctx.frame, 1, 1, rng)
    assert hodge_deform(ctx, w).window.A == w.A


def test_hodge_deform_rejects_bad_lifts(ctx, rng):
    w = random_window(ctx.frame, 1, 1, rng)
    ring = ctx.source.ring
    with pytest.raises(NotASummandLift):
        hodge_deform(ctx, w, MatrixOverS.from_rows(ring, [[ring.one()]]))
    with pytest.raises(RankMismatch):
        hodge_deform(ctx, w, MatrixOverS.zeros(ring, 2, 1))


def test_kappa_ladder(rng):
    upper = breuil_tower(3, E, [2, 1], budget=3)[0]
    w = random_window(upper, 1, 1, rng)
    report = kappa_ladder_step(3, E, 1, w, budget=3, samples=2, rng=rng)
    assert report.title == "ladder a=1"
    for name in (
        "ladder-ring",
        "ladder-unit",
        "f1-kills-kappa-kernel",
        "base-change-paths",
        "hodge-lift-counts",
        "hodge-equivariant",
        "hodge-bijection",
    ):
        assert name in report
    assert report.passed, report.render()


def test_kappa_ladder_needs_the_upper_frame(rng):
    lower = breuil_tower(3, E, [2, 1], budget=3)[1]
    with pytest.raises(SpecMismatch):
        kappa_ladder_step(3, E, 1, random_window(lower, 1, 1, rng), budget=3)


@pytest.fixture
def hom_windows():
    b = build_breuil_frame(3, E, 1, N=3)
    dieudonne = build_dieudonne_frame(breuil_residue_ring(3, E, 1), 3)
    one = MatrixOverS.identity(b.ring, 1)
    etale = window_from_normal_decomposition(b, 0, 1, one)
    multiplicative = window_from_normal_decomposition(b, 1, 0, one)
    return etale, multiplicative, kappa_morphism(b, dieudonne)


def test_hom_set_of_etale_window(hom_windows):
    etale, multiplicative, _ = hom_windows
    assert len(hom_set(etale, etale)) == 27
    assert list(hom_set(etale, multiplicative)) == [str(MatrixOverS.zeros(etale.frame.ring, 1, 1))]


def test_faithfulness_probe(hom_windows):
    etale, multiplicative, kappa = hom_windows
    report = faithfulness_probe(etale, etale, kappa)
    assert report.header["homs"] == "27 -> 27"
    assert report.passed, report.render()
    report = faithfulness_probe(etale, multiplicative, kappa)
    assert report.header["homs"] == "1 -> 1"
    assert report.passed, report.render()


def test_faithfulness_probe_limit(hom_windows):
    etale, _, kappa = hom_windows
    with pytest.raises(BudgetExhausted):
        faithfulness_probe(etale, etale, kappa, limit=10)


def test_hom_set_needs_one_frame(hom_windows):
    etale, _, kappa = hom_windows
    with pytest.raises(SpecMismatch):
        hom_set(etale, base_change(kappa, etale))
