"""Seeded acceptance suite.

Every criterion is a function ``(size, rng) -> Report``; :func:`run_selftest`
runs them in order on one generator seeded from the job seed, so the
rendered report is a deterministic function of ``(seed, tier)``.
"""

from dataclasses import dataclass
from logging import getLogger
from typing import Callable, List, Tuple

import numpy as np

from .crystalline import (
    Perturbation,
    as_deformation_window,
    breuil_chain,
    dieudonne_chain,
    enumerate_hodge_lifts,
    enumerate_iso_solutions,
    faithfulness_probe,
    hodge_change_of_basis,
    kappa_ladder_step,
    lift_step,
    reduce_to_squarezero,
    unique_iso_solver,
)
from .errors import WittWindowsError
from .frames import (
    breuil_residue_ring,
    breuil_tower,
    build_breuil_frame,
    build_c_frame,
    build_dieudonne_frame,
    check_frame_axioms,
)
from .matrix import MatrixOverS
from .morphisms import (
    b1_to_c_iso,
    c_to_b1_iso,
    check_frame_morphism,
    compose,
    kappa_image,
    kappa_morphism,
    kappa_unit,
    projection_morphism,
)
from .report import Report
from .ring import RingSpec
from .windows import (
    base_change,
    check_window_morphism,
    random_window,
    window_from_normal_decomposition,
)
from .witt import WittRing, WittVector, ghost_from_lifts, solve_ghost_lifts, teichmuller


log = getLogger("witt-windows")

#: E = u + 3 and E = u^2 + 3u + 3 at p = 3.
EISENSTEIN_LINEAR = (3,)
EISENSTEIN_QUADRATIC = (3, 3)


@dataclass(frozen=True)
class TierSize:
    """Sample counts and instance sizes of one tier."""

    witt_pairs: int
    witt_lengths: Tuple[int, ...]
    frame_samples: int
    breuil_levels: Tuple[int, ...]
    dieudonne_budget: int
    perturbations: int
    solver_ranks: Tuple[Tuple[int, int], ...]
    ladder_levels: Tuple[int, ...]
    brute_force_rank: Tuple[int, int]


TIERS = {
    "smoke": TierSize(
        witt_pairs=10,
        witt_lengths=(2, 3),
        frame_samples=2,
        breuil_levels=(1, 2),
        dieudonne_budget=3,
        perturbations=2,
        solver_ranks=((1, 1),),
        ladder_levels=(1,),
        brute_force_rank=(1, 0),
    ),
    "small": TierSize(
        witt_pairs=200,
        witt_lengths=(2, 3, 4),
        frame_samples=10,
        breuil_levels=(1, 2, 3),
        dieudonne_budget=5,
        perturbations=100,
        solver_ranks=((1, 1), (2, 1)),
        ladder_levels=(1, 2),
        brute_force_rank=(1, 1),
    ),
}


def witt_soundness(size: TierSize, rng: np.random.Generator) -> Report:
    """Ghost map, ghost solving, f∘v and Teichmüller representatives."""
    report = Report("witt")
    for p in (2, 3):
        for base in (RingSpec(p, 6), RingSpec(p, 4, (), 3)):
            for length in size.witt_lengths:
                ring = WittRing(base, length)
                for _ in range(size.witt_pairs):
                    _witt_pair(report, ring, rng)
    return report


def _witt_pair(report: Report, ring: WittRing, rng: np.random.Generator):
    x, y = ring.random(rng), ring.random(rng)
    gx, gy = x.ghost(), y.ghost()
    where = f"{ring.describe()}: x = {x}, y = {y}"
    report.guard(
        "ghost-additive", lambda: (x + y).ghost() == [a + b for a, b in zip(gx, gy)], where
    )
    report.guard(
        "ghost-multiplicative", lambda: (x * y).ghost() == [a * b for a, b in zip(gx, gy)], where
    )

    def roundtrip() -> bool:
        lifts = [c.lift(ring.headroom) for c in x.coords]
        coords = solve_ghost_lifts(ghost_from_lifts(lifts))
        return WittVector(ring.base, tuple(c.quotient_map(ring.base) for c in coords)) == x

    report.guard("ghost-roundtrip", roundtrip, where)
    report.guard("f-v-is-p", lambda: x.verschiebung().frobenius() == x * ring.p, where)
    a, b = ring.base.random(rng), ring.base.random(rng)
    report.guard(
        "teichmuller-multiplicative",
        lambda: teichmuller(a * b, ring.length) == teichmuller(a, ring.length) * teichmuller(b, ring.length),
        f"a = {a}, b = {b}",
    )


def frame_axioms(size: TierSize, rng: np.random.Generator) -> Report:
    """The π-relation, the unit witness and f1 laws on every frame kind."""
    report = Report("frames")
    for eisenstein in (EISENSTEIN_LINEAR, EISENSTEIN_QUADRATIC):
        for a in size.breuil_levels:
            frame = build_breuil_frame(3, eisenstein, a)
            report.extend(check_frame_axioms(frame, size.frame_samples, rng), f"B{a}")
            base = breuil_residue_ring(3, eisenstein, a)
            dieudonne = build_dieudonne_frame(base, size.dieudonne_budget)
            report.extend(check_frame_axioms(dieudonne, size.frame_samples, rng), f"F{a}")
    for n in ((1,), (2,), (1, 2)):
        frame = build_c_frame(n, 3, 3)
        report.extend(check_frame_axioms(frame, size.frame_samples, rng), "C")
    return report


def _solver_cases():
    yield "breuil", breuil_chain(3, EISENSTEIN_LINEAR, [2, 1])[0]
    yield "dieudonne", dieudonne_chain(3, [2, 1], eisenstein=EISENSTEIN_LINEAR)[0]


def unique_solver(size: TierSize, rng: np.random.Generator) -> Report:
    """Solver output is a morphism congruent to 1, unique on enumerable instances."""
    report = Report("solver")
    for name, ctx in _solver_cases():
        for d_L, d_T in size.solver_ranks:
            w = random_window(ctx.frame, d_L, d_T, rng)
            for _ in range(size.perturbations):
                pert = Perturbation.random(ctx, as_deformation_window(ctx, w), rng)

                def solved() -> bool:
                    g = unique_iso_solver(ctx, w, pert)
                    one = MatrixOverS.identity(g.matrix.ring, g.matrix.nrows)
                    congruent = all(ctx.in_kernel(x) for row in (g.matrix - one).entries for x in row)
                    return congruent and check_window_morphism(g, 1, rng).passed

                report.guard(f"{name}-solution", solved, lambda: f"w = {w}, eta = {pert.eta}, eps = {pert.epsilon}")
    _brute_force(report, "breuil", _tiny_breuil_context(), size.brute_force_rank, rng)
    _brute_force(report, "dieudonne", dieudonne_chain(3, [2, 1], budget=2)[0], size.brute_force_rank, rng)
    return report


def _tiny_breuil_context():
    """B_2 -> B_1 over Z/9, where the kernel u·S has nine elements."""
    upper = build_breuil_frame(3, EISENSTEIN_LINEAR, 2, N=2)
    lower = build_breuil_frame(3, EISENSTEIN_LINEAR, 1, N=2)
    return reduce_to_squarezero([upper, lower])[0]


def _brute_force(report: Report, name: str, ctx, rank: Tuple[int, int], rng: np.random.Generator):
    w = random_window(ctx.frame, *rank, rng)
    pert = Perturbation.random(ctx, as_deformation_window(ctx, w), rng)

    def unique() -> bool:
        g = unique_iso_solver(ctx, w, pert)
        solutions = enumerate_iso_solutions(ctx, w, pert)
        return len(solutions) == 1 and solutions[0].agrees_with(g.matrix)

    report.guard(f"{name}-unique", unique, lambda: f"w = {w}, eta = {pert.eta}, eps = {pert.epsilon}")


def hodge_deformation(size: TierSize, rng: np.random.Generator) -> Report:
    """Lift-then-reduce is the identity and Hodge lifts are counted exactly."""
    report = Report("hodge")
    for name, ctx in _solver_cases():
        projection = projection_morphism(ctx.frame, ctx.target)
        for d_L, d_T in size.solver_ranks:
            w = random_window(ctx.target, d_L, d_T, rng)

            def reduces() -> bool:
                return base_change(projection, lift_step(ctx, w)).A == w.A

            report.guard(f"{name}-lift-reduces", reduces, lambda: f"w = {w}")
        lifted = lift_step(ctx, random_window(ctx.target, 1, 1, rng))
        lifts = enumerate_hodge_lifts(ctx, lifted)
        expected = len(ctx.source.kernel_representatives())
        report.check(f"{name}-lift-count", len(lifts) == expected, f"{len(lifts)} lifts, expected {expected}")
        filtrations = [lift.filtration for lift in lifts]
        report.check(
            f"{name}-lifts-distinct",
            all(filtrations.index(h) == i for i, h in enumerate(filtrations)),
            "two Hodge lifts give the same filtration",
        )
        for lift in lifts:
            report.guard(
                f"{name}-lift-reduces-to-w",
                lambda: base_change(projection, lift.window).A == base_change(projection, lifted).A,
                lambda: f"mu = {lift.mu}",
            )
            report.guard(
                f"{name}-change-of-basis",
                lambda: check_window_morphism(hodge_change_of_basis(ctx, lifted, lift), 1, rng).passed,
                lambda: f"mu = {lift.mu}",
            )
    ctx = dieudonne_chain(3, [2, 1], eisenstein=EISENSTEIN_LINEAR)[0]
    lifts = enumerate_hodge_lifts(ctx, lift_step(ctx, random_window(ctx.target, 1, 1, rng)))
    report.check("three-lifts-over-Z9", len(lifts) == 3, f"{len(lifts)} lifts")
    return report


def kappa_ladder(size: TierSize, rng: np.random.Generator) -> Report:
    """The ladder of κ between levels a + 1 and a, and the unit of κ(f(E))."""
    report = Report("ladder")
    budget = 3
    for a in size.ladder_levels:
        upper = breuil_tower(3, EISENSTEIN_LINEAR, [a + 1, a], budget=budget)[0]
        for d_L, d_T in size.solver_ranks:
            w = random_window(upper, d_L, d_T, rng)
            step = kappa_ladder_step(3, EISENSTEIN_LINEAR, a, w, budget, samples=size.frame_samples, rng=rng)
            report.extend(step, f"a{a}")
    frame = build_breuil_frame(3, EISENSTEIN_LINEAR, 1, budget=budget)
    witt = WittRing(frame.residue_ring, budget)

    def unit_residue() -> bool:
        unit = kappa_unit(frame, witt)
        a0 = EISENSTEIN_LINEAR[0]
        # E = u + a0 and u = -a0 in R_1, so f(E)/p = ((-a0)^p + a0)/p there
        expected = (((-a0) ** 3 + a0) // 3) % 3
        return unit.residue() == expected and unit * 3 == kappa_image(frame.pi, witt)

    report.guard("kappa-unit", unit_residue, "kappa(f(E)) != p * unit with the expected residue")
    return report


def c_frame_base_case(size: TierSize, rng: np.random.Generator) -> Report:
    """κ on C_(1) is a ring isomorphism, and C_n ≅ B_1 round-trips."""
    report = Report("cframe")
    length = 3
    c = build_c_frame((1,), 3, length)
    dieudonne = build_dieudonne_frame(c.residue_ring, length)
    kappa = kappa_morphism(c, dieudonne, "kappa_c")
    report.extend(check_frame_morphism(kappa, size.frame_samples, rng), "kappa")
    images = {str(kappa(x)) for x in c.ring.elements()}
    witt_elements = {str(x) for x in dieudonne.ring.elements()}
    report.check(
        "kappa-bijective",
        images == witt_elements and len(images) == c.ring.size,
        f"{len(images)} distinct images of {c.ring.size} elements, {len(witt_elements)} Witt vectors",
    )
    for eisenstein, n in ((EISENSTEIN_LINEAR, (1,)), (EISENSTEIN_QUADRATIC, (2,))):
        b = build_breuil_frame(3, eisenstein, 1, N=3)
        cn = build_c_frame(n, 3, 3)
        there, back = c_to_b1_iso(cn, b), b1_to_c_iso(b, cn)
        report.extend(check_frame_morphism(there, size.frame_samples, rng), "c-to-b1")
        report.extend(check_frame_morphism(back, size.frame_samples, rng), "b1-to-c")
        for first, second, frame in ((there, back, cn), (back, there, b)):
            loop = compose(first, second)
            for x in frame.ring_generators():
                report.guard("roundtrip", lambda: loop(x) == x, lambda: f"{loop.name} moves {x}")
            report.check("roundtrip-unit", loop.unit == 1, lambda: f"{loop.name} has unit {loop.unit}")
    return report


def faithfulness(size: TierSize, rng: np.random.Generator) -> Report:
    """Hom sets over B_1 and over F_{R_1} agree through κ at S = Z/27."""
    report = Report("homprobe")
    b = build_breuil_frame(3, EISENSTEIN_LINEAR, 1, N=3)
    dieudonne = build_dieudonne_frame(breuil_residue_ring(3, EISENSTEIN_LINEAR, 1), 3)
    kappa = kappa_morphism(b, dieudonne)
    one = MatrixOverS.identity(b.ring, 1)
    etale = window_from_normal_decomposition(b, 0, 1, one)
    multiplicative = window_from_normal_decomposition(b, 1, 0, one)
    report.extend(faithfulness_probe(etale, etale, kappa), "et-et")
    report.extend(faithfulness_probe(etale, multiplicative, kappa), "et-mult")
    return report


Criterion = Callable[[TierSize, np.random.Generator], Report]

CRITERIA: List[Tuple[str, Criterion]] = [
    ("witt", witt_soundness),
    ("frames", frame_axioms),
    ("solver", unique_solver),
    ("hodge", hodge_deformation),
    ("ladder", kappa_ladder),
    ("cframe", c_frame_base_case),
    ("homprobe", faithfulness),
]


def run_selftest(seed: int = 1, tier: str = "smoke") -> Report:
    """Run every criterion at ``tier`` twice and check that both reports render alike."""
    if tier not in TIERS:
        raise ValueError(f"tier must be one of {sorted(TIERS)}: {tier!r}")
    report = _run_criteria(seed, tier)
    again = _run_criteria(seed, tier)
    report.check(
        "determinism", report.render() == again.render(), "two runs with one seed rendered differently"
    )
    return report


def _run_criteria(seed: int, tier: str) -> Report:
    size = TIERS[tier]
    report = Report("selftest", {"seed": seed, "tier": tier})
    rng = np.random.default_rng(seed)
    for name, criterion in CRITERIA:
        log.info(f"selftest criterion {name}")
        report.extend(_run_criterion(name, criterion, size, rng), name)
    return report


def _run_criterion(name: str, criterion: Criterion, size: TierSize, rng: np.random.Generator) -> Report:
    try:
        return criterion(size, rng)
    except WittWindowsError as e:
        log.warning(f"selftest criterion {name} aborted: {e}")
        report = Report(name)
        report.check("runs", False, f"{type(e).__name__}: {e}")
        return report
