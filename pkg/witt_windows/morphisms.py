"""u-morphisms of frames, the canonical morphism to Dieudonné frames, and C_n ≅ B_1."""

from dataclasses import dataclass
from logging import getLogger
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .errors import BadEisenstein, NotAUnit, PrecisionExhausted, SpecMismatch
from .frames import (
    BreuilFrame,
    CFrame,
    DerivedFrame,
    DieudonneFrame,
    DistinguishedFrame,
    Frame,
    IdealElement,
)
from .matrix import MatrixOverS
from .report import Report
from .ring import RingSpec, TruncatedSeries
from .witt import WittRing, WittVector, agree, divide_by_p_power, solve_ghost_lifts


log = getLogger("witt-windows")


@dataclass(frozen=True, eq=False)
class FrameMorphism:
    """A u-morphism α: F -> F' with f'α = αf and f1'α = u·αf1.

    Parameters
    ----------
    source, target : Frame
    ring_map : callable
        The ring homomorphism S -> S'.
    ideal_map : callable
        Sends ideal elements of the source to ideal elements of the target
        (values map by ``ring_map``; the witness is carried along).
    unit : element of S'
        The twisting unit u.
    name : str
        Label used in reports.
    """

    source: Frame
    target: Frame
    ring_map: Callable[[Any], Any]
    ideal_map: Callable[[IdealElement], IdealElement]
    unit: Any
    name: str = "alpha"

    def __call__(self, x: Any) -> Any:
        return self.ring_map(x)

    def map_matrix(self, m: MatrixOverS) -> MatrixOverS:
        """Apply the ring map entrywise."""
        return m.map(self.ring_map, ring=self.target.ring)

    def then(self, beta: "FrameMorphism") -> "FrameMorphism":
        """The composite β∘α."""
        return compose(self, beta)


def identity_morphism(frame: Frame) -> FrameMorphism:
    """The identity 1-morphism."""
    return FrameMorphism(frame, frame, lambda x: x, lambda a: a, frame.ring.one(), "id")


def compose(alpha: FrameMorphism, beta: FrameMorphism) -> FrameMorphism:
    """β∘α, a (β(u_α)·u_β)-morphism."""
    if alpha.target != beta.source:
        raise SpecMismatch(f"cannot compose {alpha.name} into {beta.name}: frames differ")
    return FrameMorphism(
        alpha.source,
        beta.target,
        lambda x: beta.ring_map(alpha.ring_map(x)),
        lambda a: beta.ideal_map(alpha.ideal_map(a)),
        beta(alpha.unit) * beta.unit,
        f"{beta.name} o {alpha.name}",
    )


# -- projections between levels ----------------------------------------------


def projection_morphism(upper: Frame, lower: Frame, name: str = "proj") -> FrameMorphism:
    """The 1-morphism induced by a coefficientwise quotient S -> S'.

    Covers B_{a+1} -> B_a, C_n -> C_m, F_{R_{a+1}} -> F_{R_a}, and the
    second factor B' -> B_a, F' -> F_{R_a} of a deformation.
    """
    if isinstance(upper, DerivedFrame):
        base = projection_morphism(upper.parent, lower, name)

        def derived_ideal_map(a: IdealElement) -> IdealElement:
            i, _ = a.witness
            return base.ideal_map(i)

        return FrameMorphism(upper, lower, base.ring_map, derived_ideal_map, lower.ring.one(), name)

    if isinstance(upper, DistinguishedFrame) and isinstance(lower, DistinguishedFrame):
        target = lower.ring
        if not target.is_quotient_of(upper.ring):
            raise SpecMismatch(f"{target.describe()} is not a quotient of {upper.ring.describe()}")
        if upper.generator.quotient_map(target) != lower.generator:
            raise SpecMismatch("the distinguished generators do not correspond")
        return FrameMorphism(
            upper,
            lower,
            lambda x: x.quotient_map(target),
            lambda a: lower.from_witness(a.witness.quotient_map(target)),
            target.one(),
            name,
        )

    if isinstance(upper, DieudonneFrame) and isinstance(lower, DieudonneFrame):
        base = lower.ring.base
        if not base.is_quotient_of(upper.ring.base) or lower.budget > upper.budget:
            raise SpecMismatch(f"{lower.ring.describe()} is not a quotient of {upper.ring.describe()}")
        length = lower.budget

        def witt_map(x: WittVector) -> WittVector:
            return x.map_coordinates(base).truncate(min(length, x.length))

        return FrameMorphism(
            upper,
            lower,
            witt_map,
            lambda a: lower.ideal_element(witt_map(a.value)),
            lower.ring.one(),
            name,
        )

    raise SpecMismatch(f"no projection from a {upper.kind} frame to a {lower.kind} frame")


def deformation_inclusion(frame: Frame, derived: DerivedFrame, name: str = "alpha1") -> FrameMorphism:
    """The 1-morphism F -> F'' that is the identity on S and enlarges I to I + 𝔞."""
    if derived.parent != frame:
        raise SpecMismatch("the deformation frame is not derived from this frame")
    zero = derived.kernel.zero()
    return FrameMorphism(
        frame, derived, lambda x: x, lambda a: derived.combine(a, zero), frame.ring.one(), name
    )


# -- the canonical morphism into Dieudonné frames ------------------------------


def _frobenius_power_into(x: TruncatedSeries, k: int, target: RingSpec) -> TruncatedSeries:
    """f^k of the integer lift of ``x``, evaluated directly in ``target``."""
    q = x.spec.p**k
    return target.element({tuple(e * q for e in exp): c for exp, c in x.terms})


def kappa_image(x: TruncatedSeries, target: WittRing) -> WittVector:
    """κ(x) in W_n(R): the Witt vector with ghost components f^i(x) mod (E or p).

    Requires the precision of ``x`` to be at least N_R + n - 1, otherwise
    κ is not well defined on the truncated coefficients.
    """
    base = target.base
    if x.spec.variables != base.variables:
        raise SpecMismatch(f"variables {x.spec.variables} do not match {base.variables}")
    if x.spec.N < base.N + target.length - 1:
        raise PrecisionExhausted(
            f"kappa into {target.describe()} needs precision >= {base.N + target.length - 1}, "
            f"got {x.spec.N}"
        )
    lift = base.with_precision(target.headroom)
    ghosts = [_frobenius_power_into(x, k, lift) for k in range(target.length)]
    coords = solve_ghost_lifts(ghosts)
    return WittVector(base, tuple(c.quotient_map(base) for c in coords))


def kappa_unit(frame: BreuilFrame, target: WittRing) -> WittVector:
    """The unit u with κ(f(E)) = p·u, computed from the ghost components f^{i+1}(E)/p."""
    base = target.base
    lift = base.with_precision(target.headroom)
    t_count = len(base.t_truncs)
    ghosts = []
    for k in range(target.length):
        q = frame.p ** (k + 1)
        coefficients = {(i * q,) + (0,) * t_count: c for i, c in enumerate(frame.eisenstein)}
        coefficients[(frame.e * q,) + (0,) * t_count] = 1
        try:
            ghosts.append(divide_by_p_power(lift.element(coefficients), 1))
        except PrecisionExhausted as e:
            raise NotAUnit(f"f(E) is not divisible by p in {lift.describe()}") from e
    coords = solve_ghost_lifts(ghosts)
    unit = WittVector(base, tuple(c.quotient_map(base) for c in coords))
    if not unit.is_unit():
        raise NotAUnit(f"kappa(f(E))/p = {unit} is not a unit")
    if unit * frame.p != kappa_image(frame.pi, target):
        raise NotAUnit(f"p * {unit} != kappa(f(E))")
    log.debug(f"kappa unit {unit} in {target.describe()}")
    return unit


def _plain(frame: Frame) -> Frame:
    return frame.parent if isinstance(frame, DerivedFrame) else frame


def kappa_morphism(source: Frame, target: Frame, name: str = "kappa") -> FrameMorphism:
    """The canonical u-morphism κ from a Breuil or C frame to a Dieudonné frame.

    ``source`` is B_a, C_n or a Breuil deformation frame B'; ``target`` is
    F_{R} or a Dieudonné deformation frame F' over the same R. κ sends
    coefficients through the diagonal section and the variables to their
    Teichmüller representatives.
    """
    src, tgt = _plain(source), _plain(target)
    if not isinstance(tgt, DieudonneFrame) or not isinstance(src, (BreuilFrame, CFrame)):
        raise SpecMismatch(f"no canonical morphism from {source.kind} to {target.kind}")
    witt = tgt.ring
    if src.residue_ring != witt.base:
        raise SpecMismatch(
            f"residue rings differ: {src.residue_ring.describe()} vs {witt.base.describe()}"
        )
    if isinstance(source, DerivedFrame) and not isinstance(target, DerivedFrame):
        raise SpecMismatch("a deformation frame maps only to a deformation frame")

    def ring_map(x: TruncatedSeries) -> WittVector:
        return kappa_image(x, witt)

    unit = kappa_unit(src, witt) if isinstance(src, BreuilFrame) else witt.one()

    def ideal_map(a: IdealElement) -> IdealElement:
        if isinstance(target, DerivedFrame):
            if isinstance(source, DerivedFrame):
                i, k = a.witness
                return target.combine(tgt.ideal_element(ring_map(i.value)), ring_map(k))
            return target.combine(tgt.ideal_element(ring_map(a.value)), target.kernel.zero())
        return tgt.ideal_element(ring_map(a.value))

    log.info(f"kappa {source.kind} -> {target.kind} with unit {unit}")
    return FrameMorphism(source, target, ring_map, ideal_map, unit, name)


# -- C_n and B_1 -----------------------------------------------------------------


def _c_b1_data(c: CFrame, b: BreuilFrame):
    if b.level != 1:
        raise SpecMismatch(f"C_n is isomorphic to B_1, not B_{b.level}")
    if c.p != b.p or c.ring.N != b.ring.N:
        raise SpecMismatch("C_n and B_1 must share p and N")
    if c.n != b.ring.t_truncs + (b.e,):
        raise SpecMismatch(f"n = {c.n} must be the t truncations of B_1 followed by e = {b.e}")
    t_count = len(b.ring.t_truncs)
    w = b.ring.element(
        {(i,) + (0,) * t_count: a // b.p for i, a in enumerate(b.eisenstein)}
    )
    if w * b.p != b.generator:
        raise BadEisenstein(f"E = {b.generator} is not p * ({w}) in {b.ring.describe()}")
    v = b.f(w)
    if not v.is_unit() or v * b.p != b.pi:
        raise NotAUnit(f"f(E) = {b.pi} is not p times the unit {v}")
    return f"t{t_count + 1}", w, v


def c_to_b1_iso(c: CFrame, b: BreuilFrame) -> FrameMorphism:
    """The v^{-1}-isomorphism C_n -> B_1 renaming t_{r+1} to u, where f(E) = v·p."""
    last, w, v = _c_b1_data(c, b)
    w_inv = w.invert_unit()

    def ring_map(x: TruncatedSeries) -> TruncatedSeries:
        return x.map_into(b.ring, rename={last: "u"})

    return FrameMorphism(
        c,
        b,
        ring_map,
        lambda a: b.from_witness(w_inv * ring_map(a.witness)),
        v.invert_unit(),
        "c_to_b1",
    )


def b1_to_c_iso(b: BreuilFrame, c: CFrame) -> FrameMorphism:
    """The inverse v-isomorphism B_1 -> C_n."""
    last, w, v = _c_b1_data(c, b)

    def ring_map(x: TruncatedSeries) -> TruncatedSeries:
        return x.map_into(c.ring, rename={"u": last})

    return FrameMorphism(
        b,
        c,
        ring_map,
        lambda a: c.from_witness(ring_map(w * a.witness)),
        ring_map(v),
        "b1_to_c",
    )


# -- checks ------------------------------------------------------------------------


def check_frame_morphism(
    alpha: FrameMorphism, samples: int = 5, rng: Optional[np.random.Generator] = None
) -> Report:
    """Verify the u-morphism identities on generators and random samples."""
    rng = rng if rng is not None else np.random.default_rng(0)
    source, target = alpha.source, alpha.target
    report = Report(f"morphism-check {alpha.name}", {"source": source.kind, "target": target.kind})
    report.check("unit", alpha.unit.is_unit(), f"{alpha.unit} is not a unit")
    elements = source.ring_generators() + [source.random(rng) for _ in range(samples)]
    for x in elements:
        report.guard(
            "frobenius-compatible",
            lambda: agree(target.f(alpha(x)), alpha(source.f(x))),
            lambda: f"f'(alpha({x})) != alpha(f({x}))",
        )
    for _ in range(samples):
        x, y = source.random(rng), source.random(rng)
        report.guard(
            "ring-hom",
            lambda: alpha(x * y) == alpha(x) * alpha(y) and alpha(x + y) == alpha(x) + alpha(y),
            lambda: f"x = {x}, y = {y}",
        )
    ideal = source.ideal_generators() + [source.sample_ideal(rng) for _ in range(samples)]
    for a in ideal:

        def ideal_ok() -> bool:
            b = alpha.ideal_map(a)
            return b.value == alpha(a.value) and target.in_ideal(b.value)

        def twist_ok() -> bool:
            b = alpha.ideal_map(a)
            return agree(target.f1(b), alpha.unit * alpha(source.f1(a)))

        report.guard("ideal-image", ideal_ok, lambda: f"alpha({a}) is not in I'")
        report.guard("f1-twist", twist_ok, lambda: f"f1'(alpha({a})) != u * alpha(f1({a}))")
    return report


def check_commutes(
    path1: Sequence[FrameMorphism],
    path2: Sequence[FrameMorphism],
    samples: int = 5,
    rng: Optional[np.random.Generator] = None,
    name: str = "square",
) -> Report:
    """Compare two composable paths with the same ends on generators and samples.

    The composite ring maps must agree, and so must the composite units.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    first = path1[0]
    for alpha in path1[1:]:
        first = compose(first, alpha)
    second = path2[0]
    for alpha in path2[1:]:
        second = compose(second, alpha)
    report = Report(f"commutes {name}", {"path1": first.name, "path2": second.name})
    source = first.source
    elements = source.ring_generators() + [source.random(rng) for _ in range(samples)]
    for x in elements:
        report.guard(f"{name}-ring", lambda: first(x) == second(x), lambda: f"paths differ on {x}")
    report.check(f"{name}-unit", first.unit == second.unit, lambda: f"{first.unit} != {second.unit}")
    return report
