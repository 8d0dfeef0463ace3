"""Crystalline lifting of windows along square-zero thickenings.

A lifting step is a :class:`SquareZeroContext`: a plain frame F over S, the
deformation frame F'' = (S, I + 𝔞, ...) derived from it and the plain frame
F' over S/𝔞 it projects to. Windows over F' lift uniquely (up to unique
isomorphism) to F''; windows over F correspond to windows over F'' together
with a lift of the Hodge filtration.
"""

import itertools

from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BudgetExhausted,
    CertificateViolation,
    IdealNotSquareZero,
    NotASummandLift,
    NotInIdeal,
    PrecisionExhausted,
    RankMismatch,
    RingNotFinite,
    SpecMismatch,
)
from .frames import (
    BreuilFrame,
    DerivedFrame,
    DieudonneFrame,
    DistinguishedFrame,
    Frame,
    IdealElement,
    apply_rule,
    breuil_deformation,
    breuil_tower,
    dieudonne_deformation,
    dieudonne_tower,
)
from .matrix import MatrixOverS
from .morphisms import (
    FrameMorphism,
    check_commutes,
    check_frame_morphism,
    deformation_inclusion,
    identity_morphism,
    kappa_morphism,
    projection_morphism,
)
from .report import Report
from .ring import ENUMERATION_LIMIT
from .windows import (
    HodgeFiltration,
    Window,
    WindowMorphism,
    base_change,
    check_window_morphism,
    direct_sum,
    graph_automorphism,
    graph_block,
    hodge_filtration,
    window_from_normal_decomposition,
)
from .witt import WittVector, log_vector


log = getLogger("witt-windows")


@dataclass(frozen=True, eq=False)
class SquareZeroContext:
    """One certified lifting step F -> F'' -> F'.

    Attributes
    ----------
    source : DerivedFrame
        F'' over S with ideal I + 𝔞.
    target : Frame
        The plain frame F' over S/𝔞.
    projection : FrameMorphism
        The 1-morphism F'' -> F'.
    nu : int
        Nilpotency index of f1'' on 𝔞.
    """

    source: DerivedFrame
    target: Frame
    projection: FrameMorphism
    nu: int

    @property
    def frame(self) -> Frame:
        """The plain frame F over S."""
        return self.source.parent

    @property
    def kernel(self) -> Any:
        """The kernel 𝔞."""
        return self.source.kernel

    def section(self, x: Any) -> Any:
        """A set-theoretic lift of an element of S/𝔞 to S."""
        ring = self.source.ring
        if isinstance(x, WittVector):
            return x.lift_coordinates(ring.base)
        return x.map_into(ring)

    def in_kernel(self, x: Any) -> bool:
        """Membership in 𝔞."""
        return self.kernel.contains(x)

    def rule(self, x: Any) -> Any:
        """f1'' on an element of 𝔞."""
        return apply_rule(self.source.rule, x)


@dataclass(frozen=True)
class Perturbation:
    """The difference [η | ε] of two structural matrices, entries in 𝔞.

    η is the L-block of columns, ε the T-block.
    """

    eta: MatrixOverS
    epsilon: MatrixOverS

    @classmethod
    def random(
        cls, ctx: SquareZeroContext, w: Window, rng: np.random.Generator
    ) -> "Perturbation":
        """A random perturbation of ``w``."""

        def block(ncols: int) -> MatrixOverS:
            rows = [[ctx.kernel.random(rng) for _ in range(ncols)] for _ in range(w.rank)]
            return MatrixOverS(ctx.source.ring, tuple(tuple(r) for r in rows))

        return cls(block(w.d_L), block(w.d_T))

    @classmethod
    def between(cls, ctx: SquareZeroContext, w1: Window, w2: Window) -> "Perturbation":
        """The perturbation carrying w1 to w2."""
        delta = w2.A - w1.A
        return cls(
            delta.submatrix(range(w1.rank), range(w1.d_L)),
            delta.submatrix(range(w1.rank), range(w1.d_L, w1.rank)),
        )

    def column(self, j: int, d_L: int) -> List[Any]:
        """Column j of [η | ε]."""
        return self.eta.column(j) if j < d_L else self.epsilon.column(j - d_L)

    def validate(self, ctx: SquareZeroContext, w: Window):
        """Check shapes and that every entry lies in 𝔞."""
        if self.eta.nrows not in (0, w.rank) or self.epsilon.nrows not in (0, w.rank):
            raise RankMismatch(f"perturbation rows do not match rank {w.rank}")
        for j in range(w.rank):
            column = self.column(j, w.d_L)
            if len(column) != w.rank:
                raise RankMismatch(f"perturbation column {j} has {len(column)} entries")
            for x in column:
                if not ctx.in_kernel(x):
                    raise NotInIdeal(f"perturbation entry {x} is not in {ctx.kernel.name}")

    def apply(self, w: Window) -> Window:
        """The window with structural matrix A + [η | ε] over the same frame."""
        columns = [
            [a + d for a, d in zip(w.A.column(j), self.column(j, w.d_L))] for j in range(w.rank)
        ]
        A = MatrixOverS.from_columns(w.frame.ring, columns) if w.rank else w.A
        return window_from_normal_decomposition(w.frame, w.d_L, w.d_T, A)


# -- reduction to square-zero steps --------------------------------------------------


def _deformation(upper: Frame, lower: Frame) -> DerivedFrame:
    if isinstance(upper, BreuilFrame) and isinstance(lower, BreuilFrame):
        return breuil_deformation(upper, lower.level)
    if isinstance(upper, DieudonneFrame) and isinstance(lower, DieudonneFrame):
        return dieudonne_deformation(upper, lower.ring.base.N)
    raise SpecMismatch(f"no deformation from a {upper.kind} frame to a {lower.kind} frame")


def reduce_to_squarezero(frames: Sequence[Frame]) -> List[SquareZeroContext]:
    """The chain of certified square-zero steps between consecutive frames.

    ``frames`` runs from the top level down, e.g. B_3, B_2, B_1. The chain
    is returned in the same order.

    Raises
    ------
    CertificateViolation
        If some step's kernel is not square-zero, is not killed by f, or
        carries an f1 extension that is not nilpotent.
    """
    chain = []
    for upper, lower in zip(frames, frames[1:]):
        try:
            derived = _deformation(upper, lower)
        except IdealNotSquareZero as e:
            raise CertificateViolation(f"step {upper.describe()!r} -> {lower.kind}: {e}") from e
        certificate = derived.certificate
        if not certificate.certified:
            raise CertificateViolation(
                f"kernel {derived.kernel.name} fails the square-zero step conditions: {certificate}"
            )
        if derived.residue_ring != lower.residue_ring:
            raise SpecMismatch(
                f"{derived.residue_ring.describe()} is not {lower.residue_ring.describe()}"
            )
        projection = projection_morphism(derived, lower, "alpha2")
        chain.append(SquareZeroContext(derived, lower, projection, certificate.nilpotency))
        log.debug(f"square-zero step with kernel {derived.kernel.name}, nu = {certificate.nilpotency}")
    return chain


def breuil_chain(
    p: int, eisenstein: Sequence[int], levels: Sequence[int], t_truncs=(), budget: int = 3
) -> List[SquareZeroContext]:
    """reduce_to_squarezero over the Breuil frames at ``levels``."""
    return reduce_to_squarezero(breuil_tower(p, eisenstein, levels, t_truncs, budget))


def dieudonne_chain(
    p: int, levels: Sequence[int], t_truncs=(), eisenstein=None, budget: int = 3
) -> List[SquareZeroContext]:
    """reduce_to_squarezero over the Dieudonné frames at ``levels``."""
    return reduce_to_squarezero(dieudonne_tower(p, levels, t_truncs, eisenstein, budget))


# -- the unique isomorphism ---------------------------------------------------------


def as_deformation_window(ctx: SquareZeroContext, w: Window) -> Window:
    """α1_*w: a window over F read over F'' (the structural matrix is unchanged)."""
    if w.frame == ctx.source:
        return w
    if w.frame != ctx.frame:
        raise SpecMismatch("window is neither over F nor over F''")
    return base_change(deformation_inclusion(ctx.frame, ctx.source), w)


def _check_length(w: Window):
    lengths = [x.length for row in w.A.entries for x in row if isinstance(x, WittVector)]
    if lengths and min(lengths) < 2:
        raise PrecisionExhausted(f"Witt length {min(lengths)} leaves no room for f1 iterations")


def _solve_correction(
    ctx: SquareZeroContext,
    w1: Window,
    w2: Window,
    G0: MatrixOverS,
    witnesses: Dict[Tuple[int, int], IdealElement],
) -> WindowMorphism:
    """The unique g = G0 + W, W with entries in 𝔞, that is an F''-morphism w1 -> w2.

    With D the defect of G0,

        W·A1 = [D_L + A2_T·f1''(W_TL) | D_T]

    is solved by iterating from W = 0; f1'' is nilpotent on 𝔞, so the
    iteration stops within ν·d_L + 1 steps.
    """
    start = WindowMorphism(w1, w2, identity_morphism(ctx.source), G0, witnesses)
    defect = []
    for j in range(w1.d_L):
        image = w2.F1(start.map_q(w1.l_generator(j)))
        defect.append([x - y for x, y in zip(image, G0.apply(w1.A.column(j)))])
    for j in range(w1.d_L, w1.rank):
        image = w2.F(G0.column(j))
        defect.append([x - y for x, y in zip(image, G0.apply(w1.A.column(j)))])
    for j, column in enumerate(defect):
        for x in column:
            if not ctx.in_kernel(x):
                raise NotInIdeal(f"the starting map is not a morphism modulo 𝔞 (column {j}: {x})")
    return _iterate(ctx, w1, w2, G0, witnesses, defect)


def _iterate(ctx, w1, w2, G0, witnesses, defect) -> WindowMorphism:
    frame = ctx.source
    ring = frame.ring
    n, d_L = w1.rank, w1.d_L
    if n == 0:
        return WindowMorphism(w1, w2, identity_morphism(frame), G0, dict(witnesses))
    _check_length(w1)
    A_inv = w1.A.invert()
    A2_T = w2.A.submatrix(range(n), range(d_L, n))
    W = MatrixOverS.zeros(ring, n, n)
    budget = ctx.nu * d_L + 1
    for step in range(budget + 1):
        columns = []
        for j in range(d_L):
            shifted = [ctx.rule(W[d_L + i, j]) for i in range(w1.d_T)]
            correction = A2_T.apply(shifted) if w1.d_T else [ring.zero()] * n
            columns.append([x + y for x, y in zip(defect[j], correction)])
        columns.extend(defect[d_L:])
        new = MatrixOverS.from_columns(ring, columns) * A_inv
        if new.agrees_with(W):
            log.debug(f"square-zero solver converged after {step} steps")
            break
        W = new
    else:
        raise BudgetExhausted(f"no fixpoint within {budget} steps; the nilpotency certificate is false")
    matrix = G0 + W
    merged = {}
    for i in range(w2.d_T):
        for j in range(d_L):
            base = witnesses.get((i, j), frame.ideal_zero())
            merged[(i, j)] = frame.ideal_add(base, frame.from_kernel(W[w2.d_L + i, j]))
    return WindowMorphism(w1, w2, identity_morphism(frame), matrix, merged)


def _verify(ctx: SquareZeroContext, g: WindowMorphism, G0: MatrixOverS) -> WindowMorphism:
    difference = g.matrix - G0
    if not all(ctx.in_kernel(x) for row in difference.entries for x in row):
        raise CertificateViolation("the solver left the congruence class of the starting map")
    report = check_window_morphism(g, ideal_samples=1)
    if not report.passed:
        failure = report.failures()[0]
        raise CertificateViolation(f"solver output fails {failure.check}: {failure.counterexample}")
    return g


def unique_iso_solver(ctx: SquareZeroContext, w: Window, pert: Perturbation) -> WindowMorphism:
    """The unique isomorphism g ≡ 1 mod 𝔞 from w to its perturbation, over F''.

    Raises
    ------
    BudgetExhausted
        If the fixpoint iteration exceeds ν·d_L + 1 steps.
    PrecisionExhausted
        If Witt entries are too short for the iteration.
    """
    w = as_deformation_window(ctx, w)
    pert.validate(ctx, w)
    target = pert.apply(w)
    G0 = MatrixOverS.identity(w.frame.ring, w.rank)
    zero = w.frame.ideal_zero()
    witnesses = {(i, j): zero for i in range(w.d_T) for j in range(w.d_L)}
    defect = [pert.column(j, w.d_L) for j in range(w.rank)]
    g = _iterate(ctx, w, target, G0, witnesses, defect)
    _verify(ctx, g, G0)
    if not g.matrix.is_invertible():
        raise CertificateViolation("the solved isomorphism is not invertible")
    return g


def enumerate_iso_solutions(
    ctx: SquareZeroContext, w: Window, pert: Perturbation, limit: int = ENUMERATION_LIMIT
) -> List[MatrixOverS]:
    """Every g = 1 + W, W over 𝔞, that is a morphism w -> w + pert (brute force)."""
    w = as_deformation_window(ctx, w)
    target = pert.apply(w)
    kernel_elements = ctx.kernel.elements(limit)
    n = w.rank
    count = len(kernel_elements) ** (n * n)
    if count > limit:
        raise RingNotFinite(f"{count} candidate matrices exceed the limit {limit}")
    frame = ctx.source
    identity = MatrixOverS.identity(frame.ring, n)
    solutions = []
    for entries in itertools.product(kernel_elements, repeat=n * n):
        W = MatrixOverS(frame.ring, tuple(tuple(entries[i * n : (i + 1) * n]) for i in range(n)))
        witnesses = {
            (i, j): frame.from_kernel(W[w.d_L + i, j]) for i in range(w.d_T) for j in range(w.d_L)
        }
        g = WindowMorphism(w, target, identity_morphism(frame), identity + W, witnesses)
        if check_window_morphism(g, ideal_samples=1).passed:
            solutions.append(g.matrix)
    return solutions


# -- lifting windows and morphisms ----------------------------------------------------


def lift_step(ctx: SquareZeroContext, w: Window) -> Window:
    """Lift a window over F' to a window over F through F''."""
    if w.frame != ctx.target:
        raise SpecMismatch("window is not over the lower frame of this step")
    A = w.A.map(ctx.section, ring=ctx.source.ring)
    lifted = window_from_normal_decomposition(ctx.source, w.d_L, w.d_T, A)
    return hodge_deform(ctx, lifted).window


def crystalline_lift(chain: Sequence[SquareZeroContext], w: Window) -> Window:
    """Lift a window over the bottom frame of ``chain`` to the top plain frame.

    Each step lifts the structural matrix entrywise; base change back down
    the chain reproduces ``w`` exactly.
    """
    for ctx in reversed(chain):
        w = lift_step(ctx, w)
    return w


def _as_plain_morphism(ctx: SquareZeroContext, g: WindowMorphism, w1: Window, w2: Window) -> WindowMorphism:
    """Read an F''-morphism as an F-morphism; its T×L block must lie in I."""
    frame = ctx.frame
    witnesses = {}
    for i in range(w2.d_T):
        for j in range(w1.d_L):
            part, k = g.witness(i, j).witness
            value = g.matrix[w2.d_L + i, j]
            if k.is_zero():
                witnesses[(i, j)] = part
            elif frame.in_ideal(value):
                witnesses[(i, j)] = frame.ideal_element(value)
            else:
                raise NotASummandLift(
                    f"the lifted morphism does not preserve the Hodge lifts: entry {value}"
                )
    return WindowMorphism(w1, w2, identity_morphism(frame), g.matrix, witnesses)


def _lift_witness(ctx: SquareZeroContext, a: IdealElement) -> IdealElement:
    frame = ctx.source
    parent = frame.parent
    if isinstance(parent, DistinguishedFrame):
        return frame.combine(parent.from_witness(ctx.section(a.witness)), frame.kernel.zero())
    return frame.combine(parent.ideal_element(ctx.section(a.value)), frame.kernel.zero())


def lift_hom_step(ctx: SquareZeroContext, g: WindowMorphism, w1: Window, w2: Window) -> WindowMorphism:
    """The unique F''-morphism between lifts of g's source and target that lifts g.

    The morphism is encoded as the automorphism (1 0; g 1) of w1 ⊕ w2,
    lifted with the solver and read back from the off-diagonal block.
    """
    w1, w2 = as_deformation_window(ctx, w1), as_deformation_window(ctx, w2)
    if (w1.d_L, w1.d_T, w2.d_L, w2.d_T) != (g.source.d_L, g.source.d_T, g.target.d_L, g.target.d_T):
        raise RankMismatch("lifted windows do not match the ranks of the morphism")
    total = direct_sum(w1, w2)
    encoded = graph_automorphism(g.source, g.target, g)
    rows = [list(row) for row in encoded.map(ctx.section, ring=ctx.source.ring).entries]
    witnesses = {}
    # (T2 row i, L1 column j) of the sum sits at (T row d_T1 + i, L column j)
    for i in range(g.target.d_T):
        for j in range(g.source.d_L):
            lifted = _lift_witness(ctx, g.witness(i, j))
            witnesses[(g.source.d_T + i, j)] = lifted
            rows[total.d_L + g.source.d_T + i][j] = lifted.value
    zero = ctx.source.ideal_zero()
    for i in range(total.d_T):
        for j in range(total.d_L):
            witnesses.setdefault((i, j), zero)
    G0 = MatrixOverS.from_rows(ctx.source.ring, rows)
    automorphism = _verify(ctx, _solve_correction(ctx, total, total, G0, witnesses), G0)
    block = graph_block(w1, w2, automorphism.matrix)
    block_witnesses = {
        (i, j): automorphism.witness(w1.d_T + i, j) for i in range(w2.d_T) for j in range(w1.d_L)
    }
    return WindowMorphism(w1, w2, identity_morphism(ctx.source), block, block_witnesses)


def lift_hom(
    chain: Sequence[SquareZeroContext], g: WindowMorphism, w1: Window, w2: Window
) -> WindowMorphism:
    """Lift a morphism over the bottom frame to the lifts ``w1``, ``w2`` at the top.

    ``w1`` and ``w2`` are windows over the top plain frame (or its
    deformation frame). The result is a morphism over the top deformation
    frame. Between steps it must preserve the Hodge lifts, otherwise
    :class:`NotASummandLift` is raised.
    """
    if not chain:
        return g
    sources, targets = [w1], [w2]
    for ctx in chain[:-1]:
        sources.append(_project(ctx, sources[-1]))
        targets.append(_project(ctx, targets[-1]))
    for k in reversed(range(len(chain))):
        ctx = chain[k]
        lifted = lift_hom_step(ctx, g, sources[k], targets[k])
        if k == 0:
            return lifted
        g = _as_plain_morphism(ctx, lifted, _plain(ctx, sources[k]), _plain(ctx, targets[k]))
    return g


def _plain(ctx: SquareZeroContext, w: Window) -> Window:
    """A window over F or F'' read over F with the trivial Hodge lift."""
    if w.frame == ctx.frame:
        return w
    return window_from_normal_decomposition(ctx.frame, w.d_L, w.d_T, w.A)


def _project(ctx: SquareZeroContext, w: Window) -> Window:
    """Base change from F to the lower plain frame F'."""
    return base_change(projection_morphism(ctx.frame, ctx.target), _plain(ctx, w))


# -- Hodge filtrations ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HodgeLift:
    """A lift of the Hodge filtration (graph of ``mu``) and the window it determines."""

    mu: MatrixOverS
    window: Window
    filtration: HodgeFiltration = field(repr=False)


def _mu_matrix(ctx: SquareZeroContext, w: Window, mu: Optional[MatrixOverS]) -> MatrixOverS:
    ring = ctx.source.ring
    if mu is None:
        return MatrixOverS.zeros(ring, w.d_T, w.d_L)
    if w.d_L and w.d_T and mu.shape != (w.d_T, w.d_L):
        raise RankMismatch(f"Hodge lift of shape {mu.shape}, expected ({w.d_T}, {w.d_L})")
    for row in mu.entries:
        for x in row:
            if not ctx.in_kernel(x):
                raise NotASummandLift(f"{x} is not in {ctx.kernel.name}: the lift does not reduce to Hodge")
    return mu


def hodge_deform(ctx: SquareZeroContext, w: Window, mu: Optional[MatrixOverS] = None) -> HodgeLift:
    """The window over F whose Hodge filtration is the graph of μ.

    ``w`` is a window over F''. In the basis l_j + Σ μ_ij t_i, t_i the new
    structural matrix is

        B^{-1} · A · (1 0; f1''(μ) 1),  B = (1 0; μ 1).
    """
    w = as_deformation_window(ctx, w)
    mu = _mu_matrix(ctx, w, mu)
    ring = ctx.source.ring
    n, d_L, d_T = w.rank, w.d_L, w.d_T
    rows_B, rows_Binv, rows_C = [], [], []
    for i in range(n):
        b, b_inv, c = [], [], []
        for j in range(n):
            diagonal = ring.one() if i == j else ring.zero()
            if i >= d_L and j < d_L:
                b.append(mu[i - d_L, j])
                b_inv.append(-mu[i - d_L, j])
                c.append(ctx.rule(mu[i - d_L, j]))
            else:
                b.append(diagonal)
                b_inv.append(diagonal)
                c.append(diagonal)
        rows_B.append(b)
        rows_Binv.append(b_inv)
        rows_C.append(c)
    if n:
        A = MatrixOverS.from_rows(ring, rows_Binv) * w.A * MatrixOverS.from_rows(ring, rows_C)
    else:
        A = w.A
    window = window_from_normal_decomposition(ctx.frame, d_L, d_T, A, mu)
    return HodgeLift(mu, window, hodge_filtration(window))


def hodge_change_of_basis(ctx: SquareZeroContext, w: Window, lift: HodgeLift) -> WindowMorphism:
    """The F''-isomorphism B = (1 0; μ 1) from α1_* of the deformed window back to w."""
    w = as_deformation_window(ctx, w)
    deformed = as_deformation_window(ctx, lift.window)
    n, d_L = deformed.rank, deformed.d_L
    ring = ctx.source.ring
    rows = [
        [
            lift.mu[i - d_L, j] if i >= d_L and j < d_L else (ring.one() if i == j else ring.zero())
            for j in range(n)
        ]
        for i in range(n)
    ]
    B = MatrixOverS.from_rows(ring, rows) if n else MatrixOverS.zeros(ring, 0, 0)
    witnesses = {
        (i, j): ctx.source.from_kernel(lift.mu[i, j]) for i in range(deformed.d_T) for j in range(d_L)
    }
    return WindowMorphism(deformed, w, identity_morphism(ctx.source), B, witnesses)


def _assignments(reps: Sequence[Any], d_T: int, d_L: int, limit: int) -> Iterator[Tuple[Any, ...]]:
    count = len(reps) ** (d_T * d_L)
    if count > limit:
        raise RingNotFinite(f"{count} Hodge lifts exceed the enumeration limit {limit}")
    return itertools.product(reps, repeat=d_T * d_L)


def enumerate_hodge_lifts(
    ctx: SquareZeroContext, w: Window, limit: int = ENUMERATION_LIMIT
) -> List[HodgeLift]:
    """All lifts of the Hodge filtration of a window over F'', one per graph map.

    There are |𝔟|^{d_L·d_T} of them, 𝔟 = (I + 𝔞)/I.
    """
    w = as_deformation_window(ctx, w)
    reps = ctx.source.kernel_representatives()
    ring = ctx.source.ring
    lifts = []
    for entries in _assignments(reps, w.d_T, w.d_L, limit):
        rows = [list(entries[i * w.d_L : (i + 1) * w.d_L]) for i in range(w.d_T)]
        mu = MatrixOverS.from_rows(ring, rows) if w.d_T else MatrixOverS.zeros(ring, 0, w.d_L)
        lifts.append(hodge_deform(ctx, w, mu))
    log.info(f"enumerated {len(lifts)} Hodge lifts over {ctx.kernel.name}")
    return lifts


# -- the κ ladder --------------------------------------------------------------------


def kappa_ladder_step(
    p: int,
    eisenstein: Sequence[int],
    a: int,
    w: Window,
    budget: int = 3,
    t_truncs: Sequence[Any] = (),
    samples: int = 3,
    rng: Optional[np.random.Generator] = None,
) -> Report:
    """Check the square of frames between levels a + 1 and a.

    ``w`` is a window over B_{a+1} built with
    ``breuil_tower(p, eisenstein, [a + 1, a], t_truncs, budget)``.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    B_upper, B_lower = breuil_tower(p, eisenstein, [a + 1, a], t_truncs, budget)
    F_upper, F_lower = dieudonne_tower(p, [a + 1, a], t_truncs, eisenstein, budget)
    report = Report(
        f"ladder a={a}",
        {"p": p, "E": B_upper.generator, "budget": budget, "d_L": w.d_L, "d_T": w.d_T},
    )
    if w.frame != B_upper:
        raise SpecMismatch("the window must be over the upper Breuil frame of the ladder")
    (ctx_B,) = reduce_to_squarezero([B_upper, B_lower])
    (ctx_F,) = reduce_to_squarezero([F_upper, F_lower])
    kappa_upper = kappa_morphism(B_upper, F_upper, "kappa_upper")
    kappa_lower = kappa_morphism(B_lower, F_lower, "kappa_lower")
    kappa_prime = kappa_morphism(ctx_B.source, ctx_F.source, "kappa_prime")
    proj_B = projection_morphism(B_upper, B_lower, "proj_B")
    proj_F = projection_morphism(F_upper, F_lower, "proj_F")

    report.extend(check_frame_morphism(kappa_prime, samples, rng), "kappa-prime")
    report.extend(
        check_commutes([proj_B, kappa_lower], [kappa_upper, proj_F], samples, rng, "ladder"),
    )
    ideal = ctx_F.source.kernel.ideal
    for z in ctx_B.kernel.generators():

        def kills() -> bool:
            image = kappa_prime(z)
            return log_vector(image, ideal).f1_tilde().is_zero()

        report.guard("f1-kills-kappa-kernel", kills, lambda: f"f1~(kappa({z})) != 0")

    def two_paths() -> bool:
        down_first = base_change(kappa_lower, base_change(proj_B, w))
        across_first = base_change(proj_F, base_change(kappa_upper, w))
        return down_first.A == across_first.A

    report.guard("base-change-paths", two_paths, "the two base changes of w differ")

    w_def = as_deformation_window(ctx_B, w)
    kappa_w = base_change(kappa_prime, w_def)
    lifts_B = enumerate_hodge_lifts(ctx_B, w_def)
    lifts_F = enumerate_hodge_lifts(ctx_F, kappa_w)
    report.check(
        "hodge-lift-counts", len(lifts_B) == len(lifts_F), f"{len(lifts_B)} vs {len(lifts_F)}"
    )
    images = set()
    for lift in lifts_B:
        kappa_mu = lift.mu.map(kappa_prime, ring=F_upper.ring)
        for row in kappa_mu.entries:
            for x in row:
                images.add(x.coords[0])

        def equivariant() -> bool:
            left = base_change(kappa_upper, lift.window)
            right = hodge_deform(ctx_F, kappa_w, kappa_mu).window
            return left.A == right.A

        report.guard("hodge-equivariant", equivariant, lambda: f"mu = {lift.mu}")
    if w.d_L and w.d_T:
        firsts = {rep.coords[0] for rep in ctx_F.source.kernel_representatives()}
        report.check(
            "hodge-bijection",
            images == firsts,
            lambda: f"kappa images {sorted(map(str, images))} vs {sorted(map(str, firsts))}",
        )
    return report


# -- fully faithfulness at desk scale ---------------------------------------------------


def _candidates(frame: Frame, ideal_entry: bool, limit: int) -> List[Tuple[Any, Optional[IdealElement]]]:
    try:
        elements = list(frame.ring.elements(limit))
    except RingNotFinite as e:
        raise BudgetExhausted(str(e)) from e
    if not ideal_entry:
        return [(x, None) for x in elements]
    if isinstance(frame, DistinguishedFrame):
        return [(a.value, a) for a in (frame.from_witness(y) for y in elements)]
    return [(x, frame.ideal_element(x)) for x in elements if frame.in_ideal(x)]


def hom_set(w1: Window, w2: Window, limit: int = ENUMERATION_LIMIT) -> Dict[str, WindowMorphism]:
    """All morphisms w1 -> w2 over one frame, keyed by the rendered matrix."""
    if w1.frame != w2.frame:
        raise SpecMismatch("hom sets are computed over one frame")
    frame = w1.frame
    positions = [(i, j) for i in range(w2.rank) for j in range(w1.rank)]
    options = [_candidates(frame, i >= w2.d_L and j < w1.d_L, limit) for i, j in positions]
    count = int(np.prod([len(o) for o in options])) if options else 1
    if count > limit:
        raise BudgetExhausted(f"{count} candidate morphisms exceed the limit {limit}")
    identity = identity_morphism(frame)
    found: Dict[str, WindowMorphism] = {}
    for choice in itertools.product(*options):
        rows = [[choice[i * w1.rank + j][0] for j in range(w1.rank)] for i in range(w2.rank)]
        matrix = MatrixOverS.from_rows(frame.ring, rows) if w2.rank else MatrixOverS.zeros(frame.ring, 0, w1.rank)
        key = str(matrix)
        if key in found:
            continue
        witnesses = {
            (i - w2.d_L, j): choice[i * w1.rank + j][1]
            for i, j in positions
            if i >= w2.d_L and j < w1.d_L
        }
        g = WindowMorphism(w1, w2, identity, matrix, witnesses)
        if check_window_morphism(g, ideal_samples=1).passed:
            found[key] = g
    return found


def faithfulness_probe(
    w1: Window, w2: Window, kappa: FrameMorphism, limit: int = ENUMERATION_LIMIT
) -> Report:
    """Compare Hom(w1, w2) with Hom(κ_*w1, κ_*w2) by enumeration."""
    report = Report(
        f"homprobe {kappa.name}",
        {"source": f"({w1.d_L}, {w1.d_T})", "target": f"({w2.d_L}, {w2.d_T})", "limit": limit},
    )
    source_homs = hom_set(w1, w2, limit)
    k1, k2 = base_change(kappa, w1), base_change(kappa, w2)
    target_homs = hom_set(k1, k2, limit)
    images = {}
    for key, g in source_homs.items():
        images.setdefault(str(kappa.map_matrix(g.matrix)), []).append(key)
    report.header["homs"] = f"{len(source_homs)} -> {len(target_homs)}"
    report.check(
        "injective",
        all(len(keys) == 1 for keys in images.values()),
        lambda: f"collisions: {[keys for keys in images.values() if len(keys) > 1]}",
    )
    report.check(
        "surjective",
        set(images) == set(target_homs),
        lambda: f"missing: {sorted(set(target_homs) - set(images))}",
    )
    identity_image = kappa.map_matrix(MatrixOverS.identity(w1.frame.ring, w1.rank))
    report.check(
        "identity",
        identity_image == MatrixOverS.identity(k1.frame.ring, k1.rank),
        f"kappa(1) = {identity_image}",
    )
    return report
