"""Windows in normal-decomposition form.

A window of ranks (d_L, d_T) over a frame is stored as its structural
matrix A: the columns are Ψ(l_1), ..., Ψ(l_{d_L}), Ψ(t_1), ..., Ψ(t_{d_T})
in the basis l_1, ..., t_{d_T} of P = L ⊕ T, with Q = L ⊕ I·T. Then

    F1(l + Σ a_j t_j) = Ψ(l) + Σ f1(a_j) Ψ(t_j)
    F(x)              = A · diag(π·1_{d_L}, 1_{d_T}) · f(x)

so F = π·F1 on Q. Every matrix in this package uses the L-block first.
"""

from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NotInIdeal, NotInvertible, RankMismatch, SpecMismatch
from .frames import Frame, IdealElement
from .matrix import MatrixOverS
from .morphisms import FrameMorphism, compose, identity_morphism
from .report import Report
from .ring import RingSpec
from .witt import agree


log = getLogger("witt-windows")

Vector = List[Any]


@dataclass(frozen=True)
class QElement:
    """An element l + Σ a_j t_j of Q with witnessed ideal coefficients a_j."""

    l_part: Tuple[Any, ...]
    t_part: Tuple[IdealElement, ...]

    def coordinates(self) -> Vector:
        """Coordinates in the L ⊕ T basis."""
        return list(self.l_part) + [a.value for a in self.t_part]


@dataclass(frozen=True, eq=False)
class Window:
    """A window over ``frame`` given by its structural matrix.

    Build instances with :func:`window_from_normal_decomposition`, which
    validates the matrix. ``mu`` records the Hodge filtration as the graph of
    a d_T x d_L matrix over S, relative to the basis of the window this one
    was deformed from; ``None`` means the L-block itself.
    """

    frame: Frame
    d_L: int
    d_T: int
    A: MatrixOverS
    mu: Optional[MatrixOverS] = None

    @property
    def rank(self) -> int:
        """Rank of P."""
        return self.d_L + self.d_T

    def __eq__(self, other) -> bool:
        if not isinstance(other, Window):
            return NotImplemented
        return (
            self.frame == other.frame
            and (self.d_L, self.d_T) == (other.d_L, other.d_T)
            and self.A == other.A
        )

    __hash__ = None  # type: ignore[assignment]

    def basis_vector(self, k: int) -> Vector:
        """The k-th basis vector of P (L-block first)."""
        ring = self.frame.ring
        return [ring.one() if i == k else ring.zero() for i in range(self.rank)]

    def l_generator(self, j: int) -> QElement:
        """The basis vector l_j as an element of Q."""
        ring = self.frame.ring
        l_part = tuple(ring.one() if i == j else ring.zero() for i in range(self.d_L))
        return QElement(l_part, tuple(self.frame.ideal_zero() for _ in range(self.d_T)))

    def t_generator(self, j: int, a: IdealElement) -> QElement:
        """The element a·t_j of I·T."""
        zero = self.frame.ring.zero()
        t_part = tuple(a if i == j else self.frame.ideal_zero() for i in range(self.d_T))
        return QElement(tuple(zero for _ in range(self.d_L)), t_part)

    def F(self, x: Sequence[Any]) -> Vector:
        """F(x) for x in P."""
        return eval_F(self, x)

    def F1(self, q: QElement) -> Vector:
        """F1(q) for q in Q."""
        return eval_F1(self, q)

    def describe(self) -> str:
        """Canonical text form: frame kind, ranks and structural matrix."""
        return f"frame: {self.frame.kind}\nd_L: {self.d_L}\nd_T: {self.d_T}\nA: {self.A}\n"

    def __str__(self) -> str:
        return f"Window(d_L={self.d_L}, d_T={self.d_T}, A={self.A})"


def window_from_normal_decomposition(
    frame: Frame, d_L: int, d_T: int, A: MatrixOverS, mu: Optional[MatrixOverS] = None
) -> Window:
    """Validate a structural matrix and wrap it as a window.

    Raises
    ------
    RankMismatch
        If ``A`` is not square of size d_L + d_T, or ``mu`` is not d_T x d_L.
    NotInvertible
        If the residue determinant of ``A`` vanishes.
    """
    if d_L < 0 or d_T < 0:
        raise RankMismatch(f"ranks must be nonnegative: ({d_L}, {d_T})")
    n = d_L + d_T
    if A.shape != (n, n) and not (n == 0 and A.nrows == 0):
        raise RankMismatch(f"structural matrix has shape {A.shape}, expected ({n}, {n})")
    if A.ring != frame.ring:
        raise SpecMismatch("structural matrix does not live over the frame's ring")
    if n and not A.is_invertible():
        raise NotInvertible(f"structural matrix {A} is not invertible over the residue field")
    if mu is not None:
        if d_L and d_T and mu.shape != (d_T, d_L):
            raise RankMismatch(f"Hodge graph of shape {mu.shape}, expected ({d_T}, {d_L})")
        if mu.ring != frame.ring:
            raise SpecMismatch("Hodge graph does not live over the frame's ring")
    return Window(frame, d_L, d_T, A, mu)


def random_window(
    frame: Frame, d_L: int, d_T: int, rng: np.random.Generator, attempts: int = 32
) -> Window:
    """A window with a random invertible structural matrix.

    Falls back to the identity matrix if no draw is invertible.
    """
    n = d_L + d_T
    for _ in range(attempts if n else 0):
        rows = [[frame.random(rng) for _ in range(n)] for _ in range(n)]
        A = MatrixOverS.from_rows(frame.ring, rows)
        if A.is_invertible():
            return window_from_normal_decomposition(frame, d_L, d_T, A)
    log.debug(f"no invertible draw in {attempts} attempts, using the identity")
    return window_from_normal_decomposition(frame, d_L, d_T, MatrixOverS.identity(frame.ring, n))


def _frobenius(frame: Frame, x: Sequence[Any]) -> Vector:
    return [frame.f(c) for c in x]


def _agree_all(xs: Sequence[Any], ys: Sequence[Any]) -> bool:
    # F and F1 lose a unit of Witt length, so both sides meet at the shorter one
    return len(xs) == len(ys) and all(agree(x, y) for x, y in zip(xs, ys))


def eval_F(w: Window, x: Sequence[Any]) -> Vector:
    """F(x) = A·diag(π·1_{d_L}, 1_{d_T})·f(x)."""
    if len(x) != w.rank:
        raise RankMismatch(f"vector of length {len(x)} in a window of rank {w.rank}")
    fx = _frobenius(w.frame, x)
    pi = w.frame.pi
    scaled = [pi * c for c in fx[: w.d_L]] + fx[w.d_L :]
    return w.A.apply(scaled)


def eval_F1(w: Window, q: QElement) -> Vector:
    """F1(l + Σ a_j t_j) = Σ f(l_i) Ψ(l_i) + Σ f1(a_j) Ψ(t_j)."""
    if len(q.l_part) != w.d_L or len(q.t_part) != w.d_T:
        raise RankMismatch(f"Q element of shape ({len(q.l_part)}, {len(q.t_part)}) in a ({w.d_L}, {w.d_T}) window")
    for a in q.t_part:
        if not isinstance(a, IdealElement):
            raise NotInIdeal(f"T-coordinate {a} carries no witness")
    coords = _frobenius(w.frame, q.l_part) + [w.frame.f1(a) for a in q.t_part]
    return w.A.apply(coords)


def base_change(alpha: FrameMorphism, w: Window) -> Window:
    """α_*w with structural matrix α(A)·diag(u·1_{d_L}, 1_{d_T})."""
    if alpha.source != w.frame:
        raise SpecMismatch(f"window is not over the source of {alpha.name}")
    target = alpha.target
    scaling = MatrixOverS.diagonal(target.ring, [alpha.unit] * w.d_L + [target.ring.one()] * w.d_T)
    A = alpha.map_matrix(w.A)
    if w.rank:
        A = A * scaling
    mu = alpha.map_matrix(w.mu) if w.mu is not None else None
    log.debug(f"base change of a rank {w.rank} window along {alpha.name}")
    return window_from_normal_decomposition(target, w.d_L, w.d_T, A, mu)


def _sum_positions(w1: Window, w2: Window) -> Tuple[List[int], List[int]]:
    """Positions of the basis vectors of w1 and w2 in L1, L2, T1, T2 order."""
    d_L = w1.d_L + w2.d_L
    first = list(range(w1.d_L)) + [d_L + j for j in range(w1.d_T)]
    second = [w1.d_L + j for j in range(w2.d_L)] + [d_L + w1.d_T + j for j in range(w2.d_T)]
    return first, second


def _place(ring: Any, n: int, pieces: Sequence[Tuple[MatrixOverS, List[int], List[int]]]) -> MatrixOverS:
    rows = [[ring.zero() for _ in range(n)] for _ in range(n)]
    for matrix, row_pos, col_pos in pieces:
        for i, r in enumerate(row_pos):
            for j, c in enumerate(col_pos):
                rows[r][c] = matrix[i, j]
    return MatrixOverS.from_rows(ring, rows)


def direct_sum(w1: Window, w2: Window) -> Window:
    """w1 ⊕ w2 with basis order L1, L2, T1, T2."""
    if w1.frame != w2.frame:
        raise SpecMismatch("direct sums need windows over the same frame")
    first, second = _sum_positions(w1, w2)
    n = w1.rank + w2.rank
    ring = w1.frame.ring
    A = _place(ring, n, [(w1.A, first, first), (w2.A, second, second)])
    d_L, d_T = w1.d_L + w2.d_L, w1.d_T + w2.d_T
    mu = None
    if (w1.mu is not None or w2.mu is not None) and d_L and d_T:
        rows = [[ring.zero() for _ in range(d_L)] for _ in range(d_T)]
        for w, row0, col0 in ((w1, 0, 0), (w2, w1.d_T, w1.d_L)):
            if w.mu is None or not (w.d_L and w.d_T):
                continue
            for i in range(w.d_T):
                for j in range(w.d_L):
                    rows[row0 + i][col0 + j] = w.mu[i, j]
        mu = MatrixOverS.from_rows(ring, rows)
    return window_from_normal_decomposition(w1.frame, d_L, d_T, A, mu)


# -- Hodge filtration ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HodgeFiltration:
    """A rank-d_L summand of (P/IP) ≅ R^{d_L + d_T}, given by spanning columns.

    Summands reducing a normal decomposition are graphs: the columns are
    [1_{d_L}; μ] for an R-linear μ from the L-block to the T-block.
    """

    ring: RingSpec
    d_L: int
    d_T: int
    mu: MatrixOverS

    @classmethod
    def graph(cls, ring: RingSpec, d_L: int, d_T: int, mu: Optional[MatrixOverS] = None) -> "HodgeFiltration":
        """The graph of μ (zero by default)."""
        if mu is None:
            mu = MatrixOverS.zeros(ring, d_T, d_L)
        if d_T and d_L and mu.shape != (d_T, d_L):
            raise RankMismatch(f"graph map has shape {mu.shape}, expected ({d_T}, {d_L})")
        return cls(ring, d_L, d_T, mu)

    @property
    def rank(self) -> int:
        """Rank of the summand."""
        return self.d_L

    @property
    def columns(self) -> MatrixOverS:
        """Spanning columns [1; μ]."""
        n = self.d_L + self.d_T
        ring = self.ring
        rows = [[ring.one() if i == j else ring.zero() for j in range(self.d_L)] for i in range(self.d_L)]
        rows += [[self.mu[i, j] for j in range(self.d_L)] for i in range(self.d_T)]
        if not self.d_L:
            return MatrixOverS.zeros(ring, n, 0)
        return MatrixOverS.from_rows(ring, rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HodgeFiltration):
            return NotImplemented
        if (self.ring, self.d_L, self.d_T) != (other.ring, other.d_L, other.d_T):
            return False
        return not (self.d_L and self.d_T) or self.mu == other.mu

    __hash__ = None  # type: ignore[assignment]

    def direct_sum(self, other: "HodgeFiltration") -> "HodgeFiltration":
        """Blockwise sum in the L1, L2, T1, T2 basis order."""
        d_L, d_T = self.d_L + other.d_L, self.d_T + other.d_T
        rows = [[self.ring.zero() for _ in range(d_L)] for _ in range(d_T)]
        for i in range(self.d_T):
            for j in range(self.d_L):
                rows[i][j] = self.mu[i, j]
        for i in range(other.d_T):
            for j in range(other.d_L):
                rows[self.d_T + i][self.d_L + j] = other.mu[i, j]
        mu = MatrixOverS.from_rows(self.ring, rows) if d_T else MatrixOverS.zeros(self.ring, 0, d_L)
        return HodgeFiltration.graph(self.ring, d_L, d_T, mu)

    def __str__(self) -> str:
        return f"Hodge(rank={self.rank}, mu={self.mu})"


def hodge_filtration(w: Window) -> HodgeFiltration:
    """Q/IP in P/IP: the graph of the reduction of ``w.mu`` over R."""
    residue = w.frame.residue_ring
    if w.mu is None or not (w.d_L and w.d_T):
        return HodgeFiltration.graph(residue, w.d_L, w.d_T)
    return HodgeFiltration.graph(residue, w.d_L, w.d_T, w.mu.map(w.frame.reduce_to_R, ring=residue))


# -- morphisms of windows ------------------------------------------------------------


Witnesses = Dict[Tuple[int, int], IdealElement]


@dataclass(frozen=True, eq=False)
class WindowMorphism:
    """An α-morphism g: P -> P' given by its matrix in the target basis.

    ``witnesses[(i, j)]`` certifies that the T'-coordinate i of g(l_j) lies
    in I', which is what g(Q) ⊆ Q' requires.
    """

    source: Window
    target: Window
    morphism: FrameMorphism
    matrix: MatrixOverS
    witnesses: Witnesses = field(default_factory=dict)

    def __call__(self, x: Sequence[Any]) -> Vector:
        return self.matrix.apply([self.morphism(c) for c in x])

    def witness(self, i: int, j: int) -> IdealElement:
        """Witness of the (T'-row i, L-column j) entry."""
        try:
            return self.witnesses[(i, j)]
        except KeyError:
            return self.target.frame.ideal_element(self.matrix[self.target.d_L + i, j])

    def map_q(self, q: QElement) -> QElement:
        """g(q) as an element of Q'."""
        src, tgt = self.source, self.target
        frame = tgt.frame
        alpha = self.morphism
        image_l = [alpha(c) for c in q.l_part]
        image_t = [alpha.ideal_map(a) for a in q.t_part]
        l_part = []
        for i in range(tgt.d_L):
            acc = frame.ring.zero()
            for j in range(src.d_L):
                acc = acc + self.matrix[i, j] * image_l[j]
            for j in range(src.d_T):
                acc = acc + self.matrix[i, src.d_L + j] * image_t[j].value
            l_part.append(acc)
        t_part = []
        for i in range(tgt.d_T):
            acc = frame.ideal_zero()
            for j in range(src.d_L):
                acc = frame.ideal_add(acc, frame.ideal_scale(image_l[j], self.witness(i, j)))
            for j in range(src.d_T):
                entry = self.matrix[tgt.d_L + i, src.d_L + j]
                acc = frame.ideal_add(acc, frame.ideal_scale(entry, image_t[j]))
            t_part.append(acc)
        return QElement(tuple(l_part), tuple(t_part))


def _zero_witnesses(target: Window, source: Window) -> Witnesses:
    zero = target.frame.ideal_zero()
    return {(i, j): zero for i in range(target.d_T) for j in range(source.d_L)}


def identity_window_morphism(w: Window) -> WindowMorphism:
    """The identity of w."""
    return WindowMorphism(
        w, w, identity_morphism(w.frame), MatrixOverS.identity(w.frame.ring, w.rank), _zero_witnesses(w, w)
    )


def canonical_base_change_morphism(alpha: FrameMorphism, w: Window) -> WindowMorphism:
    """The α-morphism w -> α_*w sending each basis vector to 1 ⊗ itself."""
    target = base_change(alpha, w)
    identity = MatrixOverS.identity(alpha.target.ring, w.rank)
    return WindowMorphism(w, target, alpha, identity, _zero_witnesses(target, w))


def induced_morphism(g: WindowMorphism) -> WindowMorphism:
    """The target-frame morphism α_*P -> P' through which an α-morphism factors.

    α_*P has the basis 1 ⊗ e_k and the factorization must send it to
    g(e_k), so the matrix and witnesses are those of ``g``.
    """
    source = base_change(g.morphism, g.source)
    return WindowMorphism(source, g.target, identity_morphism(g.target.frame), g.matrix, dict(g.witnesses))


def compose_window_morphisms(g: WindowMorphism, h: WindowMorphism) -> WindowMorphism:
    """h∘g, an (h.morphism ∘ g.morphism)-morphism."""
    beta = h.morphism
    mid, tgt = g.target, h.target
    frame = tgt.frame
    matrix = h.matrix * beta.map_matrix(g.matrix)
    witnesses: Witnesses = {}
    for i in range(tgt.d_T):
        for j in range(g.source.d_L):
            acc = frame.ideal_zero()
            for k in range(mid.d_L):
                acc = frame.ideal_add(acc, frame.ideal_scale(beta(g.matrix[k, j]), h.witness(i, k)))
            for k in range(mid.d_T):
                entry = h.matrix[tgt.d_L + i, mid.d_L + k]
                acc = frame.ideal_add(acc, frame.ideal_scale(entry, beta.ideal_map(g.witness(k, j))))
            witnesses[(i, j)] = acc
    return WindowMorphism(g.source, tgt, compose(g.morphism, beta), matrix, witnesses)


def check_base_change_universal(
    g: WindowMorphism,
    ideal_samples: int = 2,
    rng: Optional[np.random.Generator] = None,
) -> Report:
    """Check that an α-morphism g: P -> P' factors uniquely through α_*P.

    The factorization h must be a morphism over the target frame with
    h∘can = g. Since can has an invertible matrix, h·can = g has exactly
    one solution for the matrix of h.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    alpha = g.morphism
    report = Report(f"base-change-universal {alpha.name}", {"source": g.source.rank, "target": g.target.rank})
    canonical = canonical_base_change_morphism(alpha, g.source)
    h = induced_morphism(g)
    report.extend(check_window_morphism(h, ideal_samples, rng), "induced")
    report.guard(
        "unique",
        lambda: canonical.matrix.nrows == 0 or canonical.matrix.is_invertible(),
        lambda: f"the matrix of 1 ⊗ e_k is singular: {canonical.matrix}",
    )
    report.guard(
        "factors",
        lambda: compose_window_morphisms(canonical, h).matrix.agrees_with(g.matrix),
        lambda: f"h∘can != g for {alpha.name}",
    )
    log.debug(f"universal property of base change along {alpha.name}: {report.passed}")
    return report


def graph_automorphism(w1: Window, w2: Window, g: WindowMorphism) -> MatrixOverS:
    """The automorphism (1 0; g 1) of w1 ⊕ w2 encoding g: w1 -> w2, in the sum's basis."""
    first, second = _sum_positions(w1, w2)
    ring = w1.frame.ring
    n = w1.rank + w2.rank
    return _place(
        ring,
        n,
        [
            (MatrixOverS.identity(ring, w1.rank), first, first),
            (MatrixOverS.identity(ring, w2.rank), second, second),
            (g.matrix, second, first),
        ],
    )


def graph_block(w1: Window, w2: Window, automorphism: MatrixOverS) -> MatrixOverS:
    """Recover the g-block of an automorphism of w1 ⊕ w2."""
    first, second = _sum_positions(w1, w2)
    return automorphism.submatrix(second, first)


def check_window_morphism(
    g: WindowMorphism,
    ideal_samples: int = 2,
    rng: Optional[np.random.Generator] = None,
) -> Report:
    """Check g(Q) ⊆ Q', F'g = gF on basis vectors and F1'g = u·gF1 on Q generators."""
    rng = rng if rng is not None else np.random.default_rng(0)
    src, tgt, alpha = g.source, g.target, g.morphism
    report = Report(f"window-morphism {alpha.name}", {"source": src.rank, "target": tgt.rank})
    if g.matrix.shape != (tgt.rank, src.rank):
        report.check("shape", False, f"matrix {g.matrix.shape} for ranks {src.rank} -> {tgt.rank}")
        return report
    if alpha.source != src.frame or alpha.target != tgt.frame:
        report.check("frames", False, f"{alpha.name} does not connect the window frames")
        return report
    for i in range(tgt.d_T):
        for j in range(src.d_L):

            def q_ok() -> bool:
                a = g.witness(i, j)
                checked = tgt.frame.ideal_element(a.value, a.witness)
                return agree(checked.value, g.matrix[tgt.d_L + i, j])

            report.guard("q-preserved", q_ok, lambda: f"entry ({tgt.d_L + i}, {j}) is not in I'")
    for k in range(src.rank):
        e = src.basis_vector(k)
        report.guard(
            "F-compatible",
            lambda: _agree_all(eval_F(tgt, g(e)), g(eval_F(src, e))),
            lambda: f"F'g != gF on basis vector {k}",
        )

    def twisted(q: QElement) -> bool:
        lhs = eval_F1(tgt, g.map_q(q))
        rhs = [alpha.unit * c for c in g(eval_F1(src, q))]
        return _agree_all(lhs, rhs)

    for j in range(src.d_L):
        q = src.l_generator(j)
        report.guard("F1-twisted", lambda: twisted(q), lambda: f"F1'g != u gF1 on l_{j}")
    ideal = src.frame.ideal_generators()[:ideal_samples]
    ideal += [src.frame.sample_ideal(rng) for _ in range(ideal_samples)]
    for j in range(src.d_T):
        for a in ideal:
            q = src.t_generator(j, a)
            report.guard("F1-twisted", lambda: twisted(q), lambda: f"F1'g != u gF1 on ({a}) t_{j}")
    return report


def check_window(w: Window, samples: int = 3, rng: Optional[np.random.Generator] = None) -> Report:
    """Validate a window: invertibility and F = π·F1 on Q generators."""
    rng = rng if rng is not None else np.random.default_rng(0)
    report = Report("window-validate", {"d_L": w.d_L, "d_T": w.d_T, "frame": w.frame.kind})
    report.check("invertible", w.rank == 0 or w.A.is_invertible(), f"residue of {w.A} is singular")
    pi = w.frame.pi
    generators = [w.l_generator(j) for j in range(w.d_L)]
    for j in range(w.d_T):
        generators += [w.t_generator(j, w.frame.sample_ideal(rng)) for _ in range(samples)]
    for q in generators:
        report.guard(
            "F-equals-pi-F1",
            lambda: _agree_all(eval_F(w, q.coordinates()), [pi * c for c in eval_F1(w, q)]),
            lambda: f"F != pi F1 on {q.coordinates()}",
        )
    for _ in range(samples):
        for j in range(w.d_T):
            a = w.frame.sample_ideal(rng)
            x = [w.frame.random(rng) for _ in range(w.rank)]

            def semilinear() -> bool:
                scaled = [a.value * c for c in x]
                q = QElement(
                    tuple(scaled[: w.d_L]),
                    tuple(w.frame.ideal_scale(c, a) for c in x[w.d_L :]),
                )
                return _agree_all(eval_F1(w, q), [w.frame.f1(a) * c for c in eval_F(w, x)])

            report.guard("F1-semilinear", semilinear, lambda: f"F1(a x) != f1(a) F(x) for a = {a}")
    return report
