"""Frames.

A frame is a quintuple (S, I, R, f, f1): a local ring S, an ideal I with
quotient R = S/I, a Frobenius lift f and an f-linear map f1 on I whose image
generates S. The element π with f = π·f1 on I is stored on every frame.

Elements of I are handled as :class:`IdealElement` values. They carry the
data f1 is computed from, because after p-adic truncation the generator of I
may be a zero divisor and f1 of a bare value is no longer well defined.

Concrete frames:

* :class:`BreuilFrame` B_a over S = 𝔖_a with I = E·S and f1(E·y) = f(y).
* :class:`CFrame` C_n over S = Z/p^N[t]/(t^n) with I = p·S and f1(p·y) = f(y).
* :class:`DieudonneFrame` F_R over truncated Witt vectors with I the kernel of
  the first coordinate and f1 the inverse of Verschiebung.
* :class:`DerivedFrame` (S, I + 𝔞, S/(I + 𝔞), f, f1'') for a kernel 𝔞 and an
  extension rule of f1 to 𝔞.
"""

import itertools

from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    BadEisenstein,
    BadPrime,
    NotInIdeal,
    PrecisionExhausted,
    RingNotFinite,
    RuleInconsistent,
    SpecMismatch,
)
from .report import Report
from .ring import (
    ENUMERATION_LIMIT,
    RingSpec,
    Terms,
    TruncatedSeries,
    monomial_order,
    resolve_truncation,
)
from .witt import SquareZeroIdeal, WittRing, WittVector, agree


log = getLogger("witt-windows")

#: Default Witt length of Dieudonné frames built from the command line.
DEFAULT_BUDGET = 3

ZERO_RULE = "zero"
SHIFT_RULE = "shift"


@dataclass(frozen=True, eq=False)
class IdealElement:
    """An element of a frame's ideal together with its f1 data.

    ``witness`` is the quotient y with value = d*y for frames with a
    distinguished generator d, ``None`` for Dieudonné frames, and the pair
    (I-part, kernel part) for derived frames.
    """

    value: Any
    witness: Any = None

    def __str__(self) -> str:
        return str(self.value)


def _u_exponent(power: int, t_count: int) -> Tuple[int, ...]:
    return (power,) + (0,) * t_count


def eisenstein_relation(coefficients: Sequence[int], t_count: int = 0) -> Terms:
    """Canonical relation terms of E = u^e + a_{e-1} u^{e-1} + ... + a_0."""
    e = len(coefficients)
    terms = [(_u_exponent(i, t_count), int(c)) for i, c in enumerate(coefficients) if c]
    terms.append((_u_exponent(e, t_count), 1))
    return tuple(sorted(terms, key=lambda t: monomial_order(t[0])))


def eisenstein_coefficients(E: TruncatedSeries) -> Tuple[int, ...]:
    """Read a_0..a_{e-1} off a monic polynomial in u with integer coefficients."""
    spec = E.spec
    if not spec.has_u or spec.relation:
        raise BadEisenstein(f"E must be a polynomial in u: {E}")
    if any(any(exp[1:]) for exp, _ in E.terms):
        raise BadEisenstein(f"E must not involve t variables: {E}")
    degree = max((exp[0] for exp, _ in E.terms), default=0)
    if degree < 1 or E.coefficient(_u_exponent(degree, len(spec.t_truncs))) != 1:
        raise BadEisenstein(f"E must be monic of positive degree in u: {E}")
    t_count = len(spec.t_truncs)
    return tuple(E.coefficient(_u_exponent(i, t_count)) for i in range(degree))


def check_eisenstein(p: int, coefficients: Sequence[int]):
    """Raise :class:`BadEisenstein` unless p | a_i for all i and a_0/p is a unit."""
    if not coefficients:
        raise BadEisenstein("E needs degree e >= 1")
    for i, c in enumerate(coefficients):
        if c % p:
            raise BadEisenstein(f"a_{i} = {c} is not divisible by p = {p}")
    if (coefficients[0] // p) % p == 0:
        raise BadEisenstein(f"a_0 / p = {coefficients[0] // p} is not a unit mod {p}")


def breuil_residue_ring(
    p: int, coefficients: Sequence[int], level: int, t_truncs: Sequence[int] = ()
) -> RingSpec:
    """R_a = Z/p^a[t]/(t^n)[u]/(E)."""
    t_truncs = tuple(t_truncs)
    return RingSpec(p, level, t_truncs, 0, eisenstein_relation(coefficients, len(t_truncs)))


class Frame:
    """Common interface of all frames.

    Subclasses provide ``ring`` (S), ``residue_ring`` (R), ``pi`` and the
    ideal element operations.
    """

    kind: str = "frame"
    ring: Any
    residue_ring: RingSpec

    @property
    def p(self) -> int:
        """The prime."""
        return self.ring.p

    @property
    def pi(self) -> Any:
        """The element π with f(a) = π·f1(a) on I."""
        raise NotImplementedError

    def f(self, x: Any) -> Any:
        """The Frobenius lift of S."""
        return self.ring.frobenius(x)

    def f1(self, a: IdealElement) -> Any:
        """The divided Frobenius on I."""
        raise NotImplementedError

    def ideal_element(self, value: Any, witness: Any = None) -> IdealElement:
        """Validate ``value`` (and ``witness``) as an element of I."""
        raise NotImplementedError

    def ideal_zero(self) -> IdealElement:
        """The zero of I."""
        raise NotImplementedError

    def ideal_add(self, a: IdealElement, b: IdealElement) -> IdealElement:
        """a + b."""
        raise NotImplementedError

    def ideal_scale(self, s: Any, a: IdealElement) -> IdealElement:
        """s·a for s in S."""
        raise NotImplementedError

    def ideal_generators(self) -> List[IdealElement]:
        """Elements spanning I."""
        raise NotImplementedError

    def sample_ideal(self, rng: np.random.Generator) -> IdealElement:
        """A random element of I."""
        raise NotImplementedError

    def unit_witness(self) -> IdealElement:
        """An element a* of I with f1(a*) = 1."""
        raise NotImplementedError

    def reduce_to_R(self, x: Any) -> TruncatedSeries:
        """The projection S -> R."""
        raise NotImplementedError

    def ring_generators(self) -> List[Any]:
        """Elements generating S (as a ring, together with the coefficients)."""
        raise NotImplementedError

    def random(self, rng: np.random.Generator) -> Any:
        """A random element of S."""
        return self.ring.random(rng)

    def in_ideal(self, x: Any) -> bool:
        """Membership of a bare value in I."""
        return self.reduce_to_R(x).is_zero()

    def parameters(self) -> Dict[str, Any]:
        """Parameters for the structured description."""
        return {"kind": self.kind, "p": self.p, "S": self.ring.describe(), "R": self.residue_ring.describe()}

    def describe(self) -> str:
        """Structured text block, one ``key: value`` per line."""
        params = dict(self.parameters())
        params["pi"] = str(self.pi)
        return "\n".join(f"{key}: {value}" for key, value in params.items())


@dataclass(frozen=True)
class DistinguishedFrame(Frame):
    """A frame over a series ring whose ideal is generated by one element d."""

    ring: RingSpec
    generator: TruncatedSeries
    residue_ring: RingSpec

    def from_witness(self, y: Union[int, TruncatedSeries]) -> IdealElement:
        """The ideal element d·y."""
        if isinstance(y, int):
            y = self.ring.from_int(y)
        return IdealElement(self.generator * y, y)

    def as_ideal(self, value: TruncatedSeries) -> IdealElement:
        """Find a witness for ``value`` by exact division (validation tooling only)."""
        return self.from_witness(value.divide_exact(self.generator))

    def f1(self, a: IdealElement) -> TruncatedSeries:
        return self.f(a.witness)

    def ideal_element(self, value: Any, witness: Any = None) -> IdealElement:
        if witness is None:
            return self.as_ideal(value)
        if self.generator * witness != value:
            raise NotInIdeal(f"{value} != ({self.generator}) * ({witness})")
        return IdealElement(value, witness)

    def ideal_zero(self) -> IdealElement:
        return self.from_witness(0)

    def ideal_add(self, a: IdealElement, b: IdealElement) -> IdealElement:
        return self.from_witness(a.witness + b.witness)

    def ideal_scale(self, s: Any, a: IdealElement) -> IdealElement:
        return self.from_witness(s * a.witness)

    def ideal_generators(self) -> List[IdealElement]:
        return [self.from_witness(self.ring.element({exp: 1})) for exp in self.ring.monomials]

    def sample_ideal(self, rng: np.random.Generator) -> IdealElement:
        return self.from_witness(self.ring.random(rng))

    def unit_witness(self) -> IdealElement:
        return self.from_witness(1)

    def ring_generators(self) -> List[TruncatedSeries]:
        return [self.ring.one()] + [self.ring.var(name) for name in self.ring.variables]


@dataclass(frozen=True)
class BreuilFrame(DistinguishedFrame):
    """B_a = (𝔖_a, E·𝔖_a, R_a, f, f1) with f1(E·y) = f(y) and π = f(E)."""

    eisenstein: Tuple[int, ...] = ()
    level: int = 1

    kind = "breuil"

    @property
    def e(self) -> int:
        """Degree of E."""
        return len(self.eisenstein)

    @property
    def pi(self) -> TruncatedSeries:
        return self.f(self.generator)

    def reduce_to_R(self, x: TruncatedSeries) -> TruncatedSeries:
        return x.map_into(self.residue_ring)

    def parameters(self) -> Dict[str, Any]:
        params = super().parameters()
        params.update({"e": self.e, "a": self.level, "N": self.ring.N, "E": str(self.generator)})
        return params


@dataclass(frozen=True)
class CFrame(DistinguishedFrame):
    """C_n = (Z/p^N[t]/(t^n), p·S, F_p[t]/(t^n), f, f1) with f1(p·y) = f(y)."""

    kind = "cframe"

    @property
    def n(self) -> Tuple[int, ...]:
        """Truncation exponents."""
        return self.ring.t_truncs

    @property
    def pi(self) -> TruncatedSeries:
        return self.ring.from_int(self.p)

    def reduce_to_R(self, x: TruncatedSeries) -> TruncatedSeries:
        return x.quotient_map(self.residue_ring)

    def parameters(self) -> Dict[str, Any]:
        params = super().parameters()
        params.update({"n": ",".join(str(k) for k in self.n), "N": self.ring.N})
        return params


@dataclass(frozen=True)
class DieudonneFrame(Frame):
    """F_R = (W(R), I_R, R, f, f1) at Witt length ``ring.length``, f1 = V^{-1}, π = p."""

    ring: WittRing

    kind = "dieudonne"

    @property
    def residue_ring(self) -> RingSpec:  # type: ignore[override]
        return self.ring.base

    @property
    def budget(self) -> int:
        """Tracked Witt length of S."""
        return self.ring.length

    @property
    def pi(self) -> WittVector:
        return self.ring.from_int(self.p)

    def f1(self, a: IdealElement) -> WittVector:
        return a.value.f1_shift()

    def ideal_element(self, value: Any, witness: Any = None) -> IdealElement:
        if not value.coords[0].is_zero():
            raise NotInIdeal(f"{value} does not have first coordinate 0")
        return IdealElement(value)

    def ideal_zero(self) -> IdealElement:
        return IdealElement(self.ring.zero())

    def ideal_add(self, a: IdealElement, b: IdealElement) -> IdealElement:
        return IdealElement(a.value + b.value)

    def ideal_scale(self, s: Any, a: IdealElement) -> IdealElement:
        return IdealElement(s * a.value)

    def _basis_vectors(self, start: int) -> List[WittVector]:
        base = self.ring.base
        zero = base.zero()
        vectors = []
        for k in range(start, self.budget):
            for exp in base.monomials:
                coords = [zero] * self.budget
                coords[k] = base.element({exp: 1})
                vectors.append(WittVector(base, tuple(coords)))
        return vectors

    def ideal_generators(self) -> List[IdealElement]:
        return [IdealElement(v) for v in self._basis_vectors(1)]

    def sample_ideal(self, rng: np.random.Generator) -> IdealElement:
        base = self.ring.base
        coords = (base.zero(),) + tuple(base.random(rng) for _ in range(self.budget - 1))
        return IdealElement(WittVector(base, coords))

    def unit_witness(self) -> IdealElement:
        return IdealElement(self.ring.one().truncate(self.budget - 1).verschiebung())

    def reduce_to_R(self, x: WittVector) -> TruncatedSeries:
        return x.coords[0]

    def ring_generators(self) -> List[WittVector]:
        return [self.ring.one()] + self._basis_vectors(0)

    def parameters(self) -> Dict[str, Any]:
        params = super().parameters()
        params["budget"] = self.budget
        return params


# -- kernels of deformations ---------------------------------------------------


@dataclass(frozen=True)
class KernelCertificate:
    """The hypotheses a square-zero lifting step relies on, as checked on generators."""

    square_zero: bool
    frobenius_kills: bool
    nilpotency: Optional[int]

    @property
    def certified(self) -> bool:
        """True when all hypotheses hold."""
        return self.square_zero and self.frobenius_kills and self.nilpotency is not None


@dataclass(frozen=True)
class UValuationKernel:
    """The ideal u^k·S of a Breuil ring S, with quotient ring ``quotient`` of S/(E, u^k)."""

    ring: RingSpec
    valuation: int
    quotient: Optional[RingSpec] = None

    @property
    def name(self) -> str:
        """Short name."""
        return f"u^{self.valuation}S"

    def contains(self, x: TruncatedSeries) -> bool:
        """Membership by u-adic valuation."""
        return x.is_zero() or x.valuation("u") >= self.valuation

    def generators(self) -> List[TruncatedSeries]:
        """u^k times the basis monomials, nonzero ones only."""
        gens = []
        for exp in self.ring.monomials:
            g = self.ring.element({(exp[0] + self.valuation,) + exp[1:]: 1})
            if not g.is_zero():
                gens.append(g)
        return gens

    def zero(self) -> TruncatedSeries:
        """The zero element."""
        return self.ring.zero()

    def random(self, rng: np.random.Generator) -> TruncatedSeries:
        """A random element of the kernel."""
        return self.ring.monomial("u", self.valuation) * self.ring.random(rng)

    def meet_ideal(self, frame: DistinguishedFrame) -> List[IdealElement]:
        """Elements spanning the intersection with I = d·S, as ideal elements of ``frame``."""
        return [frame.from_witness(g) for g in self.generators()]

    def representatives(self, e: int) -> List[TruncatedSeries]:
        """u^k·z for z running through F_p-combinations of the monomials surviving u^k."""
        width = self.ring.u_trunc - self.valuation
        if width != e:
            raise SpecMismatch(
                f"representatives need u^{self.valuation} to cut {e} powers of u, not {width}"
            )
        p = self.ring.p
        exps = [exp for exp in self.ring.monomials if exp[0] < width]
        reps = []
        for digits in itertools.product(range(p), repeat=len(exps)):
            z = self.ring.element(dict(zip(exps, digits)))
            reps.append(self.ring.monomial("u", self.valuation) * z)
        return reps

    def elements(self, limit: int = ENUMERATION_LIMIT) -> List[TruncatedSeries]:
        """Every element of the kernel (small rings only)."""
        exps = [exp for exp in self.ring.monomials if exp[0] >= self.valuation]
        count = self.ring.modulus ** len(exps)
        if count > limit:
            raise RingNotFinite(f"{self.name} has {count} elements, limit {limit}")
        return [
            self.ring.element(dict(zip(exps, digits)))
            for digits in itertools.product(range(self.ring.modulus), repeat=len(exps))
        ]


@dataclass(frozen=True)
class WittKernel:
    """The hat-Witt ideal Ŵ(𝔟) inside W(R) for a square-zero ideal 𝔟 of R."""

    ring: WittRing
    ideal: SquareZeroIdeal
    quotient: Optional[RingSpec] = None

    @property
    def name(self) -> str:
        """Short name."""
        return f"W({self.ideal.name})"

    def contains(self, x: WittVector) -> bool:
        """All coordinates in 𝔟."""
        return all(self.ideal.contains(c) for c in x.coords)

    def generators(self) -> List[WittVector]:
        """V^k[g·m] for generators g of 𝔟, basis monomials m and positions k."""
        base = self.ring.base
        zero = base.zero()
        gens = []
        for k in range(self.ring.length):
            for g in self.ideal.generators:
                for exp in base.monomials:
                    b = g * base.element({exp: 1})
                    if b.is_zero():
                        continue
                    coords = [zero] * self.ring.length
                    coords[k] = b
                    gens.append(WittVector(base, tuple(coords)))
        return gens

    def zero(self) -> WittVector:
        """The zero vector."""
        return self.ring.zero()

    def random(self, rng: np.random.Generator) -> WittVector:
        """A vector with random coordinates in 𝔟."""
        base = self.ring.base
        coords = []
        for _ in range(self.ring.length):
            c = base.zero()
            for g in self.ideal.generators:
                c = c + g * base.random(rng)
            coords.append(c)
        return WittVector(base, tuple(coords))

    def meet_ideal(self, frame: DieudonneFrame) -> List[IdealElement]:
        """Generators with vanishing first coordinate."""
        return [IdealElement(g) for g in self.generators() if g.coords[0].is_zero()]

    def representatives(self, e: int = 0) -> List[WittVector]:
        """Teichmüller vectors [b] for b in 𝔟."""
        return [self.ring.teichmuller(b) for b in self.ideal.elements()]

    def elements(self, limit: int = ENUMERATION_LIMIT) -> List[WittVector]:
        """Every vector with coordinates in 𝔟 (small rings only)."""
        members = self.ideal.elements(limit)
        count = len(members) ** self.ring.length
        if count > limit:
            raise RingNotFinite(f"{self.name} has {count} elements, limit {limit}")
        base = self.ring.base
        return [WittVector(base, coords) for coords in itertools.product(members, repeat=self.ring.length)]


Kernel = Union[UValuationKernel, WittKernel]


def apply_rule(rule: str, x: Any) -> Any:
    """The extension of f1 to the kernel: ``zero`` or the finite-support ``shift``."""
    if rule == ZERO_RULE:
        return x.ring.zero() if isinstance(x, WittVector) else x.spec.zero()
    if rule == SHIFT_RULE:
        if not isinstance(x, WittVector):
            raise SpecMismatch("the shift rule only applies to hat-Witt kernels")
        return WittVector(x.base, x.coords[1:] + (x.base.zero(),))
    raise ValueError(f"unknown f1 extension rule: {rule!r}")


@dataclass(frozen=True)
class DerivedFrame(Frame):
    """(S, I + 𝔞, S/(I + 𝔞), f, f1'') with f1'' = f1 on I and ``rule`` on 𝔞.

    Ideal elements carry the witness pair (i, k) with value = i.value + k,
    i an ideal element of ``parent`` and k in the kernel.
    """

    parent: Frame
    kernel: Kernel
    rule: str
    residue_ring: RingSpec
    certificate: KernelCertificate = field(compare=False)

    kind = "derived"

    @property
    def ring(self) -> Any:  # type: ignore[override]
        return self.parent.ring

    @property
    def pi(self) -> Any:
        return self.parent.pi

    def f(self, x: Any) -> Any:
        return self.parent.f(x)

    def combine(self, i: IdealElement, k: Any) -> IdealElement:
        """The element i + k."""
        return IdealElement(i.value + k, (i, k))

    def f1(self, a: IdealElement) -> Any:
        i, k = a.witness
        return self.parent.f1(i) + apply_rule(self.rule, k)

    def ideal_element(self, value: Any, witness: Any = None) -> IdealElement:
        if witness is None:
            raise NotInIdeal("elements of a derived ideal need an (I-part, kernel part) witness")
        i, k = witness
        if not self.kernel.contains(k):
            raise NotInIdeal(f"{k} is not in {self.kernel.name}")
        i = self.parent.ideal_element(i.value, i.witness)
        if i.value + k != value:
            raise NotInIdeal(f"{value} is not the sum of its witness parts")
        return IdealElement(value, (i, k))

    def from_kernel(self, k: Any) -> IdealElement:
        """A kernel element as an ideal element."""
        return self.combine(self.parent.ideal_zero(), k)

    def ideal_zero(self) -> IdealElement:
        return self.from_kernel(self.kernel.zero())

    def ideal_add(self, a: IdealElement, b: IdealElement) -> IdealElement:
        (i1, k1), (i2, k2) = a.witness, b.witness
        return self.combine(self.parent.ideal_add(i1, i2), k1 + k2)

    def ideal_scale(self, s: Any, a: IdealElement) -> IdealElement:
        i, k = a.witness
        return self.combine(self.parent.ideal_scale(s, i), s * k)

    def ideal_generators(self) -> List[IdealElement]:
        zero = self.kernel.zero()
        lifted = [self.combine(g, zero) for g in self.parent.ideal_generators()]
        return lifted + [self.from_kernel(k) for k in self.kernel.generators()]

    def sample_ideal(self, rng: np.random.Generator) -> IdealElement:
        return self.combine(self.parent.sample_ideal(rng), self.kernel.random(rng))

    def unit_witness(self) -> IdealElement:
        return self.combine(self.parent.unit_witness(), self.kernel.zero())

    def reduce_to_R(self, x: Any) -> TruncatedSeries:
        if isinstance(x, WittVector):
            return x.coords[0].quotient_map(self.residue_ring)
        return x.map_into(self.residue_ring)

    def ring_generators(self) -> List[Any]:
        return self.parent.ring_generators()

    def kernel_representatives(self) -> List[Any]:
        """Kernel elements representing (I + 𝔞)/I, one per class."""
        e = getattr(self.parent, "e", 0)
        return self.kernel.representatives(e)

    def parameters(self) -> Dict[str, Any]:
        params = {"kind": self.kind, "parent": self.parent.kind}
        params.update({k: v for k, v in self.parent.parameters().items() if k != "kind"})
        params["R"] = self.residue_ring.describe()
        params.update({"kernel": self.kernel.name, "rule": self.rule, "nu": self.certificate.nilpotency})
        return params


# -- builders ------------------------------------------------------------------


def build_breuil_frame(
    p: int,
    eisenstein: Sequence[int],
    a: int,
    t_truncs: Sequence[Union[int, str]] = (),
    N: Optional[int] = None,
    budget: int = DEFAULT_BUDGET,
) -> BreuilFrame:
    """Build B_a for E = u^e + a_{e-1} u^{e-1} + ... + a_0.

    Parameters
    ----------
    p : int
        The prime, at least 3.
    eisenstein : sequence of int
        a_0, ..., a_{e-1}; every a_i divisible by p and a_0/p a unit.
    a : int
        The level, S = 𝔖_a = 𝔖/u^{ae}.
    t_truncs : sequence of int or "inf"
        Truncation exponents of t_1..t_r.
    N : int, optional
        p-adic precision of S. Defaults to ``a + budget``, enough for the
        canonical morphism to Dieudonné frames of length ``budget`` at levels
        a and a + 1.
    budget : int
        Witt length the default precision is sized for.
    """
    if p == 2:
        raise BadPrime("Breuil frames need p >= 3")
    if a < 1:
        raise ValueError(f"level a must be a positive integer: {a}")
    eisenstein = tuple(int(c) for c in eisenstein)
    check_eisenstein(p, eisenstein)
    e = len(eisenstein)
    t_truncs = tuple(resolve_truncation(n) for n in t_truncs)
    N = N if N is not None else a + budget
    if N < a:
        raise PrecisionExhausted(f"precision N = {N} cannot carry R_{a}, which needs N >= {a}")
    ring = RingSpec(p, N, t_truncs, a * e)
    t_count = len(ring.t_truncs)
    coefficients = {_u_exponent(i, t_count): c for i, c in enumerate(eisenstein)}
    coefficients[_u_exponent(e, t_count)] = 1
    E = ring.element(coefficients)
    residue = breuil_residue_ring(p, eisenstein, a, ring.t_truncs)
    frame = BreuilFrame(ring, E, residue, eisenstein, a)
    log.info(f"built Breuil frame over {ring.describe()} with pi = {frame.pi}")
    return frame


def build_dieudonne_frame(base: RingSpec, budget: int = DEFAULT_BUDGET) -> DieudonneFrame:
    """Build F_R with S = W_budget(R) for an Artinian ring R."""
    if budget < 2:
        raise PrecisionExhausted(f"Dieudonné frames need a Witt length budget >= 2, got {budget}")
    frame = DieudonneFrame(WittRing(base, budget))
    log.info(f"built Dieudonné frame over {frame.ring.describe()}")
    return frame


def build_c_frame(n: Sequence[Union[int, str]], p: int, N: int) -> CFrame:
    """Build C_n over Z/p^N[t_1..t_{r+1}]/(t_i^{n_i})."""
    truncs = tuple(resolve_truncation(k) for k in n)
    ring = RingSpec(p, N, truncs)
    residue = RingSpec(p, 1, truncs)
    return CFrame(ring, ring.from_int(p), residue)


def kernel_certificate(frame: Frame, kernel: Kernel, rule: str) -> KernelCertificate:
    """Check 𝔞² = 0, f(𝔞) = 0 and nilpotency of the rule on kernel generators."""
    gens = kernel.generators()
    square_zero = all((g * h).is_zero() for g in gens for h in gens)
    frobenius_kills = all(frame.f(g).is_zero() for g in gens)
    bound = (kernel.ring.length if isinstance(kernel, WittKernel) else 1) + 1
    nilpotency: Optional[int] = 1
    for g in gens:
        x, steps = g, 0
        while not x.is_zero():
            if steps > bound:
                nilpotency = None
                break
            x = apply_rule(rule, x)
            steps += 1
        if nilpotency is None:
            break
        nilpotency = max(nilpotency, steps)
    return KernelCertificate(square_zero, frobenius_kills, nilpotency)


def derive_deformation_frame(frame: Frame, kernel: Kernel, rule: str = ZERO_RULE) -> DerivedFrame:
    """Enlarge the ideal of ``frame`` by ``kernel`` and extend f1 by ``rule``.

    Raises :class:`RuleInconsistent` when the rule disagrees with f1 on the
    intersection of the kernel with I.
    """
    if isinstance(kernel, UValuationKernel) and rule != ZERO_RULE:
        raise SpecMismatch(f"rule {rule!r} does not apply to {kernel.name}")
    for a in kernel.meet_ideal(frame):
        lhs = frame.f1(a)
        rhs = apply_rule(rule, a.value)
        if not agree(lhs, rhs):
            raise RuleInconsistent(
                f"f1({a.value}) = {lhs} but the {rule} rule gives {rhs} on {kernel.name}"
            )
    if kernel.quotient is None:
        raise SpecMismatch(f"no quotient ring recorded for {kernel.name}")
    certificate = kernel_certificate(frame, kernel, rule)
    derived = DerivedFrame(frame, kernel, rule, kernel.quotient, certificate)
    log.info(f"derived {frame.kind} frame with kernel {kernel.name}, certificate {certificate}")
    return derived


def breuil_deformation(upper: BreuilFrame, a: Optional[int] = None) -> DerivedFrame:
    """B' = (𝔖_{a'}, I + u^{ae}𝔖_{a'}, R_a, f, f1') with f1' = 0 on the kernel.

    ``a`` defaults to one below the level a' of ``upper``.
    """
    a = upper.level - 1 if a is None else a
    if not 1 <= a < upper.level:
        raise ValueError(f"level {a} must satisfy 1 <= a < {upper.level}")
    quotient = breuil_residue_ring(upper.p, upper.eisenstein, a, upper.ring.t_truncs)
    kernel = UValuationKernel(upper.ring, a * upper.e, quotient)
    return derive_deformation_frame(upper, kernel, ZERO_RULE)


def dieudonne_deformation(upper: DieudonneFrame, a: int) -> DerivedFrame:
    """F' = (W(R_{a+1}), I + Ŵ(p^a R_{a+1}), R_a, f, f1') with the shift rule on the kernel."""
    base = upper.ring.base
    if a < 1 or a >= base.N:
        raise ValueError(f"level {a} must satisfy 1 <= a < {base.N}")
    ideal = SquareZeroIdeal.p_power(base, a)
    kernel = WittKernel(upper.ring, ideal, base.with_precision(a))
    return derive_deformation_frame(upper, kernel, SHIFT_RULE)


def _check_levels(levels: Sequence[int]) -> Tuple[int, ...]:
    levels = tuple(int(a) for a in levels)
    if not levels or levels[-1] < 1 or any(x <= y for x, y in zip(levels, levels[1:])):
        raise ValueError(f"levels must be strictly decreasing positive integers: {levels}")
    return levels


def breuil_tower(
    p: int,
    eisenstein: Sequence[int],
    levels: Sequence[int],
    t_truncs: Sequence[Union[int, str]] = (),
    budget: int = DEFAULT_BUDGET,
) -> List[BreuilFrame]:
    """B_a for each of the decreasing ``levels``, all at precision max(levels) + budget."""
    levels = _check_levels(levels)
    N = levels[0] + budget
    return [build_breuil_frame(p, eisenstein, a, t_truncs, N=N, budget=budget) for a in levels]


def dieudonne_tower(
    p: int,
    levels: Sequence[int],
    t_truncs: Sequence[Union[int, str]] = (),
    eisenstein: Optional[Sequence[int]] = None,
    budget: int = DEFAULT_BUDGET,
) -> List[DieudonneFrame]:
    """F_{R_a} for each of the decreasing ``levels``.

    R_a is the Breuil residue ring of ``eisenstein`` when it is given and
    Z/p^a[t]/(t^n) otherwise.
    """
    levels = _check_levels(levels)
    truncs = tuple(resolve_truncation(n) for n in t_truncs)
    frames = []
    for a in levels:
        if eisenstein is not None:
            base = breuil_residue_ring(p, tuple(eisenstein), a, truncs)
        else:
            base = RingSpec(p, a, truncs)
        frames.append(build_dieudonne_frame(base, budget))
    return frames


# -- axiom checks --------------------------------------------------------------


def check_frame_axioms(
    frame: Frame, samples: int = 10, rng: Optional[np.random.Generator] = None
) -> Report:
    """Verify the frame axioms on generators and random samples.

    Failures are recorded in the returned report, never raised.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    report = Report(f"frame-check {frame.kind}", {"frame": frame.describe().replace("\n", "; ")})
    pi = frame.pi
    elements = frame.ideal_generators() + [frame.sample_ideal(rng) for _ in range(samples)]
    for a in elements:
        report.guard(
            "pi-relation",
            lambda: frame.f(a.value) == pi * frame.f1(a),
            lambda: f"f({a}) = {frame.f(a.value)} but pi*f1 = {pi * frame.f1(a)}",
        )
        report.guard(
            "ideal-membership",
            lambda: frame.in_ideal(a.value),
            lambda: f"{a} does not reduce to 0 in {frame.residue_ring.describe()}",
        )
    a_star = frame.unit_witness()
    report.guard("unit-witness", lambda: frame.f1(a_star) == 1, f"f1({a_star}) != 1")
    for _ in range(samples):
        s, x, y = frame.random(rng), frame.random(rng), frame.random(rng)
        a, b = frame.sample_ideal(rng), frame.sample_ideal(rng)
        report.guard(
            "f1-additive",
            lambda: frame.f1(frame.ideal_add(a, b)) == frame.f1(a) + frame.f1(b),
            lambda: f"f1({a} + {b})",
        )
        report.guard(
            "f1-f-linear",
            lambda: frame.f1(frame.ideal_scale(s, a)) == frame.f(s) * frame.f1(a),
            lambda: f"f1(({s}) * ({a}))",
        )
        report.guard(
            "frobenius-hom",
            lambda: frame.f(x * y) == frame.f(x) * frame.f(y) and frame.f(x + y) == frame.f(x) + frame.f(y),
            lambda: f"x = {x}, y = {y}",
        )
    ring = frame.ring
    if isinstance(ring, RingSpec):
        basis = [ring.element({exp: 1}) for exp in ring.monomials]
        for m1 in basis:
            for m2 in basis:
                report.guard(
                    "truncation-stable",
                    lambda: frame.f(m1 * m2) == frame.f(m1) * frame.f(m2),
                    lambda: f"f({m1} * {m2})",
                )
    else:
        short = ring.length - 1
        for _ in range(samples):
            x = frame.random(rng)
            report.guard(
                "truncation-stable",
                lambda: frame.f(x.truncate(short).verschiebung()) == (x * frame.p).truncate(short),
                lambda: f"f(v({x})) != p*{x}",
            )
    if isinstance(frame, DerivedFrame):
        cert = frame.certificate
        report.check("kernel-square-zero", cert.square_zero, f"{frame.kernel.name} squared is not 0")
        report.check("kernel-frobenius", cert.frobenius_kills, f"f does not kill {frame.kernel.name}")
        report.check("kernel-nilpotent", cert.nilpotency is not None, f"rule is not nilpotent on {frame.kernel.name}")
    return report
