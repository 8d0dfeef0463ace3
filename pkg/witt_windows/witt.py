"""Truncated p-typical Witt vectors over truncated series rings.

Arithmetic goes through ghost components: coordinates are lifted to the
same ring with p-adic headroom, the operation is carried out on ghost
components, and coordinates are recovered one by one with exact division
by p^k. With headroom ``N + length + 1`` every recovered coordinate is
correct modulo p^N.

Precision model: a vector carries its length. Sums and products of vectors
of different lengths live at the smaller length; Frobenius and the shift
``f1`` consume one unit of length, Verschiebung adds one. Equality is only
defined between vectors of the same length: comparing across lengths goes
through ``truncate`` or ``agrees_with``.

At finite length over an Artinian base the subring 𝕎(R) and W(R) have the
same truncations, so everything here computes in truncated W(R).
"""

import itertools

from dataclasses import dataclass
from functools import lru_cache
from logging import getLogger
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    IdealNotSquareZero,
    NotAUnit,
    NotInIdeal,
    PrecisionExhausted,
    RingNotFinite,
    SpecMismatch,
)
from .ring import ENUMERATION_LIMIT, RingSpec, TruncatedSeries, smith_solve


log = getLogger("witt-windows")

_NEWTON_MAX_STEPS = 64


def _lift_spec(base: RingSpec, length: int) -> RingSpec:
    return base.with_precision(base.N + length + 1)


def divide_by_p_power(x: TruncatedSeries, k: int) -> TruncatedSeries:
    """Exact division of every coefficient by p^k, inside the same ring."""
    q = x.spec.p**k
    coefficients = {}
    for exp, c in x.terms:
        if c % q:
            raise PrecisionExhausted(
                f"coefficient {c} of {x} is not divisible by {x.spec.p}^{k}; headroom too small"
            )
        coefficients[exp] = c // q
    return x.spec.element(coefficients)


def ghost_from_lifts(lifts: Sequence[TruncatedSeries]) -> List[TruncatedSeries]:
    """Ghost components w_0..w_{n-1} of lifted coordinates, in their ring."""
    if not lifts:
        return []
    p = lifts[0].spec.p
    n = len(lifts)
    powers = list(lifts)
    ghosts = []
    for k in range(n):
        w = lifts[0].spec.zero()
        for i in range(k + 1):
            w = w + powers[i] * p**i
        ghosts.append(w)
        powers = [x**p if i <= k else x for i, x in enumerate(powers)]
    return ghosts


def solve_ghost_lifts(ghosts: Sequence[TruncatedSeries]) -> List[TruncatedSeries]:
    """Coordinates (in the lift ring) of the vector with the given ghost components."""
    if not ghosts:
        return []
    p = ghosts[0].spec.p
    coords: List[TruncatedSeries] = []
    for k, g in enumerate(ghosts):
        rest = g
        for i, x in enumerate(coords):
            rest = rest - (x ** (p ** (k - i))) * p**i
        coords.append(divide_by_p_power(rest, k))
    return coords


@dataclass(frozen=True)
class WittRing:
    """The ring W_n(R) of Witt vectors of length ``length`` over ``base``."""

    base: RingSpec
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"Witt length must be >= 1: {self.length}")

    @property
    def p(self) -> int:
        """The prime."""
        return self.base.p

    @property
    def headroom(self) -> int:
        """p-adic precision of the lift used for ghost computations."""
        return _lift_spec(self.base, self.length).N

    def describe(self) -> str:
        """Short human readable name."""
        return f"W_{self.length}({self.base.describe()})"

    def vector(self, coords: Sequence[Union[int, TruncatedSeries]]) -> "WittVector":
        """A vector from coordinates; integers are read in the base ring."""
        coords = tuple(self.base.from_int(c) if isinstance(c, int) else c for c in coords)
        return WittVector(self.base, coords)

    def zero(self) -> "WittVector":
        """Additive identity."""
        return WittVector(self.base, (self.base.zero(),) * self.length)

    def one(self) -> "WittVector":
        """Multiplicative identity."""
        return self.teichmuller(self.base.one())

    @lru_cache(maxsize=None)
    def from_int(self, value: int) -> "WittVector":
        """The image of an integer, i.e. the vector with all ghost components ``value``."""
        return cartier_delta(value, self.length, self.base)

    def teichmuller(self, x: TruncatedSeries) -> "WittVector":
        """The multiplicative representative [x]."""
        return teichmuller(x, self.length)

    def random(self, rng: np.random.Generator, density: float = 1.0) -> "WittVector":
        """A vector with random coordinates."""
        return WittVector(self.base, tuple(self.base.random(rng, density) for _ in range(self.length)))

    def elements(self, limit: int = ENUMERATION_LIMIT) -> Iterator["WittVector"]:
        """Every vector of a small Witt ring."""
        if self.base.size**self.length > limit:
            raise RingNotFinite(f"{self.describe()} is too large to enumerate")
        base_elements = list(self.base.elements(limit))
        for coords in itertools.product(base_elements, repeat=self.length):
            yield WittVector(self.base, coords)

    def residue(self, x: "WittVector") -> int:
        """Image in F_p."""
        return x.residue()

    def frobenius(self, x: "WittVector") -> "WittVector":
        """Witt Frobenius (drops one unit of length)."""
        return x.frobenius()

    def invert_unit(self, x: "WittVector") -> "WittVector":
        """Inverse of a unit."""
        return x.invert_unit()

    def ghost_solve(self, ghosts: Sequence[TruncatedSeries]) -> "WittVector":
        """The vector whose ghost components are ``ghosts`` (elements of the base ring).

        Raises :class:`PrecisionExhausted` when the tuple is not a ghost tuple.
        """
        lift = _lift_spec(self.base, len(ghosts))
        lifted = [g.lift(lift.N) for g in ghosts]
        coords = solve_ghost_lifts(lifted)
        return WittVector(self.base, tuple(c.quotient_map(self.base) for c in coords))


@dataclass(frozen=True, eq=False)
class WittVector:
    """A Witt vector with explicit length over the coordinate ring ``base``."""

    base: RingSpec
    coords: Tuple[TruncatedSeries, ...]

    def __post_init__(self):
        if not self.coords:
            raise PrecisionExhausted("Witt vector of length 0")
        if any(c.spec != self.base for c in self.coords):
            raise SpecMismatch("coordinates must lie in the base ring")

    @property
    def length(self) -> int:
        """Tracked length."""
        return len(self.coords)

    @property
    def ring(self) -> WittRing:
        """The Witt ring at this vector's length."""
        return WittRing(self.base, self.length)

    def truncate(self, length: int) -> "WittVector":
        """The image in W_length(R)."""
        if length > self.length:
            raise PrecisionExhausted(f"cannot extend length {self.length} to {length}")
        return WittVector(self.base, self.coords[:length])

    def is_zero(self) -> bool:
        """True if all coordinates vanish."""
        return all(c.is_zero() for c in self.coords)

    def residue(self) -> int:
        """Image of the first coordinate in F_p."""
        return self.coords[0].residue()

    def is_unit(self) -> bool:
        """True when the residue is nonzero."""
        return self.residue() != 0

    def _lifts(self, length: Optional[int] = None) -> List[TruncatedSeries]:
        length = length or self.length
        N = _lift_spec(self.base, length).N
        return [c.lift(N) for c in self.coords[:length]]

    def ghost(self) -> List[TruncatedSeries]:
        """Ghost components w_0..w_{n-1} reduced into the base ring."""
        return [g.quotient_map(self.base) for g in ghost_from_lifts(self._lifts())]

    def _coerce(self, other) -> "WittVector":
        if isinstance(other, int):
            return self.ring.from_int(other)
        if not isinstance(other, WittVector):
            raise TypeError(f"cannot combine a Witt vector with {type(other)}")
        if other.base != self.base:
            raise SpecMismatch(f"{self.base.describe()} vs {other.base.describe()}")
        return other

    def _combine(self, other, op) -> "WittVector":
        other = self._coerce(other)
        n = min(self.length, other.length)
        ghosts = [op(a, b) for a, b in zip(ghost_from_lifts(self._lifts(n)), ghost_from_lifts(other._lifts(n)))]
        coords = solve_ghost_lifts(ghosts)
        return WittVector(self.base, tuple(c.quotient_map(self.base) for c in coords))

    def __add__(self, other) -> "WittVector":
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other) -> "WittVector":
        return self._combine(other, lambda a, b: a - b)

    def __rsub__(self, other) -> "WittVector":
        return self._coerce(other) - self

    def __mul__(self, other) -> "WittVector":
        return self._combine(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self) -> "WittVector":
        coords = solve_ghost_lifts([-g for g in ghost_from_lifts(self._lifts())])
        return WittVector(self.base, tuple(c.quotient_map(self.base) for c in coords))

    def __pow__(self, power: int) -> "WittVector":
        if power < 0:
            return self.invert_unit() ** (-power)
        result = self.ring.one()
        square = self
        while power:
            if power & 1:
                result = result * square
            power >>= 1
            if power:
                square = square * square
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.ring.from_int(other)
        if not isinstance(other, WittVector):
            return NotImplemented
        if self.length != other.length:
            raise SpecMismatch(f"cannot compare Witt vectors of lengths {self.length} and {other.length}")
        return self.base == other.base and self.coords == other.coords

    def agrees_with(self, other: "WittVector") -> bool:
        """Equality of the images in W_n(R) for n the smaller of the two lengths."""
        n = min(self.length, other.length)
        return self.truncate(n) == other.truncate(n)

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + f")@len={self.length}"

    def __repr__(self) -> str:
        return f"WittVector{self}"

    def frobenius(self) -> "WittVector":
        """The vector with ghost components (w_1, ..., w_{n-1}); length drops by one."""
        if self.length < 2:
            raise PrecisionExhausted("Frobenius needs a vector of length >= 2")
        ghosts = ghost_from_lifts(self._lifts())[1:]
        coords = solve_ghost_lifts(ghosts)
        return WittVector(self.base, tuple(c.quotient_map(self.base) for c in coords))

    def verschiebung(self) -> "WittVector":
        """(0, x_0, ..., x_{n-1}); length grows by one."""
        return WittVector(self.base, (self.base.zero(),) + self.coords)

    def f1_shift(self) -> "WittVector":
        """Inverse Verschiebung on vectors with vanishing first coordinate."""
        if not self.coords[0].is_zero():
            raise NotInIdeal(f"{self} does not have first coordinate 0")
        if self.length < 2:
            raise PrecisionExhausted("f1 of a vector of length 1 is empty")
        return WittVector(self.base, self.coords[1:])

    def invert_unit(self) -> "WittVector":
        """Inverse by Newton iteration from the Teichmüller inverse of x_0."""
        if not self.is_unit():
            raise NotAUnit(f"{self} has zero residue")
        y = teichmuller(self.coords[0].invert_unit(), self.length)
        one = self.ring.one()
        for step in range(_NEWTON_MAX_STEPS):
            error = one - self * y
            if error.is_zero():
                log.debug(f"Witt inverse converged after {step} Newton steps")
                return y
            y = y * (one + error)
        raise PrecisionExhausted(f"Newton inversion of {self} did not converge")

    def map_coordinates(self, target: RingSpec) -> "WittVector":
        """Apply the coordinatewise reduction W(R) -> W(R') for a quotient R'."""
        return WittVector(target, tuple(c.quotient_map(target) for c in self.coords))

    def lift_coordinates(self, target: RingSpec) -> "WittVector":
        """A coordinatewise set-theoretic section of W(R') -> W(R), R' = target."""
        return WittVector(target, tuple(c.lift(target.N) for c in self.coords))


def ghost(x: WittVector) -> List[TruncatedSeries]:
    """Ghost components of ``x``."""
    return x.ghost()


def agree(x, y) -> bool:
    """Equality of frame values; Witt vectors are compared at their common length."""
    if isinstance(x, WittVector) and isinstance(y, WittVector):
        return x.agrees_with(y)
    return x == y


def teichmuller(x: TruncatedSeries, length: int) -> WittVector:
    """The Teichmüller representative (x, 0, ..., 0)."""
    zero = x.spec.zero()
    return WittVector(x.spec, (x,) + (zero,) * (length - 1))


def verschiebung(x: WittVector) -> WittVector:
    """Verschiebung."""
    return x.verschiebung()


def witt_frobenius(x: WittVector) -> WittVector:
    """Witt vector Frobenius."""
    return x.frobenius()


def f1_shift(x: WittVector) -> WittVector:
    """Inverse of Verschiebung on the kernel of the first coordinate."""
    return x.f1_shift()


def cartier_delta(c: int, length: int, base: RingSpec) -> WittVector:
    """The vector over ``base`` all of whose ghost components equal the integer ``c``.

    This is the image of ``c`` under the diagonal section W(k) -> W(W(k))
    followed by the map to W(R). ``c`` must be known to precision at least
    ``base.N + length - 1`` for the answer to be well defined; callers keep
    track of that.
    """
    lift = _lift_spec(base, length)
    ghosts = [lift.from_int(c)] * length
    coords = solve_ghost_lifts(ghosts)
    return WittVector(base, tuple(x.quotient_map(base) for x in coords))


# -- hat-Witt vectors on square-zero ideals -----------------------------------


@dataclass(frozen=True)
class SquareZeroIdeal:
    """An ideal of ``base`` given by generators, with vanishing square."""

    base: RingSpec
    generators: Tuple[TruncatedSeries, ...]
    name: str = "b"

    def __post_init__(self):
        for g in self.generators:
            if g.spec != self.base:
                raise SpecMismatch("generators must lie in the base ring")
        for g in self.generators:
            for h in self.generators:
                if not (g * h).is_zero():
                    raise IdealNotSquareZero(f"{g} * {h} = {g * h} is not zero")

    @classmethod
    def p_power(cls, base: RingSpec, k: int) -> "SquareZeroIdeal":
        """The ideal p^k R."""
        return cls(base, (base.from_int(base.p**k),), name=f"p^{k}R")

    def contains(self, x: TruncatedSeries) -> bool:
        """Membership, by solving x = sum c_j g_i m_j over Z/p^N."""
        if x.is_zero():
            return True
        basis = self.base.monomials
        columns = [g * self.base.element({exp: 1}) for g in self.generators for exp in basis]
        if not columns:
            return False
        matrix = [[col.coefficient(row) for col in columns] for row in basis]
        rhs = [x.coefficient(row) for row in basis]
        return smith_solve(matrix, rhs, self.base.p, self.base.N) is not None

    def elements(self, limit: int = ENUMERATION_LIMIT) -> List[TruncatedSeries]:
        """All elements of the ideal (small rings only)."""
        return [x for x in self.base.elements(limit) if self.contains(x)]


@dataclass(frozen=True, eq=False)
class LogVector:
    """Logarithmic coordinates [b_0, b_1, ...] of an element of Ŵ(𝔟).

    For square-zero 𝔟 all divided cross terms of the Witt polynomials vanish,
    so the logarithm is the identity on coordinates. Entries past the end are
    zero (finite support).
    """

    ideal: SquareZeroIdeal
    entries: Tuple[TruncatedSeries, ...]

    def __post_init__(self):
        for b in self.entries:
            if not self.ideal.contains(b):
                raise NotInIdeal(f"{b} is not in {self.ideal.name}")

    def _padded(self, length: int) -> Tuple[TruncatedSeries, ...]:
        zero = self.ideal.base.zero()
        return self.entries + (zero,) * (length - len(self.entries))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogVector):
            return NotImplemented
        n = max(len(self.entries), len(other.entries))
        return self.ideal == other.ideal and self._padded(n) == other._padded(n)

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: "LogVector") -> "LogVector":
        n = max(len(self.entries), len(other.entries))
        return LogVector(self.ideal, tuple(a + b for a, b in zip(self._padded(n), other._padded(n))))

    def __neg__(self) -> "LogVector":
        return LogVector(self.ideal, tuple(-b for b in self.entries))

    def __str__(self) -> str:
        return "[" + ", ".join(str(b) for b in self.entries) + "]"

    def is_zero(self) -> bool:
        """True if every entry vanishes."""
        return all(b.is_zero() for b in self.entries)

    def act(self, x: WittVector) -> "LogVector":
        """The 𝕎(R)-module action [w_0(x) b_0, w_1(x) b_1, ...]."""
        if x.length < len(self.entries):
            raise PrecisionExhausted(
                f"acting vector has length {x.length} < {len(self.entries)} log entries"
            )
        ghosts = x.ghost()
        return LogVector(self.ideal, tuple(w * b for w, b in zip(ghosts, self.entries)))

    def f1_tilde(self) -> "LogVector":
        """[b_0, b_1, ...] -> [b_1, b_2, ...]."""
        return LogVector(self.ideal, self.entries[1:])

    def f1(self) -> "LogVector":
        """f1 on the intersection with the kernel of the first coordinate."""
        if self.entries and not self.entries[0].is_zero():
            raise NotInIdeal(f"{self} has nonzero first entry")
        return self.f1_tilde()

    def frobenius(self) -> "LogVector":
        """f = p * f1_tilde in logarithmic coordinates."""
        p = self.ideal.base.p
        return LogVector(self.ideal, tuple(b * p for b in self.entries[1:]))

    def exp(self, length: Optional[int] = None) -> WittVector:
        """The Witt vector in W(𝔟) with these logarithmic coordinates."""
        length = length or max(len(self.entries), 1)
        return WittVector(self.ideal.base, self._padded(length)[:length])


def log_vector(x: WittVector, ideal: SquareZeroIdeal) -> LogVector:
    """Logarithmic coordinates of a vector supported in the square-zero ideal."""
    if x.base != ideal.base:
        raise SpecMismatch("vector and ideal live over different rings")
    return LogVector(ideal, x.coords)
