"""Exact arithmetic in truncated power series rings over Z/p^N.

A :class:`RingSpec` names the ring

    Z/p^N [u, t_1, ..., t_r] / (u^m, t_1^{n_1}, ..., t_r^{n_r})

or, when a monic Eisenstein-type relation ``E`` is attached,

    Z/p^N [t_1, ..., t_r] / (t_i^{n_i}) [u] / (E)

which is how the rings R_a = S/(E, p^a) are represented. Elements are
:class:`TruncatedSeries` values in canonical form.
"""

import itertools

from dataclasses import dataclass, replace
from functools import cached_property
from logging import getLogger
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from sympy import isprime

from .errors import (
    BadPrime,
    NotAUnit,
    NotDivisible,
    PrecisionExhausted,
    RingNotFinite,
    SpecMismatch,
)


log = getLogger("witt-windows")

Exponent = Tuple[int, ...]
Terms = Tuple[Tuple[Exponent, int], ...]
Scalar = Union[int, "TruncatedSeries"]

#: Working bound substituted for an infinite truncation exponent.
INFINITE_TRUNCATION_BOUND = 4

#: Largest ring the enumeration helpers agree to walk through.
ENUMERATION_LIMIT = 3**8

_NEWTON_MAX_STEPS = 64


def resolve_truncation(value: Union[int, str, None]) -> int:
    """Map ``inf``/``None`` to :data:`INFINITE_TRUNCATION_BOUND`."""
    if value is None or (isinstance(value, str) and value.strip().lower() in ("inf", "∞")):
        return INFINITE_TRUNCATION_BOUND
    value = int(value)
    if value < 1:
        raise ValueError(f"truncation exponents must be >= 1: {value}")
    return value


def monomial_order(exponent: Exponent) -> Tuple[int, Exponent]:
    """Graded lexicographic sort key."""
    return (sum(exponent), exponent)


def random_residue(rng: np.random.Generator, p: int, N: int) -> int:
    """Uniform residue modulo p^N drawn digit by digit."""
    return sum(int(rng.integers(0, p)) * p**i for i in range(N))


@dataclass(frozen=True)
class RingSpec:
    """Parameters of a truncated series ring.

    Parameters
    ----------
    p : int
        The prime.
    N : int
        p-adic precision, coefficients live in Z/p^N.
    t_truncs : tuple of int
        Truncation exponents n_1..n_r of the variables t_1..t_r.
    u_trunc : int
        Truncation exponent m of u; ``0`` means there is no u variable
        unless a relation is given.
    relation : tuple
        Canonical terms of a monic polynomial E in u (coefficients may involve
        the t variables). When present, u is reduced modulo E instead of being
        truncated and ``u_trunc`` must be 0.
    """

    p: int
    N: int
    t_truncs: Tuple[int, ...] = ()
    u_trunc: int = 0
    relation: Terms = ()

    def __post_init__(self):
        if not isinstance(self.p, int) or not isprime(self.p):
            raise BadPrime(f"p must be a prime: {self.p!r}")
        if self.N < 1:
            raise ValueError(f"p-adic precision N must be >= 1: {self.N}")
        if any(n < 1 for n in self.t_truncs):
            raise ValueError(f"truncation exponents must be >= 1: {self.t_truncs}")
        if self.u_trunc < 0:
            raise ValueError(f"u truncation must be >= 0: {self.u_trunc}")
        if self.relation:
            if self.u_trunc:
                raise SpecMismatch("a ring with a relation in u cannot also truncate u")
            degree = max(exp[0] for exp, _ in self.relation)
            lead = [c for exp, c in self.relation if exp[0] == degree]
            lead_exp = (degree,) + (0,) * len(self.t_truncs)
            if degree < 1 or lead != [1] or dict(self.relation).get(lead_exp) != 1:
                raise SpecMismatch(f"relation must be monic in u: {self.relation}")

    @classmethod
    def with_relation(cls, E: "TruncatedSeries", N: int) -> "RingSpec":
        """The ring Z/p^N[t]/(t^n)[u]/(E) for a series E over a ring with u."""
        spec = E.spec
        if not spec.has_u or spec.relation:
            raise SpecMismatch("E must live in a ring with a truncated u variable")
        return cls(spec.p, N, spec.t_truncs, 0, E.terms)

    @property
    def modulus(self) -> int:
        """The coefficient modulus p^N."""
        return self.p**self.N

    @property
    def has_u(self) -> bool:
        """True if the ring has a u variable."""
        return self.u_trunc > 0 or bool(self.relation)

    @property
    def e(self) -> int:
        """Degree of the relation in u, or 0."""
        if not self.relation:
            return 0
        return max(exp[0] for exp, _ in self.relation)

    @property
    def variables(self) -> Tuple[str, ...]:
        """Variable names in exponent order, u first."""
        names = tuple(f"t{i + 1}" for i in range(len(self.t_truncs)))
        return ("u",) + names if self.has_u else names

    @property
    def bounds(self) -> Tuple[int, ...]:
        """Exclusive exponent bounds of the canonical basis monomials."""
        if self.has_u:
            return (self.u_trunc or self.e,) + self.t_truncs
        return self.t_truncs

    @cached_property
    def monomials(self) -> Tuple[Exponent, ...]:
        """Basis monomials in graded-lex order."""
        exps = itertools.product(*(range(b) for b in self.bounds))
        return tuple(sorted(exps, key=monomial_order))

    @property
    def size(self) -> int:
        """Number of elements of the ring."""
        return self.modulus ** len(self.monomials)

    def with_precision(self, N: int) -> "RingSpec":
        """The same ring with coefficients modulo p^N."""
        return replace(self, N=N)

    def describe(self) -> str:
        """Short human readable name of the ring."""
        gens = ",".join(self.variables)
        base = f"Z/{self.p}^{self.N}"
        if gens:
            base += f"[{gens}]"
        rels = [f"{v}^{b}" for v, b in zip(self.variables, self.bounds)]
        if self.relation:
            rels[0] = f"E={TruncatedSeries(self, self.relation)}"
        return base + (f"/({', '.join(rels)})" if rels else "")

    def is_quotient_of(self, other: "RingSpec") -> bool:
        """True if this ring is a coefficientwise quotient of ``other``."""
        return (
            self.p == other.p
            and self.variables == other.variables
            and self.N <= other.N
            and self.relation == other.relation
            and all(b <= c for b, c in zip(self.bounds, other.bounds))
        )

    # -- element construction -------------------------------------------------

    def element(self, coefficients: Mapping[Exponent, int]) -> "TruncatedSeries":
        """Return the canonical element with the given (unreduced) coefficients."""
        raw: Dict[Exponent, int] = {}
        nvars = len(self.variables)
        for exp, c in coefficients.items():
            if len(exp) != nvars:
                raise SpecMismatch(f"exponent {exp} does not fit {self.describe()}")
            if not self._t_in_bounds(exp):
                continue
            if not self.relation and not all(k < b for k, b in zip(exp, self.bounds)):
                continue
            raw[exp] = raw.get(exp, 0) + c
        if self.relation:
            raw = self._reduce_relation(raw)
        m = self.modulus
        terms = sorted(
            ((exp, c % m) for exp, c in raw.items() if c % m), key=lambda t: monomial_order(t[0])
        )
        return TruncatedSeries(self, tuple(terms))

    def _t_in_bounds(self, exp: Exponent) -> bool:
        offset = 1 if self.has_u else 0
        return all(k < b for k, b in zip(exp[offset:], self.t_truncs))

    def _reduce_relation(self, raw: Dict[Exponent, int]) -> Dict[Exponent, int]:
        e = self.e
        rest = [(exp, c) for exp, c in self.relation if exp[0] < e]
        raw = dict(raw)
        while True:
            high = [exp for exp, c in raw.items() if exp[0] >= e and c]
            if not high:
                break
            exp = max(high)
            c = raw.pop(exp)
            shift = exp[0] - e
            for rexp, rc in rest:
                new = (shift + rexp[0],) + tuple(a + b for a, b in zip(exp[1:], rexp[1:]))
                if self._t_in_bounds(new):
                    raw[new] = raw.get(new, 0) - c * rc
        return raw

    def zero(self) -> "TruncatedSeries":
        """Additive identity."""
        return TruncatedSeries(self, ())

    def one(self) -> "TruncatedSeries":
        """Multiplicative identity."""
        return self.from_int(1)

    def from_int(self, value: int) -> "TruncatedSeries":
        """The image of an integer."""
        return self.element({(0,) * len(self.variables): value})

    def var(self, name: str) -> "TruncatedSeries":
        """The variable called ``name``."""
        return self.monomial(name, 1)

    def monomial(self, name: str, power: int, coefficient: int = 1) -> "TruncatedSeries":
        """``coefficient * name^power``."""
        if name not in self.variables:
            raise SpecMismatch(f"{self.describe()} has no variable {name!r}")
        exp = [0] * len(self.variables)
        exp[self.variables.index(name)] = power
        return self.element({tuple(exp): coefficient})

    def random(self, rng: np.random.Generator, density: float = 1.0) -> "TruncatedSeries":
        """A random element; each basis monomial is kept with probability ``density``."""
        coefficients = {}
        for exp in self.monomials:
            if density < 1.0 and rng.random() >= density:
                continue
            coefficients[exp] = random_residue(rng, self.p, self.N)
        return self.element(coefficients)

    def elements(self, limit: int = ENUMERATION_LIMIT) -> Iterator["TruncatedSeries"]:
        """Enumerate every element of a small ring."""
        if self.size > limit:
            raise RingNotFinite(f"{self.describe()} has {self.size} elements, limit is {limit}")
        for coefficients in itertools.product(range(self.modulus), repeat=len(self.monomials)):
            yield self.element(dict(zip(self.monomials, coefficients)))

    # -- ring context protocol ------------------------------------------------

    def residue(self, x: "TruncatedSeries") -> int:
        """Image of ``x`` in the residue field F_p."""
        return x.residue()

    def frobenius(self, x: "TruncatedSeries") -> "TruncatedSeries":
        """The Frobenius lift u -> u^p, t_i -> t_i^p."""
        return x.frobenius()

    def invert_unit(self, x: "TruncatedSeries") -> "TruncatedSeries":
        """Inverse of a unit."""
        return x.invert_unit()


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """An element of a :class:`RingSpec` ring in canonical form.

    ``terms`` holds (exponent, coefficient) pairs in graded-lex order with
    coefficients reduced to nonzero least nonnegative residues. Construct
    values through :meth:`RingSpec.element`.
    """

    spec: RingSpec
    terms: Terms

    @cached_property
    def _coefficients(self) -> Dict[Exponent, int]:
        return dict(self.terms)

    def coefficient(self, exponent: Exponent) -> int:
        """Coefficient of a monomial."""
        return self._coefficients.get(tuple(exponent), 0)

    @property
    def constant_term(self) -> int:
        """Coefficient of the unit monomial."""
        return self.coefficient((0,) * len(self.spec.variables))

    def is_zero(self) -> bool:
        """True for the zero element."""
        return not self.terms

    def _coerce(self, other: Scalar) -> "TruncatedSeries":
        if isinstance(other, int):
            return self.spec.from_int(other)
        if not isinstance(other, TruncatedSeries):
            raise TypeError(f"cannot combine a series with {type(other)}")
        if other.spec != self.spec:
            raise SpecMismatch(f"{self.spec.describe()} vs {other.spec.describe()}")
        return other

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.spec.from_int(other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.spec == other.spec and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.spec, self.terms))

    def __add__(self, other: Scalar) -> "TruncatedSeries":
        other = self._coerce(other)
        raw = dict(self.terms)
        for exp, c in other.terms:
            raw[exp] = raw.get(exp, 0) + c
        return self.spec.element(raw)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return self.spec.element({exp: -c for exp, c in self.terms})

    def __sub__(self, other: Scalar) -> "TruncatedSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Scalar) -> "TruncatedSeries":
        return self._coerce(other) - self

    def __mul__(self, other: Scalar) -> "TruncatedSeries":
        other = self._coerce(other)
        spec = self.spec
        bounds = spec.bounds
        raw: Dict[Exponent, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                exp = tuple(a + b for a, b in zip(e1, e2))
                if spec.relation:
                    if not spec._t_in_bounds(exp):
                        continue
                elif not all(k < b for k, b in zip(exp, bounds)):
                    continue
                raw[exp] = raw.get(exp, 0) + c1 * c2
        return spec.element(raw)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "TruncatedSeries":
        if power < 0:
            return self.invert_unit() ** (-power)
        result = self.spec.one()
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.terms:
            factors = "".join(
                f"*{name}^{k}" for name, k in zip(self.spec.variables, exp) if k
            )
            parts.append(f"{c}{factors}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TruncatedSeries({self})"

    # -- structure maps -------------------------------------------------------

    def residue(self) -> int:
        """Image in F_p: the constant term modulo p."""
        return self.constant_term % self.spec.p

    def is_unit(self) -> bool:
        """True when the residue is nonzero."""
        return self.residue() != 0

    def frobenius(self) -> "TruncatedSeries":
        """Apply the ring endomorphism fixing Z/p^N with u -> u^p and t_i -> t_i^p."""
        if self.spec.relation:
            raise SpecMismatch("no Frobenius lift is attached to a ring with a relation")
        p = self.spec.p
        return self.spec.element({tuple(k * p for k in exp): c for exp, c in self.terms})

    def invert_unit(self) -> "TruncatedSeries":
        """Inverse by Newton iteration from the inverse of the constant term."""
        spec = self.spec
        if not self.is_unit():
            raise NotAUnit(f"{self} has zero residue")
        y = spec.from_int(pow(self.constant_term, -1, spec.modulus))
        for step in range(_NEWTON_MAX_STEPS):
            error = 1 - self * y
            if error.is_zero():
                log.debug(f"unit inverse converged after {step} Newton steps")
                return y
            y = y * (1 + error)
        raise PrecisionExhausted(f"Newton inversion of {self} did not converge")

    def quotient_map(self, target: RingSpec) -> "TruncatedSeries":
        """Reduce coefficientwise into a quotient ring with smaller bounds or precision."""
        if not target.is_quotient_of(self.spec):
            raise SpecMismatch(f"{target.describe()} is not a quotient of {self.spec.describe()}")
        return target.element(dict(self.terms))

    def lift(self, N: int) -> "TruncatedSeries":
        """Reinterpret the canonical coefficients modulo p^N with N at least the current precision."""
        if N < self.spec.N:
            raise SpecMismatch(f"cannot lift to smaller precision {N} < {self.spec.N}")
        return self.spec.with_precision(N).element(dict(self.terms))

    def map_into(
        self,
        target: RingSpec,
        rename: Optional[Mapping[str, str]] = None,
        lift: bool = False,
    ) -> "TruncatedSeries":
        """Substitute variables into ``target``.

        Every variable of the source is sent to the variable of ``target``
        with the same name, or to ``rename[name]``. Integer coefficients are
        carried over. Unless ``lift`` is set, the target precision must not
        exceed the source precision, which makes the map well defined.
        """
        rename = rename or {}
        source = self.spec
        if source.relation and not lift:
            raise SpecMismatch("maps out of a ring with a relation are only supported as lifts")
        if target.N > source.N and not lift:
            raise SpecMismatch(f"Z/{source.p}^{source.N} does not map to Z/{target.p}^{target.N}")
        positions = []
        for name in source.variables:
            image = rename.get(name, name)
            if image not in target.variables:
                raise SpecMismatch(f"{target.describe()} has no variable {image!r}")
            positions.append(target.variables.index(image))
        raw: Dict[Exponent, int] = {}
        width = len(target.variables)
        for exp, c in self.terms:
            new = [0] * width
            for pos, k in zip(positions, exp):
                new[pos] += k
            new_exp = tuple(new)
            raw[new_exp] = raw.get(new_exp, 0) + c
        return target.element(raw)

    def valuation(self, name: str) -> int:
        """Smallest exponent of variable ``name`` among the terms (large for zero)."""
        index = self.spec.variables.index(name)
        if not self.terms:
            return max(self.spec.bounds[index], 1) * 1000
        return min(exp[index] for exp, _ in self.terms)

    def divide_exact(
        self, d: "TruncatedSeries", witness: Optional["TruncatedSeries"] = None
    ) -> "TruncatedSeries":
        """Return q with d*q = self.

        With a ``witness`` the quotient is only verified. Otherwise the
        linear system of multiplication by ``d`` is solved over Z/p^N and
        the canonical smallest solution is returned.
        """
        d = self._coerce(d)
        if witness is not None:
            witness = self._coerce(witness)
            if d * witness != self:
                raise NotDivisible(f"witness {witness} does not satisfy ({d})*q = {self}")
            return witness
        spec = self.spec
        basis = spec.monomials
        columns = [(d * spec.element({exp: 1})) for exp in basis]
        matrix = [[col.coefficient(row) for col in columns] for row in basis]
        rhs = [self.coefficient(row) for row in basis]
        solution = smith_solve(matrix, rhs, spec.p, spec.N)
        if solution is None:
            raise NotDivisible(f"({d}) does not divide {self} in {spec.describe()}")
        return spec.element(dict(zip(basis, solution)))


def _valuation(value: int, p: int, N: int) -> int:
    value %= p**N
    if value == 0:
        return N
    v = 0
    while value % p == 0:
        value //= p
        v += 1
    return v


def smith_solve(matrix: Sequence[Sequence[int]], rhs: Sequence[int], p: int, N: int) -> Optional[List[int]]:
    """Solve ``matrix * x = rhs`` over Z/p^N, or return None.

    Diagonalises by pivots of minimal valuation (row and column operations),
    which over the chain ring Z/p^N gives a Smith form U*A*V = D. Free
    coordinates are set to zero, so the answer is deterministic.
    """
    m = p**N
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    a = [[int(v) % m for v in row] for row in matrix]
    b = [int(v) % m for v in rhs]
    # column transform V, kept as a list of columns acting on unknowns
    v_mat = [[int(i == j) for j in range(cols)] for i in range(cols)]
    rank = 0
    for k in range(min(rows, cols)):
        best = None
        for i in range(k, rows):
            for j in range(k, cols):
                if a[i][j]:
                    val = _valuation(a[i][j], p, N)
                    if best is None or val < best[0]:
                        best = (val, i, j)
        if best is None:
            break
        val, i, j = best
        a[k], a[i] = a[i], a[k]
        b[k], b[i] = b[i], b[k]
        for row in a:
            row[k], row[j] = row[j], row[k]
        for row in v_mat:
            row[k], row[j] = row[j], row[k]
        pivot = a[k][k]
        unit_inv = pow(pivot // p**val, -1, m)
        for i2 in range(rows):
            if i2 != k and a[i2][k]:
                factor = (a[i2][k] // p**val) * unit_inv % m
                a[i2] = [(x - factor * y) % m for x, y in zip(a[i2], a[k])]
                b[i2] = (b[i2] - factor * b[k]) % m
        for j2 in range(k + 1, cols):
            if a[k][j2]:
                factor = (a[k][j2] // p**val) * unit_inv % m
                for row in a:
                    row[j2] = (row[j2] - factor * row[k]) % m
                for row in v_mat:
                    row[j2] = (row[j2] - factor * row[k]) % m
        rank += 1
    y = [0] * cols
    for k in range(rank):
        val = _valuation(a[k][k], p, N)
        if b[k] % p**val:
            return None
        unit_inv = pow(a[k][k] // p**val, -1, m)
        y[k] = (b[k] // p**val) * unit_inv % p ** (N - val)
    if any(b[k] for k in range(rank, rows)):
        return None
    return [sum(v_mat[i][j] * y[j] for j in range(cols)) % m for i in range(cols)]
