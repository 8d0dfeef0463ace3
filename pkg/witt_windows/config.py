"""Job configuration.

A :class:`JobConfig` is assembled from three layers, later layers win::

    defaults  <  command defaults  <  key = value file (--config PATH)  <  command-line flags

Every key has a declared type (:data:`CONFIG_TYPES`) and values are converted
the same way rows of a typed table are (:func:`witt_windows.utils.parse_row`).
"""

from dataclasses import asdict, dataclass, fields, replace
from logging import getLogger
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from sympy import isprime

from .errors import ConfigError, WittWindowsError
from .frames import (
    Frame,
    breuil_residue_ring,
    build_breuil_frame,
    build_c_frame,
    build_dieudonne_frame,
    check_eisenstein,
)
from .matrix import MatrixOverS
from .parser import parse_eisenstein, parse_matrix
from .ring import ENUMERATION_LIMIT, INFINITE_TRUNCATION_BOUND
from .utils import parse_row, read_key_values
from .windows import Window, window_from_normal_decomposition


log = getLogger("witt-windows")

KINDS = ("breuil", "dieudonne", "cframe")
TIERS = ("smoke", "small")

#: Declared type of every configuration key.
CONFIG_TYPES: Dict[str, str] = {
    "p": "int",
    "N": "int",
    "e": "int",
    "a": "int",
    "r": "int",
    "E": "str",
    "trunc": "trunclist",
    "budget": "int",
    "rank": "intlist",
    "seed": "int",
    "tier": "str",
    "samples": "int",
    "kind": "str",
    "n": "trunclist",
    "matrix": "str",
    "cache_period": "float",
    "limit": "int",
}


@dataclass(frozen=True)
class JobConfig:
    """Parameters of one command run.

    Parameters
    ----------
    p : int
        The prime.
    N : int, optional
        p-adic precision of S; defaults to ``a + budget``.
    e : int
        Degree of E; only used to build the default E = u^e + p.
    a : int
        Level of Breuil frames and of R_a.
    r : int
        Number of t variables; ``trunc`` defaults to ``inf`` for each.
    E : str, optional
        The Eisenstein polynomial as an expression in u.
    trunc : tuple of int
        Truncation exponents of t_1..t_r.
    budget : int
        Witt length of Dieudonné frames.
    rank : tuple of int
        ``(d_L, d_T)``.
    seed : int
        Seed of the single random generator of the run.
    tier : str
        Self-test size tier, ``smoke`` or ``small``.
    samples : int
        Random samples per check.
    kind : str
        Frame kind, one of :data:`KINDS`.
    n : tuple of int
        Truncations of the C_n frame (r + 1 entries).
    matrix : str, optional
        Structural matrix of the window, rows separated by ``;``.
    cache_period : float
        Seconds a cached report stays valid; 0 disables the report cache.
    limit : int
        Largest set the enumeration commands walk through.
    """

    p: int = 3
    N: Optional[int] = None
    e: int = 1
    a: int = 1
    r: int = 0
    E: Optional[str] = None
    trunc: Tuple[int, ...] = ()
    budget: int = 3
    rank: Tuple[int, ...] = (1, 1)
    seed: int = 1
    tier: str = "smoke"
    samples: int = 3
    kind: str = "breuil"
    n: Tuple[int, ...] = (1,)
    matrix: Optional[str] = None
    cache_period: float = 0.0
    limit: int = ENUMERATION_LIMIT

    def __post_init__(self):
        if not isprime(self.p):
            raise ConfigError(f"p must be a prime: {self.p}")
        for key in ("e", "a", "samples", "limit"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be >= 1: {getattr(self, key)}")
        if self.budget < 2:
            raise ConfigError(f"budget must be >= 2: {self.budget}")
        if self.N is not None and self.N < 1:
            raise ConfigError(f"N must be >= 1: {self.N}")
        if self.r < 0 or self.seed < 0 or self.cache_period < 0:
            raise ConfigError("r, seed and cache_period must be nonnegative")
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}: {self.kind!r}")
        if self.tier not in TIERS:
            raise ConfigError(f"tier must be one of {TIERS}: {self.tier!r}")
        if len(self.rank) != 2 or min(self.rank) < 0:
            raise ConfigError(f"rank must be two nonnegative integers d_L,d_T: {self.rank}")
        if self.trunc and self.r and len(self.trunc) != self.r:
            raise ConfigError(f"trunc lists {len(self.trunc)} exponents but r = {self.r}")
        if not self.n:
            raise ConfigError("n must list at least one truncation exponent")

    @classmethod
    def from_sources(
        cls,
        path: Optional[Union[str, Path]] = None,
        overrides: Optional[Mapping[str, Any]] = None,
        defaults: Optional[Mapping[str, Any]] = None,
    ) -> "JobConfig":
        """Merge defaults, an optional config file and explicit overrides.

        ``defaults`` replace the built-in defaults of a single command.
        ``None`` values in ``overrides`` are ignored, so unset command-line
        flags never mask the file.
        """
        raw: Dict[str, Any] = dict(defaults or {})
        if path is not None:
            raw.update(read_config_file(path))
        for key, value in (overrides or {}).items():
            if value is not None:
                raw[key] = value
        return cls.from_mapping(raw)

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any]) -> "JobConfig":
        """Convert raw values by their declared types and build the config."""
        unknown = sorted(set(raw) - set(CONFIG_TYPES))
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        keys = list(raw)
        try:
            entry = parse_row(keys, [CONFIG_TYPES[k] for k in keys], [raw[k] for k in keys])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid configuration value: {exc}") from exc
        if entry is None:
            raise ConfigError("integer configuration keys cannot be empty")
        for key in ("tier", "kind"):
            if key in entry:
                entry[key] = entry[key].lower()
        log.debug(f"configuration values {entry}")
        return cls(**entry)

    @property
    def truncations(self) -> Tuple[int, ...]:
        """t truncations, ``inf`` for each of the r variables when unset."""
        if self.trunc:
            return self.trunc
        return (INFINITE_TRUNCATION_BOUND,) * self.r

    @property
    def precision(self) -> int:
        """p-adic precision of S."""
        return self.N if self.N is not None else self.a + self.budget

    @property
    def eisenstein(self) -> Tuple[int, ...]:
        """Coefficients a_0..a_{e-1} of E."""
        source = self.E if self.E is not None else f"u^{self.e} + {self.p}"
        try:
            coefficients = parse_eisenstein(source, self.p, self.precision)
            check_eisenstein(self.p, coefficients)
        except WittWindowsError as exc:
            raise ConfigError(f"invalid E {source!r}: {exc}") from exc
        return coefficients

    def rng(self) -> np.random.Generator:
        """The generator every random choice of the run draws from."""
        return np.random.default_rng(self.seed)

    def frame(self) -> Frame:
        """Build the frame the config describes."""
        if self.kind == "breuil":
            return build_breuil_frame(
                self.p, self.eisenstein, self.a, self.truncations, N=self.precision, budget=self.budget
            )
        if self.kind == "dieudonne":
            base = breuil_residue_ring(self.p, self.eisenstein, self.a, self.truncations)
            return build_dieudonne_frame(base, self.budget)
        return build_c_frame(self.n, self.p, self.precision)

    def structural_matrix(self, frame: Frame) -> MatrixOverS:
        """Parse ``matrix`` over the frame's ring; the identity when unset."""
        d_L, d_T = self.rank
        if self.matrix is None:
            return MatrixOverS.identity(frame.ring, d_L + d_T)
        return parse_matrix(self.matrix, frame.ring)

    def window(self, frame: Optional[Frame] = None) -> Window:
        """The window with structural matrix ``matrix`` over ``frame``."""
        frame = frame if frame is not None else self.frame()
        d_L, d_T = self.rank
        return window_from_normal_decomposition(frame, d_L, d_T, self.structural_matrix(frame))

    def with_overrides(self, **changes: Any) -> "JobConfig":
        """A copy with some keys replaced."""
        return replace(self, **changes)

    def header(self) -> Dict[str, Any]:
        """Job parameters for report headers, unset keys omitted."""
        return {k: _render(v) for k, v in asdict(self).items() if v is not None}

    def describe(self) -> str:
        """Canonical one-line description, the key of the report cache."""
        return ";".join(f"{f.name}={_render(getattr(self, f.name))}" for f in fields(self))


def _render(value: Any) -> str:
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Read a flat ``key = value`` config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {str(path)!r}: {exc}") from exc
    try:
        entries = list(read_key_values(text))
    except ValueError as exc:
        raise ConfigError(f"{path.name}: {exc}") from exc
    values: Dict[str, str] = {}
    for lineno, key, value in entries:
        if key not in CONFIG_TYPES:
            raise ConfigError(f"{path.name}:{lineno}: unknown key {key!r}")
        values[key] = value
    log.info(f"read {len(values)} keys from {path}")
    return values
