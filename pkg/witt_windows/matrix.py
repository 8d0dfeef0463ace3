"""Matrices over the local rings of frames."""

from dataclasses import dataclass
from logging import getLogger
from typing import Any, Callable, List, Optional, Sequence, Tuple

import sympy

from .errors import NotInvertible, PrecisionExhausted, RankMismatch
from .witt import agree


log = getLogger("witt-windows")

_NEWTON_MAX_STEPS = 64


@dataclass(frozen=True, eq=False)
class MatrixOverS:
    """A dense matrix whose entries lie in one ring.

    ``ring`` is a ring context (a :class:`~witt_windows.ring.RingSpec` or a
    :class:`~witt_windows.witt.WittRing`): it provides ``zero``, ``one``,
    ``from_int``, ``residue`` and ``frobenius``.
    """

    ring: Any
    entries: Tuple[Tuple[Any, ...], ...]

    @classmethod
    def from_rows(cls, ring: Any, rows: Sequence[Sequence[Any]]) -> "MatrixOverS":
        """Build a matrix, converting integer entries into the ring."""
        converted = tuple(
            tuple(ring.from_int(v) if isinstance(v, int) else v for v in row) for row in rows
        )
        widths = {len(row) for row in converted}
        if len(widths) > 1:
            raise RankMismatch(f"ragged rows: {sorted(widths)}")
        return cls(ring, converted)

    @classmethod
    def zeros(cls, ring: Any, nrows: int, ncols: int) -> "MatrixOverS":
        """The zero matrix."""
        zero = ring.zero()
        return cls(ring, tuple(tuple(zero for _ in range(ncols)) for _ in range(nrows)))

    @classmethod
    def identity(cls, ring: Any, n: int) -> "MatrixOverS":
        """The identity matrix."""
        return cls.diagonal(ring, [ring.one()] * n)

    @classmethod
    def diagonal(cls, ring: Any, values: Sequence[Any]) -> "MatrixOverS":
        """A diagonal matrix."""
        zero = ring.zero()
        n = len(values)
        return cls.from_rows(
            ring, [[values[i] if i == j else zero for j in range(n)] for i in range(n)]
        )

    @classmethod
    def from_columns(cls, ring: Any, columns: Sequence[Sequence[Any]]) -> "MatrixOverS":
        """Build a matrix from its columns."""
        if not columns:
            return cls(ring, ())
        return cls.from_rows(ring, [list(row) for row in zip(*columns)])

    @classmethod
    def blocks(cls, grid: Sequence[Sequence["MatrixOverS"]]) -> "MatrixOverS":
        """Assemble a block matrix from a grid of matrices."""
        ring = grid[0][0].ring
        rows: List[List[Any]] = []
        for block_row in grid:
            height = block_row[0].nrows
            if any(b.nrows != height for b in block_row):
                raise RankMismatch("blocks in one row must have equal height")
            for i in range(height):
                rows.append([x for b in block_row for x in b.entries[i]])
        return cls.from_rows(ring, rows)

    @property
    def nrows(self) -> int:
        """Number of rows."""
        return len(self.entries)

    @property
    def ncols(self) -> int:
        """Number of columns."""
        return len(self.entries[0]) if self.entries else 0

    @property
    def shape(self) -> Tuple[int, int]:
        """(rows, cols)."""
        return (self.nrows, self.ncols)

    def __getitem__(self, index: Tuple[int, int]) -> Any:
        i, j = index
        return self.entries[i][j]

    def column(self, j: int) -> List[Any]:
        """The j-th column."""
        return [row[j] for row in self.entries]

    def columns(self) -> List[List[Any]]:
        """All columns."""
        return [self.column(j) for j in range(self.ncols)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "MatrixOverS":
        """The block with the given row and column indices."""
        return MatrixOverS(
            self.ring, tuple(tuple(self.entries[i][j] for j in cols) for i in rows)
        )

    def map(self, fn: Callable[[Any], Any], ring: Optional[Any] = None) -> "MatrixOverS":
        """Apply ``fn`` entrywise, optionally landing in another ring."""
        return MatrixOverS(
            ring if ring is not None else self.ring,
            tuple(tuple(fn(x) for x in row) for row in self.entries),
        )

    def frobenius(self) -> "MatrixOverS":
        """Entrywise Frobenius of the ring."""
        return self.map(self.ring.frobenius)

    def transpose(self) -> "MatrixOverS":
        """The transpose."""
        return MatrixOverS(self.ring, tuple(zip(*self.entries)))

    def _check_shape(self, other: "MatrixOverS"):
        if self.shape != other.shape:
            raise RankMismatch(f"shape {self.shape} vs {other.shape}")

    def __add__(self, other: "MatrixOverS") -> "MatrixOverS":
        self._check_shape(other)
        return MatrixOverS(
            self.ring,
            tuple(tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
        )

    def __neg__(self) -> "MatrixOverS":
        return self.map(lambda x: -x)

    def __sub__(self, other: "MatrixOverS") -> "MatrixOverS":
        return self + (-other)

    def __mul__(self, other: Any) -> "MatrixOverS":
        if not isinstance(other, MatrixOverS):
            return self.map(lambda x: x * other)
        if self.ncols != other.nrows:
            raise RankMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        zero = self.ring.zero()
        rows = []
        for row in self.entries:
            out = []
            for col in cols:
                acc = zero
                for x, y in zip(row, col):
                    acc = acc + x * y
                out.append(acc)
            rows.append(tuple(out))
        return MatrixOverS(self.ring, tuple(rows))

    def __rmul__(self, scalar: Any) -> "MatrixOverS":
        return self.map(lambda x: scalar * x)

    def apply(self, vector: Sequence[Any]) -> List[Any]:
        """Matrix times a coordinate vector."""
        zero = self.ring.zero()
        out = []
        for row in self.entries:
            acc = zero
            for x, y in zip(row, vector):
                acc = acc + x * y
            out.append(acc)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixOverS):
            return NotImplemented
        return self.shape == other.shape and all(
            x == y for r1, r2 in zip(self.entries, other.entries) for x, y in zip(r1, r2)
        )

    def agrees_with(self, other: "MatrixOverS") -> bool:
        """Entrywise equality, Witt vector entries at their common length."""
        return self.shape == other.shape and all(
            agree(x, y) for r1, r2 in zip(self.entries, other.entries) for x, y in zip(r1, r2)
        )

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        """True if every entry vanishes."""
        return all(x.is_zero() for row in self.entries for x in row)

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(x) for x in row) for row in self.entries) + "]"

    def __repr__(self) -> str:
        return f"MatrixOverS({self})"

    # -- residues and inversion -----------------------------------------------

    def residue(self) -> sympy.Matrix:
        """The image over the residue field F_p as a sympy matrix."""
        return sympy.Matrix(
            self.nrows, self.ncols, [self.ring.residue(x) for row in self.entries for x in row]
        )

    def residue_det(self) -> int:
        """Determinant of the residue matrix, in F_p."""
        if self.nrows != self.ncols:
            raise RankMismatch(f"determinant of non-square {self.shape}")
        if self.nrows == 0:
            return 1
        return int(self.residue().det()) % self.ring.p

    def is_invertible(self) -> bool:
        """True when the residue determinant is a unit."""
        return self.nrows == self.ncols and self.residue_det() != 0

    def invert(self) -> "MatrixOverS":
        """Exact inverse: residue inverse lifted by Newton iteration."""
        n = self.nrows
        if n != self.ncols:
            raise RankMismatch(f"cannot invert non-square {self.shape}")
        if n == 0:
            return self
        p = self.ring.p
        try:
            residue_inv = self.residue().inv_mod(p)
        except ValueError as e:
            raise NotInvertible(f"residue matrix is singular mod {p}: {self}") from e
        b = MatrixOverS.from_rows(
            self.ring, [[int(residue_inv[i, j]) % p for j in range(n)] for i in range(n)]
        )
        ident = MatrixOverS.identity(self.ring, n)
        for step in range(_NEWTON_MAX_STEPS):
            error = ident - self * b
            if error.is_zero():
                log.debug(f"matrix inverse converged after {step} Newton steps")
                return b
            b = b * (ident + error)
        raise PrecisionExhausted(f"Newton inversion did not converge for {self}")


def matrix_invert(a: MatrixOverS) -> MatrixOverS:
    """Functional form of :meth:`MatrixOverS.invert`."""
    return a.invert()


def block_diagonal(*blocks: MatrixOverS) -> MatrixOverS:
    """Block diagonal matrix."""
    ring = blocks[0].ring
    grid = []
    for i, bi in enumerate(blocks):
        row = []
        for j, bj in enumerate(blocks):
            row.append(bi if i == j else MatrixOverS.zeros(ring, bi.nrows, bj.ncols))
        grid.append(row)
    nonempty = [row for row in grid if row and row[0].nrows]
    if not nonempty:
        total = sum(b.ncols for b in blocks)
        return MatrixOverS.zeros(ring, 0, total)
    return MatrixOverS.blocks(nonempty)
