"""Linear algebra over the two-element field with word-packed rows.

Rows and vectors are stored as Python integers used as bitsets: bit ``j`` of
a row is the entry in column ``j``.  CPython integers are arrays of machine
words, so XOR of two rows is a packed word operation.

Elimination always pivots on the lowest set column index and processes rows
in their stored order, which makes every basis returned here reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


def iter_bits(x: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bits_from_indices(indices: Iterable[int]) -> int:
    x = 0
    for i in indices:
        x ^= 1 << i
    return x


def popcount(x: int) -> int:
    return bin(x).count("1")


def _low(x: int) -> int:
    return (x & -x).bit_length() - 1


@dataclass(frozen=True)
class F2Vector:
    """A vector of fixed length over F2."""

    length: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"bits do not fit in length {self.length}")

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> F2Vector:
        return cls(length, bits_from_indices(indices))

    @classmethod
    def from_list(cls, values: Sequence[int]) -> F2Vector:
        return cls.from_indices(len(values), (i for i, v in enumerate(values) if v % 2))

    def indices(self) -> list[int]:
        return list(iter_bits(self.bits))

    def tolist(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.length)]

    def weight(self) -> int:
        return popcount(self.bits)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __add__(self, other: F2Vector) -> F2Vector:
        if self.length != other.length:
            raise ValueError("length mismatch")
        return F2Vector(self.length, self.bits ^ other.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __len__(self) -> int:
        return self.length


class F2Matrix:
    """Immutable ``nrows x ncols`` matrix over F2, one packed integer per row."""

    __slots__ = ("nrows", "ncols", "_rows", "_cols_cache")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[int] | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative shape")
        if rows is None:
            rows = (0,) * nrows
        elif len(rows) != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(rows)}")
        rows = tuple(rows)
        limit = 1 << ncols
        for r in rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row does not fit in {ncols} columns")
        self.nrows = nrows
        self.ncols = ncols
        self._rows = rows
        self._cols_cache: tuple[int, ...] | None = None

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> F2Matrix:
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> F2Matrix:
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_rows(cls, rows: Sequence[int], ncols: int) -> F2Matrix:
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> F2Matrix:
        rows = _transpose(columns, nrows)
        m = cls(nrows, len(columns), rows)
        m._cols_cache = tuple(columns)
        return m

    @classmethod
    def from_dense(cls, entries: Sequence[Sequence[int]], ncols: int | None = None) -> F2Matrix:
        entries = [list(r) for r in entries]
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        rows = []
        for r in entries:
            if len(r) != ncols:
                raise ValueError("ragged dense matrix")
            rows.append(bits_from_indices(j for j, v in enumerate(r) if int(v) % 2))
        return cls(len(rows), ncols, rows)

    @classmethod
    def block(
        cls,
        row_sizes: Sequence[int],
        col_sizes: Sequence[int],
        blocks: dict[tuple[int, int], F2Matrix],
    ) -> F2Matrix:
        """Assemble a matrix from blocks keyed by (block row, block column)."""
        row_off = [0]
        for s in row_sizes:
            row_off.append(row_off[-1] + s)
        col_off = [0]
        for s in col_sizes:
            col_off.append(col_off[-1] + s)
        rows = [0] * row_off[-1]
        for (bi, bj), m in blocks.items():
            if m.shape != (row_sizes[bi], col_sizes[bj]):
                raise ValueError(
                    f"block {(bi, bj)} has shape {m.shape}, "
                    f"expected {(row_sizes[bi], col_sizes[bj])}"
                )
            shift = col_off[bj]
            base = row_off[bi]
            for i, r in enumerate(m._rows):
                if r:
                    rows[base + i] ^= r << shift
        return cls(row_off[-1], col_off[-1], rows)

    # -- access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> tuple[int, ...]:
        return self._rows

    @property
    def columns(self) -> tuple[int, ...]:
        if self._cols_cache is None:
            self._cols_cache = tuple(_transpose(self._rows, self.ncols))
        return self._cols_cache

    def row(self, i: int) -> int:
        return self._rows[i]

    def column(self, j: int) -> int:
        return self.columns[j]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(ij)
        return (self._rows[i] >> j) & 1

    def tolist(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self._rows]

    def nnz(self) -> int:
        return sum(popcount(r) for r in self._rows)

    def is_zero(self) -> bool:
        return not any(self._rows)

    def __repr__(self) -> str:
        return f"F2Matrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self._rows))

    # -- arithmetic ---------------------------------------------------------

    @property
    def T(self) -> F2Matrix:
        return F2Matrix.from_rows(self.columns, self.nrows)

    def __add__(self, other: F2Matrix) -> F2Matrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return F2Matrix(self.nrows, self.ncols, [a ^ b for a, b in zip(self._rows, other._rows)])

    __sub__ = __add__

    def __matmul__(self, other: F2Matrix) -> F2Matrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = other._rows
        out = []
        for r in self._rows:
            acc = 0
            while r:
                low = r & -r
                acc ^= orows[low.bit_length() - 1]
                r ^= low
            out.append(acc)
        return F2Matrix(self.nrows, other.ncols, out)

    def apply(self, v: int) -> int:
        """Return ``M v`` for a vector given as an integer bitset."""
        cols = self.columns
        acc = 0
        while v:
            low = v & -v
            acc ^= cols[low.bit_length() - 1]
            v ^= low
        return acc

    def __mul__(self, v: F2Vector) -> F2Vector:
        if not isinstance(v, F2Vector):
            return NotImplemented
        if v.length != self.ncols:
            raise ValueError("dimension mismatch")
        return F2Vector(self.nrows, self.apply(v.bits))

    def select_rows(self, idx: Sequence[int]) -> F2Matrix:
        return F2Matrix(len(idx), self.ncols, [self._rows[i] for i in idx])

    def select_columns(self, idx: Sequence[int]) -> F2Matrix:
        cols = self.columns
        return F2Matrix.from_columns([cols[j] for j in idx], self.nrows)

    # -- elimination --------------------------------------------------------

    def rank(self) -> int:
        if self.nrows <= self.ncols:
            return len(echelon(self._rows))
        return len(echelon(self.columns))

    def kernel_basis(self) -> list[F2Vector]:
        return [F2Vector(self.ncols, z) for z in kernel_ints(self.columns)]

    def solve(self, b: F2Vector) -> F2Vector | None:
        if b.length != self.nrows:
            raise ValueError(f"right-hand side has length {b.length}, expected {self.nrows}")
        x = solve_ints(self.columns, b.bits)
        return None if x is None else F2Vector(self.ncols, x)

    def inverse(self) -> F2Matrix:
        if self.nrows != self.ncols:
            raise ValueError("not square")
        cols = []
        for i in range(self.nrows):
            x = solve_ints(self.columns, 1 << i)
            if x is None:
                raise ValueError("matrix is singular")
            cols.append(x)
        inv = F2Matrix.from_columns(cols, self.ncols)
        if self.rank() != self.nrows:
            raise ValueError("matrix is singular")
        return inv


def _transpose(vectors: Sequence[int], length: int) -> list[int]:
    out = [0] * length
    for i, v in enumerate(vectors):
        bit = 1 << i
        while v:
            low = v & -v
            out[low.bit_length() - 1] |= bit
            v ^= low
    return out


def echelon(vectors: Iterable[int]) -> dict[int, int]:
    """Reduce vectors in order; return pivots keyed by their lowest set bit."""
    pivots: dict[int, int] = {}
    for v in vectors:
        while v:
            p = _low(v)
            w = pivots.get(p)
            if w is None:
                pivots[p] = v
                break
            v ^= w
    return pivots


def kernel_ints(columns: Sequence[int]) -> list[int]:
    """Kernel of the matrix with the given columns, as bitsets over column indices."""
    pivots: dict[int, tuple[int, int]] = {}
    kernel = []
    for j, v in enumerate(columns):
        track = 1 << j
        while v:
            p = _low(v)
            w = pivots.get(p)
            if w is None:
                pivots[p] = (v, track)
                break
            v ^= w[0]
            track ^= w[1]
        if not v:
            kernel.append(track)
    return kernel


class Eliminator:
    """Incremental echelon basis with combination tracking.

    Vectors are added one at a time; each added vector carries a label bitset.
    ``reduce`` returns the residue of a vector and the XOR of the labels used.
    """

    __slots__ = ("pivots",)

    def __init__(self) -> None:
        self.pivots: dict[int, tuple[int, int]] = {}

    def reduce(self, v: int, track: int = 0) -> tuple[int, int]:
        pivots = self.pivots
        while v:
            p = _low(v)
            w = pivots.get(p)
            if w is None:
                break
            v ^= w[0]
            track ^= w[1]
        return v, track

    def add(self, v: int, label: int) -> bool:
        """Insert ``v`` with ``label``; return False if it was dependent."""
        v, label = self.reduce(v, label)
        if not v:
            return False
        self.pivots[_low(v)] = (v, label)
        return True

    def __len__(self) -> int:
        return len(self.pivots)


def solve_ints(columns: Sequence[int], b: int) -> int | None:
    """Find ``x`` with ``sum_j x_j columns[j] = b``, or None."""
    elim = Eliminator()
    for j, c in enumerate(columns):
        elim.add(c, 1 << j)
    residue, x = elim.reduce(b)
    return None if residue else x


def rank(m: F2Matrix) -> int:
    return m.rank()


def kernel_basis(m: F2Matrix) -> list[F2Vector]:
    return m.kernel_basis()


def solve(m: F2Matrix, b: F2Vector) -> F2Vector | None:
    return m.solve(b)


def transpose(m: F2Matrix) -> F2Matrix:
    return m.T
