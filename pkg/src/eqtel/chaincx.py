"""Bounded chain complexes over F2 with explicit ordered bases.

A complex stores one boundary matrix per degree ``k >= 1`` of shape
``dims[k-1] x dims[k]``.  Degrees outside ``0..top_degree`` are zero, so
``dim`` and ``d`` accept any integer degree.

Maps of any degree share the :class:`GradedMap` representation: the block
for source degree ``k`` has shape ``target.dim(k + degree) x source.dim(k)``.
"""

from __future__ import annotations

from typing import Sequence

from .f2linalg import Eliminator, F2Matrix, echelon, kernel_ints


class ChainComplexError(ValueError):
    pass


class ChainComplex:
    def __init__(self, dims: Sequence[int], d: Sequence[F2Matrix] | None = None, check: bool = True):
        dims = tuple(int(x) for x in dims)
        if any(x < 0 for x in dims):
            raise ChainComplexError("negative dimension")
        self.dims = dims
        if d is None:
            d = [F2Matrix.zeros(dims[k - 1], dims[k]) for k in range(1, len(dims))]
        d = list(d)
        if len(d) != max(len(dims) - 1, 0):
            raise ChainComplexError(f"expected {len(dims) - 1} boundary matrices, got {len(d)}")
        for k, m in enumerate(d, start=1):
            if m.shape != (dims[k - 1], dims[k]):
                raise ChainComplexError(f"d[{k}] has shape {m.shape}, expected {(dims[k - 1], dims[k])}")
        self._d = d
        if check:
            for k in range(1, len(d)):
                if not (d[k - 1] @ d[k]).is_zero():
                    raise ChainComplexError(f"d[{k}] d[{k + 1}] != 0")

    @property
    def top_degree(self) -> int:
        return len(self.dims) - 1

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    def d(self, k: int) -> F2Matrix:
        """Boundary from degree ``k`` to degree ``k - 1``."""
        if 1 <= k <= self.top_degree:
            return self._d[k - 1]
        return F2Matrix.zeros(self.dim(k - 1), self.dim(k))

    def size(self) -> int:
        return sum(self.dims)

    def __repr__(self) -> str:
        return f"ChainComplex(dims={list(self.dims)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return self.dims == other.dims and self._d == other._d

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def zero(cls) -> ChainComplex:
        return cls([0])

    @classmethod
    def point(cls) -> ChainComplex:
        return cls([1])

    def truncate(self, top: int) -> ChainComplex:
        """Drop every degree above ``top``."""
        dims = list(self.dims[: top + 1]) or [0]
        return ChainComplex(dims, [self.d(k) for k in range(1, len(dims))], check=False)

    def direct_sum(self, other: ChainComplex) -> ChainComplex:
        top = max(self.top_degree, other.top_degree)
        dims = [self.dim(k) + other.dim(k) for k in range(top + 1)]
        d = [
            F2Matrix.block(
                [self.dim(k - 1), other.dim(k - 1)],
                [self.dim(k), other.dim(k)],
                {(0, 0): self.d(k), (1, 1): other.d(k)},
            )
            for k in range(1, top + 1)
        ]
        return ChainComplex(dims, d)


def same_complex(a: ChainComplex, b: ChainComplex) -> bool:
    return a is b or a == b


class GradedMap:
    """Linear map of a fixed degree between two chain complexes."""

    def __init__(self, source: ChainComplex, target: ChainComplex, blocks: Sequence[F2Matrix], degree: int = 0):
        self.source = source
        self.target = target
        self.degree = degree
        blocks = list(blocks)
        if len(blocks) != source.top_degree + 1:
            raise ChainComplexError(
                f"expected {source.top_degree + 1} blocks, got {len(blocks)}"
            )
        for k, m in enumerate(blocks):
            want = (target.dim(k + degree), source.dim(k))
            if m.shape != want:
                raise ChainComplexError(f"block {k} has shape {m.shape}, expected {want}")
        self.blocks = blocks

    @staticmethod
    def zero(source: ChainComplex, target: ChainComplex, degree: int = 0) -> GradedMap:
        blocks = [F2Matrix.zeros(target.dim(k + degree), source.dim(k)) for k in range(source.top_degree + 1)]
        return GradedMap(source, target, blocks, degree)

    def __getitem__(self, k: int) -> F2Matrix:
        if 0 <= k <= self.source.top_degree:
            return self.blocks[k]
        return F2Matrix.zeros(self.target.dim(k + self.degree), self.source.dim(k))

    def __add__(self, other: GradedMap) -> GradedMap:
        if self.degree != other.degree:
            raise ChainComplexError("degree mismatch")
        return GradedMap(self.source, self.target, [a + b for a, b in zip(self.blocks, other.blocks)], self.degree)

    def compose(self, first: GradedMap) -> GradedMap:
        """``self`` after ``first``."""
        deg = self.degree + first.degree
        blocks = [self[k + first.degree] @ first[k] for k in range(first.source.top_degree + 1)]
        return GradedMap(first.source, self.target, blocks, deg)

    def __matmul__(self, first: GradedMap) -> GradedMap:
        return self.compose(first)

    def commutator_with_d(self) -> GradedMap:
        """``d h + h d`` (over F2), a map of degree ``self.degree - 1``."""
        deg = self.degree - 1
        s, t = self.source, self.target
        blocks = [
            t.d(k + self.degree) @ self[k] + self[k - 1] @ s.d(k)
            for k in range(s.top_degree + 1)
        ]
        return GradedMap(s, t, blocks, deg)

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.blocks)

    def same_blocks(self, other: GradedMap) -> bool:
        return self.degree == other.degree and self.blocks == other.blocks

    def as_graded(self) -> GradedMap:
        return GradedMap(self.source, self.target, self.blocks, self.degree)


class ChainMap(GradedMap):
    """Degree-zero map commuting with the differentials (checked on construction)."""

    def __init__(self, source: ChainComplex, target: ChainComplex, blocks: Sequence[F2Matrix], check: bool = True):
        super().__init__(source, target, blocks, degree=0)
        if check:
            bad = self.failing_degree()
            if bad is not None:
                raise ChainComplexError(f"not a chain map: d f != f d in degree {bad}")

    def failing_degree(self) -> int | None:
        for k in range(1, self.source.top_degree + 2):
            if self.target.d(k) @ self[k] != self[k - 1] @ self.source.d(k):
                return k
        return None

    @staticmethod
    def zero(source: ChainComplex, target: ChainComplex, degree: int = 0) -> ChainMap:
        if degree:
            raise ChainComplexError("chain maps have degree 0")
        return ChainMap.from_graded(GradedMap.zero(source, target), check=False)

    @classmethod
    def identity(cls, c: ChainComplex) -> ChainMap:
        return cls(c, c, [F2Matrix.identity(n) for n in c.dims], check=False)

    @classmethod
    def from_graded(cls, g: GradedMap, check: bool = True) -> ChainMap:
        if g.degree != 0:
            raise ChainComplexError("chain maps have degree 0")
        return cls(g.source, g.target, g.blocks, check=check)

    def compose(self, first: GradedMap) -> GradedMap:
        out = super().compose(first)
        if isinstance(first, ChainMap):
            return ChainMap(out.source, out.target, out.blocks, check=False)
        return out


class ChainHomotopy(GradedMap):
    """Degree +1 map; whether it witnesses a homotopy is checked separately."""

    def __init__(self, source: ChainComplex, target: ChainComplex, blocks: Sequence[F2Matrix]):
        super().__init__(source, target, blocks, degree=1)


def validate_homotopy(h: GradedMap, f: GradedMap, g: GradedMap) -> bool:
    """True iff ``f + g = d h + h d`` exactly."""
    if h.degree != 1 or f.degree != 0 or g.degree != 0:
        raise ChainComplexError("expected degree-1 homotopy between degree-0 maps")
    for m in (f, g):
        if not (same_complex(m.source, h.source) and same_complex(m.target, h.target)):
            raise ChainComplexError("source/target mismatch")
    return (f + g).same_blocks(h.commutator_with_d())


# -- homology ---------------------------------------------------------------


def betti(c: ChainComplex, k: int) -> int:
    if not 0 <= k <= c.top_degree:
        return 0
    return c.dim(k) - c.d(k).rank() - c.d(k + 1).rank()


def betti_numbers(c: ChainComplex, top: int | None = None) -> list[int]:
    top = c.top_degree if top is None else min(top, c.top_degree)
    ranks = [c.d(k).rank() for k in range(top + 2)]
    return [c.dim(k) - ranks[k] - ranks[k + 1] for k in range(top + 1)]


def is_acyclic(c: ChainComplex, degrees: Sequence[int] | None = None) -> bool:
    degrees = range(c.top_degree + 1) if degrees is None else degrees
    return all(betti(c, k) == 0 for k in degrees if 0 <= k <= c.top_degree)


class HomologyBasis:
    """An explicit basis of ``H_k`` with a coordinate map for cycles.

    Representatives are chosen deterministically: boundaries are eliminated
    first, then kernel vectors of ``d_k`` are scanned in order and kept when
    independent modulo boundaries and earlier representatives.
    """

    def __init__(self, c: ChainComplex, k: int):
        self.complex = c
        self.degree = k
        self._elim = Eliminator()
        for col in c.d(k + 1).columns:
            self._elim.add(col, 0)
        self.representatives: list[int] = []
        for z in kernel_ints(c.d(k).columns):
            if self._elim.add(z, 1 << len(self.representatives)):
                self.representatives.append(z)

    def __len__(self) -> int:
        return len(self.representatives)

    def coordinates(self, cycle: int) -> int:
        residue, coords = self._elim.reduce(cycle)
        if residue:
            raise ChainComplexError("not a cycle in the span of this basis")
        return coords

    def is_boundary(self, cycle: int) -> bool:
        residue, coords = self._elim.reduce(cycle)
        return not residue and not coords


class CohomologyBasis:
    """An explicit basis of ``H^k`` built the same way from transposed differentials.

    A cochain is a bitset over the degree-``k`` basis; cocycles are killed by
    ``d_{k+1}^T`` and coboundaries are the image of ``d_k^T``.
    """

    def __init__(self, c: ChainComplex, k: int):
        self.complex = c
        self.degree = k
        self._elim = Eliminator()
        for row in c.d(k).rows:
            self._elim.add(row, 0)
        self.representatives: list[int] = []
        for z in kernel_ints(c.d(k + 1).rows):
            if self._elim.add(z, 1 << len(self.representatives)):
                self.representatives.append(z)

    def __len__(self) -> int:
        return len(self.representatives)

    def coordinates(self, cocycle: int) -> int:
        residue, coords = self._elim.reduce(cocycle)
        if residue:
            raise ChainComplexError("not a cocycle in the span of this basis")
        return coords


def homology_matrix(f: GradedMap, k: int, src: HomologyBasis | None = None, dst: HomologyBasis | None = None) -> F2Matrix:
    """Matrix of ``H_k(f)`` in the given (or default) homology bases."""
    if f.degree != 0 and (src is None or dst is None):
        raise ChainComplexError("bases required for maps of nonzero degree")
    src = src or HomologyBasis(f.source, k)
    dst = dst or HomologyBasis(f.target, k + f.degree)
    fk = f[k]
    cols = [dst.coordinates(fk.apply(z)) for z in src.representatives]
    return F2Matrix.from_columns(cols, len(dst))


def induced_rank(f: ChainMap, k: int) -> int:
    """Rank of ``H_k(f)`` without choosing a homology basis of the target."""
    boundaries = list(f.target.d(k + 1).columns)
    base = len(echelon(boundaries))
    images = [f[k].apply(z) for z in kernel_ints(f.source.d(k).columns)]
    return len(echelon(boundaries + images)) - base


def is_homology_iso(f: ChainMap, k: int) -> bool:
    bs, bt = betti(f.source, k), betti(f.target, k)
    return bs == bt and induced_rank(f, k) == bt


# -- constructions ----------------------------------------------------------


def cone(f: GradedMap) -> ChainComplex:
    """Mapping cone: degree k is ``target_k + source_{k-1}``, no signs over F2."""
    s, t = f.source, f.target
    top = max(t.top_degree, s.top_degree + 1)
    dims = [t.dim(k) + s.dim(k - 1) for k in range(top + 1)]
    d = []
    for k in range(1, top + 1):
        d.append(
            F2Matrix.block(
                [t.dim(k - 1), s.dim(k - 2)],
                [t.dim(k), s.dim(k - 1)],
                {(0, 0): t.d(k), (0, 1): f[k - 1], (1, 1): s.d(k - 1)},
            )
        )
    return ChainComplex(dims, d)


class TensorBasis:
    """Index bookkeeping for ``C (x) D``: degree n enumerates (p, i, j) lexicographically."""

    def __init__(self, c: ChainComplex, d: ChainComplex):
        self.c, self.d = c, d
        self.top = c.top_degree + d.top_degree
        self.offsets: list[dict[int, int]] = []
        self.dims: list[int] = []
        for n in range(self.top + 1):
            off, pos = {}, 0
            for p in range(n + 1):
                off[p] = pos
                pos += c.dim(p) * d.dim(n - p)
            self.offsets.append(off)
            self.dims.append(pos)

    def index(self, p: int, i: int, q: int, j: int) -> int:
        return self.offsets[p + q][p] + i * self.d.dim(q) + j

    def vector(self, p: int, x: int, q: int, y: int) -> int:
        """Bitset of ``x (x) y`` for bitsets ``x`` over C_p and ``y`` over D_q."""
        if not x or not y:
            return 0
        base = self.offsets[p + q][p]
        width = self.d.dim(q)
        out = 0
        while x:
            low = x & -x
            i = low.bit_length() - 1
            out |= y << (base + i * width)
            x ^= low
        return out


def tensor(c: ChainComplex, d: ChainComplex) -> ChainComplex:
    tb = TensorBasis(c, d)
    return tensor_with_basis(tb)


def tensor_with_basis(tb: TensorBasis) -> ChainComplex:
    c, d = tb.c, tb.d
    if sum(tb.dims) == 0:
        return ChainComplex.zero()
    mats = []
    for n in range(1, tb.top + 1):
        cols = []
        for p in range(n + 1):
            q = n - p
            dc, dd = c.d(p), d.d(q)
            for i in range(c.dim(p)):
                dci = dc.column(i) if p >= 1 else 0
                for j in range(d.dim(q)):
                    v = 0
                    if dci:
                        v ^= tb.vector(p - 1, dci, q, 1 << j)
                    if q >= 1:
                        ddj = dd.column(j)
                        if ddj:
                            v ^= tb.vector(p, 1 << i, q - 1, ddj)
                    cols.append(v)
        mats.append(F2Matrix.from_columns(cols, tb.dims[n - 1]))
    return ChainComplex(tb.dims, mats)


def tensor_map(f: ChainMap, g: ChainMap, src: TensorBasis | None = None, dst: TensorBasis | None = None) -> ChainMap:
    """``f (x) g`` as a chain map between tensor complexes."""
    src = src or TensorBasis(f.source, g.source)
    dst = dst or TensorBasis(f.target, g.target)
    source = tensor_with_basis(src)
    target = tensor_with_basis(dst)
    blocks = []
    for n in range(source.top_degree + 1):
        cols = []
        for p in range(n + 1):
            q = n - p
            fp, gq = f[p], g[q]
            for i in range(f.source.dim(p)):
                fi = fp.column(i)
                for j in range(g.source.dim(q)):
                    cols.append(dst.vector(p, fi, q, gq.column(j)) if p + q <= dst.top else 0)
        blocks.append(F2Matrix.from_columns(cols, target.dim(n)))
    return ChainMap(source, target, blocks)
