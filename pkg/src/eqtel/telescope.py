"""Finite mapping telescopes of chain complexes over F2.

For a sequence ``C_0 -> C_1 -> ... -> C_K`` with increments ``alpha_N`` the
truncated telescope is

    Tel_K = (+)_{N <= K} C_N  (+)  (+)_{N < K} q C_N

where ``q`` has degree one.  Its differential is

    delta(a + q b) = d a + q d b + alpha_N b + b        (over F2).

Morphisms are pairs ``(phi_N, kappa_N)`` where ``kappa_N`` witnesses
``phi_{N+1} alpha_N + beta_N phi_N = d kappa_N + kappa_N d`` and act by
``a + q b -> phi a + kappa b + q phi b``.  The same formula with ``phi`` of
degree +1 and ``kappa`` of degree +2 produces homotopies between such
morphisms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .chaincx import (
    ChainComplex,
    ChainComplexError,
    ChainMap,
    GradedMap,
    TensorBasis,
    cone,
    is_acyclic,
    same_complex,
    tensor_map,
    tensor_with_basis,
    validate_homotopy,
)
from .f2linalg import F2Matrix


class TelescopeError(ChainComplexError):
    pass


PLAIN = "plain"
Q = "q"


class ComplexSequence:
    """Stages ``C_0..C_K`` with increments ``alpha_N: C_N -> C_{N+1}``."""

    def __init__(self, stages: Sequence[ChainComplex], increments: Sequence[GradedMap], check: bool = True):
        stages = list(stages)
        increments = list(increments)
        if not stages:
            raise TelescopeError("a sequence needs at least one stage")
        if len(increments) != len(stages) - 1:
            raise TelescopeError(f"{len(stages)} stages need {len(stages) - 1} increments, got {len(increments)}")
        for n, a in enumerate(increments):
            if a.degree != 0:
                raise TelescopeError(f"increment {n} has degree {a.degree}")
            if not (same_complex(a.source, stages[n]) and same_complex(a.target, stages[n + 1])):
                raise TelescopeError(f"increment {n} does not go from stage {n} to stage {n + 1}")
            if check and isinstance(a, ChainMap):
                bad = a.failing_degree()
                if bad is not None:
                    raise TelescopeError(f"increment {n} is not a chain map (degree {bad})")
        self.stages = stages
        self.increments = increments

    @property
    def K(self) -> int:
        return len(self.stages) - 1

    def __len__(self) -> int:
        return len(self.stages)

    @classmethod
    def constant(cls, c: ChainComplex, K: int) -> ComplexSequence:
        return cls([c] * (K + 1), [ChainMap.identity(c)] * K)

    def truncated(self, K: int) -> ComplexSequence:
        if not 0 <= K <= self.K:
            raise TelescopeError(f"cannot truncate {self.K} stages to {K}")
        return ComplexSequence(self.stages[: K + 1], self.increments[:K], check=False)

    def iterate(self, start: int, steps: int) -> GradedMap:
        """``alpha^steps`` from stage ``start``."""
        out: GradedMap = ChainMap.identity(self.stages[start])
        for n in range(start, start + steps):
            out = self.increments[n].compose(out)
        return out

    def top_degree(self) -> int:
        return max(c.top_degree for c in self.stages)


class Address(NamedTuple):
    stage: int
    flavor: str
    local_degree: int
    index: int


class TelescopeLayout:
    """Offsets of each (stage, flavor) block inside each telescope degree."""

    def __init__(self, seq: ComplexSequence):
        self.seq = seq
        self.top = seq.top_degree() + (1 if seq.K > 0 else 0)
        self.offsets: list[dict[tuple[int, str], int]] = []
        self.dims: list[int] = []
        for k in range(self.top + 1):
            off, pos = {}, 0
            for n, c in enumerate(seq.stages):
                off[(n, PLAIN)] = pos
                pos += c.dim(k)
                if n < seq.K:
                    off[(n, Q)] = pos
                    pos += c.dim(k - 1)
            self.offsets.append(off)
            self.dims.append(pos)

    def offset(self, degree: int, stage: int, flavor: str) -> int:
        return self.offsets[degree][(stage, flavor)]

    def block_sizes(self, degree: int) -> list[int]:
        sizes = []
        for n, c in enumerate(self.seq.stages):
            sizes.append(c.dim(degree))
            if n < self.seq.K:
                sizes.append(c.dim(degree - 1))
        return sizes

    def block_index(self, stage: int, flavor: str) -> int:
        return 2 * stage + (1 if flavor == Q else 0)

    def addresses(self, degree: int) -> list[Address]:
        out = []
        for n, c in enumerate(self.seq.stages):
            out.extend(Address(n, PLAIN, degree, i) for i in range(c.dim(degree)))
            if n < self.seq.K:
                out.extend(Address(n, Q, degree - 1, i) for i in range(c.dim(degree - 1)))
        return out

    def embed(self, degree: int, stage: int, flavor: str, local: int) -> int:
        """Place a stage-local bitset at its telescope position."""
        return local << self.offset(degree, stage, flavor)

    def extract(self, degree: int, stage: int, flavor: str, v: int) -> int:
        c = self.seq.stages[stage]
        width = c.dim(degree) if flavor == PLAIN else c.dim(degree - 1)
        return (v >> self.offset(degree, stage, flavor)) & ((1 << width) - 1)


@dataclass
class TelescopeComplex:
    underlying: ChainComplex
    sequence: ComplexSequence
    layout: TelescopeLayout = field(repr=False)

    def addressing(self, degree: int) -> list[Address]:
        return self.layout.addresses(degree)

    @property
    def K(self) -> int:
        return self.sequence.K


def _assemble(
    src: TelescopeLayout,
    dst: TelescopeLayout,
    degree_shift: int,
    blocks_for: dict,
    k: int,
) -> F2Matrix:
    rows = dst.block_sizes(k + degree_shift)
    cols = src.block_sizes(k)
    blocks = {}
    for (tgt_stage, tgt_flavor, src_stage, src_flavor), m in blocks_for.items():
        bi = dst.block_index(tgt_stage, tgt_flavor)
        bj = src.block_index(src_stage, src_flavor)
        key = (bi, bj)
        blocks[key] = blocks[key] + m if key in blocks else m
    return F2Matrix.block(rows, cols, blocks)


def tel_build(seq: ComplexSequence) -> TelescopeComplex:
    layout = TelescopeLayout(seq)
    K = seq.K
    mats = []
    for k in range(1, layout.top + 1):
        parts = {}
        for n, c in enumerate(seq.stages):
            parts[(n, PLAIN, n, PLAIN)] = c.d(k)
            if n < K:
                # q b with b in C_n[k-1]
                parts[(n, Q, n, Q)] = c.d(k - 1)
                parts[(n + 1, PLAIN, n, Q)] = seq.increments[n][k - 1]
                parts[(n, PLAIN, n, Q)] = F2Matrix.identity(c.dim(k - 1))
        mats.append(_assemble(layout, layout, -1, parts, k))
    underlying = ChainComplex(layout.dims, mats)
    return TelescopeComplex(underlying, seq, layout)


def _stage_block(m: GradedMap, k: int) -> F2Matrix:
    return m[k] if k >= 0 else F2Matrix.zeros(m.target.dim(k + m.degree), 0)


def _tel_formula(
    src: TelescopeComplex,
    dst: TelescopeComplex,
    phi: Sequence[GradedMap],
    kappa: Sequence[GradedMap],
    degree: int,
) -> GradedMap:
    """Matrix of ``a + q b -> phi a + kappa b + q phi b`` of the given degree."""
    K = src.K
    blocks = []
    for k in range(src.underlying.top_degree + 1):
        parts = {}
        for n in range(K + 1):
            parts[(n, PLAIN, n, PLAIN)] = _stage_block(phi[n], k)
            if n < K:
                parts[(n + 1, PLAIN, n, Q)] = _stage_block(kappa[n], k - 1)
                parts[(n, Q, n, Q)] = _stage_block(phi[n], k - 1)
        blocks.append(_assemble(src.layout, dst.layout, degree, parts, k))
    return GradedMap(src.underlying, dst.underlying, blocks, degree)


class TelescopeMorphism:
    """``(phi_N, kappa_N)`` from one sequence to another; the kappa relation is checked."""

    def __init__(self, source: ComplexSequence, target: ComplexSequence, phi: Sequence[GradedMap], kappa: Sequence[GradedMap], check: bool = True):
        if len(source) != len(target):
            raise TelescopeError("stage count mismatch")
        phi, kappa = list(phi), list(kappa)
        if len(phi) != len(source) or len(kappa) != source.K:
            raise TelescopeError("need one phi per stage and one kappa per increment")
        for n, f in enumerate(phi):
            if f.degree != 0 or not (same_complex(f.source, source.stages[n]) and same_complex(f.target, target.stages[n])):
                raise TelescopeError(f"phi_{n} has the wrong source, target or degree")
        for n, h in enumerate(kappa):
            if h.degree != 1 or not (same_complex(h.source, source.stages[n]) and same_complex(h.target, target.stages[n + 1])):
                raise TelescopeError(f"kappa_{n} has the wrong source, target or degree")
        self.source, self.target = source, target
        self.phi, self.kappa = phi, kappa
        if check:
            bad = self.failing_stage()
            if bad is not None:
                raise TelescopeError(f"phi does not commute with the increments up to kappa at stage {bad}")

    def failing_stage(self) -> int | None:
        for n in range(self.source.K):
            lhs = self.phi[n + 1].compose(self.source.increments[n]) + self.target.increments[n].compose(self.phi[n])
            if not lhs.same_blocks(self.kappa[n].commutator_with_d()):
                return n
        return None

    @classmethod
    def identity(cls, seq: ComplexSequence) -> TelescopeMorphism:
        return cls(
            seq,
            seq,
            [ChainMap.identity(c) for c in seq.stages],
            [GradedMap.zero(seq.stages[n], seq.stages[n + 1], 1) for n in range(seq.K)],
            check=False,
        )

    @classmethod
    def zero(cls, source: ComplexSequence, target: ComplexSequence) -> TelescopeMorphism:
        return cls(
            source,
            target,
            [ChainMap.zero(a, b) for a, b in zip(source.stages, target.stages)],
            [GradedMap.zero(source.stages[n], target.stages[n + 1], 1) for n in range(source.K)],
            check=False,
        )


def tel_map(m: TelescopeMorphism, src: TelescopeComplex | None = None, dst: TelescopeComplex | None = None) -> ChainMap:
    src = src or tel_build(m.source)
    dst = dst or tel_build(m.target)
    g = _tel_formula(src, dst, m.phi, m.kappa, 0)
    return ChainMap(g.source, g.target, g.blocks)


def tel_compose(a: TelescopeMorphism, b: TelescopeMorphism) -> TelescopeMorphism:
    """``a`` after ``b``: ``(chi, lambda) o (phi, kappa) = (chi phi, chi kappa + lambda phi)``."""
    if len(a.source) != len(b.target):
        raise TelescopeError("stage count mismatch")
    for n, (x, y) in enumerate(zip(a.source.stages, b.target.stages)):
        if not same_complex(x, y):
            raise TelescopeError(f"stage {n}: target of the first morphism is not the source of the second")
    phi = [a.phi[n].compose(b.phi[n]) for n in range(len(b.phi))]
    kappa = [
        a.phi[n + 1].compose(b.kappa[n]) + a.kappa[n].compose(b.phi[n])
        for n in range(b.source.K)
    ]
    return TelescopeMorphism(b.source, a.target, phi, kappa)


class TelescopeHomotopyDatum:
    """Homotopy between two telescope morphisms (phi of degree +1, kappa of degree +2)."""

    def __init__(self, phi0: TelescopeMorphism, phi1: TelescopeMorphism, phi: Sequence[GradedMap], kappa: Sequence[GradedMap], check: bool = True):
        src, dst = phi0.source, phi0.target
        if len(phi1.source) != len(src):
            raise TelescopeError("stage count mismatch")
        phi, kappa = list(phi), list(kappa)
        if len(phi) != len(src) or len(kappa) != src.K:
            raise TelescopeError("need one phi per stage and one kappa per increment")
        if any(h.degree != 1 for h in phi) or any(h.degree != 2 for h in kappa):
            raise TelescopeError("phi must have degree 1 and kappa degree 2")
        self.phi0, self.phi1 = phi0, phi1
        self.phi, self.kappa = phi, kappa
        if check:
            problem = self.failing_relation()
            if problem is not None:
                raise TelescopeError(problem)

    def failing_relation(self) -> str | None:
        src, dst = self.phi0.source, self.phi0.target
        for n in range(len(src)):
            if not validate_homotopy(self.phi[n], self.phi0.phi[n], self.phi1.phi[n]):
                return f"phi1 + phi0 != d phi + phi d at stage {n}"
        for n in range(src.K):
            lhs = (
                self.phi1.kappa[n]
                + self.phi0.kappa[n]
                + self.phi[n + 1].compose(src.increments[n])
                + dst.increments[n].compose(self.phi[n])
            )
            if not lhs.same_blocks(self.kappa[n].commutator_with_d()):
                return f"kappa1 + kappa0 + phi alpha + beta phi != d kappa + kappa d at stage {n}"
        return None


def tel_homotopy(h: TelescopeHomotopyDatum, src: TelescopeComplex | None = None, dst: TelescopeComplex | None = None) -> GradedMap:
    src = src or tel_build(h.phi0.source)
    dst = dst or tel_build(h.phi0.target)
    return _tel_formula(src, dst, h.phi, h.kappa, 1)


def check_tel_homotopy(h: TelescopeHomotopyDatum) -> bool:
    """Exact check of ``Tel(phi0) + Tel(phi1) = delta H + H delta``."""
    src = tel_build(h.phi0.source)
    dst = tel_build(h.phi0.target)
    H = tel_homotopy(h, src, dst)
    return validate_homotopy(H, tel_map(h.phi0, src, dst), tel_map(h.phi1, src, dst))


def check_homotopy_equivalence(
    forward: TelescopeMorphism,
    backward: TelescopeMorphism,
    source_homotopy: tuple[Sequence[GradedMap], Sequence[GradedMap]],
    target_homotopy: tuple[Sequence[GradedMap], Sequence[GradedMap]],
) -> bool:
    """Verify that two telescope morphisms are mutually inverse up to homotopy.

    ``source_homotopy`` is the (phi, kappa) datum from ``backward o forward``
    to the identity of the source sequence; ``target_homotopy`` likewise for
    ``forward o backward``.
    """
    try:
        loops = [
            (tel_compose(backward, forward), TelescopeMorphism.identity(forward.source), source_homotopy),
            (tel_compose(forward, backward), TelescopeMorphism.identity(forward.target), target_homotopy),
        ]
        for composite, ident, (phi, kappa) in loops:
            datum = TelescopeHomotopyDatum(composite, ident, phi, kappa)
            if not check_tel_homotopy(datum):
                return False
    except ChainComplexError:
        return False
    return True


def tensor_sequence(seq_c: ComplexSequence, seq_d: ComplexSequence) -> tuple[ComplexSequence, list[TensorBasis]]:
    bases = [TensorBasis(c, d) for c, d in zip(seq_c.stages, seq_d.stages)]
    stages = [tensor_with_basis(tb) for tb in bases]
    incs = []
    for n in range(seq_c.K):
        m = tensor_map(seq_c.increments[n], seq_d.increments[n], bases[n], bases[n + 1])
        incs.append(ChainMap(stages[n], stages[n + 1], m.blocks, check=False))
    return ComplexSequence(stages, incs, check=False), bases


def tel_product(seq_c: ComplexSequence, seq_d: ComplexSequence) -> ChainMap:
    """The comparison map ``Tel(C) (x) Tel(D) -> Tel(C (x) D)``; chain-map identity asserted."""
    if len(seq_c) != len(seq_d):
        raise TelescopeError("both sequences need the same number of stages")
    tel_c, tel_d = tel_build(seq_c), tel_build(seq_d)
    prod_seq, stage_bases = tensor_sequence(seq_c, seq_d)
    tel_p = tel_build(prod_seq)
    outer = TensorBasis(tel_c.underlying, tel_d.underlying)
    source = tensor_with_basis(outer)
    K = seq_c.K
    # alpha^j and beta^j as column lookups, computed lazily
    powers_c: dict[tuple[int, int], GradedMap] = {}
    powers_d: dict[tuple[int, int], GradedMap] = {}

    def pow_c(m, j):
        if (m, j) not in powers_c:
            powers_c[(m, j)] = seq_c.iterate(m, j)
        return powers_c[(m, j)]

    def pow_d(m, j):
        if (m, j) not in powers_d:
            powers_d[(m, j)] = seq_d.iterate(m, j)
        return powers_d[(m, j)]

    blocks = []
    for deg in range(source.top_degree + 1):
        cols = []
        for p in range(deg + 1):
            q = deg - p
            addr_c = tel_c.addressing(p)
            addr_d = tel_d.addressing(q)
            for u in addr_c:
                for v in addr_d:
                    cols.append(_phi_column(u, v, pow_c, pow_d, stage_bases, tel_p, K))
        blocks.append(F2Matrix.from_columns(cols, tel_p.underlying.dim(deg)))
    phi = ChainMap(source, tel_p.underlying, blocks, check=False)
    bad = phi.failing_degree()
    if bad is not None:
        raise TelescopeError(f"product comparison map fails the chain-map identity in degree {bad}")
    return phi


def _phi_column(u: Address, v: Address, pow_c, pow_d, stage_bases, tel_p: TelescopeComplex, K: int) -> int:
    m, n = u.stage, v.stage
    if m == n:
        if u.flavor == Q and v.flavor == Q:
            return 0
        stage, x, p, y, q = m, 1 << u.index, u.local_degree, 1 << v.index, v.local_degree
        flavor = Q if (u.flavor == Q or v.flavor == Q) else PLAIN
    elif m < n:
        if u.flavor == Q:
            return 0
        stage, p, q = n, u.local_degree, v.local_degree
        x = pow_c(m, n - m)[p].column(u.index)
        y = 1 << v.index
        flavor = v.flavor
    else:
        if v.flavor == Q:
            return 0
        stage, p, q = m, u.local_degree, v.local_degree
        x = 1 << u.index
        y = pow_d(n, m - n)[q].column(v.index)
        flavor = u.flavor
    if stage == K and flavor == Q:
        return 0
    tb = stage_bases[stage]
    local = tb.vector(p, x, q, y) if p + q <= tb.top else 0
    if not local:
        return 0
    deg = p + q + (1 if flavor == Q else 0)
    return tel_p.layout.embed(deg, stage, flavor, local)


def retraction(tel: TelescopeComplex) -> ChainMap:
    """Chain map ``Tel_K -> C_K``: ``a`` at stage N goes to ``alpha^{K-N} a``, q-parts to 0."""
    seq = tel.sequence
    K = seq.K
    last = seq.stages[K]
    pushes = [seq.iterate(n, K - n) for n in range(K + 1)]
    blocks = []
    for k in range(tel.underlying.top_degree + 1):
        cols = []
        for addr in tel.addressing(k):
            if addr.flavor == Q:
                cols.append(0)
            else:
                cols.append(pushes[addr.stage][k].column(addr.index))
        blocks.append(F2Matrix.from_columns(cols, last.dim(k)))
    return ChainMap(tel.underlying, last, blocks)


def shift_map(tel: TelescopeComplex) -> ChainMap:
    """The shift ``Tel_{K-1} -> Tel_K`` moving stage N to stage N+1 through ``alpha_N``."""
    seq = tel.sequence
    if seq.K < 1:
        raise TelescopeError("the shift needs at least two stages")
    lower = tel_build(seq.truncated(seq.K - 1))
    K = seq.K
    blocks = []
    for k in range(lower.underlying.top_degree + 1):
        parts = {}
        for n in range(K):
            parts[(n + 1, PLAIN, n, PLAIN)] = seq.increments[n][k]
            if n < K - 1:
                parts[(n + 1, Q, n, Q)] = _stage_block(seq.increments[n], k - 1)
        rows = tel.layout.block_sizes(k)
        cols = lower.layout.block_sizes(k)
        blocks.append(
            F2Matrix.block(
                rows,
                cols,
                {
                    (tel.layout.block_index(ts, tf), lower.layout.block_index(ss, sf)): mat
                    for (ts, tf, ss, sf), mat in parts.items()
                },
            )
        )
    return ChainMap(lower.underlying, tel.underlying, blocks)


def shift_quasi_iso(tel: TelescopeComplex, max_degree: int | None = None) -> bool:
    """Whether the shift induces isomorphisms on homology through ``max_degree``.

    The cone of the shift is tested for acyclicity in degrees
    ``0..max_degree + 1``.  The default bound is ``K - 1``.
    """
    if max_degree is None:
        max_degree = tel.K - 1
    c = cone(shift_map(tel))
    return is_acyclic(c, range(0, max_degree + 2))
