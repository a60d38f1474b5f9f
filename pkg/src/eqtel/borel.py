"""Finite Borel constructions: Milnor joins, homotopy quotients and their increments.

Stage ``N`` is ``X_N = (X x EG_N) / G`` with ``EG_N`` the ``(N+1)``-fold join
of the group.  The product is the cell product: a cell is a pair
``sigma x tau`` of simplices with ``d(sigma x tau) = d sigma x tau + sigma x d tau``.
``G`` acts freely on the cells of ``EG_N``, so every orbit of product cells
has exactly one member whose second factor is the stored representative of
a cell of ``B_N = EG_N / G``.  Cells of ``X_N`` in degree ``n`` are therefore
pairs ``(sigma, b)`` with ``sigma`` any simplex of ``X`` and ``b`` a cell of
``B_N``, enumerated by ``(dim sigma, sigma, b)``.

Vertex ``(level, h)`` of ``EG_N`` has index ``level*|G| + h``, so ``EG_N`` is a
prefix of ``EG_{N+1}`` and representatives are stable under the inclusions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product as cartesian
from typing import Sequence

from .chaincx import ChainComplex, ChainMap, tensor
from .f2linalg import F2Matrix, iter_bits
from .groups import FiniteGroup, GroupError
from .simplicial import GroupAction, OrbitComplex, SimplicialComplex, Simplex
from .telescope import ComplexSequence


class BorelError(ValueError):
    pass


def milnor_eg(
    group: FiniteGroup, n: int, max_dim: int | None = None, allow_trivial: bool = False
) -> tuple[SimplicialComplex, GroupAction]:
    """``(n+1)``-fold join of the group's underlying set with left translation.

    For the trivial group the join is a simplex; it is only built with
    ``allow_trivial``, which the identity checks of the comparison maps use.
    """
    if n < 0:
        raise BorelError("stage must be non-negative")
    order = len(group)
    if order < 2 and not allow_trivial:
        raise BorelError("the Milnor construction needs a nontrivial group")
    top = n if max_dim is None else min(n, max_dim)
    vertices = [(level, name) for level in range(n + 1) for name in group.names]
    simplices = []
    for r in range(1, top + 2):
        for levels in combinations(range(n + 1), r):
            for elems in cartesian(range(order), repeat=r):
                simplices.append(tuple(l * order + h for l, h in zip(levels, elems)))
    eg = SimplicialComplex(vertices, simplices, check=False)
    perms = [[(v // order) * order + group.mul(g, v % order) for v in range(len(vertices))] for g in range(order)]
    return eg, GroupAction(group, eg, perms, check=False)


class BorelCells:
    """Cell complex ``(X x EG) / G`` for an action free on ``EG``."""

    def __init__(self, x: SimplicialComplex, act: GroupAction, eg_action: GroupAction, max_dim: int | None = None):
        if act.group is not eg_action.group:
            raise BorelError("the two actions use different groups")
        self.x = x
        self.act = act
        self.group = act.group
        self.eg = eg_action.on
        self.eg_action = eg_action
        self.bn = OrbitComplex(eg_action, max_dim=max_dim, ordered=True)
        top = x.dimension + self.bn.dimension
        self.top = top if max_dim is None else min(top, max_dim)
        self.max_dim = max_dim
        # xcell[g][p][i]: index of g . sigma_i
        self.xcell = [
            [[x.index(sorted(perm[v] for v in s)) for s in cells] for cells in x.cells]
            for perm in act.perms
        ]
        self.offsets: list[list[int]] = []
        self.dims: list[int] = []
        for n in range(self.top + 1):
            off, pos = [], 0
            for p in range(n + 1):
                off.append(pos)
                pos += x.n_cells(p) * self.bn.n_cells(n - p)
            self.offsets.append(off)
            self.dims.append(pos)
        self._faces: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def __repr__(self) -> str:
        return f"BorelCells(dims={self.dims})"

    def n_cells(self, n: int) -> int:
        return self.dims[n] if 0 <= n <= self.top else 0

    @property
    def dimension(self) -> int:
        return self.top

    def index(self, p: int, i: int, q: int, j: int) -> int:
        return self.offsets[p + q][p] + i * self.bn.n_cells(q) + j

    def decode(self, n: int, idx: int) -> tuple[int, int, int, int]:
        off = self.offsets[n]
        p = max(k for k in range(n + 1) if off[k] <= idx and self.x.n_cells(k) * self.bn.n_cells(n - k))
        i, j = divmod(idx - off[p], self.bn.n_cells(n - p))
        return p, i, n - p, j

    def cells(self, n: int):
        """Yield ``(p, i, q, j)`` in basis order."""
        for p in range(n + 1):
            q = n - p
            nb = self.bn.n_cells(q)
            for i in range(self.x.n_cells(p)):
                for j in range(nb):
                    yield p, i, q, j

    def locate(self, tau: Simplex) -> tuple[int, int]:
        """Return ``(b, g)`` with ``tau = g . rep(b)``."""
        best, g_best = None, 0
        for g, perm in enumerate(self.eg_action.perms):
            img = tuple(perm[v] for v in tau)
            if best is None or img < best:
                best, g_best = img, g
        return self.bn._index[len(tau) - 1][best], self.group.inverse[g_best]

    def eg_face(self, q: int, j: int, positions: Sequence[int]) -> tuple[int, int]:
        rep = self.bn.cells[q][j]
        return self.locate(tuple(rep[k] for k in positions))

    def _b_faces(self, q: int, j: int) -> list[tuple[int, int]]:
        key = (q, j)
        out = self._faces.get(key)
        if out is None:
            out = [self.eg_face(q, j, [k for k in range(q + 1) if k != drop]) for drop in range(q + 1)]
            self._faces[key] = out
        return out

    def translate(self, g: int, p: int, i: int) -> int:
        return self.xcell[g][p][i]

    def boundary_matrix(self, n: int) -> F2Matrix:
        xd = self.x.chain_complex
        inv = self.group.inverse
        cols = []
        for p, i, q, j in self.cells(n):
            v = 0
            if p >= 1:
                for f in iter_bits(xd.d(p).column(i)):
                    v ^= 1 << self.index(p - 1, f, q, j)
            if q >= 1:
                for jf, g in self._b_faces(q, j):
                    v ^= 1 << self.index(p, self.xcell[inv[g]][p][i], q - 1, jf)
            cols.append(v)
        return F2Matrix.from_columns(cols, self.n_cells(n - 1))

    @cached_property
    def chain_complex(self) -> ChainComplex:
        return ChainComplex(self.dims, [self.boundary_matrix(n) for n in range(1, self.top + 1)])

    def cap_bits(self, n: int, chain: int, d: int, cochain: int) -> int:
        """Cap a chain of degree ``n`` with a cocycle of ``B`` pulled back along the EG factor.

        On a cell ``sigma x tau`` the result is ``sigma x (tau cap a)``, with
        ``a`` evaluated on the back ``d``-face of ``tau``.
        """
        inv = self.group.inverse
        out = 0
        for idx in iter_bits(chain):
            p, i, q, j = self.decode(n, idx)
            if q < d:
                continue
            b_back, _ = self.eg_face(q, j, range(q - d, q + 1))
            if not (cochain >> b_back) & 1:
                continue
            jf, g = self.eg_face(q, j, range(q - d + 1))
            out ^= 1 << self.index(p, self.xcell[inv[g]][p][i], q - d, jf)
        return out


@dataclass
class BorelStage:
    """One stage ``X_N`` together with ``EG_N`` and ``B_N``."""

    N: int
    eg: SimplicialComplex
    eg_action: GroupAction
    xn: BorelCells

    @property
    def bn(self) -> OrbitComplex:
        return self.xn.bn

    @cached_property
    def proj_b(self) -> ChainMap:
        """``X_N -> B_N``: vertex times ``tau`` goes to the orbit of ``tau``."""
        xn, bn = self.xn, self.bn
        blocks = []
        for n in range(xn.top + 1):
            cols = [(1 << j) if p == 0 else 0 for p, i, q, j in xn.cells(n)]
            blocks.append(F2Matrix.from_columns(cols, bn.n_cells(n)))
        return ChainMap(xn.chain_complex, bn.chain_complex, blocks)

    def proj_x(self, xq: OrbitComplex, target: ChainComplex | None = None) -> ChainMap:
        """``X_N -> X/G``: ``sigma`` times a vertex goes to the orbit of ``sigma``."""
        xn = self.xn
        images = [[xq.index_of(s) for s in cells] if k <= xq.dimension else [] for k, cells in enumerate(xn.x.cells)]
        blocks = []
        for n in range(xn.top + 1):
            cols = [(1 << images[p][i]) if q == 0 else 0 for p, i, q, j in xn.cells(n)]
            blocks.append(F2Matrix.from_columns(cols, xq.n_cells(n)))
        if target is None:
            target = xq.chain_complex
            if target.top_degree > xn.top:
                target = target.truncate(xn.top)
        return ChainMap(xn.chain_complex, target, blocks)

    @cached_property
    def quotient_proj(self) -> ChainMap:
        """``C(X) (x) C(EG_N) -> C(X_N)`` in the stored degree range."""
        xn = self.xn
        src = tensor(xn.x.chain_complex, self.eg.chain_complex)
        if src.top_degree > xn.top:
            src = src.truncate(xn.top)
        inv = xn.group.inverse
        blocks = []
        for n in range(src.top_degree + 1):
            cols = []
            for p in range(n + 1):
                q = n - p
                for i in range(xn.x.n_cells(p)):
                    for tau in self.eg.cells[q] if q <= self.eg.dimension else ():
                        j, g = xn.locate(tau)
                        cols.append(1 << xn.index(p, xn.xcell[inv[g]][p][i], q, j))
            blocks.append(F2Matrix.from_columns(cols, xn.n_cells(n)))
        return ChainMap(src, xn.chain_complex, blocks)


def homotopy_quotient(
    x: SimplicialComplex,
    act: GroupAction,
    n: int,
    max_dim: int | None = None,
    allow_trivial: bool = False,
) -> BorelStage:
    """Stage ``n`` of the Borel construction, keeping cells up to ``max_dim``."""
    if act.on is not x:
        raise BorelError("action does not act on the given complex")
    eg, eg_act = milnor_eg(act.group, n, max_dim=max_dim, allow_trivial=allow_trivial)
    return BorelStage(n, eg, eg_act, BorelCells(x, act, eg_act, max_dim))


def increment(lower: BorelStage, upper: BorelStage) -> ChainMap:
    """``X_N -> X_{N+1}`` induced by the inclusion ``EG_N -> EG_{N+1}``."""
    lo, hi = lower.xn, upper.xn
    if upper.N != lower.N + 1 or lo.x is not hi.x:
        raise BorelError("stages are not consecutive stages of one construction")
    if hi.top < lo.top:
        raise BorelError("upper stage is truncated below the lower stage")
    bmap = [[hi.bn.index_of(s) for s in cells] for cells in lo.bn.cells]
    blocks = []
    for n in range(lo.top + 1):
        cols = [1 << hi.index(p, i, q, bmap[q][j]) for p, i, q, j in lo.cells(n)]
        blocks.append(F2Matrix.from_columns(cols, hi.n_cells(n)))
    return ChainMap(lo.chain_complex, hi.chain_complex, blocks)


@dataclass
class BorelSequence:
    space: SimplicialComplex
    action: GroupAction
    stages: list[BorelStage]
    increments: list[ChainMap]
    max_dim: int | None

    @property
    def K(self) -> int:
        return len(self.stages) - 1

    @cached_property
    def chain_seq(self) -> ComplexSequence:
        return ComplexSequence([s.xn.chain_complex for s in self.stages], self.increments, check=False)

    @cached_property
    def space_quotient(self) -> OrbitComplex:
        """``X/G`` for actions free on vertices."""
        if not self.action.is_free_on_vertices():
            raise GroupError("action is not free on vertices")
        return OrbitComplex(self.action, max_dim=self.max_dim)

    def extend(self) -> BorelSequence:
        """Append one more stage in place and return self."""
        allow = len(self.action.group) < 2
        nxt = homotopy_quotient(self.space, self.action, self.K + 1, self.max_dim, allow_trivial=allow)
        self.increments.append(increment(self.stages[-1], nxt))
        self.stages.append(nxt)
        self.__dict__.pop("chain_seq", None)
        return self

    def truncated(self, K: int) -> BorelSequence:
        return BorelSequence(self.space, self.action, self.stages[: K + 1], self.increments[:K], self.max_dim)


def borel_sequence(x: SimplicialComplex, act: GroupAction, K: int, max_dim: int | None = None) -> BorelSequence:
    """Stages ``0..K`` (cells up to ``max_dim``) with their increments."""
    if K < 1:
        raise BorelError("need at least two stages (K >= 1)")
    allow = len(act.group) < 2
    seq = BorelSequence(x, act, [homotopy_quotient(x, act, 0, max_dim, allow_trivial=allow)], [], max_dim)
    for _ in range(K):
        seq.extend()
    return seq
