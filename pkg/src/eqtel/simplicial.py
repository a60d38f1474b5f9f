"""Ordered simplicial complexes, their quotients, maps, and (co)chain products.

Every complex carries a global vertex order and simplices are increasing
tuples of vertex indices.  Quotients by free actions are kept as
Delta-complexes (:class:`OrbitComplex`): a cell is an orbit of simplices,
stored by its lexicographically least representative, so two cells may share
the same vertex orbits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, Sequence

from .chaincx import ChainComplex, ChainMap
from .f2linalg import F2Matrix, F2Vector, iter_bits
from .groups import FiniteGroup, GroupError

Simplex = tuple[int, ...]


class SimplicialError(ValueError):
    pass


class _CellComplexMixin:
    """Chain-level machinery shared by simplicial and orbit complexes.

    Subclasses provide ``cells`` (per-dimension list of vertex tuples) and
    ``face_index(k, i, positions)``.
    """

    cells: list[list[Simplex]]

    @property
    def dimension(self) -> int:
        return len(self.cells) - 1

    def n_cells(self, k: int) -> int:
        return len(self.cells[k]) if 0 <= k < len(self.cells) else 0

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cells)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def boundary_matrix(self, k: int) -> F2Matrix:
        cols = []
        for i in range(self.n_cells(k)):
            v = 0
            for drop in range(k + 1):
                pos = tuple(p for p in range(k + 1) if p != drop)
                v ^= 1 << self.face_index(k, i, pos)
            cols.append(v)
        return F2Matrix.from_columns(cols, self.n_cells(k - 1))

    @cached_property
    def chain_complex(self) -> ChainComplex:
        dims = list(self.f_vector()) or [0]
        d = [self.boundary_matrix(k) for k in range(1, len(dims))]
        return ChainComplex(dims, d)

    def front_face(self, k: int, i: int, p: int) -> int:
        return self.face_index(k, i, tuple(range(p + 1)))

    def back_face(self, k: int, i: int, q: int) -> int:
        return self.face_index(k, i, tuple(range(k - q, k + 1)))


class SimplicialComplex(_CellComplexMixin):
    """Finite simplicial complex closed under faces, with ordered vertices."""

    def __init__(self, vertices: Sequence[Hashable], simplices: Iterable[Iterable[int]], check: bool = True):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise SimplicialError("duplicate vertex labels")
        # every listed vertex is a 0-cell, whether or not a facet uses it
        by_dim: dict[int, set[Simplex]] = {0: {(v,) for v in range(len(self.vertices))}} if self.vertices else {}
        for s in simplices:
            t = tuple(sorted(s))
            if not t:
                continue
            if len(set(t)) != len(t):
                raise SimplicialError(f"repeated vertex in simplex {t}")
            by_dim.setdefault(len(t) - 1, set()).add(t)
        top = max(by_dim) if by_dim else -1
        self.cells = [sorted(by_dim.get(k, ())) for k in range(top + 1)]
        self._index = [{s: i for i, s in enumerate(c)} for c in self.cells]
        if check:
            n = len(self.vertices)
            for c in self.cells:
                for s in c:
                    if s[0] < 0 or s[-1] >= n:
                        raise SimplicialError(f"simplex {s} uses an unknown vertex")
            for k in range(1, len(self.cells)):
                for s in self.cells[k]:
                    for f in combinations(s, k):
                        if f not in self._index[k - 1]:
                            raise SimplicialError(f"face {f} of {s} is missing")

    @property
    def simplices(self) -> list[list[Simplex]]:
        return self.cells

    def __repr__(self) -> str:
        return f"SimplicialComplex(f={list(self.f_vector())})"

    @classmethod
    def from_facets(cls, vertices: Sequence[Hashable], facets: Iterable[Iterable[Hashable]]) -> SimplicialComplex:
        vertices = list(vertices)
        pos = {v: i for i, v in enumerate(vertices)}
        closure: set[Simplex] = set()
        for facet in facets:
            facet = list(facet)
            if not facet:
                raise SimplicialError("empty facet")
            try:
                t = tuple(sorted({pos[v] for v in facet}))
            except KeyError as exc:
                raise SimplicialError(f"facet {facet} uses unknown vertex {exc.args[0]!r}") from None
            if len(t) != len(facet):
                raise SimplicialError(f"facet {facet} repeats a vertex")
            for r in range(1, len(t) + 1):
                closure.update(combinations(t, r))
        return cls(vertices, closure, check=False)

    @classmethod
    def simplex(cls, n: int) -> SimplicialComplex:
        return cls.from_facets(list(range(n + 1)), [list(range(n + 1))])

    @classmethod
    def point(cls) -> SimplicialComplex:
        return cls.from_facets(["*"], [["*"]])

    def index(self, simplex: Sequence[int]) -> int:
        t = tuple(simplex)
        try:
            return self._index[len(t) - 1][t]
        except (KeyError, IndexError):
            raise SimplicialError(f"{t} is not a simplex") from None

    def contains(self, simplex: Simplex) -> bool:
        k = len(simplex) - 1
        return 0 <= k < len(self._index) and simplex in self._index[k]

    def face_index(self, k: int, i: int, positions: Sequence[int]) -> int:
        s = self.cells[k][i]
        return self._index[len(positions) - 1][tuple(s[p] for p in positions)]

    def vertex_index(self, label: Hashable) -> int:
        try:
            return self.vertices.index(label)
        except ValueError:
            raise SimplicialError(f"unknown vertex {label!r}") from None

    def skeleton(self, k: int) -> SimplicialComplex:
        return SimplicialComplex(self.vertices, (s for c in self.cells[: k + 1] for s in c), check=False)


# -- group actions ------------------------------------------------------------


class GroupAction:
    """Left action of a finite group on a complex by vertex permutations."""

    def __init__(self, group: FiniteGroup, on: SimplicialComplex, perms: Sequence[Sequence[int]], check: bool = True):
        perms = [tuple(int(x) for x in p) for p in perms]
        n = len(on.vertices)
        if len(perms) != len(group):
            raise GroupError(f"need one permutation per group element ({len(group)}), got {len(perms)}")
        for g, p in enumerate(perms):
            if sorted(p) != list(range(n)):
                raise GroupError(f"element {group.names[g]} does not permute the {n} vertices")
        self.group = group
        self.on = on
        self.perms = perms
        if check:
            self._validate()

    def _validate(self) -> None:
        g = self.group
        if self.perms[g.identity] != tuple(range(len(self.on.vertices))):
            raise GroupError("identity element acts nontrivially")
        for a in range(len(g)):
            for b in range(len(g)):
                ab = self.perms[g.mul(a, b)]
                pa, pb = self.perms[a], self.perms[b]
                if any(ab[v] != pa[pb[v]] for v in range(len(pa))):
                    raise GroupError(
                        f"action is not a homomorphism at ({g.names[a]}, {g.names[b]})"
                    )
        for a, p in enumerate(self.perms):
            for cells in self.on.cells:
                for s in cells:
                    if not self.on.contains(tuple(sorted(p[v] for v in s))):
                        raise GroupError(f"element {g.names[a]} does not map simplex {s} to a simplex")

    @classmethod
    def from_generators(cls, group: FiniteGroup, on: SimplicialComplex, gens: dict[int, Sequence[int]]) -> GroupAction:
        """Extend permutations given on some elements to the whole group via the table."""
        n = len(on.vertices)
        known: dict[int, tuple[int, ...]] = {group.identity: tuple(range(n))}
        for g, p in gens.items():
            known[g] = tuple(p)
        changed = True
        while changed:
            changed = False
            for a, pa in list(known.items()):
                for b, pb in list(known.items()):
                    ab = group.mul(a, b)
                    comp = tuple(pa[pb[v]] for v in range(n))
                    if ab not in known:
                        known[ab] = comp
                        changed = True
                    elif known[ab] != comp:
                        raise GroupError(
                            f"permutations are inconsistent with the table at ({group.names[a]}, {group.names[b]})"
                        )
        if len(known) != len(group):
            missing = [group.names[g] for g in range(len(group)) if g not in known]
            raise GroupError(f"the given permutations do not generate the group; missing {missing}")
        return cls(group, on, [known[g] for g in range(len(group))])

    @classmethod
    def trivial(cls, group: FiniteGroup, on: SimplicialComplex) -> GroupAction:
        ident = tuple(range(len(on.vertices)))
        return cls(group, on, [ident] * len(group), check=False)

    def is_free_on_vertices(self) -> bool:
        e = self.group.identity
        return all(p[v] != v for g, p in enumerate(self.perms) if g != e for v in range(len(p)))

    def preserves_order(self) -> bool:
        """Whether every element keeps the vertex order inside every simplex."""
        for p in self.perms:
            for cells in self.on.cells[1:]:
                for s in cells:
                    img = [p[v] for v in s]
                    if any(img[i] >= img[i + 1] for i in range(len(img) - 1)):
                        return False
        return True

    def canonical(self, simplex: Simplex) -> Simplex:
        """Least image of an increasing tuple (order-preserving actions only)."""
        return min(tuple(p[v] for v in simplex) for p in self.perms)

    def subdivided(self, sd: SimplicialComplex, carrier: list[tuple[int, int]]) -> GroupAction:
        lookup = {c: v for v, c in enumerate(carrier)}
        perms = []
        for p in self.perms:
            img = []
            for k, i in carrier:
                s = self.on.cells[k][i]
                img.append(lookup[(k, self.on.index(sorted(p[v] for v in s)))])
            perms.append(img)
        return GroupAction(self.group, sd, perms, check=False)


# -- maps ---------------------------------------------------------------------


class CellMap:
    """Map sending each cell to a cell of the same dimension or to zero (-1)."""

    def __init__(self, source, target, images: Sequence[Sequence[int]]):
        self.source = source
        self.target = target
        self._images = [list(x) for x in images]
        if len(self._images) != len(source.cells):
            raise SimplicialError("need images for every dimension")

    def images(self, k: int) -> list[int]:
        return self._images[k] if 0 <= k < len(self._images) else []

    def compose(self, first: CellMap) -> CellMap:
        """``self`` after ``first``."""
        out = []
        for k in range(len(first.source.cells)):
            mine = self.images(k)
            out.append([mine[j] if j >= 0 else -1 for j in first.images(k)])
        return CellMap(first.source, self.target, out)


class SimplicialMap(CellMap):
    """Vertex map spanning simplices onto simplices; degenerate images go to -1."""

    def __init__(self, source: SimplicialComplex, target: SimplicialComplex, vertex_map: Sequence[int] | dict):
        if isinstance(vertex_map, dict):
            vm = [target.vertex_index(vertex_map[v]) for v in source.vertices]
        else:
            vm = [int(x) for x in vertex_map]
        if len(vm) != len(source.vertices):
            raise SimplicialError("vertex map must be total")
        self.vertex_map = tuple(vm)
        images = []
        for k, cells in enumerate(source.cells):
            row = []
            for s in cells:
                img = tuple(sorted({vm[v] for v in s}))
                if not target.contains(img):
                    raise SimplicialError(f"image of {s} does not span a simplex")
                row.append(target.index(img) if len(img) == k + 1 else -1)
            images.append(row)
        super().__init__(source, target, images)

    def compose(self, first: CellMap) -> CellMap:
        if isinstance(first, SimplicialMap):
            return SimplicialMap(first.source, self.target, [self.vertex_map[v] for v in first.vertex_map])
        return super().compose(first)

    @classmethod
    def identity(cls, k: SimplicialComplex) -> SimplicialMap:
        return cls(k, k, list(range(len(k.vertices))))


def induced_chain_map(f: CellMap) -> ChainMap:
    src = f.source.chain_complex
    dst = f.target.chain_complex
    blocks = []
    for k in range(src.top_degree + 1):
        rows = dst.dim(k)
        cols = [(1 << j) if j >= 0 else 0 for j in f.images(k)]
        blocks.append(F2Matrix.from_columns(cols, rows))
    return ChainMap(src, dst, blocks)


# -- constructions -------------------------------------------------------------


def product(k: SimplicialComplex, l: SimplicialComplex, max_dim: int | None = None):
    """Staircase triangulation of ``|k| x |l|``.

    Vertices are pairs ordered lexicographically; simplices are chains
    ``(x_0, y_0) < ... < (x_m, y_m)`` increasing in both coordinates whose
    coordinate sets are simplices of ``k`` and ``l``.
    """
    simplices = product_simplices(k, l, max_dim)
    nl = len(l.vertices)
    vertices = [(a, b) for a in k.vertices for b in l.vertices]
    p = SimplicialComplex(vertices, simplices, check=False)
    proj_k = SimplicialMap(p, k, [v // nl for v in range(len(vertices))])
    proj_l = SimplicialMap(p, l, [v % nl for v in range(len(vertices))])
    return p, proj_k, proj_l


def _upper_neighbours(c: SimplicialComplex) -> list[list[int]]:
    out = [[v] for v in range(len(c.vertices))]
    if c.dimension >= 1:
        for a, b in c.cells[1]:
            out[a].append(b)
    return [sorted(x) for x in out]


def product_simplices(k: SimplicialComplex, l: SimplicialComplex, max_dim: int | None = None) -> list[Simplex]:
    top = k.dimension + l.dimension
    if max_dim is not None:
        top = min(top, max_dim)
    nl = len(l.vertices)
    up_k, up_l = _upper_neighbours(k), _upper_neighbours(l)
    out: list[Simplex] = []

    def grow(chain: list[int], xs: tuple[int, ...], ys: tuple[int, ...]):
        out.append(tuple(chain))
        if len(chain) > top:
            return
        x, y = xs[-1], ys[-1]
        for x2 in up_k[x]:
            nxs = xs if x2 == x else xs + (x2,)
            if x2 != x and not k.contains(nxs):
                continue
            for y2 in up_l[y]:
                if x2 == x and y2 == y:
                    continue
                nys = ys if y2 == y else ys + (y2,)
                if y2 != y and not l.contains(nys):
                    continue
                chain.append(x2 * nl + y2)
                grow(chain, nxs, nys)
                chain.pop()

    for x in range(len(k.vertices)):
        for y in range(nl):
            grow([x * nl + y], (x,), (y,))
    return out


def join(k: SimplicialComplex, l: SimplicialComplex) -> SimplicialComplex:
    """Join with tagged vertices; all of ``k`` precedes all of ``l``."""
    nk = len(k.vertices)
    vertices = [(0, v) for v in k.vertices] + [(1, w) for w in l.vertices]
    left = [()] + [s for c in k.cells for s in c]
    right = [()] + [tuple(v + nk for v in s) for c in l.cells for s in c]
    simplices = [a + b for a in left for b in right if a or b]
    return SimplicialComplex(vertices, simplices, check=False)


def barycentric(k: SimplicialComplex):
    """Barycentric subdivision; returns the complex and its carrier list.

    New vertex ``v`` corresponds to the simplex ``carrier[v] = (dim, index)``;
    new vertices are ordered by dimension, then by the old simplex order.
    """
    carrier = [(d, i) for d, cells in enumerate(k.cells) for i in range(len(cells))]
    vid = {c: v for v, c in enumerate(carrier)}
    faces_below: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for d, cells in enumerate(k.cells):
        for i, s in enumerate(cells):
            faces = []
            for r in range(1, d + 1):
                for f in combinations(s, r):
                    faces.append((r - 1, k.index(f)))
            faces_below[(d, i)] = faces
    flags_at: dict[tuple[int, int], list[tuple[int, ...]]] = {}
    simplices = []
    for c in carrier:
        flags = [(vid[c],)]
        for f in faces_below[c]:
            flags.extend(fl + (vid[c],) for fl in flags_at[f])
        flags_at[c] = flags
        simplices.extend(flags)
    labels = [tuple(k.vertices[v] for v in k.cells[d][i]) for d, i in carrier]
    return SimplicialComplex(labels, simplices, check=False), carrier


class QuotientError(SimplicialError):
    pass


class OrbitComplex(_CellComplexMixin):
    """Quotient of a simplex-free action, as a Delta-complex.

    Each cell is the orbit of a simplex and is stored by its least sorted
    image.  Over F2 no orientation bookkeeping is needed, so the chain
    complex is valid for any action that moves every simplex.  Front and back
    faces (cup and cap) additionally need an order-preserving action, so that
    every representative sees the same vertex order.
    """

    def __init__(self, action: GroupAction, max_dim: int | None = None, ordered: bool | None = None):
        self.action = action
        self.cover = action.on
        self.ordered = action.preserves_order() if ordered is None else ordered
        perms = action.perms
        e = action.group.identity
        moving = [p for g, p in enumerate(perms) if g != e]
        cells = []
        for k, cs in enumerate(self.cover.cells):
            if max_dim is not None and k > max_dim:
                break
            reps = []
            for s in cs:
                least = True
                for p in moving:
                    img = self._image(p, s)
                    if img == s:
                        raise QuotientError(f"simplex {s} is fixed setwise by a nontrivial element")
                    if img < s:
                        least = False
                if least:
                    reps.append(s)
            cells.append(reps)
        self.cells = cells
        self._index = [{s: i for i, s in enumerate(c)} for c in cells]
        orbit = [-1] * len(self.cover.vertices)
        reps = []
        for v in range(len(self.cover.vertices)):
            if orbit[v] < 0:
                for p in perms:
                    orbit[p[v]] = len(reps)
                reps.append(v)
        self.vertex_orbit = orbit
        self.vertices = tuple(self.cover.vertices[v] for v in reps)

    def _image(self, p: Sequence[int], s: Simplex) -> Simplex:
        if self.ordered:
            return tuple(p[v] for v in s)
        return tuple(sorted(p[v] for v in s))

    def canonical(self, simplex: Simplex) -> Simplex:
        return min(self._image(p, simplex) for p in self.action.perms)

    def front_face(self, k: int, i: int, p: int) -> int:
        self._need_order()
        return super().front_face(k, i, p)

    def back_face(self, k: int, i: int, q: int) -> int:
        self._need_order()
        return super().back_face(k, i, q)

    def _need_order(self) -> None:
        if not self.ordered:
            raise QuotientError("front and back faces need an order-preserving action; subdivide first")

    def __repr__(self) -> str:
        return f"OrbitComplex(f={list(self.f_vector())})"

    def index_of(self, simplex: Simplex) -> int:
        """Cell index of the orbit of a cover simplex."""
        return self._index[len(simplex) - 1][self.canonical(simplex)]

    def face_index(self, k: int, i: int, positions: Sequence[int]) -> int:
        s = self.cells[k][i]
        return self.index_of(tuple(s[p] for p in positions))

    def cell_vertices(self, k: int, i: int) -> tuple[int, ...]:
        return tuple(self.vertex_orbit[v] for v in self.cells[k][i])

    def projection(self) -> CellMap:
        images = []
        for k, cs in enumerate(self.cover.cells):
            if k >= len(self.cells):
                break
            images.append([self.index_of(s) for s in cs])
        cover = self.cover if len(images) == len(self.cover.cells) else self.cover.skeleton(len(images) - 1)
        return CellMap(cover, self, images)


def regularize(action: GroupAction, max_rounds: int = 2) -> tuple[GroupAction, int]:
    """Subdivide until the action preserves the vertex order inside simplices."""
    rounds = 0
    while not action.preserves_order():
        if rounds == max_rounds:
            raise QuotientError(f"action still reverses simplex orientations after {max_rounds} subdivisions")
        sd, carrier = barycentric(action.on)
        action = action.subdivided(sd, carrier)
        rounds += 1
    return action, rounds


def quotient(action: GroupAction, max_dim: int | None = None, ordered: bool = False):
    """Orbit complex of a vertex-free action and the projection onto it.

    With ``ordered=True`` the action is first subdivided until it preserves
    vertex order, which cup and cap on the quotient require.  The
    projection's source is the complex that was actually divided out.
    """
    if not action.is_free_on_vertices():
        raise QuotientError("action is not free on vertices")
    if ordered:
        action, _ = regularize(action)
    q = OrbitComplex(action, max_dim=max_dim)
    return q, q.projection()


# -- cochains -----------------------------------------------------------------


@dataclass(frozen=True)
class Cochain:
    complex: object
    degree: int
    values: F2Vector

    def __post_init__(self) -> None:
        if self.values.length != self.complex.n_cells(self.degree):
            raise SimplicialError("cochain length does not match the cell count")

    @classmethod
    def unit(cls, c) -> Cochain:
        n = c.n_cells(0)
        return cls(c, 0, F2Vector(n, (1 << n) - 1))

    @classmethod
    def from_bits(cls, c, degree: int, bits: int) -> Cochain:
        return cls(c, degree, F2Vector(c.n_cells(degree), bits))

    def __add__(self, other: Cochain) -> Cochain:
        _same(self.complex, other.complex)
        if self.degree != other.degree:
            raise SimplicialError("degree mismatch")
        return Cochain(self.complex, self.degree, self.values + other.values)


@dataclass(frozen=True)
class Chain:
    complex: object
    degree: int
    values: F2Vector

    def __post_init__(self) -> None:
        if self.values.length != self.complex.n_cells(self.degree):
            raise SimplicialError("chain length does not match the cell count")

    @classmethod
    def from_bits(cls, c, degree: int, bits: int) -> Chain:
        return cls(c, degree, F2Vector(c.n_cells(degree), bits))

    def __add__(self, other: Chain) -> Chain:
        _same(self.complex, other.complex)
        if self.degree != other.degree:
            raise SimplicialError("degree mismatch")
        return Chain(self.complex, self.degree, self.values + other.values)


def _same(a, b) -> None:
    if a is not b:
        raise SimplicialError("cochains live on different complexes")


def coboundary(a: Cochain) -> Cochain:
    d = a.complex.chain_complex.d(a.degree + 1)
    return Cochain.from_bits(a.complex, a.degree + 1, d.T.apply(a.values.bits) if d.ncols else 0)


def boundary(c: Chain) -> Chain:
    if c.degree == 0:
        return c
    d = c.complex.chain_complex.d(c.degree)
    return Chain.from_bits(c.complex, c.degree - 1, d.apply(c.values.bits))


def cup(a: Cochain, b: Cochain) -> Cochain:
    """Alexander-Whitney product: front p-face times back q-face."""
    _same(a.complex, b.complex)
    cx = a.complex
    p, q = a.degree, b.degree
    n = p + q
    av, bv = a.values.bits, b.values.bits
    out = 0
    for i in range(cx.n_cells(n)):
        if (av >> cx.front_face(n, i, p)) & 1 and (bv >> cx.back_face(n, i, q)) & 1:
            out |= 1 << i
    return Cochain.from_bits(cx, n, out)


def cap_bits(cx, n: int, chain: int, p: int, cochain: int) -> int:
    out = 0
    for i in iter_bits(chain):
        if (cochain >> cx.back_face(n, i, p)) & 1:
            out ^= 1 << cx.front_face(n, i, n - p)
    return out


def cap(c: Chain, a: Cochain) -> Chain:
    """Cap product: the cochain is evaluated on the back p-face."""
    _same(c.complex, a.complex)
    if a.degree > c.degree:
        raise SimplicialError(f"cannot cap a degree-{c.degree} chain with a degree-{a.degree} cochain")
    cx = c.complex
    return Chain.from_bits(cx, c.degree - a.degree, cap_bits(cx, c.degree, c.values.bits, a.degree, a.values.bits))


def pullback(f: CellMap, a: Cochain) -> Cochain:
    if a.complex is not f.target:
        raise SimplicialError("cochain does not live on the map's target")
    bits = 0
    for i, j in enumerate(f.images(a.degree)):
        if j >= 0 and (a.values.bits >> j) & 1:
            bits |= 1 << i
    return Cochain.from_bits(f.source, a.degree, bits)


def betti_numbers(c, top: int | None = None) -> list[int]:
    from .chaincx import betti_numbers as _bn

    return _bn(c.chain_complex, top)
