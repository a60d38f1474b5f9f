"""Algebraic discrete Morse reduction over F2.

An acyclic matching pairs basis cells ``a`` (degree k) and ``b`` (degree k+1)
with ``<d b, a> = 1``.  Unmatched cells are critical and span a smaller
complex homotopy equivalent to the original.  Matched lower cells are called
``up`` cells (their partner sits one degree higher), matched upper cells
``down`` cells.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .chaincx import ChainComplex, ChainHomotopy, ChainMap, ChainComplexError
from .f2linalg import F2Matrix, iter_bits
from .telescope import ComplexSequence, TelescopeMorphism


class MatchingError(ChainComplexError):
    pass


@dataclass(frozen=True)
class MorseMatching:
    complex: ChainComplex
    pairs: tuple[tuple[int, int, int], ...]

    def partner_maps(self) -> tuple[list[dict[int, int]], list[dict[int, int]]]:
        """Per degree: ``up[k][a] = b`` and ``down[k+1][b] = a``."""
        top = self.complex.top_degree
        up = [dict() for _ in range(top + 1)]
        down = [dict() for _ in range(top + 1)]
        for k, a, b in self.pairs:
            up[k][a] = b
            down[k + 1][b] = a
        return up, down

    def critical(self, k: int) -> list[int]:
        up, down = self.partner_maps()
        return [i for i in range(self.complex.dim(k)) if i not in up[k] and i not in down[k]]

    def validate(self) -> None:
        c = self.complex
        seen = set()
        for k, a, b in self.pairs:
            if not (0 <= k < c.top_degree and 0 <= a < c.dim(k) and 0 <= b < c.dim(k + 1)):
                raise MatchingError(f"pair {(k, a, b)} is out of range")
            if not c.d(k + 1)[a, b]:
                raise MatchingError(f"pair {(k, a, b)} is not an incidence")
            for cell in ((k, a), (k + 1, b)):
                if cell in seen:
                    raise MatchingError(f"cell {cell} is matched twice")
                seen.add(cell)
        up, _ = self.partner_maps()
        for k in range(c.top_degree):
            _topological_order(c, k, up[k])


def _creates_cycle(c: ChainComplex, k: int, up: dict[int, int], a: int, b: int) -> bool:
    """Whether pairing ``a`` with ``b`` closes an alternating path back to ``a``."""
    cols = c.d(k + 1)
    stack = [b]
    seen = {b}
    while stack:
        cur = stack.pop()
        for face in iter_bits(cols.column(cur)):
            if cur == b and face == a:
                continue
            if face == a:
                return True
            nxt = up.get(face)
            if nxt is not None and nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


def greedy_matching(c: ChainComplex) -> MorseMatching:
    """Scan cells of each degree in basis order and pair with the first free face."""
    top = c.top_degree
    matched = [set() for _ in range(top + 1)]
    pairs = []
    for k in range(top):
        up: dict[int, int] = {}
        cols = c.d(k + 1)
        for b in range(c.dim(k + 1)):
            for a in iter_bits(cols.column(b)):
                if a in matched[k]:
                    continue
                if _creates_cycle(c, k, up, a, b):
                    continue
                up[a] = b
                matched[k].add(a)
                matched[k + 1].add(b)
                pairs.append((k, a, b))
                break
    return MorseMatching(c, tuple(pairs))


def _topological_order(c: ChainComplex, k: int, up: dict[int, int]) -> dict[int, int]:
    """Rank the ``up`` cells of degree ``k`` so that zig-zag steps always move forward."""
    cols = c.d(k + 1)
    succ = {}
    indeg = {a: 0 for a in up}
    for a, b in up.items():
        nxt = [f for f in iter_bits(cols.column(b)) if f != a and f in up]
        succ[a] = nxt
        for f in nxt:
            indeg[f] += 1
    ready = sorted(a for a, n in indeg.items() if n == 0)
    order: dict[int, int] = {}
    heapq.heapify(ready)
    while ready:
        a = heapq.heappop(ready)
        order[a] = len(order)
        for f in succ[a]:
            indeg[f] -= 1
            if indeg[f] == 0:
                heapq.heappush(ready, f)
    if len(order) != len(up):
        raise MatchingError(f"matching has a cycle in degrees {k}, {k + 1}")
    return order


@dataclass
class Reduction:
    big: ChainComplex
    small: ChainComplex
    include: ChainMap
    project: ChainMap
    homotopy: ChainHomotopy
    critical: list[list[int]]

    def size_ratio(self) -> float:
        return self.small.size() / self.big.size() if self.big.size() else 1.0


def reduce(c: ChainComplex, m: MorseMatching | None = None) -> Reduction:
    """Collapse the matched pairs; the result satisfies ``p i = 1`` and ``i p + 1 = dh + hd``."""
    m = greedy_matching(c) if m is None else m
    if m.complex is not c:
        raise MatchingError("matching belongs to a different complex")
    top = c.top_degree
    up, down = m.partner_maps()
    orders = [_topological_order(c, k, up[k]) if k < top else {} for k in range(top + 1)]
    crit = [[i for i in range(c.dim(k)) if i not in up[k] and i not in down[k]] for k in range(top + 1)]
    crit_pos = [{i: n for n, i in enumerate(cs)} for cs in crit]
    up_mask = [sum(1 << a for a in up[k]) for k in range(top + 1)]

    def h(k: int, x: int) -> int:
        """Flow ``x`` (degree k) off its up cells; return the accumulated degree-(k+1) chain."""
        if k >= top:
            return 0
        order = orders[k]
        d = c.d(k + 1)
        y = 0
        r = x & up_mask[k]
        while r:
            a = min(iter_bits(r), key=order.__getitem__)
            b = up[k][a]
            y ^= 1 << b
            x ^= d.column(b)
            r = x & up_mask[k]
        return y

    def to_crit(k: int, x: int) -> int:
        out = 0
        pos = crit_pos[k]
        for i in iter_bits(x):
            n = pos.get(i)
            if n is not None:
                out |= 1 << n
        return out

    def project_vec(k: int, x: int) -> int:
        return to_crit(k, x ^ c.d(k + 1).apply(h(k, x)))

    small_d = []
    inc_blocks, proj_blocks, hom_blocks = [], [], []
    for k in range(top + 1):
        dk = c.d(k)
        inc_cols = []
        for i in crit[k]:
            v = 1 << i
            if k >= 1:
                v ^= h(k - 1, dk.column(i))
            inc_cols.append(v)
        inc_blocks.append(F2Matrix.from_columns(inc_cols, c.dim(k)))
        proj_blocks.append(F2Matrix.from_columns([project_vec(k, 1 << i) for i in range(c.dim(k))], len(crit[k])))
        hom_blocks.append(F2Matrix.from_columns([h(k, 1 << i) for i in range(c.dim(k))], c.dim(k + 1)))
        if k >= 1:
            small_d.append(F2Matrix.from_columns([project_vec(k - 1, dk.column(i)) for i in crit[k]], len(crit[k - 1])))
    small = ChainComplex([len(cs) for cs in crit], small_d)
    include = ChainMap(small, c, inc_blocks)
    project = ChainMap(c, small, proj_blocks)
    homotopy = ChainHomotopy(c, c, hom_blocks)
    return Reduction(c, small, include, project, homotopy, crit)


@dataclass
class SequenceReduction:
    original: ComplexSequence
    reduced: ComplexSequence
    reductions: list[Reduction]
    forward: TelescopeMorphism
    backward: TelescopeMorphism


def reduce_sequence(seq: ComplexSequence, check: bool = True) -> SequenceReduction:
    """Reduce every stage and connect the two sequences by telescope morphisms.

    Reduced increments are ``p alpha i``.  The forward morphism has
    ``phi = p`` and ``kappa = p alpha h``; the backward one has ``phi = i``
    and ``kappa = h alpha i``.
    """
    reds = [reduce(c) for c in seq.stages]
    incs = []
    kf, kb = [], []
    for n, a in enumerate(seq.increments):
        lo, hi = reds[n], reds[n + 1]
        incs.append(hi.project.compose(a.compose(lo.include)))
        kf.append(hi.project.compose(a.compose(lo.homotopy)))
        kb.append(hi.homotopy.compose(a.compose(lo.include)))
    incs = [ChainMap.from_graded(x, check=check) for x in incs]
    reduced = ComplexSequence([r.small for r in reds], incs, check=False)
    forward = TelescopeMorphism(seq, reduced, [r.project for r in reds], kf, check=check)
    backward = TelescopeMorphism(reduced, seq, [r.include for r in reds], kb, check=check)
    return SequenceReduction(seq, reduced, reds, forward, backward)
