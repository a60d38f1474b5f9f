"""Random generators and the randomized property suites behind ``eqtel verify``.

Every generator takes a :class:`random.Random`, so a seed fixes all data.
Random chain maps are built as ``base + (d h + h d)`` where ``base`` is a
summand inclusion or projection, which keeps them genuine chain maps while
touching every block.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .chaincx import (
    ChainComplex,
    ChainComplexError,
    ChainMap,
    GradedMap,
    HomologyBasis,
    betti_numbers,
    cone,
    tensor,
)
from .f2linalg import F2Matrix, kernel_ints
from .morsered import greedy_matching, reduce
from .simplicial import (
    Chain,
    Cochain,
    SimplicialComplex,
    SimplicialMap,
    barycentric,
    boundary,
    cap,
    coboundary,
    cup,
    induced_chain_map,
)
from .telescope import (
    ComplexSequence,
    TelescopeHomotopyDatum,
    TelescopeMorphism,
    retraction,
    tel_build,
    tel_compose,
    tel_homotopy,
    tel_map,
    tel_product,
)

# -- generators ------------------------------------------------------------------


def random_matrix(rng: random.Random, nrows: int, ncols: int, density: float = 0.5) -> F2Matrix:
    rows = []
    for _ in range(nrows):
        r = 0
        for j in range(ncols):
            if rng.random() < density:
                r |= 1 << j
        rows.append(r)
    return F2Matrix(nrows, ncols, rows)


def random_complex(rng: random.Random, max_degree: int = 5, max_dim: int = 6) -> ChainComplex:
    """Random complex; each new differential has columns in the kernel of the previous one."""
    top = rng.randint(0, max_degree)
    dims = [rng.randint(0, max_dim) for _ in range(top + 1)]
    mats = []
    for k in range(1, top + 1):
        if k == 1:
            kernel = [1 << i for i in range(dims[0])]
        else:
            kernel = kernel_ints(mats[-1].columns)
        cols = []
        for _ in range(dims[k]):
            v = 0
            for z in kernel:
                if rng.random() < 0.5:
                    v ^= z
            cols.append(v)
        mats.append(F2Matrix.from_columns(cols, dims[k - 1]))
    return ChainComplex(dims, mats)


def random_graded(rng: random.Random, source: ChainComplex, target: ChainComplex, degree: int) -> GradedMap:
    blocks = [random_matrix(rng, target.dim(k + degree), source.dim(k)) for k in range(source.top_degree + 1)]
    return GradedMap(source, target, blocks, degree)


def null_homotopic(rng: random.Random, source: ChainComplex, target: ChainComplex) -> GradedMap:
    return random_graded(rng, source, target, 1).commutator_with_d()


def _summand_block(a: ChainComplex, src: ChainComplex, dst: ChainComplex) -> GradedMap:
    """Identity on the leading summand ``a`` of both direct sums, zero elsewhere."""
    blocks = []
    for k in range(src.top_degree + 1):
        n = a.dim(k)
        blocks.append(
            F2Matrix.block([n, dst.dim(k) - n], [n, src.dim(k) - n], {(0, 0): F2Matrix.identity(n)})
        )
    return GradedMap(src, dst, blocks)


def random_sequence(
    rng: random.Random, max_stages: int = 4, max_degree: int = 5, max_dim: int = 6
) -> ComplexSequence:
    """Stages share a random summand; increments are its identity plus null-homotopic noise."""
    K = rng.randint(1, max_stages - 1)
    budget = max(1, max_dim // 2)
    core = random_complex(rng, max_degree, budget)
    stages = [core.direct_sum(random_complex(rng, max_degree, max_dim - budget)) for _ in range(K + 1)]
    incs = []
    for n in range(K):
        src, dst = stages[n], stages[n + 1]
        incs.append(ChainMap.from_graded(_summand_block(core, src, dst) + null_homotopic(rng, src, dst)))
    return ComplexSequence(stages, incs)


def perturbed_target(rng: random.Random, seq: ComplexSequence):
    """A second sequence with the same stages and a morphism into it.

    ``beta = alpha + [d, g]`` and ``phi = 1 + [d, h]``; the correction is
    ``kappa = h alpha + g + alpha h + g [d, h]``.
    """
    gs = [random_graded(rng, seq.stages[n], seq.stages[n + 1], 1) for n in range(seq.K)]
    hs = [random_graded(rng, c, c, 1) for c in seq.stages]
    betas = [ChainMap.from_graded(a + g.commutator_with_d()) for a, g in zip(seq.increments, gs)]
    target = ComplexSequence(seq.stages, betas)
    phis = [ChainMap.from_graded(ChainMap.identity(c) + h.commutator_with_d()) for c, h in zip(seq.stages, hs)]
    kappas = []
    for n, a in enumerate(seq.increments):
        k = hs[n + 1].compose(a) + gs[n] + a.compose(hs[n]) + gs[n].compose(hs[n].commutator_with_d())
        kappas.append(k)
    return target, TelescopeMorphism(seq, target, phis, kappas)


def perturbed_morphism(rng: random.Random, m: TelescopeMorphism):
    """Another morphism homotopic to ``m`` and the homotopy datum between them."""
    src, dst = m.source, m.target
    H = [random_graded(rng, src.stages[n], dst.stages[n], 1) for n in range(len(src))]
    Kh = [random_graded(rng, src.stages[n], dst.stages[n + 1], 2) for n in range(src.K)]
    phis = [ChainMap.from_graded(p + h.commutator_with_d()) for p, h in zip(m.phi, H)]
    kappas = []
    for n, a in enumerate(src.increments):
        k = m.kappa[n] + H[n + 1].compose(a) + dst.increments[n].compose(H[n]) + Kh[n].commutator_with_d()
        kappas.append(k)
    other = TelescopeMorphism(src, dst, phis, kappas)
    return other, TelescopeHomotopyDatum(m, other, H, Kh)


def random_simplicial(rng: random.Random, n_vertices: int = 6, n_facets: int = 5, max_size: int = 4) -> SimplicialComplex:
    facets = []
    for _ in range(rng.randint(1, n_facets)):
        size = rng.randint(1, min(max_size, n_vertices))
        facets.append(rng.sample(range(n_vertices), size))
    return SimplicialComplex.from_facets(list(range(n_vertices)), facets)


def random_simplicial_map(rng: random.Random, source: SimplicialComplex, target: SimplicialComplex) -> SimplicialMap:
    """Send vertices to vertices of one facet per source component via a random target simplex."""
    top_simplices = target.cells[-1]
    image = rng.choice(top_simplices)
    return SimplicialMap(source, target, [rng.choice(image) for _ in source.vertices])


# -- suites ------------------------------------------------------------------------


@dataclass
class Failure:
    suite: str
    identity: str
    case: int
    detail: str

    def to_dict(self) -> dict:
        return {"suite": self.suite, "identity": self.identity, "case": self.case, "detail": self.detail}


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "total": self.total,
            "failures": [f.to_dict() for f in self.failures],
        }


def _describe(seq: ComplexSequence) -> str:
    return "stages " + "; ".join(str(list(c.dims)) for c in seq.stages)


def _corrupt(seq: ComplexSequence, rng: random.Random) -> ComplexSequence:
    """Flip one entry of one increment (fault injection); skips empty blocks."""
    incs = list(seq.increments)
    spots = [(n, k) for n, a in enumerate(incs) for k, b in enumerate(a.blocks) if b.nrows and b.ncols]
    if not spots:
        return seq
    n, k = rng.choice(spots)
    a = incs[n]
    b = a.blocks[k]
    i, j = rng.randrange(b.nrows), rng.randrange(b.ncols)
    rows = list(b.rows)
    rows[i] ^= 1 << j
    blocks = list(a.blocks)
    blocks[k] = F2Matrix(b.nrows, b.ncols, rows)
    incs[n] = GradedMap(a.source, a.target, blocks)
    return ComplexSequence(seq.stages, incs, check=False)


def telescope_identities(seq: ComplexSequence, rng: random.Random) -> str | None:
    """Run every telescope identity on one sequence; return the first failing name."""
    try:
        tel = tel_build(seq)
    except ChainComplexError:
        return "telescope differential squares to zero"
    try:
        target, m = perturbed_target(rng, seq)
        tel_t = tel_build(target)
        f = tel_map(m, tel, tel_t)
    except ChainComplexError:
        return "Tel(phi, kappa) is a chain map"
    try:
        third, m2 = perturbed_target(rng, target)
        comp = tel_compose(m2, m)
        tel_3 = tel_build(third)
        lhs = tel_map(comp, tel, tel_3)
        rhs = tel_map(m2, tel_t, tel_3).compose(f)
        if not lhs.same_blocks(rhs):
            return "Tel(composite) = Tel o Tel"
    except ChainComplexError:
        return "Tel(composite) = Tel o Tel"
    try:
        other, datum = perturbed_morphism(rng, m)
        h = tel_homotopy(datum, tel, tel_t)
        if not (tel_map(m, tel, tel_t) + tel_map(other, tel, tel_t)).same_blocks(h.commutator_with_d()):
            return "homotopy datum: Tel(phi0) + Tel(phi1) = delta H + H delta"
    except ChainComplexError:
        return "homotopy datum: Tel(phi0) + Tel(phi1) = delta H + H delta"
    try:
        tel_product(seq, target)
    except ChainComplexError:
        return "product map Phi is a chain map"
    return None


def retraction_identity(seq: ComplexSequence) -> str | None:
    tel = tel_build(seq)
    retraction(tel)
    lhs = betti_numbers(tel.underlying)
    rhs = betti_numbers(seq.stages[-1])
    rhs += [0] * (len(lhs) - len(rhs))
    if lhs != rhs:
        return "betti(Tel_K) = betti(C_K)"
    return None


def _minimize(seq: ComplexSequence, check: Callable[[ComplexSequence], str | None]) -> ComplexSequence:
    """Drop trailing stages while the failure persists."""
    best = seq
    for K in range(seq.K - 1, 0, -1):
        cand = seq.truncated(K)
        if check(cand) is None:
            break
        best = cand
    return best


def suite_telescope(seed: int, count: int, fault: str | None = None) -> SuiteResult:
    res = SuiteResult("telescope")
    rng = random.Random(seed)
    for case in range(count):
        seq = random_sequence(rng)
        if fault == "increment":
            seq = _corrupt(seq, rng)
        case_seed = rng.randrange(1 << 30)
        bad = telescope_identities(seq, random.Random(case_seed))
        if bad is None:
            bad = retraction_identity(seq) if fault != "increment" else None
        res.total += 1
        if bad is None:
            res.passed += 1
        else:
            small = _minimize(seq, lambda s: telescope_identities(s, random.Random(case_seed)))
            res.failures.append(Failure(res.name, bad, case, _describe(small)))
    return res


def suite_chaincx(seed: int, count: int) -> SuiteResult:
    res = SuiteResult("chaincx")
    rng = random.Random(seed + 1)
    for case in range(count):
        c = random_complex(rng, 4, 5)
        d = random_complex(rng, 3, 4)
        bad = None
        bc, bd = betti_numbers(c), betti_numbers(d)
        if any(len(HomologyBasis(c, k)) != bc[k] for k in range(c.top_degree + 1)):
            bad = "homology basis size = betti"
        t = tensor(c, d)
        kunneth = [
            sum(bc[p] * bd[n - p] for p in range(n + 1) if p < len(bc) and n - p < len(bd))
            for n in range(t.top_degree + 1)
        ]
        if bad is None and betti_numbers(t) != kunneth:
            bad = "Kunneth formula for tensor products"
        if bad is None:
            f = ChainMap.from_graded(null_homotopic(rng, c, c) + ChainMap.identity(c))
            co = cone(f)
            if any(betti_numbers(co)):
                bad = "cone of a homotopy equivalence is acyclic"
        res.total += 1
        if bad is None:
            res.passed += 1
        else:
            res.failures.append(Failure(res.name, bad, case, f"dims {list(c.dims)} and {list(d.dims)}"))
    return res


def suite_simplicial(seed: int, count: int) -> SuiteResult:
    res = SuiteResult("simplicial")
    rng = random.Random(seed + 2)
    for case in range(count):
        k = random_simplicial(rng)
        bad = None
        sd, _ = barycentric(k)
        if betti_numbers(sd.chain_complex) != betti_numbers(k.chain_complex):
            bad = "barycentric subdivision preserves betti numbers"
        if bad is None:
            p = rng.randint(0, k.dimension)
            q = rng.randint(0, k.dimension - p)
            a = Cochain.from_bits(k, p, rng.getrandbits(k.n_cells(p)))
            b = Cochain.from_bits(k, q, rng.getrandbits(k.n_cells(q)))
            if p + q + 1 <= k.dimension:
                lhs = coboundary(cup(a, b))
                rhs = cup(coboundary(a), b) + cup(a, coboundary(b))
                if lhs != rhs:
                    bad = "Leibniz rule for cup products"
        if bad is None:
            n = rng.randint(0, k.dimension)
            p = rng.randint(0, n)
            c = Chain.from_bits(k, n, rng.getrandbits(k.n_cells(n)))
            a = Cochain.from_bits(k, p, rng.getrandbits(k.n_cells(p)))
            if n >= 1 and p < n:
                lhs = boundary(cap(c, a))
                rhs = cap(boundary(c), a) + cap(c, coboundary(a))
                if lhs != rhs:
                    bad = "boundary rule for cap products"
        if bad is None:
            l = random_simplicial(rng, 5, 3, 3)
            m = random_simplicial(rng, 4, 2, 3)
            f = random_simplicial_map(rng, k, l)
            g = random_simplicial_map(rng, l, m)
            lhs = induced_chain_map(g.compose(f))
            rhs = induced_chain_map(g).compose(induced_chain_map(f))
            if not lhs.same_blocks(rhs):
                bad = "functoriality of induced chain maps"
        res.total += 1
        if bad is None:
            res.passed += 1
        else:
            res.failures.append(Failure(res.name, bad, case, f"f-vector {list(k.f_vector())}"))
    return res


def suite_morsered(seed: int, count: int) -> SuiteResult:
    res = SuiteResult("morsered")
    rng = random.Random(seed + 3)
    for case in range(count):
        c = random_complex(rng, 5, 6) if rng.random() < 0.5 else random_simplicial(rng).chain_complex
        bad = None
        try:
            r = reduce(c, greedy_matching(c))
        except ChainComplexError as exc:
            bad = f"reduction construction ({exc})"
        if bad is None:
            if not r.project.compose(r.include).same_blocks(ChainMap.identity(r.small)):
                bad = "project o include = id"
            elif not (r.include.compose(r.project) + ChainMap.identity(c)).same_blocks(r.homotopy.commutator_with_d()):
                bad = "include o project + id = d h + h d"
            elif betti_numbers(r.small) != betti_numbers(c):
                bad = "reduction preserves betti numbers"
        res.total += 1
        if bad is None:
            res.passed += 1
        else:
            res.failures.append(Failure(res.name, bad, case, f"dims {list(c.dims)}"))
    return res


SUITES = ("telescope", "chaincx", "simplicial", "morsered")


def run_all(seed: int, count: int, fault: str | None = None) -> list[SuiteResult]:
    return [
        suite_telescope(seed, count, fault),
        suite_chaincx(seed, count),
        suite_simplicial(seed, count),
        suite_morsered(seed, count),
    ]
