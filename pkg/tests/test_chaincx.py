import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqtel.chaincx import (
    ChainComplex,
    ChainComplexError,
    ChainHomotopy,
    ChainMap,
    CohomologyBasis,
    GradedMap,
    HomologyBasis,
    betti,
    betti_numbers,
    cone,
    homology_matrix,
    induced_rank,
    is_acyclic,
    is_homology_iso,
    tensor,
    validate_homotopy,
)
from eqtel.f2linalg import F2Matrix
from eqtel.verify import random_complex, random_graded, random_sequence

import oracles
from helpers import to_numpy

seeds = st.integers(0, 2**32 - 1)


def test_point_betti():
    assert betti(ChainComplex.point(), 0) == 1


def test_sphere_betti_matches_oracle(sphere2):
    assert sphere2.dims == (4, 6, 4)
    assert betti_numbers(sphere2) == [1, 0, 1]
    assert oracles.complex_betti(sphere2) == [1, 0, 1]


def test_direct_sum_adds(sphere2):
    assert betti_numbers(sphere2.direct_sum(sphere2)) == [2, 0, 2]


def test_betti_outside_range_is_zero(sphere2):
    assert betti(sphere2, 7) == 0
    assert betti(sphere2, -1) == 0


def test_construction_rejects_nonzero_square():
    d1 = F2Matrix.from_dense([[1]])
    d2 = F2Matrix.from_dense([[1]])
    with pytest.raises(ChainComplexError):
        ChainComplex([1, 1, 1], [d1, d2])


def test_construction_rejects_bad_shapes():
    with pytest.raises(ChainComplexError):
        ChainComplex([1, 2], [F2Matrix.zeros(2, 1)])


def test_chain_map_rejects_noncommuting_square(circle_cx):
    # killing vertices while keeping edges breaks d f = f d
    with pytest.raises(ChainComplexError):
        ChainMap(circle_cx, circle_cx, [F2Matrix.zeros(3, 3), F2Matrix.identity(3)])
    ChainMap(circle_cx, circle_cx, [F2Matrix.identity(3), F2Matrix.identity(3)])


def test_validate_homotopy_examples(sphere2):
    f = ChainMap.identity(sphere2)
    zero_h = GradedMap.zero(sphere2, sphere2, 1)
    assert validate_homotopy(zero_h, f, f)
    rnd = random.Random(1)
    h = random_graded(rnd, sphere2, sphere2, 1)
    while h.commutator_with_d().is_zero():
        h = random_graded(rnd, sphere2, sphere2, 1)
    g = ChainMap.from_graded(f + h.commutator_with_d())
    assert not validate_homotopy(zero_h, f, g)
    assert validate_homotopy(h, f, g)


def test_validate_homotopy_shape_mismatch(sphere2, circle_cx):
    f = ChainMap.identity(sphere2)
    h = GradedMap.zero(circle_cx, circle_cx, 1)
    with pytest.raises(ChainComplexError):
        validate_homotopy(h, f, f)


@given(seeds)
def test_validate_homotopy_random(seed):
    rnd = random.Random(seed)
    c = random_complex(rnd, 4, 5)
    d = random_complex(rnd, 4, 5)
    h = ChainHomotopy(c, d, random_graded(rnd, c, d, 1).blocks)
    g = ChainMap.zero(c, d)
    f = ChainMap.from_graded(g + h.commutator_with_d())
    assert validate_homotopy(h, f, g)


def test_cone_of_identity_is_acyclic(sphere2):
    assert is_acyclic(cone(ChainMap.identity(sphere2)))


def test_cone_of_zero_map(sphere2, circle_cx):
    c = cone(ChainMap.zero(circle_cx, sphere2))
    b = betti_numbers(c)
    want = [betti(sphere2, k) + betti(circle_cx, k - 1) for k in range(len(b))]
    assert b == want


def test_cone_of_point_into_sphere(sphere2):
    pt = ChainComplex.point()
    inc = ChainMap(pt, sphere2, [F2Matrix.from_columns([1], 4)])
    c = cone(inc)
    assert betti_numbers(c) == [0, 0, 1]
    assert oracles.complex_betti(c) == [0, 0, 1]


def test_tensor_unit_and_zero(sphere2):
    assert betti_numbers(tensor(ChainComplex.point(), sphere2)) == [1, 0, 1]
    assert tensor(ChainComplex.zero(), sphere2).size() == 0


def test_torus_by_kunneth(circle_cx):
    t = tensor(circle_cx, circle_cx)
    assert betti_numbers(t) == [1, 2, 1]
    assert oracles.complex_betti(t) == [1, 2, 1]


@given(seeds)
def test_kunneth_on_random_complexes(seed):
    rnd = random.Random(seed)
    c = random_complex(rnd, 3, 4)
    d = random_complex(rnd, 3, 4)
    t = tensor(c, d)
    got = oracles.complex_betti(t) if t.size() else [0]
    bc, bd = betti_numbers(c), betti_numbers(d)
    for n, b in enumerate(got):
        assert b == sum(bc[p] * bd[n - p] for p in range(n + 1) if p < len(bc) and n - p < len(bd))


@given(seeds)
def test_cone_acyclic_iff_homology_iso(seed):
    rnd = random.Random(seed)
    seq = random_sequence(rnd, max_stages=2, max_degree=4, max_dim=5)
    f = seq.increments[0]
    top = max(f.source.top_degree, f.target.top_degree) + 1
    iso = all(is_homology_iso(f, k) for k in range(top + 1))
    assert is_acyclic(cone(f)) == iso


@given(seeds)
def test_betti_agrees_with_dense_oracle(seed):
    c = random_complex(random.Random(seed))
    assert betti_numbers(c) == oracles.complex_betti(c)


@given(seeds)
def test_homology_and_cohomology_bases_have_betti_size(seed):
    c = random_complex(random.Random(seed), 4, 5)
    for k in range(c.top_degree + 1):
        hb = HomologyBasis(c, k)
        cb = CohomologyBasis(c, k)
        assert len(hb) == len(cb) == betti(c, k)
        for i, z in enumerate(hb.representatives):
            assert c.d(k).apply(z) == 0
            assert hb.coordinates(z) == 1 << i


@given(seeds)
def test_homology_matrix_rank_matches_induced_rank(seed):
    rnd = random.Random(seed)
    seq = random_sequence(rnd, max_stages=2, max_degree=4, max_dim=5)
    f = seq.increments[0]
    for k in range(f.source.top_degree + 1):
        m = homology_matrix(f, k)
        assert m.rank() == induced_rank(f, k)
        want = oracles.induced_rank(to_numpy(f[k]), to_numpy(f.source.d(k)), to_numpy(f.target.d(k + 1)))
        assert m.rank() == want
