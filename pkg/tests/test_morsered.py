import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqtel.borel import borel_sequence
from eqtel.chaincx import ChainComplex, ChainMap, betti_numbers, homology_matrix, validate_homotopy
from eqtel.f2linalg import F2Matrix
from eqtel.groups import cyclic, klein
from eqtel.morsered import MatchingError, MorseMatching, greedy_matching, reduce, reduce_sequence
from eqtel.simplicial import GroupAction, SimplicialComplex
from eqtel.telescope import tel_build, tel_map
from eqtel.verify import random_complex, random_sequence

import oracles
from helpers import ANTIPODAL, OCTAHEDRON_FACETS, SPHERE2_FACETS, complex_from_facets

seeds = st.integers(0, 2**32 - 1)


def check_reduction(c: ChainComplex) -> None:
    r = reduce(c)
    assert r.project.compose(r.include).blocks == ChainMap.identity(r.small).blocks
    assert validate_homotopy(r.homotopy, r.include.compose(r.project), ChainMap.identity(c))
    assert betti_numbers(r.small) == betti_numbers(c)


def test_zero_differential_has_empty_matching():
    c = ChainComplex([2, 3], [F2Matrix.zeros(2, 3)])
    m = greedy_matching(c)
    assert m.pairs == ()
    r = reduce(c)
    assert r.small.dims == c.dims
    assert r.include.blocks == ChainMap.identity(c).blocks


def test_single_edge_collapses_to_a_vertex():
    c = complex_from_facets([[0, 1]])
    m = greedy_matching(c)
    assert len(m.pairs) == 1
    assert m.critical(0) == [1]
    assert reduce(c).small.dims == (1, 0)


def test_sphere_boundary_leaves_two_critical_cells():
    r = reduce(complex_from_facets(SPHERE2_FACETS))
    assert r.small.size() == 2
    assert betti_numbers(r.small) == [1, 0, 1]


def test_simplex_reduces_to_a_point():
    r = reduce(complex_from_facets([[0, 1, 2, 3]]))
    assert r.small.size() == 1


def test_explicit_empty_matching_is_identity(sphere2):
    r = reduce(sphere2, MorseMatching(sphere2, ()))
    assert r.small == sphere2
    assert r.project.blocks == ChainMap.identity(sphere2).blocks
    assert all(h.is_zero() for h in r.homotopy.blocks)


def test_validate_rejects_bad_pairs(circle_cx):
    with pytest.raises(MatchingError):
        MorseMatching(circle_cx, ((0, 1, 1),)).validate()  # edge 1 is {0,2}
    with pytest.raises(MatchingError):
        MorseMatching(circle_cx, ((0, 0, 0), (0, 0, 2))).validate()
    with pytest.raises(MatchingError):
        MorseMatching(circle_cx, ((0, 5, 0),)).validate()


def test_validate_rejects_cycles(circle_cx):
    # edges 01, 02, 12: pairing 0-01, 1-12, 2-02 closes the loop
    m = MorseMatching(circle_cx, ((0, 0, 0), (0, 1, 2), (0, 2, 1)))
    with pytest.raises(MatchingError):
        m.validate()
    greedy_matching(circle_cx).validate()


def test_matching_of_another_complex_is_rejected(sphere2, circle_cx):
    with pytest.raises(MatchingError):
        reduce(sphere2, greedy_matching(circle_cx))


@given(seeds)
def test_reduction_identities_on_random_complexes(seed):
    c = random_complex(random.Random(seed))
    greedy_matching(c).validate()
    check_reduction(c)


@given(seeds)
def test_reduced_size_bounds(seed):
    c = random_complex(random.Random(seed))
    r = reduce(c)
    assert sum(oracles.complex_betti(c)) <= r.small.size() <= c.size()
    again = reduce(r.small)
    assert again.small.size() <= r.small.size()
    assert betti_numbers(again.small) == betti_numbers(c)


def test_reduction_on_a_hundred_complexes():
    rng = random.Random(7)
    for _ in range(100):
        check_reduction(random_complex(rng))


def test_borel_stages_shrink():
    pt = SimplicialComplex.point()
    x = SimplicialComplex.from_facets(list(range(6)), OCTAHEDRON_FACETS)
    cases = [
        (pt, GroupAction.trivial(cyclic(2), pt)),
        (pt, GroupAction.trivial(klein(), pt)),
        (x, GroupAction(cyclic(2), x, ANTIPODAL)),
    ]
    for space, act in cases:
        seq = borel_sequence(space, act, 3, max_dim=4).chain_seq
        red = reduce_sequence(seq)
        for big, r in zip(seq.stages, red.reductions):
            if any(not big.d(k).is_zero() for k in range(1, big.top_degree + 1)):
                assert r.small.size() < big.size()
            assert betti_numbers(r.small) == betti_numbers(big)


@given(seeds)
def test_sequence_reduction_morphisms(seed):
    seq = random_sequence(random.Random(seed), max_stages=3, max_degree=4, max_dim=5)
    red = reduce_sequence(seq)
    fwd = tel_map(red.forward)
    back = tel_map(red.backward)
    assert fwd.failing_degree() is None
    assert back.failing_degree() is None
    t_big, t_small = tel_build(seq), tel_build(red.reduced)
    assert betti_numbers(t_small.underlying) == betti_numbers(t_big.underlying)
    # p i = 1 stagewise, so the round trip is the identity on homology
    round_trip = fwd.compose(back)
    for k in range(t_small.underlying.top_degree + 1):
        m = homology_matrix(round_trip, k)
        assert m == F2Matrix.identity(m.nrows)
