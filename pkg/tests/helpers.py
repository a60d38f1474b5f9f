"""Strategies and small builders shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from eqtel.chaincx import ChainComplex
from eqtel.f2linalg import F2Matrix

import oracles
@st.composite
def matrices(draw, max_rows=9, max_cols=9):
    nrows = draw(st.integers(0, max_rows))
    ncols = draw(st.integers(0, max_cols))
    rows = draw(st.lists(st.integers(0, (1 << ncols) - 1), min_size=nrows, max_size=nrows))
    return F2Matrix(nrows, ncols, rows)


def complex_from_facets(facets) -> ChainComplex:
    """Chain complex of a face closure, built from the oracle's enumeration."""
    cells = oracles.closure(facets)
    bds = oracles.simplicial_boundaries(cells)
    mats = [F2Matrix.from_dense(bds[k].tolist(), len(cells[k])) for k in range(1, len(cells))]
    return ChainComplex([len(c) for c in cells], mats)


SPHERE2_FACETS = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
CIRCLE_FACETS = [[0, 1], [1, 2], [0, 2]]
OCTAHEDRON_FACETS = [[a, b, c] for a in (0, 1) for b in (2, 3) for c in (4, 5)]
ANTIPODAL = [[0, 1, 2, 3, 4, 5], [1, 0, 3, 2, 5, 4]]


def to_numpy(m: F2Matrix) -> np.ndarray:
    return oracles.dense(m) if m.nrows else np.zeros((0, m.ncols), np.uint8)
