"""Batched kernels against independent oracles, and numba/numpy parity."""

from fractions import Fraction

import numpy as np
import pytest

from ddt7 import kernels, tables
from ddt7.exalg import blades


def _rank_fraction(mat) -> int:
    """Gaussian elimination over Fraction, the reference rank."""
    rows = [[Fraction(int(x)) for x in row] for row in mat]
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    rank = 0
    col = 0
    while rank < nr and col < nc:
        piv = next((i for i in range(rank, nr) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(nr):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def test_bareiss_matches_fraction_elimination():
    rng = np.random.default_rng(30)
    mats = rng.integers(-6, 7, size=(60, 7, 7)).astype(np.int64)
    # force interesting ranks: zero some matrices, make some rank-1
    mats[0] = 0
    mats[1] = np.outer(np.arange(1, 8), np.arange(-3, 4))
    mats[2, :, 3] = 0
    got = kernels.bareiss_ranks_np(mats)
    want = [_rank_fraction(m) for m in mats]
    assert got.tolist() == want


def test_bareiss_rectangular_batches():
    rng = np.random.default_rng(31)
    for shape in ((10, 7, 21), (10, 7, 28), (5, 3, 5)):
        mats = rng.integers(-4, 5, size=shape).astype(np.int64)
        mats[0, 1] = mats[0, 0]  # duplicate row
        got = kernels.bareiss_ranks_np(mats)
        want = [_rank_fraction(m) for m in mats]
        assert got.tolist() == want


def test_wedge_hodge_kernels_match_tables():
    rng = np.random.default_rng(32)
    ii, jj, oo, ss = tables.wedge_arrays(7, 2, 2)
    A = rng.normal(size=(16, 21))
    B = rng.normal(size=(16, 21))
    out = kernels.wedge_fields_np(A, B, ii, jj, oo, ss, len(blades(7, 4)))
    # independent accumulation of the same structure constants
    want = np.zeros_like(out)
    for e in range(len(ii)):
        want[:, oo[e]] += ss[e] * A[:, ii[e]] * B[:, jj[e]]
    assert np.allclose(out, want, rtol=0, atol=1e-15)

    tgt, sgn = tables.hodge_arrays(7, 3)
    C = rng.normal(size=(16, len(blades(7, 3))))
    H = kernels.hodge_fields_np(C, tgt, sgn, len(blades(7, 4)))
    HH = kernels.hodge_fields_np(H, *tables.hodge_arrays(7, 4),
                                 len(blades(7, 3)))
    assert np.allclose(HH, C, rtol=0, atol=0)  # involution in dim 7


@pytest.mark.skipif(not kernels.NUMBA_ACTIVE,
                    reason="numba backend not active in this process")
def test_numba_and_numpy_agree():
    rng = np.random.default_rng(33)
    ii, jj, oo, ss = tables.wedge_arrays(7, 1, 2)
    A = rng.normal(size=(32, 7))
    B = rng.normal(size=(32, 21))
    a = kernels.wedge_fields_nb(A, B, ii, jj, oo, ss, len(blades(7, 3)))
    b = kernels.wedge_fields_np(A, B, ii, jj, oo, ss, len(blades(7, 3)))
    assert np.array_equal(a, b)

    tgt, sgn = tables.hodge_arrays(7, 2)
    C = rng.normal(size=(32, 21))
    assert np.array_equal(kernels.hodge_fields_nb(C, tgt, sgn, 21),
                          kernels.hodge_fields_np(C, tgt, sgn, 21))

    mats = rng.integers(-9, 10, size=(40, 7, 14)).astype(np.int64)
    assert np.array_equal(kernels.bareiss_ranks_nb(mats),
                          kernels.bareiss_ranks_np(mats))


def test_backend_name_consistent():
    assert kernels.backend_name() in ("numba", "numpy")
    assert (kernels.backend_name() == "numba") == kernels.NUMBA_ACTIVE
