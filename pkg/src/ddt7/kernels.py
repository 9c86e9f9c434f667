"""Batched grid kernels with a numba fast path and a pure-numpy fallback.

Set ``DDT7_NO_NUMBA=1`` to force the fallback (useful on platforms where
numba is unavailable or for A/B validation; the test suite exercises both
paths directly).  The active path is chosen once at import.

Kernel inputs are plain arrays: fields are (npts, ncoeffs) float64, C
order; structure tables come from ``tables``.
"""
from __future__ import annotations

import os

import numpy as np

NUMBA_REQUESTED = os.environ.get("DDT7_NO_NUMBA", "").strip() not in ("1", "true", "yes")
NUMBA_ACTIVE = False

if NUMBA_REQUESTED:
    try:
        from numba import njit as _njit

        NUMBA_ACTIVE = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ACTIVE = False


# --- pure numpy implementations --------------------------------------------


def wedge_fields_np(A, B, ii, jj, oo, ss, dim_out):
    """Pointwise wedge of coefficient batches via the structure table."""
    npts = A.shape[0]
    out = np.zeros((npts, dim_out))
    for e in range(len(ii)):
        if ss[e] == 1:
            out[:, oo[e]] += A[:, ii[e]] * B[:, jj[e]]
        else:
            out[:, oo[e]] -= A[:, ii[e]] * B[:, jj[e]]
    return out


def hodge_fields_np(A, tgt, sgn, dim_out):
    out = np.empty((A.shape[0], dim_out))
    out[:, tgt] = A * sgn
    return out


def bareiss_ranks_np(mats):
    """Exact ranks of a batch of int64 matrices, fraction-free elimination.

    Vectorized over the batch with a per-matrix row pointer, since matrices
    may skip pivot columns independently.  Entries must stay below 2^63
    throughout; the caller guarantees the Hadamard bound.  The update is
    computed for every row and masked afterwards, so wrapped products can
    appear in discarded lanes; only the masked-in lanes are exact.
    """
    M = mats.astype(np.int64, copy=True)
    nb, nr, nc = M.shape
    r = np.zeros(nb, dtype=np.int64)
    prev = np.ones(nb, dtype=np.int64)
    batch = np.arange(nb)
    rows = np.arange(nr)
    for col in range(nc):
        colvals = M[:, :, col]
        cand = (colvals != 0) & (rows[None, :] >= r[:, None])
        piv = np.argmax(cand, axis=1)
        act = cand[batch, piv]
        if not act.any():
            continue
        bi = batch[act]
        need = piv[act] != r[act]
        if need.any():
            b2 = bi[need]
            p2 = piv[act][need]
            r2 = r[act][need]
            tmp = M[b2, r2].copy()
            M[b2, r2] = M[b2, p2]
            M[b2, p2] = tmp
        rsafe = np.minimum(r, nr - 1)
        pivot = M[batch, rsafe, col]
        pivrow = M[batch, rsafe, :]
        colvals = M[:, :, col]
        upd = M * pivot[:, None, None] - colvals[:, :, None] * pivrow[:, None, :]
        upd //= prev[:, None, None]
        elim = act[:, None] & (rows[None, :] > r[:, None])
        M = np.where(elim[:, :, None], upd, M)
        prev = np.where(act, pivot, prev)
        r = r + act
    return r


# --- numba implementations ---------------------------------------------------

if NUMBA_ACTIVE:

    @_njit(cache=True)
    def _wedge_fields_nb(A, B, ii, jj, oo, ss, out):
        npts = A.shape[0]
        ne = ii.shape[0]
        for p in range(npts):
            for e in range(ne):
                out[p, oo[e]] += ss[e] * A[p, ii[e]] * B[p, jj[e]]

    def wedge_fields_nb(A, B, ii, jj, oo, ss, dim_out):
        out = np.zeros((A.shape[0], dim_out))
        _wedge_fields_nb(A, B, ii, jj, oo, ss, out)
        return out

    @_njit(cache=True)
    def _hodge_fields_nb(A, tgt, sgn, out):
        npts, nc = A.shape
        for p in range(npts):
            for c in range(nc):
                out[p, tgt[c]] = sgn[c] * A[p, c]

    def hodge_fields_nb(A, tgt, sgn, dim_out):
        out = np.empty((A.shape[0], dim_out))
        _hodge_fields_nb(A, tgt, sgn, out)
        return out

    @_njit(cache=True)
    def _bareiss_rank_one(M):
        nr, nc = M.shape
        rank = 0
        prev = np.int64(1)
        row = 0
        for col in range(nc):
            if row >= nr:
                break
            piv = -1
            for r in range(row, nr):
                if M[r, col] != 0:
                    piv = r
                    break
            if piv < 0:
                continue
            if piv != row:
                for c in range(nc):
                    t = M[row, c]
                    M[row, c] = M[piv, c]
                    M[piv, c] = t
            pivot = M[row, col]
            for r in range(row + 1, nr):
                f = M[r, col]
                for c in range(nc):
                    M[r, c] = (M[r, c] * pivot - f * M[row, c]) // prev
            prev = pivot
            rank += 1
            row += 1
        return rank

    @_njit(cache=True)
    def bareiss_ranks_nb(mats):
        nb = mats.shape[0]
        ranks = np.zeros(nb, dtype=np.int64)
        for b in range(nb):
            ranks[b] = _bareiss_rank_one(mats[b].copy())
        return ranks


if NUMBA_ACTIVE:
    wedge_fields = wedge_fields_nb
    hodge_fields = hodge_fields_nb
    bareiss_ranks = bareiss_ranks_nb
else:
    wedge_fields = wedge_fields_np
    hodge_fields = hodge_fields_np
    bareiss_ranks = bareiss_ranks_np


def backend_name() -> str:
    return "numba" if NUMBA_ACTIVE else "numpy"
