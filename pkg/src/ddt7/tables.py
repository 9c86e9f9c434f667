"""Integer structure tables as numpy arrays, for the batched field kernels.

Everything here is derived from the exact tables in ``exalg`` and from the
standard associative 3-form, so the batched numeric path and the symbolic
path share one source of truth.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import g2
from .exalg import KForm, blades, hodge_table, wedge, wedge_table
from .scalars import FLOAT


@lru_cache(maxsize=None)
def wedge_arrays(n: int, p: int, q: int):
    """(i, j, out, sign) columns of the wedge structure table, int64."""
    t = np.asarray(wedge_table(n, p, q), dtype=np.int64)
    if t.size == 0:
        t = t.reshape(0, 4)
    return (np.ascontiguousarray(t[:, 0]), np.ascontiguousarray(t[:, 1]),
            np.ascontiguousarray(t[:, 2]), np.ascontiguousarray(t[:, 3]))


@lru_cache(maxsize=None)
def hodge_arrays(n: int, k: int):
    """(target, sign) per source blade, int64."""
    t = np.asarray(hodge_table(n, k), dtype=np.int64)
    return np.ascontiguousarray(t[:, 0]), np.ascontiguousarray(t[:, 1])


@lru_cache(maxsize=None)
def phi_coeffs() -> np.ndarray:
    """Coefficients of the associative 3-form in blade order, float64."""
    return np.array(g2.phi_for(FLOAT).coeffs, dtype=np.float64)


@lru_cache(maxsize=None)
def star_phi_coeffs() -> np.ndarray:
    return np.array(g2.star_phi_for(FLOAT).coeffs, dtype=np.float64)


@lru_cache(maxsize=None)
def wedge_const_matrix(n: int, p: int, q: int, const_coeffs: tuple) -> np.ndarray:
    """Matrix M with (f ^ c)_out = sum_i M[out, i] f_i for the fixed q-form c.

    Used to turn "wedge with a constant form" (phi, *phi, flux background)
    into one matmul over the whole grid.
    """
    ii, jj, oo, ss = wedge_arrays(n, p, q)
    dim_p = len(blades(n, p))
    dim_o = len(blades(n, p + q))
    c = np.asarray(const_coeffs, dtype=np.float64)
    M = np.zeros((dim_o, dim_p))
    for e in range(len(ii)):
        M[oo[e], ii[e]] += ss[e] * c[jj[e]]
    return M


@lru_cache(maxsize=None)
def mode_kernel_tensors():
    """Integer tensors (T, U) for the per-mode linearization on the 7-torus.

    For an integer mode k, the Fourier symbol of b |-> (dx_k ^ b) ^ *phi on
    1-form coefficients is A_k = sum_i k_i T[i]  (7x7), and the symbol of
    g |-> dx_k ^ g on 5-form coefficients is B_k = sum_i k_i U[i]  (7x21).
    Rows index 6-form blades.
    """
    one = g2.standard()
    T = np.zeros((7, 7, 7), dtype=np.int64)
    U = np.zeros((7, 7, 21), dtype=np.int64)
    ring = one.star_phi.ring
    for i in range(7):
        ei = KForm.from_blades(7, 1, {(i + 1,): 1}, ring)
        for b in range(7):
            eb = KForm.from_blades(7, 1, {(b + 1,): 1}, ring)
            out = wedge(wedge(ei, eb), one.star_phi)
            T[i, :, b] = [int(c) for c in out.coeffs]
        for gpos, gblade in enumerate(blades(7, 5)):
            eg = KForm.from_blades(7, 5, {gblade: 1}, ring)
            out = wedge(ei, eg)
            U[i, :, gpos] = [int(c) for c in out.coeffs]
    return T, U
