"""Hot numeric kernels: fixed-step RK4 propagation of dψ/dt = M ψ.

The numba path JIT-compiles a CSR matvec plus the full step loop; the
pure-numpy/scipy fallback runs the same arithmetic through scipy's sparse
matvec.  Selection: FWM_NO_NUMBA=1 (or a missing numba install) picks the
fallback.  Both paths are compared in benchmarks/bench_kernels.py and must
agree to roundoff (tests/test_kernels.py).
"""
from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

_FORCE_NUMPY = os.environ.get("FWM_NO_NUMBA", "").strip() not in ("", "0")

try:
    if _FORCE_NUMPY:
        raise ImportError("numba disabled by FWM_NO_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA


def rk4_propagate_numpy(matrix: sp.csr_matrix, psi: np.ndarray,
                        h: float, nsteps: int) -> np.ndarray:
    """Classical RK4 with scipy sparse matvec (fallback path)."""
    psi = psi.astype(np.complex128, copy=True)
    for _ in range(nsteps):
        k1 = matrix @ psi
        k2 = matrix @ (psi + (0.5 * h) * k1)
        k3 = matrix @ (psi + (0.5 * h) * k2)
        k4 = matrix @ (psi + h * k3)
        psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return psi


if HAVE_NUMBA:

    @njit(cache=True)
    def _csr_matvec(data, indices, indptr, x, out):
        n = indptr.size - 1
        for i in range(n):
            acc = 0.0 + 0.0j
            for k in range(indptr[i], indptr[i + 1]):
                acc += data[k] * x[indices[k]]
            out[i] = acc

    @njit(cache=True)
    def _rk4_loop(data, indices, indptr, psi, h, nsteps):
        n = psi.size
        k1 = np.empty(n, np.complex128)
        k2 = np.empty(n, np.complex128)
        k3 = np.empty(n, np.complex128)
        k4 = np.empty(n, np.complex128)
        tmp = np.empty(n, np.complex128)
        for _ in range(nsteps):
            _csr_matvec(data, indices, indptr, psi, k1)
            for i in range(n):
                tmp[i] = psi[i] + 0.5 * h * k1[i]
            _csr_matvec(data, indices, indptr, tmp, k2)
            for i in range(n):
                tmp[i] = psi[i] + 0.5 * h * k2[i]
            _csr_matvec(data, indices, indptr, tmp, k3)
            for i in range(n):
                tmp[i] = psi[i] + h * k3[i]
            _csr_matvec(data, indices, indptr, tmp, k4)
            for i in range(n):
                psi[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        return psi

    def rk4_propagate_numba(matrix: sp.csr_matrix, psi: np.ndarray,
                            h: float, nsteps: int) -> np.ndarray:
        psi = psi.astype(np.complex128, copy=True)
        return _rk4_loop(matrix.data.astype(np.complex128), matrix.indices,
                         matrix.indptr, psi, float(h), int(nsteps))

    rk4_propagate = rk4_propagate_numba
else:
    rk4_propagate_numba = None
    rk4_propagate = rk4_propagate_numpy
