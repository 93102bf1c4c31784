#!/usr/bin/env python3
"""Benchmark the RK4 propagation kernels: numba @njit vs numpy/scipy fallback.

Run:  python benchmarks/bench_kernels.py
The numba path is also what FWM_NO_NUMBA=1 disables at import time; here both
implementations are timed side by side on realistic Hamiltonians.
"""
import time

import numpy as np

from fwm import kernels
from fwm.fockspace import FockBasis, coherent_state, cutoffs_for
from fwm.model import CoherentInput, ModelParams
from fwm.oracle import build_hamiltonian, spectral_radius


def setup(scale):
    inp = CoherentInput.from_pump_phase(1.2 * scale, 0.5, 0.9 * scale, 0.6 * scale)
    params = ModelParams.from_detuning(-100.0, 1.0)
    basis = FockBasis(cutoffs_for(inp))
    psi0 = coherent_state(basis, inp)
    H = build_hamiltonian(params, basis)
    return H, psi0


def time_call(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    print(f"numba available and active: {kernels.HAVE_NUMBA}")
    print(f"{'dim':>6s} {'nnz':>8s} {'steps':>7s} {'numpy [s]':>10s} "
          f"{'numba [s]':>10s} {'speedup':>8s} {'max|diff|':>10s}")
    for scale in (0.8, 1.0, 1.3, 1.6):
        H, psi0 = setup(scale)
        rho = spectral_radius(H)
        h = 0.02 / rho
        nsteps = 2000
        M = (-1j) * H.matrix
        t_np, out_np = time_call(kernels.rk4_propagate_numpy,
                                 M, psi0.amplitudes, h, nsteps)
        if kernels.HAVE_NUMBA:
            # one warmup call so JIT compilation is not timed
            kernels.rk4_propagate_numba(M, psi0.amplitudes, h, 1)
            t_nb, out_nb = time_call(kernels.rk4_propagate_numba,
                                     M, psi0.amplitudes, h, nsteps)
            diff = np.max(np.abs(out_np - out_nb))
            print(f"{psi0.basis.dimension:6d} {M.nnz:8d} {nsteps:7d} "
                  f"{t_np:10.3f} {t_nb:10.3f} {t_np / t_nb:7.1f}x {diff:10.2e}")
        else:
            print(f"{psi0.basis.dimension:6d} {M.nnz:8d} {nsteps:7d} "
                  f"{t_np:10.3f} {'-':>10s} {'-':>8s} {'-':>10s}")


if __name__ == "__main__":
    main()
