"""Truncated three-mode occupation-number space: basis, states, moments.

The flat index runs row-major over (n_a, n_b, n_c); amplitudes reshape to a
(N_a+1, N_b+1, N_c+1) tensor for ladder operations.  Moments are evaluated
by applying only annihilation powers to ket and bra,
⟨a†ᵖaᵠb†ʳbˢc†ᵘcᵛ⟩ = ⟨(aᵖbʳcᵘ)ψ | (aᵠbˢcᵛ)ψ⟩, which is exact on the
truncated space (no creation operator ever pushes population past a cutoff).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import CoherentInput, ConfigError

MAX_MOMENT_ORDER = 12


class CutoffError(ConfigError):
    """Per-mode cutoff too small for the requested state."""


@dataclass(frozen=True)
class FockBasis:
    """Per-mode occupation cutoffs (inclusive) and the flat index map."""

    cutoffs: tuple[int, int, int]

    def __post_init__(self):
        if any(int(c) != c or c < 0 for c in self.cutoffs):
            raise ConfigError(f"cutoffs must be nonnegative integers, got {self.cutoffs!r}")

    @property
    def shape(self) -> tuple[int, int, int]:
        na, nb, nc = self.cutoffs
        return (na + 1, nb + 1, nc + 1)

    @property
    def dimension(self) -> int:
        sa, sb, sc = self.shape
        return sa * sb * sc

    def index(self, occ: tuple[int, int, int]) -> int:
        na, nb, nc = occ
        sa, sb, sc = self.shape
        if not (0 <= na < sa and 0 <= nb < sb and 0 <= nc < sc):
            raise IndexError(f"occupation {occ!r} outside basis {self.cutoffs!r}")
        return (na * sb + nb) * sc + nc

    def occupation(self, idx: int) -> tuple[int, int, int]:
        sa, sb, sc = self.shape
        if not 0 <= idx < self.dimension:
            raise IndexError(f"index {idx} outside dimension {self.dimension}")
        na, rem = divmod(idx, sb * sc)
        nb, nc = divmod(rem, sc)
        return (na, nb, nc)

    def occupations(self) -> np.ndarray:
        """(dimension, 3) array of occupations in flat-index order."""
        grids = np.indices(self.shape).reshape(3, -1).T
        return grids


@dataclass
class FockStateVector:
    """Complex amplitudes over a FockBasis, with truncation bookkeeping."""

    amplitudes: np.ndarray
    basis: FockBasis
    tail_mass: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.basis.shape)


def coherent_amplitudes(cutoff: int, z: complex) -> tuple[np.ndarray, float]:
    """Truncated coherent amplitudes and the discarded tail mass."""
    n = np.arange(cutoff + 1)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, cutoff + 1)))))
    if z == 0:
        amps = np.zeros(cutoff + 1, dtype=complex)
        amps[0] = 1.0
        return amps, 0.0
    # amplitudes e^{-|z|²/2} zⁿ/√(n!), evaluated in log space for stability
    log_mag = -abs(z) ** 2 / 2 + n * math.log(abs(z)) - log_fact / 2
    amps = np.exp(log_mag) * np.exp(1j * n * np.angle(z))
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    return amps, tail


def cutoffs_for(inp: CoherentInput, tail: float = 1e-12,
                headroom: tuple[int, int, int] = (4, 2, 2)) -> tuple[int, int, int]:
    """Smallest cutoffs keeping each mode's coherent tail below ``tail``,
    plus headroom for the interaction (two pump quanta move per event)."""
    out = []
    for z, extra in zip((inp.alpha, inp.beta, inp.gamma), headroom):
        lam = abs(z) ** 2
        n = max(2, int(math.ceil(lam)))
        while True:
            _, t = coherent_amplitudes(n, z)
            if t < tail:
                break
            n += 1
            if n > 10_000:
                raise CutoffError(f"no cutoff below 10000 reaches tail {tail}")
        out.append(n + extra)
    return tuple(out)


def coherent_state(basis: FockBasis, inp: CoherentInput,
                   tail_tol: float = 1e-9) -> FockStateVector:
    """Truncated, renormalized |α⟩⊗|β⟩⊗|γ⟩ on the basis."""
    na, nb, nc = basis.cutoffs
    va, ta = coherent_amplitudes(na, inp.alpha)
    vb, tb = coherent_amplitudes(nb, inp.beta)
    vc, tc = coherent_amplitudes(nc, inp.gamma)
    if max(ta, tb, tc) > tail_tol:
        raise CutoffError(
            f"coherent tail {max(ta, tb, tc):.3e} above {tail_tol:.1e}; "
            f"raise cutoffs {basis.cutoffs}")
    psi = np.einsum("i,j,k->ijk", va, vb, vc).ravel()
    psi /= np.linalg.norm(psi)
    return FockStateVector(amplitudes=psi, basis=basis, tail_mass=(ta, tb, tc))


@dataclass(frozen=True)
class MomentSpec:
    """Exponent tuple (p, q, r, s, u, v) for ⟨a†ᵖaᵠ b†ʳbˢ c†ᵘcᵛ⟩."""

    p: int
    q: int
    r: int
    s: int
    u: int
    v: int

    def __post_init__(self):
        exps = (self.p, self.q, self.r, self.s, self.u, self.v)
        if any(int(e) != e or e < 0 for e in exps):
            raise ConfigError(f"moment exponents must be >= 0, got {exps!r}")
        if sum(exps) > MAX_MOMENT_ORDER:
            raise ConfigError(
                f"moment order {sum(exps)} exceeds maximum {MAX_MOMENT_ORDER}")


def _lower(tensor: np.ndarray, mode: int, power: int) -> np.ndarray:
    """Apply the annihilation operator ``power`` times along one mode axis."""
    out = tensor
    for _ in range(power):
        n = out.shape[mode]
        factors = np.sqrt(np.arange(1, n))
        shape = [1, 1, 1]
        shape[mode] = n - 1
        shifted = np.take(out, np.arange(1, n), axis=mode) * factors.reshape(shape)
        pad = [(0, 0)] * 3
        pad[mode] = (0, 1)
        out = np.pad(shifted, pad)
    return out


def moment(psi: FockStateVector, spec: MomentSpec) -> complex:
    """⟨ψ| a†ᵖaᵠ b†ʳbˢ c†ᵘcᵛ |ψ⟩ by ladder action on the state."""
    ten = psi.tensor()
    bra = _lower(_lower(_lower(ten, 0, spec.p), 1, spec.r), 2, spec.u)
    ket = _lower(_lower(_lower(ten, 0, spec.q), 1, spec.s), 2, spec.v)
    return complex(np.vdot(bra, ket))


def mean_occupations(psi: FockStateVector) -> tuple[float, float, float]:
    """(⟨n_a⟩, ⟨n_b⟩, ⟨n_c⟩)."""
    prob = np.abs(psi.tensor()) ** 2
    na = np.arange(prob.shape[0])
    nb = np.arange(prob.shape[1])
    nc = np.arange(prob.shape[2])
    return (float(np.einsum("ijk,i->", prob, na)),
            float(np.einsum("ijk,j->", prob, nb)),
            float(np.einsum("ijk,k->", prob, nc)))


def conserved_charges(psi: FockStateVector) -> tuple[float, float]:
    """⟨n_a + 2 n_b⟩ and ⟨n_b − n_c⟩, both commuting with the Hamiltonian."""
    na, nb, nc = mean_occupations(psi)
    return (na + 2 * nb, nb - nc)


def edge_population(psi: FockStateVector, margin: int = 0) -> float:
    """Probability mass with any mode within ``margin`` of its cutoff."""
    prob = np.abs(psi.tensor()) ** 2
    sa, sb, sc = prob.shape
    interior = prob[: sa - 1 - margin, : sb - 1 - margin, : sc - 1 - margin]
    return float(1.0 - interior.sum())
