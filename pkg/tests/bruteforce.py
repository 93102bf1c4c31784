"""Independent brute-force witness evaluator used as a test oracle.

Builds every witness directly from normal-ordered coherent-state moments of
the perturbative Heisenberg operators, truncated exactly at second order in
the coupling.  Nothing here shares code with fwm.witnesses: operators are
represented as dictionaries of normal-ordered ladder monomials and multiplied
with the generic contraction rule, so each closed-form polynomial term in the
package is checked against machinery that never saw it.
"""
import numpy as np
from math import comb, factorial

NORD = 3  # perturbative orders 0, 1, 2


def _elementary(key, coef=1.0, order=0):
    v = np.zeros(NORD, dtype=complex)
    v[order] = coef
    return {key: v}


def _identity():
    return _elementary((0, 0, 0, 0, 0, 0))


def _mode_product(p1, q1, p2, q2):
    # (x†^p1 x^q1)(x†^p2 x^q2) normal ordered
    return [(factorial(k) * comb(q1, k) * comb(p2, k), p1 + p2 - k, q1 + q2 - k)
            for k in range(min(q1, p2) + 1)]


def op_mul(A, B):
    out = {}
    for ka, va in A.items():
        for kb, vb in B.items():
            conv = np.zeros(NORD, dtype=complex)
            for i in range(NORD):
                if va[i] == 0:
                    continue
                for j in range(NORD - i):
                    conv[i + j] += va[i] * vb[j]
            if not conv.any():
                continue
            for ca, pa, qa in _mode_product(ka[0], ka[1], kb[0], kb[1]):
                for cb, pb, qb in _mode_product(ka[2], ka[3], kb[2], kb[3]):
                    for cc, pc, qc in _mode_product(ka[4], ka[5], kb[4], kb[5]):
                        key = (pa, qa, pb, qb, pc, qc)
                        val = ca * cb * cc * conv
                        out[key] = out.get(key, 0) + val
    return out


def op_add(A, B, scale=1.0):
    out = {k: v.copy() for k, v in A.items()}
    for k, v in B.items():
        out[k] = out.get(k, 0) + scale * v
    return out


def op_adj(A):
    return {(k[1], k[0], k[3], k[2], k[5], k[4]): np.conj(v) for k, v in A.items()}


def _chain(*ops):
    out = ops[0]
    for o in ops[1:]:
        out = op_mul(out, o)
    return out


A_ = _elementary((0, 1, 0, 0, 0, 0))
Ad = _elementary((1, 0, 0, 0, 0, 0))
B_ = _elementary((0, 0, 0, 1, 0, 0))
Bd = _elementary((0, 0, 1, 0, 0, 0))
C_ = _elementary((0, 0, 0, 0, 0, 1))
Cd = _elementary((0, 0, 0, 0, 1, 0))


def heisenberg_dicts(coeffs):
    """a(t), b(t), c(t) as monomial dictionaries from a coefficient set."""
    def tag(op, coef, order):
        return op_mul(op, _elementary((0, 0, 0, 0, 0, 0), coef, order))

    a_t = op_add(tag(A_, coeffs.f1, 0), tag(_chain(Ad, B_, C_), coeffs.f2, 1))
    a_t = op_add(a_t, tag(_chain(A_, Bd, B_, Cd, C_), coeffs.f3, 2))
    a_t = op_add(a_t, tag(_chain(Ad, A_, A_, Cd, C_), coeffs.f4, 2))
    a_t = op_add(a_t, tag(_chain(Ad, A_, A_, B_, Bd), coeffs.f5, 2))

    b_t = op_add(tag(B_, coeffs.g1, 0), tag(_chain(A_, A_, Cd), coeffs.g2, 1))
    b_t = op_add(b_t, tag(_chain(A_, A_, Ad, Ad, B_), coeffs.g3, 2))
    b_t = op_add(b_t, tag(_chain(Ad, A_, B_, C_, Cd), coeffs.g4, 2))
    b_t = op_add(b_t, tag(_chain(A_, Ad, B_, C_, Cd), coeffs.g5, 2))

    c_t = op_add(tag(C_, coeffs.h1, 0), tag(_chain(A_, A_, Bd), coeffs.h2, 1))
    c_t = op_add(c_t, tag(_chain(A_, A_, Ad, Ad, C_), coeffs.h3, 2))
    c_t = op_add(c_t, tag(_chain(Ad, A_, C_, B_, Bd), coeffs.h4, 2))
    c_t = op_add(c_t, tag(_chain(A_, Ad, C_, B_, Bd), coeffs.h5, 2))
    return {"a": a_t, "b": b_t, "c": c_t}


def coherent_expect(op, inp):
    """Per-order coherent expectation (length-3 complex array)."""
    al, be, ga = inp.alpha, inp.beta, inp.gamma
    tot = np.zeros(NORD, dtype=complex)
    for (pa, qa, pb, qb, pc, qc), v in op.items():
        tot += (np.conj(al) ** pa * al ** qa * np.conj(be) ** pb * be ** qb
                * np.conj(ga) ** pc * ga ** qc) * v
    return tot


def _omul(u, v):
    out = np.zeros(NORD, dtype=complex)
    for i in range(NORD):
        for j in range(NORD - i):
            out[i + j] += u[i] * v[j]
    return out


def _oabs2(u):
    return _omul(u, np.conj(u))


class TruthEngine:
    """Order-truncated evaluation of every witness from raw moments."""

    def __init__(self, coeffs, inp):
        self.ops = heisenberg_dicts(coeffs)
        self.inp = inp

    def ev(self, *seq):
        dicts = []
        for s in seq:
            base = self.ops[s[0]]
            dicts.append(op_adj(base) if s.endswith("+") else base)
        out = dicts[0]
        for d in dicts[1:]:
            out = op_mul(out, d)
        return coherent_expect(out, self.inp)

    def hz1(self, i, j, m=1, n=1):
        quad = self.ev(*([f"{i}+"] * m + [i] * m + [f"{j}+"] * n + [j] * n))
        cross = self.ev(*([i] * m + [f"{j}+"] * n))
        return float((quad - _oabs2(cross)).sum().real)

    def hz2(self, i, j, m=1, n=1):
        ni = self.ev(*([f"{i}+"] * m + [i] * m))
        nj = self.ev(*([f"{j}+"] * n + [j] * n))
        cross = self.ev(*([i] * m + [j] * n))
        return float((_omul(ni, nj) - _oabs2(cross)).sum().real)

    def duan(self, i, j, omega_i, omega_j, t):
        # quadratures of the co-rotated pair: each mode rotated by e^{+iωt}
        rot_i = np.exp(1j * omega_i * t)
        rot_j = np.exp(1j * omega_j * t)
        ni, nj = self.ev(f"{i}+", i), self.ev(f"{j}+", j)
        mi, mj = self.ev(i) * rot_i, self.ev(j) * rot_j
        cij = self.ev(i, f"{j}+") * rot_i * np.conj(rot_j)
        off = cij - _omul(mi, np.conj(mj))
        val = 2 * (ni - _oabs2(mi)) + 2 * (nj - _oabs2(mj)) + 2 * (off + np.conj(off))
        return float(val.sum().real)

    def trimodal(self, cut_mode):
        nnn = self.ev("a+", "a", "b+", "b", "c+", "c")
        cross = {"c": ("a", "b", "c+"), "a": ("b", "c", "a+"),
                 "b": ("a", "c", "b+")}[cut_mode]
        return float((nnn - _oabs2(self.ev(*cross))).sum().real)

    def trimodal_sym(self):
        val = (_omul(_omul(self.ev("a+", "a"), self.ev("b+", "b")),
                     self.ev("c+", "c")) - _oabs2(self.ev("a", "b", "c")))
        return float(val.sum().real)
