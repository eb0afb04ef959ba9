"""The double mixed discriminant of a square block map, every route.

For a block map with r = w, the quantity of interest is the signed sum

    Phi = sum_{sigma in S_r} sgn(sigma) D(B_{1 sigma(1)}, ..., B_{r sigma(r)}),

real for Hermitian-symmetric blocks.  Besides this direct sum, it equals

* the dual double sum over the transposed block family A_pq with
  (A_pq)_ij = (B_ij)_pq, weighted 1/r!;
* for r = 2 under the doubly stochastic normalization, the exact spherical
  integral of 4 - 3 det C(xi);
* for r = 3, the integral of 10 det C(xi) + 27 - 12 sigma_2(C(xi)), whose
  det-part is also a strictly positive lower bound for positive maps;
* for r = 4, an integral part 35 sigma_4 + 128 - (80/3) sigma_2 plus a
  residual signed sum of 4-cycle trace words that admits no such integral
  form.

Here C(xi) is the r x r matrix of quadratic forms (xi* B_ij xi).  All the
integrals are evaluated exactly: each monomial in the entries of C(xi) is a
product of quadratic forms and goes through ``moment_exact``; no quadrature
is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .discriminants import (cycle_decomposition, mixed_discriminant,
                            moment_exact, signed_permutations, trace_word)
from .posmap import BlockMap, normalization_residual

#: Integral routes demand this much normalization before they make sense.
NORMALIZATION_RESIDUAL_TOL = 1e-8


@dataclass
class PhiReport:
    value: float
    imaginary_residue: float
    method: str
    lower_bound: float | None = None


def _require_square(h: BlockMap, max_rank: int, what: str) -> int:
    if h.r != h.w:
        raise ValueError(f"{what} needs a square map (r = w), got r={h.r}, w={h.w}")
    if h.r > max_rank:
        raise ValueError(f"{what} supports rank <= {max_rank}, got {h.r}")
    return h.r


def _require_normalized(h: BlockMap, what: str) -> None:
    res = normalization_residual(h)
    if res >= NORMALIZATION_RESIDUAL_TOL:
        raise ValueError(
            f"{what} needs a doubly stochastic map: residual {res:.3e} >= "
            f"{NORMALIZATION_RESIDUAL_TOL:.0e} (run sinkhorn_normalize first)")


def phi_direct(h: BlockMap) -> PhiReport:
    """The signed permutation sum over mixed discriminants of block rows."""
    r = _require_square(h, 5, "phi_direct")
    total = 0.0 + 0.0j
    for perm, sign in signed_permutations(r):
        total += sign * mixed_discriminant([h.block(i, perm[i]) for i in range(r)])
    return PhiReport(value=float(total.real), imaginary_residue=float(abs(total.imag)),
                     method="direct")


def phi_dual(h: BlockMap) -> PhiReport:
    """The same number from the transposed block family A_pq.

    (A_pq)_ij = (B_ij)_pq, and Phi = (1/r!) sum over signed pairs of
    permutations of D(A_{gamma(1) pi(1)}, ...).  Must agree with phi_direct.
    """
    r = _require_square(h, 4, "phi_dual")
    # a[p, q] as a matrix in (i, j)
    a = np.transpose(h.blocks, (2, 3, 0, 1))
    total = 0.0 + 0.0j
    perms = signed_permutations(r)
    for gamma, sg in perms:
        for pi, sp in perms:
            total += sg * sp * mixed_discriminant(
                [a[gamma[i], pi[i]] for i in range(r)])
    total /= math.factorial(r)
    return PhiReport(value=float(total.real), imaginary_residue=float(abs(total.imag)),
                     method="dual")


def c_matrix(h: BlockMap, xi) -> np.ndarray:
    """C(xi) = (xi* B_ij xi): Hermitian, positive definite for positive maps."""
    v = np.asarray(xi, dtype=complex).reshape(-1)
    if v.shape[0] != h.r:
        raise ValueError(f"xi has dim {v.shape[0]}, map has r={h.r}; note w={h.w}")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"xi must be a unit vector (|xi| = {norm})")
    return np.einsum("a,ijab,b->ij", v.conj(), h.blocks, v)


def integral_det_c(h: BlockMap) -> complex:
    """Exact int det C(xi) dmu: the Leibniz monomials of det C through moment_exact."""
    r = h.r
    total = 0.0 + 0.0j
    for perm, sign in signed_permutations(r):
        total += sign * moment_exact([h.block(i, perm[i]) for i in range(r)])
    return total


def integral_sigma2_c(h: BlockMap) -> complex:
    """Exact int sigma_2(C(xi)) dmu via 2x2 principal minors of C."""
    total = 0.0 + 0.0j
    for i in range(h.r):
        for j in range(i + 1, h.r):
            total += moment_exact([h.block(i, i), h.block(j, j)])
            total -= moment_exact([h.block(i, j), h.block(j, i)])
    return total


def phi_integral_r2(h: BlockMap) -> PhiReport:
    """Exact spherical form for r = 2: Phi = int (4 - 3 det C(xi)) dmu >= 1."""
    r = _require_square(h, 2, "phi_integral_r2")
    if r != 2:
        raise ValueError("phi_integral_r2 needs rank 2")
    _require_normalized(h, "phi_integral_r2")
    idet = integral_det_c(h)
    value = 4.0 - 3.0 * idet
    return PhiReport(value=float(value.real), imaginary_residue=float(abs(value.imag)),
                     method="integral_r2")


def phi_integral_r3(h: BlockMap) -> PhiReport:
    """Exact spherical form for r = 3 with the positive lower bound.

    Phi = int (10 det C + 27 - 12 sigma_2(C)) dmu, and for positive maps
    Phi >= int det C dmu > 0; the report carries that integral as
    lower_bound.
    """
    r = _require_square(h, 3, "phi_integral_r3")
    if r != 3:
        raise ValueError("phi_integral_r3 needs rank 3")
    _require_normalized(h, "phi_integral_r3")
    idet = integral_det_c(h)
    isig = integral_sigma2_c(h)
    value = 10.0 * idet + 27.0 - 12.0 * isig
    return PhiReport(value=float(value.real), imaginary_residue=float(abs(value.imag)),
                     method="integral_r3", lower_bound=float(idet.real))


class R4Decomposition(NamedTuple):
    integral_part: float
    q_part: float
    total: float


def four_cycle_trace_sum(mats) -> complex:
    """Q(U_1..U_4): sum over the six 4-cycles of the trace along the cycle."""
    if len(mats) != 4:
        raise ValueError("four_cycle_trace_sum needs exactly 4 matrices")
    total = 0.0 + 0.0j
    for perm, _ in signed_permutations(4):
        if len(cycle_decomposition(perm)) == 1:
            total += trace_word(perm, list(mats))
    return total


def phi_r4_decomposition(h: BlockMap) -> R4Decomposition:
    """Split Phi at r = 4 into its exact-integral part and the 4-cycle residue.

    integral_part = int (35 sigma_4(C) + 128 - (80/3) sigma_2(C)) dmu,
    q_part = -(1/12) sum_sigma sgn(sigma) Q(B_{1 sigma(1)}, ..., B_{4 sigma(4)});
    their sum equals phi_direct.
    """
    r = _require_square(h, 4, "phi_r4_decomposition")
    if r != 4:
        raise ValueError("phi_r4_decomposition needs rank 4")
    _require_normalized(h, "phi_r4_decomposition")
    integral = 35.0 * integral_det_c(h) + 128.0 - (80.0 / 3.0) * integral_sigma2_c(h)
    q_sum = 0.0 + 0.0j
    for perm, sign in signed_permutations(4):
        q_sum += sign * four_cycle_trace_sum([h.block(i, perm[i]) for i in range(4)])
    q_part = -q_sum / 12.0
    return R4Decomposition(integral_part=float(integral.real),
                           q_part=float(q_part.real),
                           total=float((integral + q_part).real))


def schur_delta(l1, l2, l3):
    """(sum)^3 + 9 l1 l2 l3 - 4 (sum)(sum of pair products); >= 0 on the
    nonnegative octant, vanishing iff all equal or two equal and one zero.

    Accepts scalars or numpy arrays elementwise.
    """
    a1, a2, a3 = (np.asarray(x, dtype=float) for x in (l1, l2, l3))
    if np.any(a1 < 0) or np.any(a2 < 0) or np.any(a3 < 0):
        raise ValueError("schur_delta needs nonnegative arguments")
    s = a1 + a2 + a3
    out = s ** 3 + 9.0 * a1 * a2 * a3 - 4.0 * s * (a1 * a2 + a1 * a3 + a2 * a3)
    if out.ndim == 0:
        return float(out)
    return out


def rank2_norm_identity(h: BlockMap) -> tuple[float, float, float]:
    """Phi = D(B_11, B_22) + ||B_12||^2 / 2 for normalized rank-2 maps.

    Returns (phi, d_term, norm_term); needs tr(B_12) = 0 within 1e-9.
    """
    r = _require_square(h, 2, "rank2_norm_identity")
    if r != 2:
        raise ValueError("rank2_norm_identity needs rank 2")
    off_trace = abs(complex(np.trace(h.block(0, 1))))
    if off_trace > 1e-9:
        raise ValueError(
            f"off-diagonal block trace {off_trace:.3e} != 0: map is not normalized")
    d_term = mixed_discriminant([h.block(0, 0), h.block(1, 1)])
    norm_term = 0.5 * float(np.trace(h.block(0, 1) @ h.block(1, 0)).real)
    phi = float(d_term.real) + norm_term
    return phi, float(d_term.real), norm_term
