"""Mixed discriminants and spherical trace moments.

The mixed discriminant of an r-tuple of r x r matrices is the full
polarization of the determinant,

    D(A^1, ..., A^r) = (1/r!) sum_{sigma in S_r} det(row i of A^{sigma(i)}),

computed here three independent ways (permutation sum, finite-difference
polarization, trace expansions for r = 2, 3) so each route can serve as an
oracle for the others.

Spherical integrals of products of quadratic forms xi* U xi over the unit
sphere of C^r reduce to signed-free sums of cycle trace products:

    int prod_i (xi* U_i xi) dmu = (1/(r)_n) sum_{pi in S_n} tr_pi(U_1..U_n)

with (r)_n = r(r+1)...(r+n-1) and tr_pi the product over cycles of pi of
the trace of the word read along the cycle.  Cycles are read from their
smallest element following pi forward; the full sum over S_n is invariant
under reversing that orientation (pi <-> pi^{-1} is a bijection), which the
tests confirm by Monte Carlo.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .hermitian import as_matrix, det

#: Longest supported moment word; (r)_n stays exactly representable and the
#: S_n sum stays desk-sized.
MAX_WORD_LEN = 6

#: Largest tuple size for the permutation-sum mixed discriminant.
MAX_RANK = 8


@lru_cache(maxsize=None)
def signed_permutations(n: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """All permutations of range(n) with signs, in Heap's order.

    Heap's algorithm emits each successive permutation by a single
    transposition, so the sign simply alternates; the order is fixed, which
    makes every signed sum over S_n reproducible bit for bit.
    """
    if n == 0:
        return (((), 1),)
    perm = list(range(n))
    out = [(tuple(perm), 1)]
    sign = 1
    counters = [0] * n
    i = 0
    while i < n:
        if counters[i] < i:
            if i % 2 == 0:
                perm[0], perm[i] = perm[i], perm[0]
            else:
                perm[counters[i]], perm[i] = perm[i], perm[counters[i]]
            sign = -sign
            out.append((tuple(perm), sign))
            counters[i] += 1
            i = 0
        else:
            counters[i] = 0
            i += 1
    return tuple(out)


def rising_factorial(r: int, n: int) -> int:
    """(r)_n = r (r+1) ... (r+n-1), as an exact integer."""
    out = 1
    for k in range(n):
        out *= r + k
    return out


def cycle_decomposition(perm: tuple[int, ...]) -> list[list[int]]:
    """Cycles of a permutation, each starting at its smallest element."""
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen[nxt] = True
            nxt = perm[nxt]
        cycles.append(cyc)
    return cycles


def _check_tuple(mats) -> tuple[list[np.ndarray], int]:
    ms = [as_matrix(m) for m in mats]
    r = len(ms)
    if r == 0:
        raise ValueError("empty matrix tuple")
    for m in ms:
        if m.shape[0] != r:
            raise ValueError(
                f"mixed discriminant needs {r} matrices of dim {r}, got dim {m.shape[0]}")
    return ms, r


def mixed_discriminant(mats) -> complex:
    """Permutation-sum mixed discriminant of r matrices of dimension r."""
    ms, r = _check_tuple(mats)
    if r > MAX_RANK:
        raise ValueError(f"rank {r} exceeds supported maximum {MAX_RANK}")
    total = 0.0 + 0.0j
    rows = np.empty((r, r), dtype=complex)
    for perm, _ in signed_permutations(r):
        for i in range(r):
            rows[i, :] = ms[perm[i]][i, :]
        total += det(rows)
    return total / math.factorial(r)


def mixed_discriminant_polarized(mats) -> complex:
    """Mixed discriminant via inclusion-exclusion polarization.

    Extracts the coefficient of t^1...t^r in det(sum_k t^k A^k) from the 2^r
    values det(sum_{k in S} A^k); an independent oracle for
    ``mixed_discriminant``.
    """
    ms, r = _check_tuple(mats)
    if r > 6:
        raise ValueError(f"polarized route supports rank <= 6, got {r}")
    total = 0.0 + 0.0j
    for mask in range(1, 1 << r):
        acc = np.zeros((r, r), dtype=complex)
        bits = 0
        for k in range(r):
            if mask >> k & 1:
                acc += ms[k]
                bits += 1
        total += (-1) ** (r - bits) * det(acc)
    return total / math.factorial(r)


def trace_expansion_r2(x, y) -> complex:
    """D(X, Y) for 2 x 2 matrices: (tr X tr Y - tr XY) / 2."""
    mx, my = as_matrix(x), as_matrix(y)
    if mx.shape != (2, 2) or my.shape != (2, 2):
        raise ValueError("trace_expansion_r2 needs 2x2 matrices")
    return (np.trace(mx) * np.trace(my) - np.trace(mx @ my)) / 2.0


def trace_expansion_r3(u, v, w) -> complex:
    """D(U, V, W) for 3 x 3 matrices via the six-term trace formula."""
    mu, mv, mw = as_matrix(u), as_matrix(v), as_matrix(w)
    for m in (mu, mv, mw):
        if m.shape != (3, 3):
            raise ValueError("trace_expansion_r3 needs 3x3 matrices")
    tu, tv, tw = np.trace(mu), np.trace(mv), np.trace(mw)
    six_d = (
        tu * tv * tw
        - tu * np.trace(mv @ mw)
        - tv * np.trace(mu @ mw)
        - tw * np.trace(mu @ mv)
        + np.trace(mu @ mv @ mw)
        + np.trace(mu @ mw @ mv)
    )
    return six_d / 6.0


def trace_word(perm: tuple[int, ...], mats: list[np.ndarray]) -> complex:
    """tr_pi: product over cycles of pi of tr(matrix word along the cycle)."""
    val = 1.0 + 0.0j
    for cyc in cycle_decomposition(perm):
        word = mats[cyc[0]]
        for i in cyc[1:]:
            word = word @ mats[i]
        val *= np.trace(word)
    return val


def moment_exact(mats) -> complex:
    """Exact spherical moment int prod_i (xi* U_i xi) dmu over S^{2r-1}."""
    ms = [as_matrix(m) for m in mats]
    n = len(ms)
    if n == 0:
        raise ValueError("empty moment word")
    if n > MAX_WORD_LEN:
        raise ValueError(f"moment word length {n} exceeds maximum {MAX_WORD_LEN}")
    r = ms[0].shape[0]
    for m in ms:
        if m.shape[0] != r:
            raise ValueError("mixed dimensions in moment word")
    total = 0.0 + 0.0j
    for perm, _ in signed_permutations(n):
        total += trace_word(perm, ms)
    return total / rising_factorial(r, n)


def sample_unit_sphere(rng: np.random.Generator, count: int, r: int) -> np.ndarray:
    """Unit vectors in C^r via normalized standard complex Gaussians."""
    z = rng.standard_normal((count, r)) + 1j * rng.standard_normal((count, r))
    return z / np.linalg.norm(z, axis=1)[:, None]


def moment_mc(mats, samples: int, seed: int,
              block_size: int = 1 << 16) -> tuple[complex, float]:
    """Monte Carlo spherical moment with standard error.

    Samples are drawn in fixed-size blocks, block b seeded by seed + b, so
    the result depends only on (seed, samples, block_size) and a parallel
    reduction over blocks would reproduce the serial one exactly.
    """
    ms = [as_matrix(m) for m in mats]
    if samples < 1:
        raise ValueError("need at least one sample")
    r = ms[0].shape[0]
    for m in ms:
        if m.shape[0] != r:
            raise ValueError("mixed dimensions in moment word")
    sum_w = 0.0 + 0.0j
    sum_abs2 = 0.0
    done = 0
    block = 0
    while done < samples:
        count = min(block_size, samples - done)
        rng = np.random.default_rng(seed + block)
        xi = sample_unit_sphere(rng, count, r)
        w = np.ones(count, dtype=complex)
        for m in ms:
            w *= np.einsum("si,ij,sj->s", xi.conj(), m, xi)
        sum_w += complex(w.sum())
        sum_abs2 += float(np.sum(np.abs(w) ** 2))
        done += count
        block += 1
    mean = sum_w / samples
    if samples == 1:
        return mean, 0.0
    var = max(sum_abs2 - samples * abs(mean) ** 2, 0.0) / (samples - 1)
    return mean, math.sqrt(var / samples)
