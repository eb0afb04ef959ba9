"""Exterior algebra engine: wedge signs, Chern/Schur forms, positivity."""

import itertools
import math

import numpy as np
import pytest

from schurpos.forms import (CurvatureTensor, Form, c3_principal_minors,
                            chern_forms, curvature_form_matrix, det_forms,
                            is_real_pp, max_coeff_diff,
                            random_griffiths_curvature, restrict_fiber,
                            schur_form, standard_omega, twist_chern,
                            validate_partition, volume_coefficient,
                            weak_positivity_min, wedge)
from schurpos.phi import phi_direct
from schurpos.posmap import from_curvature, positivity_certificate

TWO_PI = 2.0 * math.pi


def random_11_form(rng, n):
    """Random real (1,1)-form: Hermitian coefficient matrix."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (a + a.conj().T) / 2
    return Form(n, {((p,), (q,)): complex(h[p, q])
                    for p in range(n) for q in range(n)})


def brute_force_wedge_term(key1, key2):
    """Independent Koszul-sign oracle: bubble-sort the concatenated symbol word.

    Symbols are (0, a) for dz^a and (1, b) for dzbar^b; canonical order is all
    dz ascending then all dzbar ascending.  Every adjacent swap of two odd
    symbols flips the sign; duplicates kill the term.
    """
    word = ([(0, a) for a in key1[0]] + [(1, b) for b in key1[1]]
            + [(0, a) for a in key2[0]] + [(1, b) for b in key2[1]])
    if len(set(word)) != len(word):
        return None, 0
    sign = 1
    w = list(word)
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                w[j], w[j + 1] = w[j + 1], w[j]
                sign = -sign
    holo = tuple(a for t, a in w if t == 0)
    anti = tuple(b for t, b in w if t == 1)
    return (holo, anti), sign


class TestWedge:
    def test_unit(self):
        rng = np.random.default_rng(1)
        u = random_11_form(rng, 3)
        assert max_coeff_diff(wedge(u, Form.one(3)), u) == 0.0

    def test_standard_volume_orientation(self):
        u1 = Form(2, {((0,), (0,)): 1j})
        u2 = Form(2, {((1,), (1,)): 1j})
        tau = volume_coefficient(wedge(u1, u2))
        assert abs(tau - 1.0) < 1e-15

    def test_pp_forms_commute(self):
        # signs agree exactly (see the bubble-sort oracle below); multi-term
        # accumulation order leaves only last-ulp noise
        rng = np.random.default_rng(2)
        u, v = random_11_form(rng, 3), random_11_form(rng, 3)
        uv, vu = wedge(u, v), wedge(v, u)
        assert max_coeff_diff(uv, vu) < 1e-14 * (1.0 + uv.max_abs())

    def test_against_bubble_sort_oracle(self):
        rng = np.random.default_rng(3)
        n = 4
        keys = []
        for p, q in ((1, 0), (0, 1), (1, 1), (2, 1)):
            for i in itertools.combinations(range(n), p):
                for j in itertools.combinations(range(n), q):
                    keys.append((i, j))
        for _ in range(300):
            k1 = keys[rng.integers(len(keys))]
            k2 = keys[rng.integers(len(keys))]
            a = complex(rng.standard_normal(), rng.standard_normal())
            b = complex(rng.standard_normal(), rng.standard_normal())
            got = wedge(Form(n, {k1: a}), Form(n, {k2: b}))
            key, sign = brute_force_wedge_term(k1, k2)
            if key is None:
                assert got.coeffs == {} or got.max_abs() == 0.0
            else:
                assert abs(got.coeffs[key] - sign * a * b) < 1e-15

    def test_associativity(self):
        rng = np.random.default_rng(4)
        u, v, w = (random_11_form(rng, 3) for _ in range(3))
        lhs = wedge(wedge(u, v), w)
        rhs = wedge(u, wedge(v, w))
        assert max_coeff_diff(lhs, rhs) < 1e-13

    def test_odd_forms_anticommute(self):
        b1 = Form(3, {((0,), ()): 1.0 + 0j})
        b2 = Form(3, {((1,), ()): 1.0 + 0j})
        assert max_coeff_diff(wedge(b1, b2), (-1.0) * wedge(b2, b1)) == 0.0

    def test_degree_overflow(self):
        top = Form(2, {((0, 1), (0, 1)): 1.0 + 0j})
        with pytest.raises(ValueError):
            wedge(top, Form(2, {((0,), ()): 1.0 + 0j}))

    def test_conjugate(self):
        u = Form(2, {((0,), (1,)): 2.0 + 3.0j})
        c = u.conjugate()
        assert c.coeffs[((1,), (0,))] == pytest.approx(-(2.0 - 3.0j))


class TestChernForms:
    def test_zero_curvature(self):
        t = CurvatureTensor(rank=3, dim=3, entries=np.zeros((3, 3, 3, 3)))
        cs = chern_forms(t)
        assert volume_coefficient(wedge(cs[0], Form.one(3))) == 0.0  # no top part
        assert cs[0].coeffs == {((), ()): 1.0 + 0j}
        for k in (1, 2, 3):
            assert cs[k].max_abs() == 0.0

    def test_rank_one(self):
        lam = 2.5
        entries = np.zeros((1, 1, 2, 2), dtype=complex)
        entries[0, 0, 0, 0] = lam
        cs = chern_forms(CurvatureTensor(rank=1, dim=2, entries=entries))
        want = Form(2, {((0,), (0,)): (1j / TWO_PI) * lam})
        assert max_coeff_diff(cs[1], want) < 1e-16

    def test_c1_is_trace(self):
        t = random_griffiths_curvature(3, 3, 2, 0.2, seed=5)
        cs = chern_forms(t)
        tr = Form(3, {})
        for a in range(3):
            for b in range(3):
                v = sum(t.entries[i, i, a, b] for i in range(3))
                tr.coeffs[((a,), (b,))] = (1j / TWO_PI) * v
        assert max_coeff_diff(cs[1], tr) < 1e-14

    def test_c2_newton_identity(self):
        # c2 = (c1^2 - (i/2pi)^2 tr(R ^ R)) / 2
        t = random_griffiths_curvature(3, 3, 2, 0.3, seed=6)
        cs = chern_forms(t)
        theta = curvature_form_matrix(t)
        p2 = Form.zero(3)
        for i in range(3):
            for j in range(3):
                p2 = p2 + wedge(theta[i][j], theta[j][i])
        want = 0.5 * (wedge(cs[1], cs[1]) - (1j / TWO_PI) ** 2 * p2)
        assert max_coeff_diff(cs[2], want) < 1e-11

    def test_reality(self):
        t = random_griffiths_curvature(4, 3, 3, 0.2, seed=7)
        for k, c in enumerate(chern_forms(t)):
            assert is_real_pp(c, tol=1e-13 * (1.0 + c.max_abs())), f"c_{k} not real"

    def test_desk_scale_cap(self):
        t = CurvatureTensor(rank=6, dim=2, entries=np.zeros((6, 6, 2, 2)))
        with pytest.raises(ValueError):
            chern_forms(t)


class TestSchurForm:
    def test_single_row_partitions(self):
        t = random_griffiths_curvature(3, 3, 2, 0.25, seed=8)
        cs = chern_forms(t)
        assert max_coeff_diff(schur_form(cs, (1, 0, 0)), cs[1]) < 1e-14
        assert max_coeff_diff(schur_form(cs, (2, 0, 0)), cs[2]) < 1e-13
        assert max_coeff_diff(schur_form(cs, (3, 0, 0)), cs[3]) < 1e-13

    def test_weight_three_expansions(self):
        t = random_griffiths_curvature(3, 3, 2, 0.25, seed=9)
        cs = chern_forms(t)
        c1, c2, c3 = cs[1], cs[2], cs[3]
        p111 = wedge(wedge(c1, c1), c1) - 2.0 * wedge(c1, c2) + c3
        p210 = wedge(c1, c2) - c3
        assert max_coeff_diff(schur_form(cs, (1, 1, 1)), p111) < 1e-12
        assert max_coeff_diff(schur_form(cs, (2, 1, 0)), p210) < 1e-12

    def test_segre_inversion_oracle(self):
        # invert the total Chern series: (1+c1+c2+c3)(1+s1+s2+s3) = 1, then
        # P_(1^k) = (-1)^k s_k
        t = random_griffiths_curvature(3, 3, 2, 0.25, seed=10)
        cs = chern_forms(t)
        c1, c2, c3 = cs[1], cs[2], cs[3]
        s1 = -1.0 * c1
        s2 = wedge(c1, c1) - c2
        s3 = -1.0 * wedge(wedge(c1, c1), c1) + 2.0 * wedge(c1, c2) - c3
        assert max_coeff_diff(schur_form(cs, (1,)), -1.0 * s1) < 1e-13
        assert max_coeff_diff(schur_form(cs, (1, 1)), s2) < 1e-12
        assert max_coeff_diff(schur_form(cs, (1, 1, 1)), -1.0 * s3) < 1e-12

    def test_partition_validation(self):
        t = random_griffiths_curvature(3, 3, 1, 0.25, seed=11)
        cs = chern_forms(t)
        with pytest.raises(ValueError):
            schur_form(cs, (1, 2))  # not weakly decreasing
        with pytest.raises(ValueError):
            schur_form(cs, (4, 0, 0))  # part exceeds rank
        with pytest.raises(ValueError):
            schur_form(cs, (2, 2, 0))  # weight exceeds dimension
        with pytest.raises(ValueError):
            schur_form(cs, (-1,))


class TestC3PrincipalMinors:
    def test_rank_three_single_minor(self):
        t = random_griffiths_curvature(3, 3, 2, 0.2, seed=12)
        assert max_coeff_diff(c3_principal_minors(t), chern_forms(t)[3]) < 1e-12

    def test_rank_four(self):
        t = random_griffiths_curvature(4, 3, 2, 0.2, seed=13)
        assert max_coeff_diff(c3_principal_minors(t), chern_forms(t)[3]) < 1e-11

    def test_zero(self):
        t = CurvatureTensor(rank=4, dim=3, entries=np.zeros((4, 4, 3, 3)))
        assert c3_principal_minors(t).max_abs() == 0.0

    def test_sum_over_restrictions(self):
        t = random_griffiths_curvature(4, 3, 2, 0.2, seed=14)
        total = Form.zero(3)
        for sub in itertools.combinations(range(4), 3):
            total = total + c3_principal_minors(restrict_fiber(t, sub))
        assert max_coeff_diff(total, c3_principal_minors(t)) < 1e-12

    def test_rank_too_small(self):
        t = CurvatureTensor(rank=2, dim=3, entries=np.zeros((2, 2, 3, 3)))
        with pytest.raises(ValueError):
            c3_principal_minors(t)


class TestRestrictFiber:
    def test_full_subset_identity(self):
        t = random_griffiths_curvature(3, 3, 2, 0.2, seed=15)
        r = restrict_fiber(t, (0, 1, 2))
        assert np.array_equal(r.entries, t.entries)

    def test_restriction_stays_positive(self):
        t = random_griffiths_curvature(4, 3, 3, eps=0.3, seed=16)
        sub = restrict_fiber(t, (0, 2, 3))
        min_eig, _ = positivity_certificate(from_curvature(sub), grid=200, seed=4)
        assert min_eig >= 0.3 - 1e-10

    def test_invalid_subset(self):
        t = random_griffiths_curvature(3, 3, 1, 0.2, seed=17)
        with pytest.raises(ValueError):
            restrict_fiber(t, (0, 0))
        with pytest.raises(ValueError):
            restrict_fiber(t, (0, 5))


class TestTwist:
    def test_eps_zero_identity(self):
        t = random_griffiths_curvature(3, 3, 2, 0.2, seed=18)
        cs = chern_forms(t)
        out = twist_chern(cs, 0.0, standard_omega(3))
        for k in range(4):
            assert max_coeff_diff(out[k], cs[k]) == 0.0

    def test_c3_component_formula(self):
        t = random_griffiths_curvature(3, 3, 2, 0.2, seed=19)
        cs = chern_forms(t)
        eps = 0.3
        w = standard_omega(3)
        w2 = wedge(w, w)
        want = (cs[3] - eps * wedge(w, cs[2]) + eps ** 2 * wedge(w2, cs[1])
                - eps ** 3 * wedge(w2, w))
        got = twist_chern(cs, eps, w)[3]
        assert max_coeff_diff(got, want) < 1e-15

    def test_matches_curvature_shift(self):
        t = random_griffiths_curvature(3, 3, 2, 0.2, seed=20)
        cs = chern_forms(t)
        eps = 0.17
        shifted = t.entries.copy()
        for i in range(3):
            for a in range(3):
                shifted[i, i, a, a] -= eps
        oracle = chern_forms(CurvatureTensor(rank=3, dim=3, entries=shifted))
        got = twist_chern(cs, eps, standard_omega(3))
        for k in range(4):
            assert max_coeff_diff(got[k], oracle[k]) < 1e-10


class TestWeakPositivity:
    def test_strongly_positive_form(self):
        u = Form(2, {((0,), (0,)): 1j, ((1,), (1,)): 1j})
        val, witness = weak_positivity_min(u, samples=2000, seed=0)
        assert val > 0.0
        assert len(witness) == 1

    def test_indefinite_form_witness(self):
        u = Form(2, {((0,), (0,)): 1j, ((1,), (1,)): -1j})
        val, witness = weak_positivity_min(u, samples=2000, seed=0)
        assert val < 0.0
        # the documented witness: beta = dz^1 gives tau = -1
        beta = Form(2, {((0,), ()): 1.0 + 0j})
        prod = wedge(u, 1j * wedge(beta, beta.conjugate()))
        assert abs(volume_coefficient(prod) - (-1.0)) < 1e-15

    def test_sum_of_decomposables_is_positive(self):
        rng = np.random.default_rng(21)
        n, p = 3, 2
        u = Form.zero(n)
        for _ in range(4):
            cov = [Form(n, {((a,), ()): complex(z.real, z.imag)
                            for a, z in enumerate(rng.standard_normal(n)
                                                  + 1j * rng.standard_normal(n))})
                   for _ in range(p)]
            alpha = wedge(cov[0], cov[1])
            u = u + (1j) ** (p * p) * wedge(alpha, alpha.conjugate())
        val, _ = weak_positivity_min(u, samples=4000, seed=1)
        assert val > 0.0

    def test_top_form_q_zero(self):
        t = random_griffiths_curvature(3, 3, 2, 0.2, seed=22)
        c3 = chern_forms(t)[3]
        val, witness = weak_positivity_min(c3, samples=10, seed=2)
        assert witness == []
        assert abs(val - volume_coefficient(c3).real) < 1e-16

    def test_c3_volume_equals_phi_constant(self):
        # for r = n = 3 the c3 volume coefficient is 3!/(2pi)^3 times the
        # double mixed discriminant of the associated block map
        for seed in (23, 24, 25):
            t = random_griffiths_curvature(3, 3, 2, 0.3, seed=seed)
            tau, _ = weak_positivity_min(chern_forms(t)[3], samples=1, seed=0)
            phi = phi_direct(from_curvature(t)).value
            assert phi > 0.0
            assert abs(tau - 6.0 / TWO_PI ** 3 * phi) < 1e-10 * abs(phi)

    def test_fast_path_matches_direct_wedge(self):
        rng = np.random.default_rng(26)
        t = random_griffiths_curvature(3, 3, 2, 0.2, seed=27)
        cs = chern_forms(t)
        for u, q in ((cs[1], 2), (cs[2], 1)):
            val, witness = weak_positivity_min(u, samples=500, seed=3)
            covs = [Form(3, {((a,), ()): w[a] for a in range(3)}) for w in witness]
            beta = covs[0]
            for extra in covs[1:]:
                beta = wedge(beta, extra)
            direct = volume_coefficient(
                wedge(u, (1j) ** (q * q) * wedge(beta, beta.conjugate())))
            assert abs(direct.real - val) < 1e-12
            assert abs(direct.imag) < 1e-12

    def test_deterministic(self):
        u = Form(2, {((0,), (0,)): 1j, ((1,), (1,)): 2j})
        a = weak_positivity_min(u, samples=3000, seed=9)
        b = weak_positivity_min(u, samples=3000, seed=9)
        assert a[0] == b[0]

    def test_negated_curvature_is_flagged(self):
        # true-negative control for the sweep: flipping the sign of a positive
        # tensor flips c3 (odd degree), so both the q=0 and q=1 testers must
        # report a negative minimum
        t = random_griffiths_curvature(3, 3, 2, 0.3, seed=30)
        neg = CurvatureTensor(rank=3, dim=3, entries=-t.entries)
        val3, _ = weak_positivity_min(chern_forms(neg)[3], samples=1, seed=0)
        assert val3 < 0.0
        t4 = random_griffiths_curvature(3, 4, 2, 0.3, seed=31)
        neg4 = CurvatureTensor(rank=3, dim=4, entries=-t4.entries)
        val4, witness = weak_positivity_min(chern_forms(neg4)[3],
                                            samples=2000, seed=1)
        assert val4 < 0.0
        assert len(witness) == 1


class TestGriffithsGenerator:
    def test_symmetry_exact(self):
        t = random_griffiths_curvature(4, 3, 3, 0.2, seed=28)
        flipped = np.conj(np.transpose(t.entries, (1, 0, 3, 2)))
        assert np.max(np.abs(t.entries - flipped)) == 0.0

    def test_diagonal_case_c3(self):
        # m = 0: R = eps * delta * delta, c3 = C(r,3) eps^3 (3!/(2pi)^3) vol
        eps = 0.4
        t = random_griffiths_curvature(4, 3, 0, eps, seed=29)
        tau = volume_coefficient(chern_forms(t)[3]).real
        want = math.comb(4, 3) * eps ** 3 * 6.0 / TWO_PI ** 3
        assert abs(tau - want) < 1e-14

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            random_griffiths_curvature(3, 3, 2, eps=0.0, seed=0)
        with pytest.raises(ValueError):
            random_griffiths_curvature(3, 3, -1, eps=0.1, seed=0)


def test_validate_partition_padding():
    assert validate_partition((2, 1), rank=3, dim=3) == (2, 1, 0)
    assert validate_partition((1, 1, 1), rank=3, dim=5) == (1, 1, 1)
