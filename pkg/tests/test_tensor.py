"""Tensor-leg plumbing: twist basis, permutations, leg application."""

import cmath
import math

import numpy as np
import pytest

from rslab.errors import BadLeg, DimMismatch
from rslab.tensor import (
    LegSpace,
    apply_two_site,
    basis_T,
    clock_shift,
    embed_two_site,
    kappa,
    leg_operator,
    norm_max,
    permutation_P,
    permutation_two_site,
)

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)


class TestBasis:
    def test_identity_element(self):
        assert np.array_equal(basis_T((0, 0), 3), np.eye(3))

    def test_m2_generators(self):
        q, lam = clock_shift(2)
        assert np.allclose(q, np.diag([-1.0, 1.0]))
        assert np.allclose(lam, SIGMA_1)
        assert np.allclose(basis_T((1, 0), 2), -SIGMA_3)
        assert np.allclose(basis_T((0, 1), 2), SIGMA_1)
        assert np.allclose(basis_T((1, 1), 2), SIGMA_2)

    @pytest.mark.parametrize("m", [2, 3])
    def test_product_rule(self, m):
        rng = range(2 * m)
        for a1 in rng:
            for a2 in rng:
                for b1 in rng:
                    for b2 in rng:
                        lhs = basis_T((a1, a2), m) @ basis_T((b1, b2), m)
                        rhs = kappa((a1, a2), (b1, b2), m) * basis_T((a1 + b1, a2 + b2), m)
                        assert norm_max(lhs - rhs) < 1e-13

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_weyl_commutation(self, m):
        q, lam = clock_shift(m)
        for a1 in range(m):
            for a2 in range(m):
                lhs = np.linalg.matrix_power(lam, a2) @ np.linalg.matrix_power(q, a1)
                rhs = cmath.exp(2j * math.pi * a1 * a2 / m) * (
                    np.linalg.matrix_power(q, a1) @ np.linalg.matrix_power(lam, a2)
                )
                assert norm_max(lhs - rhs) < 1e-13

    @pytest.mark.parametrize("m", [2, 3])
    def test_inverse(self, m):
        for a1 in range(m):
            for a2 in range(m):
                prod = basis_T((a1, a2), m) @ basis_T((-a1, -a2), m)
                assert norm_max(prod - np.eye(m)) < 1e-13


class TestPermutation:
    @pytest.mark.parametrize("m", [2, 3])
    def test_two_forms_agree(self, m):
        direct = permutation_two_site(m)
        twist = sum(
            np.kron(basis_T((a1, a2), m), basis_T((-a1, -a2), m))
            for a1 in range(m)
            for a2 in range(m)
        ) / m
        assert norm_max(direct - twist) < 1e-13

    def test_swaps_basis_states(self):
        sp = LegSpace(3, 2)
        p = permutation_P(1, 2, sp)
        for k in range(3):
            for l in range(3):
                v = np.zeros(9)
                v[3 * k + l] = 1.0
                w = p @ v
                assert w[3 * l + k] == 1.0 and w.sum() == 1.0

    def test_involution_all_pairs(self):
        sp = LegSpace(2, 3)
        for i in range(1, 4):
            for j in range(1, 4):
                if i == j:
                    continue
                p = permutation_P(i, j, sp)
                assert norm_max(p @ p - np.eye(8)) == 0.0

    def test_conjugation_moves_leg(self, rng):
        sp = LegSpace(2, 3)
        op2 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        lhs = permutation_P(2, 3, sp) @ embed_two_site(op2, 1, 2, sp) @ permutation_P(2, 3, sp)
        assert norm_max(lhs - embed_two_site(op2, 1, 3, sp)) < 1e-13

    def test_bad_leg(self):
        sp = LegSpace(2, 3)
        with pytest.raises(BadLeg):
            permutation_P(1, 4, sp)
        with pytest.raises(BadLeg):
            permutation_P(2, 2, sp)


class TestLegApplication:
    def test_identity_leaves_target(self, rng):
        sp = LegSpace(2, 3)
        t = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        out = apply_two_site(np.eye(4, dtype=complex), 1, 3, t, sp)
        assert norm_max(out - t) == 0.0

    def test_two_site_permutation_matches(self):
        sp = LegSpace(2, 3)
        out = apply_two_site(permutation_two_site(2), 1, 2, np.eye(8, dtype=complex), sp)
        assert norm_max(out - permutation_P(1, 2, sp)) == 0.0

    @pytest.mark.parametrize("m,n", [(2, 3), (2, 4), (3, 3)])
    def test_against_dense_embedding(self, rng, m, n):
        sp = LegSpace(m, n)
        for _ in range(20 if (m, n) == (2, 4) else 5):
            op2 = rng.normal(size=(m * m, m * m)) + 1j * rng.normal(size=(m * m, m * m))
            t = rng.normal(size=(sp.dim, sp.dim)) + 1j * rng.normal(size=(sp.dim, sp.dim))
            i, j = (int(v) for v in rng.choice(np.arange(1, n + 1), size=2, replace=False))
            fast = apply_two_site(op2, i, j, t, sp)
            ref = embed_two_site(op2, i, j, sp) @ t
            assert norm_max(fast - ref) < 1e-12 * max(1.0, norm_max(ref))

    def test_vector_target(self, rng):
        sp = LegSpace(2, 3)
        op2 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        out = apply_two_site(op2, 2, 3, v, sp)
        ref = embed_two_site(op2, 2, 3, sp) @ v
        assert norm_max(out - ref) < 1e-13 * norm_max(ref)

    def test_disjoint_embeddings_commute(self, rng):
        sp = LegSpace(2, 4)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        ea = embed_two_site(a, 1, 2, sp)
        eb = embed_two_site(b, 3, 4, sp)
        scale = norm_max(ea @ eb)
        assert norm_max(ea @ eb - eb @ ea) < 1e-12 * scale

    def test_dim_mismatch(self):
        sp = LegSpace(2, 3)
        with pytest.raises(DimMismatch):
            apply_two_site(np.eye(9, dtype=complex), 1, 2, np.eye(8, dtype=complex), sp)
        with pytest.raises(DimMismatch):
            apply_two_site(np.eye(4, dtype=complex), 1, 2, np.eye(7, dtype=complex), sp)
        with pytest.raises(DimMismatch):
            embed_two_site(np.eye(4, dtype=complex), 1, 2, LegSpace(4, 7))

    def test_leg_operator_placement(self):
        sp = LegSpace(2, 3)
        m = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
        full = leg_operator(m, 2, sp)
        ref = np.kron(np.kron(np.eye(2), m), np.eye(2))
        assert norm_max(full - ref) == 0.0
