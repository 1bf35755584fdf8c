"""Subset products, exchange lemmas, identity sums, and the residue program.

The REL13 / REL14 / REL25 tables transcribe the three worked-out example
identities factor-for-factor as printed (leg pair plus a flag marking the
eta-shifted argument).  They are kept verbatim as a guard against drift in
the block-ordering conventions: each table must reproduce the corresponding
alternating subset sum entrywise.
"""

import cmath
import math

import numpy as np
import pytest

from rslab import elliptic as ell
from rslab.errors import BadLeg, OverlappingSubsets
from rslab.identities import (
    F_term,
    F_term_explicit,
    F_total,
    IndexSubset,
    MINUS_FIRST,
    NO_SHIFT,
    ShiftTag,
    eta_quasiperiodicity_residual,
    evaluate_factors,
    lemma_exchange_residual,
    pair_sequence,
    residue_F,
    residue_term,
    rprod,
    scalar_identity_lhs,
    unitarity_product_residual,
)
from rslab.rmatrix import ModelParams, phi
from rslab.sampling import sample_z_vector
from rslab.tensor import LegSpace, identity, norm_max

REL13 = [
    (+1, [(1, 2, 0), (1, 3, 0), (3, 1, 1), (2, 1, 1)]),
    (-1, [(1, 2, 1), (1, 3, 1), (3, 1, 0), (2, 1, 0)]),
    (+1, [(2, 3, 0), (3, 2, 1), (1, 2, 1), (2, 1, 0)]),
    (-1, [(1, 2, 0), (2, 1, 1), (2, 3, 1), (3, 2, 0)]),
    (+1, [(2, 3, 1), (1, 3, 1), (3, 1, 0), (3, 2, 0)]),
    (-1, [(2, 3, 0), (1, 3, 0), (3, 1, 1), (3, 2, 1)]),
]

REL14 = [
    (+1, [(1, 2, 1), (1, 3, 1), (1, 4, 1), (4, 1, 0), (3, 1, 0), (2, 1, 0)]),
    (-1, [(1, 2, 0), (1, 3, 0), (1, 4, 0), (4, 1, 1), (3, 1, 1), (2, 1, 1)]),
    (+1, [(1, 2, 0), (2, 1, 1), (2, 3, 1), (2, 4, 1), (4, 2, 0), (3, 2, 0)]),
    (-1, [(2, 3, 0), (2, 4, 0), (4, 2, 1), (3, 2, 1), (1, 2, 1), (2, 1, 0)]),
    (+1, [(2, 3, 0), (1, 3, 0), (3, 1, 1), (3, 2, 1), (3, 4, 1), (4, 3, 0)]),
    (-1, [(3, 4, 0), (4, 3, 1), (2, 3, 1), (1, 3, 1), (3, 1, 0), (3, 2, 0)]),
    (+1, [(3, 4, 0), (2, 4, 0), (1, 4, 0), (4, 1, 1), (4, 2, 1), (4, 3, 1)]),
    (-1, [(3, 4, 1), (2, 4, 1), (1, 4, 1), (4, 1, 0), (4, 2, 0), (4, 3, 0)]),
]

REL25 = [
    (+1, [(2, 3, 1), (2, 4, 1), (2, 5, 1), (1, 3, 1), (1, 4, 1), (1, 5, 1),
          (5, 1, 0), (4, 1, 0), (3, 1, 0), (5, 2, 0), (4, 2, 0), (3, 2, 0)]),
    (-1, [(2, 3, 0), (2, 4, 0), (2, 5, 0), (1, 3, 0), (1, 4, 0), (1, 5, 0),
          (5, 1, 1), (4, 1, 1), (3, 1, 1), (5, 2, 1), (4, 2, 1), (3, 2, 1)]),
    (+1, [(2, 3, 0), (3, 2, 1), (3, 4, 1), (3, 5, 1), (1, 2, 1), (1, 4, 1),
          (1, 5, 1), (5, 1, 0), (4, 1, 0), (2, 1, 0), (5, 3, 0), (4, 3, 0)]),
    (-1, [(3, 4, 0), (3, 5, 0), (1, 2, 0), (1, 4, 0), (1, 5, 0), (5, 1, 1),
          (4, 1, 1), (2, 1, 1), (5, 3, 1), (4, 3, 1), (2, 3, 1), (3, 2, 0)]),
    (+1, [(3, 4, 0), (2, 4, 0), (4, 2, 1), (4, 3, 1), (4, 5, 1), (1, 2, 1),
          (1, 3, 1), (1, 5, 1), (5, 1, 0), (3, 1, 0), (2, 1, 0), (5, 4, 0)]),
    (-1, [(4, 5, 0), (1, 2, 0), (1, 3, 0), (1, 5, 0), (5, 1, 1), (3, 1, 1),
          (2, 1, 1), (5, 4, 1), (3, 4, 1), (2, 4, 1), (4, 2, 0), (4, 3, 0)]),
    (+1, [(4, 5, 0), (3, 5, 0), (2, 5, 0), (5, 2, 1), (5, 3, 1), (5, 4, 1),
          (1, 2, 1), (1, 3, 1), (1, 4, 1), (4, 1, 0), (3, 1, 0), (2, 1, 0)]),
    (-1, [(1, 2, 0), (1, 3, 0), (1, 4, 0), (4, 1, 1), (3, 1, 1), (2, 1, 1),
          (4, 5, 1), (3, 5, 1), (2, 5, 1), (5, 2, 0), (5, 3, 0), (5, 4, 0)]),
    (+1, [(1, 2, 0), (1, 3, 0), (3, 1, 1), (2, 1, 1), (3, 4, 1), (3, 5, 1),
          (2, 4, 1), (2, 5, 1), (5, 2, 0), (4, 2, 0), (5, 3, 0), (4, 3, 0)]),
    (-1, [(3, 4, 0), (3, 5, 0), (2, 4, 0), (2, 5, 0), (5, 2, 1), (4, 2, 1),
          (5, 3, 1), (4, 3, 1), (1, 2, 1), (1, 3, 1), (3, 1, 0), (2, 1, 0)]),
    (+1, [(1, 2, 0), (3, 4, 0), (1, 4, 0), (4, 1, 1), (4, 3, 1), (2, 1, 1),
          (4, 5, 1), (2, 3, 1), (2, 5, 1), (5, 2, 0), (3, 2, 0), (5, 4, 0)]),
    (-1, [(4, 5, 0), (2, 3, 0), (2, 5, 0), (5, 2, 1), (3, 2, 1), (5, 4, 1),
          (1, 2, 1), (3, 4, 1), (1, 4, 1), (4, 1, 0), (4, 3, 0), (2, 1, 0)]),
    (+1, [(1, 2, 0), (4, 5, 0), (3, 5, 0), (1, 5, 0), (5, 1, 1), (5, 3, 1),
          (5, 4, 1), (2, 1, 1), (2, 3, 1), (2, 4, 1), (4, 2, 0), (3, 2, 0)]),
    (-1, [(2, 3, 0), (2, 4, 0), (4, 2, 1), (3, 2, 1), (1, 2, 1), (4, 5, 1),
          (3, 5, 1), (1, 5, 1), (5, 1, 0), (5, 3, 0), (5, 4, 0), (2, 1, 0)]),
    (+1, [(2, 3, 0), (1, 3, 0), (2, 4, 0), (1, 4, 0), (4, 1, 1), (4, 2, 1),
          (3, 1, 1), (3, 2, 1), (4, 5, 1), (3, 5, 1), (5, 3, 0), (5, 4, 0)]),
    (-1, [(4, 5, 0), (3, 5, 0), (5, 3, 1), (5, 4, 1), (2, 3, 1), (1, 3, 1),
          (2, 4, 1), (1, 4, 1), (4, 1, 0), (4, 2, 0), (3, 1, 0), (3, 2, 0)]),
    (+1, [(2, 3, 0), (1, 3, 0), (4, 5, 0), (2, 5, 0), (1, 5, 0), (5, 1, 1),
          (5, 2, 1), (5, 4, 1), (3, 1, 1), (3, 2, 1), (3, 4, 1), (4, 3, 0)]),
    (-1, [(3, 4, 0), (4, 3, 1), (2, 3, 1), (1, 3, 1), (4, 5, 1), (2, 5, 1),
          (1, 5, 1), (5, 1, 0), (5, 2, 0), (5, 4, 0), (3, 1, 0), (3, 2, 0)]),
    (+1, [(3, 4, 0), (2, 4, 0), (1, 4, 0), (3, 5, 0), (2, 5, 0), (1, 5, 0),
          (5, 1, 1), (5, 2, 1), (5, 3, 1), (4, 1, 1), (4, 2, 1), (4, 3, 1)]),
    (-1, [(3, 4, 1), (2, 4, 1), (1, 4, 1), (3, 5, 1), (2, 5, 1), (1, 5, 1),
          (5, 1, 0), (5, 2, 0), (5, 3, 0), (4, 1, 0), (4, 2, 0), (4, 3, 0)]),
]


def eval_literal(table, z, params, sp):
    total = np.zeros((sp.dim, sp.dim), dtype=complex)
    scale = 0.0
    for sign, factors in table:
        term = evaluate_factors(factors, z, params, sp)
        scale = max(scale, norm_max(term))
        total += sign * term
    return total, scale


def draw_z(params, rng, extra=()):
    offs = (0.0, -params.eta) + tuple(extra)
    return sample_z_vector(rng, params.tau, params.pole_guard, params.N, offs)


class TestIndexSubset:
    def test_validation(self):
        with pytest.raises(BadLeg):
            IndexSubset((2, 1))
        with pytest.raises(BadLeg):
            IndexSubset((1, 1))
        with pytest.raises(BadLeg):
            IndexSubset((0, 1))

    def test_complement(self):
        s = IndexSubset((1, 3))
        assert s.complement(5).elements == (2, 4, 5)
        assert s.complement((1, 2, 3, 4)).elements == (2, 4)

    def test_overlap_error(self, params_m2, rng):
        z = np.array([0.1, 0.4, 0.7], dtype=complex)
        with pytest.raises(OverlappingSubsets):
            rprod((1, 2), (2, 3), "less", NO_SHIFT, False, params_m2, z)


class TestOrderings:
    def test_worked_example_sequence(self):
        # two low legs against three high legs: blocks by the high index,
        # descending low index inside each block
        seq = pair_sequence(IndexSubset((1, 2)), IndexSubset((3, 4, 5)), "less")
        assert seq == [(2, 3), (1, 3), (2, 4), (1, 4), (2, 5), (1, 5)]
        alt = pair_sequence(IndexSubset((1, 2)), IndexSubset((3, 4, 5)), "less", alt_order=True)
        assert alt == [(2, 3), (2, 4), (2, 5), (1, 3), (1, 4), (1, 5)]

    def test_empty_product_convention(self, rng):
        p = ModelParams(M=2, N=5)
        z = draw_z(p, rng)
        out = rprod((3, 4, 5), (1, 2), "less", NO_SHIFT, False, p, z)
        assert norm_max(out - identity(32)) == 0.0

    def test_block_orders_agree(self, rng):
        p = ModelParams(M=2, N=5, samples=4)
        legs = np.arange(1, 6)
        sp = LegSpace(2, 5)
        for _ in range(30):
            z = draw_z(p, rng)
            picks = rng.permutation(legs)
            ni = int(rng.integers(1, 4))
            nj = int(rng.integers(1, 5 - ni + 1))
            I, J = picks[:ni], picks[ni : ni + nj]
            for variant in ("less", "greater"):
                a = rprod(I, J, variant, NO_SHIFT, False, p, z, sp)
                b = rprod(I, J, variant, NO_SHIFT, False, p, z, sp, alt_order=True)
                assert norm_max(a - b) < 1e-12 * max(1.0, norm_max(a))

    def test_shift_tag_moves_arguments(self, rng):
        p = ModelParams(M=2, N=3)
        z = draw_z(p, rng)
        shifted = rprod((1,), (2, 3), "less", MINUS_FIRST, False, p, z)
        plain = rprod((1,), (2, 3), "less", NO_SHIFT, False, p, z - np.array([p.eta, 0, 0]))
        assert norm_max(shifted - plain) < 1e-12 * norm_max(plain)


class TestExchangeLemma:
    def test_empty_subset_trivial(self, rng):
        p = ModelParams(M=2, N=4, samples=4)
        res = lemma_exchange_residual((), (1,), (2, 3), p, rng)
        assert res == 0.0

    def test_single_elements_is_exchange_relation(self, rng):
        p = ModelParams(M=2, N=3, samples=6)
        assert lemma_exchange_residual((3,), (2,), (1,), p, rng) < 1e-11

    def test_interleaved_configurations(self, rng):
        p = ModelParams(M=2, N=6, samples=4)
        configs = [
            ((5, 6), (3, 4), (1, 2)),   # stacked low-to-high
            ((2, 5), (3,), (1, 6)),     # interleaved
            ((1, 4), (2, 6), (3, 5)),
        ]
        for a, b, c in configs:
            assert lemma_exchange_residual(a, b, c, p, rng) < 1e-10


class TestUnitarityProducts:
    def test_random_subsets(self, rng):
        p = ModelParams(M=2, N=6, samples=4)
        assert unitarity_product_residual((1, 4), (2, 3, 5), p, rng) < 1e-10

    def test_m1_reduces_to_phi_products(self, rng):
        p = ModelParams(M=1, N=4, samples=4)
        assert unitarity_product_residual((1, 3), (2, 4), p, rng) < 1e-11


class TestIdentitySum:
    def test_full_subset_term_is_identity(self, rng):
        p = ModelParams(M=2, N=3)
        z = draw_z(p, rng)
        for sign in ("plus", "minus"):
            t = F_term((1, 2, 3), sign, p, z)
            assert norm_max(t - identity(8)) == 0.0

    def test_m1_scalar_products(self, rng):
        p = ModelParams(M=1, N=4)
        z = draw_z(p, rng)
        I = (1, 3)
        t_minus = F_term(I, "minus", p, z)[0, 0]
        ref = 1.0 + 0j
        for i in I:
            for j in (2, 4):
                ref *= phi(complex(z[j - 1] - z[i - 1]), p) * phi(
                    complex(z[i - 1] - z[j - 1] - p.eta), p
                )
        assert abs(t_minus - ref) < 1e-12 * abs(ref)

    def test_explicit_equals_compact(self, rng):
        p = ModelParams(M=2, N=5)
        z = draw_z(p, rng)
        sp = LegSpace(2, 5)
        for elems in [(1,), (3,), (1, 4), (2, 5), (1, 2, 3), (2, 4, 5), (1, 2, 3, 4)]:
            for sign in ("plus", "minus"):
                a = F_term(elems, sign, p, z, space=sp)
                b = F_term_explicit(elems, sign, p, z, space=sp)
                assert norm_max(a - b) < 1e-11 * norm_max(a)

    @pytest.mark.parametrize("m,n", [(1, 3), (2, 3), (2, 4), (3, 3)])
    def test_total_vanishes(self, rng, m, n):
        p = ModelParams(M=m, N=n)
        for _ in range(3):
            z = draw_z(p, rng)
            for k in range(1, n + 1):
                total, scale = F_total(k, p, z)
                assert norm_max(total) < 1e-10 * scale

    def test_total_explicit_path(self, rng):
        p = ModelParams(M=2, N=4)
        z = draw_z(p, rng)
        a, sa = F_total(2, p, z)
        b, _ = F_total(2, p, z, explicit=True)
        assert norm_max(a - b) < 1e-11 * sa

    def test_m1_total_equals_scalar_identity(self, rng):
        p = ModelParams(M=1, N=4)
        z = draw_z(p, rng)
        for k in (1, 2, 3):
            total, _ = F_total(k, p, z)
            val, scale = scalar_identity_lhs(k, 4, z, p)
            assert abs(total[0, 0] - val) < 1e-12 * scale


class TestTranscribedExamples:
    def test_first_subset_term_matches_table(self, rng):
        # first two printed products of the three-leg identity are the
        # I = {1} pair of terms
        p = ModelParams(M=2, N=3)
        z = draw_z(p, rng)
        sp = LegSpace(2, 3)
        t_plus = evaluate_factors(REL13[0][1], z, p, sp)
        t_minus = evaluate_factors(REL13[1][1], z, p, sp)
        assert norm_max(t_plus - F_term((1,), "plus", p, z)) < 1e-12 * norm_max(t_plus)
        assert norm_max(t_minus - F_term((1,), "minus", p, z)) < 1e-12 * norm_max(t_minus)

    def test_rel13(self, rng):
        p = ModelParams(M=2, N=3)
        sp = LegSpace(2, 3)
        for _ in range(5):
            z = draw_z(p, rng)
            lit, scale = eval_literal(REL13, z, p, sp)
            total, _ = F_total(1, p, z)
            assert norm_max(lit) < 1e-9 * scale
            assert norm_max(lit + total) < 1e-11 * scale  # printed orientation

    def test_rel14(self, rng):
        p = ModelParams(M=2, N=4)
        sp = LegSpace(2, 4)
        for _ in range(3):
            z = draw_z(p, rng)
            lit, scale = eval_literal(REL14, z, p, sp)
            total, _ = F_total(1, p, z)
            assert norm_max(lit) < 1e-9 * scale
            assert norm_max(lit - total) < 1e-11 * scale

    def test_rel25(self, rng):
        p = ModelParams(M=2, N=5)
        sp = LegSpace(2, 5)
        for _ in range(3):
            z = draw_z(p, rng)
            lit, scale = eval_literal(REL25, z, p, sp)
            total, _ = F_total(2, p, z)
            assert norm_max(lit) < 1e-9 * scale
            assert norm_max(lit - total) < 1e-11 * scale


class TestScalarIdentity:
    def test_n2_exact_cancellation(self, rng):
        p = ModelParams(M=1, N=2)
        z = draw_z(p, rng)
        val, _ = scalar_identity_lhs(1, 2, z, p)
        assert abs(val) < 1e-14

    def test_seeded_points(self, rng):
        p = ModelParams(M=1, N=4)
        for _ in range(10):
            z = draw_z(p, rng)
            val, scale = scalar_identity_lhs(2, 4, z, p)
            assert abs(val) < 1e-10 * scale

    def test_trig_variant(self, rng):
        p = ModelParams(M=1, N=4)
        trig = lambda w: ell.phi_trig(p.hbar, w)
        for _ in range(5):
            z = np.asarray(rng.uniform(0.05, 0.95, 4) + 1j * rng.uniform(0.01, 0.05, 4))
            val, scale = scalar_identity_lhs(2, 4, z, p, phi_func=trig)
            assert abs(val) < 1e-10 * scale


class TestResidueProgram:
    def test_per_term_both_signs_and_orientations(self, rng):
        p = ModelParams(M=2, N=5)
        z = draw_z(p, rng, extra=(p.eta, -2 * p.eta, 2 * p.eta))
        cases = [
            ((2, 3), "plus", 1, 3),
            ((1, 4), "minus", 1, 3),
            ((2, 4), "plus", 5, 2),   # a > b
            ((3, 5), "minus", 5, 2),
        ]
        for I, sign, a, b in cases:
            lhs, rhs = residue_term(I, sign, a, b, p, z)
            assert norm_max(lhs - rhs) < 1e-11 * norm_max(lhs), (I, sign, a, b)

    def test_wrong_collision_rejected(self, rng):
        p = ModelParams(M=2, N=4)
        z = draw_z(p, rng)
        with pytest.raises(BadLeg):
            residue_term((2, 3), "plus", 1, 4, p, z)

    def test_sum_factorization(self, rng):
        p = ModelParams(M=2, N=5)
        z = draw_z(p, rng, extra=(p.eta, -2 * p.eta, 2 * p.eta))
        for a, b, k in [(1, 3, 2), (4, 2, 2), (2, 5, 3)]:
            lhs, rhs, scale = residue_F(a, b, k, p, z)
            assert norm_max(lhs - rhs) < 1e-9 * scale
            assert norm_max(lhs) < 1e-9 * scale

    def test_k1_reduces_to_zero(self, rng):
        p = ModelParams(M=2, N=4)
        z = draw_z(p, rng, extra=(p.eta, -2 * p.eta, 2 * p.eta))
        lhs, rhs, scale = residue_F(2, 4, 1, p, z)
        assert norm_max(rhs) == 0.0
        assert norm_max(lhs) < 1e-10 * scale

    @pytest.mark.parametrize("m_idx", [(0, 1), (1, 0), (1, 1)])
    def test_lattice_shifted_collision(self, rng, m_idx):
        p = ModelParams(M=2, N=4)
        z = draw_z(p, rng, extra=(p.eta, -2 * p.eta, 2 * p.eta))
        lhs, rhs = residue_term((2, 3), "plus", 1, 3, p, z, omega_index=m_idx)
        assert norm_max(lhs - rhs) < 1e-9 * norm_max(lhs)


class TestEtaQuasiPeriodicity:
    def test_k_equals_n_trivial(self, rng):
        p = ModelParams(M=2, N=3, samples=4)
        assert eta_quasiperiodicity_residual(3, p, rng) < 1e-12

    def test_small_orders(self, rng):
        p = ModelParams(M=2, N=3, samples=4)
        assert eta_quasiperiodicity_residual(1, p, rng) < 1e-9

    def test_m1_exponent_counts_shifted_factors(self, rng):
        # rank one: each term is a product with exactly k(N-k) eta-shifted
        # phi factors, so the coupling phase exponent is forced
        p = ModelParams(M=1, N=4)
        z = draw_z(p, rng)
        k = 1
        base = F_term((2,), "plus", p, z)[0, 0]
        shifted = F_term((2,), "plus", p.with_(eta=p.eta + p.tau), z)[0, 0]
        phase = cmath.exp(2j * math.pi * k * (4 - k) * p.hbar)
        assert abs(shifted - phase * base) < 1e-11 * abs(base)

    def test_wrong_exponent_fails(self, rng):
        p = ModelParams(M=2, N=3)
        z = draw_z(p, rng)
        base = F_term((1,), "plus", p, z)
        shifted = F_term((1,), "plus", p.with_(eta=p.eta + 2 * p.tau), z)
        good = cmath.exp(2j * math.pi * 1 * 2 * p.hbar)
        bad = cmath.exp(2j * math.pi * 3 * p.hbar)
        assert norm_max(shifted - good * base) < 1e-9 * norm_max(base)
        assert norm_max(shifted - bad * base) > 1e-3 * norm_max(base)
