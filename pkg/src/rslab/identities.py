"""Subset-ordered products of R-matrices and the exchange identity sums.

For disjoint leg subsets I, J the block-ordered products are

    rprod(I, J, "less")    =  product over pairs i in I, j in J with i < j,
                              grouped by ascending j, factors within a block
                              ordered by descending i;
    rprod(I, J, "greater") =  product over pairs with i > j, grouped by
                              descending i, ascending j within a block;

each factor being R_{ij}(z_i - z_j) acting on legs (i, j).  A shift tag
subtracts eta from every coordinate of the tagged subset.  Both products
admit an equivalent reordering (blocks swapped to the other index), which is
exposed for cross-checking.

On top of these sit the identity-sum terms

    F^+_I = rprod(I,Ic) . rprod'(Ic-,I) . rprod(Ic-,I) . rprod'(I,Ic)
    F^-_I = rprod(Ic,I) . rprod'(I-,Ic) . rprod(I-,Ic) . rprod'(Ic,I)

whose alternating sum over all |I| = k vanishes for the elliptic R-matrix,
and the residue factorization that reduces the (k, N) sum at the collision
z_a = z_b + eta to the (k-1, N-2) sum conjugated by explicit R-chains.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import cmath
import numpy as np

from . import elliptic as ell
from .errors import BadLeg, OverlappingSubsets
from .rmatrix import TWO_PI_I, ModelParams, phi, r_two_site, rbar_two_site
from .sampling import sample_z_vector
from .tensor import (
    CMatrix,
    LegSpace,
    apply_two_site,
    basis_T,
    identity,
    norm_max,
    permutation_two_site,
)


@dataclass(frozen=True)
class IndexSubset:
    """Strictly increasing tuple of 1-based leg indices."""

    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        elems = tuple(self.elements)
        if list(elems) != sorted(set(elems)):
            raise BadLeg(f"subset must be strictly increasing, got {elems}")
        if elems and elems[0] < 1:
            raise BadLeg("leg indices are 1-based")
        object.__setattr__(self, "elements", elems)

    @classmethod
    def of(cls, elems) -> "IndexSubset":
        return cls(tuple(sorted(set(int(e) for e in elems))))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, leg: int) -> bool:
        return leg in self.elements

    def complement(self, universe) -> "IndexSubset":
        uni = _as_universe(universe)
        if not set(self.elements) <= set(uni):
            raise BadLeg(f"{self.elements} not inside universe {uni}")
        return IndexSubset(tuple(l for l in uni if l not in self.elements))

    def union(self, other: "IndexSubset") -> "IndexSubset":
        return IndexSubset.of(self.elements + other.elements)

    def isdisjoint(self, other: "IndexSubset") -> bool:
        return not set(self.elements) & set(other.elements)


@dataclass(frozen=True)
class ShiftTag:
    """Marks which side of a subset product has its coordinates moved by -eta."""

    minus_first: bool = False
    minus_second: bool = False


NO_SHIFT = ShiftTag()
MINUS_FIRST = ShiftTag(minus_first=True)
MINUS_SECOND = ShiftTag(minus_second=True)


def _as_universe(universe) -> tuple[int, ...]:
    if isinstance(universe, int):
        return tuple(range(1, universe + 1))
    return tuple(universe)


def _as_subset(s) -> IndexSubset:
    return s if isinstance(s, IndexSubset) else IndexSubset.of(s)


def _require_disjoint(*subsets: IndexSubset) -> None:
    for a, b in combinations(subsets, 2):
        if not a.isdisjoint(b):
            raise OverlappingSubsets(f"{a.elements} overlaps {b.elements}")


# ---------------------------------------------------------------------------
# factor sequences
# ---------------------------------------------------------------------------
# A factor is (i, j, steps) for R_{ij}(z_i - z_j - steps*eta) or
# ("mat", i, j, M2) for an explicit two-site matrix on legs (i, j).


def pair_sequence(I: IndexSubset, J: IndexSubset, variant: str, alt_order: bool = False):
    """Left-to-right (i, j) pairs of a subset product."""
    ii, jj = I.elements, J.elements
    if variant == "less":
        if not alt_order:
            return [(i, j) for j in jj for i in reversed([x for x in ii if x < j])]
        return [(i, j) for i in reversed(ii) for j in [y for y in jj if y > i]]
    if variant == "greater":
        if not alt_order:
            return [(i, j) for i in reversed(ii) for j in [y for y in jj if y < i]]
        return [(i, j) for j in jj for i in reversed([x for x in ii if x > j])]
    raise ValueError(f"variant must be 'less' or 'greater', got {variant!r}")


def _subset_factors(I, J, variant, shift: ShiftTag, alt_order=False):
    steps = (1 if shift.minus_first else 0) - (1 if shift.minus_second else 0)
    return [(i, j, steps) for i, j in pair_sequence(I, J, variant, alt_order)]


def evaluate_factors(
    factors,
    z: np.ndarray,
    params: ModelParams,
    space: LegSpace,
    normalized: bool = False,
    right: CMatrix | None = None,
) -> CMatrix:
    """Fold a factor list into a matrix by right-to-left leg application."""
    acc = identity(space.dim) if right is None else right
    build = rbar_two_site if normalized else r_two_site
    for f in reversed(factors):
        if f[0] == "mat":
            _, i, j, m2 = f
            acc = apply_two_site(m2, i, j, acc, space)
        else:
            i, j, steps = f
            arg = complex(z[i - 1] - z[j - 1] - steps * params.eta)
            acc = apply_two_site(build(arg, params), i, j, acc, space)
    return acc


def rprod(
    I,
    J,
    variant: str,
    shift: ShiftTag,
    normalized: bool,
    params: ModelParams,
    z: np.ndarray,
    space: LegSpace | None = None,
    alt_order: bool = False,
) -> CMatrix:
    """Materialize one block-ordered subset product on the full leg space."""
    I, J = _as_subset(I), _as_subset(J)
    _require_disjoint(I, J)
    sp = space or LegSpace(params.M, len(z))
    factors = _subset_factors(I, J, variant, shift, alt_order)
    return evaluate_factors(factors, z, params, sp, normalized=normalized)


# ---------------------------------------------------------------------------
# exchange lemma and unitarity products
# ---------------------------------------------------------------------------

def lemma_exchange_residual(A, B, C, params: ModelParams, rng: np.random.Generator) -> float:
    """Residual of both block-exchange identities for disjoint A, B, C."""
    A, B, C = _as_subset(A), _as_subset(B), _as_subset(C)
    _require_disjoint(A, B, C)
    sp = params.space()
    res = 0.0
    for _ in range(max(2, params.samples // 5)):
        z = sample_z_vector(rng, params.tau, params.pole_guard, params.N, (0.0,))
        lhs = rprod(C, A.union(B), "less", NO_SHIFT, False, params, z, sp)
        lhs = lhs @ rprod(B, A, "less", NO_SHIFT, False, params, z, sp)
        rhs = rprod(B.union(C), A, "less", NO_SHIFT, False, params, z, sp)
        rhs = rhs @ rprod(C, B, "less", NO_SHIFT, False, params, z, sp)
        res = max(res, norm_max(lhs - rhs) / max(norm_max(lhs), norm_max(rhs)))

        lhs2 = rprod(A, B, "greater", NO_SHIFT, False, params, z, sp)
        lhs2 = lhs2 @ rprod(A.union(B), C, "greater", NO_SHIFT, False, params, z, sp)
        rhs2 = rprod(B, C, "greater", NO_SHIFT, False, params, z, sp)
        rhs2 = rhs2 @ rprod(A, B.union(C), "greater", NO_SHIFT, False, params, z, sp)
        res = max(res, norm_max(lhs2 - rhs2) / max(norm_max(lhs2), norm_max(rhs2)))
    return res


def unitarity_product_residual(I, J, params: ModelParams, rng: np.random.Generator) -> float:
    """Residual of the three pairing identities between opposite-order products."""
    I, J = _as_subset(I), _as_subset(J)
    _require_disjoint(I, J)
    sp = params.space()
    eye = identity(sp.dim)
    res = 0.0
    for _ in range(max(2, params.samples // 5)):
        z = sample_z_vector(
            rng, params.tau, params.pole_guard, params.N, (0.0, params.hbar, -params.hbar)
        )
        lhs = rprod(I, J, "less", NO_SHIFT, False, params, z, sp)
        lhs = lhs @ rprod(J, I, "greater", NO_SHIFT, False, params, z, sp)
        fac = 1.0 + 0j
        for i in I:
            for j in J:
                if i < j:
                    d = complex(z[i - 1] - z[j - 1])
                    fac *= phi(d, params) * phi(-d, params)
        rhs = fac * eye
        res = max(res, norm_max(lhs - rhs) / max(norm_max(lhs), norm_max(rhs)))

        lhs = rprod(I, J, "greater", NO_SHIFT, False, params, z, sp)
        lhs = lhs @ rprod(J, I, "less", NO_SHIFT, False, params, z, sp)
        fac = 1.0 + 0j
        for i in I:
            for j in J:
                if i > j:
                    d = complex(z[i - 1] - z[j - 1])
                    fac *= phi(d, params) * phi(-d, params)
        rhs = fac * eye
        res = max(res, norm_max(lhs - rhs) / max(norm_max(lhs), norm_max(rhs)))

        a = rprod(I, J, "less", NO_SHIFT, True, params, z, sp)
        b = rprod(J, I, "greater", NO_SHIFT, True, params, z, sp)
        res = max(res, norm_max(a @ b - eye), norm_max(b @ a - eye))
    return res


# ---------------------------------------------------------------------------
# identity-sum terms
# ---------------------------------------------------------------------------

def _f_factors(I: IndexSubset, sign: str, universe) -> list:
    uni = _as_universe(universe)
    comp = I.complement(uni)
    if sign == "plus":
        return (
            _subset_factors(I, comp, "less", NO_SHIFT)
            + _subset_factors(comp, I, "greater", MINUS_FIRST)
            + _subset_factors(comp, I, "less", MINUS_FIRST)
            + _subset_factors(I, comp, "greater", NO_SHIFT)
        )
    if sign == "minus":
        return (
            _subset_factors(comp, I, "less", NO_SHIFT)
            + _subset_factors(I, comp, "greater", MINUS_FIRST)
            + _subset_factors(I, comp, "less", MINUS_FIRST)
            + _subset_factors(comp, I, "greater", NO_SHIFT)
        )
    raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")


def F_term(
    I,
    sign: str,
    params: ModelParams,
    z: np.ndarray,
    universe=None,
    space: LegSpace | None = None,
) -> CMatrix:
    """One term of the identity sum, built from unnormalized R factors."""
    I = _as_subset(I)
    uni = _as_universe(universe if universe is not None else len(z))
    sp = space or LegSpace(params.M, len(z))
    return evaluate_factors(_f_factors(I, sign, uni), z, params, sp)


def _f_factors_explicit(I: IndexSubset, sign: str, universe) -> list:
    """Same terms written as the fully ordered nested products."""
    uni = _as_universe(universe)
    ii = I.elements
    k = len(ii)
    comp = [l for l in uni if l not in ii]
    out: list = []
    if sign == "plus":
        for d in range(k - 1, -1, -1):
            out += [(ii[d], l, 0) for l in uni if l > ii[d] and l not in ii]
        for d in range(k):
            out += [(j, ii[d], 1) for j in reversed(comp)]
        for d in range(k - 1, -1, -1):
            out += [(ii[d], m, 0) for m in uni if m < ii[d] and m not in ii]
    else:
        for d in range(k):
            out += [(m, ii[d], 0) for m in reversed([x for x in comp if x < ii[d]])]
        for d in range(k - 1, -1, -1):
            out += [(ii[d], j, 1) for j in comp]
        for d in range(k):
            out += [(l, ii[d], 0) for l in reversed([x for x in comp if x > ii[d]])]
    return out


def F_term_explicit(I, sign, params, z, universe=None, space=None) -> CMatrix:
    I = _as_subset(I)
    uni = _as_universe(universe if universe is not None else len(z))
    sp = space or LegSpace(params.M, len(z))
    return evaluate_factors(_f_factors_explicit(I, sign, uni), z, params, sp)


def F_total(
    k: int,
    params: ModelParams,
    z: np.ndarray,
    universe=None,
    space: LegSpace | None = None,
    explicit: bool = False,
) -> tuple[CMatrix, float]:
    """Alternating identity sum over all size-k subsets and the term scale.

    Returns (sum of F^-_I - F^+_I, max term magnitude); the first entry is
    the quantity asserted to vanish.
    """
    uni = _as_universe(universe if universe is not None else len(z))
    if not 1 <= k <= len(uni):
        raise BadLeg(f"order k={k} outside 1..{len(uni)}")
    sp = space or LegSpace(params.M, len(z))
    term_fn = F_term_explicit if explicit else F_term
    total = np.zeros((sp.dim, sp.dim), dtype=complex)
    scale = 0.0
    for elems in combinations(uni, k):
        I = IndexSubset(elems)
        minus = term_fn(I, "minus", params, z, uni, sp)
        plus = term_fn(I, "plus", params, z, uni, sp)
        scale = max(scale, norm_max(minus), norm_max(plus))
        total += minus - plus
    return total, scale


def scalar_identity_lhs(k: int, n: int, z: np.ndarray, params: ModelParams, phi_func=None) -> tuple[complex, float]:
    """Scalar alternating sum over size-k subsets of phi-products.

    phi_func(w) defaults to the elliptic phi(hbar, w); pass a trigonometric
    or rational variant to check the degenerate identities.  Returns
    (sum, max term magnitude).
    """
    if phi_func is None:
        phi_func = lambda w: phi(w, params)
    total = 0.0 + 0j
    scale = 0.0
    eta = params.eta
    for elems in combinations(range(1, n + 1), k):
        inside = set(elems)
        t1 = t2 = 1.0 + 0j
        for i in inside:
            for j in range(1, n + 1):
                if j in inside:
                    continue
                di = complex(z[i - 1] - z[j - 1])
                t1 *= phi_func(-di) * phi_func(di - eta)
                t2 *= phi_func(di) * phi_func(-di - eta)
        scale = max(scale, abs(t1), abs(t2))
        total += t1 - t2
    return total, scale


# ---------------------------------------------------------------------------
# residue program
# ---------------------------------------------------------------------------

def _prefactor_A(a: int, b: int, universe) -> list:
    uni = _as_universe(universe)
    chain = [(b, l, 0) for l in uni if l > b]
    chain += [(m, a, 0) for m in reversed([x for x in uni if x < a and x != b])]
    return chain


def _prefactor_B(a: int, b: int, universe) -> list:
    uni = _as_universe(universe)
    chain = [(b, j, 0) for j in uni if j < b and j != a]
    chain += [(i, a, 0) for i in reversed([x for x in uni if x > a])]
    return chain


def _collision_point(z: np.ndarray, a: int, b: int, params: ModelParams, omega: complex = 0.0) -> np.ndarray:
    za = np.array(z, dtype=complex)
    za[a - 1] = za[b - 1] + params.eta - omega
    return za


def _twisted_swap(params: ModelParams, m: tuple[int, int], first_is_a: bool) -> CMatrix:
    """Two-site residue of the eta-shifted factor at a lattice-shifted
    collision: the permutation conjugated by the twist matrix on the shifted
    leg, times the quasi-period phase."""
    t = basis_T(m, params.M)
    eye = np.eye(params.M, dtype=complex)
    ta = np.kron(t, eye) if first_is_a else np.kron(eye, t)
    phase = cmath.exp(TWO_PI_I * m[1] * params.hbar / params.M)
    return phase * ta @ permutation_two_site(params.M) @ np.linalg.inv(ta)


def residue_term(
    I,
    sign: str,
    a: int,
    b: int,
    params: ModelParams,
    z: np.ndarray,
    universe=None,
    omega_index: tuple[int, int] = (0, 0),
) -> tuple[CMatrix, CMatrix]:
    """(lhs, rhs) of the single-term residue factorization at z_a = z_b + eta
    (shifted by a lattice fraction when omega_index is nonzero).

    lhs replaces the unique eta-shifted singular factor with its exact
    two-site residue and restricts; rhs is the explicit chain conjugation of
    the reduced-system term.
    """
    I = _as_subset(I)
    uni = _as_universe(universe if universe is not None else len(z))
    if a == b or a not in uni or b not in uni:
        raise BadLeg(f"need distinct legs a, b inside the universe, got {a}, {b}")
    if sign == "plus":
        if b not in I or a in I:
            raise BadLeg("the '+' term has its collision pole only for b in I, a not in I")
        reduced_I = IndexSubset(tuple(x for x in I if x != b))
        singular = (a, b, 1)
    elif sign == "minus":
        if a not in I or b in I:
            raise BadLeg("the '-' term has its collision pole only for a in I, b not in I")
        reduced_I = IndexSubset(tuple(x for x in I if x != a))
        singular = (a, b, 1)
    else:
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")

    sp = LegSpace(params.M, len(z))
    m1, m2 = omega_index
    omega = m1 + m2 * params.tau
    z_at = _collision_point(z, a, b, params, omega)

    factors = _f_factors(I, sign, uni)
    count = factors.count(singular)
    if count != 1:
        raise BadLeg(f"expected exactly one singular factor, found {count}")
    if omega == 0.0:
        repl = ("mat", a, b, permutation_two_site(params.M))
    else:
        repl = ("mat", a, b, _twisted_swap(params, (m1, m2), first_is_a=True))
    factors = [repl if f == singular else f for f in factors]
    lhs = evaluate_factors(factors, z_at, params, sp)

    reduced_uni = tuple(l for l in uni if l not in (a, b))
    z_plain = _collision_point(z, a, b, params, 0.0)
    inner = F_term(reduced_I, sign, params, z_plain, reduced_uni, sp)
    p_ab = ("mat", a, b, permutation_two_site(params.M))
    rhs_plain = evaluate_factors(
        _prefactor_A(a, b, uni),
        z_plain,
        params,
        sp,
        right=inner @ evaluate_factors([p_ab] + _prefactor_B(a, b, uni), z_plain, params, sp),
    )
    if omega == 0.0:
        return lhs, rhs_plain
    t_a = basis_T((m1, m2), params.M)
    ta_full = np.kron(np.kron(identity(params.M ** (a - 1)), t_a), identity(params.M ** (len(z) - a)))
    return lhs, ta_full @ rhs_plain @ np.linalg.inv(ta_full)


def residue_F(
    a: int,
    b: int,
    k: int,
    params: ModelParams,
    z_partial: np.ndarray,
    omega_index: tuple[int, int] = (0, 0),
) -> tuple[CMatrix, CMatrix, float]:
    """(lhs, rhs, scale) of the summed residue factorization at z_a = z_b + eta.

    lhs sums exact per-term residues of the alternating sum; rhs conjugates
    the reduced identity sum (k-1, two fewer legs) by the explicit chains,
    so both sides vanish when the reduced sum does.  scale is the largest
    single-term residue magnitude, the natural yardstick for both sides.
    """
    n = len(z_partial)
    uni = _as_universe(n)
    sp = LegSpace(params.M, n)
    if a == b or not (1 <= a <= n and 1 <= b <= n):
        raise BadLeg(f"need distinct legs in 1..{n}")
    lhs = np.zeros((sp.dim, sp.dim), dtype=complex)
    scale = 1.0
    for elems in combinations(uni, k):
        I = IndexSubset(elems)
        if a in I and b not in I:
            term = residue_term(I, "minus", a, b, params, z_partial, uni, omega_index)[0]
            lhs += term
            scale = max(scale, norm_max(term))
        elif b in I and a not in I:
            term = residue_term(I, "plus", a, b, params, z_partial, uni, omega_index)[0]
            lhs -= term
            scale = max(scale, norm_max(term))

    m1, m2 = omega_index
    omega = m1 + m2 * params.tau
    z_plain = _collision_point(z_partial, a, b, params, 0.0)
    reduced_uni = tuple(l for l in uni if l not in (a, b))
    if 1 <= k - 1 <= len(reduced_uni):
        inner, _ = F_total(k - 1, params, z_plain, reduced_uni, sp)
    else:
        # the order-zero sum is Id - Id per sign, identically zero
        inner = np.zeros((sp.dim, sp.dim), dtype=complex)
    p_ab = ("mat", a, b, permutation_two_site(params.M))
    rhs = evaluate_factors(
        _prefactor_A(a, b, uni),
        z_plain,
        params,
        sp,
        right=inner @ evaluate_factors([p_ab] + _prefactor_B(a, b, uni), z_plain, params, sp),
    )
    if omega != 0.0:
        t_a = basis_T((m1, m2), params.M)
        ta_full = np.kron(
            np.kron(identity(params.M ** (a - 1)), t_a), identity(params.M ** (n - a))
        )
        rhs = ta_full @ rhs @ np.linalg.inv(ta_full)
    return lhs, rhs, scale


def eta_quasiperiodicity_residual(k: int, params: ModelParams, rng: np.random.Generator) -> float:
    """Termwise quasi-periodicity of the identity-sum terms in eta.

    Shifting eta by M leaves a term invariant; shifting by M*tau multiplies
    it by exp(2*pi*i*k*(N-k)*hbar), one phase per eta-carrying factor.
    """
    n = params.N
    sp = params.space()
    res = 0.0
    for _ in range(max(2, params.samples // 5)):
        z = sample_z_vector(rng, params.tau, params.pole_guard, n, (0.0, -params.eta))
        elems = tuple(sorted(rng.choice(np.arange(1, n + 1), size=k, replace=False).tolist()))
        I = IndexSubset(elems)
        for sign in ("plus", "minus"):
            base = F_term(I, sign, params, z, space=sp)
            s = norm_max(base)
            shifted = F_term(I, sign, params.with_(eta=params.eta + params.M), z, space=sp)
            res = max(res, norm_max(shifted - base) / s)
            shifted_tau = F_term(
                I, sign, params.with_(eta=params.eta + params.M * params.tau), z, space=sp
            )
            phase = cmath.exp(TWO_PI_I * k * (n - k) * params.hbar)
            res = max(res, norm_max(shifted_tau - phase * base) / s)
    return res
