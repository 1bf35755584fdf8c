"""Difference operators with matrix coefficients: the commuting family.

An operator is a finite sum of terms, each an integer shift multi-index nu
(one power of the step eta per coordinate) together with a coefficient map
z -> matrix on (C^M)^(x N):

    (T f)(z) = sum_terms  coeff(z) . f(z - eta * nu).

The scalar family attaches phi-function products to plain shifts; the spin
family sandwiches the shifts between block-ordered products of normalized
two-site R-matrices.  Composition shifts the right coefficient's argument,
and commutators are compared coefficient-by-coefficient per shift class,
which is the level at which commutativity is asserted.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from . import elliptic as ell
from .errors import BadOrder, DimMismatch
from .identities import IndexSubset, pair_sequence, _as_subset
from .rmatrix import (
    ModelParams,
    drbar_two_site,
    phi,
    rbar_two_site,
)
from .sampling import sample_z_vector
from .tensor import CMatrix, LegSpace, apply_two_site, identity, kron_power, norm_max

Coefficient = Callable[[np.ndarray], CMatrix]
RbarBuilder = Callable[..., CMatrix]


@dataclass
class DifferenceOperator:
    """Finite sum of (shift multi-index, coefficient evaluator) terms."""

    N: int
    M: int
    eta: complex
    terms: dict[tuple[int, ...], Coefficient] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.M ** self.N

    def add_term(self, nu, coeff: Coefficient) -> None:
        nu = tuple(int(v) for v in nu)
        if len(nu) != self.N:
            raise DimMismatch(f"shift index must have length {self.N}")
        if nu in self.terms:
            old = self.terms[nu]
            self.terms[nu] = lambda z, _old=old, _new=coeff: _old(z) + _new(z)
        else:
            self.terms[nu] = coeff

    def coefficient(self, nu, z: np.ndarray) -> CMatrix:
        nu = tuple(int(v) for v in nu)
        if nu in self.terms:
            return self.terms[nu](np.asarray(z, dtype=complex))
        return np.zeros((self.dim, self.dim), dtype=complex)

    def apply(self, f: Callable[[np.ndarray], np.ndarray], z: np.ndarray) -> np.ndarray:
        """Act on a function of z taking vector (or matrix) values."""
        z = np.asarray(z, dtype=complex)
        out = None
        for nu, coeff in self.terms.items():
            val = coeff(z) @ f(z - self.eta * np.asarray(nu))
            out = val if out is None else out + val
        if out is None:
            return np.zeros(self.dim, dtype=complex)
        return out


def identity_operator(params: ModelParams) -> DifferenceOperator:
    op = DifferenceOperator(params.N, params.M, params.eta)
    dim = params.M ** params.N
    op.add_term((0,) * params.N, lambda z: identity(dim))
    return op


def compose(a: DifferenceOperator, b: DifferenceOperator) -> DifferenceOperator:
    """Operator product: coefficients multiply with the right argument shifted."""
    if (a.N, a.M) != (b.N, b.M) or a.eta != b.eta:
        raise DimMismatch("operators live on different spaces")
    out = DifferenceOperator(a.N, a.M, a.eta)
    for nu_a, ca in a.terms.items():
        shift = a.eta * np.asarray(nu_a)
        for nu_b, cb in b.terms.items():
            nu = tuple(x + y for x, y in zip(nu_a, nu_b))

            def coeff(z, _ca=ca, _cb=cb, _shift=shift):
                return _ca(z) @ _cb(z - _shift)

            out.add_term(nu, coeff)
    return out


# ---------------------------------------------------------------------------
# coefficient building blocks
# ---------------------------------------------------------------------------

def scalar_pair_product(
    I,
    J,
    shift: tuple[int, int],
    z: np.ndarray,
    params: ModelParams,
) -> complex:
    """Product of phi(hbar, z_i - z_j) over i in I, j in J, with each side's
    coordinates lowered by shift[side] steps of eta."""
    I, J = _as_subset(I), _as_subset(J)
    s1, s2 = shift
    out = 1.0 + 0j
    for i in I:
        for j in J:
            out *= phi(complex(z[i - 1] - z[j - 1] - (s1 - s2) * params.eta), params)
    return out


def _steps_factors(I: IndexSubset, J: IndexSubset, variant: str, steps: int):
    return [(i, j, steps) for i, j in pair_sequence(I, J, variant)]


def _chain(
    factors, z: np.ndarray, params: ModelParams, sp: LegSpace, rbar: RbarBuilder
) -> CMatrix:
    acc = identity(sp.dim)
    for i, j, steps in reversed(factors):
        arg = complex(z[i - 1] - z[j - 1] - steps * params.eta)
        acc = apply_two_site(rbar(arg, params), i, j, acc, sp)
    return acc


def build_scalar_D(k: int, sign: str, params: ModelParams) -> DifferenceOperator:
    """Order-k scalar difference operator (rank M = 1 only)."""
    if params.M != 1:
        raise BadOrder("scalar operators are the M = 1 family")
    if not 1 <= k <= params.N:
        raise BadOrder(f"order k={k} outside 1..{params.N}")
    op = DifferenceOperator(params.N, 1, params.eta)
    for elems in combinations(range(1, params.N + 1), k):
        I = IndexSubset(elems)
        comp = I.complement(params.N)
        nu = tuple(1 if l in I else 0 for l in range(1, params.N + 1))
        if sign == "plus":
            def coeff(z, _I=I, _c=comp):
                return np.array([[scalar_pair_product(_c, _I, (0, 0), z, params)]])

            op.add_term(nu, coeff)
        elif sign == "minus":
            def coeff(z, _I=I, _c=comp):
                return np.array([[scalar_pair_product(_I, _c, (0, 0), z, params)]])

            op.add_term(tuple(-v for v in nu), coeff)
        else:
            raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
    return op


def build_spin_D(
    k: int,
    sign: str,
    params: ModelParams,
    rbar: RbarBuilder = rbar_two_site,
) -> DifferenceOperator:
    """Order-k spin difference operator from normalized two-site factors.

    `rbar` swaps in an alternative normalized builder (the rational one acts
    as the non-commuting negative control).
    """
    if not 1 <= k <= params.N:
        raise BadOrder(f"order k={k} outside 1..{params.N}")
    sp = params.space()
    op = DifferenceOperator(params.N, params.M, params.eta)
    for elems in combinations(range(1, params.N + 1), k):
        I = IndexSubset(elems)
        comp = I.complement(params.N)
        nu = tuple(1 if l in I else 0 for l in range(1, params.N + 1))
        if sign == "plus":
            factors = _steps_factors(comp, I, "less", 0) + _steps_factors(I, comp, "greater", 1)

            def coeff(z, _I=I, _c=comp, _f=factors):
                return scalar_pair_product(_c, _I, (0, 0), z, params) * _chain(
                    _f, z, params, sp, rbar
                )

            op.add_term(nu, coeff)
        elif sign == "minus":
            factors = _steps_factors(I, comp, "less", 0) + _steps_factors(comp, I, "greater", 1)

            def coeff(z, _I=I, _c=comp, _f=factors):
                return scalar_pair_product(_I, _c, (0, 0), z, params) * _chain(
                    _f, z, params, sp, rbar
                )

            op.add_term(tuple(-v for v in nu), coeff)
        else:
            raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
    return op


# ---------------------------------------------------------------------------
# coefficientwise comparison
# ---------------------------------------------------------------------------

def coefficient_residual(a: DifferenceOperator, b: DifferenceOperator, z: np.ndarray) -> float:
    """Max scaled coefficient difference over the union of shift classes."""
    keys = set(a.terms) | set(b.terms)
    per_class = []
    for nu in keys:
        ca = a.coefficient(nu, z)
        cb = b.coefficient(nu, z)
        per_class.append((norm_max(ca - cb), max(norm_max(ca), norm_max(cb))))
    global_scale = max(s for _, s in per_class)
    out = 0.0
    for diff, scale in per_class:
        out = max(out, diff / (scale if scale > 1e-12 * global_scale else global_scale))
    return out


def commutator_residual(
    a: DifferenceOperator,
    b: DifferenceOperator,
    params: ModelParams,
    rng: np.random.Generator,
    npoints: int = 5,
) -> float:
    """Residual of [a, b] = 0, coefficientwise at seeded pole-free points."""
    ab = compose(a, b)
    ba = compose(b, a)
    offs = []
    for s in (-2, -1, 0, 1, 2):
        offs.append(s * params.eta)
        offs.append(s * params.eta + params.hbar)
    res = 0.0
    for _ in range(npoints):
        z = sample_z_vector(rng, params.tau, params.pole_guard, params.N, offs)
        res = max(res, coefficient_residual(ab, ba, z))
    return res


def lemma1_residual(I, J, params: ModelParams, rng: np.random.Generator) -> float:
    """Coefficientwise residual of the two-sided product rearrangement that
    splits a plus-shift term against a minus-shift term into pairwise
    disjoint blocks around a collision core."""
    I, J = _as_subset(I), _as_subset(J)
    n, sp = params.N, params.space()
    C = IndexSubset.of(set(I.elements) & set(J.elements))
    A = IndexSubset.of(set(I.elements) - set(C.elements))
    B = IndexSubset.of(set(J.elements) - set(C.elements))
    D = IndexSubset.of(set(range(1, n + 1)) - set(I.elements) - set(J.elements))
    Ic, Jc = I.complement(n), J.complement(n)

    def single(nu, factors):
        op = DifferenceOperator(n, params.M, params.eta)
        op.add_term(nu, lambda z, _f=factors: _chain(_f, z, params, sp, rbar_two_site))
        return op

    ind = lambda S: tuple(1 if l in S else 0 for l in range(1, n + 1))
    neg = lambda v: tuple(-x for x in v)

    lhs = compose(
        single(ind(I), _steps_factors(Ic, I, "less", 0) + _steps_factors(I, Ic, "greater", 1)),
        single(
            neg(ind(J)),
            _steps_factors(J, Jc, "less", 0) + _steps_factors(Jc, J, "greater", 1),
        ),
    )

    bcd = B.union(C).union(D)
    cd = C.union(D)
    bcd_a = _steps_factors(bcd, A, "less", 0) + _steps_factors(B, cd, "less", 0)
    mid = (
        _steps_factors(D, C, "less", 0)
        + _steps_factors(C, D, "greater", 1)
        + _steps_factors(C, D, "less", 1)
        + _steps_factors(D, C, "greater", 0)
    )
    # the closing chains sit right of the inverse shift, so pairs whose
    # second leg lies in B see that coordinate raised by eta
    tail = [(i, j, 1) for i, j in pair_sequence(cd, B, "greater")]
    tail += [(i, j, 1 if j in B else 0) for i, j in pair_sequence(A, bcd, "greater")]
    rhs = compose(
        compose(single(ind(A), bcd_a), single((0,) * n, mid)),
        single(neg(ind(B)), tail),
    )

    offs = []
    for s in (-1, 0, 1):
        offs.append(s * params.eta)
        offs.append(s * params.eta + params.hbar)
    res = 0.0
    for _ in range(max(2, params.samples // 6)):
        z = sample_z_vector(rng, params.tau, params.pole_guard, n, offs)
        res = max(res, coefficient_residual(lhs, rhs, z))
    return res


# ---------------------------------------------------------------------------
# frozen spin chain
# ---------------------------------------------------------------------------

def freeze_H1(params: ModelParams) -> CMatrix:
    """First frozen-chain Hamiltonian at equidistant points x_i = i/N.

    The derivative factor is evaluated analytically; everything is pinned to
    the equidistant configuration, so eta never enters.
    """
    n, sp = params.N, params.space()
    x = np.arange(1, n + 1) / n
    h1 = np.zeros((sp.dim, sp.dim), dtype=complex)
    for i in range(1, n + 1):
        pref = 1.0 + 0j
        for j in range(1, n + 1):
            if j != i:
                pref *= phi(complex(x[j - 1] - x[i - 1]), params)
        for k in range(1, i):
            acc = identity(sp.dim)
            for m in range(k + 1, i):
                acc = apply_two_site(
                    rbar_two_site(complex(x[i - 1] - x[m - 1]), params), i, m, acc, sp
                )
            acc = apply_two_site(
                drbar_two_site(complex(x[i - 1] - x[k - 1]), params), i, k, acc, sp
            )
            for m in range(k, i):
                arg = complex(x[m - 1] - x[i - 1])
                acc = apply_two_site(rbar_two_site(arg, params), m, i, acc, sp)
            h1 += pref * acc
    return h1


# ---------------------------------------------------------------------------
# q-difference (Macdonald-type) coefficients for the wide-cell limit
# ---------------------------------------------------------------------------

def macdonald_coefficient(I, z: np.ndarray, params: ModelParams) -> complex:
    """Coefficient of the q-difference operator term for subset I:

        t^(k(k-N)/2) prod_{i in I, j not in I} (t x_i - x_j)/(x_i - x_j)

    with t = exp(-2*pi*i*hbar) and x = exp(2*pi*i*z).  The elliptic scalar
    coefficients converge to these in the wide-cell limit up to the factor
    (pi / sin(pi*hbar))^(k(N-k)) from the phi normalization.
    """
    I = _as_subset(I)
    n = params.N
    k = len(I)
    t = cmath.exp(-2j * math.pi * params.hbar)
    xs = np.exp(2j * math.pi * np.asarray(z, dtype=complex))
    out = t ** (k * (k - n) / 2.0)
    for i in I:
        for j in range(1, n + 1):
            if j not in I:
                out *= (t * xs[i - 1] - xs[j - 1]) / (xs[i - 1] - xs[j - 1])
    return out


def macdonald_conversion(k: int, params: ModelParams) -> complex:
    """Normalization relating wide-cell scalar coefficients to macdonald_coefficient."""
    return (math.pi / cmath.sin(math.pi * params.hbar)) ** (k * (params.N - k))
