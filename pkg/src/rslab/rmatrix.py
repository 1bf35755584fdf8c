"""The elliptic GL(M) R-matrix and its verified properties.

The two-site operator is

    R^hbar(x) = (1/M) sum_alpha phi_alpha(x, hbar/M + omega_alpha) T_alpha (x) T_{-alpha},

an M^2 x M^2 matrix with a simple pole at x = 0 whose residue is the two-site
permutation.  For M = 1 it degenerates to the scalar Kronecker function
phi(hbar, x).  The module also provides the normalized variant (unit product
with its argument-reversed partner), the classical limit coefficient, and
spectral-parameter derivatives of both, plus residual evaluators for every
exchange/symmetry property the verification suites assert.

Two-site values are memoized per parameter set: subset-product evaluation
hits the same spectral arguments over and over.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import elliptic as ell
from .errors import InvalidModuli, NormalizerZero, PoleProximity
from .sampling import sample_argument, sample_z_vector
from .tensor import (
    CMatrix,
    LegSpace,
    apply_two_site,
    basis_T,
    clock_shift,
    identity,
    leg_operator,
    norm_max,
    permutation_two_site,
)

TWO_PI_I = 2j * math.pi

DEFAULT_HBAR = 0.173 + 0.041j
DEFAULT_ETA = 0.289 - 0.057j


@dataclass(frozen=True)
class ModelParams:
    """Free constants of the whole model: moduli, couplings, and sizes."""

    tau: complex = 0.8j
    hbar: complex = DEFAULT_HBAR
    eta: complex = DEFAULT_ETA
    M: int = 2
    N: int = 3
    pole_guard: float = 5e-3
    seed: int = 7
    samples: int = 20

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "hbar", complex(self.hbar))
        object.__setattr__(self, "eta", complex(self.eta))
        if self.M < 1:
            raise InvalidModuli(f"M must be >= 1, got {self.M}")
        if self.N < 2:
            raise InvalidModuli(f"N must be >= 2, got {self.N}")
        if self.pole_guard <= 0.0:
            raise InvalidModuli("pole guard must be positive")
        self.elliptic  # validates Im(tau)
        for name, val in (("hbar", self.hbar), ("eta", self.eta)):
            if ell.lattice_distance(val, self.tau) < self.pole_guard:
                raise PoleProximity(f"{name}={val} is within guard of the lattice")
        for a1 in range(self.M):
            for a2 in range(self.M):
                u = self.hbar / self.M + ell.omega_alpha((a1, a2), self.M, self.tau)
                if ell.lattice_distance(u, self.tau) < self.pole_guard / self.M:
                    raise PoleProximity(
                        f"twisted coupling for alpha=({a1},{a2}) sits on the lattice"
                    )

    @property
    def elliptic(self) -> ell.EllipticParams:
        return ell.EllipticParams(tau=self.tau)

    def with_(self, **kw) -> "ModelParams":
        d = {f: getattr(self, f) for f in ("tau", "hbar", "eta", "M", "N", "pole_guard", "seed", "samples")}
        d.update(kw)
        return ModelParams(**d)

    def space(self, nlegs: int | None = None) -> LegSpace:
        return LegSpace(self.M, self.N if nlegs is None else nlegs)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@lru_cache(maxsize=64)
def _twist_basis(big_m: int) -> tuple[tuple[tuple[int, int], CMatrix], ...]:
    """All (alpha, T_alpha (x) T_{-alpha}) pairs for one local dimension."""
    out = []
    for a1 in range(big_m):
        for a2 in range(big_m):
            mat = np.kron(basis_T((a1, a2), big_m), basis_T((-a1, -a2), big_m))
            mat.flags.writeable = False
            out.append(((a1, a2), mat))
    return tuple(out)


def phi(x: complex, params: ModelParams, hbar: complex | None = None) -> complex:
    """Scalar normalizer phi(hbar, x)."""
    h = params.hbar if hbar is None else hbar
    return ell.kronecker_phi(h, x, params.elliptic)


@lru_cache(maxsize=50_000)
def _r_cached(params: ModelParams, x: complex, hbar: complex) -> CMatrix:
    ep = params.elliptic
    big_m = params.M
    acc = np.zeros((big_m * big_m, big_m * big_m), dtype=complex)
    for alpha, mat in _twist_basis(big_m):
        acc += ell.phi_alpha(x, alpha, hbar / big_m, big_m, ep) * mat
    acc /= big_m
    acc.flags.writeable = False
    return acc


def r_two_site(x: complex, params: ModelParams, hbar: complex | None = None) -> CMatrix:
    """R^hbar(x) on two sites; `hbar` overrides the model coupling."""
    h = params.hbar if hbar is None else complex(hbar)
    return _r_cached(params, complex(x), h)


@lru_cache(maxsize=50_000)
def _rbar_cached(params: ModelParams, x: complex, hbar: complex) -> CMatrix:
    ep = params.elliptic
    tz = ell.theta(hbar + x, ep)
    d1, _ = ell.theta_derivatives_at_zero(ep)
    if abs(tz) < ell.THETA_GUARD * abs(d1):
        raise NormalizerZero(f"phi(hbar, {x}) vanishes within guard")
    out = _r_cached(params, x, hbar) / ell.kronecker_phi(hbar, x, ep)
    out.flags.writeable = False
    return out


def rbar_two_site(x: complex, params: ModelParams, hbar: complex | None = None) -> CMatrix:
    """Normalized R-matrix: R^hbar(x) / phi(hbar, x)."""
    h = params.hbar if hbar is None else complex(hbar)
    return _rbar_cached(params, complex(x), h)


def rational_rbar_two_site(x: complex, params: ModelParams, hbar: complex | None = None) -> CMatrix:
    """Rational (Yang-type) normalized two-site matrix (x + hbar*P)/(x + hbar).

    Non-elliptic test fixture: unitary and exchange-consistent on its own,
    but deliberately mismatched with elliptic scalar coefficients.  Used as
    the negative control in commutativity checks.
    """
    h = params.hbar if hbar is None else complex(hbar)
    if abs(x + h) < 1e-12:
        raise NormalizerZero("rational normalizer vanishes")
    big_m = params.M
    p = permutation_two_site(big_m)
    return (x * np.eye(big_m * big_m) + h * p) / (x + h)


def classical_r_two_site(x: complex, params: ModelParams) -> CMatrix:
    """Classical coefficient of the small-coupling expansion of R."""
    ep = params.elliptic
    big_m = params.M
    acc = ell.eisenstein_E1(x, ep) * np.eye(big_m * big_m, dtype=complex)
    for alpha, mat in _twist_basis(big_m):
        if alpha != (0, 0):
            acc += ell.phi_alpha(x, alpha, 0.0, big_m, ep) * mat
    return acc / big_m


def dr_two_site(x: complex, params: ModelParams, hbar: complex | None = None) -> CMatrix:
    """d/dx of the two-site R-matrix."""
    h = params.hbar if hbar is None else complex(hbar)
    ep = params.elliptic
    big_m = params.M
    acc = np.zeros((big_m * big_m, big_m * big_m), dtype=complex)
    for alpha, mat in _twist_basis(big_m):
        u = h / big_m + ell.omega_alpha(alpha, big_m, ep.tau)
        twist = cmath.exp(TWO_PI_I * alpha[1] * x / big_m)
        dval = twist * (
            (TWO_PI_I * alpha[1] / big_m) * ell.kronecker_phi(x, u, ep)
            + ell.dphi_dz(x, u, ep)
        )
        acc += dval * mat
    return acc / big_m


def drbar_two_site(x: complex, params: ModelParams, hbar: complex | None = None) -> CMatrix:
    """d/dx of the normalized R-matrix, via the quotient rule."""
    h = params.hbar if hbar is None else complex(hbar)
    f = phi(x, params, hbar=h)
    df = ell.dphi_dz(x, h, params.elliptic)
    return dr_two_site(x, params, hbar=h) / f - rbar_two_site(x, params, hbar=h) * (df / f)


def dr_classical_two_site(x: complex, params: ModelParams) -> CMatrix:
    """d/dx of the classical coefficient matrix."""
    ep = params.elliptic
    big_m = params.M
    acc = -ell.eisenstein_E2(x, ep) * np.eye(big_m * big_m, dtype=complex)
    for alpha, mat in _twist_basis(big_m):
        if alpha == (0, 0):
            continue
        u = ell.omega_alpha(alpha, big_m, ep.tau)
        twist = cmath.exp(TWO_PI_I * alpha[1] * x / big_m)
        dval = twist * (
            (TWO_PI_I * alpha[1] / big_m) * ell.kronecker_phi(x, u, ep)
            + ell.dphi_dz(x, u, ep)
        )
        acc += dval * mat
    return acc / big_m


# ---------------------------------------------------------------------------
# product helpers on a leg space
# ---------------------------------------------------------------------------

def product_on_legs(
    factors: list[tuple[int, int, complex, complex | None]],
    params: ModelParams,
    space: LegSpace,
    normalized: bool = False,
    right: CMatrix | None = None,
) -> CMatrix:
    """Ordered product of two-site R factors acting on a leg space.

    `factors` lists (i, j, argument, hbar_override) left to right; the
    product is accumulated by successive leg application onto the identity
    (or onto `right`), never materializing embeddings.
    """
    acc = identity(space.dim) if right is None else right
    build = rbar_two_site if normalized else r_two_site
    for i, j, arg, hb in reversed(factors):
        acc = apply_two_site(build(arg, params, hbar=hb), i, j, acc, space)
    return acc


def _scale(*mats: CMatrix) -> float:
    return max(norm_max(m) for m in mats)


# ---------------------------------------------------------------------------
# property residuals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropertyResult:
    residual: float
    scale: float


def _sample_uv(params: ModelParams, rng) -> tuple[complex, complex]:
    g = params.pole_guard
    u = sample_argument(rng, params.tau, g, (0.0,))
    while True:
        v = sample_argument(rng, params.tau, g, (0.0,))
        if ell.lattice_distance(u + v, params.tau) >= g:
            return u, v


def _check_qybe(params: ModelParams, rng) -> PropertyResult:
    sp = params.space(3)
    worst = res = 0.0
    for _ in range(params.samples):
        u, v = _sample_uv(params, rng)
        lhs = product_on_legs([(1, 2, u, None), (1, 3, u + v, None), (2, 3, v, None)], params, sp)
        rhs = product_on_legs([(2, 3, v, None), (1, 3, u + v, None), (1, 2, u, None)], params, sp)
        s = _scale(lhs, rhs)
        res = max(res, norm_max(lhs - rhs) / s)
        worst = max(worst, s)
    return PropertyResult(res, worst)


def _sample_coupling_pair(params: ModelParams, rng) -> tuple[complex, complex]:
    """Couplings x, y with x, y, and x - y all off the lattice."""
    g = params.pole_guard
    x = sample_argument(rng, params.tau, g, (0.0,))
    while True:
        y = sample_argument(rng, params.tau, g, (0.0,))
        if ell.lattice_distance(x - y, params.tau) >= g:
            return x, y


def _check_aybe(params: ModelParams, rng) -> PropertyResult:
    sp = params.space(3)
    g = params.pole_guard
    worst = res = 0.0
    for _ in range(params.samples):
        z = sample_z_vector(rng, params.tau, g, 3, (0.0,))
        x, y = _sample_coupling_pair(params, rng)
        d12, d23, d13 = z[0] - z[1], z[1] - z[2], z[0] - z[2]
        lhs = product_on_legs([(1, 2, d12, x), (2, 3, d23, y)], params, sp)
        t1 = product_on_legs([(1, 3, d13, y), (1, 2, d12, x - y)], params, sp)
        t2 = product_on_legs([(2, 3, d23, y - x), (1, 3, d13, x)], params, sp)
        s = _scale(lhs, t1, t2)
        res = max(res, norm_max(lhs - t1 - t2) / s)
        worst = max(worst, s)
    return PropertyResult(res, worst)


def _check_unitarity(params: ModelParams, rng) -> PropertyResult:
    p = permutation_two_site(params.M)
    worst = res = 0.0
    for _ in range(params.samples):
        x = sample_argument(rng, params.tau, params.pole_guard, (0.0, params.hbar, -params.hbar))
        r21 = p @ r_two_site(-x, params) @ p
        lhs = r_two_site(x, params) @ r21
        rhs = phi(x, params) * phi(-x, params) * np.eye(params.M ** 2)
        s = _scale(lhs, rhs)
        res = max(res, norm_max(lhs - rhs) / s)
        worst = max(worst, s)
    return PropertyResult(res, worst)


def _check_unitarity_normalized(params: ModelParams, rng) -> PropertyResult:
    p = permutation_two_site(params.M)
    res = 0.0
    for _ in range(params.samples):
        x = sample_argument(rng, params.tau, params.pole_guard, (0.0, params.hbar, -params.hbar))
        lhs = rbar_two_site(x, params) @ (p @ rbar_two_site(-x, params) @ p)
        res = max(res, norm_max(lhs - np.eye(params.M ** 2)))
    return PropertyResult(res, 1.0)


def _check_fourier(params: ModelParams, rng) -> PropertyResult:
    p = permutation_two_site(params.M)
    worst = res = 0.0
    for _ in range(params.samples):
        x, zc = _sample_uv(params, rng)
        lhs = r_two_site(x, params, hbar=zc) @ p
        rhs = r_two_site(zc, params, hbar=x)
        s = _scale(lhs, rhs)
        res = max(res, norm_max(lhs - rhs) / s)
        worst = max(worst, s)
    return PropertyResult(res, worst)


def _check_skew(params: ModelParams, rng) -> PropertyResult:
    p = permutation_two_site(params.M)
    worst = res = 0.0
    for _ in range(params.samples):
        x = sample_argument(rng, params.tau, params.pole_guard, (0.0,))
        lhs = r_two_site(x, params)
        rhs = -(p @ r_two_site(-x, params, hbar=-params.hbar) @ p)
        s = _scale(lhs, rhs)
        res = max(res, norm_max(lhs - rhs) / s)
        worst = max(worst, s)
    return PropertyResult(res, worst)


def _check_zm_symmetry(params: ModelParams, rng) -> PropertyResult:
    q, lam = clock_shift(params.M)
    qq, ll = np.kron(q, q), np.kron(lam, lam)
    worst = res = 0.0
    for _ in range(params.samples):
        x = sample_argument(rng, params.tau, params.pole_guard, (0.0,))
        r = r_two_site(x, params)
        s = norm_max(r)
        res = max(res, norm_max(qq @ r - r @ qq) / s, norm_max(ll @ r - r @ ll) / s)
        worst = max(worst, s)
    return PropertyResult(res, worst)


def _quasi_period(params: ModelParams, rng, period: complex, phase: complex, conj: CMatrix | None) -> PropertyResult:
    worst = res = 0.0
    eye = np.eye(params.M, dtype=complex)
    for _ in range(params.samples):
        x = sample_argument(rng, params.tau, params.pole_guard, (0.0,))
        lhs = r_two_site(x + period, params)
        mid = r_two_site(x, params)
        if conj is not None:
            c = np.kron(conj, eye)
            mid = np.linalg.inv(c) @ mid @ c
        rhs = phase * mid
        s = _scale(lhs, rhs)
        res = max(res, norm_max(lhs - rhs) / s)
        worst = max(worst, s)
    return PropertyResult(res, worst)


def _check_quasi_period_1(params, rng):
    q, _ = clock_shift(params.M)
    return _quasi_period(params, rng, 1.0, 1.0, q)


def _check_quasi_period_tau(params, rng):
    _, lam = clock_shift(params.M)
    return _quasi_period(params, rng, params.tau, cmath.exp(-TWO_PI_I * params.hbar / params.M), lam)


def _check_quasi_period_M(params, rng):
    return _quasi_period(params, rng, float(params.M), 1.0, None)


def _check_quasi_period_Mtau(params, rng):
    return _quasi_period(params, rng, params.M * params.tau, cmath.exp(-TWO_PI_I * params.hbar), None)


def richardson_pair(f, eps1: float, eps2: float):
    """Linear extrapolation of f(eps) = a + b*eps to eps = 0."""
    f1, f2 = f(eps1), f(eps2)
    return (eps1 * f2 - eps2 * f1) / (eps1 - eps2)


def _check_residue_z(params: ModelParams, rng) -> PropertyResult:
    p = permutation_two_site(params.M)
    est = richardson_pair(lambda e: e * r_two_site(e, params), 1e-5, 1e-6)
    return PropertyResult(norm_max(est - p), 1.0)


def _check_residue_hbar(params: ModelParams, rng) -> PropertyResult:
    x = sample_argument(rng, params.tau, params.pole_guard, (0.0,))
    est = richardson_pair(lambda e: e * r_two_site(x, params, hbar=e), 1e-5, 1e-6)
    return PropertyResult(norm_max(est - np.eye(params.M ** 2)), 1.0)


def _check_classical_ybe(params: ModelParams, rng) -> PropertyResult:
    sp = params.space(3)
    from .tensor import embed_two_site

    worst = res = 0.0
    for _ in range(max(3, params.samples // 3)):
        z = sample_z_vector(rng, params.tau, params.pole_guard, 3, (0.0,))
        r12 = embed_two_site(classical_r_two_site(z[0] - z[1], params), 1, 2, sp)
        r13 = embed_two_site(classical_r_two_site(z[0] - z[2], params), 1, 3, sp)
        r23 = embed_two_site(classical_r_two_site(z[1] - z[2], params), 2, 3, sp)
        total = (
            r12 @ r23 - r23 @ r12 + r12 @ r13 - r13 @ r12 + r13 @ r23 - r23 @ r13
        )
        s = _scale(r12 @ r23, r12 @ r13, r13 @ r23)
        res = max(res, norm_max(total) / s)
        worst = max(worst, s)
    return PropertyResult(res, worst)


def _check_classical_expansion(params: ModelParams, rng) -> PropertyResult:
    worst = res = 0.0
    eye = np.eye(params.M ** 2)
    h = 2e-4
    for _ in range(max(3, params.samples // 3)):
        x = sample_argument(rng, params.tau, params.pole_guard, (0.0,))

        def f(e):
            return r_two_site(x, params, hbar=e) - eye / e

        # three-point Richardson at h, h/2, h/4 kills both linear and
        # quadratic coupling corrections
        est = f(h) / 3.0 - 2.0 * f(h / 2.0) + (8.0 / 3.0) * f(h / 4.0)
        rc = classical_r_two_site(x, params)
        s = norm_max(rc)
        res = max(res, norm_max(est - rc) / s)
        worst = max(worst, s)
    return PropertyResult(res, worst)


def _check_shift_law(params: ModelParams, rng) -> PropertyResult:
    """Covariance of embedded R under shifting one coordinate by a lattice
    fraction: a twist-basis conjugation on the shifted leg and an explicit
    exponential when that leg carries the spectral argument."""
    sp = params.space(3)
    big_m = params.M
    worst = res = 0.0
    for _ in range(max(2, params.samples // 5)):
        z = sample_z_vector(rng, params.tau, params.pole_guard, 3, (0.0,))
        for m1 in range(big_m):
            for m2 in range(big_m):
                omega = m1 + m2 * params.tau
                t = basis_T((m1, m2), big_m)
                for a in (1, 2, 3):
                    i, j = 1, 2
                    za = z.copy()
                    za[a - 1] -= omega
                    lhs = product_on_legs([(i, j, za[i - 1] - za[j - 1], None)], params, sp)
                    delta = (1 if a == i else 0) - (1 if a == j else 0)
                    ta = leg_operator(t, a, sp)
                    rhs = (
                        cmath.exp(TWO_PI_I * delta * m2 * params.hbar / big_m)
                        * ta
                        @ product_on_legs([(i, j, z[i - 1] - z[j - 1], None)], params, sp)
                        @ np.linalg.inv(ta)
                    )
                    s = _scale(lhs, rhs)
                    res = max(res, norm_max(lhs - rhs) / s)
                    worst = max(worst, s)
    return PropertyResult(res, worst)


PROPERTY_CHECKS = {
    "qybe": _check_qybe,
    "aybe": _check_aybe,
    "unitarity": _check_unitarity,
    "unitarity_normalized": _check_unitarity_normalized,
    "fourier": _check_fourier,
    "skew": _check_skew,
    "zm_symmetry": _check_zm_symmetry,
    "quasi_period_1": _check_quasi_period_1,
    "quasi_period_tau": _check_quasi_period_tau,
    "quasi_period_M": _check_quasi_period_M,
    "quasi_period_Mtau": _check_quasi_period_Mtau,
    "residue_z": _check_residue_z,
    "residue_hbar": _check_residue_hbar,
    "classical_ybe": _check_classical_ybe,
    "classical_expansion": _check_classical_expansion,
    "shift_law": _check_shift_law,
}


def property_result(name: str, params: ModelParams, rng: np.random.Generator) -> PropertyResult:
    try:
        check = PROPERTY_CHECKS[name]
    except KeyError:
        raise KeyError(f"unknown property {name!r}; known: {sorted(PROPERTY_CHECKS)}")
    return check(params, rng)


def property_residual(name: str, params: ModelParams, rng: np.random.Generator) -> float:
    """Max scale-normalized residual of one named R-matrix property."""
    return property_result(name, params, rng).residual


# ---------------------------------------------------------------------------
# addition formulas
# ---------------------------------------------------------------------------

def _sample_couplings(params: ModelParams, rng, n: int) -> np.ndarray:
    """n couplings with all of them, their differences, and their total
    pole-free."""
    g = params.pole_guard
    for _ in range(400):
        y = np.array([sample_argument(rng, params.tau, g, (0.0,)) for _ in range(n)])
        pool = list(y) + [y.sum()] + [y[i] - y[j] for i in range(n) for j in range(n) if i != j]
        if all(ell.lattice_distance(complex(v), params.tau) >= g for v in pool):
            return y
    raise SamplingExhausted("could not draw admissible couplings")


def addition_lhs_rhs(
    x: np.ndarray, y: np.ndarray, params: ModelParams
) -> tuple[CMatrix, CMatrix, float]:
    """Star-product expansion: the chain of R's sharing the extra leg equals
    the sum over pivots of neighbor products around a total-coupling factor.

    Legs 1..n carry the sampled arguments, leg n+1 is the shared one.
    Returns (lhs, rhs, scale)."""
    n = len(x)
    sp = params.space(n + 1)
    a = n + 1
    big_y = complex(y.sum())
    lhs = product_on_legs([(a, i + 1, complex(x[i]), complex(y[i])) for i in range(n)], params, sp)
    rhs = np.zeros_like(lhs)
    scale = norm_max(lhs)
    for m in range(n):
        factors = [(m + 1, j + 1, complex(x[j] - x[m]), complex(y[j])) for j in range(m + 1, n)]
        factors.append((a, m + 1, complex(x[m]), big_y))
        factors += [(m + 1, j + 1, complex(x[j] - x[m]), complex(y[j])) for j in range(m)]
        term = product_on_legs(factors, params, sp)
        scale = max(scale, norm_max(term))
        rhs = rhs + term
    return lhs, rhs, scale


def chain_addition_lhs_rhs(
    couplings: np.ndarray, args: np.ndarray, params: ModelParams
) -> tuple[CMatrix, CMatrix, float]:
    """Nearest-neighbor chain variant of the star-product expansion.

    R^{c_1}_{1,2}(a_1) ... R^{c_n}_{n,n+1}(a_n) expands as a sum over pivots
    m with the total argument carried by R^{c_m}_{1,n+1}(sum a)."""
    n = len(couplings)
    sp = params.space(n + 1)
    big_a = complex(args.sum())
    lhs = product_on_legs(
        [(i + 1, i + 2, complex(args[i]), complex(couplings[i])) for i in range(n)], params, sp
    )
    rhs = np.zeros_like(lhs)
    scale = norm_max(lhs)
    for m in range(n):
        factors = [
            (j + 1, j + 2, complex(args[j]), complex(couplings[j] - couplings[m]))
            for j in range(m + 1, n)
        ]
        factors.append((1, n + 1, big_a, complex(couplings[m])))
        factors += [
            (j + 1, j + 2, complex(args[j]), complex(couplings[j] - couplings[m]))
            for j in range(m)
        ]
        term = product_on_legs(factors, params, sp)
        scale = max(scale, norm_max(term))
        rhs = rhs + term
    return lhs, rhs, scale


def shifted_chain_lhs_rhs(
    a: int, z: np.ndarray, params: ModelParams, reverse: bool = False
) -> tuple[CMatrix, CMatrix, float]:
    """Specialized expansion used by the k=1 identity proof: all couplings
    equal, arguments z_a - z_i - eta (i != a), pivot factors carrying the
    summed coupling.  `reverse` flips which slot of each factor holds a."""
    ntot = len(z)
    sp = params.space(ntot)
    h, eta = params.hbar, params.eta
    big_y = (ntot - 1) * h
    others = [i for i in range(1, ntot + 1) if i != a]

    def arg(i: int, j: int) -> complex:
        return complex(z[i - 1] - z[j - 1])

    if not reverse:
        lhs = product_on_legs([(a, i, arg(a, i) - eta, None) for i in others], params, sp)
        rhs = np.zeros_like(lhs)
        scale = norm_max(lhs)
        for m in others:
            inner = [(m, j, arg(m, j), None) for j in others if j > m]
            inner.append((a, m, arg(a, m) - eta, big_y))
            inner += [(m, j, arg(m, j), None) for j in others if j < m]
            term = product_on_legs(inner, params, sp)
            scale = max(scale, norm_max(term))
            rhs = rhs + term
    else:
        lhs = product_on_legs(
            [(i, a, arg(i, a) - eta, None) for i in reversed(others)], params, sp
        )
        rhs = np.zeros_like(lhs)
        scale = norm_max(lhs)
        for m in others:
            inner = [(j, m, arg(j, m), None) for j in reversed(others) if j < m]
            inner.append((m, a, arg(m, a) - eta, big_y))
            inner += [(j, m, arg(j, m), None) for j in reversed(others) if j > m]
            term = product_on_legs(inner, params, sp)
            scale = max(scale, norm_max(term))
            rhs = rhs + term
    return lhs, rhs, scale


def addition_formula_result(nlegs: int, params: ModelParams, rng: np.random.Generator) -> PropertyResult:
    g = params.pole_guard
    res = worst = 0.0
    for _ in range(max(2, params.samples // 4)):
        x = sample_z_vector(rng, params.tau, g, nlegs, (0.0,))
        y = _sample_couplings(params, rng, nlegs)
        lhs, rhs, scale = addition_lhs_rhs(x, y, params)
        res = max(res, norm_max(lhs - rhs) / scale)
        worst = max(worst, scale)

        ntot = nlegs + 1
        offs = (0.0, -params.eta)
        z = sample_z_vector(rng, params.tau, g, ntot, offs)
        a = int(rng.integers(1, ntot + 1))
        for reverse in (False, True):
            lhs, rhs, scale = shifted_chain_lhs_rhs(a, z, params, reverse=reverse)
            res = max(res, norm_max(lhs - rhs) / scale)
            worst = max(worst, scale)
    return PropertyResult(res, worst)


def addition_formula_residual(nlegs: int, params: ModelParams, rng: np.random.Generator) -> float:
    """Max scaled residual of the star-product expansion and of both of its
    equal-coupling, eta-shifted specializations on nlegs + 1 legs."""
    return addition_formula_result(nlegs, params, rng).residual
