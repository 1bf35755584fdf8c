"""Small-coupling limits of the first spin difference operator.

Scaling both couplings by epsilon and expanding,

    D1(eps*hbar, eps*eta) = N - eps * sum_k eta d/dz_k + eps^2 H2 + O(eps^3)

after multiplying by (theta(eps*hbar)/theta'(0))^(N-1).  The order-two
coefficient is a second-order differential operator: for rank one it is the
elliptic Calogero-Moser Hamiltonian, in general its anisotropic matrix
extension with a classical-coefficient pair interaction.  Probe functions
are exponentials times a fixed vector, so all derivatives are closed-form
and operator coefficients can be extracted by Richardson extrapolation in
epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import elliptic as ell
from .errors import BadOrder, ExtrapolationUnstable
from .operators import build_spin_D
from .rmatrix import ModelParams, dr_classical_two_site
from .tensor import apply_two_site, norm_max

DEFAULT_EPS_GRID = (1e-2, 5e-3)


@dataclass(frozen=True)
class TestFunction:
    """f(z) = exp(sum_k c_k z_k) * v with v in the full tensor space."""

    exponents: np.ndarray
    vector: np.ndarray

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return np.exp(np.dot(self.exponents, z)) * self.vector

    @classmethod
    def random(cls, params: ModelParams, rng: np.random.Generator) -> "TestFunction":
        n, dim = params.N, params.M ** params.N
        c = rng.normal(size=n) + 1j * rng.normal(size=n)
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v = v / np.linalg.norm(v)
        return cls(np.asarray(c, dtype=complex), np.asarray(v, dtype=complex))


def _velocity_square_scalar(f: TestFunction, z: np.ndarray, params: ModelParams) -> complex:
    """Scalar factor of (1/2) sum_k v_k^2 acting on the exponential probe,

    v_k = eta d/dz_k - hbar * sum_{i != k} E1(z_i - z_k);

    the derivative hitting the E1 sum brings in E2.
    """
    ep = params.elliptic
    n = params.N
    total = 0.0 + 0j
    for k in range(n):
        s1 = sum(
            ell.eisenstein_E1(complex(z[i] - z[k]), ep) for i in range(n) if i != k
        )
        ds = sum(
            ell.eisenstein_E2(complex(z[i] - z[k]), ep) for i in range(n) if i != k
        )
        base = params.eta * f.exponents[k] - params.hbar * s1
        total += base * base - params.eta * params.hbar * ds
    return total / 2.0


def _pair_weierstrass_sum(z: np.ndarray, params: ModelParams) -> complex:
    ep = params.elliptic
    n = params.N
    return sum(
        ell.weierstrass_p(complex(z[i] - z[j]), ep)
        for i in range(n)
        for j in range(n)
        if i != j
    )


def H2_CM_apply(f: TestFunction, z: np.ndarray, params: ModelParams) -> np.ndarray:
    """Rank-one quadratic Hamiltonian applied to the probe at z.

    The pair potential enters through the Weierstrass function together with
    the constant that converts it to the second logarithmic derivative of
    theta; the constant is what the epsilon expansion actually produces, and
    it cancels when the two couplings coincide.
    """
    if params.M != 1:
        raise BadOrder("the Calogero-Moser form is the M = 1 case")
    z = np.asarray(z, dtype=complex)
    n = params.N
    d1, d3 = ell.theta_derivatives_at_zero(params.elliptic)
    cc = params.hbar * (params.hbar - params.eta) / 2.0
    val = _velocity_square_scalar(f, z, params)
    val -= cc * _pair_weierstrass_sum(z, params)
    val += cc * n * (n - 1) / 3.0 * (d3 / d1)
    return val * f(z)


def H2_tops_apply(f: TestFunction, z: np.ndarray, params: ModelParams) -> np.ndarray:
    """Anisotropic quadratic Hamiltonian applied to the probe at z.

    The scalar part carries the velocity square, the third-theta-derivative
    constant, and the pair potential; the matrix part is the derivative of
    the classical coefficient on every ordered leg pair.  For rank one it
    collapses to the Calogero-Moser form.
    """
    z = np.asarray(z, dtype=complex)
    n, sp = params.N, params.space()
    d1, d3 = ell.theta_derivatives_at_zero(params.elliptic)
    val = _velocity_square_scalar(f, z, params)
    val += params.hbar ** 2 * n * (n - 1) / 6.0 * (d3 / d1)
    val -= params.hbar ** 2 / 2.0 * _pair_weierstrass_sum(z, params)
    out = val * f(z)
    fz = f(z)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            dr = dr_classical_two_site(complex(z[i - 1] - z[j - 1]), params)
            out = out - params.hbar * params.eta / 2.0 * apply_two_site(dr, i, j, fz, sp)
    return out


def _d1_scaled_apply(
    f: TestFunction, z: np.ndarray, params: ModelParams, eps: float
) -> np.ndarray:
    """(theta(eps*hbar)/theta'(0))^(N-1) D1(eps*hbar, eps*eta) f at z."""
    scaled = params.with_(hbar=eps * params.hbar, eta=eps * params.eta, pole_guard=1e-7)
    op = build_spin_D(1, "plus", scaled)
    d1, _ = ell.theta_derivatives_at_zero(params.elliptic)
    pref = (ell.theta(eps * params.hbar, params.elliptic) / d1) ** (params.N - 1)
    return pref * op.apply(f, z)


def epsilon_expansion_coefficient(
    order: int,
    f: TestFunction,
    z: np.ndarray,
    params: ModelParams,
    eps_grid=DEFAULT_EPS_GRID,
    stability_tol: float = 1e-4,
) -> np.ndarray:
    """Taylor coefficient of the scaled operator in epsilon, by Richardson.

    Lower orders are removed using their closed forms (N f and the total
    eta-weighted derivative) before dividing by the appropriate power, and
    consecutive grid pairs are extrapolated linearly.  With three or more
    grid values, disagreement between successive extrapolations beyond
    10 * stability_tol (relative) raises ExtrapolationUnstable.
    """
    if order not in (0, 1, 2):
        raise BadOrder("expansion implemented through order 2")
    z = np.asarray(z, dtype=complex)
    fz = f(z)
    a0 = params.N * fz
    a1 = -params.eta * np.sum(f.exponents) * fz

    def h(eps: float) -> np.ndarray:
        g = _d1_scaled_apply(f, z, params, eps)
        if order == 0:
            return g
        if order == 1:
            return (g - a0) / eps
        return (g - a0 - eps * a1) / eps / eps

    grid = sorted(eps_grid, reverse=True)
    if len(grid) < 2:
        raise BadOrder("need at least two epsilon values")
    vals = [h(e) for e in grid]
    ests = [
        (grid[i] * vals[i + 1] - grid[i + 1] * vals[i]) / (grid[i] - grid[i + 1])
        for i in range(len(grid) - 1)
    ]
    if len(ests) > 1:
        for e1, e2 in zip(ests, ests[1:]):
            diff = norm_max(e1 - e2) / max(norm_max(e2), 1e-300)
            if diff > 10.0 * stability_tol:
                raise ExtrapolationUnstable(
                    f"successive estimates differ by {diff:.3e}"
                )
    return ests[-1]
