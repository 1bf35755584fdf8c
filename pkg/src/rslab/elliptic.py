"""Elliptic special functions on the curve C/(Z + Z*tau).

The basic object is the odd theta function

    theta(z) = -sum_k exp(i*pi*tau*(k+1/2)^2 + 2*pi*i*(z+1/2)*(k+1/2)),

summed over integers k, from which everything else is built: the Kronecker
function phi(z, u) = theta'(0) theta(z+u) / (theta(z) theta(u)), its
exponential twists phi_alpha, the Eisenstein functions E1 = theta'/theta and
E2 = -E1', and the Weierstrass p-function.  Arguments are reduced into the
fundamental cell before summation and the exact quasi-period factors

    theta(z+1) = -theta(z),   theta(z+tau) = -exp(-i*pi*tau - 2*pi*i*z) theta(z)

are reapplied, so values stay accurate for arguments a few cells away from
the origin.  All functions are pure; evaluation near a zero of theta raises
PoleProximity instead of returning a garbage ratio.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidModuli, PoleProximity

TWO_PI_I = 2j * math.pi

# Relative floor on |theta| (in units of |theta'(0)|) below which ratios are
# refused; theta has simple zeros, so |theta(z)| ~ |theta'(0)| * dist(z, lattice).
THETA_GUARD = 1e-10

_MIN_IM_TAU = 0.05
_MAX_CUTOFF = 512


def _auto_cutoff(im_tau: float) -> int:
    """Smallest K with exp(-pi*Im(tau)*(K+1/2)^2) < 1e-18, plus margin."""
    k = math.ceil(math.sqrt(18.0 * math.log(10.0) / (math.pi * im_tau)) - 0.5)
    return min(max(k + 2, 4), _MAX_CUTOFF)


@dataclass(frozen=True)
class EllipticParams:
    """Modulus and evaluation policy for the theta series.

    series_cutoff K keeps terms with |k + 1/2| <= K + 1/2; by default it is
    chosen so the largest dropped term is < 1e-18 of the largest kept one.
    """

    tau: complex
    series_cutoff: int = 0
    reduce_domain: bool = True

    def __post_init__(self) -> None:
        tau = complex(self.tau)
        if tau.imag <= 0.0:
            raise InvalidModuli(f"Im(tau) must be positive, got tau={tau}")
        if tau.imag < _MIN_IM_TAU:
            raise InvalidModuli(
                f"Im(tau)={tau.imag} too small for double-precision summation"
            )
        object.__setattr__(self, "tau", tau)
        if self.series_cutoff <= 0:
            object.__setattr__(self, "series_cutoff", _auto_cutoff(tau.imag))
        elif self.series_cutoff > _MAX_CUTOFF:
            raise InvalidModuli(f"series cutoff {self.series_cutoff} > {_MAX_CUTOFF}")


@lru_cache(maxsize=64)
def _series_data(p: EllipticParams):
    """Positive half-integer frequencies and their z-independent weights.

    Pairing the k and -k-1 terms of the raw lattice sum gives the sine form

        theta(z) = sum_{c = 1/2, 3/2, ...} 2 (-1)^(c-1/2) exp(i*pi*tau*c^2) sin(2*pi*c*z),

    which is exactly odd and free of cancellation near the zeros, so theta
    keeps full relative accuracy close to the lattice.
    """
    k = np.arange(p.series_cutoff + 1)
    half = k + 0.5
    weight = 2.0 * (-1.0) ** k * np.exp(1j * math.pi * p.tau * half * half)
    return half, weight


def _reduce(z: complex, tau: complex) -> tuple[complex, int, int]:
    """Write z = z0 + m + n*tau with z0 within half a cell of the origin.

    Centering (round, not floor) keeps every series term below
    exp(pi*Im(tau)/4) in magnitude, so tall cells never produce inf * 0
    during summation, and keeps |z0| small where the sine form is most
    accurate.
    """
    n = round(z.imag / tau.imag)
    z1 = z - n * tau
    m = round(z1.real - (z1.imag / tau.imag) * tau.real)
    return z1 - m, m, n


def _theta_raw(z, p: EllipticParams):
    """Truncated sine-form series, no argument reduction; z may be an ndarray."""
    half, weight = _series_data(p)
    zz = np.asarray(z, dtype=complex)
    terms = weight * np.sin(TWO_PI_I.imag * np.multiply.outer(zz, half) + 0j)
    return terms.sum(axis=-1)


def _theta_block(z: complex, p: EllipticParams) -> tuple[complex, complex, complex]:
    """(theta, theta', theta'') at z, with domain reduction if enabled."""
    if p.reduce_domain:
        z0, m, n = _reduce(z, p.tau)
    else:
        z0, m, n = z, 0, 0
    half, weight = _series_data(p)
    ang = 2.0 * math.pi * half * z0
    s, c = np.sin(ang), np.cos(ang)
    freq = 2.0 * math.pi * half
    th0 = (weight * s).sum()
    th1 = (weight * freq * c).sum()
    th2 = -(weight * freq * freq * s).sum()
    if m == 0 and n == 0:
        return th0, th1, th2
    pref = (-1.0) ** (m + n) * cmath.exp(-1j * math.pi * n * n * p.tau - TWO_PI_I * n * z0)
    w = TWO_PI_I * n
    return (
        pref * th0,
        pref * (th1 - w * th0),
        pref * (th2 - 2.0 * w * th1 + w * w * th0),
    )


def theta(z: complex, p: EllipticParams) -> complex:
    """The odd theta function theta(z | tau)."""
    if p.reduce_domain:
        z0, m, n = _reduce(z, p.tau)
        val = complex(_theta_raw(z0, p))
        if m == 0 and n == 0:
            return val
        pref = (-1.0) ** (m + n) * cmath.exp(
            -1j * math.pi * n * n * p.tau - TWO_PI_I * n * z0
        )
        return pref * val
    return complex(_theta_raw(z, p))


@lru_cache(maxsize=64)
def theta_derivatives_at_zero(p: EllipticParams) -> tuple[complex, complex]:
    """(theta'(0), theta'''(0)) by term-wise differentiation of the series."""
    half, weight = _series_data(p)
    freq = 2.0 * math.pi * half
    return complex((weight * freq).sum()), complex(-(weight * freq ** 3).sum())


def _theta_guarded(z: complex, p: EllipticParams, what: str) -> complex:
    val = theta(z, p)
    dz0, _ = theta_derivatives_at_zero(p)
    if abs(val) < THETA_GUARD * abs(dz0):
        raise PoleProximity(f"{what}={z} is within guard distance of the lattice")
    return val


def kronecker_phi(z: complex, u: complex, p: EllipticParams) -> complex:
    """phi(z, u) = theta'(0) theta(z+u) / (theta(z) theta(u)); symmetric in z, u."""
    tz = _theta_guarded(z, p, "z")
    tu = _theta_guarded(u, p, "u")
    dz0, _ = theta_derivatives_at_zero(p)
    return dz0 * theta(z + u, p) / (tz * tu)


def omega_alpha(alpha: tuple[int, int], big_m: int, tau: complex) -> complex:
    """Lattice fraction (a1 + a2*tau) / M attached to a twist index."""
    return (alpha[0] + alpha[1] * tau) / big_m


def phi_alpha(
    z: complex,
    alpha: tuple[int, int],
    hbar: complex,
    big_m: int,
    p: EllipticParams,
) -> complex:
    """Twisted Kronecker function exp(2*pi*i*a2*z/M) phi(z, omega_a + hbar).

    The second slot passed to phi is omega_alpha + hbar, so callers hand in
    only the offset (e.g. hbar/M for the quantum R-matrix, 0 for the
    classical one).
    """
    w = omega_alpha(alpha, big_m, tau=p.tau)
    return cmath.exp(TWO_PI_I * alpha[1] * z / big_m) * kronecker_phi(z, w + hbar, p)


def eisenstein_E1(z: complex, p: EllipticParams) -> complex:
    """E1(z) = theta'(z)/theta(z), the logarithmic derivative."""
    if p.reduce_domain:
        z0, _, n = _reduce(z, p.tau)
    else:
        z0, n = z, 0
    th0, th1, _ = _theta_block(z0, p)
    dz0, _ = theta_derivatives_at_zero(p)
    if abs(th0) < THETA_GUARD * abs(dz0):
        raise PoleProximity(f"z={z} is within guard distance of the lattice")
    return th1 / th0 - TWO_PI_I * n


def eisenstein_E2(z: complex, p: EllipticParams) -> complex:
    """E2(z) = -E1'(z); doubly periodic."""
    if p.reduce_domain:
        z0, _, _ = _reduce(z, p.tau)
    else:
        z0 = z
    th0, th1, th2 = _theta_block(z0, p)
    dz0, _ = theta_derivatives_at_zero(p)
    if abs(th0) < THETA_GUARD * abs(dz0):
        raise PoleProximity(f"z={z} is within guard distance of the lattice")
    r = th1 / th0
    return r * r - th2 / th0


def weierstrass_p(z: complex, p: EllipticParams) -> complex:
    """p(z) = E2(z) + theta'''(0) / (3 theta'(0))."""
    dz0, dz3 = theta_derivatives_at_zero(p)
    return eisenstein_E2(z, p) + dz3 / (3.0 * dz0)


def dphi_dz(z: complex, u: complex, p: EllipticParams) -> complex:
    """Derivative of phi(z, u) in the first slot: phi(z,u) (E1(z+u) - E1(z))."""
    return kronecker_phi(z, u, p) * (eisenstein_E1(z + u, p) - eisenstein_E1(z, p))


def phi_trig(z: complex, u: complex) -> complex:
    """Trigonometric degeneration pi*cot(pi*z) + pi*cot(pi*u)."""
    sz = cmath.sin(math.pi * z)
    su = cmath.sin(math.pi * u)
    if abs(sz) < 1e-12 or abs(su) < 1e-12:
        raise PoleProximity("argument at a pole of cot")
    return math.pi * (cmath.cos(math.pi * z) / sz + cmath.cos(math.pi * u) / su)


def phi_rat(z: complex, u: complex) -> complex:
    """Rational degeneration 1/z + 1/u."""
    if abs(z) < 1e-12 or abs(u) < 1e-12:
        raise PoleProximity("argument at the pole of 1/z")
    return 1.0 / z + 1.0 / u


def lattice_distance(z: complex, tau: complex) -> float:
    """Euclidean distance from z to the nearest point of Z + Z*tau."""
    t = z.imag / tau.imag
    s = z.real - t * tau.real
    best = math.inf
    for dn in (math.floor(t), math.floor(t) + 1):
        for dm in (math.floor(s), math.floor(s) + 1):
            best = min(best, abs(z - dm - dn * tau))
    return best
