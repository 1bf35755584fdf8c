"""Dense complex linear algebra on tensor legs of (C^M)^(x N).

A basis state of the full space is an N-digit base-M integer with leg 1 the
most significant digit.  Matrices are plain complex ndarrays; they are
treated as immutable once built.  Two-site operators are applied to legs
in place of materializing their Kronecker embedding, which keeps a single
application at O(M^(N+2)) per column of the target.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BadLeg, DimMismatch

CMatrix = np.ndarray

EMBED_DIM_CAP = 4096


def norm_max(a: np.ndarray) -> float:
    """Canonical residual norm: max |entry|."""
    return float(np.max(np.abs(a)))


def identity(dim: int) -> CMatrix:
    return np.eye(dim, dtype=complex)


@dataclass(frozen=True)
class LegSpace:
    """Tensor factorization (C^M)^(x N); leg indices are 1-based."""

    M: int
    N: int

    def __post_init__(self) -> None:
        if self.M < 1 or self.N < 1:
            raise DimMismatch(f"need M >= 1 and N >= 1, got M={self.M}, N={self.N}")

    @property
    def dim(self) -> int:
        return self.M ** self.N

    def check_leg(self, leg: int) -> None:
        if not 1 <= leg <= self.N:
            raise BadLeg(f"leg {leg} outside 1..{self.N}")


@lru_cache(maxsize=64)
def clock_shift(big_m: int) -> tuple[CMatrix, CMatrix]:
    """The finite Heisenberg pair (Q, Lambda) with Q^M = Lambda^M = 1.

    Q is diagonal with entries exp(2*pi*i*k/M) for k = 1..M; Lambda is the
    cyclic step with ones where the column index follows the row index.
    """
    q = np.diag(np.exp(2j * math.pi * np.arange(1, big_m + 1) / big_m))
    lam = np.zeros((big_m, big_m), dtype=complex)
    for k in range(big_m):
        lam[k, (k + 1) % big_m] = 1.0
    q.flags.writeable = False
    lam.flags.writeable = False
    return q, lam


@lru_cache(maxsize=4096)
def basis_T(alpha: tuple[int, int], big_m: int) -> CMatrix:
    """Twist-basis matrix exp(a1*a2*pi*i/M) Q^a1 Lambda^a2.

    Defined for arbitrary integer pairs; the matrix part is M-periodic in
    each component while the scalar phase keeps track of unreduced indices,
    so products satisfy T_a T_b = kappa_{a,b} T_{a+b} exactly.
    """
    a1, a2 = alpha
    q, lam = clock_shift(big_m)
    phase = cmath.exp(1j * math.pi * a1 * a2 / big_m)
    mat = phase * (
        np.linalg.matrix_power(q, a1 % big_m)
        @ np.linalg.matrix_power(lam, a2 % big_m)
    )
    mat.flags.writeable = False
    return mat


def kappa(alpha: tuple[int, int], beta: tuple[int, int], big_m: int) -> complex:
    """Structure phase in T_a T_b = kappa_{a,b} T_{a+b}."""
    return cmath.exp(1j * math.pi * (alpha[1] * beta[0] - alpha[0] * beta[1]) / big_m)


def permutation_two_site(big_m: int) -> CMatrix:
    """The M^2 x M^2 swap P(a x b) = b x a."""
    p = np.zeros((big_m * big_m, big_m * big_m), dtype=complex)
    for k in range(big_m):
        for l in range(big_m):
            p[k * big_m + l, l * big_m + k] = 1.0
    return p


def permutation_P(i: int, j: int, space: LegSpace) -> CMatrix:
    """Transposition of legs i and j on the full space."""
    space.check_leg(i)
    space.check_leg(j)
    if i == j:
        raise BadLeg("permutation needs two distinct legs")
    dim, m, n = space.dim, space.M, space.N
    idx = np.arange(dim)
    digits = (idx[:, None] // m ** (n - 1 - np.arange(n))) % m
    swapped = digits.copy()
    swapped[:, [i - 1, j - 1]] = digits[:, [j - 1, i - 1]]
    target = swapped @ (m ** (n - 1 - np.arange(n)))
    p = np.zeros((dim, dim), dtype=complex)
    p[target, idx] = 1.0
    return p


def apply_two_site(op2: CMatrix, i: int, j: int, target: CMatrix, space: LegSpace) -> CMatrix:
    """Left-multiply `target` by op2 acting on legs (i, j), without embedding.

    `target` may be a vector of length M^N or a matrix with M^N rows.
    """
    space.check_leg(i)
    space.check_leg(j)
    if i == j:
        raise BadLeg("two-site operator needs distinct legs")
    m, n, dim = space.M, space.N, space.dim
    if op2.shape != (m * m, m * m):
        raise DimMismatch(f"two-site operator must be {m * m} x {m * m}")
    if target.shape[0] != dim:
        raise DimMismatch(f"target must have {dim} rows")
    cols = 1 if target.ndim == 1 else target.shape[1]
    v = target.reshape((m,) * n + (cols,))
    v = np.moveaxis(v, (i - 1, j - 1), (0, 1))
    inner = v.shape[2:]
    w = op2 @ v.reshape(m * m, -1)
    w = np.moveaxis(w.reshape((m, m) + inner), (0, 1), (i - 1, j - 1))
    return w.reshape(target.shape)


def embed_two_site(op2: CMatrix, i: int, j: int, space: LegSpace) -> CMatrix:
    """Dense Kronecker embedding of a two-site operator onto legs (i, j).

    Reference implementation for apply_two_site; capped at small dimensions.
    """
    space.check_leg(i)
    space.check_leg(j)
    if i == j:
        raise BadLeg("two-site operator needs distinct legs")
    m, n = space.M, space.N
    if op2.shape != (m * m, m * m):
        raise DimMismatch(f"two-site operator must be {m * m} x {m * m}")
    if space.dim > EMBED_DIM_CAP:
        raise DimMismatch(f"dense embedding capped at dim {EMBED_DIM_CAP}")
    blocks = op2.reshape(m, m, m, m)  # [row_i, row_j, col_i, col_j]
    out = np.zeros((space.dim, space.dim), dtype=complex)
    eye = np.eye(m, dtype=complex)
    for p in range(m):
        for r in range(m):
            for q in range(m):
                for s in range(m):
                    factors = []
                    for leg in range(1, n + 1):
                        if leg == i:
                            e = np.zeros((m, m), dtype=complex)
                            e[p, r] = 1.0
                            factors.append(e)
                        elif leg == j:
                            e = np.zeros((m, m), dtype=complex)
                            e[q, s] = 1.0
                            factors.append(e)
                        else:
                            factors.append(eye)
                    term = factors[0]
                    for f in factors[1:]:
                        term = np.kron(term, f)
                    out += blocks[p, q, r, s] * term
    return out


def kron_power(mat: CMatrix, n: int) -> CMatrix:
    """mat tensored with itself n times."""
    out = np.array([[1.0 + 0j]])
    for _ in range(n):
        out = np.kron(out, mat)
    return out


def leg_operator(mat: CMatrix, leg: int, space: LegSpace) -> CMatrix:
    """Single-site operator embedded on one leg (identity elsewhere)."""
    space.check_leg(leg)
    m = space.M
    if mat.shape != (m, m):
        raise DimMismatch(f"single-site operator must be {m} x {m}")
    out = np.array([[1.0 + 0j]])
    for k in range(1, space.N + 1):
        out = np.kron(out, mat if k == leg else np.eye(m, dtype=complex))
    return out
