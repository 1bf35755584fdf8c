"""Seeded rejection sampling of pole-free arguments.

Points are drawn uniformly from the fundamental cell shrunk away from its
boundary; a draw is accepted only if every relevant shifted argument stays
at least the pole-guard distance away from the period lattice.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from .elliptic import lattice_distance
from .errors import SamplingExhausted

_MARGIN = 0.05


def draw_cell_point(rng: np.random.Generator, tau: complex) -> complex:
    """One point from the fundamental cell, kept off the boundary."""
    u, v = rng.uniform(_MARGIN, 1.0 - _MARGIN, 2)
    return complex(u + v * tau)


def admissible(z: complex, tau: complex, guard: float, offsets: Iterable[complex]) -> bool:
    return all(lattice_distance(z + off, tau) >= guard for off in offsets)


def sample_argument(
    rng: np.random.Generator,
    tau: complex,
    guard: float,
    offsets: Iterable[complex] = (0.0,),
    max_tries: int = 400,
) -> complex:
    """A single spectral argument with every offset shifted copy pole-free."""
    offs = tuple(offsets)
    for _ in range(max_tries):
        z = draw_cell_point(rng, tau)
        if admissible(z, tau, guard, offs):
            return z
    raise SamplingExhausted("could not draw an admissible argument")


def sample_z_vector(
    rng: np.random.Generator,
    tau: complex,
    guard: float,
    nlegs: int,
    diff_offsets: Iterable[complex] = (0.0,),
    max_tries: int = 400,
) -> np.ndarray:
    """Coordinates z_1..z_n such that every pairwise difference, shifted by
    each of `diff_offsets`, stays pole-free."""
    offs = tuple(diff_offsets)
    for _ in range(max_tries):
        z = np.array([draw_cell_point(rng, tau) for _ in range(nlegs)])
        ok = True
        for i in range(nlegs):
            for j in range(nlegs):
                if i == j:
                    continue
                d = complex(z[i] - z[j])
                if not admissible(d, tau, guard, offs):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return z
    raise SamplingExhausted(f"could not draw {nlegs} admissible coordinates")
