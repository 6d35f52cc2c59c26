"""Closed-hexagonal-shell seed lattice for the equilibrium search."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import TrapConfig

# unit lattice vectors of the triangular lattice, first one along x
_A1 = np.array([1.0, 0.0])
_A2 = np.array([0.5, math.sqrt(3.0) / 2.0])
# walking directions around a hexagonal ring, in units of the lattice vectors
_RING_STEPS = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)]


@dataclass(frozen=True)
class SeedLattice:
    positions: np.ndarray  # (N, 2), l0 units
    n_closed_shells: int
    spacing: float


def shell_count(n_ions: int) -> int:
    """Number of complete hexagonal shells that ``n_ions`` ions can fill."""
    # isqrt keeps the floor exact at the centered hexagonal numbers
    return (math.isqrt(9 + 12 * (n_ions - 1)) - 3) // 6


def closed_shell_size(shells: int) -> int:
    return 1 + 3 * shells * (shells + 1)


def ring_sites(ring: int) -> np.ndarray:
    """The 6*ring sites of hexagonal ring ``ring`` (unit spacing), (6*ring, 2)."""
    if ring == 0:
        return np.zeros((1, 2))
    i, j = ring, 0
    sites = []
    for di, dj in _RING_STEPS:
        for _ in range(ring):
            sites.append(i * _A1 + j * _A2)
            i += di
            j += dj
    return np.array(sites)


def external_potential(points: np.ndarray, config: TrapConfig) -> np.ndarray:
    """Single-ion rotating-frame trap energy (no Coulomb), internal units."""
    return 0.5 * (config.stiffness_x * points[:, 0] ** 2 + config.stiffness_y * points[:, 1] ** 2)


def default_spacing(config: TrapConfig) -> float:
    return config.omega_eff ** (-2.0 / 3.0) if config.omega_eff > 0 else 1.0


def generate_seed(config: TrapConfig, spacing: float | None = None) -> SeedLattice:
    """Fill closed shells, then put leftover ions on the cheapest outer-ring sites.

    Outer sites are ranked by the external potential; ties are broken by the
    polar angle in ``[0, 2 pi)`` and then by the site's position on the ring.
    """
    if spacing is None:
        spacing = default_spacing(config)
    if not spacing > 0:
        raise ValueError(f"spacing must be positive, got {spacing!r}")
    n = config.n_ions
    shells = shell_count(n)
    blocks = [ring_sites(k) for k in range(shells + 1)]
    filled = np.concatenate(blocks) * spacing
    extra = n - len(filled)
    if extra > 0:
        cand = ring_sites(shells + 1) * spacing
        energy = external_potential(cand, config)
        # round so that symmetry-equivalent sites tie exactly
        scale = max(np.abs(energy).max(), 1e-300)
        energy_key = np.round(energy / scale, 12)
        angle = np.mod(np.arctan2(cand[:, 1], cand[:, 0]), 2 * math.pi)
        angle_key = np.round(angle, 12)
        order = np.lexsort((np.arange(len(cand)), angle_key, energy_key))
        filled = np.concatenate([filled, cand[order[:extra]]])
    return SeedLattice(positions=filled, n_closed_shells=shells, spacing=spacing)
