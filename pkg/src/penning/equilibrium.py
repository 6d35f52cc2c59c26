"""Rotating-frame potential energy and its minimization.

Positions are ``(N, 2)`` arrays in units of ``l0``.  Flattened coordinate
vectors (gradient, Hessian rows) use the block layout
``[x_1 .. x_N, y_1 .. y_N]``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, SaddlePointError, SingularConfigurationError
from .params import TrapConfig
from .seedlat import SeedLattice, generate_seed

log = logging.getLogger(__name__)

COULOMB = 0.5  # k_e e^2 in internal units
DEFAULT_TOL = 1e-10
MAX_ITER = 10_000
SADDLE_TOL = 1e-8
MAX_KICKS = 10


@dataclass(frozen=True)
class Crystal:
    positions: np.ndarray  # (N, 2)
    energy: float
    grad_norm: float
    iterations: int = 0

    @property
    def n_ions(self) -> int:
        return len(self.positions)

    @property
    def radii(self) -> np.ndarray:
        return np.hypot(self.positions[:, 0], self.positions[:, 1])

    @property
    def phases(self) -> np.ndarray:
        return np.arctan2(self.positions[:, 1], self.positions[:, 0])

    @property
    def radii_phases(self) -> np.ndarray:
        return np.column_stack([self.radii, self.phases])


def _pair_geometry(positions: np.ndarray):
    pos = np.asarray(positions, dtype=float)
    dx = pos[:, 0, None] - pos[None, :, 0]
    dy = pos[:, 1, None] - pos[None, :, 1]
    r2 = dx * dx + dy * dy
    n = len(pos)
    np.fill_diagonal(r2, np.inf)
    if n > 1 and r2.min() <= 1e-24:
        i, j = np.unravel_index(np.argmin(r2), r2.shape)
        raise SingularConfigurationError(f"ions {i} and {j} coincide")
    return dx, dy, r2


def potential_energy(positions, config: TrapConfig, coulomb: bool = True) -> float:
    pos = np.asarray(positions, dtype=float)
    energy = 0.5 * np.sum(config.stiffness_x * pos[:, 0] ** 2 + config.stiffness_y * pos[:, 1] ** 2)
    if coulomb and len(pos) > 1:
        _, _, r2 = _pair_geometry(pos)
        iu = np.triu_indices(len(pos), 1)
        energy += COULOMB * np.sum(1.0 / np.sqrt(r2[iu]))
    return float(energy)


def gradient(positions, config: TrapConfig, coulomb: bool = True) -> np.ndarray:
    pos = np.asarray(positions, dtype=float)
    gx = config.stiffness_x * pos[:, 0]
    gy = config.stiffness_y * pos[:, 1]
    if coulomb and len(pos) > 1:
        dx, dy, r2 = _pair_geometry(pos)
        inv_r3 = r2**-1.5
        gx = gx - COULOMB * np.sum(dx * inv_r3, axis=1)
        gy = gy - COULOMB * np.sum(dy * inv_r3, axis=1)
    return np.concatenate([gx, gy])


def hessian(positions, config: TrapConfig, coulomb: bool = True) -> np.ndarray:
    """Analytic Hessian; at an equilibrium this is the planar stiffness matrix."""
    pos = np.asarray(positions, dtype=float)
    n = len(pos)
    hxx = np.zeros((n, n))
    hyy = np.zeros((n, n))
    hxy = np.zeros((n, n))
    if coulomb and n > 1:
        dx, dy, r2 = _pair_geometry(pos)
        inv_r3 = r2**-1.5
        inv_r5 = r2**-2.5
        # off-diagonal blocks: k (r^2 - 3 d_a d_b) / r^5 and -3 k dx dy / r^5
        hxx = COULOMB * (inv_r3 - 3.0 * dx * dx * inv_r5)
        hyy = COULOMB * (inv_r3 - 3.0 * dy * dy * inv_r5)
        hxy = -3.0 * COULOMB * dx * dy * inv_r5
        for block in (hxx, hyy, hxy):
            np.fill_diagonal(block, 0.0)
            block[np.diag_indices(n)] = -block.sum(axis=1)
    hxx[np.diag_indices(n)] += config.stiffness_x
    hyy[np.diag_indices(n)] += config.stiffness_y
    return np.block([[hxx, hxy], [hxy.T, hyy]])


def rotation_generator(positions) -> np.ndarray:
    """Unit vector of an infinitesimal rigid rotation, block layout."""
    pos = np.asarray(positions, dtype=float)
    v = np.concatenate([-pos[:, 1], pos[:, 0]])
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else v


def _as_positions(x: np.ndarray, n: int) -> np.ndarray:
    return np.column_stack([x[:n], x[n:]])


def _saddle_kick(x, direction, size, n, config, coulomb):
    best = None
    for sign in (1.0, -1.0):
        trial = x + sign * size * direction
        e = potential_energy(_as_positions(trial, n), config, coulomb)
        if best is None or e < best[1]:
            best = (trial, e)
    return best


def find_equilibrium(
    seed: SeedLattice | np.ndarray,
    config: TrapConfig,
    tol: float = DEFAULT_TOL,
    max_iter: int = MAX_ITER,
    coulomb: bool = True,
    callback=None,
) -> Crystal:
    """Minimize the rotating-frame energy starting from ``seed``.

    Newton steps on the Hessian shifted by a multiple of the identity until
    positive definite, with a backtracking line search on the energy.  If the
    Newton direction cannot lower the energy a steepest-descent step is tried.
    Without a rotating wall the rigid-rotation direction is projected out of
    every step, which pins the crystal orientation.

    ``callback(iteration, energy, grad_norm)`` is called after each accepted
    step.
    """
    pos0 = seed.positions if isinstance(seed, SeedLattice) else np.asarray(seed, dtype=float)
    n = len(pos0)
    x = np.concatenate([pos0[:, 0], pos0[:, 1]]).astype(float)
    pin_rotation = config.omega_wall == 0.0 and n > 1
    typical = float(np.median(np.abs(x))) or 1.0

    energy = potential_energy(_as_positions(x, n), config, coulomb)
    g = gradient(_as_positions(x, n), config, coulomb)
    max_step = 0.25 * typical
    kicks = 0
    it = 0
    while True:
        gnorm = float(np.max(np.abs(g)))
        if gnorm < tol:
            # symmetric seeds can stall on a saddle where the gradient has no
            # component along the unstable direction; push off it and resume
            w, v = np.linalg.eigh(hessian(_as_positions(x, n), config, coulomb))
            if w[0] >= -SADDLE_TOL or kicks >= MAX_KICKS:
                break
            kicks += 1
            x, energy = _saddle_kick(x, v[:, 0], 0.05 * typical, n, config, coulomb)
            g = gradient(_as_positions(x, n), config, coulomb)
            continue
        if it >= max_iter:
            raise ConvergenceError(
                f"no convergence after {max_iter} iterations (grad_norm={gnorm:.3e})",
                gnorm,
                it,
            )
        it += 1
        pos = _as_positions(x, n)
        rot = rotation_generator(pos) if pin_rotation else None
        g_eff = g - rot * (rot @ g) if rot is not None else g

        w, v = np.linalg.eigh(hessian(pos, config, coulomb))
        scale = max(float(np.max(np.abs(w))), 1e-300)
        floor = 1e-10 * scale
        shift = 0.0 if w[0] > floor else (floor - w[0]) + 1e-3 * scale
        coeff = v.T @ g_eff
        if rot is not None:
            # the Goldstone direction carries no gradient; leave it out entirely
            coeff = np.where(np.abs(v.T @ rot) < 0.5, coeff, 0.0)
        step = -v @ (coeff / (w + shift))
        if w[0] < -floor:
            # follow negative curvature downhill as well
            d = v[:, 0] if g_eff @ v[:, 0] <= 0 else -v[:, 0]
            step = step + d * max_step
        if rot is not None:
            step -= rot * (rot @ step)
        smax = float(np.max(np.abs(step)))
        if smax > max_step:
            step *= max_step / smax

        accepted = False
        for direction in (step, -g_eff * (max_step / max(float(np.max(np.abs(g_eff))), 1e-300))):
            t = 1.0
            for _ in range(40):
                trial = x + t * direction
                try:
                    e_trial = potential_energy(_as_positions(trial, n), config, coulomb)
                except SingularConfigurationError:
                    e_trial = math.inf
                if e_trial < energy:
                    accepted = True
                    break
                # near convergence the energy change drops below rounding;
                # accept on a decreasing gradient instead
                if e_trial <= energy + 64 * np.finfo(float).eps * abs(energy):
                    g_trial = gradient(_as_positions(trial, n), config, coulomb)
                    if np.max(np.abs(g_trial)) < gnorm:
                        accepted = True
                        break
                t *= 0.5
            if accepted:
                break
        if not accepted:
            raise ConvergenceError(
                f"line search failed at iteration {it} (grad_norm={gnorm:.3e})", gnorm, it
            )
        x = trial
        energy = e_trial
        g = gradient(_as_positions(x, n), config, coulomb)
        if callback is not None:
            callback(it, energy, float(np.max(np.abs(g))))

    pos = _as_positions(x, n)
    gnorm = float(np.max(np.abs(g)))
    w_min = float(np.linalg.eigvalsh(hessian(pos, config, coulomb))[0])
    if w_min < -SADDLE_TOL:
        raise SaddlePointError(
            f"converged to a saddle point (smallest Hessian eigenvalue {w_min:.3e})", w_min
        )
    log.debug("equilibrium: N=%d, %d iterations, grad_norm=%.2e", n, it, gnorm)
    return Crystal(positions=pos, energy=energy, grad_norm=gnorm, iterations=it)


def solve(config: TrapConfig, spacing: float | None = None, tol: float = DEFAULT_TOL) -> Crystal:
    """Seed the lattice for ``config`` and relax it."""
    return find_equilibrium(generate_seed(config, spacing), config, tol=tol)
