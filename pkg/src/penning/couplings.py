"""Phonon-mediated Ising couplings ``J_ij`` for a spin-dependent optical force.

Couplings are reported in the dimensionless form

    J_hat = J / (F_O^2 / (4 m omega_z^2)),

for both branches, so that ``J_hat`` depends only on the mode data and the
beatnote ``mu`` (in ``omega_z`` units).  ``CouplingMatrix.scale_joule`` gives
the conversion back to joules for the drive's ``f_o``.

The stored matrix is symmetric and is meant for ``H = sum_{j,j'} J_jj' s_j s_j'``
over ordered pairs, so the physical energy of a pair ``i != j`` is ``2 J_ij``.
Diagonal entries are a constant shift; they are kept for sum-rule checks but
ignored by every fit and histogram.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .axial import AxialModes
from .equilibrium import Crystal
from .errors import ImaginaryModeError, ParameterError, ResonanceError
from .params import TrapConfig
from .planar import PlanarBasis, PlanarModes

log = logging.getLogger(__name__)

RESONANCE_TOL = 1e-9
DEGENERATE_GAP = 1e-12

AXIS_AXIAL = "axial"
AXIS_PLANAR_X = "planar-x"


@dataclass(frozen=True)
class DriveConfig:
    """Spin-dependent optical drive.

    ``f_o`` is in newtons, ``mu`` in ``omega_z`` units and ``delta_k`` in
    ``1/l0`` (used only by the planar drive).
    """

    mu: float
    f_o: float = 1.0
    delta_k: float = 0.0
    axis: str = AXIS_AXIAL

    def __post_init__(self):
        if not self.f_o >= 0:
            raise ParameterError(f"f_o must be >= 0, got {self.f_o!r}")
        if not self.mu > 0:
            raise ParameterError(f"mu must be positive, got {self.mu!r}")
        if self.axis not in (AXIS_AXIAL, AXIS_PLANAR_X):
            raise ParameterError(f"axis must be 'axial' or 'planar-x', got {self.axis!r}")
        if self.axis == AXIS_PLANAR_X and not self.delta_k > 0:
            raise ParameterError(f"planar drive needs delta_k > 0, got {self.delta_k!r}")

    @property
    def detuning(self) -> float:
        """``delta = mu - omega_z`` in ``omega_z`` units."""
        return self.mu - 1.0


@dataclass(frozen=True)
class CouplingMatrix:
    j: np.ndarray  # (N, N), units of F_O^2 / (4 m omega_z^2)
    drive: DriveConfig
    kind: str  # axial-static | axial-time | planar-static
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def n_ions(self) -> int:
        return len(self.j)

    def off_diagonal(self) -> np.ndarray:
        """Upper-triangle entries ``J_ij``, ``i < j``."""
        return self.j[np.triu_indices(self.n_ions, 1)]

    def scale_joule(self, config: TrapConfig) -> float:
        """Joules per unit of ``j`` for this drive's force."""
        return self.drive.f_o**2 / (4.0 * config.mass * config.omega_z**2)


def _check_resonance(mu: float, freqs: np.ndarray, skip: np.ndarray | None = None) -> None:
    dist = np.abs(freqs - mu)
    if skip is not None:
        dist = np.where(skip, np.inf, dist)
    if len(dist) and dist.min() < RESONANCE_TOL:
        idx = int(np.argmin(dist))
        raise ResonanceError(
            f"mu = {mu!r} is within {RESONANCE_TOL:g} omega_z of mode {idx} "
            f"(omega = {float(freqs[idx])!r})",
            idx,
            float(freqs[idx]),
        )


def _require_stable(modes: AxialModes) -> None:
    if not modes.stable:
        bad = int(np.flatnonzero(modes.imaginary)[0])
        raise ImaginaryModeError(
            f"axial mode {bad} is imaginary; couplings need a stable crystal"
        )


def _force_weight(drive: DriveConfig) -> float:
    # J_hat is normalized to F_O^2; a zero force switches the coupling off
    return 1.0 if drive.f_o > 0 else 0.0


def axial_j_static(modes: AxialModes, drive: DriveConfig) -> CouplingMatrix:
    """Time-independent axial coupling ``sum_nu b_j b_j' / (mu^2 - omega_nu^2)``."""
    _require_stable(modes)
    _check_resonance(drive.mu, modes.frequencies)
    b = modes.eigenvectors
    weights = 1.0 / (drive.mu**2 - modes.frequencies**2)
    j = (b * weights) @ b.T
    j = _force_weight(drive) * 0.5 * (j + j.T)
    return CouplingMatrix(j=j, drive=drive, kind="axial-static", metadata=_meta(drive, modes.frequencies))


def axial_bracket(omega: np.ndarray, mu: float, t: float) -> np.ndarray:
    """``1 + cos 2 mu t - (2 mu / omega) sin(omega t) sin(mu t)``."""
    omega = np.asarray(omega, dtype=float)
    return 1.0 + np.cos(2.0 * mu * t) - (2.0 * mu / omega) * np.sin(omega * t) * np.sin(mu * t)


def axial_j_time(modes: AxialModes, drive: DriveConfig, t: float) -> CouplingMatrix:
    """Axial coupling including its time dependence; ``J(0) = 2 J_static``."""
    _require_stable(modes)
    _check_resonance(drive.mu, modes.frequencies)
    b = modes.eigenvectors
    w = modes.frequencies
    weights = axial_bracket(w, drive.mu, t) / (drive.mu**2 - w**2)
    j = (b * weights) @ b.T
    j = _force_weight(drive) * 0.5 * (j + j.T)
    meta = _meta(drive, w)
    meta["t"] = float(t)
    return CouplingMatrix(j=j, drive=drive, kind="axial-time", metadata=meta)


def laser_phases(crystal: Crystal, delta_k: float, phase: str = "laser") -> np.ndarray:
    """Per-ion phase ``theta_j``; the coupling uses ``cos(theta_j - theta_j')``.

    ``phase="laser"`` gives ``delta_k * x_j`` (the optical phase at the ion);
    ``phase="polar"`` gives the literal equilibrium polar angle ``phi_j``.
    """
    if phase == "laser":
        return delta_k * crystal.positions[:, 0]
    if phase == "polar":
        return crystal.phases
    raise ParameterError(f"phase must be 'laser' or 'polar', got {phase!r}")


def planar_j_static(
    modes: PlanarModes,
    basis: PlanarBasis,
    crystal: Crystal,
    drive: DriveConfig,
    phase: str = "laser",
) -> CouplingMatrix:
    """Slow-rotation planar coupling mediated by both planar branches.

    ``J_hat_jj' = sum_lambda 2 w / (mu^2 - w^2) Re(conj(A_j) A_j') cos(theta_j - theta_j')``
    with ``A = bx @ alpha`` the x-projection of each mode (``hbar m = 1``).
    Zero modes are skipped.
    """
    keep = ~modes.zero_modes
    _check_resonance(drive.mu, modes.frequencies, skip=~keep)
    w = modes.frequencies[keep]
    amp = (basis.bx @ modes.alphas)[:, keep]  # (N, n_modes)
    weights = 2.0 * w / (drive.mu**2 - w**2)
    mode_sum = np.real((amp.conj() * weights) @ amp.T)
    theta = laser_phases(crystal, drive.delta_k, phase)
    j = mode_sum * np.cos(theta[:, None] - theta[None, :])
    j = _force_weight(drive) * 0.5 * (j + j.T)
    meta = _meta(drive, modes.frequencies)
    meta["phase"] = phase
    meta["excluded_modes"] = [int(i) for i in np.flatnonzero(~keep)]
    return CouplingMatrix(j=j, drive=drive, kind="planar-static", metadata=meta)


def midgap_detunings(modes: AxialModes, k: int) -> float:
    """``mu`` halfway between ascending modes ``k`` and ``k+1`` (1-based)."""
    _require_stable(modes)
    n = len(modes)
    if not 1 <= k < n:
        raise ParameterError(f"gap index k must satisfy 1 <= k < {n}, got {k}")
    w = np.sort(modes.frequencies)
    lo, hi = w[k - 1], w[k]
    if hi - lo < DEGENERATE_GAP:
        warnings.warn(
            f"gap between axial modes {k} and {k + 1} is degenerate ({hi - lo:.2e}); "
            "mu sits on a resonance",
            RuntimeWarning,
            stacklevel=2,
        )
    return 0.5 * (lo + hi)


def _meta(drive: DriveConfig, freqs: np.ndarray) -> dict[str, Any]:
    return {
        "mu_over_omega_z": drive.mu,
        "delta_over_omega_z": drive.detuning,
        "f_o_newton": drive.f_o,
        "delta_k_per_l0": drive.delta_k,
        "axis": drive.axis,
        "units": "F_O^2 / (4 m omega_z^2)",
        "pair_energy": "2 * J_ij for i != j (ordered-pair sum)",
        "n_modes": int(len(freqs)),
    }
