"""Axial (out-of-plane) normal modes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibrium import COULOMB, Crystal
from .errors import ImaginaryModeError, NumericalError
from .params import TrapConfig

DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class AxialModes:
    """Axial spectrum in ``omega_z`` units, ascending in eigenvalue.

    ``frequencies`` holds ``|omega|``; entries with ``imaginary[i]`` set came
    from negative stiffness eigenvalues.
    """

    eigenvalues: np.ndarray
    frequencies: np.ndarray
    imaginary: np.ndarray
    eigenvectors: np.ndarray  # column nu = b^{z nu}

    @property
    def stable(self) -> bool:
        return not bool(self.imaginary.any())

    @property
    def signed_frequencies(self) -> np.ndarray:
        """Real frequencies as-is, imaginary ones as ``-|omega|``."""
        return np.where(self.imaginary, -self.frequencies, self.frequencies)

    def __len__(self) -> int:
        return len(self.frequencies)


def build_kzz(crystal: Crystal | np.ndarray, config: TrapConfig | None = None) -> np.ndarray:
    """Axial stiffness matrix in units of ``m omega_z^2``.

    Rows sum to one: the centre-of-mass motion only feels the trap.
    """
    pos = crystal.positions if isinstance(crystal, Crystal) else np.asarray(crystal, dtype=float)
    dx = pos[:, 0, None] - pos[None, :, 0]
    dy = pos[:, 1, None] - pos[None, :, 1]
    r2 = dx * dx + dy * dy
    np.fill_diagonal(r2, np.inf)
    k = COULOMB * r2**-1.5
    kzz = k.copy()
    np.fill_diagonal(kzz, 1.0 - k.sum(axis=1))
    return kzz


def harmonic_probes(positions: np.ndarray | None, n: int, count: int = 12) -> np.ndarray:
    """Deterministic probe vectors used to fix bases inside degenerate clusters."""
    probes = []
    if positions is not None:
        pos = np.asarray(positions, dtype=float)
        r = np.hypot(pos[:, 0], pos[:, 1])
        th = np.arctan2(pos[:, 1], pos[:, 0])
        probes.append(np.ones(n))
        for m in range(1, 4):
            probes.append(r**m * np.cos(m * th))
            probes.append(r**m * np.sin(m * th))
        probes.append(r**2)
    rng = np.random.default_rng(12345)
    probes.extend(rng.standard_normal((count, n)))
    return np.array(probes).T


def fix_signs(vectors: np.ndarray, probes: np.ndarray | None = None) -> np.ndarray:
    """Fix the sign of each column without reference to the ion labelling.

    The sign makes ``sum(v**3)`` positive; if that vanishes by symmetry the
    first probe with a nonzero overlap decides, and only then the largest
    entry (first one on ties).
    """
    out = vectors.copy()
    for col in range(out.shape[1]):
        v = out[:, col]
        keys = [np.sum(v**3)]
        if probes is not None:
            keys.extend(probes.T @ v / np.maximum(np.linalg.norm(probes, axis=0), 1e-300))
        sign = 0.0
        for key in keys:
            if abs(key) > 1e-8:
                sign = np.sign(key)
                break
        if sign == 0.0:
            mag = np.abs(v)
            idx = int(np.argmax(mag >= mag.max() * (1 - 1e-9)))
            sign = 1.0 if v[idx] >= 0 else -1.0
        out[:, col] = sign * v
    return out


def canonicalize_clusters(
    eigenvalues: np.ndarray, vectors: np.ndarray, probes: np.ndarray, tol: float
) -> np.ndarray:
    """Rotate each near-degenerate eigenvector cluster onto a reproducible basis."""
    out = vectors.copy()
    n = len(eigenvalues)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and eigenvalues[stop] - eigenvalues[stop - 1] < tol:
            stop += 1
        if stop - start > 1:
            sub = vectors[:, start:stop]
            # Gram-Schmidt of the projected probes, in probe order
            basis: list[np.ndarray] = []
            for p in (sub @ (sub.T @ probes)).T:
                for b in basis:
                    p = p - b * (b @ p)
                norm = np.linalg.norm(p)
                if norm > 1e-6:
                    basis.append(p / norm)
                if len(basis) == stop - start:
                    break
            if len(basis) == stop - start:
                out[:, start:stop] = np.array(basis).T
        start = stop
    return out


def axial_modes(kzz: np.ndarray, positions: np.ndarray | None = None) -> AxialModes:
    kzz = np.asarray(kzz, dtype=float)
    try:
        lam, vec = np.linalg.eigh(0.5 * (kzz + kzz.T))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"axial eigensolver failed: {exc}") from exc
    # eigenvalues are omega^2 (m = 1); cluster on frequency spacing
    freq = np.sqrt(np.abs(lam))
    signed = np.where(lam < 0, -freq, freq)
    probes = harmonic_probes(positions, len(lam))
    vec = canonicalize_clusters(signed, vec, probes, DEGENERACY_TOL)
    # the seeded random probes depend on labelling; only the harmonics fix signs
    vec = fix_signs(vec, probes[:, :8] if positions is not None else None)
    return AxialModes(eigenvalues=lam, frequencies=freq, imaginary=lam < 0, eigenvectors=vec)


def mode_displacement(modes: AxialModes, nu: int, amplitude: float = 1.0) -> np.ndarray:
    if not -len(modes) <= nu < len(modes):
        raise IndexError(f"mode index {nu} out of range for {len(modes)} modes")
    if modes.imaginary[nu]:
        raise ImaginaryModeError(f"axial mode {nu} is imaginary (|omega| = {modes.frequencies[nu]:.6g})")
    return amplitude * modes.eigenvectors[:, nu]
