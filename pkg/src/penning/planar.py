"""Planar normal modes of the rotating crystal.

The in-plane motion obeys the gyroscopic equation

    m d^2u/dt^2 = -K u - T du/dt,      T = -e B_eff (eps per ion),

with ``K`` the planar stiffness (the equilibrium Hessian).  In the basis of
the stiffness eigenvectors ``b`` the normal-mode amplitudes ``alpha`` solve
the quadratic eigenvalue problem

    (m w^2 + i w T_b - m Omega0^2) alpha = 0,

which is linearized to the Hermitian ``4N x 4N`` problem

    [[-i T_b / m, Omega0], [Omega0, 0]] x = w x,   x = (w alpha, Omega0 alpha) / c.

Amplitudes are normalized so that the phonon operators are canonical:
``sum_nu (w^2 + w0_nu^2) |alpha^nu|^2 = w / (hbar m)``.  Internally
``hbar * m = 1`` (couplings carry explicit ``hbar`` factors that cancel).
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .axial import canonicalize_clusters, fix_signs, harmonic_probes
from .equilibrium import Crystal, hessian
from .errors import NumericalError, UnstableEquilibriumError
from .params import TrapConfig

log = logging.getLogger(__name__)

GOLDSTONE_TOL = 1e-8
ZERO_MODE_TOL = 1e-10
OVERLAP_WARN_OMEGA_EFF = 0.2189


@dataclass(frozen=True)
class PlanarBasis:
    k_matrix: np.ndarray  # (2N, 2N), units of m omega_z^2
    eigenvalues: np.ndarray  # lambda_nu / m, ascending
    omega0: np.ndarray  # sqrt(max(lambda, 0))
    b_vectors: np.ndarray  # column nu, block layout [x..., y...]

    @property
    def n_ions(self) -> int:
        return len(self.omega0) // 2

    @property
    def bx(self) -> np.ndarray:
        return self.b_vectors[: self.n_ions]

    @property
    def by(self) -> np.ndarray:
        return self.b_vectors[self.n_ions :]


@dataclass(frozen=True)
class GyroMatrix:
    t_matrix: np.ndarray  # (2N, 2N) antisymmetric, units of m omega_z
    omega_ceff: float


@dataclass(frozen=True)
class PlanarModes:
    frequencies: np.ndarray  # (2N,) ascending, >= 0
    alphas: np.ndarray  # (2N, 2N) complex, column lambda
    branch_split: int
    zero_modes: np.ndarray  # bool mask, excluded from coupling sums
    pairing_residual: float

    def __len__(self) -> int:
        return len(self.frequencies)

    @property
    def lower(self) -> np.ndarray:
        return self.frequencies[: self.branch_split]

    @property
    def upper(self) -> np.ndarray:
        return self.frequencies[self.branch_split :]

    def site_amplitudes(self, basis: PlanarBasis) -> tuple[np.ndarray, np.ndarray]:
        """``alpha_j^{x lambda}`` and ``alpha_j^{y lambda}``, each (N, 2N) complex."""
        return basis.bx @ self.alphas, basis.by @ self.alphas


def gyro_matrix_site(n_ions: int, omega_ceff: float) -> np.ndarray:
    """Gyroscopic matrix in site coordinates: ``T^{xy}_{jj} = -omega_ceff``."""
    eye = np.eye(n_ions)
    zero = np.zeros((n_ions, n_ions))
    return -omega_ceff * np.block([[zero, eye], [-eye, zero]])


def build_planar_basis(crystal: Crystal, config: TrapConfig) -> PlanarBasis:
    k = hessian(crystal.positions, config)
    k = 0.5 * (k + k.T)
    lam, vec = np.linalg.eigh(k)
    if lam[0] < -GOLDSTONE_TOL:
        raise UnstableEquilibriumError(
            f"planar stiffness has a negative eigenvalue {lam[0]:.3e} (unstable equilibrium)"
        )
    omega0 = np.sqrt(np.clip(lam, 0.0, None))
    probes = harmonic_probes(None, len(lam))
    vec = fix_signs(canonicalize_clusters(omega0, vec, probes, 1e-9))
    return PlanarBasis(k_matrix=k, eigenvalues=lam, omega0=omega0, b_vectors=vec)


def build_gyro(basis: PlanarBasis, config: TrapConfig) -> GyroMatrix:
    t_site = gyro_matrix_site(basis.n_ions, config.omega_ceff)
    b = basis.b_vectors
    t = b.T @ t_site @ b
    return GyroMatrix(t_matrix=0.5 * (t - t.T), omega_ceff=config.omega_ceff)


def linearized_matrix(basis: PlanarBasis, gyro: GyroMatrix) -> np.ndarray:
    w0 = np.diag(basis.omega0)
    zero = np.zeros_like(w0)
    return np.block([[-1j * gyro.t_matrix, w0], [w0, zero]])


def _fix_phase(alpha: np.ndarray) -> np.ndarray:
    out = alpha.copy()
    mag = np.abs(out)
    for col in range(out.shape[1]):
        top = mag[:, col].max()
        if top == 0:
            continue
        idx = int(np.argmax(mag[:, col] >= top * (1 - 1e-9)))
        out[:, col] *= np.exp(-1j * np.angle(out[idx, col]))
    return out


def solve_qep(basis: PlanarBasis, gyro: GyroMatrix) -> PlanarModes:
    n2 = len(basis.omega0)
    m = linearized_matrix(basis, gyro)
    try:
        w, x = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"planar eigensolver failed: {exc}") from exc
    scale = max(float(np.max(np.abs(w))), 1.0)
    pos = w[n2:]
    neg = -w[:n2][::-1]
    pairing = float(np.max(np.abs(pos - neg))) / scale
    if pairing > 1e-8:
        raise NumericalError(f"linearized spectrum is not +/- paired (residual {pairing:.2e})")

    freqs = np.clip(pos, 0.0, None)
    top = x[:n2, n2:]
    zero = freqs < ZERO_MODE_TOL
    alphas = np.zeros((n2, n2), dtype=complex)
    alphas[:, ~zero] = top[:, ~zero] / np.sqrt(freqs[~zero])
    alphas = _fix_phase(alphas)
    if zero.any():
        log.info("planar: %d zero mode(s) excluded from coupling sums", int(zero.sum()))
    return PlanarModes(
        frequencies=freqs,
        alphas=alphas,
        branch_split=n2 // 2,
        zero_modes=zero,
        pairing_residual=pairing,
    )


def planar_modes(crystal: Crystal, config: TrapConfig) -> tuple[PlanarBasis, PlanarModes]:
    """Stiffness basis plus normal modes, with the branch/zero-mode sanity checks."""
    basis = build_planar_basis(crystal, config)
    modes = solve_qep(basis, build_gyro(basis, config))
    n = config.n_ions
    if modes.zero_modes.any() and config.omega_wall > 0:
        warnings.warn(
            f"{int(modes.zero_modes.sum())} zero-frequency planar mode(s) with a nonzero wall",
            RuntimeWarning,
            stacklevel=2,
        )
    if n >= 2:
        gaps = np.diff(modes.frequencies)
        if int(np.argmax(gaps)) != n - 1:
            warnings.warn(
                "largest planar spectral gap is not between the magnetron-like and "
                "cyclotron-like branches",
                RuntimeWarning,
                stacklevel=2,
            )
    if config.omega_eff >= OVERLAP_WARN_OMEGA_EFF:
        warnings.warn(
            f"omega_eff = {config.omega_eff:.4f} is near the axial/magnetron band-overlap regime",
            RuntimeWarning,
            stacklevel=2,
        )
    return basis, modes


@dataclass(frozen=True)
class IdentityReport:
    """Scaled residuals of the eigenvector identities (all should be ~0).

    Each residual is measured in the natural scale of the corresponding block
    of the Hermitian linearization, so that tiny basis frequencies (near
    Goldstone modes) do not inflate or hide errors.
    """

    orthogonality: float  # sum (w w' + w0^2) a* a' = delta w / (hbar m)
    completeness_velocity: float  # sum w (a* a' + a a'*) = delta / (hbar m)
    completeness_mixed: float  # sum (a* a' - a a'*) = 0
    completeness_position: float  # sum (a* a' + a a'*) / w = delta / (hbar m w0^2)
    commutator: float  # hbar m a^dag [Omega0^2 / w + w'] a' = delta
    qep: float  # max relative residual of the quadratic eigenproblem
    pairing: float

    def max(self) -> float:
        return max(
            self.orthogonality,
            self.completeness_velocity,
            self.completeness_mixed,
            self.completeness_position,
            self.commutator,
            self.qep,
            self.pairing,
        )

    def as_dict(self) -> dict[str, float]:
        return dict(self.__dict__)


def verify_identities(modes: PlanarModes, basis: PlanarBasis, gyro: GyroMatrix) -> IdentityReport:
    keep = ~modes.zero_modes
    w = modes.frequencies[keep]
    a = modes.alphas[:, keep]
    w0 = basis.omega0
    w0sq = w0**2
    n2 = len(w0)

    gram = a.conj().T @ (w0sq[:, None] * a)  # sum_nu w0^2 a*_l a_l'
    plain = a.conj().T @ a
    lhs4 = np.outer(w, w) * plain + gram
    sqrt_w = np.sqrt(w)
    ortho = np.abs((lhs4 - np.diag(w)) / np.outer(sqrt_w, sqrt_w)).max()

    # commutator: (1/w_l) sum_nu (w0^2 + w_l w_l') a*_l a_l'
    comm = np.abs((gram + np.outer(w, w) * plain) / w[:, None] - np.eye(len(w))).max()

    def herm(weights):
        s = (a * weights) @ a.conj().T  # sum_l wt_l a_l^nu a_l^nu'*
        return s.conj() + s  # a* a' + a a'*

    a5 = np.abs(herm(w) - np.eye(n2)).max()
    s = (a @ a.conj().T)
    mixed = s.conj() - s  # sum a*^nu a^nu' - a^nu a^nu'*
    a6 = np.abs(mixed * w0[None, :]).max()
    a7_lhs = herm(1.0 / w)
    nz = w0 > 0
    a7 = np.abs(
        (np.outer(w0, w0) * a7_lhs)[np.ix_(nz, nz)] - np.eye(n2)[np.ix_(nz, nz)]
    ).max()

    t = gyro.t_matrix
    res = []
    for col in range(a.shape[1]):
        vec = a[:, col]
        r = (w[col] ** 2 - w0sq) * vec + 1j * w[col] * (t @ vec)
        denom = np.linalg.norm(vec) * (w[col] ** 2 + w[col] * np.linalg.norm(t, 2) + w0sq.max())
        res.append(np.linalg.norm(r) / denom)
    qep = max(res) if res else 0.0

    return IdentityReport(
        orthogonality=float(ortho),
        completeness_velocity=float(a5),
        completeness_mixed=float(a6),
        completeness_position=float(a7),
        commutator=float(comm),
        qep=float(qep),
        pairing=modes.pairing_residual,
    )


def coherent_displacement(
    modes: PlanarModes,
    basis: PlanarBasis,
    mode: int,
    occupation: float,
    phase: float,
    t: float | np.ndarray,
    phase_resolved: bool = True,
    hbar: float = 1.0,
) -> np.ndarray:
    """Mean in-plane displacement of a coherent state of one planar mode.

    Returns ``(N, 2)`` for scalar ``t`` or ``(len(t), N, 2)`` for an array.
    The phase-resolved form keeps the relative phase between the x and y
    projections (ions trace ellipses); with ``phase_resolved=False`` only the
    projection magnitudes enter, ``-2 hbar |phi| |alpha_j| sin(w t + delta)``.
    """
    ax, ay = modes.site_amplitudes(basis)
    amp = np.stack([ax[:, mode], ay[:, mode]], axis=-1)  # (N, 2)
    arg = modes.frequencies[mode] * np.asarray(t, dtype=float) + phase
    arg = arg[..., None, None]
    if phase_resolved:
        disp = 2.0 * hbar * occupation * np.imag(amp * np.exp(-1j * arg))
    else:
        disp = -2.0 * hbar * occupation * np.abs(amp) * np.sin(arg)
    return disp
