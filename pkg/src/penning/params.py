"""Trap parameters, unit conventions and analytic stability criteria.

Internally every quantity is dimensionless: lengths in ``l0``, angular
frequencies in ``omega_z``, masses in ``m`` and energies in
``m * omega_z**2 * l0**2``.  In these units ``e*V0 = 1/2``, the Coulomb
prefactor ``k_e e^2 = 1/2`` and the rotating-wall coefficient
``e*V_W = wall_sign * omega_wall**2 / 2``.  Physical units only appear at the
boundary (config files, metadata).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from scipy import constants

from .errors import ParameterError

AMU = constants.atomic_mass
BE9_MASS_AMU = 9.012182
ELEMENTARY_CHARGE = 1.60217646e-19
COULOMB_K = 8.9875517873681764e9

DEFAULT_OMEGA_C = 9.645
DEFAULT_FZ_HZ = 795e3


@dataclass(frozen=True)
class Units:
    """Conversion factors between internal and SI units."""

    l0: float  # m
    energy0: float  # J
    omega_z: float  # rad/s

    @property
    def time0(self) -> float:
        return 1.0 / self.omega_z


@dataclass(frozen=True)
class TrapConfig:
    """Penning trap and crystal parameters.

    Frequencies are stored as ratios to the axial frequency.  The rotation is
    stored as ``omega_rot`` (Omega / omega_z); use :meth:`from_omega_eff` to
    specify the effective planar trap frequency instead.
    """

    n_ions: int
    omega_rot: float
    omega_c: float = DEFAULT_OMEGA_C
    omega_wall: float = 0.0
    wall_sign: int = 1
    f_z_hz: float = DEFAULT_FZ_HZ
    mass_amu: float = BE9_MASS_AMU
    charge: float = ELEMENTARY_CHARGE
    k_e: float = COULOMB_K

    def __post_init__(self):
        if int(self.n_ions) != self.n_ions or self.n_ions < 1:
            raise ParameterError(f"n_ions must be a positive integer, got {self.n_ions!r}")
        if not self.f_z_hz > 0:
            raise ParameterError(f"omega_z must be positive, got f_z = {self.f_z_hz!r} Hz")
        if not self.omega_c > 0:
            raise ParameterError(f"omega_c must be positive, got {self.omega_c!r}")
        if not self.omega_wall >= 0:
            raise ParameterError(f"omega_wall must be >= 0, got {self.omega_wall!r}")
        if self.wall_sign not in (1, -1):
            raise ParameterError(f"wall_sign must be +1 or -1, got {self.wall_sign!r}")
        if not self.omega_rot > 0:
            raise ParameterError(f"rotation frequency must be positive, got {self.omega_rot!r}")
        if not (self.mass_amu > 0 and self.charge > 0 and self.k_e > 0):
            raise ParameterError("mass, charge and k_e must be positive")

    @classmethod
    def from_omega_eff(cls, n_ions: int, omega_eff: float, **kwargs) -> "TrapConfig":
        """Build a config from the effective planar frequency.

        Solves ``omega_eff^2 = omega_c*Omega - Omega^2 - 1/2`` for the lower
        root ``Omega < omega_c/2``.
        """
        omega_c = kwargs.get("omega_c", DEFAULT_OMEGA_C)
        omega_rot = rotation_from_omega_eff(omega_eff, omega_c)
        return cls(n_ions=n_ions, omega_rot=omega_rot, **kwargs)

    def replace(self, **changes) -> "TrapConfig":
        if "omega_eff" in changes:
            omega_eff = changes.pop("omega_eff")
            omega_c = changes.get("omega_c", self.omega_c)
            changes["omega_rot"] = rotation_from_omega_eff(omega_eff, omega_c)
        return dataclasses.replace(self, **changes)

    @property
    def omega_eff_sq(self) -> float:
        return self.omega_c * self.omega_rot - self.omega_rot**2 - 0.5

    @property
    def omega_eff(self) -> float:
        w2 = self.omega_eff_sq
        if w2 < 0:
            if w2 > -1e-14:
                return 0.0
            raise ParameterError(
                f"radial potential is repulsive at Omega = {self.omega_rot!r} omega_z "
                f"(omega_eff^2 = {w2:.6g})"
            )
        return math.sqrt(w2)

    @property
    def omega_ceff(self) -> float:
        """Effective cyclotron frequency ``omega_c - 2 Omega`` (e B_eff / m)."""
        return self.omega_c - 2.0 * self.omega_rot

    @property
    def wall_coeff(self) -> float:
        """Signed ``e V_W`` in internal units."""
        return 0.5 * self.wall_sign * self.omega_wall**2

    @property
    def stiffness_x(self) -> float:
        return self.omega_eff_sq + self.wall_sign * self.omega_wall**2

    @property
    def stiffness_y(self) -> float:
        return self.omega_eff_sq - self.wall_sign * self.omega_wall**2

    @property
    def omega_z(self) -> float:
        """Physical axial angular frequency [rad/s]."""
        return 2.0 * math.pi * self.f_z_hz

    @property
    def mass(self) -> float:
        return self.mass_amu * AMU

    def soft_axis(self) -> int:
        """0 for x, 1 for y: the direction with the weaker planar confinement."""
        return 1 if self.wall_sign > 0 else 0


def max_omega_eff(omega_c: float) -> float:
    return math.sqrt(max(omega_c**2 / 4.0 - 0.5, 0.0))


def rotation_from_omega_eff(omega_eff: float, omega_c: float = DEFAULT_OMEGA_C) -> float:
    if omega_eff < 0:
        raise ParameterError(f"omega_eff must be >= 0, got {omega_eff!r}")
    disc = omega_c**2 / 4.0 - 0.5 - omega_eff**2
    if disc < 0:
        raise ParameterError(
            f"omega_eff = {omega_eff!r} omega_z is unreachable; the maximum attainable "
            f"value is sqrt(omega_c^2/4 - omega_z^2/2) = {max_omega_eff(omega_c):.10g} omega_z"
        )
    # product of the roots is omega_eff^2 + 1/2; avoids cancellation for the small root
    return (omega_eff**2 + 0.5) / (omega_c / 2.0 + math.sqrt(disc))


def units(config: TrapConfig) -> Units:
    m = config.mass
    wz = config.omega_z
    ke2 = config.k_e * config.charge**2
    l0 = (2.0 * ke2 / (m * wz**2)) ** (1.0 / 3.0)
    return Units(l0=l0, energy0=m * wz**2 * l0**2, omega_z=wz)


@dataclass(frozen=True)
class Derived:
    omega_rot: float  # omega_z units
    omega_eff: float  # omega_z units
    b_z: float  # T
    b_eff: float  # T, may be negative
    units: Units


def derive(config: TrapConfig) -> Derived:
    u = units(config)
    b_z = config.omega_c * u.omega_z * config.mass / config.charge
    b_eff = b_z - 2.0 * config.omega_rot * u.omega_z * config.mass / config.charge
    return Derived(
        omega_rot=config.omega_rot,
        omega_eff=config.omega_eff,
        b_z=b_z,
        b_eff=b_eff,
        units=u,
    )


@dataclass(frozen=True)
class StabilityReport:
    """Single-particle confinement criteria, in units of ``m omega_z^2``."""

    beta1: float
    beta2: float
    beta3: float
    omega_dc: float
    confined: bool


def deconfinement_frequency(omega_c: float, omega_wall: float = 0.0) -> float:
    disc = omega_c**2 / 4.0 - 0.5 - omega_wall**2
    if disc < 0:
        raise ParameterError(
            "no confinement window exists at any rotation frequency: "
            f"omega_c^2/4 - omega_z^2/2 - omega_W^2 = {disc:.6g} < 0"
        )
    return (0.5 + omega_wall**2) / (omega_c / 2.0 + math.sqrt(disc))


def stability(config: TrapConfig) -> StabilityReport:
    omega_dc = deconfinement_frequency(config.omega_c, config.omega_wall)
    radial = config.omega_eff_sq  # (e B Omega - m Omega^2 - e V0)/m
    beta1 = 1.0 / radial if radial != 0 else math.inf
    beta3 = 0.5 * radial - 0.5 * config.omega_wall**2
    return StabilityReport(
        beta1=beta1,
        beta2=radial,
        beta3=beta3,
        omega_dc=omega_dc,
        confined=beta3 > 0,
    )


# --- config files ---------------------------------------------------------

_REQUIRED_KEYS = {"n_ions"}
_OPTIONAL_KEYS = {
    "omega_z_hz",
    "omega_c_over_omega_z",
    "omega_wall_over_omega_z",
    "omega_eff_over_omega_z",
    "omega_rot_over_omega_z",
    "wall_sign",
    "mass_amu",
    "charge_c",
    "coulomb_k",
}


def config_from_dict(data: Mapping[str, Any]) -> TrapConfig:
    unknown = set(data) - _REQUIRED_KEYS - _OPTIONAL_KEYS
    if unknown:
        raise ParameterError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    missing = _REQUIRED_KEYS - set(data)
    if missing:
        raise ParameterError(f"missing config key(s): {', '.join(sorted(missing))}")
    has_eff = "omega_eff_over_omega_z" in data
    has_rot = "omega_rot_over_omega_z" in data
    if has_eff == has_rot:
        raise ParameterError(
            "exactly one of omega_eff_over_omega_z / omega_rot_over_omega_z must be given"
        )
    kwargs: dict[str, Any] = {
        "n_ions": data["n_ions"],
        "omega_c": float(data.get("omega_c_over_omega_z", DEFAULT_OMEGA_C)),
        "omega_wall": float(data.get("omega_wall_over_omega_z", 0.0)),
        "wall_sign": data.get("wall_sign", 1),
        "f_z_hz": float(data.get("omega_z_hz", DEFAULT_FZ_HZ)),
        "mass_amu": float(data.get("mass_amu", BE9_MASS_AMU)),
        "charge": float(data.get("charge_c", ELEMENTARY_CHARGE)),
        "k_e": float(data.get("coulomb_k", COULOMB_K)),
    }
    if has_eff:
        return TrapConfig.from_omega_eff(omega_eff=float(data["omega_eff_over_omega_z"]), **kwargs)
    return TrapConfig(omega_rot=float(data["omega_rot_over_omega_z"]), **kwargs)


def config_to_dict(config: TrapConfig) -> dict[str, Any]:
    return {
        "n_ions": config.n_ions,
        "omega_z_hz": config.f_z_hz,
        "omega_c_over_omega_z": config.omega_c,
        "omega_wall_over_omega_z": config.omega_wall,
        "omega_rot_over_omega_z": config.omega_rot,
        "wall_sign": config.wall_sign,
        "mass_amu": config.mass_amu,
        "charge_c": config.charge,
        "coulomb_k": config.k_e,
    }


def load_config(path: str | Path) -> TrapConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParameterError(f"config {path} must contain a JSON object")
    return config_from_dict(data)
