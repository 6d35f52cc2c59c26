from __future__ import annotations

import functools
import warnings

import pytest

from penning.axial import axial_modes, build_kzz
from penning.equilibrium import solve
from penning.params import TrapConfig
from penning.planar import planar_modes

# medium rotation with a weak wall: the reference crystal for the large-N checks
OMEGA_EFF_MID = 0.16
OMEGA_WALL_WEAK = 0.04

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@functools.lru_cache(maxsize=None)
def crystal_for(n: int, omega_eff: float, omega_wall: float):
    config = TrapConfig.from_omega_eff(n, omega_eff, omega_wall=omega_wall)
    return config, solve(config)


@functools.lru_cache(maxsize=None)
def modes_for(n: int, omega_eff: float, omega_wall: float):
    config, crystal = crystal_for(n, omega_eff, omega_wall)
    ax = axial_modes(build_kzz(crystal), crystal.positions)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        basis, pm = planar_modes(crystal, config)
    return ax, basis, pm


@pytest.fixture(scope="session")
def big():
    """N = 217 at omega_eff = 0.16, omega_W = 0.04: (config, crystal, axial, basis, planar)."""
    config, crystal = crystal_for(217, OMEGA_EFF_MID, OMEGA_WALL_WEAK)
    ax, basis, pm = modes_for(217, OMEGA_EFF_MID, OMEGA_WALL_WEAK)
    return config, crystal, ax, basis, pm


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {name}: {detail}")
