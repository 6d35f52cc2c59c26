from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import penning.equilibrium as eq
from penning.equilibrium import (
    find_equilibrium,
    gradient,
    hessian,
    potential_energy,
    solve,
)
from penning.errors import ConvergenceError, SaddlePointError, SingularConfigurationError
from penning.params import TrapConfig
from penning.seedlat import generate_seed


def two_ion_separation(cfg: TrapConfig) -> float:
    # minimise m w^2 d^2 / 4 + k e^2 / d with k e^2 = 1/2: d^3 = 1 / w_soft^2
    return (cfg.omega_eff**2 - cfg.omega_wall**2) ** (-1.0 / 3.0)


def random_config(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        pos = rng.uniform(-3, 3, size=(n, 2))
        d = np.hypot(*(pos[:, None] - pos[None]).transpose(2, 0, 1))
        np.fill_diagonal(d, np.inf)
        if d.min() > 0.3:
            return pos


def fd_gradient(pos, cfg, h=1e-5):
    n = len(pos)
    g = np.zeros(2 * n)
    for k in range(2 * n):
        p, m = pos.copy(), pos.copy()
        p[k % n, k // n] += h
        m[k % n, k // n] -= h
        g[k] = (potential_energy(p, cfg) - potential_energy(m, cfg)) / (2 * h)
    return g


def fd_hessian(pos, cfg, h=1e-5):
    n = len(pos)
    out = np.zeros((2 * n, 2 * n))
    for k in range(2 * n):
        p, m = pos.copy(), pos.copy()
        p[k % n, k // n] += h
        m[k % n, k // n] -= h
        out[:, k] = (gradient(p, cfg) - gradient(m, cfg)) / (2 * h)
    return out


CFG = TrapConfig.from_omega_eff(5, 0.16, omega_wall=0.04)


def test_single_ion_energies():
    cfg = TrapConfig.from_omega_eff(1, 0.16)
    assert potential_energy(np.zeros((1, 2)), cfg) == 0.0
    assert potential_energy(np.array([[1.0, 0.0]]), cfg) == pytest.approx(0.5 * 0.16**2, rel=1e-12)
    assert np.all(gradient(np.zeros((1, 2)), cfg) == 0.0)


def test_two_ions_stationary_at_closed_form_separation():
    cfg = TrapConfig.from_omega_eff(2, 0.16, omega_wall=0.04)
    d = two_ion_separation(cfg)
    pos = np.array([[0.0, d / 2], [0.0, -d / 2]])
    assert np.max(np.abs(gradient(pos, cfg))) < 1e-14


def test_coincident_ions_rejected():
    with pytest.raises(SingularConfigurationError):
        potential_energy(np.array([[0.5, 0.5], [0.5, 0.5]]), CFG)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(5, 20))
def test_gradient_matches_finite_differences(seed, n):
    pos = random_config(np.random.default_rng(seed), n)
    g = gradient(pos, CFG)
    fd = fd_gradient(pos, CFG)
    assert np.linalg.norm(g - fd) / np.linalg.norm(g) < 1e-6


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(5, 20))
def test_hessian_matches_finite_differences(seed, n):
    pos = random_config(np.random.default_rng(seed), n)
    h = hessian(pos, CFG)
    fd = fd_hessian(pos, CFG)
    assert np.linalg.norm(h - fd) / np.linalg.norm(h) < 1e-6
    assert np.array_equal(h, h.T)


def test_two_ion_minimum_on_soft_axis():
    cfg = TrapConfig.from_omega_eff(2, 0.16, omega_wall=0.04)
    crystal = solve(cfg)
    d = two_ion_separation(cfg)
    pos = crystal.positions[np.argsort(crystal.positions[:, 1])]
    assert np.allclose(pos, [[0.0, -d / 2], [0.0, d / 2]], atol=1e-9)
    assert crystal.grad_norm < 1e-10


def test_seven_ions_centered_hexagon_rotation_invariant():
    cfg = TrapConfig.from_omega_eff(7, 0.16)
    crystal = solve(cfg)
    r = np.sort(crystal.radii)
    assert r[0] < 1e-8
    assert np.allclose(r[1:], r[1:].mean(), rtol=1e-9)
    for angle in (0.1, 1.0, 2.5):
        c, s = math.cos(angle), math.sin(angle)
        rotated = crystal.positions @ np.array([[c, s], [-s, c]])
        e = potential_energy(rotated, cfg)
        assert abs(e - crystal.energy) < 1e-10 * abs(crystal.energy)


def test_energy_decreases_monotonically():
    cfg = TrapConfig.from_omega_eff(37, 0.16, omega_wall=0.04)
    energies = []
    find_equilibrium(generate_seed(cfg), cfg, callback=lambda it, e, g: energies.append(e))
    assert len(energies) > 1
    assert all(b <= a for a, b in zip(energies, energies[1:]))


def test_without_coulomb_ions_fall_to_origin():
    cfg = TrapConfig.from_omega_eff(7, 0.16, omega_wall=0.04)
    crystal = find_equilibrium(generate_seed(cfg), cfg, coulomb=False)
    assert np.max(np.abs(crystal.positions)) < 1e-9


def test_polar_form_consistent():
    crystal = solve(TrapConfig.from_omega_eff(19, 0.16, omega_wall=0.04))
    rp = crystal.radii_phases
    back = np.column_stack([rp[:, 0] * np.cos(rp[:, 1]), rp[:, 0] * np.sin(rp[:, 1])])
    assert np.max(np.abs(back - crystal.positions)) < 1e-14 * max(1.0, rp[:, 0].max())


def test_non_convergence_reports_gradient():
    cfg = TrapConfig.from_omega_eff(19, 0.16, omega_wall=0.04)
    with pytest.raises(ConvergenceError) as info:
        find_equilibrium(generate_seed(cfg), cfg, max_iter=1)
    assert info.value.grad_norm > 0
    assert info.value.iterations == 1


def test_symmetric_saddle_is_escaped():
    cfg = TrapConfig.from_omega_eff(2, 0.16, omega_wall=0.04)
    # pair on the stiff axis: stationary by symmetry but unstable
    d = cfg.stiffness_x ** (-1 / 3)
    seed = np.array([[d / 2, 0.0], [-d / 2, 0.0]])
    assert np.max(np.abs(gradient(seed, cfg))) < 1e-14
    crystal = find_equilibrium(seed, cfg)
    assert np.allclose(np.abs(crystal.positions[:, 1]), two_ion_separation(cfg) / 2, atol=1e-9)


def test_saddle_reported_when_escape_disabled(monkeypatch):
    cfg = TrapConfig.from_omega_eff(2, 0.16, omega_wall=0.04)
    d = cfg.stiffness_x ** (-1 / 3)
    seed = np.array([[d / 2, 0.0], [-d / 2, 0.0]])
    monkeypatch.setattr(eq, "MAX_KICKS", 0)
    with pytest.raises(SaddlePointError) as info:
        find_equilibrium(seed, cfg)
    assert info.value.min_eigenvalue < -1e-8


def test_large_crystal_is_converged_local_minimum(big):
    config, crystal, *_ = big
    assert crystal.grad_norm < 1e-10
    w = np.linalg.eigvalsh(hessian(crystal.positions, config))
    assert w[0] > -1e-8
