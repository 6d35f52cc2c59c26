from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from penning.axial import axial_modes, build_kzz, mode_displacement
from penning.equilibrium import solve
from penning.errors import ImaginaryModeError
from penning.params import TrapConfig


def two_ion(omega_eff=0.16, wall=0.04):
    cfg = TrapConfig.from_omega_eff(2, omega_eff, omega_wall=wall)
    return cfg, solve(cfg), omega_eff**2 - wall**2


def test_single_ion_kzz():
    assert np.array_equal(build_kzz(np.zeros((1, 2))), [[1.0]])
    modes = axial_modes(build_kzz(np.zeros((1, 2))))
    assert modes.frequencies[0] == 1.0


def test_two_ion_kzz_closed_form():
    _, crystal, w_soft2 = two_ion()
    k = build_kzz(crystal)
    assert k[0, 0] == pytest.approx(1 - w_soft2 / 2, rel=1e-10)
    assert k[0, 1] == pytest.approx(w_soft2 / 2, rel=1e-9)


def test_two_ion_modes():
    _, crystal, w_soft2 = two_ion()
    modes = axial_modes(build_kzz(crystal))
    assert modes.frequencies[1] == pytest.approx(1.0, abs=1e-12)
    assert modes.frequencies[0] == pytest.approx(math.sqrt(1 - w_soft2), rel=1e-10)
    s = 1 / math.sqrt(2)
    assert np.allclose(modes.eigenvectors[:, 1], [s, s])
    assert np.allclose(np.abs(modes.eigenvectors[:, 0]), [s, s])
    assert modes.eigenvectors[0, 0] * modes.eigenvectors[1, 0] < 0
    tilt = mode_displacement(modes, 0, amplitude=2.0)
    assert tilt[0] == pytest.approx(-tilt[1])


def random_positions(seed, n):
    rng = np.random.default_rng(seed)
    while True:
        pos = rng.uniform(-4, 4, size=(n, 2))
        d = np.hypot(*(pos[:, None] - pos[None]).transpose(2, 0, 1))
        np.fill_diagonal(d, np.inf)
        if d.min() > 0.5:
            return pos


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 30))
def test_com_row_sum(seed, n):
    k = build_kzz(random_positions(seed, n))
    assert np.allclose(k @ np.ones(n), 1.0, atol=1e-13)
    assert np.array_equal(k, k.T)


@pytest.mark.parametrize("n, wall", [(7, 0.0), (19, 0.04), (37, 0.07)])
def test_mode_invariants(n, wall):
    crystal = solve(TrapConfig.from_omega_eff(n, 0.16, omega_wall=wall))
    k = build_kzz(crystal)
    modes = axial_modes(k, crystal.positions)
    v = modes.eigenvectors
    assert np.allclose(v.T @ v, np.eye(n), atol=1e-10)
    assert np.allclose(k @ v, v * modes.eigenvalues, atol=1e-10)
    assert modes.stable
    assert modes.frequencies.max() == pytest.approx(1.0, rel=1e-9)
    assert np.all(modes.frequencies[:-1] < 1.0)
    com = mode_displacement(modes, -1)
    assert np.allclose(com, 1 / math.sqrt(n))
    for nu in range(n - 1):
        assert abs(mode_displacement(modes, nu).sum()) < 1e-9


def test_degenerate_clusters_reproducible_under_relabelling():
    crystal = solve(TrapConfig.from_omega_eff(7, 0.16))
    perm = np.random.default_rng(3).permutation(7)
    a = axial_modes(build_kzz(crystal), crystal.positions)
    b = axial_modes(build_kzz(crystal.positions[perm]), crystal.positions[perm])
    assert np.allclose(a.frequencies, b.frequencies, atol=1e-12)
    assert np.allclose(a.eigenvectors[perm], b.eigenvectors, atol=1e-8)


def test_imaginary_modes_reported():
    # beyond omega_eff^2 = 1 + omega_W^2 the two-ion tilt mode is unstable
    cfg = TrapConfig.from_omega_eff(2, 1.2, omega_wall=0.04)
    modes = axial_modes(build_kzz(solve(cfg)))
    assert not modes.stable
    assert modes.imaginary[0]
    assert modes.frequencies[0] == pytest.approx(math.sqrt(1.2**2 - 0.04**2 - 1), rel=1e-9)
    assert modes.signed_frequencies[0] < 0
    with pytest.raises(ImaginaryModeError):
        mode_displacement(modes, 0)
    with pytest.raises(IndexError):
        mode_displacement(modes, 2)


def test_large_crystal_com_mode(big):
    _, _, ax, _, _ = big
    assert ax.stable
    assert abs(ax.frequencies.max() - 1.0) < 1e-9
    assert np.all(ax.frequencies[:-1] < 1.0)
