"""Derived quantities: stability scans, crystal geometry and coupling statistics."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, Delaunay, QhullError

from .axial import axial_modes, build_kzz
from .couplings import CouplingMatrix
from .equilibrium import DEFAULT_TOL, Crystal, solve
from .errors import (
    DegenerateGeometryError,
    FitRefusedError,
    NumericalError,
    ParameterError,
)
from .params import TrapConfig
from .planar import planar_modes

log = logging.getLogger(__name__)

MAJORITY_THRESHOLD = 0.9
MIN_PAIRS_PER_BIN = 5
SUBSHELL_GAP = 0.25


@dataclass
class ScanResult:
    """Values sampled along a strictly monotone grid of one swept parameter."""

    kind: str  # one-to-two | band-overlap | powerlaw-vs-detuning | distortion
    parameter: str
    grid: np.ndarray
    columns: dict[str, np.ndarray]
    flagged: list[dict[str, Any]] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def rows(self) -> list[list[float]]:
        names = list(self.columns)
        return [[float(self.grid[i])] + [float(self.columns[k][i]) for k in names] for i in range(len(self.grid))]

    def header(self) -> list[str]:
        return [self.parameter, *self.columns]


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    r_range: tuple[float, float]
    fraction_of_pairs: float
    r_squared: float
    sign: int  # majority sign of J
    n_bins: int


@dataclass(frozen=True)
class HistogramResult:
    counts: np.ndarray
    edges: np.ndarray
    fraction_in_range: float
    mean: float
    mean_abs: float
    asymmetry: float  # |mean| / mean|J|, 0 for a symmetric distribution


@dataclass(frozen=True)
class SpacingResult:
    mean_spacing: np.ndarray  # per ion, mean distance to Delaunay neighbours
    radii: np.ndarray  # distance of each ion from the trap centre
    neighbors: list[np.ndarray]


@dataclass(frozen=True)
class Subshell:
    radius: float
    indices: np.ndarray  # sorted by theta
    theta: np.ndarray  # polar angle about the reference ion, [0, 2 pi)
    j: np.ndarray  # J_{i, ref}


# --- pipeline helpers ------------------------------------------------------


def _map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def min_axial_eigenvalue(config: TrapConfig, spacing: float | None = None, tol: float = DEFAULT_TOL) -> float:
    """Smallest ``K^zz`` eigenvalue (``omega^2``) of the relaxed crystal."""
    crystal = solve(config, spacing, tol)
    return float(np.linalg.eigvalsh(build_kzz(crystal))[0])


def _one_to_two_task(args) -> dict[str, Any]:
    config, lo, hi, resolution, spacing_scale, tol = args
    return _bisect_one_to_two(config, lo, hi, resolution, spacing_scale, tol)


def _probe(config: TrapConfig, omega_eff: float, spacing_scale: float | None, tol: float) -> float:
    cfg = config.replace(omega_eff=omega_eff)
    spacing = None if spacing_scale is None else spacing_scale * omega_eff ** (-2.0 / 3.0)
    return min_axial_eigenvalue(cfg, spacing, tol)


def _bisect_one_to_two(config, lo, hi, resolution, spacing_scale, tol) -> dict[str, Any]:
    out: dict[str, Any] = {"n_ions": config.n_ions, "probes": 0}
    try:
        f_lo = _probe(config, lo, spacing_scale, tol)
        f_hi = _probe(config, hi, spacing_scale, tol)
        out["probes"] = 2
        if not (f_lo > 0 and f_hi <= 0):
            raise NumericalError(
                f"bracket [{lo}, {hi}] does not straddle the instability "
                f"(min eigenvalues {f_lo:.3e}, {f_hi:.3e})"
            )
        while hi - lo > resolution:
            mid = 0.5 * (lo + hi)
            f_mid = _probe(config, mid, spacing_scale, tol)
            out["probes"] += 1
            if f_mid > 0:
                lo, f_lo = mid, f_mid
            else:
                hi, f_hi = mid, f_mid
    except NumericalError as exc:
        out.update(ok=False, error=str(exc), lo=lo, hi=hi)
        return out
    out.update(ok=True, lo=lo, hi=hi, lam_lo=f_lo, lam_hi=f_hi, omega_12=0.5 * (lo + hi))
    return out


def scan_one_to_two(
    n_list: Sequence[int],
    omega_wall: float,
    resolution: float = 1e-4,
    bracket: tuple[float, float] | None = None,
    base: TrapConfig | None = None,
    spacing_scale: float | None = None,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> ScanResult:
    """Bisect ``omega_eff`` for the point where an axial mode turns imaginary.

    Each probe relaxes a fresh seed and checks the sign of the smallest
    ``K^zz`` eigenvalue, so the final bracket ``[lo, hi]`` always has a
    stable crystal at ``lo`` and an unstable one at ``hi``.  A failed solve
    flags that ``N`` and the scan moves on.
    """
    if not resolution > 0:
        raise ParameterError(f"resolution must be positive, got {resolution!r}")
    n_list = sorted(set(int(n) for n in n_list))
    if any(n < 2 for n in n_list):
        raise ParameterError("the one-to-two transition needs at least two ions")
    template = base or TrapConfig.from_omega_eff(2, 0.1)
    tasks = []
    for n in n_list:
        cfg = template.replace(n_ions=n, omega_wall=omega_wall, omega_eff=max(omega_wall * 2, 0.1))
        lo, hi = bracket or (max(1.2 * omega_wall, 0.06), math.sqrt(1.0 + omega_wall**2) * 1.05)
        tasks.append((cfg, lo, hi, resolution, spacing_scale, tol))
    results = _map(_one_to_two_task, tasks, workers)

    grid, w12, lo_col, hi_col, flagged = [], [], [], [], []
    for res in results:
        if not res["ok"]:
            flagged.append({"n_ions": res["n_ions"], "error": res["error"]})
            log.warning("one-to-two scan: N=%d flagged: %s", res["n_ions"], res["error"])
            continue
        grid.append(res["n_ions"])
        w12.append(res["omega_12"])
        lo_col.append(res["lo"])
        hi_col.append(res["hi"])
    return ScanResult(
        kind="one-to-two",
        parameter="n_ions",
        grid=np.array(grid, dtype=float),
        columns={"omega_12": np.array(w12), "bracket_lo": np.array(lo_col), "bracket_hi": np.array(hi_col)},
        flagged=flagged,
        metadata={"omega_wall": omega_wall, "resolution": resolution},
    )


def band_edges(config: TrapConfig, spacing: float | None = None, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """(lowest axial frequency, highest lower-branch planar frequency).

    An imaginary axial mode is reported as ``-|omega|``.
    """
    crystal = solve(config, spacing, tol)
    ax = axial_modes(build_kzz(crystal))
    _, pm = planar_modes(crystal, config)
    return float(ax.signed_frequencies.min()), float(pm.lower.max()) if len(pm.lower) else 0.0


def _band_task(args):
    config, spacing, tol = args
    try:
        return band_edges(config, spacing, tol), None
    except NumericalError as exc:
        return None, str(exc)


def scan_band_overlap(
    config: TrapConfig,
    omega_effs: Sequence[float],
    resolution: float | None = None,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> ScanResult:
    """Track the lowest axial and highest magnetron-like planar frequency vs ``omega_eff``.

    ``metadata["crossing"]`` is the first ``omega_eff`` at which the gap
    ``min axial - max lower planar`` changes sign: linearly interpolated on
    the grid, or bisected to ``resolution`` when given.  It is ``None`` when
    the bands never meet (always the case for a single ion).
    """
    grid = np.array(sorted(set(float(w) for w in omega_effs)))
    tasks = [(config.replace(omega_eff=w), None, tol) for w in grid]
    results = _map(_band_task, tasks, workers)
    ax_min = np.full(len(grid), np.nan)
    pl_max = np.full(len(grid), np.nan)
    flagged = []
    for i, (res, err) in enumerate(results):
        if res is None:
            flagged.append({"omega_eff": float(grid[i]), "error": err})
            continue
        ax_min[i], pl_max[i] = res
    gap = ax_min - pl_max

    crossing = None
    ok = np.flatnonzero(~np.isnan(gap))
    for a, b in zip(ok[:-1], ok[1:]):
        if gap[a] > 0 and gap[b] <= 0:
            lo, hi, g_lo, g_hi = grid[a], grid[b], gap[a], gap[b]
            if resolution is not None:
                while hi - lo > resolution:
                    mid = 0.5 * (lo + hi)
                    res, err = _band_task((config.replace(omega_eff=mid), None, tol))
                    if res is None:
                        flagged.append({"omega_eff": mid, "error": err})
                        break
                    g_mid = res[0] - res[1]
                    if g_mid > 0:
                        lo, g_lo = mid, g_mid
                    else:
                        hi, g_hi = mid, g_mid
            crossing = float(lo + (hi - lo) * g_lo / (g_lo - g_hi))
            break
    return ScanResult(
        kind="band-overlap",
        parameter="omega_eff",
        grid=grid,
        columns={"min_axial": ax_min, "max_lower_planar": pl_max, "gap": gap},
        flagged=flagged,
        metadata={"n_ions": config.n_ions, "omega_wall": config.omega_wall, "crossing": crossing},
    )


def scan_distortion(
    config: TrapConfig, omega_effs: Sequence[float], tol: float = DEFAULT_TOL, workers: int = 1
) -> ScanResult:
    grid = np.array(sorted(set(float(w) for w in omega_effs)))
    tasks = [(config.replace(omega_eff=w), None, tol) for w in grid]
    crystals = _map(_solve_task, tasks, workers)
    ratio = np.full(len(grid), np.nan)
    flagged = []
    for i, (crystal, err) in enumerate(crystals):
        if crystal is None:
            flagged.append({"omega_eff": float(grid[i]), "error": err})
            continue
        ratio[i] = distortion_ratio(crystal)
    return ScanResult(
        kind="distortion",
        parameter="omega_eff",
        grid=grid,
        columns={"aspect_ratio": ratio},
        flagged=flagged,
        metadata={"n_ions": config.n_ions, "omega_wall": config.omega_wall},
    )


def _solve_task(args):
    config, spacing, tol = args
    try:
        return solve(config, spacing, tol), None
    except NumericalError as exc:
        return None, str(exc)


def scan_power_law(
    crystal: Crystal | np.ndarray,
    coupling_for: Callable[[float], CouplingMatrix],
    detunings: Sequence[float],
    r_window: tuple[float, float] | None = None,
) -> ScanResult:
    """Fitted exponent versus detuning; refused fits are flagged and left NaN."""
    grid = np.array(sorted(set(float(d) for d in detunings)))
    alpha = np.full(len(grid), np.nan)
    r2 = np.full(len(grid), np.nan)
    flagged = []
    for i, delta in enumerate(grid):
        try:
            fit = fit_power_law(coupling_for(delta), crystal, r_window)
        except (FitRefusedError, NumericalError) as exc:
            flagged.append({"detuning": float(delta), "error": str(exc)})
            continue
        alpha[i] = fit.exponent
        r2[i] = fit.r_squared
    return ScanResult(
        kind="powerlaw-vs-detuning",
        parameter="detuning",
        grid=grid,
        columns={"alpha": alpha, "r_squared": r2},
        flagged=flagged,
        metadata={"n_ions": len(crystal.positions if isinstance(crystal, Crystal) else crystal)},
    )


# --- geometry --------------------------------------------------------------


def distortion_ratio(crystal: Crystal | np.ndarray) -> float:
    """Aspect ratio (major/minor) of the ellipse through the boundary ions.

    Fits ``A x^2 + B x y + C y^2 = 1`` in least squares to the convex-hull
    ions, centred on the crystal centroid.
    """
    pos = crystal.positions if isinstance(crystal, Crystal) else np.asarray(crystal, dtype=float)
    if len(pos) < 3:
        raise ParameterError("distortion ratio needs at least three ions")
    try:
        hull = ConvexHull(pos)
    except QhullError as exc:
        raise DegenerateGeometryError(f"boundary is degenerate: {exc}") from exc
    pts = pos[hull.vertices] - pos.mean(axis=0)
    x, y = pts[:, 0], pts[:, 1]
    design = np.column_stack([x * x, x * y, y * y])
    coef, *_ = np.linalg.lstsq(design, np.ones(len(pts)), rcond=None)
    a, b, c = coef
    eig = np.linalg.eigvalsh(np.array([[a, b / 2], [b / 2, c]]))
    if eig[0] <= 0:
        raise DegenerateGeometryError("boundary ions do not fit a closed ellipse")
    return float(math.sqrt(eig[1] / eig[0]))


def nn_spacing(crystal: Crystal | np.ndarray) -> SpacingResult:
    """Per-ion mean distance to Delaunay neighbours."""
    pos = crystal.positions if isinstance(crystal, Crystal) else np.asarray(crystal, dtype=float)
    if len(pos) < 3:
        raise ParameterError("Delaunay spacing needs at least three ions")
    try:
        tri = Delaunay(pos)
    except QhullError as exc:
        raise DegenerateGeometryError(f"triangulation failed: {exc}") from exc
    indptr, indices = tri.vertex_neighbor_vertices
    neighbors = [np.sort(indices[indptr[i] : indptr[i + 1]]) for i in range(len(pos))]
    if any(len(nb) == 0 for nb in neighbors):
        raise DegenerateGeometryError("some ions are not part of the triangulation")
    mean = np.array([np.linalg.norm(pos[nb] - pos[i], axis=1).mean() for i, nb in enumerate(neighbors)])
    return SpacingResult(mean_spacing=mean, radii=np.hypot(pos[:, 0], pos[:, 1]), neighbors=neighbors)


# --- coupling statistics ---------------------------------------------------


def _pair_data(j: CouplingMatrix | np.ndarray, positions: np.ndarray):
    mat = j.j if isinstance(j, CouplingMatrix) else np.asarray(j, dtype=float)
    iu = np.triu_indices(len(mat), 1)
    diff = positions[:, None, :] - positions[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1])
    return mat[iu], r[iu]


def fit_power_law(
    j: CouplingMatrix | np.ndarray,
    crystal: Crystal | np.ndarray,
    r_window: tuple[float, float] | None = None,
    n_bins: int | None = None,
) -> PowerLawFit:
    """Fit ``|J_ij| ~ r_ij^-alpha`` over logarithmic distance bins.

    Only off-diagonal pairs of the majority sign enter.  Each bin contributes
    the geometric means of ``r`` and ``|J|`` if it holds at least five pairs.
    Refuses (``FitRefusedError``) when fewer than 90% of pairs share a sign.
    By default there are up to 20 bins, fewer for small crystals.
    """
    pos = crystal.positions if isinstance(crystal, Crystal) else np.asarray(crystal, dtype=float)
    vals, r = _pair_data(j, pos)
    if r_window is not None:
        sel = (r >= r_window[0]) & (r <= r_window[1])
        vals, r = vals[sel], r[sel]
    if len(vals) == 0:
        raise ParameterError("no pairs inside the distance window")
    n_pos = int(np.sum(vals > 0))
    n_neg = int(np.sum(vals < 0))
    sign = 1 if n_pos >= n_neg else -1
    majority = max(n_pos, n_neg) / len(vals)
    if majority <= MAJORITY_THRESHOLD:
        raise FitRefusedError(
            f"only {100 * majority:.1f}% of pairs share a sign; the couplings are "
            "frustrated, use a histogram instead",
            majority,
        )
    keep = sign * vals > 0
    if n_bins is None:
        n_bins = int(min(20, max(2, keep.sum() // (2 * MIN_PAIRS_PER_BIN))))
    lr = np.log(r[keep])
    lj = np.log(np.abs(vals[keep]))
    edges = np.linspace(lr.min(), lr.max(), n_bins + 1)
    which = np.clip(np.digitize(lr, edges) - 1, 0, n_bins - 1)
    xs, ys = [], []
    for b in range(n_bins):
        sel = which == b
        if sel.sum() >= MIN_PAIRS_PER_BIN:
            xs.append(lr[sel].mean())
            ys.append(lj[sel].mean())
    if len(xs) < 2:
        raise FitRefusedError("fewer than two populated distance bins", majority)
    xs, ys = np.array(xs), np.array(ys)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r_sq = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(
        exponent=float(-slope),
        prefactor=float(sign * math.exp(intercept)),
        r_range=(float(r[keep].min()), float(r[keep].max())),
        fraction_of_pairs=float(keep.sum() / len(vals)),
        r_squared=r_sq,
        sign=sign,
        n_bins=len(xs),
    )


def histogram(
    j: CouplingMatrix | np.ndarray,
    bins: int = 50,
    range_policy: str | tuple[float, float] = "full",
) -> HistogramResult:
    """Histogram of the off-diagonal couplings.

    ``range_policy`` is ``"full"`` (data min to max), ``"symmetric"``
    (``+-max|J|``) or an explicit ``(lo, hi)``; ``fraction_in_range`` counts
    the pairs that land inside it.
    """
    if bins < 2:
        raise ParameterError(f"need at least two bins, got {bins}")
    mat = j.j if isinstance(j, CouplingMatrix) else np.asarray(j, dtype=float)
    vals = mat[np.triu_indices(len(mat), 1)]
    if isinstance(range_policy, str):
        if range_policy == "full":
            lo, hi = float(vals.min()), float(vals.max())
        elif range_policy == "symmetric":
            hi = float(np.abs(vals).max())
            lo = -hi
        else:
            raise ParameterError(f"unknown range policy {range_policy!r}")
    else:
        lo, hi = map(float, range_policy)
    if hi <= lo:
        hi = lo + 1.0
    counts, edges = np.histogram(vals, bins=bins, range=(lo, hi))
    inside = float(np.mean((vals >= lo) & (vals <= hi))) if len(vals) else 0.0
    mean = float(vals.mean()) if len(vals) else 0.0
    mean_abs = float(np.abs(vals).mean()) if len(vals) else 0.0
    return HistogramResult(
        counts=counts,
        edges=edges,
        fraction_in_range=inside,
        mean=mean,
        mean_abs=mean_abs,
        asymmetry=abs(mean) / mean_abs if mean_abs > 0 else 0.0,
    )


def angular_correlation(
    j: CouplingMatrix | np.ndarray,
    crystal: Crystal | np.ndarray,
    reference_ion: int,
) -> list[Subshell]:
    """Couplings to ``reference_ion`` grouped into subshells of similar distance.

    Distances from the reference ion are split wherever consecutive sorted
    values jump by more than a quarter of the median nearest-neighbour
    spacing.
    """
    pos = crystal.positions if isinstance(crystal, Crystal) else np.asarray(crystal, dtype=float)
    mat = j.j if isinstance(j, CouplingMatrix) else np.asarray(j, dtype=float)
    n = len(pos)
    if not 0 <= reference_ion < n:
        raise ParameterError(f"reference ion {reference_ion} out of range for {n} ions")
    others = np.array([i for i in range(n) if i != reference_ion], dtype=int)
    if len(others) == 0:
        return []
    rel = pos[others] - pos[reference_ion]
    dist = np.hypot(rel[:, 0], rel[:, 1])
    theta = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2 * math.pi)

    diff = pos[:, None, :] - pos[None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(d, np.inf)
    threshold = SUBSHELL_GAP * float(np.median(d.min(axis=1)))

    order = np.argsort(dist, kind="stable")
    breaks = np.flatnonzero(np.diff(dist[order]) > threshold) + 1
    shells = []
    for group in np.split(order, breaks):
        sub = group[np.argsort(theta[group], kind="stable")]
        shells.append(
            Subshell(
                radius=float(dist[sub].mean()),
                indices=others[sub],
                theta=theta[sub],
                j=mat[others[sub], reference_ion],
            )
        )
    return shells
