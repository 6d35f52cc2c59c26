"""Command-line front end.

Every subcommand writes CSV/JSON data files plus ``manifest.json`` (config
snapshot, tolerances, sha256 of every input and output, per-stage timing)
into ``--out``.  Data files are deterministic; only the manifest carries
timing.  Exit status: 0 on success, 2 on invalid input, 3 on numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .analysis import (
    angular_correlation,
    fit_power_law,
    histogram,
    scan_band_overlap,
    scan_distortion,
    scan_one_to_two,
    scan_power_law,
)
from .axial import AxialModes, axial_modes, build_kzz
from .couplings import (
    AXIS_AXIAL,
    AXIS_PLANAR_X,
    DriveConfig,
    axial_j_static,
    axial_j_time,
    midgap_detunings,
    planar_j_static,
)
from .equilibrium import DEFAULT_TOL, Crystal, find_equilibrium, solve
from .errors import NumericalError, ParameterError
from .params import config_from_dict, config_to_dict, derive, load_config, stability
from .planar import PlanarBasis, PlanarModes, coherent_displacement, planar_modes
from .seedlat import generate_seed

log = logging.getLogger("penning")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

ENV_PREFIX = "PENNING_"


def fmt(x: float) -> str:
    """17 significant digits: round-trips every double exactly."""
    return format(float(x), ".17g")


class Run:
    """Collects outputs, input digests and stage timings for the manifest."""

    def __init__(self, out: Path, command: str, args: argparse.Namespace):
        self.out = out
        self.command = command
        self.args = args
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.timing: dict[str, float] = {}
        self.config: dict[str, Any] | None = None
        out.mkdir(parents=True, exist_ok=True)

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        yield
        self.timing[name] = time.perf_counter() - start

    def add_input(self, path: Path) -> None:
        self.inputs[str(path)] = sha256(path)

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self.out / name
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
        self.outputs[name] = sha256(path)
        return path

    def write_json(self, name: str, data: Any) -> Path:
        path = self.out / name
        path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")
        self.outputs[name] = sha256(path)
        return path

    def finish(self) -> None:
        manifest = {
            "tool": "penning",
            "version": __version__,
            "command": self.command,
            "arguments": {k: v for k, v in vars(self.args).items() if k != "func"},
            "config": self.config,
            "tolerances": {"gradient": self.args.tol},
            "inputs": self.inputs,
            "outputs": self.outputs,
            "timing_s": self.timing,
        }
        (self.out / "manifest.json").write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _read_json(path: Path) -> dict[str, Any]:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read {path}: {exc}") from exc


def _read_matrix(path: Path) -> np.ndarray:
    try:
        with Path(path).open() as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParameterError(f"cannot read {path}: {exc}") from exc
    return np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)


def _matrix_rows(mat: np.ndarray) -> Iterable[list[float]]:
    for row in mat:
        yield [float(v) for v in row]


# --- shared loaders ----------------------------------------------------------


def _config(args, run: Run):
    if args.config is None:
        raise ParameterError("--config is required for this subcommand")
    path = Path(args.config)
    config = load_config(path)
    run.add_input(path)
    run.config = config_to_dict(config)
    return config


def _crystal_payload(crystal: Crystal) -> dict[str, Any]:
    return {
        "positions_l0": crystal.positions,
        "energy": crystal.energy,
        "grad_norm": crystal.grad_norm,
        "iterations": crystal.iterations,
    }


def _crystal_from_payload(data: dict[str, Any]) -> Crystal:
    return Crystal(
        positions=np.array(data["positions_l0"], dtype=float).reshape(-1, 2),
        energy=float(data["energy"]),
        grad_norm=float(data["grad_norm"]),
        iterations=int(data.get("iterations", 0)),
    )


def _crystal_for(args, run: Run, config) -> Crystal:
    """Crystal from ``--crystal`` (an ``equilibrium`` output) or a fresh solve."""
    if getattr(args, "crystal", None):
        path = Path(args.crystal)
        if path.is_dir():
            path = path / "crystal.json"
        data = _read_json(path)
        run.add_input(path)
        crystal = _crystal_from_payload(data)
        if len(crystal.positions) != config.n_ions:
            raise ParameterError(
                f"crystal has {len(crystal.positions)} ions but the config says {config.n_ions}"
            )
        return crystal
    with run.stage("equilibrium"):
        return solve(config, args.seed_spacing, args.tol)


# --- subcommands -------------------------------------------------------------


def cmd_seed(args, run: Run) -> None:
    config = _config(args, run)
    seed = generate_seed(config, args.seed_spacing)
    run.write_csv("seed.csv", ["index", "x_l0", "y_l0"], ([i, float(x), float(y)] for i, (x, y) in enumerate(seed.positions)))
    run.write_json("seed.json", {"n_closed_shells": seed.n_closed_shells, "spacing_l0": seed.spacing, "n_ions": len(seed.positions)})


def cmd_equilibrium(args, run: Run) -> None:
    config = _config(args, run)
    seed = generate_seed(config, args.seed_spacing)
    with run.stage("equilibrium"):
        crystal = find_equilibrium(seed, config, tol=args.tol)
    d = derive(config)
    st = stability(config)
    payload = _crystal_payload(crystal)
    payload.update(
        config=config_to_dict(config),
        derived={
            "omega_rot_over_omega_z": d.omega_rot,
            "omega_eff_over_omega_z": d.omega_eff,
            "b_z_tesla": d.b_z,
            "b_eff_tesla": d.b_eff,
            "l0_m": d.units.l0,
            "omega_z_hz": config.f_z_hz,
        },
        stability={"beta1": st.beta1, "beta2": st.beta2, "beta3": st.beta3, "omega_dc": st.omega_dc, "confined": st.confined},
    )
    run.write_json("crystal.json", payload)
    rp = crystal.radii_phases
    run.write_csv(
        "positions.csv",
        ["index", "x_l0", "y_l0", "r_l0", "phi_rad"],
        ([i, float(x), float(y), float(r), float(p)] for i, ((x, y), (r, p)) in enumerate(zip(crystal.positions, rp))),
    )


def cmd_modes(args, run: Run) -> None:
    config = _config(args, run)
    crystal = _crystal_for(args, run, config)
    common = {"config": config_to_dict(config), "crystal": _crystal_payload(crystal)}
    if args.branch == "axial":
        with run.stage("axial"):
            modes = axial_modes(build_kzz(crystal), crystal.positions)
        run.write_json(
            "axial_modes.json",
            {
                **common,
                "branch": "axial",
                "frequencies_over_omega_z": modes.frequencies,
                "imaginary": modes.imaginary,
                "eigenvalues": modes.eigenvalues,
                "stable": modes.stable,
            },
        )
        run.write_csv("axial_eigenvectors.csv", [f"mode_{k}" for k in range(len(modes))], _matrix_rows(modes.eigenvectors))
        return

    with run.stage("planar"):
        basis, modes = planar_modes(crystal, config)
    run.write_json(
        "planar_modes.json",
        {
            **common,
            "branch": "planar",
            "frequencies_over_omega_z": modes.frequencies,
            "branch_split": modes.branch_split,
            "zero_modes": modes.zero_modes,
            "pairing_residual": modes.pairing_residual,
            "basis_eigenvalues": basis.eigenvalues,
            "omega0_over_omega_z": basis.omega0,
            "normalization": "sum_nu (w^2 + w0^2) |alpha|^2 = w, with hbar*m = 1",
        },
    )
    n2 = len(modes)
    header = [f"mode_{k}" for k in range(n2)]
    run.write_csv("planar_basis.csv", header, _matrix_rows(basis.b_vectors))
    run.write_csv("planar_alpha_re.csv", header, _matrix_rows(modes.alphas.real))
    run.write_csv("planar_alpha_im.csv", header, _matrix_rows(modes.alphas.imag))
    ax, ay = modes.site_amplitudes(basis)
    run.write_csv(
        "planar_amplitudes.csv",
        ["mode", "index", "abs_alpha_x", "abs_alpha_y"],
        ([lam, j, float(abs(ax[j, lam])), float(abs(ay[j, lam]))] for lam in range(n2) for j in range(config.n_ions)),
    )
    if args.frames:
        lam = args.mode_index
        if not 0 <= lam < n2:
            raise ParameterError(f"--mode-index {lam} out of range for {n2} planar modes")
        w = modes.frequencies[lam]
        period = 2 * math.pi / w if w > 0 else 1.0
        times = np.arange(args.frames) * period / args.frames
        disp = coherent_displacement(modes, basis, lam, args.occupation, args.phase, times)
        run.write_csv(
            f"frames_mode_{lam}.csv",
            ["frame", "t_over_inv_omega_z", "index", "dx_l0", "dy_l0"],
            (
                [f, float(t), j, float(disp[f, j, 0]), float(disp[f, j, 1])]
                for f, t in enumerate(times)
                for j in range(config.n_ions)
            ),
        )


def _load_modes_dir(path: Path, run: Run, branch: str):
    name = "axial_modes.json" if branch == "axial" else "planar_modes.json"
    meta_path = path / name
    data = _read_json(meta_path)
    run.add_input(meta_path)
    config = config_from_dict(data["config"])
    run.config = config_to_dict(config)
    crystal = _crystal_from_payload(data["crystal"])
    if branch == "axial":
        vec_path = path / "axial_eigenvectors.csv"
        run.add_input(vec_path)
        modes = AxialModes(
            eigenvalues=np.array(data["eigenvalues"], dtype=float),
            frequencies=np.array(data["frequencies_over_omega_z"], dtype=float),
            imaginary=np.array(data["imaginary"], dtype=bool),
            eigenvectors=_read_matrix(vec_path),
        )
        return config, crystal, modes, None
    files = {k: path / f"planar_{k}.csv" for k in ("basis", "alpha_re", "alpha_im")}
    for f in files.values():
        run.add_input(f)
    b = _read_matrix(files["basis"])
    lam = np.array(data["basis_eigenvalues"], dtype=float)
    basis = PlanarBasis(
        k_matrix=(b * lam) @ b.T,
        eigenvalues=lam,
        omega0=np.array(data["omega0_over_omega_z"], dtype=float),
        b_vectors=b,
    )
    modes = PlanarModes(
        frequencies=np.array(data["frequencies_over_omega_z"], dtype=float),
        alphas=_read_matrix(files["alpha_re"]) + 1j * _read_matrix(files["alpha_im"]),
        branch_split=int(data["branch_split"]),
        zero_modes=np.array(data["zero_modes"], dtype=bool),
        pairing_residual=float(data["pairing_residual"]),
    )
    return config, crystal, modes, basis


def cmd_jmatrix(args, run: Run) -> None:
    config, crystal, modes, basis = _load_modes_dir(Path(args.modes), run, args.branch)
    picks = [args.mu is not None, args.delta is not None, args.midgap is not None]
    if sum(picks) != 1:
        raise ParameterError("give exactly one of --mu, --delta, --midgap")
    if args.midgap is not None:
        if args.branch != "axial":
            raise ParameterError("--midgap selects a gap in the axial spectrum; use --branch axial")
        mu = midgap_detunings(modes, args.midgap)
    elif args.delta is not None:
        mu = 1.0 + args.delta
    else:
        mu = args.mu
    with run.stage("jmatrix"):
        if args.branch == "axial":
            drive = DriveConfig(mu=mu, f_o=args.f_o, axis=AXIS_AXIAL)
            if args.time is not None:
                coupling = axial_j_time(modes, drive, args.time)
            else:
                coupling = axial_j_static(modes, drive)
        else:
            if args.time is not None:
                raise ParameterError("--time is only available for the axial branch")
            drive = DriveConfig(mu=mu, f_o=args.f_o, delta_k=args.delta_k, axis=AXIS_PLANAR_X)
            coupling = planar_j_static(modes, basis, crystal, drive, phase=args.phase_mode)
    n = config.n_ions
    run.write_csv("jmatrix.csv", [f"ion_{k}" for k in range(n)], _matrix_rows(coupling.j))
    run.write_json(
        "jmatrix.json",
        {
            "kind": coupling.kind,
            "metadata": coupling.metadata,
            "joule_per_unit": coupling.scale_joule(config),
            "diagonal_note": "diagonal entries are a constant energy shift",
            "config": config_to_dict(config),
            "positions_l0": crystal.positions,
        },
    )


def _load_jmatrix(path: Path, run: Run) -> tuple[np.ndarray, np.ndarray]:
    meta = path / "jmatrix.json"
    mat = path / "jmatrix.csv"
    data = _read_json(meta)
    run.add_input(meta)
    run.add_input(mat)
    run.config = data.get("config")
    positions = np.array(data["positions_l0"], dtype=float).reshape(-1, 2)
    return _read_matrix(mat), positions


def cmd_fit(args, run: Run) -> None:
    j, positions = _load_jmatrix(Path(args.jmatrix), run)
    window = None if args.r_min is None and args.r_max is None else (args.r_min or 0.0, args.r_max or math.inf)
    fit = fit_power_law(j, positions, window)
    run.write_json(
        "fit.json",
        {
            "exponent": fit.exponent,
            "prefactor": fit.prefactor,
            "r_range_l0": fit.r_range,
            "fraction_of_pairs": fit.fraction_of_pairs,
            "r_squared": fit.r_squared,
            "sign": fit.sign,
            "n_bins": fit.n_bins,
        },
    )


def _range_policy(text: str):
    if text in ("full", "symmetric"):
        return text
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise ParameterError(f"--range must be 'full', 'symmetric' or 'lo,hi', got {text!r}") from exc
    return lo, hi


def cmd_hist(args, run: Run) -> None:
    j, _ = _load_jmatrix(Path(args.jmatrix), run)
    h = histogram(j, args.bins, _range_policy(args.range))
    run.write_csv(
        "hist.csv",
        ["bin_lo", "bin_hi", "count"],
        ([float(h.edges[i]), float(h.edges[i + 1]), int(c)] for i, c in enumerate(h.counts)),
    )
    run.write_json(
        "hist.json",
        {"fraction_in_range": h.fraction_in_range, "mean": h.mean, "mean_abs": h.mean_abs, "asymmetry": h.asymmetry},
    )


def cmd_corr(args, run: Run) -> None:
    j, positions = _load_jmatrix(Path(args.jmatrix), run)
    shells = angular_correlation(j, positions, args.reference)
    rows = []
    for s_idx, shell in enumerate(shells):
        for idx, th, val in zip(shell.indices, shell.theta, shell.j):
            rows.append([s_idx, float(shell.radius), int(idx), float(th), float(val)])
    run.write_csv("corr.csv", ["subshell", "radius_l0", "index", "theta_rad", "j"], rows)


def _parse_range(text: str, kind=float) -> list:
    """``a..b`` (integers: inclusive, step 1), ``a..b:step`` or ``a,b,c``."""
    try:
        if ".." in text:
            span, _, step = text.partition(":")
            a, b = (kind(v) for v in span.split(".."))
            if kind is int:
                s = int(step) if step else 1
                return list(range(a, b + 1, s))
            if not step:
                raise ValueError("a float range needs a step, e.g. 0.1..0.2:0.01")
            s = float(step)
            count = int(math.floor((b - a) / s + 1e-9)) + 1
            return [a + i * s for i in range(count)]
        return [kind(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise ParameterError(f"cannot parse range {text!r}: {exc}") from exc


def cmd_scan(args, run: Run) -> None:
    config = _config(args, run)
    with run.stage("scan"):
        if args.type == "one-to-two":
            n_list = _parse_range(args.n, int) if args.n else [config.n_ions]
            bracket = tuple(_parse_range(args.bracket)) if args.bracket else None
            if bracket is not None and len(bracket) != 2:
                raise ParameterError("--bracket takes two values: lo,hi")
            result = scan_one_to_two(
                n_list, config.omega_wall, args.resolution, bracket=bracket, base=config, tol=args.tol, workers=args.workers
            )
        elif args.type in ("band-overlap", "distortion"):
            if not args.omega_eff:
                raise ParameterError(f"--omega-eff grid is required for --type {args.type}")
            grid = _parse_range(args.omega_eff)
            if args.type == "band-overlap":
                result = scan_band_overlap(config, grid, args.resolution, tol=args.tol, workers=args.workers)
            else:
                result = scan_distortion(config, grid, tol=args.tol, workers=args.workers)
        else:
            if not args.detunings:
                raise ParameterError("--detunings is required for --type powerlaw")
            crystal = solve(config, args.seed_spacing, args.tol)
            modes = axial_modes(build_kzz(crystal), crystal.positions)
            result = scan_power_law(
                crystal, lambda d: axial_j_static(modes, DriveConfig(mu=1.0 + d)), _parse_range(args.detunings)
            )
    run.write_csv("scan.csv", result.header(), result.rows())
    run.write_json("scan.json", {"kind": result.kind, "metadata": result.metadata, "flagged": result.flagged})


# --- argument parsing --------------------------------------------------------


def _env(name: str, cast, default):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise ParameterError(f"invalid {ENV_PREFIX}{name}={raw!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="trap config JSON (env PENNING_CONFIG)")
    common.add_argument("--out", help="output directory (env PENNING_OUT, default '.')")
    common.add_argument("--workers", type=int, help="worker processes for scans (env PENNING_WORKERS)")
    common.add_argument("--tol", type=float, help="gradient max-norm tolerance (env PENNING_TOL)")
    common.add_argument("--seed-spacing", type=float, help="seed lattice spacing in l0 (env PENNING_SEED_SPACING)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="penning", description="Planar Penning-trap crystals, phonons and Ising couplings.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seed", parents=[common], help="closed-shell seed lattice")
    p.set_defaults(func=cmd_seed)

    p = sub.add_parser("equilibrium", parents=[common], help="relax the crystal")
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("modes", parents=[common], help="axial or planar normal modes")
    p.add_argument("--branch", choices=["axial", "planar"], required=True)
    p.add_argument("--crystal", help="crystal.json (or its directory) from 'equilibrium'")
    p.add_argument("--frames", type=int, default=0, help="planar: displacement frames over one period")
    p.add_argument("--mode-index", type=int, default=0, help="planar mode for --frames")
    p.add_argument("--occupation", type=float, default=1.0, help="coherent amplitude |phi|")
    p.add_argument("--phase", type=float, default=-math.pi / 2, help="coherent phase delta (default -pi/2)")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("jmatrix", parents=[common], help="Ising coupling matrix")
    p.add_argument("--modes", required=True, help="output directory of 'modes'")
    p.add_argument("--branch", choices=["axial", "planar"], required=True)
    p.add_argument("--mu", type=float, help="beatnote in omega_z units")
    p.add_argument("--delta", type=float, help="detuning mu - omega_z")
    p.add_argument("--midgap", type=int, help="mu halfway between ascending axial modes k and k+1")
    p.add_argument("--time", type=float, help="axial: time-dependent coupling at t (1/omega_z)")
    p.add_argument("--delta-k", type=float, default=1.0, help="planar: wavevector in 1/l0")
    p.add_argument("--phase-mode", choices=["laser", "polar"], default="laser")
    p.add_argument("--f-o", type=float, default=1.0, help="optical force in N (metadata scale only)")
    p.set_defaults(func=cmd_jmatrix)

    p = sub.add_parser("scan", parents=[common], help="parameter scans")
    p.add_argument("--type", choices=["one-to-two", "band-overlap", "distortion", "powerlaw"], required=True)
    p.add_argument("--n", help="ion counts, e.g. 20..100 or 20..100:10")
    p.add_argument("--omega-eff", help="omega_eff grid, e.g. 0.2..0.22:0.005")
    p.add_argument("--bracket", help="one-to-two: initial omega_eff bracket lo,hi")
    p.add_argument("--detunings", help="powerlaw: detunings, e.g. 0.0001,0.01,0.1,1")
    p.add_argument("--resolution", type=float, default=None, help="bisection resolution in omega_z")
    p.set_defaults(func=cmd_scan)

    for name, func, helptext in (("fit", cmd_fit, "power-law fit"), ("hist", cmd_hist, "coupling histogram"), ("corr", cmd_corr, "angular correlations")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--jmatrix", required=True, help="output directory of 'jmatrix'")
        p.set_defaults(func=func)
        if name == "fit":
            p.add_argument("--r-min", type=float)
            p.add_argument("--r-max", type=float)
        elif name == "hist":
            p.add_argument("--bins", type=int, default=50)
            p.add_argument("--range", default="full", help="full | symmetric | lo,hi")
        else:
            p.add_argument("--reference", type=int, default=0)
    return parser


def _apply_env(args) -> None:
    if args.config is None:
        args.config = _env("CONFIG", str, None)
    if args.out is None:
        args.out = _env("OUT", str, ".")
    if args.workers is None:
        args.workers = _env("WORKERS", int, 1)
    if args.tol is None:
        args.tol = _env("TOL", float, DEFAULT_TOL)
    if args.seed_spacing is None:
        args.seed_spacing = _env("SEED_SPACING", float, None)
    if not args.tol > 0:
        raise ParameterError(f"tolerance must be positive, got {args.tol!r}")
    if args.workers < 1:
        raise ParameterError(f"workers must be >= 1, got {args.workers!r}")
    if args.seed_spacing is not None and not args.seed_spacing > 0:
        raise ParameterError(f"seed spacing must be positive, got {args.seed_spacing!r}")
    if getattr(args, "command", None) == "scan" and args.resolution is None:
        args.resolution = 1e-4


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        _apply_env(args)
        run = Run(Path(args.out), args.command, args)
        args.func(args, run)
        run.finish()
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
