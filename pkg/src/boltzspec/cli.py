"""Config-driven experiment runner: ``boltzspec <subcommand> [--config FILE] [--out DIR]``.

Each subcommand reads its settings from the ``[<subcommand>]`` section of an
INI file (any missing key takes its default), writes CSV files plus a
``manifest.json`` to ``--out`` and returns one of the exit codes below.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import re
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np
import scipy.fft as sfft

from . import __version__
from .binary import BinaryCollision, ConservationFix
from .errors import BoltzspecError, ConfigError, NonConvergence
from .grid import DistributionField, SpectralGrid, l2_norm
from .homogeneous import CASES, HomogeneousRun, Operator, initial_distribution, relative_difference, run_homogeneous
from .linear import CutoffPolicy, LinearizedCollision, precompute
from .moments import compute_moments, maxwellian_field
from .quadrature import hemisphere_for_degree, make_radial_quadrature
from .steady import SteadyProblem, WallState, newton_solve, profile_moments

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_NUMERICAL = 0, 2, 3, 4
FLOAT_FORMAT = "{:.12e}"


# -- config parsing -------------------------------------------------------------------------

def _float_list(text: str) -> list[float]:
    return [float(x) for x in re.split(r"[,\s]+", text.strip()) if x]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in re.split(r"[,\s]+", text.strip()) if x]


def _positive(x) -> bool:
    return all(v > 0 for v in x) if isinstance(x, list) else x > 0


@dataclass(frozen=True)
class Field:
    parse: Callable[[str], Any]
    default: Any
    check: Callable[[Any], bool] = lambda x: True
    hint: str = ""


_CASE = Field(int, 1, lambda c: c in CASES, "1 or 2")
_N = Field(int, 16, lambda n: n >= 2, "integer >= 2")
_POS = "positive"

SCHEMAS: dict[str, dict[str, Field]] = {
    "accuracy-table": {
        "case": _CASE,
        "R": Field(_float_list, [6.0], _positive, _POS),
        "N": Field(_int_list, [16], lambda ns: all(n >= 2 for n in ns), "integers >= 2"),
    },
    "compare-operators": {
        "case": _CASE,
        "M": Field(_int_list, [25], _positive, _POS),
        "t_end": Field(float, 10.0, lambda t: t >= 0, "non-negative"),
        "dt": Field(float, 0.1, _positive, _POS),
        "N": _N,
        "R": Field(float, 6.0, _positive, _POS),
    },
    "homogeneous": {
        "case": _CASE,
        "operator": Field(str, "linearized", lambda s: s in ("linearized", "binary"), "linearized or binary"),
        "M": Field(int, 25, _positive, _POS),
        "N": _N,
        "R": Field(float, 6.0, _positive, _POS),
        "dt": Field(float, 0.1, _positive, _POS),
        "t_end": Field(float, 10.0, lambda t: t >= 0, "non-negative"),
        "linearize_about": Field(str, "standard", lambda s: s in ("standard", "initial"), "standard or initial"),
        "slice_stride": Field(int, 0, lambda n: n >= 0, "non-negative integer"),
    },
    "steady": {
        "problem": Field(str, "couette", lambda s: s in ("couette", "fourier"), "couette or fourier"),
        "Kn": Field(float, 1.0, _positive, _POS),
        "u_w": Field(float, 0.5, lambda u: np.isfinite(u), "finite"),
        "theta_L": Field(float, 1.0, _positive, _POS),
        "theta_R": Field(float, 1.0, _positive, _POS),
        "x_L": Field(float, -0.5),
        "x_R": Field(float, 0.5),
        "Nx": Field(int, 200, lambda n: n >= 1, "integer >= 1"),
        "C": Field(float, 1.0, _positive, _POS),
        "N": _N,
        "R": Field(float, 0.0, lambda r: r >= 0, "non-negative (0 picks the default)"),
        "M": Field(int, 25, _positive, _POS),
        "outer_res": Field(float, 1e-5, _positive, _POS),
        "inner_abs": Field(float, 1e-7, _positive, _POS),
        "inner_rel": Field(float, 1e-3, _positive, _POS),
        "max_newton": Field(int, 20, lambda n: n >= 0, "non-negative integer"),
        "max_inner": Field(int, 500, _positive, _POS),
    },
    "cancellation-demo": {
        "N": _N,
        "L": Field(float, 7.5, _positive, _POS),
    },
}


def _line_of(path: Path, section: str, key: str) -> int | None:
    """Line number of ``key`` inside ``[section]`` (for error messages)."""
    current = None
    for no, line in enumerate(path.read_text().splitlines(), 1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", stripped, re.IGNORECASE):
            return no
    return None


def load_config(command: str, path: str | Path | None) -> dict[str, Any]:
    """Resolve the settings of ``command``; unknown or invalid keys raise :class:`ConfigError`."""
    schema = SCHEMAS[command]
    values = {k: f.default for k, f in schema.items()}
    if path is None:
        return values
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with path.open() as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    sections = parser.sections()
    if command in sections:
        section = command
    elif len(sections) == 1:
        section = sections[0]
    else:
        raise ConfigError(f"{path}: expected a [{command}] section, found {sections}")
    lookup = {k.lower(): k for k in schema}
    for raw_key, text in parser.items(section):
        where = f"{path}:{_line_of(path, section, raw_key) or '?'} [{section}] {raw_key}"
        key = lookup.get(raw_key.lower())
        if key is None:
            raise ConfigError(f"{where}: unknown key (allowed: {', '.join(schema)})")
        fld = schema[key]
        try:
            value = fld.parse(text)
        except ValueError as exc:
            raise ConfigError(f"{where}: cannot parse {text!r} ({exc})") from exc
        if not fld.check(value):
            raise ConfigError(f"{where}: {text!r} is invalid, expected {fld.hint}")
        values[key] = value
    return values


# -- output helpers ----------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FLOAT_FORMAT.format(float(x))
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> Path:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    return path


def version_string() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=5, check=True)
        return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        return __version__


def write_manifest(out: Path, command: str, config: dict, options: dict, files: list[Path]) -> Path:
    manifest = {
        "command": command,
        "config": config,
        "options": options,
        "version": version_string(),
        "outputs": sorted(p.name for p in files),
        "determinism": "no random numbers are used; identical config and version give identical data CSVs "
                       "(timing files excepted)",
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return path


# -- experiments -------------------------------------------------------------------------

def accuracy_row(case: int, R: float, N: int, cutoff: CutoffPolicy = CutoffPolicy(),
                 fix=ConservationFix.NONE) -> tuple[float, float]:
    """L2 difference of ``L[f]`` against the binary ``Q[M,f]+Q[f,M]`` and relative difference to ``Q[f,f]``.

    ``M`` is the Maxwellian of the case's (unit-density) initial data and the
    binary reference uses the hemisphere rule exact to degree ``2N``.
    """
    grid = SpectralGrid(N, R)
    kernel, _ = CASES[case]
    rq = make_radial_quadrature(N, R)
    f = initial_distribution(case, grid)
    params = compute_moments(DistributionField(f, grid)).params()
    M = maxwellian_field(params, grid).values
    binary = BinaryCollision(grid, kernel, rq, hemisphere_for_degree(2 * N), fix)
    Lf = LinearizedCollision.about(params, precompute(grid, rq, kernel), policy=cutoff,
                                   mass_fix=ConservationFix.parse(fix) is not ConservationFix.NONE)(f)
    Q = binary(f)
    return float(l2_norm(Lf - binary.pair(f, M), grid)), float(l2_norm(Lf - Q, grid) / l2_norm(Q, grid))


def cmd_accuracy_table(cfg: dict, out: Path, cutoff: CutoffPolicy, fix) -> list[Path]:
    rows = []
    for R in cfg["R"]:
        for N in cfg["N"]:
            diff, rel = accuracy_row(cfg["case"], R, N, cutoff, fix)
            log.info("case %d R %g N %d: l2_diff %.3e rel %.4f", cfg["case"], R, N, diff, rel)
            rows.append((cfg["case"], R, N, diff, rel))
    return [write_csv(out / "accuracy_table.csv", ["case", "R", "N", "l2_diff", "rel_diff_vs_binary"], rows)]


def _trajectory_rows(traj):
    return zip(traj.times, traj.mass, traj.l2_to_maxwellian)


def cmd_compare_operators(cfg: dict, out: Path, cutoff: CutoffPolicy, fix) -> list[Path]:
    base = dict(case=cfg["case"], dt=cfg["dt"], t_end=cfg["t_end"], N=cfg["N"], R=cfg["R"], fix=fix,
                cutoff=cutoff, snapshot_stride=1)
    files = []
    lin = run_homogeneous(HomogeneousRun(operator=Operator.LINEARIZED, **base))
    timing = [("linearized", 0, lin.seconds_per_step)]
    for M in cfg["M"]:
        b = run_homogeneous(HomogeneousRun(operator=Operator.BINARY, M=M, **base))
        E = relative_difference(lin, b)
        rows = zip(lin.times, lin.mass, b.mass, lin.l2_to_maxwellian, b.l2_to_maxwellian, E)
        files.append(write_csv(out / f"compare_M{M}.csv",
                               ["t", "mass_lin", "mass_bin", "l2_to_maxwellian_lin", "l2_to_maxwellian_bin", "E"], rows))
        log.info("M %d: max E %.4f", M, float(np.max(E)))
        timing.append(("binary", M, b.seconds_per_step))
    files.append(write_csv(out / "timing.csv", ["operator", "M", "seconds_per_step"], timing))
    return files


def cmd_homogeneous(cfg: dict, out: Path, cutoff: CutoffPolicy, fix) -> list[Path]:
    run = HomogeneousRun(case=cfg["case"], operator=cfg["operator"], M=cfg["M"], dt=cfg["dt"], t_end=cfg["t_end"],
                         N=cfg["N"], R=cfg["R"], fix=fix, cutoff=cutoff, snapshot_stride=cfg["slice_stride"],
                         linearize_about=cfg["linearize_about"])
    traj = run_homogeneous(run)
    files = [write_csv(out / "trajectory.csv", ["t", "mass", "l2_to_maxwellian"], _trajectory_rows(traj))]
    if cfg["slice_stride"]:
        grid = traj.grid
        v = grid.v1d
        rows = []
        for step in sorted(traj.snapshots):
            plane = traj.snapshots[step][:, :, 0]  # v3 = 0 is index 0 in FFT order
            for a in range(grid.n):
                for b in range(grid.n):
                    rows.append((traj.times[step], v[a], v[b], plane[a, b]))
        files.append(write_csv(out / "slices_v3_0.csv", ["t", "v1", "v2", "f"], rows))
    files.append(write_csv(out / "timing.csv", ["operator", "seconds_per_step"], [(cfg["operator"], traj.seconds_per_step)]))
    return files


def steady_problem(cfg: dict, cutoff: CutoffPolicy, fix) -> SteadyProblem:
    common = dict(x_L=cfg["x_L"], x_R=cfg["x_R"], Nx=cfg["Nx"], C=cfg["C"], N=cfg["N"], R=cfg["R"] or None,
                  M=cfg["M"], fix=fix, cutoff=cutoff, outer_res=cfg["outer_res"], inner_abs=cfg["inner_abs"],
                  inner_rel=cfg["inner_rel"], max_newton=cfg["max_newton"], max_inner=cfg["max_inner"])
    if cfg["problem"] == "couette":
        return SteadyProblem(cfg["Kn"], WallState((0, -cfg["u_w"], 0), cfg["theta_L"]),
                             WallState((0, cfg["u_w"], 0), cfg["theta_R"]), **common)
    return SteadyProblem(cfg["Kn"], WallState((0, 0, 0), cfg["theta_L"]), WallState((0, 0, 0), cfg["theta_R"]),
                         **common)


def _steady_outputs(out: Path, problem: SteadyProblem, f, report) -> list[Path]:
    grid = problem.grid()
    m = profile_moments(f, grid)
    header = ["x", "rho", "u1", "u2", "u3", "theta", "q1", "q2", "q3"]
    header += [f"p{a}{b}" for a in range(1, 4) for b in range(1, 4)]
    rows = [
        [x, m.rho[i], *m.u[i], m.theta[i], *m.q[i], *m.p[i].ravel()]
        for i, x in enumerate(problem.x)
    ]
    files = [write_csv(out / "profiles.csv", header, rows)]
    files.append(write_csv(out / "newton_history.csv", ["newton_iter", "residual"], enumerate(report.residuals)))
    inner = [(k + 1, i + 1, rel) for k, h in enumerate(report.inner_histories) for i, rel in enumerate(h)]
    files.append(write_csv(out / "inner_history.csv", ["newton_iter", "inner_iter", "rel_residual"], inner))
    total = report.total_seconds or 1.0
    files.append(write_csv(out / "timing.csv", ["part", "seconds", "fraction"], [
        ("binary_residual", report.binary_seconds, report.binary_seconds / total),
        ("inner_iterations", report.inner_seconds, report.inner_seconds / total),
        ("total", report.total_seconds, 1.0),
    ]))
    return files


def cmd_steady(cfg: dict, out: Path, cutoff: CutoffPolicy, fix) -> list[Path]:
    problem = steady_problem(cfg, cutoff, fix)
    try:
        f, report = newton_solve(problem)
    except NonConvergence as exc:
        if exc.solution is not None and exc.report is not None:
            _steady_outputs(out, problem, exc.solution, exc.report)
        raise
    log.info("converged after %d Newton updates", report.newton_iterations)
    return _steady_outputs(out, problem, f, report)


def cancellation_demo(N: int = 16, L: float = 7.5, epsilon: float = 1e-9) -> dict[str, float]:
    """Round trip ``M -> FFT -> iFFT -> /M -> FFT -> iFFT -> *M`` on ``[-L, L)^3``.

    Returns the max norms of ``f - g``, ``f - q`` and ``r - 1`` and, with the
    cut-off ``M >= epsilon`` applied to the division, ``r - 1`` on kept points.
    """
    x = np.arange(-N, N) * (L / N)
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    M = np.fft.fftshift(np.exp(-(X**2 + Y**2 + Z**2) / 2) / (2 * np.pi) ** 1.5)
    f = M
    g = np.fft.ifftn(np.fft.fftn(f))
    r = g / M
    q = np.fft.ifftn(np.fft.fftn(r)) * M
    keep = M >= epsilon
    r_cut = np.where(keep, g / np.where(keep, M, 1.0), 0.0)
    return {
        "max_abs_f_minus_g": float(np.max(np.abs(f - g))),
        "max_abs_f_minus_q": float(np.max(np.abs(f - q))),
        "max_abs_r_minus_1": float(np.max(np.abs(r - 1))),
        "max_abs_r_minus_1_kept": float(np.max(np.abs(r_cut - 1)[keep])),
    }


def cmd_cancellation_demo(cfg: dict, out: Path, cutoff: CutoffPolicy, fix) -> list[Path]:
    res = cancellation_demo(cfg["N"], cfg["L"], cutoff.epsilon)
    lines = [
        f"Max norm of f-g: {res['max_abs_f_minus_g']:e}",
        f"Max norm of f-q: {res['max_abs_f_minus_q']:e}",
        f"Max norm of r-1: {res['max_abs_r_minus_1']:e}",
        f"Max norm of r-1 on points with M >= {cutoff.epsilon:g}: {res['max_abs_r_minus_1_kept']:e}",
    ]
    print("\n".join(lines))
    path = out / "cancellation.txt"
    path.write_text("\n".join(lines) + "\n")
    return [path, write_csv(out / "cancellation.csv", ["quantity", "value"], res.items())]


COMMANDS = {
    "accuracy-table": cmd_accuracy_table,
    "compare-operators": cmd_compare_operators,
    "homogeneous": cmd_homogeneous,
    "steady": cmd_steady,
    "cancellation-demo": cmd_cancellation_demo,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a section named after the subcommand")
    common.add_argument("--out", default="out", help="output directory (created if missing)")
    common.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    common.add_argument("--no-cutoff", action="store_true", help="divide by M everywhere (expect overflow)")
    common.add_argument("--fix", choices=[m.value for m in ConservationFix], default="none",
                        help="mass-conservation fix of the collision operators")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="boltzspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"run the {name} experiment")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = load_config(args.command, args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        cutoff = CutoffPolicy(enabled=not args.no_cutoff)
        fix = ConservationFix.parse(args.fix)
        options = {"threads": args.threads, "cutoff": cutoff.enabled, "epsilon": cutoff.epsilon, "fix": fix.value}
        start = time.perf_counter()
        with sfft.set_workers(args.threads):
            files = COMMANDS[args.command](cfg, out, cutoff, fix)
        write_manifest(out, args.command, cfg, options, files)
        log.info("%s finished in %.1f s", args.command, time.perf_counter() - start)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (FloatingPointError, BoltzspecError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:  # cross-field checks in the problem constructors
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


__all__ = ["COMMANDS", "SCHEMAS", "accuracy_row", "build_parser", "cancellation_demo", "load_config", "main",
           "steady_problem", "write_csv"]
