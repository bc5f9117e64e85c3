"""Command-line front end: point evaluations, sweeps, and optimization runs.

Every CSV starts with '#'-prefixed manifest lines (command, parameters, tool
version, timestamp) so a file documents how it was produced; data rows are
plain comma-separated values with at least 10 significant digits, and
re-running a command with the same flags reproduces them byte for byte.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .constellation import (
    BinaryConstellation,
    make_bpsk,
    parametrize,
    psd_watts_per_hz,
)
from .helstrom import optimize_helstrom, perr_helstrom, phase_diffused_state, required_dim
from .montecarlo import SCHEME_KENNEDY, TrialConfig, simulate_perr
from .optimizer import OptimizationProblem, optimize, sweep_sigma
from .phasenoise import ConvergenceError, PhaseNoise
from .receivers import (
    perr_bpsk_hom,
    perr_helstrom_noiseless,
    perr_ook_dd,
    perr_sql_baseline,
    photocount_distribution,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility header embedded in every CSV output."""

    command: str
    parameters: dict
    tool_version: str
    timestamp: str

    @classmethod
    def create(cls, command: str, parameters: dict) -> "RunManifest":
        return cls(
            command=command,
            parameters=parameters,
            tool_version=f"phaserx {__version__}",
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )

    def comment_lines(self) -> list[str]:
        params = " ".join(f"{k}={v}" for k, v in sorted(self.parameters.items()))
        return [
            f"# command: {self.command}",
            f"# parameters: {params}",
            f"# tool_version: {self.tool_version}",
            f"# timestamp: {self.timestamp}",
        ]


def _fmt(x: float) -> str:
    return f"{x:.10e}"


@contextlib.contextmanager
def _open_output(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_csv(fh, manifest: RunManifest, columns: list[str], rows) -> None:
    for line in manifest.comment_lines():
        print(line, file=fh)
    print(",".join(columns), file=fh)
    for row in rows:
        print(",".join(row), file=fh)


def _float_range(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0.0:
        raise ValueError(f"step must be > 0, got {step}")
    if hi < lo:
        raise ValueError(f"range end {hi} is below start {lo}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    last = lo + step * (n - 1)
    if abs(last - hi) <= 1e-9 * max(1.0, abs(hi)):
        last = hi
    return np.linspace(lo, last, n)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_sql(args) -> int:
    nbar = args.efficiency * args.nbar
    noise = PhaseNoise(args.sigma)
    p_dd = perr_ook_dd(nbar)
    p_hom = perr_bpsk_hom(nbar, noise, args.tolerance)
    print(f"nbar = {args.nbar!r}")
    print(f"sigma = {args.sigma!r}")
    print(f"efficiency = {args.efficiency!r}")
    print(f"perr_ook_dd = {_fmt(p_dd)}")
    print(f"perr_bpsk_hom = {_fmt(p_hom)}")
    print(f"perr_sql = {_fmt(min(p_dd, p_hom))}")
    print(f"sql_branch = {'ook_dd' if p_dd <= p_hom else 'bpsk_hom'}")
    return EXIT_OK


def _cmd_sweep_nbar(args) -> int:
    nbars = _float_range(args.nbar_min, args.nbar_max, args.step)
    wavelength = args.wavelength_nm * 1e-9
    manifest = RunManifest.create(
        "sweep-nbar",
        {
            "nbar_min": args.nbar_min,
            "nbar_max": args.nbar_max,
            "step": args.step,
            "wavelength_nm": args.wavelength_nm,
            "efficiency": args.efficiency,
        },
    )
    noiseless = PhaseNoise(0.0)
    rows = []
    for nbar in nbars:
        nb = args.efficiency * float(nbar)
        rows.append(
            [
                _fmt(float(nbar)),
                _fmt(psd_watts_per_hz(float(nbar), wavelength)),
                _fmt(perr_ook_dd(nb)),
                _fmt(perr_bpsk_hom(nb, noiseless, args.tolerance)),
                _fmt(0.5 * math.exp(-4.0 * nb)),
                _fmt(perr_helstrom_noiseless(make_bpsk(nb))),
            ]
        )
    with _open_output(args.output) as fh:
        _write_csv(
            fh,
            manifest,
            ["nbar", "psd_watts_per_hz", "perr_ook_dd", "perr_bpsk_hom",
             "perr_kennedy", "perr_helstrom"],
            rows,
        )
    return EXIT_OK


def _cmd_sweep_sigma(args) -> int:
    sigmas = _float_range(args.sigma_min, args.sigma_max, args.step)
    pnr_list = sorted(set(args.pnr_list))
    nbar = args.efficiency * args.nbar
    manifest = RunManifest.create(
        "sweep-sigma",
        {
            "nbar": args.nbar,
            "sigma_min": args.sigma_min,
            "sigma_max": args.sigma_max,
            "step": args.step,
            "pnr_list": ";".join(str(p) for p in pnr_list),
            "efficiency": args.efficiency,
            "grid_resolution": args.grid_resolution,
            "beta_resolution": args.beta_resolution,
        },
    )
    cells = sweep_sigma(
        nbar,
        [float(s) for s in sigmas],
        pnr_list,
        jobs=args.jobs,
        grid_resolution=args.grid_resolution,
        beta_resolution=args.beta_resolution,
        quad_tolerance=args.tolerance,
    )
    by_key = {(cell.pnr_ceiling, i % len(sigmas)): cell
              for i, cell in enumerate(cells)}
    top = max(pnr_list)

    columns = (
        ["sigma", "perr_sql", "perr_helstrom_at_optimum", "perr_helstrom_independent"]
        + [f"perr_pnr{p}" for p in pnr_list]
        + ["alpha0", "alpha1", "beta", "threshold_k", "orientation"]
    )
    rows = []
    for i, sigma in enumerate(sigmas):
        noise = PhaseNoise(float(sigma))
        _, hel_best = optimize_helstrom(nbar, noise)
        row = [_fmt(float(sigma))]
        lead = by_key[(top, i)]
        if lead.result is not None:
            row.append(_fmt(lead.result.perr_sql))
            row.append(_fmt(lead.result.perr_helstrom))
        else:
            row.extend(["", ""])
            print(f"warning: optimization failed at sigma={sigma}, pnr={top}:\n"
                  f"{lead.error}", file=sys.stderr)
        row.append(_fmt(hel_best))
        for p in pnr_list:
            cell = by_key[(p, i)]
            if cell.result is not None:
                row.append(_fmt(cell.result.perr))
            else:
                row.append("")
                if p != top:
                    print(f"warning: optimization failed at sigma={sigma}, "
                          f"pnr={p}:\n{cell.error}", file=sys.stderr)
        if lead.result is not None:
            res = lead.result
            row.extend(
                [
                    _fmt(res.constellation.alpha0.real),
                    _fmt(res.constellation.alpha1.real),
                    _fmt(res.config.beta.real),
                    str(res.config.threshold_k),
                    res.orientation,
                ]
            )
        else:
            row.extend(["", "", "", "", ""])
        rows.append(row)
    with _open_output(args.output) as fh:
        _write_csv(fh, manifest, columns, rows)
    return EXIT_OK


def _cmd_optimize(args) -> int:
    nbar = args.efficiency * args.nbar
    problem = OptimizationProblem(
        nbar=nbar,
        noise=PhaseNoise(args.sigma),
        pnr_ceiling=args.pnr,
        grid_resolution=args.grid_resolution,
        beta_resolution=args.beta_resolution,
        quad_tolerance=args.tolerance,
    )
    result = optimize(problem)
    print(f"nbar = {args.nbar!r}")
    print(f"sigma = {args.sigma!r}")
    print(f"pnr_ceiling = {args.pnr}")
    print(f"efficiency = {args.efficiency!r}")
    print(f"alpha0 = {_fmt(result.constellation.alpha0.real)}")
    print(f"alpha1 = {_fmt(result.constellation.alpha1.real)}")
    print(f"beta = {_fmt(result.config.beta.real)}")
    print(f"threshold_k = {result.config.threshold_k}")
    print(f"orientation = {result.orientation}")
    print(f"perr = {_fmt(result.perr)}")
    print(f"perr_sql = {_fmt(result.perr_sql)}")
    print(f"perr_helstrom = {_fmt(result.perr_helstrom)}")
    print(f"sub_sql = {str(result.perr < result.perr_sql).lower()}")

    if args.validate:
        t = TrialConfig(trials=args.validate, seed=args.seed, scheme=SCHEME_KENNEDY)
        estimate, std_error = simulate_perr(
            result.constellation, result.config, problem.noise, t,
            orientation=result.orientation,
        )
        if std_error > 0.0:
            z = (estimate - result.perr) / std_error
        else:
            z = 0.0 if estimate == result.perr else math.inf
        print(f"validate_trials = {args.validate}")
        print(f"validate_seed = {args.seed}")
        print(f"validate_estimate = {_fmt(estimate)}")
        print(f"validate_std_error = {_fmt(std_error)}")
        print(f"validate_z = {z:.4f}")

    if args.trace_output:
        manifest = RunManifest.create(
            "optimize-trace",
            {"nbar": args.nbar, "sigma": args.sigma, "pnr": args.pnr},
        )
        with _open_output(args.trace_output) as fh:
            _write_csv(
                fh,
                manifest,
                ["iteration", "perr"],
                ([str(i), _fmt(p)] for i, p in result.trace),
            )
    return EXIT_OK


def _cmd_pk(args) -> int:
    alpha = math.sqrt(args.efficiency) * args.alpha
    noise = PhaseNoise(args.sigma)
    kmax = args.kmax
    if kmax is None:
        mu_peak = (abs(alpha) + abs(args.beta)) ** 2
        kmax = math.ceil(mu_peak + 10.0 * math.sqrt(mu_peak + 1.0) + 10.0)
    dist = photocount_distribution(alpha, args.beta, noise, kmax, args.tolerance)
    manifest = RunManifest.create(
        "pk",
        {
            "alpha": args.alpha,
            "beta": args.beta,
            "sigma": args.sigma,
            "kmax": kmax,
            "efficiency": args.efficiency,
            "tail_mass": _fmt(dist.tail_mass),
        },
    )
    with _open_output(args.output) as fh:
        _write_csv(
            fh,
            manifest,
            ["k", "probability"],
            ([str(k), _fmt(p)] for k, p in enumerate(dist.probs)),
        )
    return EXIT_OK


def _cmd_helstrom(args) -> int:
    noise = PhaseNoise(args.sigma)
    if args.alpha0 is not None or args.alpha1 is not None:
        if args.alpha0 is None or args.alpha1 is None:
            raise ValueError("--alpha0 and --alpha1 must be given together")
        scale = math.sqrt(args.efficiency)
        c = BinaryConstellation(scale * args.alpha0, scale * args.alpha1)
        label = "explicit"
    elif args.optimize_constellation:
        c, _ = optimize_helstrom(args.efficiency * args.nbar, noise)
        label = "optimized"
    else:
        c = parametrize(args.theta, args.efficiency * args.nbar)
        label = "parametrized"
    dim = required_dim(max(abs(c.alpha0) ** 2, abs(c.alpha1) ** 2))
    print(f"constellation = {label}")
    print(f"alpha0 = {c.alpha0}")
    print(f"alpha1 = {c.alpha1}")
    print(f"sigma = {args.sigma!r}")
    print(f"fock_dim = {dim}")
    print(f"mean_photon_number = {_fmt(c.mean_photon_number())}")
    print(f"perr_helstrom = {_fmt(perr_helstrom(c, noise))}")
    print(f"perr_helstrom_noiseless = {_fmt(perr_helstrom_noiseless(c))}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser, *, nbar: bool = True, sigma: bool = True):
    if nbar:
        p.add_argument("--nbar", type=float, required=True,
                       help="average photon number per symbol")
    if sigma:
        p.add_argument("--sigma", type=float, required=True,
                       help="phase-noise strength in radians")
    p.add_argument("--efficiency", type=float, default=1.0,
                   help="detector efficiency; amplitudes are pre-scaled by its "
                        "square root (default 1)")
    p.add_argument("--tolerance", type=float, default=1e-10,
                   help="relative tolerance of the phase-average quadrature")


def _add_grid_knobs(p: argparse.ArgumentParser):
    p.add_argument("--grid-resolution", type=int, default=181,
                   help="number of constellation-angle grid points")
    p.add_argument("--beta-resolution", type=int, default=241,
                   help="number of displacement grid points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phaserx",
        description="Error probabilities and receiver optimization for binary "
                    "coherent-state constellations over a Gaussian phase-noise "
                    "channel.",
    )
    parser.add_argument("--version", action="version", version=f"phaserx {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("sql", help="conventional-detection baselines at one point")
    _add_common(p)
    p.set_defaults(func=_cmd_sql)

    p = sub.add_parser("sweep-nbar", help="noiseless error-rate curves vs photon number")
    p.add_argument("--nbar-min", type=float, default=0.0)
    p.add_argument("--nbar-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--wavelength-nm", type=float, default=1550.0,
                   help="wavelength for the PSD column (default 1550)")
    p.add_argument("--output", default="-", help="CSV path, '-' for stdout")
    _add_common(p, nbar=False, sigma=False)
    p.set_defaults(func=_cmd_sweep_nbar)

    p = sub.add_parser("sweep-sigma", help="optimized receiver vs noise strength")
    p.add_argument("--sigma-min", type=float, default=0.0)
    p.add_argument("--sigma-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--pnr-list", type=lambda s: [int(x) for x in s.split(",")],
                   default=[1, 2, 3, 8],
                   help="comma-separated PNR ceilings (default 1,2,3,8)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes for sweep cells")
    p.add_argument("--output", default="-", help="CSV path, '-' for stdout")
    _add_common(p, sigma=False)
    _add_grid_knobs(p)
    p.set_defaults(func=_cmd_sweep_sigma)

    p = sub.add_parser("optimize", help="optimize constellation, displacement, threshold")
    p.add_argument("--pnr", type=int, required=True, help="PNR ceiling")
    p.add_argument("--validate", type=int, default=0, metavar="TRIALS",
                   help="cross-check the result against the sampling oracle")
    p.add_argument("--seed", type=int, default=20260822,
                   help="oracle RNG seed (with --validate)")
    p.add_argument("--trace-output", default=None,
                   help="optional CSV path for the refinement audit trace")
    _add_common(p)
    _add_grid_knobs(p)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("pk", help="dump the photocount distribution")
    p.add_argument("--alpha", type=complex, required=True,
                   help="signal amplitude (python complex syntax, e.g. 1.2 or 1+0.5j)")
    p.add_argument("--beta", type=complex, default=0j, help="displacement")
    p.add_argument("--kmax", type=int, default=None,
                   help="largest count to emit (default: covers the bulk)")
    p.add_argument("--output", default="-", help="CSV path, '-' for stdout")
    _add_common(p, nbar=False)
    p.set_defaults(func=_cmd_pk)

    p = sub.add_parser("helstrom", help="quantum-optimal error probability")
    p.add_argument("--theta", type=float, default=3.0 * math.pi / 4.0,
                   help="constellation angle (default BPSK)")
    p.add_argument("--alpha0", type=complex, default=None)
    p.add_argument("--alpha1", type=complex, default=None)
    p.add_argument("--optimize-constellation", action="store_true",
                   help="optimize the constellation angle at fixed power")
    _add_common(p)
    p.set_defaults(func=_cmd_helstrom)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure (eigensolver): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
