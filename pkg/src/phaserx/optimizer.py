"""Receiver and constellation optimization under the average-power constraint.

Minimizes the displaced photon-counting error probability over the
constellation angle ``theta`` (which parametrizes all real-axis binary
constellations of a given mean photon number exactly), the displacement
``beta``, and the count threshold ``K``.  The Gaussian phase distribution is
even, so the error probability is invariant under complex conjugation of all
parameters and the optimum can be taken on the real axis; the test suite
guards that restriction with an imaginary-perturbation check.

The search is fully deterministic: a dense (theta, beta) grid per threshold
value seeds coordinate-wise golden-section refinement, and ties are broken
by smaller ``K``, then smaller ``|beta|``, then smaller ``theta``.
"""

from __future__ import annotations

import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constellation import BinaryConstellation, parametrize
from .golden import golden_minimize
from .helstrom import perr_helstrom
from .phasenoise import PhaseNoise, build_rule
from .receivers import ReceiverConfig, generalized_kennedy_detail, perr_sql_baseline

GRID_QUAD_ORDER = 96
MAX_REFINE_ROUNDS = 60
TIE_WINDOW = 1e-12


@dataclass(frozen=True)
class OptimizationProblem:
    """Search specification: power budget, channel, detector, and knobs."""

    nbar: float
    noise: PhaseNoise
    pnr_ceiling: int
    grid_resolution: int = 181
    beta_resolution: int = 241
    refine_tolerance: float = 1e-8
    quad_tolerance: float = 1e-10
    refine_seeds: int = 5

    def __post_init__(self):
        if self.nbar <= 0.0:
            raise ValueError(f"nbar must be > 0, got {self.nbar}")
        if self.pnr_ceiling < 1:
            raise ValueError(f"pnr_ceiling must be >= 1, got {self.pnr_ceiling}")
        if self.grid_resolution < 2 or self.beta_resolution < 2:
            raise ValueError("grid resolutions must be >= 2")
        if self.refine_tolerance <= 0.0:
            raise ValueError(f"refine_tolerance must be > 0, got {self.refine_tolerance}")

    @property
    def beta_max(self) -> float:
        return 3.0 * math.sqrt(2.0 * self.nbar)


@dataclass(frozen=True)
class OptimizationResult:
    """Best receiver found, with the baselines it is judged against."""

    constellation: BinaryConstellation
    config: ReceiverConfig
    perr: float
    perr_sql: float
    perr_helstrom: float
    orientation: str
    trace: tuple[tuple[int, float], ...] = field(repr=False)


@dataclass(frozen=True)
class SweepCell:
    """One (sigma, PNR ceiling) cell of a sweep; failed cells carry an error."""

    sigma: float
    pnr_ceiling: int
    result: OptimizationResult | None
    error: str | None


def _grid_scan(problem: OptimizationProblem):
    """Evaluate the error probability on the full (K, theta, beta) grid.

    Returns ``(thetas, betas, perr)`` with ``perr[k, i, j]`` the
    best-orientation error at threshold ``k``.  Uses a fixed-order rule;
    the grid only seeds refinement, which re-evaluates adaptively.
    """
    s = math.sqrt(2.0 * problem.nbar)
    thetas = np.linspace(0.0, math.pi, problem.grid_resolution, endpoint=False)
    betas = np.linspace(-problem.beta_max, problem.beta_max, problem.beta_resolution)
    rule = build_rule(problem.noise, GRID_QUAD_ORDER)

    a0 = (s * np.cos(thetas))[:, None]
    a1 = (s * np.sin(thetas))[:, None]
    b = betas[None, :]
    kmax = problem.pnr_ceiling - 1
    shape = (kmax + 1, thetas.size, betas.size)
    low0 = np.zeros(shape)
    low1 = np.zeros(shape)
    for w, phi in zip(rule.weights, rule.nodes):
        two_cos = 2.0 * math.cos(phi)
        mu0 = a0 * a0 + b * b + a0 * b * two_cos
        mu1 = a1 * a1 + b * b + a1 * b * two_cos
        term0 = np.exp(-mu0)
        term1 = np.exp(-mu1)
        cdf0 = term0.copy()
        cdf1 = term1.copy()
        low0[0] += w * cdf0
        low1[0] += w * cdf1
        for k in range(1, kmax + 1):
            term0 = term0 * mu0 / k
            term1 = term1 * mu1 / k
            cdf0 = cdf0 + term0
            cdf1 = cdf1 + term1
            low0[k] += w * cdf0
            low1[k] += w * cdf1
    perr = 0.5 * low1 + 0.5 * (1.0 - low0)
    return thetas, betas, np.minimum(perr, 1.0 - perr)


def _select_seeds(perr: np.ndarray, nseeds: int) -> list[tuple[int, int, int]]:
    """Deterministic seed set: best grid cell per threshold plus the overall
    top ``nseeds`` cells (stable row-major order on ties)."""
    seeds: list[tuple[int, int, int]] = []
    kmax1 = perr.shape[0]
    for k in range(kmax1):
        i, j = np.unravel_index(int(np.argmin(perr[k])), perr.shape[1:])
        seeds.append((k, int(i), int(j)))
    order = np.argsort(perr, axis=None, kind="stable")[:nseeds]
    for flat in order:
        k, i, j = np.unravel_index(int(flat), perr.shape)
        seeds.append((int(k), int(i), int(j)))
    return list(dict.fromkeys(seeds))


def _refine(problem: OptimizationProblem, k: int, theta0: float, beta0: float,
            theta_step: float, beta_step: float):
    """Coordinate-wise golden-section descent from one grid seed.

    Never regresses: each coordinate update is accepted only if it improves
    on the best value evaluated so far (the adaptively re-evaluated seed is
    iteration 0 of the audit trace).
    """

    def evaluate(theta: float, beta: float) -> float:
        cfg = ReceiverConfig(beta=beta, threshold_k=k, pnr_ceiling=problem.pnr_ceiling)
        return generalized_kennedy_detail(
            parametrize(theta, problem.nbar), cfg, problem.noise, problem.quad_tolerance
        )[0]

    theta, beta = theta0, beta0
    best = evaluate(theta, beta)
    trace = [(0, best)]
    for iteration in range(1, MAX_REFINE_ROUNDS + 1):
        moved = 0.0

        t_new, f_t = golden_minimize(
            lambda t: evaluate(t, beta),
            theta - theta_step, theta + theta_step, xtol=problem.refine_tolerance,
        )
        if f_t < best:
            moved = max(moved, abs(t_new - theta))
            theta, best = t_new, f_t

        b_new, f_b = golden_minimize(
            lambda v: evaluate(theta, v),
            beta - beta_step, beta + beta_step, xtol=problem.refine_tolerance,
        )
        if f_b < best:
            moved = max(moved, abs(b_new - beta))
            beta, best = b_new, f_b

        trace.append((iteration, best))
        if moved < problem.refine_tolerance:
            break
    return theta, beta, best, trace


def optimize(problem: OptimizationProblem) -> OptimizationResult:
    """Full deterministic search: exhaustive threshold scan, dense grid
    seeding, then golden-section refinement of the best seeds."""
    thetas, betas, grid_perr = _grid_scan(problem)
    theta_step = thetas[1] - thetas[0]
    beta_step = betas[1] - betas[0]
    seeds = _select_seeds(grid_perr, problem.refine_seeds)

    candidates = []
    for k, i, j in seeds:
        theta, beta, perr, trace = _refine(
            problem, k, float(thetas[i]), float(betas[j]), theta_step, beta_step
        )
        candidates.append((perr, k, theta, beta, trace))

    best_perr = min(c[0] for c in candidates)
    eligible = [c for c in candidates if c[0] <= best_perr + TIE_WINDOW]
    eligible.sort(key=lambda c: (c[1], abs(c[3]), c[2], c[3]))
    perr_seed, k, theta, beta, trace = eligible[0]

    constellation = parametrize(theta, problem.nbar)
    config = ReceiverConfig(beta=beta, threshold_k=k, pnr_ceiling=problem.pnr_ceiling)
    perr, orientation = generalized_kennedy_detail(
        constellation, config, problem.noise, problem.quad_tolerance
    )
    return OptimizationResult(
        constellation=constellation,
        config=config,
        perr=perr,
        perr_sql=perr_sql_baseline(problem.nbar, problem.noise, problem.quad_tolerance),
        perr_helstrom=perr_helstrom(constellation, problem.noise),
        orientation=orientation,
        trace=tuple(trace),
    )


def _sweep_cell(args) -> SweepCell:
    sigma, pnr, nbar, knobs = args
    try:
        problem = OptimizationProblem(nbar=nbar, noise=PhaseNoise(sigma), pnr_ceiling=pnr, **knobs)
        return SweepCell(sigma=sigma, pnr_ceiling=pnr, result=optimize(problem), error=None)
    except Exception:
        return SweepCell(sigma=sigma, pnr_ceiling=pnr, result=None,
                         error=traceback.format_exc(limit=3))


def sweep_sigma(
    nbar: float,
    sigmas: list[float],
    pnr_list: list[int],
    jobs: int = 1,
    **knobs,
) -> list[SweepCell]:
    """One optimization per (PNR ceiling, sigma) pair, in that row order.

    A failing cell is recorded with its error instead of aborting the sweep.
    ``jobs > 1`` dispatches cells to a process pool; the output order is the
    grid order either way, so parallel and serial runs agree bit for bit.
    """
    if not sigmas or not pnr_list:
        raise ValueError("sigmas and pnr_list must be non-empty")
    cells = [(float(sigma), int(pnr), float(nbar), knobs)
             for pnr in pnr_list for sigma in sigmas]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_cell, cells))
    return [_sweep_cell(c) for c in cells]
