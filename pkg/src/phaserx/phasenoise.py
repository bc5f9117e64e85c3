"""Gaussian phase averages.

A phase-noise channel multiplies a field amplitude by exp(i*phi) with
phi ~ Normal(0, sigma^2).  Detection probabilities then have to be averaged
over the phase,

    <f>_phi = (2*pi*sigma^2)^(-1/2) * Integral f(phi) exp(-phi^2/(2*sigma^2)) dphi,

taken over the whole real line (phases are deliberately not wrapped to
[-pi, pi]).  This module is the single numerical-integration engine used by
every error-probability computation in the package.

The quadrature family is Gauss-Hermite with the substitution
phi = sqrt(2)*sigma*t, so the Gaussian weight is absorbed exactly and
convergence is spectral for the entire integrands that occur here.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_hermite

BASE_ORDER = 32
MAX_ORDER = 512

_SQRT_PI = math.sqrt(math.pi)


@functools.lru_cache(maxsize=32)
def _hermite_base(order: int) -> tuple[np.ndarray, np.ndarray]:
    # Node computation is by far the most expensive part of a rule and is
    # sigma-independent, so base rules are cached read-only per order.
    # scipy's implementation stays finite at the order cap, where numpy's
    # hermgauss overflows.
    t, w = roots_hermite(order)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


class ConvergenceError(RuntimeError):
    """Adaptive phase average failed to converge before the order cap."""

    def __init__(self, message: str, coarse: float, fine: float):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


@dataclass(frozen=True)
class PhaseNoise:
    """Gaussian phase diffusion of standard deviation ``sigma`` (radians)."""

    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.sigma) or self.sigma < 0.0:
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")


@dataclass(frozen=True)
class QuadratureRule:
    """Discretization of the Gaussian phase average.

    ``sum(weights * f(nodes))`` approximates ``<f>_phi``.  The weights are
    normalized to sum to 1 (the rule integrates constants exactly) and the
    nodes come in symmetric pairs (phi, -phi), matching the even weight.
    """

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    order: int

    def average(self, values: np.ndarray) -> float:
        """Weighted sum of integrand samples taken at ``nodes``."""
        return float(np.dot(self.weights, values))


def build_rule(noise: PhaseNoise, order: int) -> QuadratureRule:
    """Build a Gauss-Hermite rule rescaled to the phase distribution.

    Parameters
    ----------
    noise : PhaseNoise
        Phase-diffusion strength; ``sigma = 0`` degenerates to the single
        node phi = 0 with weight 1.
    order : int
        Number of quadrature nodes, >= 1.

    Returns
    -------
    QuadratureRule
        Nodes ``sqrt(2)*sigma*t_i`` and weights ``w_i/sqrt(pi)`` where
        (t_i, w_i) is the physicists' Gauss-Hermite rule.
    """
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    if noise.sigma == 0.0:
        return QuadratureRule(nodes=np.zeros(1), weights=np.ones(1), order=1)
    t, w = _hermite_base(order)
    return QuadratureRule(
        nodes=math.sqrt(2.0) * noise.sigma * t,
        weights=w / _SQRT_PI,
        order=order,
    )


def average(noise: PhaseNoise, f, tolerance: float = 1e-10) -> float:
    """Evaluate ``<f>_phi`` to a requested tolerance.

    ``f`` must accept an ndarray of phases and return the integrand values
    elementwise.  The rule order is doubled from ``BASE_ORDER`` up to
    ``MAX_ORDER`` until two successive estimates agree to ``tolerance``
    (relative, or absolute once the value itself is below the tolerance);
    the finer estimate is returned.

    Raises
    ------
    ConvergenceError
        If the order cap is reached without agreement; carries the last two
        estimates.
    """
    if tolerance <= 0.0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")
    if noise.sigma == 0.0:
        return float(np.asarray(f(np.zeros(1)))[0])

    def estimate(order: int) -> float:
        rule = build_rule(noise, order)
        return rule.average(np.asarray(f(rule.nodes)))

    order = BASE_ORDER
    coarse = estimate(order)
    while order < MAX_ORDER:
        order *= 2
        fine = estimate(order)
        if _close(coarse, fine, tolerance):
            return fine
        coarse = fine
    # coarse now holds the MAX_ORDER estimate; recompute its predecessor for
    # the diagnostic message.
    previous = estimate(MAX_ORDER // 2)
    raise ConvergenceError(
        f"phase average did not converge by order {MAX_ORDER}: estimate "
        f"{previous!r} at order {MAX_ORDER // 2} vs {coarse!r} at order "
        f"{MAX_ORDER} exceeds tolerance {tolerance}",
        coarse=previous,
        fine=coarse,
    )


def _close(a: float, b: float, tol: float) -> bool:
    if abs(b) > tol:
        return abs(a - b) <= tol * abs(b)
    return abs(a - b) <= tol
