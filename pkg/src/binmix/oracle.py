"""Independent verification oracles for the test suite.

Nothing here is used by the production paths.  The Monte-Carlo check
simulates the averaged model directly; the brute-force coverage check
recomputes every atom mass with a plain composite Simpson rule and
naive per-term binomial arithmetic, deliberately sharing no code with
the adaptive integrator, so agreement between the two is meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import ci as ci_mod
from .ci import DEFAULT_SOLVER, IntervalRequest, SolverConfig
from .mixture import DEFAULT_QUAD, Model, QuadratureConfig, theta1_range

__all__ = ["McConfig", "DesignTooLarge", "mc_cdf", "brute_coverage"]


class DesignTooLarge(ValueError):
    """Raised when a design is too big for the brute-force path."""


@dataclass(frozen=True)
class McConfig:
    samples: int = 200000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("samples must be at least 1")


def mc_cdf(model: Model, u: float, vartheta: float,
           mc: McConfig) -> tuple[float, float]:
    """Monte-Carlo estimate of P{estimator <= u} with its standard error.

    Draws theta1 uniformly over the admissible range, pairs it with the
    theta2 enforced by vartheta, simulates both samples and counts how
    often the weighted estimate stays at or below u.
    """
    rng = np.random.default_rng(mc.seed)
    r = theta1_range(model, vartheta)
    th1 = r.a + r.len * rng.random(mc.samples)
    th2 = np.clip((vartheta - model.w1 * th1) / model.w2, 0.0, 1.0)
    x1 = rng.binomial(model.n1, th1)
    x2 = rng.binomial(model.n2, th2)
    est_vals = model.w1 * x1 / model.n1 + model.w2 * x2 / model.n2
    est = float(np.mean(est_vals <= u + 1e-12))
    std_err = math.sqrt(est * (1.0 - est) / mc.samples)
    return est, std_err


def _dbinom(k: int, n: int, p: float) -> float:
    if p <= 0.0:
        return 1.0 if k == 0 else 0.0
    if p >= 1.0:
        return 1.0 if k == n else 0.0
    return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)


def _simpson_mass(model: Model, k1: int, k2: int, vartheta: float,
                  panels: int) -> float:
    """Composite Simpson integral of the (k1, k2) cell's density."""
    r = theta1_range(model, vartheta)
    m = 2 * panels
    h = r.len / m
    total = 0.0
    for i in range(m + 1):
        th1 = r.a + i * h
        th2 = min(1.0, max(0.0, (vartheta - model.w1 * th1) / model.w2))
        f = _dbinom(k1, model.n1, th1) * _dbinom(k2, model.n2, th2)
        weight = 1 if i in (0, m) else (4 if i % 2 else 2)
        total += weight * f
    return total * h / 3.0 / r.len


def brute_coverage(model: Model, vartheta: float, method: str,
                   fine_quad: int = 1000, *, gamma: float = 0.95,
                   y: float | None = None,
                   solver: SolverConfig = DEFAULT_SOLVER,
                   quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Coverage probability summed from independently integrated masses.

    Restricted to tiny designs; intervals come from the production
    constructions, masses from the Simpson path above.
    """
    if (model.n1 + 1) * (model.n2 + 1) > 100:
        raise DesignTooLarge("brute-force coverage handles at most 100 count pairs")
    atoms: list[tuple[float, float]] = []  # (value, mass) merged at 1e-9
    for k1 in range(model.n1 + 1):
        for k2 in range(model.n2 + 1):
            v = model.w1 * k1 / model.n1 + model.w2 * k2 / model.n2
            mass = _simpson_mass(model, k1, k2, vartheta, fine_quad)
            for i, (v0, m0) in enumerate(atoms):
                if abs(v0 - v) <= 1e-9:
                    atoms[i] = (v0, m0 + mass)
                    break
            else:
                atoms.append((v, mass))
    covered = 0.0
    for v, mass in atoms:
        pair = None
        for k1 in range(model.n1 + 1):
            for k2 in range(model.n2 + 1):
                if abs(model.w1 * k1 / model.n1 + model.w2 * k2 / model.n2 - v) <= 1e-9:
                    pair = (k1, k2)
                    break
            if pair:
                break
        uk1, uk2 = (pair[1], pair[0]) if model.swapped else pair
        req = IntervalRequest(model, uk1, uk2, gamma, method, y)
        if method == "standard":
            iv = ci_mod.standard_ci(req, solver, quad)
        elif method == "shortest":
            iv = ci_mod.shortest_ci(req, solver, quad)
        else:
            iv = ci_mod.shortest_randomized_ci(req, solver, quad)
        if iv.lower < vartheta < iv.upper:
            covered += mass
    return covered
