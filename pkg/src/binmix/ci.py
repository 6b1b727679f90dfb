"""Confidence interval construction for the weighted two-sample design.

Endpoints invert the one-parameter family of estimator distributions:
the upper endpoint solves P{estimator <= u} = gamma1 and the lower
endpoint solves P{estimator < u} = gamma + gamma1, both well posed
because each probability is strictly decreasing in vartheta.  The
standard interval fixes gamma1 = (1 - gamma)/2; the shortest interval
minimizes the length over gamma1 in [0, 1 - gamma] by golden-section
search; the randomized variants blend the atom at the observed value
(and its grid neighbour) with an auxiliary uniform draw y, which removes
the conservatism caused by the discreteness of the estimator.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from . import mixture
from .mixture import (
    DEFAULT_QUAD,
    GRID_TOL,
    Model,
    QuadratureConfig,
    neighbors,
    support_grid,
)

TWO_SIDED = "two_sided"
LOWER_ONLY = "lower_only"
UPPER_ONLY = "upper_only"
ONE_SIDED = "one_sided"

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

__all__ = [
    "SolverConfig",
    "IntervalRequest",
    "Interval",
    "RootBracketFailure",
    "endpoint_upper",
    "endpoint_lower",
    "standard_ci",
    "shortest_ci",
    "shortest_randomized_ci",
    "classify_sidedness",
    "reflect",
    "resolve_y",
    "TWO_SIDED",
    "LOWER_ONLY",
    "UPPER_ONLY",
    "ONE_SIDED",
]


class RootBracketFailure(RuntimeError):
    """Raised when an endpoint equation has no root inside the bracket."""


@dataclass(frozen=True)
class SolverConfig:
    """Root-finding and golden-section tolerances."""

    root_tol: float = 1e-12
    golden_tol: float = 1e-10
    bracket_eps: float = 1e-13

    def __post_init__(self) -> None:
        if min(self.root_tol, self.golden_tol, self.bracket_eps) <= 0:
            raise ValueError("solver tolerances must be positive")


DEFAULT_SOLVER = SolverConfig()


@dataclass(frozen=True)
class IntervalRequest:
    """Observed counts plus the requested construction.

    k1 and k2 are counts in the caller's labeling of the samples; they
    are mapped internally when the model stores the samples swapped.
    y is the auxiliary uniform draw for the randomized method; when it
    is absent a seed must be supplied so the draw is reproducible.
    """

    model: Model
    k1: int
    k2: int
    gamma: float = 0.95
    method: str = "standard"
    y: float | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        n1, n2 = self.user_n
        if not 0 <= self.k1 <= n1:
            raise ValueError(f"k1 must lie in [0, {n1}]")
        if not 0 <= self.k2 <= n2:
            raise ValueError(f"k2 must lie in [0, {n2}]")
        if not 0.5 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0.5, 1)")
        if self.method not in ("standard", "shortest", "randomized"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.y is not None and not 0.0 <= self.y <= 1.0:
            raise ValueError("y must lie in [0, 1]")

    @property
    def user_n(self) -> tuple[int, int]:
        m = self.model
        return (m.n2, m.n1) if m.swapped else (m.n1, m.n2)

    @property
    def u(self) -> float:
        """Observed estimator value, identical in either labeling."""
        ki1, ki2 = self.model.map_counts(self.k1, self.k2)
        m = self.model
        return m.w1 * ki1 / m.n1 + m.w2 * ki2 / m.n2


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float
    gamma1: float
    length: float
    sided: str
    method: str


def _make_interval(lower: float, upper: float, gamma1: float, method: str) -> Interval:
    if not 0.0 <= lower < upper <= 1.0:
        raise ValueError(f"degenerate interval ({lower}, {upper})")
    if lower == 0.0:
        sided = UPPER_ONLY
    elif upper == 1.0:
        sided = LOWER_ONLY
    else:
        sided = TWO_SIDED
    return Interval(lower, upper, gamma1, upper - lower, sided, method)


# --------------------------------------------------------------------------
# Root solving on the decreasing distribution family.


class _WarmBrackets:
    """Remember previously solved roots of a family monotone in its key.

    Roots here always decrease as the key grows, so the roots at the
    nearest smaller and larger keys bracket a new root.
    """

    def __init__(self, pad: float):
        self.keys: list[float] = []
        self.roots: list[float] = []
        self.pad = pad
        self.stale_keys: list[float] = []
        self.stale_roots: list[float] = []
        self.stale_pad = 0.0

    @staticmethod
    def _lookup(keys: list[float], roots: list[float], key: float,
                pad: float) -> tuple[float, float, bool] | None:
        if not keys:
            return None
        i = bisect.bisect_left(keys, key)
        hi = roots[i - 1] + pad if i > 0 else None
        lo = roots[i] - pad if i < len(keys) else None
        if lo is not None and hi is not None:
            return (lo, hi, True)
        anchor = hi if lo is None else lo
        return (anchor - 64 * pad, anchor + 64 * pad, False)

    def bracket(self, key: float) -> tuple[float, float] | None:
        live = self._lookup(self.keys, self.roots, key, self.pad)
        if live is not None and live[2]:
            return live[:2]
        # Stale points come from a nearby problem (seed_from), so their
        # wider pad usually still brackets the root; a miss only costs
        # the sign check in the root finder.
        stale = self._lookup(self.stale_keys, self.stale_roots, key,
                             self.stale_pad)
        pick = stale if stale is not None else live
        return None if pick is None else pick[:2]

    def add(self, key: float, root: float) -> None:
        i = bisect.bisect_left(self.keys, key)
        self.keys.insert(i, key)
        self.roots.insert(i, root)

    def seed_from(self, other: "_WarmBrackets", pad: float) -> None:
        """Adopt another cache's solved points as approximate anchors."""
        self.stale_keys = list(other.keys)
        self.stale_roots = list(other.roots)
        self.stale_pad = pad


_LEFT_LOW = "left_low"    # f < 0 already at the left bracket end
_RIGHT_HIGH = "right_high"  # f > 0 still at the right bracket end


def _root_decreasing(f, lo: float, hi: float, xtol: float,
                     warm: tuple[float, float] | None = None):
    """Root of a strictly decreasing f on [lo, hi].

    Returns the root, or one of the sentinel strings when f has constant
    sign over the bracket (callers translate those into collapses or
    RootBracketFailure per their contracts).
    """
    if warm is not None:
        wl = max(lo, min(warm[0], warm[1]))
        wh = min(hi, max(warm[0], warm[1]))
        if wl < wh and f(wl) >= 0.0 >= f(wh):
            return brentq(f, wl, wh, xtol=xtol)
    # Equality at a bracket edge counts as constant sign: the root sits
    # at the numerical stand-in for the boundary itself (e.g. the strict
    # cdf saturating to 1 at eps when gamma2 = 1), and callers map that
    # to the boundary collapse.
    if f(lo) <= 0.0:
        return _LEFT_LOW
    if f(hi) >= 0.0:
        return _RIGHT_HIGH
    return brentq(f, lo, hi, xtol=xtol)


def endpoint_upper(model: Model, u: float, gamma1: float,
                   solver: SolverConfig = DEFAULT_SOLVER,
                   quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Largest vartheta the data still exclude from above.

    Solves P{estimator <= u} = gamma1; equals 1 when u is the top of the
    support.
    """
    if u >= 1.0 - GRID_TOL:
        return 1.0
    eps = solver.bracket_eps
    out = _root_decreasing(lambda th: mixture.cdf(model, u, th, quad) - gamma1,
                           eps, 1.0 - eps, solver.root_tol)
    if out == _LEFT_LOW:
        raise RootBracketFailure(f"cdf({u}, {eps}) already below gamma1={gamma1}")
    if out == _RIGHT_HIGH:
        raise RootBracketFailure(f"cdf({u}, {1 - eps}) still above gamma1={gamma1}")
    return float(out)


def endpoint_lower(model: Model, u: float, gamma2: float,
                   solver: SolverConfig = DEFAULT_SOLVER,
                   quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Smallest vartheta the data still exclude from below.

    Solves P{estimator < u} = gamma2.  Returns 0 at the bottom of the
    support, and also when gamma2 is unattainable by the strict cdf
    anywhere in (0, 1) (the one-sided collapse).
    """
    if u <= GRID_TOL:
        return 0.0
    eps = solver.bracket_eps
    out = _root_decreasing(lambda th: mixture.cdf_strict(model, u, th, quad) - gamma2,
                           eps, 1.0 - eps, solver.root_tol)
    if out == _LEFT_LOW:
        return 0.0
    if out == _RIGHT_HIGH:
        raise RootBracketFailure(f"strict cdf({u}, {1 - eps}) still above gamma2={gamma2}")
    return float(out)


# --------------------------------------------------------------------------
# Interval constructions.


def resolve_y(req: IntervalRequest) -> float:
    """The auxiliary draw for a randomized request, reproducibly."""
    if req.y is not None:
        return req.y
    if req.seed is None:
        raise ValueError("randomized construction needs y or a seed to draw it")
    return float(np.random.default_rng(req.seed).random())


def reflect(req: IntervalRequest, gamma1: float) -> tuple[IntervalRequest, float]:
    """Success/failure relabeling used for observed values above one half.

    Maps counts to their complements, gamma1 to (1 - gamma) - gamma1 and
    y to 1 - y; applying it twice recovers the original request up to
    floating-point roundoff in y and gamma1.
    """
    n1, n2 = req.user_n
    y = None if req.y is None else 1.0 - req.y
    return (
        replace(req, k1=n1 - req.k1, k2=n2 - req.k2, y=y),
        (1.0 - req.gamma) - gamma1,
    )


def classify_sidedness(model: Model, u: float) -> str:
    """Whether the shortest interval at u is one-sided.

    One-sided exactly when u (or its reflection 1 - u) does not exceed
    max(w1/n1, w2/n2).
    """
    support_grid(model).locate(u)
    if u > 0.5 + GRID_TOL:
        return classify_sidedness(model, 1.0 - u)
    threshold = max(model.w1 / model.n1, model.w2 / model.n2)
    return ONE_SIDED if u <= threshold + 1e-12 else TWO_SIDED


def standard_ci(req: IntervalRequest,
                solver: SolverConfig = DEFAULT_SOLVER,
                quad: QuadratureConfig = DEFAULT_QUAD) -> Interval:
    """Equal tail split: gamma1 = (1 - gamma)/2."""
    gamma1 = (1.0 - req.gamma) / 2.0
    u = req.u
    upper = endpoint_upper(req.model, u, gamma1, solver, quad)
    lower = endpoint_lower(req.model, u, req.gamma + gamma1, solver, quad)
    return _make_interval(lower, upper, gamma1, "standard")


def _golden_min(fn, a: float, b: float, tol: float) -> float:
    """Golden-section minimizer on [a, b]; ties resolve toward smaller x."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


class _EndpointSolver:
    """Shared machinery for golden-section length minimization.

    Subclasses provide the two endpoint equations; this class adds warm
    bracketing across gamma1 evaluations (both endpoints move down as
    gamma1 grows) and the boundary collapse bookkeeping.
    """

    def __init__(self, model: Model, gamma: float,
                 solver: SolverConfig, quad: QuadratureConfig):
        self.model = model
        self.gamma = gamma
        self.solver = solver
        self.quad = quad
        pad = max(1e-9, 8.0 * solver.root_tol)
        self.upper_cache = _WarmBrackets(pad)
        self.lower_cache = _WarmBrackets(pad)

    def seed_from(self, other: "_EndpointSolver", pad: float = 2e-3) -> None:
        """Reuse a neighboring problem's solved roots as loose anchors.

        Useful when sweeping a family of nearby problems (e.g. adjacent
        randomization nodes) whose endpoint roots move only slightly.
        """
        self.upper_cache.seed_from(other.upper_cache, pad)
        self.lower_cache.seed_from(other.lower_cache, pad)

    def upper_fn(self, gamma1: float):
        raise NotImplementedError

    def lower_fn(self, gamma2: float):
        raise NotImplementedError

    def upper_fixed(self) -> float | None:
        """Non-None when the upper endpoint is pinned (top of support)."""
        return None

    def lower_fixed(self) -> float | None:
        return None

    def upper_at(self, gamma1: float) -> float:
        fixed = self.upper_fixed()
        if fixed is not None:
            return fixed
        eps = self.solver.bracket_eps
        f = self.upper_fn(gamma1)
        out = _root_decreasing(f, eps, 1.0 - eps, self.solver.root_tol,
                               self.upper_cache.bracket(gamma1))
        if out == _LEFT_LOW:
            raise RootBracketFailure(f"upper equation unattainable at gamma1={gamma1}")
        if out == _RIGHT_HIGH:
            return 1.0
        self.upper_cache.add(gamma1, float(out))
        return float(out)

    def lower_at(self, gamma2: float) -> float:
        fixed = self.lower_fixed()
        if fixed is not None:
            return fixed
        eps = self.solver.bracket_eps
        f = self.lower_fn(gamma2)
        out = _root_decreasing(f, eps, 1.0 - eps, self.solver.root_tol,
                               self.lower_cache.bracket(gamma2))
        if out == _LEFT_LOW:
            return 0.0
        if out == _RIGHT_HIGH:
            raise RootBracketFailure(f"lower equation unattainable at gamma2={gamma2}")
        self.lower_cache.add(gamma2, float(out))
        return float(out)

    def interval_at(self, gamma1: float) -> tuple[float, float]:
        return (self.lower_at(self.gamma + gamma1), self.upper_at(gamma1))

    def minimize(self, method: str) -> Interval:
        slack = 1.0 - self.gamma

        def length(gamma1: float) -> float:
            lo, up = self.interval_at(gamma1)
            return up - lo

        g_star = _golden_min(length, 0.0, slack, self.solver.golden_tol)
        if g_star <= self.solver.golden_tol:
            # All tail mass on the lower side; no finite upper-tail split.
            lower = self.lower_at(self.gamma)
            return _make_interval(lower, 1.0, 0.0, method)
        if slack - g_star <= self.solver.golden_tol:
            upper = self.upper_at(slack)
            return _make_interval(0.0, upper, slack, method)
        lo, up = self.interval_at(g_star)
        if lo == 0.0:
            # Collapsed even though the optimizer stayed interior.
            return _make_interval(0.0, up, g_star, method)
        return _make_interval(lo, up, g_star, method)


class _PlainSolver(_EndpointSolver):
    def __init__(self, model, u, gamma, solver, quad):
        super().__init__(model, gamma, solver, quad)
        self.u = u

    def upper_fixed(self):
        return 1.0 if self.u >= 1.0 - GRID_TOL else None

    def lower_fixed(self):
        return 0.0 if self.u <= GRID_TOL else None

    def upper_fn(self, gamma1):
        return lambda th: mixture.cdf(self.model, self.u, th, self.quad) - gamma1

    def lower_fn(self, gamma2):
        return lambda th: mixture.cdf_strict(self.model, self.u, th, self.quad) - gamma2


class _RandomizedSolver(_EndpointSolver):
    def __init__(self, model, u, y, gamma, solver, quad):
        super().__init__(model, gamma, solver, quad)
        self.u = u
        self.y = y
        self.u_minus, self.u_plus = neighbors(support_grid(model), u)

    def upper_fixed(self):
        return 1.0 if self.u >= 1.0 - GRID_TOL else None

    def lower_fixed(self):
        return 0.0 if self.u <= GRID_TOL else None

    def upper_fn(self, gamma1):
        return lambda th: mixture.randomized_cdf(
            self.model, self.u, self.u_plus, self.y, th, self.quad) - gamma1

    def lower_fn(self, gamma2):
        return lambda th: mixture.randomized_cdf(
            self.model, self.u_minus, self.u, self.y, th, self.quad) - gamma2


def shortest_ci(req: IntervalRequest,
                solver: SolverConfig = DEFAULT_SOLVER,
                quad: QuadratureConfig = DEFAULT_QUAD) -> Interval:
    """Minimize interval length over the tail split gamma1."""
    u = req.u
    if u > 0.5 + GRID_TOL:
        mirrored, _ = reflect(req, 0.0)
        inner = shortest_ci(mirrored, solver, quad)
        return _make_interval(1.0 - inner.upper, 1.0 - inner.lower,
                              (1.0 - req.gamma) - inner.gamma1, "shortest")
    engine = _PlainSolver(req.model, u, req.gamma, solver, quad)
    return engine.minimize("shortest")


def shortest_randomized_ci(req: IntervalRequest,
                           solver: SolverConfig = DEFAULT_SOLVER,
                           quad: QuadratureConfig = DEFAULT_QUAD) -> Interval:
    """Shortest interval for the atom-blended endpoint equations.

    The lower endpoint solves cdf(u-minus) + y*pmf(u) = gamma + gamma1
    and the upper endpoint solves cdf(u) + y*pmf(u-plus) = gamma1, with
    the observed-value cases u = 0 and u = 1 pinned to 0 and 1.
    """
    y = resolve_y(req)
    u = req.u
    if u > 0.5 + GRID_TOL:
        mirrored, _ = reflect(replace(req, y=y), 0.0)
        inner = shortest_randomized_ci(mirrored, solver, quad)
        return _make_interval(1.0 - inner.upper, 1.0 - inner.lower,
                              (1.0 - req.gamma) - inner.gamma1, "randomized")
    engine = _RandomizedSolver(req.model, u, y, req.gamma, solver, quad)
    return engine.minimize("randomized")
