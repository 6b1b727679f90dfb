"""Averaged model of a weighted sum of two binomial proportions.

The estimand is vartheta = w1*theta1 + w2*theta2 and the estimator is
the weighted sum of the two sample proportions.  Probability statements
about the estimator are averaged uniformly over all (theta1, theta2)
pairs consistent with a given vartheta, which turns the two-parameter
family into a one-parameter family indexed by vartheta alone:

    F_u(vartheta) = (1/L) * integral over theta1 in (a, b) of
        sum over i2 of P{xi1 <= (n1/w1)(u - w2*i2/n2)} * P{xi2 = i2}

with theta2 = (vartheta - w1*theta1)/w2, a = max(0, (vartheta - w2)/w1),
b = min(1, vartheta/w1) and L = b - a.

The integrand is a polynomial in theta1 of degree at most n1 + n2, so a
Gauss-Legendre rule with enough nodes integrates it exactly; the engine
below is an adaptive panel scheme that recognises this and otherwise
subdivides until the requested tolerances hold.
"""

from __future__ import annotations

import functools
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from .binom import INT_TOL, pmf_matrix

# Support values closer than this are considered the same attainable value.
GRID_TOL = 1e-9

# Sentinels standing in for the missing neighbour below 0 and above 1.
SENTINEL_BELOW = -1.0
SENTINEL_ABOVE = 2.0

__all__ = [
    "GRID_TOL",
    "SENTINEL_BELOW",
    "SENTINEL_ABOVE",
    "Model",
    "SupportGrid",
    "ThetaRange",
    "QuadratureConfig",
    "NotASupportPoint",
    "DegenerateRange",
    "QuadratureFailure",
    "support_grid",
    "neighbors",
    "theta1_range",
    "cdf",
    "cdf_strict",
    "pmf",
    "pmf_all",
    "randomized_cdf",
    "smoothed_cdf_up",
    "smoothed_cdf_down",
]


class NotASupportPoint(ValueError):
    """Raised when a value is not on the estimator's support grid."""


class DegenerateRange(ValueError):
    """Raised when the theta1 averaging range degenerates (vartheta 0 or 1)."""


class QuadratureFailure(RuntimeError):
    """Raised when adaptive integration cannot meet its tolerances."""


@dataclass(frozen=True)
class Model:
    """Fixed design: two sample sizes and the weight of the first sample.

    The internal orientation always satisfies w1 <= w2; a design handed
    in with w1 > w2 is stored with the two samples' roles swapped and
    ``swapped`` set, so callers can map observed counts accordingly.
    The estimand is symmetric under this relabeling.
    """

    n1: int
    n2: int
    w1: float
    swapped: bool = field(default=False, compare=True)

    def __post_init__(self) -> None:
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("sample sizes must be at least 1")
        if not 0.0 < self.w1 < 1.0:
            raise ValueError("w1 must lie strictly between 0 and 1")
        if self.w1 > 0.5:
            n1, n2 = self.n2, self.n1
            object.__setattr__(self, "n1", n1)
            object.__setattr__(self, "n2", n2)
            object.__setattr__(self, "w1", 1.0 - self.w1)
            object.__setattr__(self, "swapped", True)

    @property
    def w2(self) -> float:
        return 1.0 - self.w1

    def map_counts(self, k1: int, k2: int) -> tuple[int, int]:
        """Observed counts in the caller's labeling -> internal labeling."""
        return (k2, k1) if self.swapped else (k1, k2)


@dataclass(frozen=True)
class ThetaRange:
    """Averaging range (a, b) for theta1 at a fixed vartheta."""

    a: float
    b: float
    len: float


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the adaptive panel integrator.

    gl_order overrides the Gauss-Legendre node count per panel; left at
    None the engine picks the order that integrates the polynomial
    integrand exactly and verification panels are unnecessary.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200
    gl_order: int | None = None

    def __post_init__(self) -> None:
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_QUAD = QuadratureConfig()


class SupportGrid:
    """Sorted distinct attainable estimator values with their preimages."""

    def __init__(self, values: np.ndarray, preimages: tuple[tuple[tuple[int, int], ...], ...]):
        self.values = values
        self.values.setflags(write=False)
        self.preimages = preimages

    def __len__(self) -> int:
        return len(self.values)

    def locate(self, u: float) -> int:
        """Index of the grid value equal to u within GRID_TOL."""
        i = int(np.searchsorted(self.values, u))
        for j in (i - 1, i, i + 1):
            if 0 <= j < len(self.values) and abs(self.values[j] - u) <= GRID_TOL:
                return j
        raise NotASupportPoint(f"{u!r} is not an attainable estimator value")


@functools.lru_cache(maxsize=None)
def support_grid(model: Model) -> SupportGrid:
    """Enumerate w1*k1/n1 + w2*k2/n2 over all counts, sort, deduplicate."""
    n1, n2, w1, w2 = model.n1, model.n2, model.w1, model.w2
    pairs = [
        (w1 * k1 / n1 + w2 * k2 / n2, k1, k2)
        for k1 in range(n1 + 1)
        for k2 in range(n2 + 1)
    ]
    pairs.sort()
    values: list[float] = []
    preimages: list[list[tuple[int, int]]] = []
    for v, k1, k2 in pairs:
        if values and v - values[-1] <= GRID_TOL:
            preimages[-1].append((k1, k2))
        else:
            values.append(v)
            preimages.append([(k1, k2)])
    values[0] = 0.0
    values[-1] = 1.0
    return SupportGrid(
        np.array(values),
        tuple(tuple(sorted(group)) for group in preimages),
    )


def neighbors(grid: SupportGrid, u: float) -> tuple[float, float]:
    """Grid values immediately below and above u.

    The missing neighbour at the extremes is reported as the sentinel
    -1 (below 0) or 2 (above 1).
    """
    i = grid.locate(u)
    u_minus = float(grid.values[i - 1]) if i > 0 else SENTINEL_BELOW
    u_plus = float(grid.values[i + 1]) if i + 1 < len(grid) else SENTINEL_ABOVE
    return u_minus, u_plus


def theta1_range(model: Model, vartheta: float) -> ThetaRange:
    """Range of theta1 values compatible with the given vartheta."""
    if vartheta <= 0.0 or vartheta >= 1.0:
        raise DegenerateRange("the averaging range exists only for vartheta in (0, 1)")
    a = max(0.0, (vartheta - model.w2) / model.w1)
    b = min(1.0, vartheta / model.w1)
    return ThetaRange(a, b, b - a)


# --------------------------------------------------------------------------
# Integrand preparation.  A "query" is one quantity to accumulate during a
# shared pass over theta1 nodes; preparing it resolves thresholds and
# preimages once so panels only do array arithmetic.


@functools.lru_cache(maxsize=4096)
def _cdf_terms(model: Model, u: float, strict: bool):
    """Per-i2 inner-cdf cutoffs for P{estimator <=/< u}.

    Returns (full_i2, part_i2, part_m): i2 values whose inner factor is 1,
    and (i2, m) pairs contributing P{xi1 <= m} * P{xi2 = i2}.
    """
    n1, n2 = model.n1, model.n2
    i2 = np.arange(n2 + 1)
    t = (n1 / model.w1) * (u - model.w2 * i2 / n2)
    near = np.abs(t - np.round(t)) <= INT_TOL
    m = np.where(near, np.round(t), np.floor(t)).astype(np.int64)
    if strict:
        m = np.where(near, m - 1, m)
    full = i2[m >= n1]
    part = (m >= 0) & (m < n1)
    return full, i2[part], m[part]


@functools.lru_cache(maxsize=None)
def _atom_index_map(model: Model) -> np.ndarray:
    """(n1+1, n2+1) array mapping each count pair to its grid atom index."""
    grid = support_grid(model)
    out = np.empty((model.n1 + 1, model.n2 + 1), dtype=np.int64)
    for idx, group in enumerate(grid.preimages):
        for k1, k2 in group:
            out[k1, k2] = idx
    return out


class _Query:
    """One integrand component; width is the output vector length."""

    width = 1

    def evaluate(self, p1, c1, p2) -> np.ndarray:
        raise NotImplementedError


class _CdfQuery(_Query):
    def __init__(self, model: Model, u: float, strict: bool):
        self.full, self.part_i2, self.part_m = _cdf_terms(model, u, strict)

    def evaluate(self, p1, c1, p2):
        out = p2[:, self.full].sum(axis=1)
        if self.part_i2.size:
            out = out + (c1[:, self.part_m] * p2[:, self.part_i2]).sum(axis=1)
        return out[:, None]


class _PmfQuery(_Query):
    def __init__(self, model: Model, u: float):
        group = support_grid(model).preimages[support_grid(model).locate(u)]
        self.k1 = np.array([k1 for k1, _ in group])
        self.k2 = np.array([k2 for _, k2 in group])

    def evaluate(self, p1, c1, p2):
        return (p1[:, self.k1] * p2[:, self.k2]).sum(axis=1)[:, None]


class _PmfAllQuery(_Query):
    def __init__(self, model: Model):
        self.idx = _atom_index_map(model).reshape(-1)
        self.width = len(support_grid(model))

    def evaluate(self, p1, c1, p2):
        cells = p1[:, :, None] * p2[:, None, :]
        out = np.zeros((p1.shape[0], self.width))
        np.add.at(out, (slice(None), self.idx), cells.reshape(p1.shape[0], -1))
        return out


@functools.lru_cache(maxsize=64)
def _gl_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _exact_order(model: Model) -> int:
    # 2*m - 1 >= n1 + n2 makes the rule exact for the polynomial integrand.
    return (model.n1 + model.n2) // 2 + 2


def _panel(model: Model, vartheta: float, lo: float, hi: float,
           queries: list[_Query], order: int) -> np.ndarray:
    nodes, weights = _gl_rule(order)
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo) + half * nodes
    th2 = np.clip((vartheta - model.w1 * x) / model.w2, 0.0, 1.0)
    p1 = pmf_matrix(model.n1, x)
    c1 = np.cumsum(p1, axis=1)
    p2 = pmf_matrix(model.n2, th2)
    parts = [q.evaluate(p1, c1, p2) for q in queries]
    stacked = np.concatenate(parts, axis=1)
    return half * (weights @ stacked)


def _integrate(model: Model, vartheta: float, queries: list[_Query],
               cfg: QuadratureConfig) -> np.ndarray:
    """Average the queried quantities over the theta1 range at vartheta."""
    rng = theta1_range(model, vartheta)
    a, b, length = rng.a, rng.b, rng.len
    order = cfg.gl_order if cfg.gl_order is not None else _exact_order(model)
    whole = _panel(model, vartheta, a, b, queries, order)
    if order >= _exact_order(model):
        # Rule is exact for polynomials of the integrand's degree; no
        # verification panels needed.
        return np.clip(whole / length, 0.0, None)
    total = np.zeros_like(whole)
    stack = [(a, b, whole)]
    splits = 0
    while stack:
        lo, hi, est = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(model, vartheta, lo, mid, queries, order)
        right = _panel(model, vartheta, mid, hi, queries, order)
        better = left + right
        err = np.abs(better - est)
        budget = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(better))
        if np.all(err <= budget * max((hi - lo) / length, 1e-3)) or hi - lo <= 1e-14 * length:
            total += better
            continue
        splits += 1
        if splits > cfg.max_subdivisions:
            raise QuadratureFailure(
                f"no convergence after {cfg.max_subdivisions} subdivisions "
                f"at vartheta={vartheta!r} (max error {float(err.max()):.3e})"
            )
        stack.append((lo, mid, left))
        stack.append((mid, hi, right))
    return np.clip(total / length, 0.0, None)


# --------------------------------------------------------------------------
# Public distribution functions.


def _point_mass_cdf(u: float, at_one: bool, strict: bool) -> float:
    """Degenerate limits: all mass at 0 (vartheta=0) or at 1 (vartheta=1)."""
    atom = 1.0 if at_one else 0.0
    if strict:
        return 1.0 if u > atom + GRID_TOL else 0.0
    return 1.0 if u >= atom - GRID_TOL else 0.0


def cdf(model: Model, u: float, vartheta: float,
        cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """P{estimator <= u} at the given vartheta."""
    if u >= 1.0 - GRID_TOL:
        return 1.0
    if u < -GRID_TOL:
        return 0.0
    if vartheta <= 0.0 or vartheta >= 1.0:
        return _point_mass_cdf(u, vartheta >= 1.0, strict=False)
    out = _integrate(model, vartheta, [_CdfQuery(model, u, strict=False)], cfg)
    return float(min(out[0], 1.0))


def cdf_strict(model: Model, u: float, vartheta: float,
               cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """P{estimator < u} at the given vartheta."""
    if u <= GRID_TOL:
        return 0.0
    if u > 1.0 + GRID_TOL:
        return 1.0
    if vartheta <= 0.0 or vartheta >= 1.0:
        return _point_mass_cdf(u, vartheta >= 1.0, strict=True)
    out = _integrate(model, vartheta, [_CdfQuery(model, u, strict=True)], cfg)
    return float(min(out[0], 1.0))


def pmf(model: Model, u: float, vartheta: float,
        cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """P{estimator = u} for u on the support grid."""
    grid = support_grid(model)
    i = grid.locate(u)
    if vartheta <= 0.0:
        return 1.0 if i == 0 else 0.0
    if vartheta >= 1.0:
        return 1.0 if i == len(grid) - 1 else 0.0
    out = _integrate(model, vartheta, [_PmfQuery(model, u)], cfg)
    return float(min(out[0], 1.0))


def pmf_all(model: Model, vartheta: float,
            cfg: QuadratureConfig = DEFAULT_QUAD) -> np.ndarray:
    """Masses of every grid atom at once (single shared pass)."""
    grid = support_grid(model)
    if vartheta <= 0.0 or vartheta >= 1.0:
        out = np.zeros(len(grid))
        out[-1 if vartheta >= 1.0 else 0] = 1.0
        return out
    return np.minimum(_integrate(model, vartheta, [_PmfAllQuery(model)], cfg), 1.0)


def randomized_cdf(model: Model, x: float, v: float, y: float, vartheta: float,
                   cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """cdf(x, vartheta) + y * pmf(v, vartheta) in one integration pass.

    x = -1 (sentinel below the grid) contributes 0 to the cdf part and
    v = 2 (sentinel above) contributes 0 mass, so the same expression
    serves the endpoint equations at the edges of the grid.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError("the auxiliary draw y must lie in [0, 1]")
    use_cdf = x >= -GRID_TOL
    use_pmf = v <= 1.0 + GRID_TOL and y > 0.0
    if vartheta <= 0.0 or vartheta >= 1.0 or not (use_cdf and use_pmf):
        c = cdf(model, x, vartheta, cfg) if use_cdf else 0.0
        p = pmf(model, v, vartheta, cfg) if use_pmf else 0.0
        return c + y * p
    if x >= 1.0 - GRID_TOL:
        return 1.0 + y * pmf(model, v, vartheta, cfg)
    queries = [_CdfQuery(model, x, strict=False), _PmfQuery(model, v)]
    out = _integrate(model, vartheta, queries, cfg)
    return float(min(out[0], 1.0) + y * min(out[1], 1.0))


def _bracket(grid: SupportGrid, t: float) -> tuple[int, float]:
    """Index j with values[j] <= t < values[j+1] and fractional position."""
    values = grid.values
    if t < -GRID_TOL or t > 1.0 + GRID_TOL:
        raise ValueError("smoothing is defined on [0, 1]")
    j = bisect_left(values, t - GRID_TOL)
    if j < len(values) and abs(values[j] - t) <= GRID_TOL:
        return j, 0.0
    j -= 1
    frac = (t - values[j]) / (values[j + 1] - values[j])
    return j, float(frac)


def smoothed_cdf_down(model: Model, t: float, vartheta: float,
                      cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """CDF of the estimator smoothed by spreading each atom's mass
    downward over the gap below it.

    Piecewise linear, continuous, and equal to cdf at every grid value.
    """
    grid = support_grid(model)
    j, frac = _bracket(grid, t)
    if vartheta <= 0.0 or vartheta >= 1.0:
        base = _point_mass_cdf(grid.values[j], vartheta >= 1.0, strict=False)
        nxt = pmf(model, grid.values[j + 1], vartheta) if frac > 0.0 else 0.0
        return min(1.0, base + frac * nxt)
    queries: list[_Query] = [_CdfQuery(model, float(grid.values[j]), strict=False)]
    if frac > 0.0:
        queries.append(_PmfQuery(model, float(grid.values[j + 1])))
    out = _integrate(model, vartheta, queries, cfg)
    val = out[0] + (frac * out[1] if frac > 0.0 else 0.0)
    return float(min(val, 1.0))


def smoothed_cdf_up(model: Model, t: float, vartheta: float,
                    cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """CDF of the estimator smoothed by spreading each atom's mass
    upward over the gap above it.

    Piecewise linear and continuous; equals the strict cdf at every grid
    value (the atom sitting at t has been pushed above t), so it lies at
    or below the downward-smoothed variant everywhere.
    """
    grid = support_grid(model)
    j, frac = _bracket(grid, t)
    if vartheta <= 0.0 or vartheta >= 1.0:
        base = _point_mass_cdf(grid.values[j], vartheta >= 1.0, strict=True)
        atom = pmf(model, grid.values[j], vartheta) if frac > 0.0 else 0.0
        return min(1.0, base + frac * atom)
    queries: list[_Query] = [_CdfQuery(model, float(grid.values[j]), strict=True)]
    if frac > 0.0:
        queries.append(_PmfQuery(model, float(grid.values[j])))
    out = _integrate(model, vartheta, queries, cfg)
    val = out[0] + (frac * out[1] if frac > 0.0 else 0.0)
    return float(min(val, 1.0))
