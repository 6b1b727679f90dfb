"""Exact coverage probability and expected length curves.

For a fixed design the interval produced at each observable estimator
value does not depend on the true vartheta, so a sweep first tabulates
the interval for every support atom (and, for the randomized method,
for every node of a fixed midpoint rule on the auxiliary y) and then
accumulates indicator-weighted atom masses along the vartheta grid:

    coverage(vartheta) = sum over u of pmf(u; vartheta) * 1{lower(u) < vartheta < upper(u)}

with the expected length weighted by (upper - lower) inside the same
indicator.  Membership is strict on both sides.  Atoms above one half
are filled in by the success/failure reflection of their mirror atom,
which pairs y with 1 - y; the midpoint y-rule is closed under that
pairing, so no extra solves are needed.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import ci as ci_mod
from . import mixture
from .ci import DEFAULT_SOLVER, IntervalRequest, SolverConfig
from .mixture import DEFAULT_QUAD, Model, QuadratureConfig, support_grid

__all__ = [
    "CoveragePoint",
    "SweepConfig",
    "build_interval_table",
    "coverage_at",
    "sweep",
    "write_csv",
]


@dataclass(frozen=True)
class CoveragePoint:
    vartheta: float
    coverage: float
    expected_length: float


@dataclass(frozen=True)
class SweepConfig:
    """Sweep resolution: interior vartheta grid and y averaging nodes."""

    grid_points: int = 99
    y_nodes: int = 64
    method: str = "standard"
    gamma: float = 0.95

    def __post_init__(self) -> None:
        if self.grid_points < 1 or self.y_nodes < 1:
            raise ValueError("grid_points and y_nodes must be at least 1")
        if self.method not in ("standard", "shortest", "randomized"):
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.5 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0.5, 1)")


def _midpoint_nodes(m: int) -> np.ndarray:
    return (np.arange(m) + 0.5) / m


def _atom_request(model: Model, k1: int, k2: int, gamma: float, method: str,
                  y: float | None) -> IntervalRequest:
    uk1, uk2 = (k2, k1) if model.swapped else (k1, k2)
    return IntervalRequest(model, uk1, uk2, gamma, method, y)


def _solve_atom(model: Model, pair: tuple[int, int], gamma: float, method: str,
                y: float | None, solver: SolverConfig,
                quad: QuadratureConfig) -> tuple[float, float]:
    req = _atom_request(model, pair[0], pair[1], gamma, method, y)
    if method == "standard":
        iv = ci_mod.standard_ci(req, solver, quad)
    elif method == "shortest":
        iv = ci_mod.shortest_ci(req, solver, quad)
    else:
        iv = ci_mod.shortest_randomized_ci(req, solver, quad)
    return iv.lower, iv.upper


def build_interval_table(model: Model, method: str, gamma: float,
                         y_nodes: int = 64,
                         solver: SolverConfig = DEFAULT_SOLVER,
                         quad: QuadratureConfig = DEFAULT_QUAD) -> np.ndarray:
    """Intervals for every support atom, shape (n_y, n_atoms, 2).

    n_y is 1 for the non-randomized methods.  Entry [j, i] holds
    (lower, upper) for atom i under y node j.
    """
    grid = support_grid(model)
    values = grid.values
    n = len(values)
    # The support is symmetric under complementation; dedup keeps the
    # pairing exact well within the merge tolerance.
    assert all(abs(values[i] + values[n - 1 - i] - 1.0) < 2e-9 for i in range(n))
    ys = [None] if method != "randomized" else list(_midpoint_nodes(y_nodes))
    out = np.empty((len(ys), n, 2))
    half = [i for i in range(n) if values[i] <= 0.5 + mixture.GRID_TOL]
    for i in half:
        mirror = n - 1 - i
        pair = grid.preimages[i][0]
        prev = None
        for j, y in enumerate(ys):
            if method == "randomized":
                # Adjacent y nodes move the endpoint roots only a little,
                # so each node's solver reuses the previous node's roots
                # as loose brackets.
                req = _atom_request(model, pair[0], pair[1], gamma, method, y)
                engine = ci_mod._RandomizedSolver(req.model, req.u, y, gamma,
                                                  solver, quad)
                if prev is not None:
                    engine.seed_from(prev)
                iv = engine.minimize("randomized")
                prev = engine
                lo, up = iv.lower, iv.upper
            else:
                lo, up = _solve_atom(model, pair, gamma, method, y, solver,
                                     quad)
            out[j, i] = (lo, up)
            if mirror != i:
                out[len(ys) - 1 - j, mirror] = (1.0 - up, 1.0 - lo)
    return out


def coverage_at(model: Model, vartheta: float, method: str,
                gamma: float = 0.95, *, y_nodes: int = 64,
                table: np.ndarray | None = None,
                solver: SolverConfig = DEFAULT_SOLVER,
                quad: QuadratureConfig = DEFAULT_QUAD) -> CoveragePoint:
    """Exact coverage and expected length at one vartheta."""
    if not 0.0 < vartheta < 1.0:
        raise ValueError("coverage is defined for vartheta in (0, 1)")
    if table is None:
        table = build_interval_table(model, method, gamma, y_nodes, solver, quad)
    masses = mixture.pmf_all(model, vartheta, quad)
    lower = table[:, :, 0]
    upper = table[:, :, 1]
    inside = (lower < vartheta) & (vartheta < upper)
    cov = float(np.mean((masses[None, :] * inside).sum(axis=1)))
    elen = float(np.mean((masses[None, :] * (upper - lower) * inside).sum(axis=1)))
    return CoveragePoint(vartheta, cov, elen)


def _sweep_chunk(model: Model, thetas: list[float], method: str, gamma: float,
                 table: np.ndarray, quad: QuadratureConfig) -> list[CoveragePoint]:
    return [
        coverage_at(model, th, method, gamma, table=table, quad=quad)
        for th in thetas
    ]


def sweep(model: Model, cfg: SweepConfig,
          solver: SolverConfig = DEFAULT_SOLVER,
          quad: QuadratureConfig = DEFAULT_QUAD,
          processes: int = 1) -> list[CoveragePoint]:
    """Coverage curve over the interior grid i/(grid_points + 1).

    Grid points are independent; processes > 1 spreads them over worker
    processes after the interval table is built once up front.
    """
    table = build_interval_table(model, cfg.method, cfg.gamma, cfg.y_nodes,
                                 solver, quad)
    thetas = [i / (cfg.grid_points + 1) for i in range(1, cfg.grid_points + 1)]
    if processes > 1:
        chunks = [thetas[i::processes] for i in range(processes)]
        with ProcessPoolExecutor(max_workers=processes) as pool:
            futs = [
                pool.submit(_sweep_chunk, model, chunk, cfg.method, cfg.gamma,
                            table, quad)
                for chunk in chunks if chunk
            ]
            points = [p for f in futs for p in f.result()]
        points.sort(key=lambda p: p.vartheta)
        return points
    out: list[CoveragePoint] = []
    for th in thetas:
        try:
            out.append(coverage_at(model, th, cfg.method, cfg.gamma,
                                   table=table, quad=quad))
        except Exception as exc:
            raise RuntimeError(f"sweep failed at vartheta={th!r}: {exc}") from exc
    return out


def write_csv(points: list[CoveragePoint], fh) -> None:
    """Emit the curve as CSV with 9 significant digits per value."""
    fh.write("vartheta,coverage,expected_length\n")
    for p in points:
        fh.write(f"{p.vartheta:.9g},{p.coverage:.9g},{p.expected_length:.9g}\n")
