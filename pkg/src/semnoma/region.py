"""Semantic-versus-bit rate regions: grid sweeps, Pareto frontiers, containment.

Containment is judged against the time-sharing closure of a frontier: any
point on the segment between two adjacent frontier points is achievable, and
so is anything it dominates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from semnoma.access import DownlinkScenario, RatePair, SchemeKind, semi_noma_rates
from semnoma.errors import ConfigError


@dataclass(frozen=True)
class RegionSweepConfig:
    band_grid: int = 101
    power_grid: int = 101
    max_points: int = 10_000_000

    def __post_init__(self):
        if self.band_grid < 2 or self.power_grid < 2:
            raise ConfigError("band_grid and power_grid must be >= 2")
        if self.band_grid * self.power_grid ** 2 > self.max_points:
            raise ConfigError(
                f"sweep of {self.band_grid}x{self.power_grid}^2 points exceeds ceiling {self.max_points}")


@dataclass(frozen=True)
class ParetoFrontier:
    """Non-dominated rate pairs sorted by ascending semantic rate."""

    points: tuple[RatePair, ...]
    scheme: SchemeKind | None = None

    def __post_init__(self):
        pts = tuple(RatePair(float(s), float(b)) for s, b in self.points)
        if not pts:
            raise ValueError("a frontier needs at least one point")
        for p, q in zip(pts, pts[1:]):
            if not (q.semantic > p.semantic and q.bit < p.bit):
                raise ValueError("frontier must be strictly increasing in semantic and decreasing in bit")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float).reshape(-1, 2)

    @property
    def max_semantic(self) -> float:
        return self.points[-1].semantic

    @property
    def max_bit(self) -> float:
        return self.points[0].bit

    def bit_at(self, semantic):
        """Largest bit rate achievable together with ``semantic`` (time sharing)."""
        arr = self.as_array()
        s = np.asarray(semantic, dtype=float)
        out = np.interp(s, arr[:, 0], arr[:, 1])
        return np.where(s > arr[-1, 0], -np.inf, out)

    def semantic_at(self, bit):
        """Largest semantic rate achievable together with ``bit`` (time sharing)."""
        arr = self.as_array()[::-1]
        b = np.asarray(bit, dtype=float)
        out = np.interp(b, arr[:, 1], arr[:, 0])
        return np.where(b > arr[-1, 1], -np.inf, out)


def _grid_allocations(scheme: SchemeKind, config: RegionSweepConfig, total_power: float):
    """Grid of (alpha, p_s, p_bn, p_bo) arrays in deterministic index order.

    Power that would land on a zero-width sub-band is left unused.
    """
    f = np.linspace(0.0, 1.0, config.band_grid)
    u = np.linspace(0.0, 1.0, config.power_grid)
    P = total_power
    scheme = SchemeKind(scheme)
    if scheme is SchemeKind.NOMA:
        alpha = np.ones_like(u)
        return alpha, u * P, (1.0 - u) * P, np.zeros_like(u)
    if scheme is SchemeKind.OMA:
        alpha, uu = (x.ravel() for x in np.meshgrid(f, u, indexing="ij"))
        p_s = uu * P
        p_bo = (1.0 - uu) * P
        p_bn = np.zeros_like(p_s)
    else:
        alpha, uu, vv = (x.ravel() for x in np.meshgrid(f, u, u, indexing="ij"))
        p_s = uu * P
        p_bn = vv * (1.0 - uu) * P
        p_bo = (1.0 - vv) * (1.0 - uu) * P
    p_s = np.where(alpha > 0, p_s, 0.0)
    p_bn = np.where(alpha > 0, p_bn, 0.0)
    p_bo = np.where(alpha < 1, p_bo, 0.0)
    return alpha, p_s, p_bn, p_bo


def sweep_allocations(scheme: SchemeKind, config: RegionSweepConfig, total_power: float):
    """Public view of the sweep grid, mainly for inspection and tests."""
    return _grid_allocations(scheme, config, total_power)


def sweep_region(scenario: DownlinkScenario, scheme: SchemeKind,
                 config: RegionSweepConfig = RegionSweepConfig()) -> np.ndarray:
    """Evaluate every grid allocation of ``scheme``.

    Returns an ``(n, 2)`` array of (semantic, bit) rate pairs in grid order.
    OMA and NOMA points are computed through the semi-NOMA evaluator with the
    corresponding sub-stream switched off.
    """
    alpha, p_s, p_bn, p_bo = _grid_allocations(scheme, config, scenario.total_power)
    sem, bits = semi_noma_rates(scenario, alpha, p_s, p_bn, p_bo)
    return np.column_stack([sem, bits])


def _as_points(points) -> np.ndarray:
    arr = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one rate pair")
    arr = arr.reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise ValueError("rate pairs must be finite")
    return arr


def pareto_mask(points) -> np.ndarray:
    """Boolean mask of the non-dominated, deduplicated points (first copy kept)."""
    arr = _as_points(points)
    s, b = arr[:, 0], arr[:, 1]
    order = np.lexsort((np.arange(len(s)), -b, -s))
    b_sorted = b[order]
    prev_best = np.concatenate(([-np.inf], np.maximum.accumulate(b_sorted)[:-1]))
    mask = np.zeros(len(s), dtype=bool)
    mask[order[b_sorted > prev_best]] = True
    return mask


def pareto_frontier(points, scheme: SchemeKind | None = None) -> ParetoFrontier:
    """Extract the Pareto frontier (maximise both rates) in O(n log n)."""
    arr = _as_points(points)
    front = arr[pareto_mask(arr)]
    front = front[np.argsort(front[:, 0], kind="stable")]
    return ParetoFrontier(tuple(RatePair(float(s), float(b)) for s, b in front), scheme)


def region_dominates(outer: ParetoFrontier, inner: ParetoFrontier | Iterable[RatePair],
                     tolerance: Sequence[float] = (0.0, 0.0)) -> bool:
    """True iff every inner point lies in the time-sharing closure of ``outer``,
    allowing an additive slack of ``tolerance = (semantic, bit)``."""
    tol_s, tol_b = tolerance
    q = inner.as_array() if isinstance(inner, ParetoFrontier) else _as_points(inner)
    reach = outer.bit_at(q[:, 0] - tol_s)
    return bool(np.all(reach >= q[:, 1] - tol_b))


def frontier_gaps(outer: ParetoFrontier, point: RatePair) -> tuple[float, float]:
    """How far ``point`` sticks out of the closure of ``outer``.

    Returns (semantic gap at the point's bit rate, bit gap at the point's
    semantic rate). Both positive means the point lies strictly outside.
    """
    s, b = point
    return float(s - outer.semantic_at(b)), float(b - outer.bit_at(s))


def grid_step(frontiers: Iterable[ParetoFrontier], power_grid: int) -> tuple[float, float]:
    """One grid cell in rate units: the largest rate of each axis over ``power_grid - 1``."""
    fs = list(frontiers)
    s_max = max(f.max_semantic for f in fs)
    b_max = max(f.max_bit for f in fs)
    return s_max / (power_grid - 1), b_max / (power_grid - 1)
