"""Parameter sweeps, threshold-region detection and QFI maximization.

Grid points are independent and may be evaluated concurrently; results are
always reported in axis order, so serial and parallel runs are identical.
The concurrency cap comes from the COOPMETRO_THREADS environment variable
when not passed explicitly (default: serial).
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .qfi import QfiResult
from .scenarios import ScenarioSpec, qfi_at

__all__ = [
    "SweepGrid",
    "SweepPoint",
    "RegionResult",
    "sweep",
    "find_region",
    "maximize_qfi",
    "scenario_objective",
]

SWEEP_AXES = ("b_z", "b_x", "t")

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepGrid:
    """Inclusive linear grid over one axis."""

    axis: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"sweep axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if not self.start < self.stop:
            raise ValueError(f"grid requires start < stop, got [{self.start}, {self.stop}]")
        if self.points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.points}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepPoint:
    """One grid evaluation; `error` holds the diagnostic for failed points."""

    value: float
    result: QfiResult | None
    error: str | None = None


@dataclass(frozen=True)
class RegionResult:
    """Endpoints of the contiguous region where the objective exceeds the
    threshold; unresolved when no pre-scan point does."""

    lower: float
    upper: float
    threshold: float
    resolved: bool


def scenario_objective(spec: ScenarioSpec, t: float, axis: str = "b_z") -> Callable[[float], float]:
    """Scalar objective value |-> QFI for sweeps/optimization over one axis."""
    if axis == "t":
        return lambda v: qfi_at(spec, float(v)).value
    if axis not in ("b_z", "b_x"):
        raise ValueError(f"unknown axis {axis!r}")
    return lambda v: qfi_at(replace(spec, **{axis: float(v)}), t).value


def _max_workers(explicit: int | None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("COOPMETRO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"COOPMETRO_THREADS must be a positive integer, got {env!r}") from None
    return 1


def sweep(
    spec: ScenarioSpec,
    grid: SweepGrid,
    t: float | None = None,
    max_workers: int | None = None,
) -> list[SweepPoint]:
    """One QFI evaluation per grid point, ordered by axis value.

    Per-point failures (e.g. b_z = 0 inside a cooperative grid) are recorded
    as SweepPoints with a diagnostic instead of aborting the sweep.
    """
    if grid.axis != "t" and t is None:
        raise ValueError(f"sweeping over {grid.axis!r} requires the probe time t")

    def evaluate(v: float) -> QfiResult:
        if grid.axis == "t":
            return qfi_at(spec, v)
        return qfi_at(replace(spec, **{grid.axis: v}), t)

    def point(v) -> SweepPoint:
        v = float(v)
        try:
            return SweepPoint(value=v, result=evaluate(v))
        except Exception as exc:  # recorded, not raised: keep the sweep going
            return SweepPoint(value=v, result=None, error=f"{type(exc).__name__}: {exc}")

    values = grid.values()
    workers = _max_workers(max_workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, values))
    return [point(v) for v in values]


def _bisect_crossing(f, lo: float, hi: float, threshold: float, xtol: float) -> float:
    f_hi = f(hi) - threshold
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid) - threshold
        if (f_mid > 0.0) == (f_hi > 0.0):
            hi, f_hi = mid, f_mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def find_region(
    objective: Callable[[float], float],
    threshold: float,
    bracket: tuple[float, float],
    prescan: int = 101,
    xtol: float = 1e-4,
) -> RegionResult:
    """Locate the contiguous region around the objective's maximum where it
    meets the threshold.

    A prescan grid over the bracket finds the block of above-threshold
    points containing the maximum; each edge crossing is then bisected to
    |delta| <= xtol.  Returns resolved=False (NaN endpoints) when no prescan
    point reaches the threshold.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    lo, hi = bracket
    if not lo < hi:
        raise ValueError(f"invalid bracket [{lo}, {hi}]")
    xs = np.linspace(lo, hi, prescan)
    vals = np.array([objective(float(x)) for x in xs])
    above = vals >= threshold
    if not above.any():
        return RegionResult(lower=math.nan, upper=math.nan, threshold=threshold, resolved=False)
    peak = int(np.argmax(vals))
    i = peak
    while i > 0 and above[i - 1]:
        i -= 1
    j = peak
    while j < prescan - 1 and above[j + 1]:
        j += 1
    lower = float(xs[0]) if i == 0 else _bisect_crossing(objective, float(xs[i - 1]), float(xs[i]), threshold, xtol)
    upper = float(xs[-1]) if j == prescan - 1 else _bisect_crossing(objective, float(xs[j]), float(xs[j + 1]), threshold, xtol)
    return RegionResult(lower=lower, upper=upper, threshold=threshold, resolved=True)


def _golden_max(f, lo: float, hi: float, xtol: float) -> tuple[float, float]:
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > xtol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = f(x1)
    mid = 0.5 * (lo + hi)
    return mid, f(mid)


def maximize_qfi(
    objective: Callable[..., float],
    bounds: Sequence[tuple[float, float]],
    coarse: int = 33,
    xtol: float = 1e-6,
):
    """Maximize over 1 or 2 bounded parameters: coarse grid scan, then
    golden-section (1D) or Nelder-Mead (2D) refinement.

    Returns (argmax, value); argmax is a float in 1D, a 2-tuple in 2D.  The
    returned value is never below the best coarse-grid value, so boundary
    maxima survive refinement exactly.  Deterministic for a fixed objective.
    """
    bounds = [(float(a), float(b)) for a, b in bounds]
    for a, b in bounds:
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValueError(f"bounds must be finite with lower < upper, got ({a}, {b})")
    if len(bounds) == 1:
        (lo, hi), = bounds
        xs = np.linspace(lo, hi, coarse)
        vals = np.array([objective(float(x)) for x in xs])
        k = int(np.argmax(vals))
        cell_lo = float(xs[max(k - 1, 0)])
        cell_hi = float(xs[min(k + 1, coarse - 1)])
        x_ref, v_ref = _golden_max(objective, cell_lo, cell_hi, xtol)
        if v_ref >= vals[k]:
            return x_ref, v_ref
        return float(xs[k]), float(vals[k])
    if len(bounds) == 2:
        (lo0, hi0), (lo1, hi1) = bounds
        xs = np.linspace(lo0, hi0, coarse)
        ys = np.linspace(lo1, hi1, coarse)
        best_val = -math.inf
        best_xy = (xs[0], ys[0])
        for x in xs:
            for y in ys:
                v = objective(float(x), float(y))
                if v > best_val:
                    best_val, best_xy = v, (float(x), float(y))
        res = minimize(
            lambda p: -objective(p[0], p[1]),
            x0=np.array(best_xy),
            method="Nelder-Mead",
            bounds=bounds,
            options={"xatol": xtol, "fatol": 1e-12, "maxiter": 4000},
        )
        if -res.fun >= best_val:
            return (float(res.x[0]), float(res.x[1])), float(-res.fun)
        return best_xy, float(best_val)
    raise ValueError(f"maximize_qfi supports 1 or 2 free parameters, got {len(bounds)}")
