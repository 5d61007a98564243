"""One-parameter sweeps, trend statistics and the oscillation-region scan."""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .analysis import OscillationMetrics, metrics
from .errors import InsufficientDataError, InvariantError, NumericalError
from .integrator import SimConfig, simulate
from .model import ModelParams, SimState

SWEEP_PARAMETERS = ("m_cover", "f_in", "h", "s_d")


def default_workers() -> int:
    """Thread count for sweeps: ``HIPO_THREADS`` if set, else the CPU count."""
    env = os.environ.get("HIPO_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("HIPO_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SweepSpec:
    params: ModelParams
    config: SimConfig
    parameter: str
    grid: tuple
    transient_fraction: float = 0.5
    initial: SimState | None = None

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise InvariantError("parameter", f"parameter must be one of {SWEEP_PARAMETERS}")
        grid = tuple(float(g) for g in self.grid)
        object.__setattr__(self, "grid", grid)
        if len(grid) < 5:
            raise InvariantError("grid", "grid needs at least 5 values")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise InvariantError("grid", "grid values must be non-decreasing")
        for g in grid:
            self.point_params(g)

    def point_params(self, value: float) -> ModelParams:
        return self.params.replace(**{self.parameter: value})


@dataclass(frozen=True)
class SweepPoint:
    index: int
    value: float
    params: ModelParams
    metrics: OscillationMetrics
    failure: str | None = None
    last_good_time: float | None = None


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    points: tuple

    @property
    def converged(self) -> np.ndarray:
        return np.array([p.metrics.converged for p in self.points])

    def _column(self, name):
        return np.array([getattr(p.metrics, name) if p.metrics.converged else np.nan
                         for p in self.points], dtype=float)

    @property
    def frequencies(self) -> np.ndarray:
        return self._column("frequency")

    @property
    def amplitudes(self) -> np.ndarray:
        return self._column("amplitude")


@dataclass(frozen=True)
class TrendReport:
    spearman_rho_frequency: float
    spearman_rho_amplitude: float
    loglog_slope_frequency: float
    fraction_converged: float
    relative_range_frequency: float
    relative_range_amplitude: float


def _run_point(spec: SweepSpec, index: int) -> SweepPoint:
    value = spec.grid[index]
    params = spec.point_params(value)
    try:
        traj = simulate(params, spec.config, spec.initial)
    except NumericalError as exc:
        return SweepPoint(index, value, params, OscillationMetrics(),
                          failure=exc.kind, last_good_time=exc.last_good_time)
    return SweepPoint(index, value, params, metrics(traj, spec.transient_fraction))


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Simulate every grid point; results come back in grid order."""
    workers = default_workers() if workers is None else workers
    indices = range(len(spec.grid))
    if workers <= 1:
        points = [_run_point(spec, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(lambda i: _run_point(spec, i), indices))
    return SweepResult(spec, tuple(points))


def _spearman(x, y):
    if np.ptp(y) == 0 or np.ptp(x) == 0:
        return 0.0
    return float(stats.spearmanr(x, y)[0])


def _relative_range(y):
    return float(np.ptp(y) / np.mean(y))


def trend(result: SweepResult, grid=None) -> TrendReport:
    """Rank correlations and log-log frequency slope over converged points."""
    grid = np.asarray(result.spec.grid if grid is None else grid, dtype=float)
    ok = result.converged
    n_ok = int(ok.sum())
    if n_ok < 3:
        raise InsufficientDataError(f"trend needs >= 3 converged points, got {n_ok}")
    x = grid[ok]
    freq = result.frequencies[ok]
    amp = result.amplitudes[ok]
    slope = float(np.polyfit(np.log(x), np.log(freq), 1)[0])
    if n_ok >= 5:
        rho_f, rho_a = _spearman(x, freq), _spearman(x, amp)
    else:
        rho_f = rho_a = float("nan")
    return TrendReport(
        spearman_rho_frequency=rho_f,
        spearman_rho_amplitude=rho_a,
        loglog_slope_frequency=slope,
        fraction_converged=n_ok / len(grid),
        relative_range_frequency=_relative_range(freq),
        relative_range_amplitude=_relative_range(amp),
    )


def _axis(lo, hi, resolution, log):
    if lo == hi:
        return np.array([float(lo)])
    if log:
        return np.geomspace(lo, hi, resolution)
    return np.linspace(lo, hi, resolution)


def scan_for_oscillation(params: ModelParams, config: SimConfig, box: dict,
                         resolution: int = 3, log: bool = False,
                         transient_fraction: float = 0.5,
                         workers: int | None = None) -> list:
    """Brute-force grid scan; returns ``(params, metrics)`` of oscillating cells.

    ``box`` maps parameter names (usually ``f_in``, ``s_d``, ``k_cover``,
    ``m_cover``) to ``(low, high)``; a collapsed range contributes a single
    value. Cells violating a parameter invariant are skipped. The result is
    sorted by frequency, grid order breaking ties.
    """
    if not box:
        raise ValueError("scan box is empty")
    names = sorted(box)
    axes = [_axis(float(box[n][0]), float(box[n][1]), resolution, log) for n in names]
    cells = []
    for combo in itertools.product(*axes):
        try:
            cells.append(params.replace(**dict(zip(names, map(float, combo)))))
        except InvariantError:
            continue

    def run(cell):
        try:
            return metrics(simulate(cell, config), transient_fraction)
        except NumericalError:
            return OscillationMetrics()

    workers = default_workers() if workers is None else workers
    if workers <= 1:
        results = [run(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, cells))
    found = [(c, m) for c, m in zip(cells, results) if m.converged]
    return sorted(found, key=lambda cm: cm[1].frequency)
