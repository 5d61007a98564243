import dataclasses

import numpy as np
import pytest

from hipo_sim.analysis import OscillationMetrics
from hipo_sim.errors import InsufficientDataError, InvariantError
from hipo_sim.integrator import SimConfig
from hipo_sim.io import load_reference, parse_box, reference_box_path
from hipo_sim.sweep import (SweepPoint, SweepResult, SweepSpec, default_workers, run_sweep,
                            scan_for_oscillation, trend)


def short(config, t_end=40.0):
    return dataclasses.replace(config, t_end=t_end)


def fake_result(grid, freqs, amps=None):
    params, config = load_reference()
    spec = SweepSpec(params, config, "m_cover", tuple(grid))
    amps = freqs if amps is None else amps
    points = tuple(
        SweepPoint(i, g, spec.point_params(g),
                   OscillationMetrics(frequency=f, amplitude=a, mean_theta=0.0,
                                      period_cv=0.0, n_cycles=10, converged=f is not None))
        for i, (g, f, a) in enumerate(zip(grid, freqs, amps)))
    return SweepResult(spec, points)


def test_spec_invariants(reference):
    params, config = reference
    with pytest.raises(InvariantError, match="grid"):
        SweepSpec(params, config, "f_in", (1, 2, 3, 4))
    with pytest.raises(InvariantError, match="grid"):
        SweepSpec(params, config, "f_in", (5, 4, 3, 2, 1))
    with pytest.raises(InvariantError, match="parameter"):
        SweepSpec(params, config, "k_ball", (1, 2, 3, 4, 5))
    with pytest.raises(InvariantError, match="h"):
        SweepSpec(params, config, "h", (0.01, 0.05, 0.06, 0.07, 0.08))


def test_trend_inverse_sqrt():
    x = np.geomspace(0.1, 1.0, 7)
    rep = trend(fake_result(x, list(1 / np.sqrt(x))))
    assert rep.spearman_rho_frequency == pytest.approx(-1.0)
    assert rep.loglog_slope_frequency == pytest.approx(-0.5, abs=1e-6)
    assert rep.fraction_converged == 1.0


def test_trend_constant():
    x = np.geomspace(0.1, 1.0, 7)
    rep = trend(fake_result(x, [2.0] * 7))
    assert rep.spearman_rho_frequency == pytest.approx(0.0)
    assert rep.loglog_slope_frequency == pytest.approx(0.0, abs=1e-12)
    assert rep.relative_range_frequency == 0.0


def test_trend_skips_unconverged():
    x = np.geomspace(0.1, 1.0, 6)
    rep = trend(fake_result(x, [None, 3.0, 2.0, 1.5, 1.2, 1.0]))
    assert rep.fraction_converged == pytest.approx(5 / 6)
    assert rep.spearman_rho_frequency == pytest.approx(-1.0)


def test_trend_needs_three_points():
    x = np.geomspace(0.1, 1.0, 5)
    with pytest.raises(InsufficientDataError):
        trend(fake_result(x, [None, None, None, 1.0, 2.0]))


def test_below_onset_sweep(reference):
    # the scan places the f_in onset between 1.5 and 2 on the reference set
    params, config = reference
    cfg = short(config)
    grid = np.linspace(0.2, 1.2, 5)
    assert scan_for_oscillation(params, cfg, {"f_in": (0.2, 1.2)}, resolution=5) == []
    assert scan_for_oscillation(params, cfg, {"f_in": (2.0, 2.0)})
    result = run_sweep(SweepSpec(params, cfg, "f_in", tuple(grid)))
    assert not np.any(result.converged)


def test_identical_grid(reference):
    params, config = reference
    result = run_sweep(SweepSpec(params, short(config, 20.0), "f_in", (20.0,) * 5), workers=2)
    first = result.points[0].metrics
    assert first.converged
    assert all(p.metrics == first for p in result.points)


def test_m_cover_decade(reference):
    params, config = reference
    grid = np.geomspace(0.5 / np.sqrt(10), 0.5 * np.sqrt(10), 5)
    result = run_sweep(SweepSpec(params, config, "m_cover", tuple(grid)))
    assert np.all(result.converged)
    assert np.all(np.diff(result.frequencies) < 0)


def test_serial_parallel_identical(reference):
    params, config = reference
    spec = SweepSpec(params, short(config, 20.0), "s_d", tuple(np.linspace(200, 600, 5)))
    a = run_sweep(spec, workers=1)
    b = run_sweep(spec, workers=3)
    assert [p.metrics for p in a.points] == [p.metrics for p in b.points]
    assert [p.value for p in a.points] == [p.value for p in b.points]


def test_failed_points_are_recorded(reference):
    params, config = reference
    p = params.replace(mode="impulse", restitution=0.0)
    result = run_sweep(SweepSpec(p, short(config, 5.0), "f_in", (10, 12, 14, 16, 18)))
    for point in result.points:
        assert point.failure == "event_nonconvergence"
        assert 0 < point.last_good_time < 5.0
        assert not point.metrics.converged


def test_default_workers(monkeypatch):
    monkeypatch.setenv("HIPO_THREADS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("HIPO_THREADS", "0")
    with pytest.raises(ValueError):
        default_workers()
    monkeypatch.delenv("HIPO_THREADS")
    assert default_workers() >= 1


def test_scan_huge_h_is_empty(reference):
    params, config = reference
    assert scan_for_oscillation(params, short(config, 20.0), {"h": (1e3, 1e3)}) == []


def test_scan_single_point(reference):
    params, config = reference
    box = {"f_in": (params.f_in, params.f_in), "m_cover": (0.5, 0.5)}
    found = scan_for_oscillation(params, config, box)
    assert len(found) == 1
    assert found[0][0] == params


def test_scan_empty_box(reference):
    params, config = reference
    with pytest.raises(ValueError):
        scan_for_oscillation(params, config, {})


def test_scan_default_box_contains_reference(reference):
    params, config = reference
    box, resolution, log = parse_box(reference_box_path())
    found = scan_for_oscillation(params, config, box, resolution, log)
    assert found
    assert any(cell == params for cell, _ in found)
    freqs = [m.frequency for _, m in found]
    assert freqs == sorted(freqs)
