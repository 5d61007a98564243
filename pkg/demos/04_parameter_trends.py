"""How frequency and amplitude respond to each design parameter.

A heavier cover slows the oscillation (roughly as one over the square root of
its mass) and swings it further. A stronger inflow raises the amplitude while
leaving the frequency nearly unchanged. The outflow coefficient and the
initial gap matter less.

    HIPO_THREADS=4 python demos/04_parameter_trends.py
"""

import numpy as np

from hipo_sim import SweepSpec, run_sweep, trend
from hipo_sim.io import load_reference

params, config = load_reference()
grids = {
    "m_cover": np.geomspace(params.m_cover / 10**0.5, params.m_cover * 10**0.5, 7),
    "f_in": np.geomspace(params.f_in / 10**0.5, params.f_in * 10**0.5, 7),
    "s_d": np.geomspace(params.s_d / 10**0.5, params.s_d * 10**0.5, 7),
    "h": np.linspace(params.x_size, 2 * params.h - params.x_size, 7),
}

for name, grid in grids.items():
    result = run_sweep(SweepSpec(params, config, name, tuple(grid)))
    rep = trend(result)
    print(f"\n{name}")
    for value, f, a in zip(grid, result.frequencies, result.amplitudes):
        print(f"  {value:10.4g}  f={f:.4f}  amp={a:.4f}")
    print(f"  log-log slope of f: {rep.loglog_slope_frequency:+.3f}   "
          f"relative range f/amp: {rep.relative_range_frequency:.3f}/{rep.relative_range_amplitude:.3f}")
