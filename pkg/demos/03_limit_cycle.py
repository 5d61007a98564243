"""Poincare section at each contact onset.

Successive section points close in geometrically until they sit at the
scatter left by event localization: the motion is an attracting limit cycle.
"""

from hipo_sim import limit_cycle_check, metrics, poincare, simulate
from hipo_sim.io import load_reference

params, config = load_reference()
traj = simulate(params, config)
section = poincare(traj)

print("onset time   distance to previous point")
for t, d in zip(section.times[1:25], section.distances()[:24]):
    print(f"{t:10.4f}   {d:.3e}")

ok, period = limit_cycle_check(section)
print(f"\nlimit cycle: {ok}, return time {period:.6f}, 1/frequency {1 / metrics(traj).frequency:.6f}")
