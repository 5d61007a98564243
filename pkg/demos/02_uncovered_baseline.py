"""Without the cover the same inflow gives a constant output.

The ball settles at x* = f_in / (k_ball + s_d) and nothing oscillates.
"""

import dataclasses

from hipo_sim import SimMode, metrics, simulate
from hipo_sim.io import load_reference
from hipo_sim.model import uncovered_equilibrium

params, config = load_reference()
traj = simulate(params, dataclasses.replace(config, mode=SimMode.UNCOVERED))
x_star = uncovered_equilibrium(params)

print(f"x_ball(t_end) = {traj.x_ball[-1]:.12f}")
print(f"x*            = {x_star:.12f}")
print(f"events logged = {len(traj.events)}")
print(f"oscillating   = {metrics(traj).converged}")
