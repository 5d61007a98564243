"""Instantaneous restitution contact instead of the compliant law.

With zero-duration contact the outflow switch never acts over a finite
interval, so nothing pumps energy into the system. When the ball's static
position lies short of the cover it bounces a few times and settles; on the
reference set it would have to rest against the cover, which impulses alone
cannot represent, and the run stops with an event-accumulation error.
"""

import dataclasses

from hipo_sim import SimConfig, energy_audit, simulate
from hipo_sim.errors import EventConvergenceError
from hipo_sim.io import load_reference

params, config = load_reference()
short = dataclasses.replace(config, t_end=20.0)

bouncing = params.replace(mode="impulse", restitution=0.7, f_in=2.0)
traj = simulate(bouncing, short)
rep = energy_audit(traj)
print(f"f_in=2: {len(traj.events)} impacts, lost in impacts {rep.diss_impact[-1]:.3e} J, "
      f"final x_ball {traj.x_ball[-1]:.6f}")
for ev in traj.events[:5]:
    print(f"  t={ev.t_event:.5f} energy to cover {ev.energy_transferred:+.3e}")

try:
    simulate(params.replace(mode="impulse", restitution=0.0), SimConfig(t_end=5.0))
except EventConvergenceError as exc:
    print(f"reference set, e=0: {exc} (last good t={exc.last_good_time:.4f})")
