"""Where the energy goes.

The work integrals are carried by the integrator next to the state, so the
balance closes to round-off. Per steady cycle the energy the ball hands the
cover during contact equals what the cover's damper burns.
"""

from hipo_sim import cycle_energy_balance, energy_audit, simulate
from hipo_sim.io import load_reference

params, config = load_reference()
traj = simulate(params, config)
rep = energy_audit(traj)

print("cumulative over the run")
for name in ("work_in", "work_out", "diss_ball", "diss_cover", "diss_contact", "cover_received"):
    print(f"  {name:15s} {getattr(rep, name)[-1]:+.6f}")
print(f"  max |residual|  {rep.max_residual:.2e}  (gross input work {rep.work_in_gross[-1]:.3f})")

trap = energy_audit(traj, method="trapezoid")
print(f"sample-based trapezoid cross-check residual: {trap.max_residual:.2e}")

received, dissipated = cycle_energy_balance(traj)
print("\nsteady cycles: received by cover vs cover damping")
for r, d in list(zip(received, dissipated))[-5:]:
    print(f"  {r:.8f}  {d:.8f}")
