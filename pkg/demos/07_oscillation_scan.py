"""Brute-force scan for the self-oscillating region.

This is how the reference parameter set was certified: every cell of a coarse
grid around it oscillates, including the reference point itself.
"""

from hipo_sim import scan_for_oscillation
from hipo_sim.io import load_reference, parse_box, reference_box_path

params, config = load_reference()
box, resolution, log = parse_box(reference_box_path())
found = scan_for_oscillation(params, config, box, resolution, log)

print(f"{len(found)} of {resolution ** len(box)} cells oscillate")
print(f"{'f_in':>6} {'s_d':>6} {'k_cover':>8} {'m_cover':>8} {'freq':>8} {'amp':>8}")
for cell, m in found:
    mark = "  <- reference" if cell == params else ""
    print(f"{cell.f_in:6.1f} {cell.s_d:6.0f} {cell.k_cover:8.2f} {cell.m_cover:8.3f} "
          f"{m.frequency:8.4f} {m.amplitude:8.4f}{mark}")
