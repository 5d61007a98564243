"""Ball-cover model of an interaction-induced pneumatic oscillator."""

__version__ = "0.1.0"

from .analysis import (EnergyReport, OscillationMetrics, PoincareSection,  # noqa: E402
                       cycle_energy_balance, energy_audit, limit_cycle_check, metrics,
                       poincare)
from .integrator import EventKind, SimConfig, SimMode, Trajectory, simulate  # noqa: E402
from .model import ContactMode, ContactParams, ModelParams, Regime, SimState  # noqa: E402
from .sweep import SweepSpec, run_sweep, scan_for_oscillation, trend  # noqa: E402

__all__ = [
    "ContactMode", "ContactParams", "EnergyReport", "EventKind", "ModelParams",
    "OscillationMetrics", "PoincareSection", "Regime", "SimConfig", "SimMode", "SimState",
    "SweepSpec", "Trajectory", "cycle_energy_balance", "energy_audit", "limit_cycle_check",
    "metrics", "poincare", "run_sweep", "scan_for_oscillation", "simulate", "trend",
]
