"""Steady-state oscillation metrics, Poincaré sections and energy bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal
from scipy.integrate import cumulative_trapezoid

from .errors import InsufficientDataError
from .integrator import ACCUMULATORS, EventKind, Trajectory

CV_THRESHOLD = 0.02
CV_WINDOW = 5
MIN_CYCLES = 5


@dataclass(frozen=True)
class OscillationMetrics:
    frequency: float | None = None
    amplitude: float | None = None
    mean_theta: float | None = None
    period_cv: float | None = None
    n_cycles: int = 0
    converged: bool = False


@dataclass(frozen=True, eq=False)
class PoincareSection:
    times: np.ndarray
    points: np.ndarray  # rows of (v_ball, theta, omega)

    def __len__(self):
        return len(self.times)

    def distances(self) -> np.ndarray:
        """Euclidean distance between consecutive section points."""
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)


@dataclass(frozen=True, eq=False)
class EnergyReport:
    t: np.ndarray
    ke_ball: np.ndarray
    ke_cover: np.ndarray
    pe_ball: np.ndarray
    pe_cover: np.ndarray
    pe_contact: np.ndarray
    work_in: np.ndarray
    work_in_gross: np.ndarray
    work_out: np.ndarray
    diss_ball: np.ndarray
    diss_cover: np.ndarray
    diss_contact: np.ndarray
    diss_impact: np.ndarray
    cover_received: np.ndarray
    residual: np.ndarray
    method: str = "quadrature"

    @property
    def total(self) -> np.ndarray:
        return (self.ke_ball + self.ke_cover + self.pe_ball + self.pe_cover
                + self.pe_contact)

    @property
    def dissipation(self) -> np.ndarray:
        return self.diss_ball + self.diss_cover + self.diss_contact + self.diss_impact

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residual))) if len(self.residual) else 0.0


def find_peaks(series, min_prominence: float) -> np.ndarray:
    """Indices of local maxima whose prominence is at least ``min_prominence``."""
    series = np.asarray(series, dtype=float)
    if len(series) < 3:
        raise ValueError("series must have at least 3 samples")
    idx, _ = signal.find_peaks(series, prominence=min_prominence)
    return idx


def _refine(t, y, idx):
    # parabolic vertex through each peak and its neighbours (uniform sampling)
    idx = idx[(idx > 0) & (idx < len(y) - 1)]
    ym, y0, yp = y[idx - 1], y[idx], y[idx + 1]
    denom = ym - 2.0 * y0 + yp
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.where(denom != 0, 0.5 * (ym - yp) / denom, 0.0)
    delta = np.clip(delta, -0.5, 0.5)
    step = t[1] - t[0]
    return t[idx] + delta * step, y0 - 0.25 * (ym - yp) * delta


def series_metrics(t, theta, transient_fraction: float = 0.0,
                   rel_prominence: float = 0.25,
                   cv_threshold: float = CV_THRESHOLD) -> OscillationMetrics:
    """Frequency and amplitude of a uniformly sampled oscillation.

    Peaks must rise ``rel_prominence`` times the signal's range above their
    surroundings. ``period_cv`` is taken over the last ``CV_WINDOW`` periods.
    """
    if not 0.0 <= transient_fraction < 1.0:
        raise ValueError("transient_fraction must lie in [0, 1)")
    t = np.asarray(t, dtype=float)
    theta = np.asarray(theta, dtype=float)
    start = int(len(t) * transient_fraction)
    t, theta = t[start:], theta[start:]
    if len(theta) < 3:
        return OscillationMetrics()
    span = float(np.ptp(theta))
    if not span > 0:
        return OscillationMetrics()
    prominence = rel_prominence * span
    pk_t, pk_v = _refine(t, theta, find_peaks(theta, prominence))
    tr_t, tr_v = _refine(t, -theta, find_peaks(-theta, prominence))
    if len(pk_t) < 2 or len(tr_t) < 1:
        return OscillationMetrics(n_cycles=max(len(pk_t) - 1, 0))
    periods = np.diff(pk_t)
    recent = periods[-CV_WINDOW:]
    cv = float(np.std(recent) / np.mean(recent))
    i0, i1 = np.searchsorted(t, [pk_t[0], pk_t[-1]])
    n_cycles = len(periods)
    return OscillationMetrics(
        frequency=float(1.0 / np.mean(periods)),
        amplitude=float((np.mean(pk_v) + np.mean(tr_v)) / 2.0),
        mean_theta=float(np.mean(theta[i0:i1 + 1])),
        period_cv=cv,
        n_cycles=n_cycles,
        converged=bool(n_cycles >= MIN_CYCLES and cv <= cv_threshold),
    )


def metrics(trajectory: Trajectory, transient_fraction: float = 0.5,
            **kwargs) -> OscillationMetrics:
    """Steady-state metrics of the cover angle after discarding the transient."""
    return series_metrics(trajectory.t, trajectory.theta, transient_fraction, **kwargs)


def _anchor_events(trajectory):
    events = trajectory.events_of(EventKind.CONTACT_ONSET)
    if not events:
        events = trajectory.events_of(EventKind.IMPULSE_APPLIED)
    return events


def poincare(trajectory: Trajectory) -> PoincareSection:
    """Section of ``(v_ball, theta, omega)`` taken at every contact onset.

    In impulse-contact runs the impulse instants play the same role.
    """
    events = _anchor_events(trajectory)
    if len(events) < 2:
        raise InsufficientDataError(
            f"poincare section needs >= 2 contact events, got {len(events)}")
    times = np.array([e.t_event for e in events])
    points = np.array([(e.state_at_event.v_ball, e.state_at_event.theta,
                        e.state_at_event.omega) for e in events])
    return PoincareSection(times, points)


def limit_cycle_check(section: PoincareSection, tol: float = 1e-6,
                      k: int = 5) -> tuple[bool, float]:
    """Whether the last ``k`` section points have settled onto a fixed point.

    Points must lie within ``tol`` of their mean and the return times must
    agree to ``tol`` relative. Returns the verdict and the mean return time.
    """
    if len(section) < max(k, 5):
        raise InsufficientDataError(
            f"limit cycle check needs >= {max(k, 5)} section points, got {len(section)}")
    pts = section.points[-k:]
    spread = np.linalg.norm(pts - pts.mean(axis=0), axis=1).max()
    intervals = np.diff(section.times[-(k + 1):])
    period = float(intervals.mean())
    timing = np.abs(intervals - period).max() / period
    return bool(spread <= tol and timing <= tol), period


def _acc(trajectory, name):
    return trajectory.accumulators[:, ACCUMULATORS.index(name)]


def _contact_pe(trajectory):
    pen = np.maximum(-trajectory.gap, 0.0)
    return np.where(trajectory.in_contact, 0.5 * trajectory.params.contact.k_contact * pen**2, 0.0)


def energy_audit(trajectory: Trajectory, params=None,
                 method: str = "quadrature") -> EnergyReport:
    """Energy channels and balance residual along a trajectory.

    ``method="quadrature"`` reads the work integrals that the integrator
    carries alongside the state (fourth-order, event-aware). ``"trapezoid"``
    rebuilds them from the samples alone and is only as good as the sample
    spacing; it serves as an independent cross-check.
    """
    p = trajectory.params if params is None else params
    tr = trajectory
    ke_ball = tr.ke_ball
    ke_cover = tr.ke_cover
    pe_ball = 0.5 * p.k_ball * tr.x_ball**2
    pe_cover = 0.5 * p.k_cover * tr.theta**2
    pe_contact = _contact_pe(tr)

    if method == "quadrature":
        work_in = _acc(tr, "work_in")
        work_in_gross = _acc(tr, "work_in_gross")
        work_out = _acc(tr, "work_out")
        diss_ball = _acc(tr, "diss_ball")
        diss_cover = _acc(tr, "diss_cover")
        work_contact = _acc(tr, "work_contact")
        cover_received = _acc(tr, "cover_contact") + _acc(tr, "impact_to_cover")
        diss_impact = _acc(tr, "impact_loss")
    elif method == "trapezoid":
        t = tr.t
        fc = tr.f_contact
        lever = p.l_cover * np.cos(tr.theta)

        def cum(y):
            return cumulative_trapezoid(y, t, initial=0.0)

        work_in = cum(p.f_in * tr.v_ball)
        work_in_gross = cum(np.abs(p.f_in * tr.v_ball))
        work_out = cum(tr.f_out * tr.v_ball)
        diss_ball = cum(p.c_ball * tr.v_ball**2)
        diss_cover = cum(p.c_cover * tr.omega**2)
        work_contact = cum(fc * tr.gap_rate)
        cover_received = cum(fc * lever * tr.omega)
        diss_impact = np.zeros_like(t)
        for ev in tr.events_of(EventKind.IMPULSE_APPLIED):
            after = t >= ev.t_event
            cover_received = cover_received + np.where(after, ev.energy_transferred, 0.0)
            # loss is the drop in total kinetic energy across the impulse
            loss = ev.accumulators[ACCUMULATORS.index("impact_loss")]
            diss_impact = np.where(after, loss, diss_impact)
    else:
        raise ValueError(f"unknown method {method!r}")

    diss_contact = -work_contact - (pe_contact - pe_contact[:1])
    total = ke_ball + ke_cover + pe_ball + pe_cover + pe_contact
    residual = (total - total[:1]) - (work_in + work_out - diss_ball - diss_cover
                                      - diss_contact - diss_impact)
    return EnergyReport(t=tr.t, ke_ball=ke_ball, ke_cover=ke_cover, pe_ball=pe_ball,
                        pe_cover=pe_cover, pe_contact=pe_contact, work_in=work_in,
                        work_in_gross=work_in_gross, work_out=work_out,
                        diss_ball=diss_ball, diss_cover=diss_cover,
                        diss_contact=diss_contact, diss_impact=diss_impact,
                        cover_received=cover_received, residual=residual,
                        method=method)


def cycle_energy_balance(trajectory: Trajectory,
                         transient_fraction: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Per-cycle cover energy intake and cover damping loss.

    Cycles run between consecutive contact onsets (or impulses) after the
    transient. Returns ``(received, dissipated)``, one entry per cycle.
    """
    events = _anchor_events(trajectory)
    t_cut = trajectory.t[0] + transient_fraction * (trajectory.t[-1] - trajectory.t[0])
    events = [e for e in events if e.t_event >= t_cut]
    if len(events) < 2:
        raise InsufficientDataError("need >= 2 contact events after the transient")
    acc = np.array([e.accumulators for e in events])
    received = acc[:, ACCUMULATORS.index("cover_contact")] + acc[:, ACCUMULATORS.index("impact_to_cover")]
    dissipated = acc[:, ACCUMULATORS.index("diss_cover")]
    return np.diff(received), np.diff(dissipated)
