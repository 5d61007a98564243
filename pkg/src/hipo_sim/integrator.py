"""Fixed-step RK4 integration of the hybrid ball-cover system.

Each step is taken with the vector field of the current regime. When the gap
changes sign across a step, the sub-step length is bisected until the state
sits on the contact surface to within ``event_tol``; the regime is flipped
(penalty contact) or a restitution impulse applied (impulse contact), and the
remainder of the step is integrated so that sampling stays on the ``dt`` grid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import (BracketError, CollisionError, EventConvergenceError,
                     InstabilityError, InvariantError)
from .model import (ContactMode, ModelParams, Regime, SimState, gap,
                    rest_state)

ACCUMULATORS = ("work_in", "work_in_gross", "work_out", "diss_ball",
                "diss_cover", "work_contact", "cover_contact", "impact_loss",
                "impact_to_cover")


class SimMode(enum.Enum):
    COVERED = "covered"
    UNCOVERED = "uncovered"


class EventKind(enum.Enum):
    CONTACT_ONSET = "contact_onset"
    SEPARATION = "separation"
    IMPULSE_APPLIED = "impulse_applied"


_KIND_CODES = {K.EV_CONTACT_ONSET: EventKind.CONTACT_ONSET,
               K.EV_SEPARATION: EventKind.SEPARATION,
               K.EV_IMPULSE: EventKind.IMPULSE_APPLIED}


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-4
    t_end: float = 60.0
    event_tol: float = 1e-9
    max_event_iters: int = 80
    sample_stride: int = 1
    mode: SimMode = SimMode.COVERED

    def __post_init__(self):
        object.__setattr__(self, "mode", SimMode(self.mode))
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvariantError("dt", "dt > 0")
        if not (math.isfinite(self.t_end) and self.t_end > self.dt):
            raise InvariantError("t_end", "t_end > dt")
        if not self.event_tol > 0:
            raise InvariantError("event_tol", "event_tol > 0")
        if int(self.max_event_iters) != self.max_event_iters or self.max_event_iters < 1:
            raise InvariantError("max_event_iters", "max_event_iters >= 1 (integer)")
        if int(self.sample_stride) != self.sample_stride or self.sample_stride < 1:
            raise InvariantError("sample_stride", "sample_stride >= 1 (integer)")

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.t_end / self.dt + 1e-9))


@dataclass(frozen=True)
class EventRecord:
    t_event: float
    kind: EventKind
    state_at_event: SimState
    energy_transferred: float = 0.0
    accumulators: tuple = ()


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled history of one run.

    Samples are stored column-wise; derived quantities (gap, forces, kinetic
    energies) are computed on access from the stored state and regime.
    """

    params: ModelParams
    config: SimConfig
    t: np.ndarray
    x_ball: np.ndarray
    v_ball: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    regime: np.ndarray
    accumulators: np.ndarray
    events: tuple = ()
    grazing_count: int = 0

    def __len__(self):
        return len(self.t)

    def accumulator(self, name: str) -> np.ndarray:
        return self.accumulators[:, ACCUMULATORS.index(name)]

    @property
    def x_cover(self):
        return self.params.h + self.params.l_cover * np.sin(self.theta)

    @property
    def gap(self):
        return self.x_cover - self.x_ball - self.params.x_size

    @property
    def gap_rate(self):
        return self.params.l_cover * np.cos(self.theta) * self.omega - self.v_ball

    @property
    def in_contact(self):
        return self.regime == int(Regime.IN_CONTACT)

    @property
    def f_out(self):
        return np.where(self.in_contact, 0.0, -self.params.s_d * self.x_ball)

    @property
    def f_contact(self):
        """Normal contact force magnitude (penalty mode; zero when separated)."""
        c = self.params.contact
        fc = c.k_contact * (-self.gap) + c.c_contact * np.maximum(0.0, -self.gap_rate)
        return np.where(self.in_contact, np.maximum(fc, 0.0), 0.0)

    @property
    def ke_ball(self):
        return 0.5 * self.params.m_ball * self.v_ball**2

    @property
    def ke_cover(self):
        return 0.5 * self.params.i_cover * self.omega**2

    def state(self, i: int) -> SimState:
        return SimState(float(self.t[i]), float(self.x_ball[i]), float(self.v_ball[i]),
                        float(self.theta[i]), float(self.omega[i]), Regime(int(self.regime[i])))

    @property
    def final_state(self) -> SimState:
        return self.state(len(self.t) - 1)

    def events_of(self, kind: EventKind) -> list[EventRecord]:
        return [e for e in self.events if e.kind is kind]


def rk4_step(state: SimState, dt: float, params: ModelParams) -> SimState:
    """One classical RK4 step in the state's current regime."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    y = K.rk4(state.vector(), int(state.regime), float(dt), params.as_array())
    t = state.t + dt
    if not np.all(np.isfinite(y[:4])):
        raise InstabilityError(f"non-finite state at t={t!r}", last_good_time=state.t)
    return SimState.from_vector(t, y, state.regime)


def bisect_event(gap_at, t_lo: float, t_hi: float, tol: float, max_iter: int) -> float:
    """Find a time where ``|gap_at(t)| <= tol`` inside a sign-changing bracket.

    The returned time stays on the same side of the surface as ``t_hi``.
    """
    g_lo = gap_at(t_lo)
    g_hi = gap_at(t_hi)
    lo_side = g_lo >= 0
    if lo_side == (g_hi >= 0):
        raise BracketError(f"gap does not change sign on [{t_lo}, {t_hi}]")
    for _ in range(max_iter):
        if abs(g_hi) <= tol:
            return t_hi
        mid = 0.5 * (t_lo + t_hi)
        g_mid = gap_at(mid)
        if (g_mid >= 0) == lo_side:
            t_lo = mid
        else:
            t_hi, g_hi = mid, g_mid
    if abs(g_hi) <= tol:
        return t_hi
    raise EventConvergenceError(f"event not localized to {tol} within {max_iter} iterations",
                                last_good_time=t_lo)


def locate_event(state_before: SimState, state_after: SimState, params: ModelParams,
                 config: SimConfig) -> tuple[float, SimState]:
    """Localize the contact-surface crossing between two bracketing states.

    Sub-steps of ``rk4_step`` from ``state_before`` are bisected; the returned
    state carries ``state_before.regime`` and lies on the far side of the
    surface with ``|gap| <= config.event_tol``.
    """
    h_total = state_after.t - state_before.t
    if not h_total > 0:
        raise BracketError("state_after must be later than state_before")

    def gap_at(tau):
        if tau == 0:
            return gap(state_before, params)
        return gap(rk4_step(state_before, tau, params), params)

    tau = bisect_event(gap_at, 0.0, h_total, config.event_tol, config.max_event_iters)
    event_state = rk4_step(state_before, tau, params)
    return event_state.t, event_state


def apply_impulse(state: SimState, params: ModelParams) -> tuple[SimState, float]:
    """Instantaneous restitution collision between ball and cover tip.

    The cover enters as an effective point mass ``i_cover / (l_cover cos theta)**2``
    at the tip. Returns the post-impact state and the kinetic energy gained by
    the cover.
    """
    y, approaching, _loss, gain = K.impulse(state.vector(), params.as_array())
    if not approaching:
        raise CollisionError("ball and cover tip are not approaching")
    return SimState.from_vector(state.t, y, state.regime), float(gain)


def simulate(params: ModelParams, config: SimConfig,
             initial: SimState | None = None) -> Trajectory:
    """Integrate from ``initial`` (rest by default) to ``config.t_end``."""
    if initial is None:
        initial = rest_state()
    if not initial.is_finite():
        raise InvariantError("initial", "initial state must be finite")
    covered = config.mode is SimMode.COVERED
    impulse_mode = params.contact.mode is ContactMode.IMPULSE
    if covered and not impulse_mode and gap(initial, params) < 0:
        regime0 = K.IN_CONTACT
    else:
        regime0 = K.SEPARATED
    y0 = initial.vector()
    n_steps = int(math.floor((config.t_end - initial.t) / config.dt + 1e-9))
    (samples, sample_regime, ev_t, ev_kind, ev_y, ev_energy, status, last_good,
     n_grazing) = K.simulate_kernel(
        params.as_array(), impulse_mode, covered, y0, regime0, float(initial.t),
        float(config.dt), n_steps, int(config.sample_stride), float(config.event_tol),
        int(config.max_event_iters))
    if status == K.STATUS_NONFINITE:
        raise InstabilityError(f"non-finite state; last good time {last_good!r}",
                               last_good_time=float(last_good))
    if status == K.STATUS_EVENT_NONCONVERGED:
        raise EventConvergenceError(
            f"event localization did not converge near t={last_good!r}",
            last_good_time=float(last_good))
    if status == K.STATUS_ZENO:
        raise EventConvergenceError(
            f"impacts accumulate near t={last_good!r}: sustained contact cannot be "
            "represented with impulse contact", last_good_time=float(last_good))

    stride_dt = config.sample_stride * config.dt
    t = initial.t + stride_dt * np.arange(len(samples))
    events = []
    for i in range(len(ev_t)):
        kind = _KIND_CODES[int(ev_kind[i])]
        if kind is EventKind.CONTACT_ONSET:
            regime = Regime.IN_CONTACT
        else:
            regime = Regime.SEPARATED
        events.append(EventRecord(
            float(ev_t[i]), kind, SimState.from_vector(ev_t[i], ev_y[i], regime),
            float(ev_energy[i]), tuple(float(a) for a in ev_y[i, 4:])))
    return Trajectory(
        params=params, config=config, t=t,
        x_ball=samples[:, 0].copy(), v_ball=samples[:, 1].copy(),
        theta=samples[:, 2].copy(), omega=samples[:, 3].copy(),
        regime=sample_regime.copy(), accumulators=samples[:, 4:].copy(),
        events=tuple(events), grazing_count=int(n_grazing))
