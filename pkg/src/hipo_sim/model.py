"""Ball-cover reduced model: parameters, hybrid state and force laws.

The membrane is a translational spring-mass-damper (the "ball"), the cover
a rotational spring-damper flap. They interact through the signed gap

    gap = x_cover - x_ball - x_size,   x_cover = h + l_cover * sin(theta)

The outflow force ``-s_d * x_ball`` acts only while the gap is open
(``gap >= 0``). Contact is either a compliant penalty law or an
instantaneous restitution impulse.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels as K
from .errors import InvariantError


class ContactMode(enum.Enum):
    PENALTY = "penalty"
    IMPULSE = "impulse"


class Regime(enum.IntEnum):
    SEPARATED = K.SEPARATED
    IN_CONTACT = K.IN_CONTACT


def _require(ok, name, constraint):
    if not ok:
        raise InvariantError(name, constraint)


@dataclass(frozen=True)
class ContactParams:
    mode: ContactMode = ContactMode.PENALTY
    k_contact: float = 1e4
    c_contact: float = 5.0
    restitution: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mode", ContactMode(self.mode))
        _require(math.isfinite(self.k_contact) and self.k_contact > 0,
                 "k_contact", "k_contact > 0")
        _require(math.isfinite(self.c_contact) and self.c_contact >= 0,
                 "c_contact", "c_contact >= 0")
        _require(0.0 <= self.restitution <= 1.0,
                 "restitution", "0 <= restitution <= 1")


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the ball-cover model (SI or model units).

    ``h`` is the tip offset at ``theta = 0``; ``l_cover`` the lever arm from
    the hinge to the contact point.
    """

    m_ball: float
    k_ball: float
    c_ball: float
    i_cover: float
    k_cover: float
    c_cover: float
    f_in: float
    s_d: float
    x_size: float
    h: float
    l_cover: float
    contact: ContactParams = field(default_factory=ContactParams)

    def __post_init__(self):
        for name in ("m_ball", "k_ball", "c_ball", "i_cover", "k_cover",
                     "c_cover", "f_in", "s_d", "x_size", "h", "l_cover"):
            value = getattr(self, name)
            _require(isinstance(value, (int, float)) and math.isfinite(value),
                     name, f"{name} must be a finite number")
        for name in ("m_ball", "i_cover", "k_ball", "k_cover", "l_cover"):
            _require(getattr(self, name) > 0, name, f"{name} > 0")
        for name in ("c_ball", "c_cover", "s_d", "f_in", "x_size"):
            _require(getattr(self, name) >= 0, name, f"{name} >= 0")
        _require(self.h >= self.x_size, "h", "h >= x_size")

    def replace(self, **changes) -> ModelParams:
        """Copy with fields changed; ``m_cover`` is accepted and mapped to ``i_cover``."""
        if "m_cover" in changes:
            l_cover = changes.get("l_cover", self.l_cover)
            changes["i_cover"] = mass_to_inertia(changes.pop("m_cover"), l_cover)
        contact_keys = {"mode", "k_contact", "c_contact", "restitution"}
        contact_changes = {k: changes.pop(k) for k in list(changes) if k in contact_keys}
        if contact_changes:
            changes["contact"] = replace(self.contact, **contact_changes)
        return replace(self, **changes)

    @property
    def m_cover(self) -> float:
        """Cover mass implied by ``i_cover`` under the hinged-rod mapping."""
        return 3.0 * self.i_cover / self.l_cover**2

    def as_array(self) -> np.ndarray:
        p = np.empty(K.N_P)
        p[K.P_M_BALL] = self.m_ball
        p[K.P_K_BALL] = self.k_ball
        p[K.P_C_BALL] = self.c_ball
        p[K.P_I_COVER] = self.i_cover
        p[K.P_K_COVER] = self.k_cover
        p[K.P_C_COVER] = self.c_cover
        p[K.P_F_IN] = self.f_in
        p[K.P_S_D] = self.s_d
        p[K.P_X_SIZE] = self.x_size
        p[K.P_H] = self.h
        p[K.P_L_COVER] = self.l_cover
        p[K.P_K_CONTACT] = self.contact.k_contact
        p[K.P_C_CONTACT] = self.contact.c_contact
        p[K.P_RESTITUTION] = self.contact.restitution
        return p


@dataclass(frozen=True)
class SimState:
    t: float = 0.0
    x_ball: float = 0.0
    v_ball: float = 0.0
    theta: float = 0.0
    omega: float = 0.0
    regime: Regime = Regime.SEPARATED

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))

    def vector(self) -> np.ndarray:
        """Kernel state vector with zeroed energy accumulators."""
        y = np.zeros(K.N_Y)
        y[:4] = (self.x_ball, self.v_ball, self.theta, self.omega)
        return y

    @classmethod
    def from_vector(cls, t, y, regime) -> SimState:
        return cls(float(t), float(y[0]), float(y[1]), float(y[2]), float(y[3]),
                   Regime(int(regime)))

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in
                   (self.t, self.x_ball, self.v_ball, self.theta, self.omega))


def cover_tip_position(state: SimState, params: ModelParams) -> float:
    return params.h + params.l_cover * math.sin(state.theta)


def gap(state: SimState, params: ModelParams) -> float:
    """Signed clearance; negative means the hole is sealed."""
    return cover_tip_position(state, params) - state.x_ball - params.x_size


def gap_rate(state: SimState, params: ModelParams) -> float:
    return params.l_cover * math.cos(state.theta) * state.omega - state.v_ball


def f_out(state: SimState, params: ModelParams) -> float:
    if gap(state, params) < 0:
        return 0.0
    return -params.s_d * state.x_ball


def contact_force(state: SimState, params: ModelParams) -> tuple[float, float]:
    """Penalty contact as ``(force on ball, torque on cover)``.

    Zero while separated. The damping term only acts against approach and the
    normal force is clamped non-negative, so contact never pulls.
    """
    if params.contact.mode is not ContactMode.PENALTY:
        raise ValueError("contact_force is defined for penalty contact only")
    g = gap(state, params)
    if g >= 0:
        return 0.0, 0.0
    fc = K.penalty_force(g, gap_rate(state, params), params.as_array())
    return -fc, fc * params.l_cover * math.cos(state.theta)


def derivatives(state: SimState, params: ModelParams) -> np.ndarray:
    """Rates ``(dx, dv, dtheta, domega)`` for the branch given by ``state.regime``.

    For states produced by the integrator the regime agrees with the sign of
    the gap. Impulse-mode states are always separated, so no contact terms
    appear there.
    """
    dy = np.empty(K.N_Y)
    K.rhs(state.vector(), int(state.regime), params.as_array(), dy)
    return dy[:4]


def uncovered_equilibrium(params: ModelParams) -> float:
    stiffness = params.k_ball + params.s_d
    if stiffness == 0:
        raise ValueError("k_ball + s_d must be non-zero")
    return params.f_in / stiffness


def mass_to_inertia(m_cover: float, l_cover: float) -> float:
    """Inertia of a uniform flap hinged at one end, ``m * l**2 / 3``."""
    if not m_cover > 0:
        raise InvariantError("m_cover", "m_cover > 0")
    if not l_cover > 0:
        raise InvariantError("l_cover", "l_cover > 0")
    return m_cover * l_cover**2 / 3.0


def rest_state(t: float = 0.0) -> SimState:
    return SimState(t=t)
