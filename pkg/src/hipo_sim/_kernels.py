"""Compiled scalar kernels for the ball-cover dynamics.

Everything that touches the vector field lives here so that the public
per-step operations and the full simulation loop run the exact same
floating-point code. The Python-facing wrappers are in ``model`` and
``integrator``.

State vector layout (length ``N_Y``)::

    0 x_ball   1 v_ball   2 theta   3 omega
    4 work_in            int f_in * v dt
    5 work_in_gross      int |f_in * v| dt
    6 work_out           int f_out * v dt
    7 diss_ball          int c_ball * v**2 dt
    8 diss_cover         int c_cover * omega**2 dt
    9 work_contact       int f_c * d(gap)/dt dt   (net contact power on the pair)
    10 cover_contact     int f_c * l cos(theta) * omega dt
    11 impact_loss       kinetic energy removed by impulses
    12 impact_to_cover   kinetic energy given to the cover by impulses
"""

import numba
import numpy as np

# parameter vector
P_M_BALL, P_K_BALL, P_C_BALL = 0, 1, 2
P_I_COVER, P_K_COVER, P_C_COVER = 3, 4, 5
P_F_IN, P_S_D, P_X_SIZE, P_H, P_L_COVER = 6, 7, 8, 9, 10
P_K_CONTACT, P_C_CONTACT, P_RESTITUTION = 11, 12, 13
N_P = 14

N_Y = 13
N_STATE = 4

SEPARATED = 0
IN_CONTACT = 1

EV_CONTACT_ONSET = 0
EV_SEPARATION = 1
EV_IMPULSE = 2

STATUS_OK = 0
STATUS_NONFINITE = 1
STATUS_EVENT_NONCONVERGED = 2
STATUS_ZENO = 3

_jit = numba.njit(cache=True, nogil=True)


@_jit
def gap_of(y, p):
    return p[P_H] + p[P_L_COVER] * np.sin(y[2]) - y[0] - p[P_X_SIZE]


@_jit
def gap_rate_of(y, p):
    return p[P_L_COVER] * np.cos(y[2]) * y[3] - y[1]


@_jit
def penalty_force(g, gdot, p):
    # unilateral: damping only resists approach, total never pulls
    fc = p[P_K_CONTACT] * (-g) + p[P_C_CONTACT] * max(0.0, -gdot)
    if fc < 0.0:
        fc = 0.0
    return fc


@_jit
def rhs(y, regime, p, dy):
    x = y[0]
    v = y[1]
    th = y[2]
    om = y[3]
    s = np.sin(th)
    c = np.cos(th)
    lc = p[P_L_COVER] * c
    g = p[P_H] + p[P_L_COVER] * s - x - p[P_X_SIZE]
    gd = lc * om - v
    if regime == IN_CONTACT:
        fo = 0.0
        fc = penalty_force(g, gd, p)
    else:
        fo = -p[P_S_D] * x
        fc = 0.0
    fin = p[P_F_IN]
    dy[0] = v
    dy[1] = (fin + fo - p[P_K_BALL] * x - p[P_C_BALL] * v - fc) / p[P_M_BALL]
    dy[2] = om
    dy[3] = (-p[P_K_COVER] * th - p[P_C_COVER] * om + fc * lc) / p[P_I_COVER]
    dy[4] = fin * v
    dy[5] = abs(fin * v)
    dy[6] = fo * v
    dy[7] = p[P_C_BALL] * v * v
    dy[8] = p[P_C_COVER] * om * om
    dy[9] = fc * gd
    dy[10] = fc * lc * om
    dy[11] = 0.0
    dy[12] = 0.0


@_jit
def rk4(y, regime, h, p):
    n = y.shape[0]
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    rhs(y, regime, p, k1)
    for i in range(n):
        tmp[i] = y[i] + 0.5 * h * k1[i]
    rhs(tmp, regime, p, k2)
    for i in range(n):
        tmp[i] = y[i] + 0.5 * h * k2[i]
    rhs(tmp, regime, p, k3)
    for i in range(n):
        tmp[i] = y[i] + h * k3[i]
    rhs(tmp, regime, p, k4)
    out = np.empty(n)
    for i in range(n):
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return out


@_jit
def impulse(y, p):
    """Apply a 1-D restitution impulse between ball and cover tip.

    Returns ``(y_new, approaching, impact_loss, cover_gain)``.
    """
    m = p[P_M_BALL]
    inertia = p[P_I_COVER]
    e = p[P_RESTITUTION]
    lc = p[P_L_COVER] * np.cos(y[2])
    meff = inertia / (lc * lc)
    v = y[1]
    u = lc * y[3]
    out = y.copy()
    if not v > u:
        return out, False, 0.0, 0.0
    msum = m + meff
    mom = m * v + meff * u
    rel = v - u
    v_new = (mom - meff * e * rel) / msum
    u_new = (mom + m * e * rel) / msum
    om_new = u_new / lc
    out[1] = v_new
    out[3] = om_new
    ke_ball0 = 0.5 * m * v * v
    ke_cov0 = 0.5 * inertia * y[3] * y[3]
    ke_ball1 = 0.5 * m * v_new * v_new
    ke_cov1 = 0.5 * inertia * om_new * om_new
    loss = (ke_ball0 + ke_cov0) - (ke_ball1 + ke_cov1)
    gain = ke_cov1 - ke_cov0
    out[11] += loss
    out[12] += gain
    return out, True, loss, gain


@_jit
def _finite(y):
    for i in range(y.shape[0]):
        if not np.isfinite(y[i]):
            return False
    return True


@_jit
def _old_side(g, regime):
    if regime == SEPARATED:
        return g >= 0.0
    return g < 0.0


@_jit
def locate(y0, regime, h, p, tol, max_iter):
    """Bisect the sub-step length in ``(0, h]`` until the gap is within tol.

    The bracket's upper end is kept on the new side of the surface, so the
    returned state already satisfies the post-event regime's sign.
    Returns ``(tau, y_event, converged)``.
    """
    lo = 0.0
    hi = h
    y_hi = rk4(y0, regime, h, p)
    it = 0
    while abs(gap_of(y_hi, p)) > tol:
        if it >= max_iter:
            return hi, y_hi, False
        mid = 0.5 * (lo + hi)
        y_mid = rk4(y0, regime, mid, p)
        if _old_side(gap_of(y_mid, p), regime):
            lo = mid
        else:
            hi = mid
            y_hi = y_mid
        it += 1
    return hi, y_hi, True


@_jit
def _grow(a, n):
    if n < a.shape[0]:
        return a
    shape = (a.shape[0] * 2,) + a.shape[1:]
    b = np.empty(shape, a.dtype)
    b[: a.shape[0]] = a
    return b


@_jit
def simulate_kernel(p, impulse_mode, covered, y0, regime0, t0, dt, n_steps,
                    stride, tol, max_iter):
    n_samples = n_steps // stride + 1
    samples = np.empty((n_samples, N_Y))
    sample_regime = np.empty(n_samples, np.int8)
    ev_t = np.empty(256)
    ev_kind = np.empty(256, np.int8)
    ev_y = np.empty((256, N_Y))
    ev_energy = np.empty(256)
    n_ev = 0
    n_grazing = 0

    y = y0.copy()
    regime = regime0
    samples[0] = y
    sample_regime[0] = regime
    k_sample = 1
    status = STATUS_OK
    last_good = t0

    for n in range(n_steps):
        t_start = t0 + n * dt
        t_stop = t0 + (n + 1) * dt
        t_cur = t_start
        h = dt
        n_in_step = 0
        while True:
            y_new = rk4(y, regime, h, p)
            if not _finite(y_new):
                status = STATUS_NONFINITE
                break
            if not covered:
                y = y_new
                break
            g0 = gap_of(y, p)
            g1 = gap_of(y_new, p)
            if impulse_mode:
                # post-impact states sit within tol inside the surface; count
                # that band as separated so a re-approach cannot tunnel
                crossed = g0 >= -tol and g1 < -tol
            else:
                crossed = _old_side(g0, regime) and not _old_side(g1, regime)
            if not crossed:
                y = y_new
                break
            n_in_step += 1
            if n_in_step > max_iter:
                # impacts accumulating within one step (sustained contact)
                status = STATUS_ZENO
                last_good = t_cur
                break
            # grazing: barely across and already heading back
            gd1 = gap_rate_of(y_new, p)
            if abs(g1) <= tol and ((regime == SEPARATED and gd1 > 0.0)
                                   or (regime == IN_CONTACT and gd1 < 0.0)):
                n_grazing += 1
                y = y_new
                break
            tau, y_ev, ok = locate(y, regime, h, p, tol, max_iter)
            if not ok:
                status = STATUS_EVENT_NONCONVERGED
                last_good = t_cur + tau
                break
            t_ev = t_cur + tau
            energy = 0.0
            if impulse_mode:
                y_ev, approaching, loss, gain = impulse(y_ev, p)
                if not approaching:
                    n_grazing += 1
                    y = y_ev
                    t_cur = t_ev
                    h = t_stop - t_cur
                    if h <= 0.0:
                        break
                    continue
                kind = EV_IMPULSE
                energy = gain
            elif regime == SEPARATED:
                kind = EV_CONTACT_ONSET
                regime = IN_CONTACT
            else:
                kind = EV_SEPARATION
                regime = SEPARATED
            ev_t = _grow(ev_t, n_ev)
            ev_kind = _grow(ev_kind, n_ev)
            ev_y = _grow(ev_y, n_ev)
            ev_energy = _grow(ev_energy, n_ev)
            ev_t[n_ev] = t_ev
            ev_kind[n_ev] = kind
            ev_y[n_ev] = y_ev
            ev_energy[n_ev] = energy
            n_ev += 1
            y = y_ev
            t_cur = t_ev
            h = t_stop - t_cur
            if h <= 0.0:
                break
        if status != STATUS_OK:
            break
        last_good = t_stop
        if (n + 1) % stride == 0:
            samples[k_sample] = y
            sample_regime[k_sample] = regime
            k_sample += 1

    return (samples[:k_sample], sample_regime[:k_sample], ev_t[:n_ev],
            ev_kind[:n_ev], ev_y[:n_ev], ev_energy[:n_ev], status, last_good,
            n_grazing)
