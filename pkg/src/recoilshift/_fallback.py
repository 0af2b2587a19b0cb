"""Pure numpy implementations of the hot kernels.

Mirrors ``_kernels.pyx`` step for step; selected by ``recoilshift._core``
when the compiled extension is missing or ``RECOILSHIFT_PURE`` is set.
"""

import numpy as np

PROFILE_CONSTANT = 0
PROFILE_COSINE = 1
PROFILE_GAUSSIAN = 2

STATUS_OK = 0
STATUS_MAX_STEPS = 1
STATUS_STEP_UNDERFLOW = 2

# Dormand-Prince 5(4)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (
    71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
)


def rabi(profile, omega0, tau, t_center, t):
    dt = t - t_center
    if profile == PROFILE_GAUSSIAN:
        return omega0 * np.exp(-2.0 * dt * dt / (tau * tau))
    if abs(dt) > 0.5 * tau:
        return 0.0
    if profile == PROFILE_COSINE:
        return omega0 * np.cos(np.pi * dt / tau)
    return omega0


def ladder_rhs(y, t, profile, omega0, tau, t_center, detuning, k, z_i, v_i):
    """Derivative of ``y = (e, g)`` stacked as shape (2, rows, L)."""
    om = rabi(profile, omega0, tau, t_center, t)
    out = np.zeros_like(y)
    if om == 0.0:
        return out
    ph = k * (z_i + v_i * t)
    up = np.exp(1j * ph)
    dn = np.exp(-1j * ph)
    ce = -0.25j * om * np.exp(-1j * detuning * t)
    cg = -0.25j * om * np.exp(1j * detuning * t)
    e = y[0]
    g = y[1]
    de = out[0]
    dg = out[1]
    de[:, 1:] += up * g[:, :-1]
    de[:, :-1] += dn * g[:, 1:]
    dg[:, 1:] += up * e[:, :-1]
    dg[:, :-1] += dn * e[:, 1:]
    de *= ce
    dg *= cg
    return out


def integrate_chains(e, g, t0, t1, profile, omega0, tau, t_center, detuning,
                     k, z_i, v_i, rtol, atol, h_init, max_steps):
    """Adaptive DOPRI5 over ``[t0, t1]``; ``e`` and ``g`` are updated in place.

    Returns ``(status, n_accepted, max_edge_population)`` where the edge
    population is the largest total weight found in the first or last
    column at any accepted step.
    """
    y = np.stack([e, g])
    args = (profile, omega0, tau, t_center, detuning, k, z_i, v_i)
    t = t0
    h = min(h_init, t1 - t0)
    f0 = ladder_rhs(y, t, *args)
    n_acc = 0
    n_try = 0
    edge = 0.0
    status = STATUS_OK
    while t < t1:
        if n_try >= max_steps:
            status = STATUS_MAX_STEPS
            break
        n_try += 1
        last = t + h >= t1
        if last:
            h = t1 - t
        ks = [f0]
        for i in range(1, 7):
            yi = y.copy()
            for j, aij in enumerate(_A[i]):
                if aij != 0.0:
                    yi += (h * aij) * ks[j]
            ks.append(ladder_rhs(yi, t + _C[i] * h, *args))
        y_new = yi  # stage 7 argument is the 5th-order solution (FSAL)
        err = np.zeros_like(y)
        for j, ej in enumerate(_E):
            if ej != 0.0:
                err += (h * ej) * ks[j]
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        en = float(np.sqrt(np.mean((np.abs(err) / scale) ** 2)))
        if en <= 1.0:
            t = t1 if last else t + h
            y = y_new
            f0 = ks[6]
            n_acc += 1
            pop = float(np.sum(np.abs(y[:, :, 0]) ** 2 + np.abs(y[:, :, -1]) ** 2))
            if pop > edge:
                edge = pop
            fac = 5.0 if en == 0.0 else min(5.0, max(0.2, 0.9 * en ** -0.2))
        else:
            fac = max(0.2, 0.9 * en ** -0.2)
        h *= fac
        if h < 1e-14 * max(abs(t), 1.0) and t < t1:
            status = STATUS_STEP_UNDERFLOW
            break
    e[...] = y[0]
    g[...] = y[1]
    return status, n_acc, edge


def packet_sum(x, coeff, alpha, beta, a_vals, n_vals):
    """``A(x) = sum_{a,n} coeff[a, n] exp(x (alpha a + beta n))`` for each node.

    ``coeff`` has shape (n_a, n_n); ``alpha`` and ``beta`` are complex scalars.
    Returns shape (len(x),).
    """
    x = np.asarray(x, dtype=float)[:, None]
    ua = np.exp(x * (alpha * np.asarray(a_vals, dtype=float))[None, :])
    vn = np.exp(x * (beta * np.asarray(n_vals, dtype=float))[None, :])
    return np.sum((ua @ coeff) * vn, axis=1)
