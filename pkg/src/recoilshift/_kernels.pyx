# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernel: ladder integration.

Same algorithm and step control as ``_fallback``; the two agree to
rounding, not bit for bit.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, exp, sqrt, fabs, M_PI

cnp.import_array()

DEF PROFILE_CONSTANT = 0
DEF PROFILE_COSINE = 1
DEF PROFILE_GAUSSIAN = 2

cdef double[7] C_ = [0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0]
cdef double[7][6] A_ = [
    [0, 0, 0, 0, 0, 0],
    [1.0 / 5, 0, 0, 0, 0, 0],
    [3.0 / 40, 9.0 / 40, 0, 0, 0, 0],
    [44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0],
    [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0],
    [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0],
    [35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84],
]
cdef double[7] E_ = [71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                     -17253.0 / 339200, 22.0 / 525, -1.0 / 40]


cdef inline double _rabi(int profile, double omega0, double tau, double tc, double t) nogil:
    cdef double dt = t - tc
    if profile == PROFILE_GAUSSIAN:
        return omega0 * exp(-2.0 * dt * dt / (tau * tau))
    if fabs(dt) > 0.5 * tau:
        return 0.0
    if profile == PROFILE_COSINE:
        return omega0 * cos(M_PI * dt / tau)
    return omega0


cdef void _rhs(double complex[:, :, ::1] y, double complex[:, :, ::1] out, double t,
               int profile, double omega0, double tau, double tc, double detuning,
               double k, double z_i, double v_i) nogil:
    cdef Py_ssize_t rows = y.shape[1]
    cdef Py_ssize_t L = y.shape[2]
    cdef Py_ssize_t r, j
    cdef double om = _rabi(profile, omega0, tau, tc, t)
    cdef double ph
    cdef double complex up, dn, ce, cg, se, sg
    if om == 0.0:
        for r in range(rows):
            for j in range(L):
                out[0, r, j] = 0.0
                out[1, r, j] = 0.0
        return
    ph = k * (z_i + v_i * t)
    up = cos(ph) + 1j * sin(ph)
    dn = cos(ph) - 1j * sin(ph)
    # -i om/4 exp(-i detuning t) and its partner
    ce = 0.25 * om * (-sin(detuning * t) - 1j * cos(detuning * t))
    cg = 0.25 * om * (sin(detuning * t) - 1j * cos(detuning * t))
    for r in range(rows):
        for j in range(L):
            se = 0.0
            sg = 0.0
            if j > 0:
                se = se + up * y[1, r, j - 1]
                sg = sg + up * y[0, r, j - 1]
            if j < L - 1:
                se = se + dn * y[1, r, j + 1]
                sg = sg + dn * y[0, r, j + 1]
            out[0, r, j] = ce * se
            out[1, r, j] = cg * sg


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def integrate_chains(cnp.ndarray e, cnp.ndarray g, double t0, double t1, int profile,
                     double omega0, double tau, double t_center, double detuning,
                     double k, double z_i, double v_i, double rtol, double atol,
                     double h_init, long max_steps):
    """Adaptive DOPRI5 over ``[t0, t1]``; ``e`` and ``g`` are updated in place.

    Returns ``(status, n_accepted, max_edge_population)``.
    """
    cdef Py_ssize_t rows = e.shape[0]
    cdef Py_ssize_t L = e.shape[1]
    y_arr = np.ascontiguousarray(np.stack([e, g]), dtype=np.complex128)
    cdef double complex[:, :, ::1] y = y_arr
    cdef double complex[:, :, ::1] yi = np.empty_like(y_arr)
    cdef double complex[:, :, :, ::1] ks = np.empty((7, 2, rows, L), dtype=np.complex128)
    cdef double complex[:, :, ::1] tmp
    cdef double t = t0
    cdef double h = t1 - t0
    cdef double en, sc, ay, an, fac, pop, edge = 0.0
    cdef double complex err, acc
    cdef long n_acc = 0, n_try = 0
    cdef int status = 0
    cdef int last, i, jj, s
    cdef Py_ssize_t r, j
    cdef Py_ssize_t ncomp = 2 * rows * L
    if h_init < h:
        h = h_init
    with nogil:
        _rhs(y, ks[0], t, profile, omega0, tau, t_center, detuning, k, z_i, v_i)
        while t < t1:
            if n_try >= max_steps:
                status = 1
                break
            n_try += 1
            last = t + h >= t1
            if last:
                h = t1 - t
            for i in range(1, 7):
                for s in range(2):
                    for r in range(rows):
                        for j in range(L):
                            acc = y[s, r, j]
                            for jj in range(i):
                                if A_[i][jj] != 0.0:
                                    acc = acc + (h * A_[i][jj]) * ks[jj, s, r, j]
                            yi[s, r, j] = acc
                _rhs(yi, ks[i], t + C_[i] * h, profile, omega0, tau, t_center, detuning, k, z_i, v_i)
            en = 0.0
            for s in range(2):
                for r in range(rows):
                    for j in range(L):
                        err = 0.0
                        for jj in range(7):
                            if E_[jj] != 0.0:
                                err = err + (h * E_[jj]) * ks[jj, s, r, j]
                        ay = sqrt(_abs2(y[s, r, j]))
                        an = sqrt(_abs2(yi[s, r, j]))
                        sc = atol + rtol * (ay if ay > an else an)
                        en += _abs2(err) / (sc * sc)
            en = sqrt(en / ncomp)
            if en <= 1.0:
                t = t1 if last else t + h
                for s in range(2):
                    for r in range(rows):
                        for j in range(L):
                            y[s, r, j] = yi[s, r, j]
                            ks[0, s, r, j] = ks[6, s, r, j]
                n_acc += 1
                pop = 0.0
                for s in range(2):
                    for r in range(rows):
                        pop += _abs2(y[s, r, 0]) + _abs2(y[s, r, L - 1])
                if pop > edge:
                    edge = pop
                if en == 0.0:
                    fac = 5.0
                else:
                    fac = 0.9 * en ** -0.2
                    if fac > 5.0:
                        fac = 5.0
                    if fac < 0.2:
                        fac = 0.2
            else:
                fac = 0.9 * en ** -0.2
                if fac < 0.2:
                    fac = 0.2
            h *= fac
            if t < t1 and h < 1e-14 * (fabs(t) if fabs(t) > 1.0 else 1.0):
                status = 2
                break
    e[...] = y_arr[0]
    g[...] = y_arr[1]
    return status, n_acc, edge
