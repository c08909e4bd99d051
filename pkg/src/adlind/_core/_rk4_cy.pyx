# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled classic Runge-Kutta stepper for linear systems dy/dt = L(t) y.

The generator is supplied pre-sampled on the half-step grid: ``L[2*i]`` is
L at step start t_i, ``L[2*i + 1]`` at the midpoint t_i + dt/2, ``L[2*i + 2]``
at t_i + dt.  This removes all Python callbacks from the inner loop.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def rk4_propagate(cnp.complex128_t[:, :, ::1] L, double dt,
                  cnp.complex128_t[::1] y0):
    """Integrate n_steps = (L.shape[0] - 1) // 2 RK4 steps.

    Returns an (n_steps + 1, dim) array holding the state after every step,
    starting with ``y0``.
    """
    cdef Py_ssize_t n_half = L.shape[0]
    cdef Py_ssize_t dim = L.shape[1]
    if n_half < 3 or n_half % 2 == 0:
        raise ValueError("need an odd number (>= 3) of half-step samples")
    if L.shape[2] != dim or y0.shape[0] != dim:
        raise ValueError("sample and state dimensions disagree")

    cdef Py_ssize_t n_steps = (n_half - 1) // 2
    out = np.empty((n_steps + 1, dim), dtype=np.complex128)
    cdef cnp.complex128_t[:, ::1] out_v = out
    cdef cnp.complex128_t[::1] y = np.array(y0, dtype=np.complex128)
    cdef cnp.complex128_t[::1] k1 = np.empty(dim, dtype=np.complex128)
    cdef cnp.complex128_t[::1] k2 = np.empty(dim, dtype=np.complex128)
    cdef cnp.complex128_t[::1] k3 = np.empty(dim, dtype=np.complex128)
    cdef cnp.complex128_t[::1] k4 = np.empty(dim, dtype=np.complex128)
    cdef cnp.complex128_t[::1] tmp = np.empty(dim, dtype=np.complex128)
    cdef Py_ssize_t i, a, b
    cdef cnp.complex128_t acc
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0

    for a in range(dim):
        out_v[0, a] = y[a]

    for i in range(n_steps):
        # k1 = L(t) y
        for a in range(dim):
            acc = 0
            for b in range(dim):
                acc = acc + L[2 * i, a, b] * y[b]
            k1[a] = acc
        # k2 = L(t + dt/2) (y + dt/2 k1)
        for a in range(dim):
            tmp[a] = y[a] + half * k1[a]
        for a in range(dim):
            acc = 0
            for b in range(dim):
                acc = acc + L[2 * i + 1, a, b] * tmp[b]
            k2[a] = acc
        # k3 = L(t + dt/2) (y + dt/2 k2)
        for a in range(dim):
            tmp[a] = y[a] + half * k2[a]
        for a in range(dim):
            acc = 0
            for b in range(dim):
                acc = acc + L[2 * i + 1, a, b] * tmp[b]
            k3[a] = acc
        # k4 = L(t + dt) (y + dt k3)
        for a in range(dim):
            tmp[a] = y[a] + dt * k3[a]
        for a in range(dim):
            acc = 0
            for b in range(dim):
                acc = acc + L[2 * i + 2, a, b] * tmp[b]
            k4[a] = acc
        for a in range(dim):
            y[a] = y[a] + sixth * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a])
            out_v[i + 1, a] = y[a]

    return out
