"""Pure-numpy fallback for the RK4 stepper (same contract as the extension)."""

import numpy as np


def rk4_propagate(L, dt, y0):
    """Integrate dy/dt = L(t) y over (L.shape[0] - 1) // 2 uniform RK4 steps.

    ``L`` holds the generator sampled at every half step (odd leading
    dimension); returns the state after each full step, including ``y0``.
    """
    L = np.ascontiguousarray(L, dtype=np.complex128)
    if L.ndim != 3 or L.shape[0] < 3 or L.shape[0] % 2 == 0:
        raise ValueError("need an odd number (>= 3) of half-step samples")
    dim = L.shape[1]
    y = np.array(y0, dtype=np.complex128)
    if L.shape[2] != dim or y.shape != (dim,):
        raise ValueError("sample and state dimensions disagree")

    n_steps = (L.shape[0] - 1) // 2
    out = np.empty((n_steps + 1, dim), dtype=np.complex128)
    out[0] = y
    half = 0.5 * dt
    for i in range(n_steps):
        k1 = L[2 * i] @ y
        k2 = L[2 * i + 1] @ (y + half * k1)
        k3 = L[2 * i + 1] @ (y + half * k2)
        k4 = L[2 * i + 2] @ (y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    return out
