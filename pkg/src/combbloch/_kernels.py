"""Numba inner loops for the propagators.

The equations of motion are linear in the state, so the density matrix is
carried as a 16-component real vector (4 populations, then Re/Im of the six
upper-triangle coherences) and the right-hand side is (A + Omega(t)*B) @ y
with constant matrices A, B supplied by the caller.
"""

import numpy as np
from numba import njit

TWO_PI = 2.0 * np.pi

# exp(-x) underflows to exactly 0.0 beyond ~745; past this cut a pulse
# envelope contributes nothing even in exact IEEE arithmetic.
_ENVELOPE_CUT = 750.0


@njit(cache=True)
def rk4_window_matrix(A, B, omegas, h):
    """Propagate the identity through n RK4 steps; returns the step-window map.

    ``omegas`` holds the drive at the 2n+1 stage times (step endpoints and
    midpoints, spacing h/2).  Because the ODE is linear, the returned 16x16
    matrix applied to a state vector equals stepping that vector directly.
    """
    n = (omegas.shape[0] - 1) // 2
    Y = np.eye(16)
    for k in range(n):
        C1 = A + omegas[2 * k] * B
        C2 = A + omegas[2 * k + 1] * B
        C4 = A + omegas[2 * k + 2] * B
        K1 = C1 @ Y
        K2 = C2 @ (Y + (0.5 * h) * K1)
        K3 = C2 @ (Y + (0.5 * h) * K2)
        K4 = C4 @ (Y + h * K3)
        Y = Y + (h / 6.0) * (K1 + 2.0 * (K2 + K3) + K4)
    return Y


@njit(cache=True)
def train_drive(t, peak_r, tau0, period, num_pulses, q, phase_step,
                omega0, carrier_phase):
    """Literal pulse-train Rabi drive at global time t (no window policy).

    Sums envelope * cos(carrier) over the pulses next to t; farther pulses
    are excluded only where their Gaussian underflows to exactly zero, which
    requires period >= 100*tau0 (guaranteed by PulseTrainSpec).  The carrier
    phase of pulse p uses 2*pi*frac(p*q) to stay exact at large p.
    """
    total = 0.0
    if num_pulses > 0:
        p0 = int(np.floor(t / period + 0.5))
        lo = max(0, p0 - 1)
        hi = min(num_pulses, p0 + 2)
        for p in range(lo, hi):
            s = t - p * period
            x = s / tau0
            xx = x * x
            if xx < _ENVELOPE_CUT:
                m = p * q
                ph = (omega0 * s + TWO_PI * (m - np.floor(m))
                      + p * phase_step - carrier_phase)
                total += np.exp(-xx) * np.cos(ph)
    return peak_r * total


@njit(cache=True)
def rk4_uniform_train(A, B, R0, y0, t0, h, n_steps, snap_steps,
                      peak_r, tau0, period, num_pulses, q, phase_step,
                      omega0, carrier_phase):
    """Uniform-step RK4 over the whole span, dead time included.

    ``R0`` is the single-step matrix for zero drive (same RK4 recursion),
    used verbatim whenever all three stage drives vanish exactly.
    ``snap_steps`` (sorted, ints) selects the states to record: entry k means
    "after k steps".  Returns the recorded 16-vectors.
    """
    y = y0.copy()
    ynew = np.empty(16)
    k1 = np.empty(16)
    k2 = np.empty(16)
    k3 = np.empty(16)
    k4 = np.empty(16)
    tmp = np.empty(16)
    out = np.empty((snap_steps.shape[0], 16))
    ptr = 0

    for step in range(n_steps):
        while ptr < snap_steps.shape[0] and snap_steps[ptr] == step:
            out[ptr, :] = y
            ptr += 1
        t = t0 + step * h
        om_a = train_drive(t, peak_r, tau0, period, num_pulses, q,
                           phase_step, omega0, carrier_phase)
        om_b = train_drive(t + 0.5 * h, peak_r, tau0, period, num_pulses, q,
                           phase_step, omega0, carrier_phase)
        om_c = train_drive(t + h, peak_r, tau0, period, num_pulses, q,
                           phase_step, omega0, carrier_phase)

        if om_a == 0.0 and om_b == 0.0 and om_c == 0.0:
            for i in range(16):
                acc = 0.0
                for j in range(16):
                    acc += R0[i, j] * y[j]
                ynew[i] = acc
        else:
            for i in range(16):
                acc = 0.0
                for j in range(16):
                    acc += (A[i, j] + om_a * B[i, j]) * y[j]
                k1[i] = acc
            for i in range(16):
                tmp[i] = y[i] + 0.5 * h * k1[i]
            for i in range(16):
                acc = 0.0
                for j in range(16):
                    acc += (A[i, j] + om_b * B[i, j]) * tmp[j]
                k2[i] = acc
            for i in range(16):
                tmp[i] = y[i] + 0.5 * h * k2[i]
            for i in range(16):
                acc = 0.0
                for j in range(16):
                    acc += (A[i, j] + om_b * B[i, j]) * tmp[j]
                k3[i] = acc
            for i in range(16):
                tmp[i] = y[i] + h * k3[i]
            for i in range(16):
                acc = 0.0
                for j in range(16):
                    acc += (A[i, j] + om_c * B[i, j]) * tmp[j]
                k4[i] = acc
            for i in range(16):
                ynew[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])

        y, ynew = ynew, y

    while ptr < snap_steps.shape[0] and snap_steps[ptr] == n_steps:
        out[ptr, :] = y
        ptr += 1
    return out
