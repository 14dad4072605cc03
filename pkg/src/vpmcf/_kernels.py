"""Compiled inner loops for the method-of-lines integrator.

Everything here works on bare float arrays so numba can compile it.  The
arithmetic mirrors :mod:`vpmcf.profile` node for node; elementwise
operations keep mirror-symmetric data exactly symmetric.
"""

import math

import numpy as np
from numba import njit

RUNNING = 0
REACHED_T_END = 1
AXIS_CONTACT = 2
CURVATURE_BLOWUP = 3
STEP_UNDERFLOW = 4

DT_MIN = 1e-16


@njit(cache=True)
def _d1d2(rho, i, dx):
    N = rho.shape[0] - 1
    left = rho[1] if i == 0 else rho[i - 1]
    right = rho[N - 1] if i == N else rho[i + 1]
    d1 = (right - left) / (2.0 * dx)
    d2 = (right - 2.0 * rho[i] + left) / (dx * dx)
    return d1, d2


@njit(cache=True)
def _ipow(x, k):
    r = 1.0
    for _ in range(k):
        r *= x
    return r


@njit(cache=True)
def _node(left, mid, right, inv2dx, invdx2):
    return (right - left) * inv2dx, (right - 2.0 * mid + left) * invdx2


@njit(cache=True)
def rhs(rho, dx, n, w, volume_preserving, out, vbuf):
    """Write d rho/dt into ``out``; return the forcing ``h`` used.

    ``vbuf`` is scratch space for the gradient function.  Uses
    ``H v = -rho''/(1 + rho'^2) + (n - 1)/rho`` so that the weighted mean
    of ``H`` needs no extra divisions.
    """
    N = rho.shape[0] - 1
    inv2dx = 0.5 / dx
    invdx2 = 1.0 / (dx * dx)
    for i in range(N + 1):
        if i == 0:
            d1, d2 = _node(rho[1], rho[0], rho[1], inv2dx, invdx2)
        elif i == N:
            d1, d2 = _node(rho[N - 1], rho[N], rho[N - 1], inv2dx, invdx2)
        else:
            d1, d2 = _node(rho[i - 1], rho[i], rho[i + 1], inv2dx, invdx2)
        s = 1.0 + d1 * d1
        vbuf[i] = math.sqrt(s)
        out[i] = d2 / s - (n - 1) / rho[i]
    h = 0.0
    if volume_preserving:
        num = 0.0
        den = 0.0
        for i in range(N + 1):
            wt = w[i] * _ipow(rho[i], n - 1)
            num -= wt * out[i]
            den += wt * vbuf[i]
        h = num / den
        for i in range(N + 1):
            out[i] += h * vbuf[i]
    return h


@njit(cache=True)
def rk4(rho, dt, dx, n, w, volume_preserving, rho_floor, out, work=None):
    """One classical RK4 step; h is re-evaluated at every stage.

    Returns 0 on success, AXIS_CONTACT if a stage profile reaches the
    floor, CURVATURE_BLOWUP on non-finite values.  ``out`` is only
    meaningful on success.  ``work`` is optional (6, m) scratch.
    """
    m = rho.shape[0]
    if work is None:
        work = np.empty((6, m))
    k1 = work[0]
    k2 = work[1]
    k3 = work[2]
    k4 = work[3]
    stage = work[4]
    vbuf = work[5]
    rhs(rho, dx, n, w, volume_preserving, k1, vbuf)
    for i in range(m):
        stage[i] = rho[i] + 0.5 * dt * k1[i]
    code = _check(stage, rho_floor)
    if code:
        return code
    rhs(stage, dx, n, w, volume_preserving, k2, vbuf)
    for i in range(m):
        stage[i] = rho[i] + 0.5 * dt * k2[i]
    code = _check(stage, rho_floor)
    if code:
        return code
    rhs(stage, dx, n, w, volume_preserving, k3, vbuf)
    for i in range(m):
        stage[i] = rho[i] + dt * k3[i]
    code = _check(stage, rho_floor)
    if code:
        return code
    rhs(stage, dx, n, w, volume_preserving, k4, vbuf)
    for i in range(m):
        out[i] = rho[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return _check(out, rho_floor)


@njit(cache=True)
def _check(rho, rho_floor):
    for i in range(rho.shape[0]):
        r = rho[i]
        if not math.isfinite(r):
            return CURVATURE_BLOWUP
        if r <= rho_floor:
            return AXIS_CONTACT
    return 0


@njit(cache=True)
def volume(rho, n, w, omega):
    s = 0.0
    for i in range(rho.shape[0]):
        s += w[i] * _ipow(rho[i], n)
    return omega / n * s


@njit(cache=True)
def scan(rho, dx, n):
    """Return ``(min(1 + rho'^2), min(rho), max |A|^2)`` in one pass."""
    N = rho.shape[0] - 1
    inv2dx = 0.5 / dx
    invdx2 = 1.0 / (dx * dx)
    min_s = np.inf
    min_r = np.inf
    best = 0.0
    for i in range(N + 1):
        if i == 0:
            d1, d2 = _node(rho[1], rho[0], rho[1], inv2dx, invdx2)
        elif i == N:
            d1, d2 = _node(rho[N - 1], rho[N], rho[N - 1], inv2dx, invdx2)
        else:
            d1, d2 = _node(rho[i - 1], rho[i], rho[i + 1], inv2dx, invdx2)
        s = 1.0 + d1 * d1
        r = rho[i]
        min_s = min(min_s, s)
        min_r = min(min_r, r)
        # k^2 + (n-1) p^2 with k = -d2/s^(3/2), p = 1/(r s^(1/2))
        a2 = (d2 * d2 / (s * s) + (n - 1) / (r * r)) / s
        if not a2 <= best:
            best = a2
    return min_s, min_r, best


@njit(cache=True)
def stable_dt(rho, dx, n, dt_safety):
    min_s, min_r, _ = scan(rho, dx, n)
    return _dt_from(min_s, min_r, dx, n, dt_safety)


@njit(cache=True)
def _dt_from(min_s, min_r, dx, n, dt_safety):
    diffusion = dx * dx * min_s / 2.0
    reaction = min_r * min_r / (4.0 * (n - 1))
    return dt_safety * min(diffusion, reaction)


@njit(cache=True)
def project(rho, V0, n, w, omega):
    V = volume(rho, n, w, omega)
    scale = (V0 / V) ** (1.0 / n)
    for i in range(rho.shape[0]):
        rho[i] *= scale


@njit(cache=True)
def advance(rho, t, t_end, max_steps, dx, n, w, volume_preserving, projection,
            V0, omega, dt_safety, rho_floor, stop_rho_min, stop_A2_max,
            rho_mark=0.0):
    """Take up to ``max_steps`` adaptive steps, stopping early on a terminal
    condition or, still running, once ``min(rho)`` drops below ``rho_mark``.
    ``rho`` is updated in place.

    Returns ``(t, status, steps, dt_last)``.
    """
    m = rho.shape[0]
    new = np.empty(m)
    work = np.empty((6, m))
    dt = 0.0
    tol_end = 1e-12 * max(1.0, abs(t_end))
    min_s, min_r, _ = scan(rho, dx, n)
    for step in range(max_steps):
        remaining = t_end - t
        if remaining <= tol_end:
            # accumulated roundoff left a sliver; count it as reached
            return t_end, REACHED_T_END, step, dt
        dt = _dt_from(min_s, min_r, dx, n, dt_safety)
        last = False
        if dt >= remaining:
            dt = remaining
            last = True
        if dt < DT_MIN:
            return t, STEP_UNDERFLOW, step, dt
        code = rk4(rho, dt, dx, n, w, volume_preserving, rho_floor, new, work)
        if code:
            return t, code, step, dt
        if volume_preserving and projection:
            project(new, V0, n, w, omega)
        for i in range(m):
            rho[i] = new[i]
        t = t_end if last else t + dt
        min_s, min_r, a2 = scan(rho, dx, n)
        if min_r < stop_rho_min:
            return t, AXIS_CONTACT, step + 1, dt
        if a2 > stop_A2_max:
            return t, CURVATURE_BLOWUP, step + 1, dt
        if last:
            return t, REACHED_T_END, step + 1, dt
        if min_r < rho_mark:
            return t, RUNNING, step + 1, dt
    return t, RUNNING, max_steps, dt
