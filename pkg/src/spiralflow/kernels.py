"""Hot loops for the explicit level-set update, compiled with numba.

Everything here works on plain float64 arrays indexed [i, j] (x first).
The phase enters through precomputed per-node caches of its analytic
gradient and Hessian; only the unknown u is differenced numerically.
Reductions are exact max operations, so results do not depend on the
thread count.
"""

from __future__ import annotations

import numba
import numpy as np
from numba import njit, prange

# The portable threading layer works at any worker count and keeps the
# parallel reductions deterministic.
numba.config.THREADING_LAYER = "workqueue"


@njit(inline="always")
def _node_rhs(u, i, j, tgx, tgy, thxx, thxy, c, eps2, inv_h, inv_h2, upwind):
    uc = u[i, j]
    ue = u[i + 1, j]
    uw = u[i - 1, j]
    un = u[i, j + 1]
    us = u[i, j - 1]

    # Derivatives of v = u - theta; the theta part is analytic.
    px = (ue - uw) * 0.5 * inv_h - tgx
    py = (un - us) * 0.5 * inv_h - tgy
    vxx = (ue - 2.0 * uc + uw) * inv_h2 - thxx
    vyy = (un - 2.0 * uc + us) * inv_h2 + thxx  # theta is harmonic
    vxy = (u[i + 1, j + 1] + u[i - 1, j - 1] - u[i - 1, j + 1] - u[i + 1, j - 1]) \
        * 0.25 * inv_h2 - thxy

    w2 = eps2 + px * px + py * py
    diffusion = vxx + vyy - (px * px * vxx + 2.0 * px * py * vxy + py * py * vyy) / w2

    if upwind:
        dpx = (ue - uc) * inv_h - tgx
        dmx = (uc - uw) * inv_h - tgx
        dpy = (un - uc) * inv_h - tgy
        dmy = (uc - us) * inv_h - tgy
        ax = max(max(dpx, 0.0), max(-dmx, 0.0))
        ay = max(max(dpy, 0.0), max(-dmy, 0.0))
        grad2 = ax * ax + ay * ay
    else:
        grad2 = px * px + py * py

    return diffusion + c * np.sqrt(eps2 + grad2)


@njit(cache=True, parallel=True)
def step_kernel(u, unew, ii, jj, tgx, tgy, thxx, thxy, cvals, eps2, h, dt, upwind):
    """Forward-Euler update of the interior nodes; returns (max|rhs|, max|unew|)."""
    inv_h = 1.0 / h
    inv_h2 = inv_h * inv_h
    max_rhs = 0.0
    max_u = 0.0
    for k in prange(len(ii)):
        i = ii[k]
        j = jj[k]
        rhs = _node_rhs(u, i, j, tgx[i, j], tgy[i, j], thxx[i, j], thxy[i, j],
                        cvals[i, j], eps2, inv_h, inv_h2, upwind)
        val = u[i, j] + dt * rhs
        unew[i, j] = val
        max_rhs = max(max_rhs, abs(rhs))
        max_u = max(max_u, abs(val))
    return max_rhs, max_u


@njit(cache=True, parallel=True)
def rhs_kernel(u, out, ii, jj, tgx, tgy, thxx, thxy, cvals, eps2, h, upwind):
    inv_h = 1.0 / h
    inv_h2 = inv_h * inv_h
    for k in prange(len(ii)):
        i = ii[k]
        j = jj[k]
        out[i, j] = _node_rhs(u, i, j, tgx[i, j], tgy[i, j], thxx[i, j], thxy[i, j],
                              cvals[i, j], eps2, inv_h, inv_h2, upwind)


@njit(cache=True)
def fill_ghosts(u_flat, ghost_flat, corners, weights, src):
    """Neumann ghost fill: probe interpolation plus the phase-slope source."""
    for k in range(len(ghost_flat)):
        acc = 0.0
        for c in range(4):
            acc += weights[k, c] * u_flat[corners[k, c]]
        u_flat[ghost_flat[k]] = acc + src[k]


@njit(cache=True, parallel=True)
def sup_grad_kernel(u, ii, jj, h):
    """Max central-difference |Du| over the interior."""
    inv2h = 0.5 / h
    m2 = 0.0
    for k in prange(len(ii)):
        i = ii[k]
        j = jj[k]
        gx = (u[i + 1, j] - u[i - 1, j]) * inv2h
        gy = (u[i, j + 1] - u[i, j - 1]) * inv2h
        m2 = max(m2, gx * gx + gy * gy)
    return np.sqrt(m2)


@njit(cache=True, parallel=True)
def hessian_sup_kernel(u, ii, jj, thxx, thxy, h):
    """Max spectral norm of the discrete Hessian of u - theta over the interior."""
    inv_h2 = 1.0 / (h * h)
    m = 0.0
    for k in prange(len(ii)):
        i = ii[k]
        j = jj[k]
        uc = u[i, j]
        vxx = (u[i + 1, j] - 2.0 * uc + u[i - 1, j]) * inv_h2 - thxx[i, j]
        vyy = (u[i, j + 1] - 2.0 * uc + u[i, j - 1]) * inv_h2 + thxx[i, j]
        vxy = (u[i + 1, j + 1] + u[i - 1, j - 1] - u[i - 1, j + 1] - u[i + 1, j - 1]) \
            * 0.25 * inv_h2 - thxy[i, j]
        half_tr = 0.5 * (vxx + vyy)
        radius = np.sqrt(0.25 * (vxx - vyy) ** 2 + vxy * vxy)
        m = max(m, abs(half_tr) + radius)
    return m
