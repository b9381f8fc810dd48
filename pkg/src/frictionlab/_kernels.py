"""Numba kernels for the Monte Carlo hot loops.

All kernels draw from per-path Philox4x32-10 streams (counter-based; the key
is the per-path stream id, the counter advances along the path), so results
are independent of thread count and scheduling.  Normals come from the polar
(Marsaglia) transform of Philox lanes.

The 1-d process is simulated in its natural-scale coordinate, where the
driftless regularized dynamics is exactly a standard Wiener process; exits
and clocks are detected against precomputed scale levels.  State positions
are mapped back outside the kernels.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

U32 = np.uint32
U64 = np.uint64

_M0 = U64(0xD2511F53)
_M1 = U64(0xCD9E8D57)
_W0 = U32(0x9E3779B9)
_W1 = U32(0xBB67AE85)
_INV32 = 2.3283064365386963e-10  # 2**-32

SIDE_LOWER = 0
SIDE_UPPER = 1
SIDE_NONE = 2


@njit(inline="always", fastmath=True)
def _philox4(ctr, k0, k1):
    c0 = U32(ctr)
    c1 = U32(ctr >> U64(32))
    c2 = U32(0)
    c3 = U32(0)
    kk0 = k0
    kk1 = k1
    for _ in range(10):
        p0 = _M0 * U64(c0)
        p1 = _M1 * U64(c2)
        n0 = U32(p1 >> U64(32)) ^ c1 ^ kk0
        n1 = U32(p1)
        n2 = U32(p0 >> U64(32)) ^ c3 ^ kk1
        n3 = U32(p0)
        c0 = n0
        c1 = n1
        c2 = n2
        c3 = n3
        kk0 = U32(kk0 + _W0)
        kk1 = U32(kk1 + _W1)
    return c0, c1, c2, c3


@njit(inline="always", fastmath=True)
def _norm2(ctr, k0, k1):
    """Two standard normals by the polar method; returns (z0, z1, new_ctr)."""
    while True:
        c0, c1, c2, c3 = _philox4(ctr, k0, k1)
        ctr += U64(1)
        v0 = 2.0 * ((np.float64(c0) + 0.5) * _INV32) - 1.0
        v1 = 2.0 * ((np.float64(c1) + 0.5) * _INV32) - 1.0
        r2 = v0 * v0 + v1 * v1
        if r2 < 1.0:
            f = np.sqrt(-2.0 * np.log(r2) / r2)
            return v0 * f, v1 * f, ctr
        v0 = 2.0 * ((np.float64(c2) + 0.5) * _INV32) - 1.0
        v1 = 2.0 * ((np.float64(c3) + 0.5) * _INV32) - 1.0
        r2 = v0 * v0 + v1 * v1
        if r2 < 1.0:
            f = np.sqrt(-2.0 * np.log(r2) / r2)
            return v0 * f, v1 * f, ctr


@njit(inline="always")
def _path_key(p, k0b, k1b):
    return U32(U64(p)) ^ k0b, U32(U64(p) >> U64(32)) ^ k1b


@njit(parallel=True, fastmath=True, cache=True)
def draw_normals(n, k0, k1):
    """n standard normals from the stream (k0, k1), for statistical tests."""
    out = np.empty(n, np.float64)
    half = (n + 1) // 2
    for i in prange(half):
        z0, z1, _ = _norm2(U64(i), k0, k1)
        out[2 * i] = z0
        if 2 * i + 1 < n:
            out[2 * i + 1] = z1
    return out


@njit(parallel=True, fastmath=True, cache=True)
def exit_1d(n_paths, x0, lo, hi, dt, max_steps, k0b, k1b):
    """First exit of per-path Wiener walks from (lo, hi).

    Returns (sides, taus): side 0/1 for lower/upper, 2 if censored at
    max_steps; tau by linear interpolation of the crossing step.
    """
    sides = np.full(n_paths, SIDE_NONE, np.uint8)
    taus = np.empty(n_paths, np.float64)
    sqdt = np.sqrt(dt)
    for p in prange(n_paths):
        k0, k1 = _path_key(p, k0b, k1b)
        x = x0
        ctr = U64(0)
        step = np.int64(0)
        side = np.uint8(SIDE_NONE)
        tau = max_steps * dt
        while step < max_steps:
            z0, z1, ctr = _norm2(ctr, k0, k1)
            xn = x + sqdt * z0
            if xn <= lo or xn >= hi:
                lvl = lo if xn <= lo else hi
                tau = (np.float64(step) + (lvl - x) / (xn - x)) * dt
                side = np.uint8(SIDE_LOWER if xn <= lo else SIDE_UPPER)
                break
            x = xn
            xn = x + sqdt * z1
            if xn <= lo or xn >= hi:
                lvl = lo if xn <= lo else hi
                tau = (np.float64(step + 1) + (lvl - x) / (xn - x)) * dt
                side = np.uint8(SIDE_LOWER if xn <= lo else SIDE_UPPER)
                break
            x = xn
            step += 2
        sides[p] = side
        taus[p] = tau
    return sides, taus


@njit(parallel=True, fastmath=True, cache=True)
def marginal_1d(n_paths, x0, lo, hi, dt, n_steps, k0b, k1b):
    """Natural-scale positions at t = n_steps*dt, frozen at lo/hi on absorption."""
    out = np.empty(n_paths, np.float64)
    sqdt = np.sqrt(dt)
    for p in prange(n_paths):
        k0, k1 = _path_key(p, k0b, k1b)
        x = x0
        ctr = U64(0)
        step = np.int64(0)
        while step < n_steps:
            z0, z1, ctr = _norm2(ctr, k0, k1)
            x += sqdt * z0
            if x <= lo or x >= hi:
                x = lo if x <= lo else hi
                break
            step += 1
            if step >= n_steps:
                break
            x += sqdt * z1
            if x <= lo or x >= hi:
                x = lo if x <= lo else hi
                break
            step += 1
        out[p] = x
    return out


@njit(inline="always", fastmath=True)
def _lam_at(x, x_lo, inv_h, lam_tab):
    t = (x - x_lo) * inv_h
    i = np.int64(t)
    if i < 0:
        i = 0
    elif i > lam_tab.size - 2:
        i = lam_tab.size - 2
    f = t - np.float64(i)
    return lam_tab[i] * (1.0 - f) + lam_tab[i + 1] * f


@njit(parallel=True, fastmath=True, cache=True)
def exit_2d(n_paths, x0, theta0, lo, hi, dt, max_steps, eps,
            x_lo, inv_h, lam_tab, ky0, ky1, kt0, kt1):
    """Cylinder process until the radial natural-scale walk exits (lo, hi).

    The angular component integrates independent per-step Gaussian
    increments of variance dt/(lam+eps)^2; the clock accumulates the same
    integrand.  Returns (sides, taus, thetas mod 2pi, clocks).
    """
    sides = np.full(n_paths, SIDE_NONE, np.uint8)
    taus = np.empty(n_paths, np.float64)
    thetas = np.empty(n_paths, np.float64)
    clocks = np.empty(n_paths, np.float64)
    sqdt = np.sqrt(dt)
    two_pi = 6.283185307179586
    for p in prange(n_paths):
        ka0, ka1 = _path_key(p, ky0, ky1)
        kb0, kb1 = _path_key(p, kt0, kt1)
        x = x0
        th = theta0
        clock = 0.0
        ctra = U64(0)
        ctrb = U64(0)
        step = np.int64(0)
        side = np.uint8(SIDE_NONE)
        tau = max_steps * dt
        while step < max_steps:
            zy0, zy1, ctra = _norm2(ctra, ka0, ka1)
            zt0, zt1, ctrb = _norm2(ctrb, kb0, kb1)
            # substep A
            noise = 1.0 / (_lam_at(x, x_lo, inv_h, lam_tab) + eps)
            xn = x + sqdt * zy0
            if xn <= lo or xn >= hi:
                lvl = lo if xn <= lo else hi
                frac = (lvl - x) / (xn - x)
                tau = (np.float64(step) + frac) * dt
                clock += frac * dt * noise * noise
                th += np.sqrt(frac * dt) * noise * zt0
                side = np.uint8(SIDE_LOWER if xn <= lo else SIDE_UPPER)
                break
            clock += dt * noise * noise
            th += sqdt * noise * zt0
            x = xn
            step += 1
            if step >= max_steps:
                break
            # substep B
            noise = 1.0 / (_lam_at(x, x_lo, inv_h, lam_tab) + eps)
            xn = x + sqdt * zy1
            if xn <= lo or xn >= hi:
                lvl = lo if xn <= lo else hi
                frac = (lvl - x) / (xn - x)
                tau = (np.float64(step) + frac) * dt
                clock += frac * dt * noise * noise
                th += np.sqrt(frac * dt) * noise * zt1
                side = np.uint8(SIDE_LOWER if xn <= lo else SIDE_UPPER)
                break
            clock += dt * noise * noise
            th += sqdt * noise * zt1
            x = xn
            step += 1
        sides[p] = side
        taus[p] = tau
        thetas[p] = th % two_pi
        clocks[p] = clock
    return sides, taus, thetas, clocks


@njit(parallel=True, fastmath=True, cache=True)
def marginal_2d(n_paths, x0, theta0, lo, hi, dt, n_steps, eps,
                x_lo, inv_h, lam_tab, ky0, ky1, kt0, kt1):
    """Cylinder state at t = n_steps*dt, frozen on radial absorption.

    Returns (xs, thetas mod 2pi, clocks, absorbed sides).
    """
    xs = np.empty(n_paths, np.float64)
    thetas = np.empty(n_paths, np.float64)
    clocks = np.empty(n_paths, np.float64)
    sides = np.full(n_paths, SIDE_NONE, np.uint8)
    sqdt = np.sqrt(dt)
    two_pi = 6.283185307179586
    for p in prange(n_paths):
        ka0, ka1 = _path_key(p, ky0, ky1)
        kb0, kb1 = _path_key(p, kt0, kt1)
        x = x0
        th = theta0
        clock = 0.0
        ctra = U64(0)
        ctrb = U64(0)
        step = np.int64(0)
        side = np.uint8(SIDE_NONE)
        while step < n_steps:
            zy0, zy1, ctra = _norm2(ctra, ka0, ka1)
            zt0, zt1, ctrb = _norm2(ctrb, kb0, kb1)
            noise = 1.0 / (_lam_at(x, x_lo, inv_h, lam_tab) + eps)
            xn = x + sqdt * zy0
            if xn <= lo or xn >= hi:
                frac = ((lo if xn <= lo else hi) - x) / (xn - x)
                clock += frac * dt * noise * noise
                th += np.sqrt(frac * dt) * noise * zt0
                x = lo if xn <= lo else hi
                side = np.uint8(SIDE_LOWER if x == lo else SIDE_UPPER)
                break
            clock += dt * noise * noise
            th += sqdt * noise * zt0
            x = xn
            step += 1
            if step >= n_steps:
                break
            noise = 1.0 / (_lam_at(x, x_lo, inv_h, lam_tab) + eps)
            xn = x + sqdt * zy1
            if xn <= lo or xn >= hi:
                frac = ((lo if xn <= lo else hi) - x) / (xn - x)
                clock += frac * dt * noise * noise
                th += np.sqrt(frac * dt) * noise * zt1
                x = lo if xn <= lo else hi
                side = np.uint8(SIDE_LOWER if x == lo else SIDE_UPPER)
                break
            clock += dt * noise * noise
            th += sqdt * noise * zt1
            x = xn
            step += 1
        xs[p] = x
        thetas[p] = th % two_pi
        clocks[p] = clock
        sides[p] = side
    return xs, thetas, clocks, sides


_NO_CROSS = 1.0e308


@njit(inline="always", fastmath=True)
def _first_cross(x, xn, l1, l2):
    """Nearest level among l1, l2 crossed by the move x -> xn.

    Returns (level, distance from x); distance >= _NO_CROSS means no cross.
    NaN sentinels are not used because fastmath assumes them away.
    """
    best = 0.0
    bestd = _NO_CROSS
    for lvl in (l1, l2):
        if (x < lvl and xn >= lvl) or (x > lvl and xn <= lvl):
            d = np.abs(lvl - x)
            if d < bestd:
                bestd = d
                best = lvl
    return best, bestd


@njit(parallel=True, fastmath=True, cache=True)
def alpha_beta(n_paths, x0, xc_min, xc_max, xb_min, xb_max, xg_lo, xg_hi,
               dt, max_steps, k0b, k1b):
    """Count band re-entry cycles before the walk leaves (xg_lo, xg_hi).

    Phase 0 watches the band-edge pair (xc_*), phase 1 the re-entry pair
    (xb_*); every level event inside one step segment is processed in path
    order.  Returns (alpha1 flags, beta1 flags, cycle counts n).
    """
    alpha1 = np.zeros(n_paths, np.uint8)
    beta1 = np.zeros(n_paths, np.uint8)
    counts = np.zeros(n_paths, np.int64)
    sqdt = np.sqrt(dt)
    for p in prange(n_paths):
        k0, k1 = _path_key(p, k0b, k1b)
        x = x0
        ctr = U64(0)
        step = np.int64(0)
        phase = 0
        n_alpha = np.int64(0)
        got_beta1 = False
        done = False
        while step < max_steps and not done:
            z0, z1, ctr = _norm2(ctr, k0, k1)
            for half in range(2):
                z = z0 if half == 0 else z1
                xn = x + sqdt * z
                cur = x
                while True:
                    sig, sig_d = _first_cross(cur, xn, xg_lo, xg_hi)
                    if phase == 0:
                        tgt, tgt_d = _first_cross(cur, xn, xc_min, xc_max)
                    else:
                        tgt, tgt_d = _first_cross(cur, xn, xb_min, xb_max)
                    if sig_d < _NO_CROSS and sig_d <= tgt_d:
                        done = True
                        break
                    if tgt_d >= _NO_CROSS:
                        break
                    if phase == 0:
                        n_alpha += 1
                        phase = 1
                    else:
                        if n_alpha == 1:
                            got_beta1 = True
                        phase = 0
                    cur = tgt
                if done:
                    break
                x = xn
                step += 1
                if step >= max_steps:
                    break
        alpha1[p] = np.uint8(1) if n_alpha >= 1 else np.uint8(0)
        beta1[p] = np.uint8(1) if got_beta1 else np.uint8(0)
        counts[p] = n_alpha
    return alpha1, beta1, counts


@njit(parallel=True, fastmath=True, cache=True)
def tau_sigma(n_paths, x0, xt_min, xt_max, xg_lo, xg_hi, xa_lo, xa_hi,
              dt, max_steps, k0b, k1b):
    """Alternating visits to the collar pair (xt_*) and the band exterior.

    Counts tau events (collar hits after time 0) and sigma events (hits of
    the exterior levels xg_*) until absorption at xa_lo/xa_hi.  Returns
    (n_tau, n_sigma, absorbed side with 2 = censored).
    """
    n_tau = np.zeros(n_paths, np.int64)
    n_sigma = np.zeros(n_paths, np.int64)
    absorbed = np.full(n_paths, SIDE_NONE, np.uint8)
    sqdt = np.sqrt(dt)
    for p in prange(n_paths):
        k0, k1 = _path_key(p, k0b, k1b)
        x = x0
        ctr = U64(0)
        step = np.int64(0)
        # phase 0: seeking a collar (tau) event; phase 1: seeking exterior (sigma)
        phase = 1
        if x <= xg_lo or x >= xg_hi:
            n_sigma[p] = 1  # sigma_0 = 0 when starting in the exterior
            phase = 0
        done = False
        while step < max_steps and not done:
            z0, z1, ctr = _norm2(ctr, k0, k1)
            for half in range(2):
                z = z0 if half == 0 else z1
                xn = x + sqdt * z
                cur = x
                while True:
                    absl, abs_d = _first_cross(cur, xn, xa_lo, xa_hi)
                    if phase == 0:
                        tgt, tgt_d = _first_cross(cur, xn, xt_min, xt_max)
                    else:
                        tgt, tgt_d = _first_cross(cur, xn, xg_lo, xg_hi)
                    if abs_d < _NO_CROSS and abs_d <= tgt_d:
                        absorbed[p] = np.uint8(SIDE_LOWER if absl == xa_lo else SIDE_UPPER)
                        done = True
                        break
                    if tgt_d >= _NO_CROSS:
                        break
                    if phase == 0:
                        n_tau[p] += 1
                        phase = 1
                    else:
                        n_sigma[p] += 1
                        phase = 0
                    cur = tgt
                if done:
                    break
                x = xn
                step += 1
                if step >= max_steps:
                    break
    return n_tau, n_sigma, absorbed
