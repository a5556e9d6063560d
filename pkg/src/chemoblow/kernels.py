"""Numba kernels for the time-stepping hot path.

The adaptive Heun loop runs millions of cell updates per simulated run;
keeping it jitted is what makes desk-scale blow-up studies interactive.
All kernels operate on raw arrays extracted from the grid objects; the
radial face powers and reciprocal spacings are precomputed once per run.
"""
from __future__ import annotations

import numpy as np
from numba import njit

# advance() status codes
REACHED_STOP = 0
HIT_THRESHOLD = 1
SAMPLE_TRIGGER = 2
DT_UNDERFLOW = 3
NOT_FINITE = 4


@njit(cache=True)
def rhs_kernel(u, faces, rpow, inv_rpow, inv_dcc, dvol, inv_vol, omega, N,
               kf, alpha, mu, du, w):
    """Fill du with the conservative flux divergence and w with the advective
    face speed f(v_r^2) v_r.  Returns the first non-finite cell index, or -1.

    Face flux (inward-positive convention, boundary faces carry zero flux):
        phi_j = omega r_j^(N-1) [ (u_j - u_{j-1}) / dr - u_up * w_j ]
    with u_up the donor cell with respect to the sign of w_j, and
        v_r(r_j) = mu r_j / N - r_j^(1-N) M_j
    from the running cumulative mass M_j (exact for cell averages).

    When 1 + v_r^2 rounds to 1.0 the limiter factor is exactly 1.0, so the
    pow call is skipped on that (bit-identical) fast path.
    """
    n = u.shape[0]
    w[0] = 0.0
    w[n] = 0.0
    mu_over_n = mu / N
    M = 0.0
    phi_prev = 0.0
    bad = -1
    for j in range(1, n + 1):
        M += u[j - 1] * dvol[j - 1]
        if j < n:
            vr = mu_over_n * faces[j] - M * inv_rpow[j]
            xi1 = 1.0 + vr * vr
            wj = kf * vr if xi1 == 1.0 else kf * xi1 ** (-alpha) * vr
            w[j] = wj
            uup = u[j - 1] if wj > 0.0 else u[j]
            gradu = (u[j] - u[j - 1]) * inv_dcc[j]
            phi = omega * rpow[j] * (gradu - uup * wj)
        else:
            phi = 0.0
        dui = (phi - phi_prev) * inv_vol[j - 1]
        du[j - 1] = dui
        if bad < 0 and not np.isfinite(dui):
            bad = j - 1
        phi_prev = phi
    return bad


@njit(cache=True)
def stable_dt(w, dr_min, cfl_diffusion, cfl_advection):
    """CFL step: min(cfl_d dr^2/2, cfl_a dr / max|f v_r|)."""
    wmax = 0.0
    for j in range(w.shape[0]):
        a = abs(w[j])
        if a > wmax:
            wmax = a
    dt = cfl_diffusion * dr_min * dr_min / 2.0
    if wmax > 0.0:
        dta = cfl_advection * dr_min / wmax
        if dta < dt:
            dt = dta
    return dt


@njit(cache=True)
def advance(u, t, t_stop, linf_stop, linf_sample, max_steps,
            faces, rpow, inv_rpow, inv_dcc, dvol, inv_vol, omega, N,
            kf, alpha, mu,
            dr_min, cfl_diffusion, cfl_advection, dt_min,
            k1, k2, us, w):
    """Advance u in place with adaptive Heun steps until one of:
    t reaches t_stop, max(u) reaches linf_stop (blow-up threshold) or
    linf_sample (sampling trigger), the step budget runs out, dt underflows,
    or a non-finite flux appears.

    Returns (t, dt_last, steps, status, bad_cell).  Steps producing any
    negative cell value (in the predictor stage or the corrected result) are
    rejected and retried with dt/2, which enforces positivity and keeps the
    stage densities admissible for the elliptic solve.
    """
    n = u.shape[0]
    steps = 0
    dt_last = 0.0
    while True:
        bad = rhs_kernel(u, faces, rpow, inv_rpow, inv_dcc, dvol, inv_vol,
                         omega, N, kf, alpha, mu, k1, w)
        if bad >= 0:
            return t, dt_last, steps, NOT_FINITE, bad
        dt = stable_dt(w, dr_min, cfl_diffusion, cfl_advection)
        if dt < dt_min:
            return t, dt_last, steps, DT_UNDERFLOW, -1
        hit_stop = False
        if t + dt >= t_stop:
            dt = t_stop - t
            hit_stop = True
            if dt <= 0.0:
                return t, dt_last, steps, REACHED_STOP, -1
        while True:
            ok = True
            for i in range(n):
                us[i] = u[i] + dt * k1[i]
                if us[i] < 0.0:
                    ok = False
                    break
            if ok:
                bad = rhs_kernel(us, faces, rpow, inv_rpow, inv_dcc, dvol,
                                 inv_vol, omega, N, kf, alpha, mu, k2, w)
                if bad >= 0:
                    return t, dt_last, steps, NOT_FINITE, bad
                half_dt = 0.5 * dt
                for i in range(n):
                    un = u[i] + half_dt * (k1[i] + k2[i])
                    if un < 0.0:
                        ok = False
                        break
                    us[i] = un
            if ok:
                break
            dt *= 0.5
            hit_stop = False
            if dt < dt_min:
                return t, dt_last, steps, DT_UNDERFLOW, -1
        for i in range(n):
            u[i] = us[i]
        t = t_stop if hit_stop else t + dt
        dt_last = dt
        steps += 1
        linf = 0.0
        for i in range(n):
            if u[i] > linf:
                linf = u[i]
        if linf >= linf_stop:
            return t, dt_last, steps, HIT_THRESHOLD, -1
        if hit_stop:
            return t, dt_last, steps, REACHED_STOP, -1
        if linf >= linf_sample or steps >= max_steps:
            return t, dt_last, steps, SAMPLE_TRIGGER, -1
