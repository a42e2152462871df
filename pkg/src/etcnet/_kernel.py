"""Fused fixed-step simulation loop, compiled with numba.

This mirrors, op for op, the reference pipeline in ``sim.step``:
broadcast triggers -> phi counting -> monitoring/active flags ->
weight update (adaptive mode only) -> controls -> Euler integration.
Keeping the arithmetic expressions identical in both paths lets the
test suite assert bit-identical trajectories between them.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def run_loop(
    x,
    c,
    delta,
    epsilon,
    dt,
    m,
    neigh,
    deg,
    leader,
    dyn,
    petc,
    a,
    theta,
    gamma,
    zeta1,
    zeta2,
    psi,
    glo,
    ghi,
    amin,
    amax,
    excl_tol,
    clear_eq3,
    dense,
    x_tr,
    xs_tr,
    u_tr,
    fired_tr,
    a_tr,
    th_tr,
    ga_tr,
    ex_tr,
    record_weights,
):
    """Run m samples in place; returns -1 on success or the step index
    at which a state diverged."""
    n = x.shape[0]
    xs = x.copy()
    mon = np.zeros(n, np.bool_)
    act = np.zeros(n, np.bool_)
    phi = np.zeros((n, n), np.int64)
    excl = np.zeros((n, n), np.bool_)
    asnap = np.empty((n, n))

    for k in range(m):
        # broadcast triggers, evaluated simultaneously on pre-step states;
        # dense mode refreshes every held state each step (no ZOH lag) but
        # keeps the natural event process for the log and phi counters
        for i in range(n):
            f = abs(x[i] - xs[i]) > delta
            if f:
                fired_tr[k, i] = True
            if f or dense:
                xs[i] = x[i]

        # phi counting uses the monitoring flags from the previous step;
        # under the literal clearing rule exclusion only prunes the
        # frequency comparison, so counting is unconditional there
        for i in range(n):
            if mon[i]:
                for jj in range(deg[i]):
                    j = neigh[i, jj]
                    if fired_tr[k, j] and (clear_eq3 or not excl[i, j]):
                        phi[i, j] += 1

        # monitoring / active flags from the post-broadcast store
        for i in range(n):
            viol_d = False
            viol_e = False
            for jj in range(deg[i]):
                j = neigh[i, jj]
                gap = abs(xs[i] - xs[j])
                if gap > delta:
                    viol_d = True
                if gap > epsilon:
                    viol_e = True
            if mon[i] and not viol_d:
                for j in range(n):
                    phi[i, j] = 0
                if not clear_eq3:
                    for j in range(n):
                        excl[i, j] = False
            mon[i] = viol_d
            act[i] = viol_e
        if clear_eq3:
            # alternative clearing rule: drop exclusions whenever the
            # node's own broadcast condition holds (no event this step)
            for i in range(n):
                if not fired_tr[k, i]:
                    for j in range(n):
                        excl[i, j] = False

        # adaptive weight update
        if petc:
            for i in range(n):
                if not dyn[i]:
                    continue
                if act[i]:
                    for jj in range(deg[i]):
                        j = neigh[i, jj]
                        if gamma[i, j] <= glo + excl_tol:
                            excl[i, j] = True
                for jj in range(deg[i]):
                    j = neigh[i, jj]
                    if excl[i, j] and not clear_eq3:
                        continue
                    target = ghi
                    for rr in range(deg[i]):
                        r = neigh[i, rr]
                        if r != j and not excl[i, r] and phi[i, j] < phi[i, r]:
                            target = glo
                            break
                    g = gamma[i, j]
                    gamma[i, j] = g - dt * psi * (g - target)
                for jj in range(deg[i]):
                    j = neigh[i, jj]
                    if act[i]:
                        rho = gamma[i, j] * amax
                    else:
                        rho = amin
                    th_old = theta[i, j]
                    a[i, j] = a[i, j] - dt * zeta1 * (a[i, j] - th_old)
                    theta[i, j] = th_old - dt * zeta2 * (th_old - rho)
            for i in range(n):
                if leader[i] != 0.0 or deg[i] != 1:
                    continue
                j = neigh[i, 0]
                mx = a[j, neigh[j, 0]]
                for rr in range(1, deg[j]):
                    r = neigh[j, rr]
                    if a[j, r] > mx:
                        mx = a[j, r]
                a[i, j] = mx
            for i in range(n):
                for j in range(n):
                    asnap[i, j] = a[i, j]
            for i in range(n):
                if leader[i] != 0.0:
                    for jj in range(deg[i]):
                        j = neigh[i, jj]
                        a[i, j] = asnap[j, i]

        # controls
        ck = c[k]
        for i in range(n):
            s = 0.0
            for jj in range(deg[i]):
                j = neigh[i, jj]
                s += a[i, j] * ((xs[i] - xs[j]) + leader[i] * (xs[i] - ck))
            u_tr[k, i] = -s

        for i in range(n):
            x_tr[k, i] = x[i]
            xs_tr[k, i] = xs[i]
        if record_weights:
            for i in range(n):
                for j in range(n):
                    a_tr[k, i, j] = a[i, j]
                    th_tr[k, i, j] = theta[i, j]
                    ga_tr[k, i, j] = gamma[i, j]
                    ex_tr[k, i, j] = excl[i, j]

        if k < m - 1:
            for i in range(n):
                x[i] = x[i] + dt * u_tr[k, i]
                if not np.isfinite(x[i]) or abs(x[i]) > 1e9:
                    return k
    return -1
