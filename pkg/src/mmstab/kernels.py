"""Hot numerical kernels.

Everything here is written loop-wise over contiguous float64 arrays so a
single source serves both execution paths: jitted via numba when
available, plain Python/numpy otherwise (see `_accel`). Callers are the
wrapper modules (`linalg`, `pmatrix`, `flow`), which own validation,
tolerance policy and error types; kernels communicate failure through
integer status codes only.
"""

import math

import numpy as np

from ._accel import njit

#: machine epsilon used by the deflation criterion
_EPS = 2.220446049250313e-16


@njit
def hessenberg_reduce(a):
    """Reduce a square matrix to upper Hessenberg form, in place.

    Householder similarity transforms; the input is overwritten with a
    matrix orthogonally similar to it whose entries below the first
    subdiagonal are exactly zero.
    """
    n = a.shape[0]
    v = np.zeros(n)
    for k in range(n - 2):
        # Householder vector annihilating column k below the subdiagonal.
        tail = 0.0
        for i in range(k + 2, n):
            tail += a[i, k] * a[i, k]
        if tail == 0.0:
            continue
        alpha = math.sqrt(tail + a[k + 1, k] * a[k + 1, k])
        if a[k + 1, k] > 0.0:
            alpha = -alpha
        for i in range(n):
            v[i] = 0.0
        for i in range(k + 1, n):
            v[i] = a[i, k]
        v[k + 1] -= alpha
        vnorm2 = 0.0
        for i in range(k + 1, n):
            vnorm2 += v[i] * v[i]
        if vnorm2 == 0.0:
            continue
        # Left application: rows k+1..n-1 of columns k..n-1.
        for j in range(k, n):
            s = 0.0
            for i in range(k + 1, n):
                s += v[i] * a[i, j]
            s = 2.0 * s / vnorm2
            for i in range(k + 1, n):
                a[i, j] -= s * v[i]
        # Right application: columns k+1..n-1 of all rows.
        for i in range(n):
            s = 0.0
            for j in range(k + 1, n):
                s += a[i, j] * v[j]
            s = 2.0 * s / vnorm2
            for j in range(k + 1, n):
                a[i, j] -= s * v[j]
        a[k + 1, k] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0
    return a


@njit
def hqr_eigvals(a, budget):
    """Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.

    Destroys `a`. Returns (wr, wi, status) with status 0 on success and
    1 when the global iteration budget is exhausted. Deflation uses the
    criterion |a[i, i-1]| <= eps * (|a[i-1, i-1]| + |a[i, i]|); trailing
    2x2 blocks are resolved by the quadratic formula; an exceptional
    (ad hoc) shift is injected every 10 iterations spent on one block.
    """
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = 0.0
    for i in range(n):
        for j in range(n):
            anorm += abs(a[i, j])
    nn = n - 1
    t = 0.0
    total = 0
    p = 0.0
    q = 0.0
    r = 0.0
    while nn >= 0:
        its = 0
        while True:
            # Find the smallest l with a negligible subdiagonal entry.
            l = 0
            for ll in range(nn, 0, -1):
                s = abs(a[ll - 1, ll - 1]) + abs(a[ll, ll])
                if s == 0.0:
                    s = anorm
                if abs(a[ll, ll - 1]) <= _EPS * s:
                    a[ll, ll - 1] = 0.0
                    l = ll
                    break
            x = a[nn, nn]
            if l == nn:
                # One real eigenvalue has converged.
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                # Trailing 2x2 block: quadratic formula.
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    if p >= 0.0:
                        z = p + z
                    else:
                        z = p - z
                    wr[nn - 1] = x + z
                    wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = 0.0
                    wi[nn] = 0.0
                else:
                    wr[nn - 1] = x + p
                    wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break
            if total >= budget:
                return wr, wi, 1
            if its > 0 and its % 10 == 0:
                # Exceptional shift to break symmetry-induced stalling.
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                y = 0.75 * s
                x = y
                w = -0.4375 * s * s
            its += 1
            total += 1
            # Locate a starting row m for the implicit double shift.
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                if s != 0.0:
                    p /= s
                    q /= s
                    r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                vv = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u <= _EPS * vv:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
            for i in range(m + 3, nn + 1):
                a[i, i - 3] = 0.0
            # Double QR sweep over rows l..nn.
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = 0.0
                    if k != nn - 1:
                        r = a[k + 2, k - 1]
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.sqrt(p * p + q * q + r * r)
                if p < 0.0:
                    s = -s
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                # Row modification.
                for j in range(k, nn + 1):
                    pp = a[k, j] + q * a[k + 1, j]
                    if k != nn - 1:
                        pp += r * a[k + 2, j]
                        a[k + 2, j] -= pp * z
                    a[k + 1, j] -= pp * y
                    a[k, j] -= pp * x
                # Column modification.
                mmin = k + 3
                if nn < mmin:
                    mmin = nn
                for i in range(l, mmin + 1):
                    pp = x * a[i, k] + y * a[i, k + 1]
                    if k != nn - 1:
                        pp += z * a[i, k + 2]
                        a[i, k + 2] -= pp * r
                    a[i, k + 1] -= pp * q
                    a[i, k] -= pp
    return wr, wi, 0


@njit
def lu_det(a):
    """Determinant via LU with partial pivoting; destroys `a`."""
    n = a.shape[0]
    det = 1.0
    for k in range(n):
        piv = k
        maxv = abs(a[k, k])
        for i in range(k + 1, n):
            if abs(a[i, k]) > maxv:
                maxv = abs(a[i, k])
                piv = i
        if maxv == 0.0:
            return 0.0
        if piv != k:
            for j in range(n):
                tmp = a[k, j]
                a[k, j] = a[piv, j]
                a[piv, j] = tmp
            det = -det
        pivval = a[k, k]
        det *= pivval
        for i in range(k + 1, n):
            m = a[i, k] / pivval
            a[i, k] = m
            for j in range(k + 1, n):
                a[i, j] -= m * a[k, j]
    return det


@njit
def batch_minors(mat, idx, offsets):
    """Determinants of the principal submatrices described by index lists.

    `idx` concatenates the (sorted) index subsets; `offsets[s]:offsets[s+1]`
    delimits subset s. Returns one determinant per subset, each by an
    independent LU factorization of the extracted submatrix.
    """
    m = offsets.shape[0] - 1
    out = np.empty(m)
    nmax = mat.shape[0]
    buf = np.empty((nmax, nmax))
    for s in range(m):
        lo = offsets[s]
        hi = offsets[s + 1]
        k = hi - lo
        for i in range(k):
            for j in range(k):
                buf[i, j] = mat[idx[lo + i], idx[lo + j]]
        out[s] = lu_det(buf[:k, :k])
    return out


@njit
def power_iteration(h, max_iter, rtol):
    """Perron root of a nonnegative matrix by power iteration.

    Stops when the Rayleigh quotient changes by less than `rtol`
    relative AND the value is certified: either the Collatz-Wielandt
    bounds min_i (Hx)_i/x_i <= rho <= max_i (Hx)_i/x_i close to near
    machine width on a strictly positive iterate, or the eigen-residual
    |Hx - lam x| drops to 1e-13 relative (a backward error that cannot
    move the Perron root of a nonnegative matrix by more). Hitting an
    exact zero iterate proves H nilpotent, hence rho = 0. Returns
    (value, status): status 1 certified, 0 no certificate within
    `max_iter` iterations (caller falls back to the full spectrum).
    """
    n = h.shape[0]
    x = np.empty(n)
    for i in range(n):
        x[i] = 1.0 / math.sqrt(n)
    hx = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += h[i, j] * x[j]
        hx[i] = s
    lam = 0.0
    lam_prev = -1.0
    for it in range(max_iter):
        ny = 0.0
        for i in range(n):
            ny += hx[i] * hx[i]
        ny = math.sqrt(ny)
        if ny == 0.0:
            # H^k (ones) = 0 with H >= 0 forces H^k = 0 on the cone.
            return 0.0, 1
        for i in range(n):
            x[i] = hx[i] / ny
        for i in range(n):
            s = 0.0
            for j in range(n):
                s += h[i, j] * x[j]
            hx[i] = s
        num = 0.0
        den = 0.0
        for i in range(n):
            num += x[i] * hx[i]
            den += x[i] * x[i]
        lam = num / den
        if it > 0 and abs(lam - lam_prev) <= rtol * max(abs(lam), 1e-300):
            # Residual certificate.
            res = 0.0
            for i in range(n):
                d = hx[i] - lam * x[i]
                res += d * d
            res = math.sqrt(res)
            if lam > 0.0 and res <= 1e-13 * lam:
                return lam, 1
            # Collatz-Wielandt certificate on a strictly positive iterate.
            all_pos = True
            for i in range(n):
                if x[i] <= 0.0:
                    all_pos = False
                    break
            if all_pos:
                rmin = 1e300
                rmax = -1e300
                for i in range(n):
                    ratio = hx[i] / x[i]
                    if ratio < rmin:
                        rmin = ratio
                    if ratio > rmax:
                        rmax = ratio
                if rmax >= 0.0 and rmax - rmin <= 1e-11 * max(rmax, 1e-300):
                    return 0.5 * (rmin + rmax), 1
        lam_prev = lam
    return lam, 0


@njit
def flow_rhs(hm, cm, z, lam):
    """Right-hand side of the eigenpair flow.

    dz = (I - z z^T/|z|^2) C (H - lam I) z, dlam = z^T C (H - lam I) z.
    Returns (dz, dlam).
    """
    n = z.shape[0]
    g = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += hm[i, j] * z[j]
        g[i] = s - lam * z[i]
    cg = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += cm[i, j] * g[j]
        cg[i] = s
    zz = 0.0
    zcg = 0.0
    for i in range(n):
        zz += z[i] * z[i]
        zcg += z[i] * cg[i]
    dz = np.empty(n)
    for i in range(n):
        dz[i] = cg[i] - z[i] * zcg / zz
    return dz, zcg


@njit
def rk4_flow(hm, cm, z0, lam0, dt, max_steps, conv_tol, renormalize, lam_guard):
    """Integrate the eigenpair flow with classical fixed-step RK4.

    Records every state. Returns
        (zs, lams, rhs_norms, drifts, n_states, status)
    where zs[k], lams[k] is the state after k steps, rhs_norms[k] the
    norm of the vector field there, and drifts[k] the pre-correction
    norm defect | |z|^2 - 1 | observed at step k (0 at k = 0). Status:
    0 converged (rhs norm < conv_tol), 1 max_steps exhausted,
    2 diverged (|lam| > lam_guard).

    With renormalize on, z is rescaled to unit norm after every step and
    drifts[k] is the per-step defect that was corrected; with it off, z
    is left untouched and drifts[k] is the accumulated defect.
    """
    n = z0.shape[0]
    zs = np.empty((max_steps + 1, n))
    lams = np.empty(max_steps + 1)
    rhs_norms = np.empty(max_steps + 1)
    drifts = np.empty(max_steps + 1)
    z = z0.copy()
    lam = lam0
    status = 1
    count = 0
    for step in range(max_steps + 1):
        for i in range(n):
            zs[step, i] = z[i]
        lams[step] = lam
        dz, dlam = flow_rhs(hm, cm, z, lam)
        rn = dlam * dlam
        for i in range(n):
            rn += dz[i] * dz[i]
        rn = math.sqrt(rn)
        rhs_norms[step] = rn
        if step == 0:
            drifts[step] = 0.0
        count = step + 1
        if rn < conv_tol:
            status = 0
            break
        if abs(lam) > lam_guard:
            status = 2
            break
        if step == max_steps:
            status = 1
            break
        # RK4 step.
        k1z, k1l = dz, dlam
        z2 = np.empty(n)
        for i in range(n):
            z2[i] = z[i] + 0.5 * dt * k1z[i]
        k2z, k2l = flow_rhs(hm, cm, z2, lam + 0.5 * dt * k1l)
        z3 = np.empty(n)
        for i in range(n):
            z3[i] = z[i] + 0.5 * dt * k2z[i]
        k3z, k3l = flow_rhs(hm, cm, z3, lam + 0.5 * dt * k2l)
        z4 = np.empty(n)
        for i in range(n):
            z4[i] = z[i] + dt * k3z[i]
        k4z, k4l = flow_rhs(hm, cm, z4, lam + dt * k3l)
        for i in range(n):
            z[i] += dt / 6.0 * (k1z[i] + 2.0 * k2z[i] + 2.0 * k3z[i] + k4z[i])
        lam += dt / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l)
        nz2 = 0.0
        for i in range(n):
            nz2 += z[i] * z[i]
        defect = abs(nz2 - 1.0)
        if renormalize:
            drifts[step + 1] = defect
            nz = math.sqrt(nz2)
            if nz > 0.0:
                for i in range(n):
                    z[i] /= nz
        else:
            drifts[step + 1] = defect
    return zs[:count], lams[:count], rhs_norms[:count], drifts[:count], count, status
