# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: AF grid evaluation and batch block-max + assignment.

Mirrors ``permwave._pykernels`` term for term.
"""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport sin, cos, fabs, floor, ceil, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef enum:
    _RESEED = 64


cdef inline double _sinc(double x) noexcept nogil:
    cdef double x2
    if fabs(x) < 1e-4:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return sin(x) / x


def af_grid(double[::1] omega_sub, double[::1] theta, double T,
            double[::1] taus, double[::1] omegas, int num_threads=0):
    """Complex AF on ``taus x omegas``; ``omegas`` must be uniformly spaced.

    Along a row the phase of every (l, n) term is linear in omega, so the
    oscillating factors are advanced by complex rotation and re-seeded from
    sin/cos every ``_RESEED`` columns to bound rounding drift.
    """
    cdef Py_ssize_t L = omega_sub.shape[0]
    cdef Py_ssize_t nt = taus.shape[0], nw = omegas.shape[0]
    cdef double[:, ::1] re = np.zeros((nt, nw))
    cdef double[:, ::1] im = np.zeros((nt, nw))
    cdef double dw = (omegas[nw - 1] - omegas[0]) / (nw - 1) if nw > 1 else 0.0
    cdef Py_ssize_t i, q, l, n
    cdef long k, kmin, kmax
    cdef double tau, tp, D, delta, a, b, ph0, om, x, mag
    cdef double zr, zi, sr, si, rr, ri, qr, qi, tmp
    cdef double scale = 1.0 / (L * T)
    if num_threads <= 0:
        num_threads = 1
    for i in prange(nt, nogil=True, schedule="static", num_threads=num_threads):
        tau = taus[i]
        kmin = <long>floor(-tau / T - 1.0) + 1
        kmax = <long>ceil(-tau / T + 1.0) - 1
        if kmin < -(L - 1):
            kmin = -(L - 1)
        if kmax > L - 1:
            kmax = L - 1
        for k in range(kmin, kmax + 1):
            tp = tau + k * T
            D = T - fabs(tp)
            if D <= 0.0:
                continue
            for l in range(L):
                n = l + k
                if n < 0 or n >= L:
                    continue
                delta = omega_sub[n] - omega_sub[l]
                # phase(om) = a*om + ph0 ; sinc argument (om - delta) * D / 2
                a = (T + tp) * 0.5 + l * T
                ph0 = -delta * (T + tp) * 0.5 + omega_sub[n] * tp + theta[l] - theta[n]
                b = D * 0.5
                rr = cos(a * dw)
                ri = sin(a * dw)
                qr = cos(b * dw)
                qi = sin(b * dw)
                zr = 0.0
                zi = 0.0
                sr = 0.0
                si = 0.0
                for q in range(nw):
                    om = omegas[0] + q * dw
                    if q % _RESEED == 0:
                        zr = cos(a * om + ph0)
                        zi = sin(a * om + ph0)
                        sr = cos(b * (om - delta))
                        si = sin(b * (om - delta))
                    x = b * (om - delta)
                    if fabs(x) < 1e-3:
                        mag = D * _sinc(x)
                    else:
                        mag = si / x * D
                    re[i, q] += mag * zr
                    im[i, q] += mag * zi
                    tmp = zr * rr - zi * ri
                    zi = zr * ri + zi * rr
                    zr = tmp
                    tmp = sr * qr - si * qi
                    si = sr * qi + si * qr
                    sr = tmp
        for q in range(nw):
            re[i, q] = re[i, q] * scale
            im[i, q] = im[i, q] * scale
    out = np.empty((nt, nw), dtype=np.complex128)
    out.real = np.asarray(re)
    out.imag = np.asarray(im)
    return out


cdef void _hungarian_max(const double* Y, Py_ssize_t n, long* rows,
                         double* u, double* v, long* match, long* way,
                         double* minv, char* used) noexcept nogil:
    # Y is row-major n x n; same algorithm as _pykernels.hungarian_max
    cdef Py_ssize_t col, j, j0, j1, c0, r
    cdef double delta, cur
    for j in range(n + 1):
        u[j] = 0.0
        v[j] = 0.0
        match[j] = 0
        way[j] = 0
    for col in range(1, n + 1):
        match[0] = col
        j0 = 0
        for j in range(n + 1):
            minv[j] = INFINITY
            used[j] = 0
        while True:
            used[j0] = 1
            c0 = match[j0]
            delta = INFINITY
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = -Y[(j - 1) * n + (c0 - 1)] - u[c0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while True:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
            if j0 == 0:
                break
    for r in range(1, n + 1):
        rows[match[r] - 1] = r - 1


def hungarian_max(Y):
    cdef double[:, ::1] Yv = np.ascontiguousarray(Y, dtype=np.float64)
    cdef Py_ssize_t n = Yv.shape[0]
    rows = np.empty(n, dtype=np.int64)
    cdef long[::1] rv = rows
    cdef double[::1] u = np.empty(n + 1), v = np.empty(n + 1), minv = np.empty(n + 1)
    cdef long[::1] match = np.empty(n + 1, dtype=np.int64), way = np.empty(n + 1, dtype=np.int64)
    cdef char[::1] used = np.empty(n + 1, dtype=np.int8)
    if n == 0:
        return rows
    _hungarian_max(&Yv[0, 0], n, &rv[0], &u[0], &v[0], &match[0], &way[0],
                   &minv[0], &used[0])
    return rows


def detect_batch(X, Py_ssize_t M):
    cdef double[:, :, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t B = Xv.shape[0], L = Xv.shape[2]
    perms = np.empty((B, L), dtype=np.int64)
    phases = np.empty((B, L), dtype=np.int64)
    cdef long[:, ::1] pv = perms, phv = phases
    cdef double[::1] Y = np.empty(L * L)
    cdef long[::1] arg = np.empty(L * L, dtype=np.int64)
    cdef double[::1] u = np.empty(L + 1), v = np.empty(L + 1), minv = np.empty(L + 1)
    cdef long[::1] match = np.empty(L + 1, dtype=np.int64), way = np.empty(L + 1, dtype=np.int64)
    cdef char[::1] used = np.empty(L + 1, dtype=np.int8)
    cdef Py_ssize_t b, tone, l, m, best_m
    cdef double best, x
    if B == 0 or L == 0:
        return perms, phases
    with nogil:
        for b in range(B):
            for tone in range(L):
                for l in range(L):
                    best = Xv[b, tone * M, l]
                    best_m = 0
                    for m in range(1, M):
                        x = Xv[b, tone * M + m, l]
                        if x > best:
                            best = x
                            best_m = m
                    Y[tone * L + l] = best
                    arg[tone * L + l] = best_m
            _hungarian_max(&Y[0], L, &pv[b, 0], &u[0], &v[0], &match[0],
                           &way[0], &minv[0], &used[0])
            for l in range(L):
                phv[b, l] = arg[pv[b, l] * L + l]
    return perms, phases
