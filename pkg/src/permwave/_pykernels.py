"""Pure numpy/Python implementations of the hot kernels.

These are the reference fallbacks for ``permwave._ckernels``; both must
return the same values (to rounding) for the same inputs.
"""

from __future__ import annotations

import numpy as np


def _sinc(x):
    # sin(x)/x, with a series near zero
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(xs) / xs)


def af_grid(omega_sub, theta, T, taus, omegas):
    """Complex AF of a unit-energy symbol on the grid ``taus x omegas``.

    ``omega_sub[l]`` and ``theta[l]`` are the angular frequency and phase of
    subpulse ``l``.  Returns a complex array of shape (len(taus), len(omegas)).
    """
    omega_sub = np.asarray(omega_sub, dtype=float)
    theta = np.asarray(theta, dtype=float)
    taus = np.asarray(taus, dtype=float)
    omegas = np.asarray(omegas, dtype=float)
    L = len(omega_sub)
    out = np.zeros((len(taus), len(omegas)), dtype=complex)
    ls = np.arange(L)
    for k in range(-(L - 1), L):
        shifted = taus + k * T
        rows = np.nonzero(np.abs(shifted) < T)[0]
        valid_l = ls[(ls + k >= 0) & (ls + k < L)]
        if rows.size == 0 or valid_l.size == 0:
            continue
        n = valid_l + k
        tp = shifted[rows][None, :, None]                    # (1, R, 1)
        w = (omegas[None, None, :]
             - (omega_sub[n] - omega_sub[valid_l])[:, None, None])  # (l, 1, W)
        D = T - np.abs(tp)
        mag = D * _sinc(w * D / 2)
        phase = (w * (T + tp) / 2
                 + omegas[None, None, :] * (valid_l * T)[:, None, None]
                 + omega_sub[n][:, None, None] * tp
                 + (theta[valid_l] - theta[n])[:, None, None])
        out[rows, :] += np.sum(mag * np.exp(1j * phase), axis=0)
    return out / (L * T)


def af_points(omega_sub, theta, T, taus, omegas):
    """Complex AF at paired points ``(taus[i], omegas[i])``."""
    omega_sub = np.asarray(omega_sub, dtype=float)
    theta = np.asarray(theta, dtype=float)
    taus, omegas = np.broadcast_arrays(np.asarray(taus, dtype=float),
                                       np.asarray(omegas, dtype=float))
    L = len(omega_sub)
    out = np.zeros(taus.shape, dtype=complex)
    for l in range(L):
        for n in range(L):
            tp = taus + (n - l) * T
            w = omegas - (omega_sub[n] - omega_sub[l])
            D = np.where(np.abs(tp) < T, T - np.abs(tp), 0.0)
            mag = D * _sinc(w * D / 2)
            phase = (w * (T + tp) / 2 + omegas * l * T + omega_sub[n] * tp
                     + theta[l] - theta[n])
            out += mag * np.exp(1j * phase)
    return out / (L * T)


def hungarian_max(Y):
    """Maximum-weight perfect assignment on a square matrix.

    Shortest augmenting path form of Kuhn-Munkres on the cost ``-Y``.
    Returns ``rows`` with ``rows[col]`` the row assigned to column ``col``.
    """
    Y = np.asarray(Y, dtype=float)
    n = Y.shape[0]
    cost = (-Y).tolist()
    INF = float("inf")
    u = [0.0] * (n + 1)            # column potentials (1-based, 0 is virtual)
    v = [0.0] * (n + 1)            # row potentials
    match = [0] * (n + 1)          # match[row] = column (1-based), 0 = free
    way = [0] * (n + 1)
    for col in range(1, n + 1):
        match[0] = col
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            c0 = match[j0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[j - 1][c0 - 1] - u[c0] - v[j]
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
    rows = np.empty(n, dtype=np.int64)
    for r in range(1, n + 1):
        rows[match[r] - 1] = r - 1
    return rows


def detect_batch(X, M):
    """Block-max + assignment for a batch of correlation matrices.

    ``X`` has shape (B, M*L, L).  Returns ``(perms, phase_idx)`` arrays of
    shape (B, L): the detected tone and phase digit of every subpulse.
    """
    X = np.asarray(X, dtype=float)
    B, ML, L = X.shape
    blocks = X.reshape(B, L, M, L)
    Y = blocks.max(axis=2)
    arg = blocks.argmax(axis=2)
    perms = np.empty((B, L), dtype=np.int64)
    for b in range(B):
        perms[b] = hungarian_max(Y[b])
    phases = np.take_along_axis(arg, perms[:, None, :], axis=1)[:, 0, :]
    return perms, phases
