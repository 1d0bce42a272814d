"""Coherent ML detection in the per-subpulse orthogonal basis.

The received block is represented by its matched-filter outputs: for every
antenna, tone and subpulse one complex projection onto the unit-energy tone
basis, carrying ``h * sqrt(E/L) * exp(j theta_l)`` on the transmitted tone
plus CN(0, N0) noise.  This is a sufficient statistic for the waveform, so
detection on it is exactly ML detection on ``r(t)``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import kernels
from .channel import complex_normal
from .codec import WaveformParams, WaveformSymbol, all_symbols, decode_parts, total_waveforms

EXHAUSTIVE_LIMIT = 10**6


def observe(symbol: WaveformSymbol, h, params: WaveformParams, N0: float,
            rng: np.random.Generator | None = None) -> np.ndarray:
    """Matched-filter outputs, shape (N, L, L) = (antenna, tone, subpulse)."""
    h = np.atleast_1d(np.asarray(h, dtype=complex))
    perm = np.asarray(symbol.perm)[None, :]
    phase = np.asarray(symbol.phase_idx)[None, :]
    return observe_batch(perm, phase, h[None, :], params, N0, rng)[0]


def observe_batch(perms, phases, H, params: WaveformParams, N0: float,
                  rng: np.random.Generator | None = None) -> np.ndarray:
    """Vectorised :func:`observe`; ``perms``/``phases`` (B, L), ``H`` (B, N)."""
    perms = np.asarray(perms)
    B, L = perms.shape
    H = np.asarray(H, dtype=complex)
    amp = np.sqrt(params.E / L) * np.exp(2j * np.pi * np.asarray(phases) / params.M)
    sig = np.zeros((B, L, L), dtype=complex)
    sig[np.arange(B)[:, None], perms, np.arange(L)[None, :]] = amp
    obs = H[:, :, None, None] * sig[:, None, :, :]
    if N0 > 0:
        if rng is None:
            raise ValueError("an RNG is required when N0 > 0")
        obs = obs + np.sqrt(N0) * complex_normal(rng, obs.shape)
    return obs


def combine(obs, h) -> np.ndarray:
    """``h^H r`` per tone and subpulse; works on single or batched inputs."""
    obs = np.asarray(obs)
    h = np.asarray(h, dtype=complex)
    return np.einsum("...a,...atl->...tl", h.conj(), obs)


def correlation_matrix(obs, h, params: WaveformParams) -> np.ndarray:
    """Real (M*L, L) matrix; row ``n*M + m`` correlates tone n at phase 2 pi m / M.

    Also accepts a leading batch axis on ``obs`` and ``h``.
    """
    z = combine(obs, h)
    M = params.M
    rot = np.exp(-2j * np.pi * np.arange(M) / M)
    X = np.real(z[..., :, None, :] * rot[:, None])     # (..., L, M, L)
    return X.reshape(*z.shape[:-2], z.shape[-2] * M, z.shape[-1])


def block_max(X, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Per (tone, subpulse) maximum over the M phase rows.

    Returns ``Y`` (L, L) and ``argrows`` holding the row of X that attained
    each maximum (first one on ties).
    """
    X = np.asarray(X, dtype=float)
    ML, L = X.shape
    blocks = X.reshape(ML // M, M, L)
    arg = blocks.argmax(axis=1)
    Y = np.take_along_axis(blocks, arg[:, None, :], axis=1)[:, 0, :]
    return Y, arg + M * np.arange(ML // M)[:, None]


def _best_total(Y: np.ndarray) -> float:
    if Y.size == 0:
        return 0.0
    rows = kernels.hungarian_max(Y)
    return float(Y[rows, np.arange(Y.shape[1])].sum())


def assign_max(Y) -> tuple[tuple[int, ...], float]:
    """Row-per-column assignment maximising ``sum_l Y[sigma[l], l]``.

    Kuhn-Munkres on the negated matrix.  Among optimal assignments the
    lexicographically smallest ``sigma`` is returned.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] != Y.shape[1]:
        raise ValueError(f"assignment needs a square matrix, got shape {Y.shape}")
    L = Y.shape[0]
    if L == 0:
        return (), 0.0
    best = _best_total(Y)
    tol = 1e-12 * max(1.0, np.abs(Y).max() * L)
    rows_left = list(range(L))
    sigma = []
    acc = 0.0
    for col in range(L):
        for r in rows_left:
            rest = [q for q in rows_left if q != r]
            cand = acc + Y[r, col] + _best_total(Y[np.ix_(rest, range(col + 1, L))])
            if cand >= best - tol:
                break
        sigma.append(r)
        acc += Y[r, col]
        rows_left.remove(r)
    return tuple(sigma), float(sum(Y[s, c] for c, s in enumerate(sigma)))


def detect_efficient(obs, h, params: WaveformParams) -> int:
    """Block maxima over phases, then a max-weight tone assignment.

    The phase digit of each subpulse is the within-block offset of the
    stored maximising row.
    """
    X = correlation_matrix(obs, h, params)
    Y, argrows = block_max(X, params.M)
    sigma, _ = assign_max(Y)
    phase_idx = [int(argrows[n, l]) % params.M for l, n in enumerate(sigma)]
    return decode_parts(sigma, phase_idx, params)


@lru_cache(maxsize=8)
def _row_table(L: int, M: int) -> np.ndarray:
    perms, phases = all_symbols(WaveformParams(L=L, M=M), limit=EXHAUSTIVE_LIMIT)
    return perms * M + phases                       # (M_T, L) rows of X


def _check_enumerable(params: WaveformParams) -> None:
    if total_waveforms(params) > EXHAUSTIVE_LIMIT:
        raise ValueError(
            f"M_T = {total_waveforms(params)} is too large for exhaustive search; "
            "use detect_efficient")


def decision_variables(obs, h, params: WaveformParams) -> np.ndarray:
    """``Re{sum_l conj(s_k) h^H r}`` for every k (index order), scaled by sqrt(E/L)."""
    _check_enumerable(params)
    X = correlation_matrix(obs, h, params)
    rows = _row_table(params.L, params.M)
    return np.sqrt(params.E / params.L) * X[rows, np.arange(params.L)].sum(axis=1)


def detect_exhaustive(obs, h, params: WaveformParams) -> int:
    """Brute-force ML over all ``M_T`` symbols (smallest index on ties)."""
    return int(np.argmax(decision_variables(obs, h, params))) + 1


def detect_efficient_batch(X, params: WaveformParams) -> tuple[np.ndarray, np.ndarray]:
    """Batched block-max + assignment; returns detected ``(perms, phase_idx)``."""
    return kernels.detect_batch(X, params.M)


def detect_exhaustive_batch(X, params: WaveformParams) -> np.ndarray:
    """Batched brute-force ML; returns 0-based message indices."""
    _check_enumerable(params)
    rows = _row_table(params.L, params.M)
    X = np.asarray(X)
    metric = X[:, rows, np.arange(params.L)].sum(axis=-1)
    return np.argmax(metric, axis=1)
