"""Pairwise error probabilities and block-error bounds.

Every PEP has the form ``Pr[sqrt(h^H h) <= alpha * Z]`` with Z ~ N(0, 1);
``alpha`` depends on the symbol pair only through the number ``d`` of
subpulses whose tones differ and the cosine sum of phase differences over
the subpulses whose tones agree.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np
from scipy import integrate
from scipy.special import erfc

from .channel import ChannelModel, gain_cdf, gain_coefficients, gain_quantile
from .codec import WaveformParams, WaveformSymbol, all_symbols, encode_index, total_waveforms

ENUMERATION_LIMIT = 10**6
QUAD_EPSABS = 1e-10
QUAD_LIMIT = 500            # subintervals; 21 points each caps evaluations near 1e4


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class PairGeometry:
    d: int
    cos_sum: float


@dataclass
class BoundResult:
    snr_db: np.ndarray
    values: np.ndarray
    kind: str
    channel: str


@lru_cache(maxsize=32)
def _cos_table(M: int) -> tuple[float, ...]:
    # folded so that steps m and M - m share one float; keeps alpha exactly symmetric
    m = np.minimum(np.arange(M), M - np.arange(M))
    return tuple(float(c) for c in np.cos(2 * np.pi * m / M))


def pair_geometry(sym_i: WaveformSymbol, sym_k: WaveformSymbol,
                  params: WaveformParams) -> PairGeometry:
    table = _cos_table(params.M)
    M = params.M
    same = [l for l in range(params.L) if sym_i.perm[l] == sym_k.perm[l]]
    cos_sum = math.fsum(table[(sym_k.phase_idx[l] - sym_i.phase_idx[l]) % M] for l in same)
    return PairGeometry(params.L - len(same), cos_sum)


def alpha_from_geometry(cos_sum: float, params: WaveformParams, N0: float) -> float:
    gap = params.L - cos_sum
    if gap <= 1e-12:
        raise ValueError("identical symbols have no pairwise error probability")
    return math.sqrt(params.L * N0 / (params.E * gap))


def alpha(sym_i: WaveformSymbol, sym_k: WaveformSymbol, params: WaveformParams,
          N0: float) -> float:
    if sym_i.perm == sym_k.perm and sym_i.phase_idx == sym_k.phase_idx:
        raise ValueError("alpha is undefined for i == k")
    return alpha_from_geometry(pair_geometry(sym_i, sym_k, params).cos_sum, params, N0)


def qfunc(x):
    return 0.5 * erfc(np.asarray(x) / math.sqrt(2))


def pep_awgn(alpha: float, N: int) -> float:
    """``Q(sqrt(N) / alpha)``."""
    if math.isinf(alpha):
        return 0.5
    return float(qfunc(math.sqrt(N) / alpha))


def _craig(integrand, what: str) -> float:
    val, abserr, info = integrate.quad(integrand, 0.0, math.pi / 2, epsabs=QUAD_EPSABS,
                                       epsrel=1e-12, limit=QUAD_LIMIT, full_output=1)[:3]
    if abserr > 10 * QUAD_EPSABS and abserr > 1e-9 * abs(val):
        raise QuadratureError(
            f"{what}: quadrature did not converge (value={val!r}, abserr={abserr:.3g}, "
            f"evaluations={info['neval']})")
    return val / math.pi


def pep_rician(alpha: float, model: ChannelModel) -> float:
    """Average PEP over correlated Rician fading (Craig-form integral)."""
    lam = model.eigvals
    K = model.K
    proj = model.los_projection
    if math.isinf(alpha):
        return 0.5

    def integrand(theta):
        c = 2 * (K + 1) * alpha ** 2 * math.sin(theta) ** 2
        den = lam + c
        return float(np.prod(c / den) * math.exp(-K * float(np.sum(proj / den))))

    return _craig(integrand, f"Rician PEP (alpha={alpha:g}, K={K:g})")


def pep_rayleigh(alpha: float, eigenvalues) -> float:
    """Average PEP over correlated Rayleigh fading with the given eigenvalues."""
    lam = np.asarray(eigenvalues, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("eigenvalues must be positive")
    if math.isinf(alpha):
        return 0.5

    def integrand(theta):
        c = 2 * alpha ** 2 * math.sin(theta) ** 2
        return float(np.prod(c / (lam + c)))

    return _craig(integrand, f"Rayleigh PEP (alpha={alpha:g})")


def pep(alpha: float, channel: ChannelModel) -> float:
    if channel.kind == "awgn":
        return pep_awgn(alpha, channel.N)
    if channel.kind == "rayleigh":
        return pep_rayleigh(alpha, channel.eigvals)
    return pep_rician(alpha, channel)


# -- union bound -----------------------------------------------------------

def fixed_point_counts(L: int) -> list[int]:
    """Number of permutations of L items with exactly f fixed points, f = 0..L.

    Exhaustive scan up to L = 8; the rencontres formula beyond.
    """
    if L <= 8:
        counts = Counter(sum(p[j] == j for j in range(L)) for p in permutations(range(L)))
        return [counts.get(f, 0) for f in range(L + 1)]
    derange = [1, 0]
    for n in range(2, L + 1):
        derange.append((n - 1) * (derange[-1] + derange[-2]))
    return [math.comb(L, f) * derange[L - f] for f in range(L + 1)]


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def pair_signatures(params: WaveformParams) -> dict[tuple[int, float], int]:
    """Multiplicity of each ``(d, cos_sum)`` over all k != 1 relative to symbol 1.

    Symbol 1 is the ascending tone order with all phases zero.
    """
    L, M = params.L, params.M
    table = _cos_table(M)
    sigs: Counter = Counter()
    for f, n_perm in enumerate(fixed_point_counts(L)):
        if n_perm == 0:
            continue
        d = L - f
        free = n_perm * M ** d
        for comp in _compositions(f, M):
            ways = math.factorial(f)
            for c in comp:
                ways //= math.factorial(c)
            cos_sum = math.fsum(v for m, c in enumerate(comp) for v in [table[m]] * c)
            mult = free * ways
            if d == 0 and comp[0] == L:
                mult -= 1           # the reference symbol itself
            if mult:
                sigs[(d, cos_sum)] += mult
    return dict(sigs)


def enumerated_signatures(params: WaveformParams) -> list[float]:
    """cos_sum of every k = 2..M_T against symbol 1, by direct enumeration."""
    perms, phases = all_symbols(params, limit=ENUMERATION_LIMIT)
    table = _cos_table(params.M)
    ident = np.arange(params.L)
    out = []
    for perm, ph in zip(perms[1:], phases[1:]):
        same = perm == ident
        out.append(math.fsum(table[m] for m in ph[same]))
    return out


class _PepCache:
    def __init__(self, params, channel, N0):
        self.params, self.channel, self.N0 = params, channel, N0
        self._memo: dict[float, float] = {}

    def __call__(self, cos_sum: float) -> float:
        if cos_sum not in self._memo:
            a = alpha_from_geometry(cos_sum, self.params, self.N0)
            self._memo[cos_sum] = pep(a, self.channel)
        return self._memo[cos_sum]


def union_bound(params: WaveformParams, channel: ChannelModel, N0: float,
                mode: str = "aggregate") -> float:
    """``sum_{k>=2} P_1k``.

    ``mode="enumerate"`` visits every symbol (``M_T <= 10**6``);
    ``mode="aggregate"`` groups symbols by pair signature and scales each
    PEP by its multiplicity.
    """
    P = _PepCache(params, channel, N0)
    if mode == "enumerate":
        if total_waveforms(params) > ENUMERATION_LIMIT:
            raise ValueError("M_T too large to enumerate; use mode='aggregate'")
        return math.fsum(P(cs) for cs in enumerated_signatures(params))
    if mode != "aggregate":
        raise ValueError(f"unknown union-bound mode {mode!r}")
    return math.fsum(mult * P(cs) for (_, cs), mult in sorted(pair_signatures(params).items()))


# -- nearest neighbours ----------------------------------------------------

def nn_alpha(params: WaveformParams, N0: float) -> float:
    if params.M == 2:
        return math.sqrt(params.L * N0 / (2 * params.E))
    return math.sqrt(params.L * N0 / (params.E * (1 - math.cos(2 * math.pi / params.M))))


def nn_multiplicity(params: WaveformParams) -> int:
    if params.M < 2:
        raise ValueError("nearest-neighbour approximation needs M >= 2")
    L = params.L
    return 2 * L * L - L if params.M == 2 else 2 * L


def nn_approximation(params: WaveformParams, channel: ChannelModel, N0: float) -> float:
    return nn_multiplicity(params) * pep(nn_alpha(params, N0), channel)


# -- gain-thresholded bound (Rayleigh) --------------------------------------

def _tail_term(alpha: float, gamma: float, lam: np.ndarray, b: np.ndarray) -> float:
    """``int_gamma^inf Q(sqrt(x)/alpha) f(x) dx`` via Craig's form, x-integral closed."""

    def integrand(theta):
        c = 2 * alpha ** 2 * math.sin(theta) ** 2
        if c == 0.0:
            return 0.0
        rate = 1.0 / c + 1.0 / lam
        return float(np.sum(b * c / (lam + c) * np.exp(-gamma * rate)))

    return _craig(integrand, f"conditional PEP (alpha={alpha:g}, gamma={gamma:g})")


def new_bound_at(gamma: float, params: WaveformParams, model: ChannelModel, N0: float,
                 signatures: dict | None = None) -> float:
    """``F(gamma) + sum_k int_gamma^inf Q(sqrt(x)/alpha_1k) f(x) dx``."""
    b = gain_coefficients(model)
    lam = model.eigvals
    sigs = signatures if signatures is not None else pair_signatures(params)
    grouped: Counter = Counter()
    for (_, cs), mult in sigs.items():
        grouped[cs] += mult
    tail = math.fsum(mult * _tail_term(alpha_from_geometry(cs, params, N0), gamma, lam, b)
                     for cs, mult in sorted(grouped.items()))
    return float(gain_cdf(model, gamma)) + tail


def _golden(f, lo, hi, rtol=1e-4):
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rtol * max(abs(a) + abs(b), 1e-12) / 2:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def new_upper_bound_rayleigh(params: WaveformParams, model: ChannelModel, N0: float,
                             coarse_points: int = 64) -> tuple[float, float]:
    """Minimise the gain-thresholded bound over gamma; returns ``(bound, gamma)``.

    A coarse grid on ``[0, gamma_hi]`` (gamma_hi = 99.99th gain percentile)
    locates the basin, then golden-section search refines it.
    """
    if model.kind != "rayleigh":
        raise ValueError("the gain-thresholded bound is implemented for Rayleigh channels")
    gain_coefficients(model)          # rejects repeated eigenvalues
    sigs = pair_signatures(params)
    f = lambda g: new_bound_at(g, params, model, N0, sigs)
    gamma_hi = gain_quantile(model, 0.9999)
    grid = np.linspace(0.0, gamma_hi, coarse_points)
    vals = [f(g) for g in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    g_best, v_best = _golden(f, lo, hi)
    if vals[i] < v_best:
        g_best, v_best = grid[i], vals[i]
    return v_best, float(g_best)


def bound_curve(kind: str, params: WaveformParams, channel: ChannelModel,
                snr_db) -> BoundResult:
    snr_db = np.asarray(snr_db, dtype=float)
    vals = []
    for s in snr_db:
        N0 = params.E / 10 ** (s / 10)
        if kind == "union":
            vals.append(union_bound(params, channel, N0))
        elif kind == "nn":
            vals.append(nn_approximation(params, channel, N0))
        elif kind == "new_upper":
            vals.append(new_upper_bound_rayleigh(params, channel, N0)[0])
        else:
            raise ValueError(f"unknown bound kind {kind!r}")
    return BoundResult(snr_db, np.array(vals), kind, channel.describe())


def reference_symbol(params: WaveformParams) -> WaveformSymbol:
    return encode_index(1, params)
