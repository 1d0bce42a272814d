"""Index <-> waveform mapping for frequency-permutation + MPSK symbols.

A message index ``i`` in ``1..M_T`` (``M_T = L! * M**L``) is split into a
permutation rank ``(i - 1) // M**L`` and a phase word ``(i - 1) % M**L``.
The rank is unranked with the factorial number system (Lehmer code) in
lexicographic order, so rank 0 is the ascending tone order.  The phase word
is written as ``L`` base-``M`` digits, most significant digit on subpulse 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np

U128_MAX = (1 << 128) - 1


@dataclass(frozen=True)
class WaveformParams:
    """Static design parameters of the waveform family.

    L: number of subpulses (and of tones); M: PSK order; T: subpulse length
    in seconds; f0: first tone in Hz; n_step: integer n with tone step
    n / T; E: total waveform energy.
    """

    L: int
    M: int = 1
    T: float = 1.0
    f0: float = 0.0
    n_step: int = 1
    E: float = 1.0

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"L must be an integer >= 1, got {self.L!r}")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be an integer >= 1, got {self.M!r}")
        if int(self.n_step) != self.n_step or self.n_step < 1:
            raise ValueError(f"n_step must be a positive integer, got {self.n_step!r}")
        if not self.T > 0:
            raise ValueError(f"T must be > 0, got {self.T!r}")
        if not self.E > 0:
            raise ValueError(f"E must be > 0, got {self.E!r}")

    @property
    def delta_f(self) -> float:
        return self.n_step / self.T

    @property
    def tones(self) -> np.ndarray:
        """Tone frequencies in Hz, indexed by 0-based tone index."""
        return self.f0 + self.n_step * np.arange(self.L) / self.T

    @property
    def omegas(self) -> np.ndarray:
        return 2 * np.pi * self.tones


@dataclass(frozen=True)
class WaveformSymbol:
    index: int
    perm: tuple[int, ...]
    phase_idx: tuple[int, ...]

    def phases(self, M: int) -> np.ndarray:
        return 2 * np.pi * np.asarray(self.phase_idx, dtype=float) / M


def total_waveforms(params: WaveformParams) -> int:
    """Number of distinct waveforms ``L! * M**L``.

    Raises OverflowError if the count does not fit an unsigned 128-bit
    integer.
    """
    count = factorial(params.L) * params.M ** params.L
    if count > U128_MAX:
        raise OverflowError(
            f"M_T = L!*M^L for L={params.L}, M={params.M} exceeds 128 bits")
    return count


def bits_per_block(params: WaveformParams) -> int:
    """floor(log2 M_T), computed exactly on the integer count."""
    return total_waveforms(params).bit_length() - 1


def unrank_permutation(rank: int, L: int) -> tuple[int, ...]:
    """Lexicographic unranking over ``(0, ..., L-1)``."""
    if not 0 <= rank < factorial(L):
        raise ValueError(f"permutation rank {rank} out of range for L={L}")
    remaining = list(range(L))
    perm = []
    for pos in range(L - 1, -1, -1):
        digit, rank = divmod(rank, factorial(pos))
        perm.append(remaining.pop(digit))
    return tuple(perm)


def rank_permutation(perm: Sequence[int]) -> int:
    L = len(perm)
    if sorted(perm) != list(range(L)):
        raise ValueError(f"not a permutation of 0..{L - 1}: {tuple(perm)}")
    remaining = list(range(L))
    rank = 0
    for pos, tone in enumerate(perm):
        digit = remaining.index(tone)
        rank += digit * factorial(L - 1 - pos)
        remaining.pop(digit)
    return rank


def _phase_digits(word: int, M: int, L: int) -> tuple[int, ...]:
    digits = [0] * L
    for pos in range(L - 1, -1, -1):
        word, digits[pos] = divmod(word, M)
    return tuple(digits)


def encode_index(i: int, params: WaveformParams) -> WaveformSymbol:
    """Map a 1-based message index to its waveform symbol."""
    m_t = total_waveforms(params)
    if int(i) != i or not 1 <= i <= m_t:
        raise ValueError(f"index {i} outside 1..{m_t}")
    i = int(i)
    rank, word = divmod(i - 1, params.M ** params.L)
    return WaveformSymbol(
        index=i,
        perm=unrank_permutation(rank, params.L),
        phase_idx=_phase_digits(word, params.M, params.L),
    )


def decode_symbol(symbol: WaveformSymbol, params: WaveformParams) -> int:
    """Inverse of :func:`encode_index`; ``symbol.index`` is ignored."""
    return decode_parts(symbol.perm, symbol.phase_idx, params)


def decode_parts(perm: Sequence[int], phase_idx: Sequence[int],
                 params: WaveformParams) -> int:
    L, M = params.L, params.M
    if len(perm) != L or len(phase_idx) != L:
        raise ValueError(f"expected length-{L} permutation and phase sequence")
    word = 0
    for digit in phase_idx:
        if int(digit) != digit or not 0 <= digit < M:
            raise ValueError(f"phase digit {digit} outside 0..{M - 1}")
        word = word * M + int(digit)
    return rank_permutation([int(p) for p in perm]) * M ** L + word + 1


def make_symbol(perm: Sequence[int], phase_idx: Sequence[int],
                params: WaveformParams) -> WaveformSymbol:
    """Build a symbol from its parts, filling in (and validating) the index."""
    index = decode_parts(perm, phase_idx, params)
    return WaveformSymbol(index, tuple(int(p) for p in perm),
                          tuple(int(m) for m in phase_idx))


def random_symbol(params: WaveformParams, rng: np.random.Generator,
                  zero_phases: bool = False) -> WaveformSymbol:
    """Uniform draw over permutations and (optionally) phase words."""
    perm = rng.permutation(params.L)
    if zero_phases or params.M == 1:
        phases = np.zeros(params.L, dtype=int)
    else:
        phases = rng.integers(0, params.M, size=params.L)
    return make_symbol(perm, phases, params)


def all_symbols(params: WaveformParams, limit: int = 10**6):
    """Every symbol in index order, as integer arrays ``(perms, phases)``.

    Shapes are ``(M_T, L)``.  Refuses to enumerate more than ``limit``.
    """
    m_t = total_waveforms(params)
    if m_t > limit:
        raise ValueError(f"M_T = {m_t} exceeds the enumeration limit {limit}")
    from itertools import permutations, product

    L, M = params.L, params.M
    perm_list = np.array(list(permutations(range(L))), dtype=np.int64)
    phase_list = np.array(list(product(range(M), repeat=L)), dtype=np.int64)
    perms = np.repeat(perm_list, len(phase_list), axis=0)
    phases = np.tile(phase_list, (len(perm_list), 1))
    return perms, phases


def indices_of(perms, phases, params: WaveformParams) -> np.ndarray:
    """Vectorised :func:`decode_parts`; returns 0-based indices (int64).

    Only valid while ``M_T`` fits in a signed 64-bit integer.
    """
    perms = np.asarray(perms, dtype=np.int64)
    phases = np.asarray(phases, dtype=np.int64)
    L, M = params.L, params.M
    if total_waveforms(params) >= 2**63:
        raise OverflowError("M_T exceeds the int64 range")
    # Lehmer digit at each position: later entries smaller than this one.
    lehmer = (perms[:, :, None] > perms[:, None, :]) & np.triu(np.ones((L, L), bool), 1)
    digits = lehmer.sum(axis=2)
    fact = np.array([factorial(L - 1 - p) for p in range(L)], dtype=np.int64)
    rank = digits @ fact
    word = phases @ (M ** np.arange(L - 1, -1, -1, dtype=np.int64))
    return rank * M ** L + word
