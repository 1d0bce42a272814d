"""Complex-baseband synthesis and the per-subpulse basis representation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import WaveformParams, WaveformSymbol

DEFAULT_OVERSAMPLING = 16


@dataclass(frozen=True)
class BasebandSignal:
    samples: np.ndarray
    sample_rate: float
    duration: float

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self.samples)) / self.sample_rate

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) / self.sample_rate)


def evaluate(symbol: WaveformSymbol, params: WaveformParams, t,
             slot=None) -> np.ndarray:
    """Envelope s(t) at arbitrary times; zero outside ``[0, L*T)``.

    Each subpulse restarts its phase reference at ``l*T``.  ``slot`` may
    give the subpulse index of each time explicitly (exact sample grids).
    """
    t = np.asarray(t, dtype=float)
    L, T = params.L, params.T
    if slot is None:
        slot = np.floor(t / T).astype(np.int64)
    inside = (slot >= 0) & (slot < L)
    slot_c = np.clip(slot, 0, L - 1)
    freq = params.tones[np.asarray(symbol.perm)][slot_c]
    theta = symbol.phases(params.M)[slot_c]
    amp = np.sqrt(params.E / (L * T))
    out = amp * np.exp(1j * (2 * np.pi * freq * (t - slot_c * T) + theta))
    return np.where(inside, out, 0.0)


def sample_rate(params: WaveformParams, oversampling: int = DEFAULT_OVERSAMPLING) -> float:
    return oversampling * params.L * params.n_step / params.T


def synthesize(symbol: WaveformSymbol, params: WaveformParams,
               oversampling: int = DEFAULT_OVERSAMPLING) -> BasebandSignal:
    """Sample the symbol's envelope at ``oversampling * L * n_step / T`` Hz."""
    if int(oversampling) != oversampling or oversampling < 1:
        raise ValueError(f"oversampling must be a positive integer, got {oversampling!r}")
    fs = sample_rate(params, int(oversampling))
    per_slot = int(oversampling) * params.L * params.n_step
    k = np.arange(per_slot * params.L)
    t = k / fs
    return BasebandSignal(evaluate(symbol, params, t, slot=k // per_slot),
                          fs, params.L * params.T)


def to_basis(symbol: WaveformSymbol, params: WaveformParams) -> np.ndarray:
    """L x L matrix (tone x subpulse), one entry sqrt(E/L) e^{j theta} per column."""
    L = params.L
    B = np.zeros((L, L), dtype=complex)
    B[np.asarray(symbol.perm), np.arange(L)] = (
        np.sqrt(params.E / L) * np.exp(1j * symbol.phases(params.M)))
    return B


def from_basis(B: np.ndarray, params: WaveformParams) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Recover ``(perm, phase_idx)`` from a basis matrix."""
    rows = np.argmax(np.abs(B), axis=0)
    vals = B[rows, np.arange(params.L)]
    phase_idx = np.mod(np.round(np.angle(vals) * params.M / (2 * np.pi)), params.M)
    return tuple(int(r) for r in rows), tuple(int(p) for p in phase_idx)


def basis_inner_product(sym_a: WaveformSymbol, sym_b: WaveformSymbol,
                        params: WaveformParams) -> complex:
    """<s_a, s_b> = (E/L) * sum over tone-matching subpulses of e^{j(theta_a - theta_b)}."""
    Ba = to_basis(sym_a, params)
    Bb = to_basis(sym_b, params)
    return complex(np.sum(Ba * np.conj(Bb)))
