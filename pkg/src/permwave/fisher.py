"""Fisher information and Cramer-Rao bounds for joint delay/Doppler estimation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .codec import WaveformParams, WaveformSymbol


@dataclass(frozen=True)
class FisherParams:
    """Noise level ``N0`` and the finite subpulse bandwidth ``B`` (Hz)."""

    N0: float
    B: float

    def __post_init__(self):
        if not self.N0 > 0:
            raise ValueError(f"N0 must be > 0, got {self.N0!r}")
        if not self.B > 0:
            raise ValueError(f"B must be > 0, got {self.B!r}")

    @property
    def C(self) -> float:
        return 2.0 / (self.N0 * (1.0 + self.N0))

    @classmethod
    def from_snr_db(cls, snr_db: float, B: float) -> "FisherParams":
        """SNR in dB is ``10 log10(1 / N0)``."""
        return cls(N0=10.0 ** (-snr_db / 10.0), B=B)


@dataclass(frozen=True)
class Fim:
    J11: float
    J12: float
    J22: float

    @property
    def J21(self) -> float:
        return self.J12

    def matrix(self) -> np.ndarray:
        return np.array([[self.J11, self.J12], [self.J12, self.J22]])

    @property
    def det(self) -> float:
        return self.J11 * self.J22 - self.J12 ** 2


def _phase_step_sum(symbol: WaveformSymbol, params: WaveformParams) -> float:
    """``L - sum_l cos(w0 T + theta_l - theta_{l+1})``."""
    theta = symbol.phases(params.M)
    w0T = 2 * np.pi * params.f0 * params.T
    return params.L - float(np.sum(np.cos(w0T + theta[:-1] - theta[1:])))


def _weighted_omega_sum(symbol: WaveformSymbol, params: WaveformParams) -> float:
    """``sum_l omega_l (2l + 1)`` over the symbol's subpulse frequencies."""
    omega_sub = params.omegas[np.asarray(symbol.perm)]
    return float(np.sum(omega_sub * (2 * np.arange(params.L) + 1)))


def fim(symbol: WaveformSymbol, params: WaveformParams, fp: FisherParams) -> Fim:
    L, T, C = params.L, params.T, fp.C
    J11 = 2 * C * fp.B / (L * T) * _phase_step_sum(symbol, params)
    J12 = -C * T ** 2 / 2 * _weighted_omega_sum(symbol, params)
    J22 = C * L ** 2 * T ** 2 / 12
    return Fim(J11, J12, J22)


def crlb_full(symbol: WaveformSymbol, params: WaveformParams,
              fp: FisherParams) -> tuple[float, float]:
    """Delay and Doppler CRLBs including the delay-Doppler coupling term.

    Raises ValueError when the information matrix is not positive definite
    for the given ``(B, T, L)``.
    """
    L, T, B, Cinv = params.L, params.T, fp.B, 1.0 / fp.C
    S = _phase_step_sum(symbol, params)
    W = _weighted_omega_sum(symbol, params)
    den_tau = 2 * L * B * S - 3 * T ** 3 * W ** 2
    den_omega = 2 * L ** 2 * T ** 2 * B * S - 3 * L * T ** 5 * W ** 2
    if not (den_tau > 0 and den_omega > 0):
        raise ValueError(
            "Fisher information matrix is not positive definite for "
            f"B={B:g}, T={T:g}, L={L}; increase B*T or reduce T")
    return Cinv * L ** 2 * T / den_tau, 24 * Cinv * B * S / den_omega


def crlb_simplified(symbol: WaveformSymbol, params: WaveformParams,
                    fp: FisherParams) -> tuple[float, float]:
    """CRLBs with the off-diagonal information ignored (looser bounds).

    Returns ``inf`` for the delay bound, with a warning, when the phase
    step sum vanishes.
    """
    L, T, Cinv = params.L, params.T, 1.0 / fp.C
    S = _phase_step_sum(symbol, params)
    omega = 12 * Cinv / (L ** 2 * T ** 2)
    if S <= 0:
        warnings.warn("delay information is zero; CRLB_tau is infinite", RuntimeWarning)
        return float("inf"), omega
    return Cinv * L * T / (2 * fp.B * S), omega


def normalised(crlb: tuple[float, float], params: WaveformParams) -> tuple[float, float]:
    """``(CRLB_tau / T^2, CRLB_omega * (L T)^2)``."""
    return crlb[0] / params.T ** 2, crlb[1] * (params.L * params.T) ** 2
