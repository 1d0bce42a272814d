"""Correlated Rician / Rayleigh / AWGN receive-array channels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KINDS = ("awgn", "rayleigh", "rician")


@dataclass(frozen=True)
class ChannelModel:
    kind: str
    N: int
    K: float = 0.0
    rho: float = 0.0
    los: np.ndarray = field(default=None, repr=False)
    R: np.ndarray = field(init=False, repr=False)
    eigvals: np.ndarray = field(init=False, repr=False)
    V: np.ndarray = field(init=False, repr=False)
    R_sqrt: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be an integer >= 1, got {self.N!r}")
        if not 0 <= self.rho < 1:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho!r}")
        if self.K < 0:
            raise ValueError(f"K must be >= 0, got {self.K!r}")
        idx = np.arange(self.N)
        R = self.rho ** np.abs(idx[:, None] - idx[None, :]).astype(float)
        lam, V = np.linalg.eigh(R)
        order = np.argsort(lam)[::-1]
        lam = np.clip(lam[order], 0.0, None)
        V = V[:, order]
        los = np.ones(self.N, dtype=complex) if self.los is None else np.asarray(self.los, dtype=complex)
        if los.shape != (self.N,) or not np.allclose(np.abs(los), 1.0):
            raise ValueError("LOS vector must have N unit-modulus entries")
        set_ = object.__setattr__
        set_(self, "R", R)
        set_(self, "eigvals", lam)
        set_(self, "V", V)
        set_(self, "R_sqrt", (V * np.sqrt(lam)) @ V.conj().T)
        set_(self, "los", los)
        if self.kind == "rayleigh":
            set_(self, "K", 0.0)

    @property
    def los_projection(self) -> np.ndarray:
        """``|(V^H Delta)_j|^2`` per eigen-direction."""
        return np.abs(self.V.conj().T @ self.los) ** 2

    def distinct_eigenvalues(self, rtol: float = 1e-9) -> bool:
        lam = self.eigvals
        gaps = np.abs(lam[:, None] - lam[None, :]) + np.eye(len(lam))
        return bool(np.all(gaps > rtol * max(lam.max(), 1.0)))

    def describe(self) -> str:
        if self.kind == "awgn":
            return f"awgn(N={self.N})"
        if self.kind == "rayleigh":
            return f"rayleigh(N={self.N},rho={self.rho:g})"
        return f"rician(N={self.N},K={self.K:g},rho={self.rho:g})"


def build_model(kind: str, N: int, K: float = 0.0, rho: float = 0.0,
                steering_angle: float | None = None) -> ChannelModel:
    """Build a channel; ``steering_angle`` (rad) sets the LOS vector to a ULA
    steering vector ``exp(j pi i sin(phi))`` instead of all ones."""
    los = None
    if steering_angle is not None:
        los = np.exp(1j * np.pi * np.arange(N) * np.sin(steering_angle))
    return ChannelModel(kind.lower(), int(N), float(K), float(rho), los)


def complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    """CN(0, 1) samples: real and imaginary parts each N(0, 1/2)."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) * np.sqrt(0.5)


def sample_channel(model: ChannelModel, rng: np.random.Generator, size=None) -> np.ndarray:
    """Channel vector(s) ``h``; shape ``(N,)`` or ``(size, N)``.

    AWGN returns the all-ones vector (``h^H h = N``).
    """
    shape = (model.N,) if size is None else (size, model.N)
    if model.kind == "awgn":
        return np.ones(shape, dtype=complex)
    u = complex_normal(rng, shape)
    scattered = u @ model.R_sqrt.T
    K = model.K
    return np.sqrt(K / (K + 1)) * model.los + np.sqrt(1 / (K + 1)) * scattered


def gain_coefficients(model: ChannelModel) -> np.ndarray:
    """Partial-fraction weights ``b_j`` of the Rayleigh gain density."""
    if model.kind != "rayleigh":
        raise ValueError("gain distribution is only available for Rayleigh channels")
    if not model.distinct_eigenvalues():
        raise ValueError(
            "correlation eigenvalues are not distinct (e.g. rho=0 with N>1); "
            "the gain density expansion is singular for this model")
    lam = model.eigvals
    b = np.empty_like(lam)
    for j, lj in enumerate(lam):
        others = np.delete(lam, j)
        b[j] = lj ** (len(lam) - 1) * np.prod(1.0 / (lj - others))
    return b


def gain_pdf(model: ChannelModel, x) -> np.ndarray:
    b = gain_coefficients(model)
    lam = model.eigvals
    x = np.asarray(x, dtype=float)
    xs = np.clip(x, 0.0, None)[..., None]
    val = np.sum(b / lam * np.exp(-xs / lam), axis=-1)
    return np.where(x >= 0, val, 0.0)


def gain_cdf(model: ChannelModel, x) -> np.ndarray:
    b = gain_coefficients(model)
    lam = model.eigvals
    x = np.asarray(x, dtype=float)
    xs = np.clip(x, 0.0, None)[..., None]
    val = np.sum(b * -np.expm1(-xs / lam), axis=-1)
    return np.where(x >= 0, val, 0.0)


def gain_quantile(model: ChannelModel, q: float) -> float:
    """Inverse of :func:`gain_cdf` by bracketing root search."""
    from scipy.optimize import brentq

    hi = float(model.eigvals.max())
    while gain_cdf(model, hi) < q:
        hi *= 2
    return brentq(lambda x: float(gain_cdf(model, x)) - q, 0.0, hi, xtol=1e-12, rtol=1e-12)
