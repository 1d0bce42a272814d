"""Analytic ambiguity function of permuted, phase-coded stepped-frequency symbols.

All values use the unit-energy normalisation, so ``|A(0, 0)| = 1``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .codec import WaveformParams, WaveformSymbol, random_symbol


def subpulse_caf(tau, omega, T: float):
    """Complex AF of the rectangular subpulse of length ``T``.

    Uses ``exp(j w (T + tau)/2) * D * sinc(w D / 2)`` with ``D = T - |tau|``,
    which equals both branches of the piecewise form and stays accurate as
    ``w -> 0``.
    """
    tau = np.asarray(tau, dtype=float)
    omega = np.asarray(omega, dtype=float)
    D = np.where(np.abs(tau) < T, T - np.abs(tau), 0.0)
    val = D * kernels._pykernels._sinc(omega * D / 2) * np.exp(1j * omega * (T + tau) / 2)
    return val if val.ndim else complex(val)


def _symbol_arrays(symbol: WaveformSymbol, params: WaveformParams):
    omega_sub = params.omegas[np.asarray(symbol.perm)]
    return omega_sub, symbol.phases(params.M)


def caf(symbol: WaveformSymbol, params: WaveformParams, tau, omega):
    """Complex AF at ``(tau, omega)`` (broadcast), unit energy."""
    omega_sub, theta = _symbol_arrays(symbol, params)
    val = kernels.af_points(omega_sub, theta, params.T, tau, omega)
    return val if np.ndim(val) else complex(val)


def zero_doppler_cut(symbol: WaveformSymbol, params: WaveformParams, tau_grid) -> np.ndarray:
    return np.abs(caf(symbol, params, np.asarray(tau_grid, dtype=float), 0.0))


def zero_delay_cut(params: WaveformParams, omega_grid) -> np.ndarray:
    """Symbol-independent closed form ``|A_p(0,w)| |sum_l e^{j w l T}| / (L T)``."""
    omega = np.asarray(omega_grid, dtype=float)
    L, T = params.L, params.T
    geo = np.exp(1j * np.multiply.outer(omega, np.arange(L) * T)).sum(axis=-1)
    return np.abs(subpulse_caf(0.0, omega, T)) * np.abs(geo) / (L * T)


@dataclass(frozen=True)
class GridSpec:
    """Uniform delay-Doppler grid, in units of the waveform.

    Delays span ``+-tau_extent * L*T``; Doppler spans
    ``+-omega_extent * 2*pi*L*n_step/T`` (the full tone bandwidth).
    """

    n_tau: int = 512
    n_omega: int = 512
    tau_extent: float = 1.0
    omega_extent: float = 1.0
    tau_offset: float = 0.0      # shift, as a fraction of the tau spacing
    omega_offset: float = 0.0

    def axes(self, params: WaveformParams) -> tuple[np.ndarray, np.ndarray]:
        tmax = self.tau_extent * params.L * params.T
        wmax = self.omega_extent * 2 * np.pi * params.L * params.n_step / params.T
        taus = np.linspace(-tmax, tmax, self.n_tau)
        omegas = np.linspace(-wmax, wmax, self.n_omega)
        if self.n_tau > 1:
            taus = taus + self.tau_offset * (taus[1] - taus[0])
        if self.n_omega > 1:
            omegas = omegas + self.omega_offset * (omegas[1] - omegas[0])
        return taus, omegas


@dataclass(frozen=True)
class ExclusionSpec:
    """Main-lobe region removed before taking the peak sidelobe.

    A grid point is excluded when ``|tau| < tau_half * T`` and
    ``|omega| < omega_half * 2*pi / T``.  The default is the main lobe of
    the single-subpulse AF: one subpulse in delay, out to the first sinc
    null in Doppler.  Inside it every subpulse overlaps only itself and
    ``|A|`` is a near-coherent sum that says nothing about the permutation.
    """

    tau_half: float = 1.0
    omega_half: float = 1.0

    def mask(self, params: WaveformParams, taus, omegas) -> np.ndarray:
        T = params.T
        inner_t = np.abs(taus) < self.tau_half * T
        inner_w = np.abs(omegas) < self.omega_half * 2 * np.pi / T
        return inner_t[:, None] & inner_w[None, :]


@dataclass
class AmbiguitySurface:
    tau_grid: np.ndarray
    omega_grid: np.ndarray
    values: np.ndarray

    def volume(self) -> float:
        """sum |A|^2 dtau domega / 2pi over the grid (1 for the full plane)."""
        dt = self.tau_grid[1] - self.tau_grid[0]
        dw = self.omega_grid[1] - self.omega_grid[0]
        return float(np.sum(self.values ** 2) * dt * dw / (2 * np.pi))


def surface(symbol: WaveformSymbol, params: WaveformParams,
            grid: GridSpec = GridSpec(), threads: int | None = None) -> AmbiguitySurface:
    taus, omegas = grid.axes(params)
    omega_sub, theta = _symbol_arrays(symbol, params)
    A = np.abs(kernels.af_grid(omega_sub, theta, params.T, taus, omegas, threads))
    return AmbiguitySurface(taus, omegas, A)


def peak_sidelobe(symbol: WaveformSymbol, params: WaveformParams,
                  grid: GridSpec = GridSpec(), exclusion: ExclusionSpec = ExclusionSpec(),
                  threads: int | None = None) -> float:
    """Largest ``|A|`` on the grid outside the main-lobe exclusion."""
    surf = surface(symbol, params, grid, threads)
    keep = ~exclusion.mask(params, surf.tau_grid, surf.omega_grid)
    if not keep.any():
        raise ValueError("grid is empty after main-lobe exclusion")
    return float(surf.values[keep].max())


@dataclass
class PslStats:
    samples: np.ndarray
    mean: float = field(init=False)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        self.mean = float(self.samples.mean())

    def cdf(self) -> tuple[np.ndarray, np.ndarray]:
        """Empirical CDF knots ``(x, F(x))``."""
        x = np.sort(self.samples)
        return x, np.arange(1, len(x) + 1) / len(x)

    def pdf(self, bins: int = 40) -> tuple[np.ndarray, np.ndarray]:
        dens, edges = np.histogram(self.samples, bins=bins, density=True)
        return 0.5 * (edges[1:] + edges[:-1]), dens


def psl_statistics(params: WaveformParams, n_samples: int, seed: int,
                   grid: GridSpec = GridSpec(), exclusion: ExclusionSpec = ExclusionSpec(),
                   zero_phases: bool = False, workers: int | None = None) -> PslStats:
    """PSL of ``n_samples`` uniformly drawn symbols.

    Draw ``k`` uses its own stream ``SeedSequence([seed, k])`` so results
    do not depend on ``workers``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")

    def one(k: int) -> float:
        rng = np.random.default_rng(np.random.SeedSequence([seed, k]))
        sym = random_symbol(params, rng, zero_phases=zero_phases)
        return peak_sidelobe(sym, params, grid, exclusion, threads=1)

    workers = workers or kernels.default_threads()
    if workers == 1:
        samples = [one(k) for k in range(n_samples)]
    else:
        with ThreadPoolExecutor(workers) as pool:
            samples = list(pool.map(one, range(n_samples)))
    return PslStats(np.array(samples))
