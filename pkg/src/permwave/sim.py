"""Monte Carlo block-error-rate engine.

Trials run in fixed-size batches.  Batch ``b`` at SNR index ``s`` draws all
its randomness from ``SeedSequence([seed, s, b])`` and batches are folded in
order, stopping at the first batch boundary where the error target or trial
cap is reached.  Worker count therefore never changes the result.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import norm

from . import kernels
from .channel import ChannelModel, build_model, sample_channel
from .codec import WaveformParams, indices_of, total_waveforms
from .receiver import (EXHAUSTIVE_LIMIT, correlation_matrix, detect_efficient_batch,
                       detect_exhaustive_batch, observe_batch)

RECEIVERS = ("efficient", "exhaustive", "both")
SNR_NOTE = "snr_db = 10*log10(E/N0) per receive antenna; E[h^H h] = N"


class ReceiverMismatch(RuntimeError):
    """The Hungarian and exhaustive receivers disagreed on a trial."""


@dataclass
class BlerRecord:
    snr_db: float
    trials: int
    errors: int
    seed: int
    channel: str
    receiver: str

    @property
    def bler(self) -> float:
        return self.errors / self.trials if self.trials else 0.0

    @property
    def ci95(self) -> float:
        return wilson_halfwidth(self.errors, self.trials)

    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.errors, self.trials)


def wilson_interval(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    z = float(norm.ppf(0.5 + level / 2))
    p = k / n
    den = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def wilson_halfwidth(k: int, n: int, level: float = 0.95) -> float:
    lo, hi = wilson_interval(k, n, level)
    return (hi - lo) / 2


def _draw_symbols(rng, params: WaveformParams, size: int):
    perms = np.argsort(rng.random((size, params.L)), axis=1)
    phases = rng.integers(0, params.M, size=(size, params.L))
    return perms, phases


def run_batch(params: WaveformParams, channel: ChannelModel, N0: float, size: int,
              seed_words, receiver_kind: str) -> int:
    """Simulate one batch and return its error count."""
    rng = np.random.default_rng(np.random.SeedSequence(list(seed_words)))
    perms, phases = _draw_symbols(rng, params, size)
    H = sample_channel(channel, rng, size)
    obs = observe_batch(perms, phases, H, params, N0, rng)
    X = correlation_matrix(obs, H, params)
    sent = indices_of(perms, phases, params)
    if receiver_kind in ("efficient", "both"):
        dp, dq = detect_efficient_batch(X, params)
        got = indices_of(dp, dq, params)
    if receiver_kind in ("exhaustive", "both"):
        got_ml = detect_exhaustive_batch(X, params)
        if receiver_kind == "both":
            bad = np.flatnonzero(got != got_ml)
            if bad.size:
                t = int(bad[0])
                raise ReceiverMismatch(
                    f"receivers disagree (batch seed {tuple(seed_words)}, trial {t}): "
                    f"sent {sent[t] + 1}, hungarian {got[t] + 1}, exhaustive {got_ml[t] + 1}; "
                    f"h={H[t].tolist()}; X={X[t].tolist()}")
        else:
            got = got_ml
    return int(np.count_nonzero(got != sent))


def _snr_point(params, channel, snr_db, snr_idx, max_trials, target_errors, seed,
               receiver_kind, batch_size, pool, workers) -> BlerRecord:
    N0 = params.E / 10 ** (snr_db / 10)
    trials = errors = 0
    batch = 0
    while trials < max_trials and errors < target_errors:
        sizes = []
        budget = max_trials - trials
        for _ in range(workers):
            if budget <= 0:
                break
            sizes.append(min(batch_size, budget))
            budget -= sizes[-1]
        jobs = [(params, channel, N0, n, (seed, snr_idx, batch + j), receiver_kind)
                for j, n in enumerate(sizes)]
        results = pool.map(lambda a: run_batch(*a), jobs) if pool else map(lambda a: run_batch(*a), jobs)
        for n, e in zip(sizes, results):
            trials += n
            errors += e
            batch += 1
            if errors >= target_errors:
                break
    return BlerRecord(float(snr_db), trials, errors, seed, channel.describe(), receiver_kind)


def run_bler(params: WaveformParams, channel: ChannelModel, snr_list, max_trials: int = 10**6,
             target_errors: int = 200, seed: int = 0, receiver_kind: str = "efficient",
             batch_size: int = 512, workers: int | None = None) -> list[BlerRecord]:
    """Simulated BLER at each SNR (dB)."""
    if max_trials < 1:
        raise ValueError("max_trials must be at least 1")
    if receiver_kind not in RECEIVERS:
        raise ValueError(f"receiver_kind must be one of {RECEIVERS}")
    if receiver_kind != "efficient" and total_waveforms(params) > EXHAUSTIVE_LIMIT:
        raise ValueError("exhaustive receiver needs M_T <= 1e6")
    workers = workers or kernels.default_threads()
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        return [_snr_point(params, channel, s, k, int(max_trials), target_errors, seed,
                           receiver_kind, batch_size, pool, workers)
                for k, s in enumerate(snr_list)]
    finally:
        if pool:
            pool.shutdown()


# -- output ----------------------------------------------------------------

def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def write_csv(rows: list[dict], columns: list[str], stream=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


BLER_COLUMNS = ["snr_db", "trials", "errors", "bler", "ci95"]


def records_to_rows(records: list[BlerRecord]) -> list[dict]:
    return [dict(snr_db=r.snr_db, trials=r.trials, errors=r.errors, bler=r.bler, ci95=r.ci95)
            for r in records]


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def manifest(config: dict) -> dict:
    return {"config": config, "config_sha256": config_hash(config), "snr_definition": SNR_NOTE}


# -- figure bundles -----------------------------------------------------------

FIGURE_COLUMNS = ["curve", "snr_db", "trials", "errors", "bler", "ci95", "union", "nn", "new_upper"]


def figure_setup(fig_id: str, scale: str) -> dict:
    """Waveform, channels and analytic overlays for each figure bundle."""
    if scale not in ("desk", "paper"):
        raise ValueError("scale must be 'desk' or 'paper'")
    params = WaveformParams(L=4, M=4) if scale == "desk" else WaveformParams(L=8, M=4)
    if fig_id == "awgn":
        chans = {f"N={n}": build_model("awgn", n) for n in (2, 4)}
        overlays = ("union", "nn") if scale == "desk" else ("nn",)
        snr = np.arange(0, 21, 2.0)
    elif fig_id == "rician":
        chans = {f"K={k}": build_model("rician", 2, K=k, rho=0.5) for k in (0.25, 2.5, 10)}
        overlays = ("nn",)
        snr = np.arange(0, 31, 3.0)
    elif fig_id == "rayleigh":
        chans = {f"N={n}": build_model("rayleigh", n, rho=0.5) for n in (2, 4)}
        overlays = ("new_upper", "nn")
        snr = np.arange(0, 31, 3.0)
    else:
        raise ValueError(f"unknown figure {fig_id!r}")
    return dict(params=params, channels=chans, overlays=overlays, snr=snr)


def reproduce_figure(fig_id: str, scale: str = "desk", seed: int = 0, max_trials: int = 10**5,
                     target_errors: int = 200, workers: int | None = None,
                     snr_db=None) -> list[dict]:
    """Simulation plus analytic overlays as long-format rows (see ``FIGURE_COLUMNS``)."""
    from .bounds import nn_approximation, new_upper_bound_rayleigh, union_bound

    setup = figure_setup(fig_id, scale)
    params = setup["params"]
    snr = np.asarray(setup["snr"] if snr_db is None else snr_db, dtype=float)
    rows = []
    for name, ch in setup["channels"].items():
        recs = run_bler(params, ch, snr, max_trials, target_errors, seed, "efficient",
                        workers=workers)
        for r in recs:
            N0 = params.E / 10 ** (r.snr_db / 10)
            row = dict(curve=name, snr_db=r.snr_db, trials=r.trials, errors=r.errors,
                       bler=r.bler, ci95=r.ci95)
            if "union" in setup["overlays"]:
                row["union"] = union_bound(params, ch, N0)
            if "nn" in setup["overlays"]:
                row["nn"] = nn_approximation(params, ch, N0)
            if "new_upper" in setup["overlays"]:
                row["new_upper"] = new_upper_bound_rayleigh(params, ch, N0)[0]
            rows.append(row)
    return rows
