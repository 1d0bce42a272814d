"""Command-line front end: ``permwave <subcommand> [flags]``.

Tabular results go out as CSV (header row, '.' decimals) or JSON.  Every
run also writes a manifest holding the resolved configuration; passing it
back through ``--from-manifest`` reproduces the run.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings

import numpy as np

from . import __version__

_NOT_CONFIG = {"out", "manifest", "from_manifest", "threads", "format", "summary"}


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[float]:
    """``start:step:stop`` (inclusive), or a comma list, or a single value."""
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3 or parts[1] == 0:
                raise ValueError
            start, step, stop = parts
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            if n < 1:
                raise ValueError
            return [round(start + k * step, 12) for k in range(n)]
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected start:step:stop or a comma list, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# -- argument groups ----------------------------------------------------------

def _add_waveform(p, M_default=2):
    g = p.add_argument_group("waveform")
    g.add_argument("--L", type=int, default=4, help="number of subpulses / tones (default 4)")
    g.add_argument("--M", type=int, default=M_default, help=f"PSK order per subpulse (default {M_default})")
    g.add_argument("--T", type=float, default=1.0, help="subpulse duration in seconds (default 1)")
    g.add_argument("--f0", type=float, default=0.0, help="lowest tone in Hz (default 0)")
    g.add_argument("--n-step", type=int, default=1,
                   help="tone spacing in units of 1/T (integer, default 1)")
    g.add_argument("--E", type=float, default=1.0, help="block energy in joules (default 1)")


def _add_symbol(p):
    p.add_argument("--index", type=int, default=1, help="1-based message index (default 1)")


def _add_channel(p):
    g = p.add_argument_group("channel")
    g.add_argument("--channel", choices=["awgn", "rayleigh", "rician"], default="awgn",
                   help="channel model (default awgn)")
    g.add_argument("--N", "--antennas", dest="N", type=int, default=2,
                   help="receive antennas (default 2)")
    g.add_argument("--K", type=float, default=0.0,
                   help="Rician factor, LOS/scattered power ratio, linear (default 0)")
    g.add_argument("--rho", type=float, default=0.0,
                   help="exponential antenna correlation coefficient, 0..1 (default 0)")


def _add_snr(p, default):
    p.add_argument("--snr", type=parse_range, default=parse_range(default),
                   help=f"SNR sweep in dB, 10log10(E/N0), as start:step:stop (default {default})")


def _add_grid(p):
    g = p.add_argument_group("delay-Doppler grid")
    g.add_argument("--n-tau", type=int, default=512, help="delay samples (default 512)")
    g.add_argument("--n-omega", type=int, default=512, help="Doppler samples (default 512)")
    g.add_argument("--tau-extent", type=float, default=1.0,
                   help="delay half-span in units of L*T (default 1)")
    g.add_argument("--omega-extent", type=float, default=1.0,
                   help="Doppler half-span in units of 2*pi*L*n_step/T rad/s (default 1)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv",
                        help="output format (default csv)")
    common.add_argument("--manifest", default=None,
                        help="manifest path (default <out>.manifest.json, or stderr)")
    common.add_argument("--from-manifest", default=None,
                        help="take defaults from a previously written manifest")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default $PERMWAVE_THREADS, else all cores)")

    parser = argparse.ArgumentParser(prog="permwave", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="subcommand")
    sub.required = True

    p = sub.add_parser("encode", parents=[common], help="message index -> tone order and phases")
    _add_waveform(p)
    _add_symbol(p)

    p = sub.add_parser("decode", parents=[common], help="tone order and phases -> message index")
    _add_waveform(p)
    p.add_argument("--perm", type=_int_list, help="tone order, comma separated, 0-based")
    p.add_argument("--phases", type=_int_list, help="phase digits 0..M-1, comma separated")
    p.add_argument("--input", help="read an encode output file ('-' for stdin)")

    p = sub.add_parser("synth", parents=[common], help="sampled complex envelope (t, re, im)")
    _add_waveform(p)
    _add_symbol(p)
    p.add_argument("--oversampling", type=int, default=16,
                   help="samples per 1/(L*n_step/T) interval, integer (default 16)")

    p = sub.add_parser("af", parents=[common], help="|A(tau, omega)| on a grid")
    _add_waveform(p)
    _add_symbol(p)
    _add_grid(p)

    p = sub.add_parser("af-cuts", parents=[common],
                       help="zero-Doppler and zero-delay cuts; --out is a file prefix")
    _add_waveform(p)
    _add_symbol(p)
    _add_grid(p)

    p = sub.add_parser("psl-stats", parents=[common], help="peak sidelobe statistics over random symbols")
    _add_waveform(p, M_default=4)
    _add_grid(p)
    p.set_defaults(L=8)
    p.add_argument("--samples", type=int, default=2000, help="number of random symbols (default 2000)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--zero-phases", action="store_true", help="force all phases to zero")
    p.add_argument("--exclusion-tau", type=float, default=1.0,
                   help="main-lobe half-width in delay, units of T (default 1)")
    p.add_argument("--exclusion-omega", type=float, default=1.0,
                   help="main-lobe half-width in Doppler, units of 2*pi/T rad/s (default 1)")
    p.add_argument("--summary", default=None, help="summary JSON path (default stdout)")

    p = sub.add_parser("crlb", parents=[common], help="delay and Doppler CRLBs versus SNR")
    _add_waveform(p)
    _add_symbol(p)
    _add_snr(p, "0:5:30")
    p.add_argument("--B", type=float, default=None,
                   help="subpulse bandwidth in Hz (default 10/T)")
    p.add_argument("--normalise", action="store_true",
                   help="report CRLB_tau/T^2 and CRLB_omega*(L*T)^2")

    p = sub.add_parser("bler", parents=[common], help="Monte Carlo block error rate")
    _add_waveform(p)
    _add_channel(p)
    _add_snr(p, "0:2:20")
    p.add_argument("--max-trials", type=int, default=10**6, help="trial cap per SNR point (default 1e6)")
    p.add_argument("--target-errors", type=int, default=200, help="errors to stop at (default 200)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--receiver", choices=["efficient", "exhaustive", "both"], default="efficient",
                   help="detector (default efficient); 'both' cross-checks every trial")
    p.add_argument("--batch-size", type=int, default=512, help="trials per RNG batch (default 512)")

    p = sub.add_parser("bounds", parents=[common], help="union bound, NN approximation, new upper bound")
    _add_waveform(p)
    _add_channel(p)
    _add_snr(p, "0:2:20")

    p = sub.add_parser("reproduce", parents=[common], help="simulation plus overlays for one figure")
    p.add_argument("--figure", choices=["awgn", "rician", "rayleigh"], required=True)
    p.add_argument("--scale", choices=["desk", "paper"], default="desk",
                   help="desk: L=4, M=4; paper: L=8, M=4 (default desk)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--max-trials", type=int, default=10**5, help="trial cap per point (default 1e5)")
    p.add_argument("--target-errors", type=int, default=200, help="errors to stop at (default 200)")
    p.add_argument("--snr", type=parse_range, default=None,
                   help="SNR sweep in dB as start:step:stop (default per figure)")
    return parser


# -- helpers -----------------------------------------------------------------

def _params(a):
    from .codec import WaveformParams
    return WaveformParams(L=a.L, M=a.M, T=a.T, f0=a.f0, n_step=a.n_step, E=a.E)


def _channel(a):
    from .channel import build_model
    return build_model(a.channel, a.N, K=a.K, rho=a.rho)


def _grid(a):
    from .ambiguity import GridSpec
    return GridSpec(a.n_tau, a.n_omega, a.tau_extent, a.omega_extent)


def _csv_text(columns, rows):
    from .sim import write_csv
    return write_csv([dict(zip(columns, r)) if not isinstance(r, dict) else r for r in rows], columns)


def _json_text(columns, rows):
    out = [dict(zip(columns, r)) if not isinstance(r, dict) else r for r in rows]
    return json.dumps(out, indent=1, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x))


def _emit(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _table(a, columns, rows, path=None):
    text = _json_text(columns, rows) if a.format == "json" else _csv_text(columns, rows)
    _emit(text, a.out if path is None else path)


# -- subcommands ---------------------------------------------------------------

def cmd_encode(a):
    from .codec import encode_index
    sym = encode_index(a.index, _params(a))
    row = dict(index=sym.index, perm=",".join(map(str, sym.perm)),
               phases=",".join(map(str, sym.phase_idx)))
    if a.format == "json":
        _emit(json.dumps(row) + "\n", a.out)
    else:
        _table(a, ["index", "perm", "phases"], [row])


def _read_encoded(path):
    import csv
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path) as fh:
            text = fh.read()
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        obj = json.loads(text)
        obj = obj[0] if isinstance(obj, list) else obj
    else:
        obj = next(csv.DictReader(text.splitlines()))
    return _int_list(str(obj["perm"])), _int_list(str(obj["phases"]))


def cmd_decode(a):
    from .codec import decode_parts
    if a.input:
        perm, phases = _read_encoded(a.input)
    elif a.perm is not None and a.phases is not None:
        perm, phases = a.perm, a.phases
    else:
        raise UsageError("decode needs --perm and --phases, or --input")
    idx = decode_parts(perm, phases, _params(a))
    if a.format == "json":
        _emit(json.dumps({"index": idx}) + "\n", a.out)
    else:
        _table(a, ["index"], [[idx]])


def cmd_synth(a):
    from .codec import encode_index
    from .waveform import synthesize
    params = _params(a)
    sig = synthesize(encode_index(a.index, params), params, a.oversampling)
    _table(a, ["t", "re", "im"],
           zip(sig.t.tolist(), sig.samples.real.tolist(), sig.samples.imag.tolist()))


def cmd_af(a):
    from .ambiguity import surface
    from .codec import encode_index
    params = _params(a)
    surf = surface(encode_index(a.index, params), params, _grid(a), a.threads)
    tt, ww = np.meshgrid(surf.tau_grid, surf.omega_grid, indexing="ij")
    _table(a, ["tau", "omega", "value"],
           zip(tt.ravel().tolist(), ww.ravel().tolist(), surf.values.ravel().tolist()))


def cmd_af_cuts(a):
    from .ambiguity import zero_delay_cut, zero_doppler_cut
    from .codec import encode_index
    params = _params(a)
    taus, omegas = _grid(a).axes(params)
    sym = encode_index(a.index, params)
    prefix = a.out or "af-cuts"
    ext = "json" if a.format == "json" else "csv"
    _table(a, ["tau", "value"], zip(taus.tolist(), zero_doppler_cut(sym, params, taus).tolist()),
           f"{prefix}.zero_doppler.{ext}")
    _table(a, ["omega", "value"], zip(omegas.tolist(), zero_delay_cut(params, omegas).tolist()),
           f"{prefix}.zero_delay.{ext}")


def cmd_psl_stats(a):
    from .ambiguity import ExclusionSpec, psl_statistics
    params = _params(a)
    stats = psl_statistics(params, a.samples, a.seed, _grid(a),
                           ExclusionSpec(a.exclusion_tau, a.exclusion_omega),
                           zero_phases=a.zero_phases, workers=a.threads)
    if a.out:
        _table(a, ["draw", "psl"], enumerate(stats.samples.tolist()))
    q = np.linspace(0, 1, 21)
    summary = {"mean": stats.mean, "std": float(stats.samples.std(ddof=1)) if a.samples > 1 else 0.0,
               "n": a.samples, "cdf_knots": {"p": q.tolist(),
                                             "psl": np.quantile(stats.samples, q).tolist()}}
    _emit(json.dumps(summary, indent=1) + "\n", a.summary)


def cmd_crlb(a):
    from .codec import encode_index
    from .fisher import FisherParams, crlb_full, crlb_simplified, normalised
    params = _params(a)
    sym = encode_index(a.index, params)
    B = a.B if a.B is not None else 10.0 / params.T
    rows = []
    for s in a.snr:
        fp = FisherParams.from_snr_db(s, B)
        try:
            full = crlb_full(sym, params, fp)
        except ValueError as exc:
            warnings.warn(str(exc))
            full = (None, None)
        simp = crlb_simplified(sym, params, fp)
        if a.normalise:
            simp = normalised(simp, params)
            if full[0] is not None:
                full = normalised(full, params)
        rows.append(dict(snr_db=s, crlb_tau_full=full[0], crlb_tau_simpl=simp[0],
                         crlb_omega_full=full[1], crlb_omega_simpl=simp[1]))
    _table(a, ["snr_db", "crlb_tau_full", "crlb_tau_simpl", "crlb_omega_full",
               "crlb_omega_simpl"], rows)


def cmd_bler(a):
    from .sim import BLER_COLUMNS, records_to_rows, run_bler
    recs = run_bler(_params(a), _channel(a), a.snr, a.max_trials, a.target_errors, a.seed,
                    a.receiver, a.batch_size, a.threads)
    _table(a, BLER_COLUMNS, records_to_rows(recs))


def cmd_bounds(a):
    from .bounds import new_upper_bound_rayleigh, nn_approximation, union_bound
    params, ch = _params(a), _channel(a)
    rows = []
    for s in a.snr:
        N0 = params.E / 10 ** (s / 10)
        row = dict(snr_db=s, union=union_bound(params, ch, N0))
        if params.M >= 2:
            row["nn"] = nn_approximation(params, ch, N0)
        if ch.kind == "rayleigh":
            row["new_upper"] = new_upper_bound_rayleigh(params, ch, N0)[0]
        rows.append(row)
    _table(a, ["snr_db", "union", "nn", "new_upper"], rows)


def cmd_reproduce(a):
    from .sim import FIGURE_COLUMNS, reproduce_figure
    rows = reproduce_figure(a.figure, a.scale, a.seed, a.max_trials, a.target_errors,
                            a.threads, a.snr)
    _table(a, FIGURE_COLUMNS, rows)


COMMANDS = {
    "encode": cmd_encode, "decode": cmd_decode, "synth": cmd_synth, "af": cmd_af,
    "af-cuts": cmd_af_cuts, "psl-stats": cmd_psl_stats, "crlb": cmd_crlb, "bler": cmd_bler,
    "bounds": cmd_bounds, "reproduce": cmd_reproduce,
}


def _write_manifest(a, config):
    from .sim import manifest
    text = json.dumps(manifest(config), indent=1, sort_keys=True, default=_jsonable) + "\n"
    path = a.manifest or (f"{a.out}.manifest.json" if a.out not in (None, "-") else None)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)


def _parse(parser, argv):
    args = parser.parse_args(argv)
    if args.from_manifest:
        with open(args.from_manifest) as fh:
            config = json.load(fh)["config"]
        if config.get("command") != args.command:
            raise UsageError(f"manifest is for {config.get('command')!r}, not {args.command!r}")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**{k: v for k, v in config.items() if k != "command"})
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _parse(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, OSError, ValueError, KeyError) as exc:
        parser.print_usage(sys.stderr)
        print(f"permwave: error: {exc}", file=sys.stderr)
        return 2
    if args.threads is not None:
        if args.threads < 1:
            print("permwave: error: --threads must be >= 1", file=sys.stderr)
            return 2
        os.environ["PERMWAVE_THREADS"] = str(args.threads)
    config = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda m, *rest, **kw: print(f"permwave: warning: {m}",
                                                               file=sys.stderr)
            COMMANDS[args.command](args)
        _write_manifest(args, config)
    except UsageError as exc:
        print(f"permwave: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any runtime failure maps to exit 1
        print(f"permwave: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
