"""
Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

import argparse
import logging
import sys

import yaml

from .detect import multiplication_count_cd, multiplication_count_ocd
from .errors import ConfigError
from .fxp import FixedPointFormat
from .sim import Detector, SimConfig, emit_csv, run_sweep

log = logging.getLogger("ocdetect")

# config-file key -> SimConfig field
_SIM_KEYS = {
    "b": "B",
    "u": "U",
    "mod": "scheme",
    "detector": "detector",
    "k": "K",
    "ebn0": "ebn0_grid",
    "trials": "trials_per_point",
    "seed": "master_seed",
    "fxp": "fxp_format",
    "workers": "workers",
    "timing": "record_timing",
    "out": "out",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def parse_grid(text):
    """``"start:step:stop"`` (stop inclusive) or a single value, in dB."""
    if isinstance(text, (int, float)):
        return (float(text),)
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    parts = str(text).split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"bad Eb/N0 grid {text!r}") from None
    if len(vals) == 1:
        return (vals[0],)
    if len(vals) != 3 or vals[1] <= 0:
        raise ConfigError(f"Eb/N0 grid must be start:step:stop with step > 0, got {text!r}")
    start, step, stop = vals
    n = int(round((stop - start) / step)) + 1
    if n < 1:
        raise ConfigError(f"empty Eb/N0 grid {text!r}")
    return tuple(round(start + i * step, 12) for i in range(n))


def _build_parser():
    p = _Parser(prog="ocdetect", description=__doc__.splitlines()[1])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run an Eb/N0 sweep and write CSV")
    s.add_argument("--config", help="YAML/JSON file with the same keys as the flags")
    s.add_argument("--b", type=int)
    s.add_argument("--u", type=int)
    s.add_argument("--mod", choices=["bpsk", "qpsk", "qam16", "qam64"])
    s.add_argument("--detector", choices=[d.value for d in Detector])
    s.add_argument("--k", type=int)
    s.add_argument("--ebn0", help="start:step:stop in dB")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--fxp", help="fixed-point format total:frac, e.g. 16:11")
    s.add_argument("--workers", type=int)
    s.add_argument("--timing", action="store_true", default=None,
                   help="record wall time (breaks byte-reproducibility)")
    s.add_argument("--out")

    sub.add_parser("verify", help="run fast self-checks")

    c = sub.add_parser("count", help="print real-multiplication counts per sweep")
    c.add_argument("--b", type=int, required=True)
    c.add_argument("--u", type=int, required=True)
    c.add_argument("--k", type=int, default=1)
    return p


def _sim_settings(args):
    settings = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = yaml.safe_load(fh) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a mapping")
        unknown = set(loaded) - set(_SIM_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        settings.update(loaded)
    for key in _SIM_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val

    missing = {"b", "u", "mod", "detector", "k", "ebn0", "trials", "seed", "out"} - set(settings)
    if missing:
        raise ConfigError(f"missing settings: {', '.join(sorted(missing))}")
    out = settings.pop("out")
    kwargs = {_SIM_KEYS[k]: v for k, v in settings.items()}
    kwargs["ebn0_grid"] = parse_grid(kwargs["ebn0_grid"])
    if kwargs.get("fxp_format") is not None:
        kwargs["fxp_format"] = FixedPointFormat.parse(str(kwargs["fxp_format"]))
    kwargs["record_timing"] = bool(kwargs.get("record_timing", False))
    try:
        return SimConfig(**kwargs), out
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _simulate(args):
    cfg, out = _sim_settings(args)
    log.info("sweeping %s over %d points", cfg.detector.value, len(cfg.ebn0_grid))
    report = run_sweep(cfg)
    emit_csv(report, out)
    for p in report.points:
        print(f"{p.detector} Eb/N0={p.ebn0_db:g} dB K={p.K}: BER={p.ber:.3e} SER={p.ser:.3e}")
    return 0


def _verify(args):
    from .verify import run_all

    failed = 0
    for name, ok, detail in run_all():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += not ok
    return 2 if failed else 0


def _count(args):
    B, U, K = args.b, args.u, args.k
    if min(B, U, K) < 1:
        raise ConfigError("B, U and K must be positive")
    cd = multiplication_count_cd(B, U, K)
    ocd = multiplication_count_ocd(B, U, K)
    print(f"B={B} U={U} K={K}")
    print(f"{'method':<6} {'per sweep':>12} {'total':>14}")
    print(f"{'CD':<6} {cd // K:>12} {cd:>14}")
    print(f"{'OCD':<6} {ocd // K:>12} {ocd:>14}")
    print(f"CD/OCD ratio {cd / ocd:.3f} (U/2 = {U / 2:g})")
    return 0


def _join_grid_flag(argv):
    # negative grids such as "-9:3:0" would otherwise parse as options
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--ebn0":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--ebn0={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _build_parser().parse_args(_join_grid_flag(argv))
        handler = {"simulate": _simulate, "verify": _verify, "count": _count}[args.command]
        return handler(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
