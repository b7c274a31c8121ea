"""Command line entry point: padic-lab [--config FILE] [flags]."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import ConfigError, PadicLabError
from .suites import SUITES, RunConfig, emit_report, run_suites

_KEYS = {"p", "precision", "N", "N0", "m", "sigma", "backend", "tolerance", "suite", "format", "out",
         "threads", "timing", "D", "q"}


def read_config_file(path: str) -> dict[str, str]:
    """Flat `key = value` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        if k not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {k!r}")
        out[k] = v
    return out


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"expected a list of integers, got {s!r}") from None


def _to_int(k: str, s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"{k} expects an integer, got {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padic-lab", description="Run exact identity suites and emit a report.")
    ap.add_argument("--config", help="file of key = value lines; flags override it")
    ap.add_argument("--p", help="odd prime for the kernel pipelines")
    ap.add_argument("--precision", help="p-adic precision M (checked against the guard-digit policy)")
    ap.add_argument("--N", help="level(s), comma separated")
    ap.add_argument("--N0", help="sigma level")
    ap.add_argument("--m", help="smoothing level (defaults to N0)")
    ap.add_argument("--sigma", help="sigma exponent xi (a unit mod p^N0)")
    ap.add_argument("--backend", choices=("exact", "float"))
    ap.add_argument("--tolerance", help="float comparison tolerance")
    ap.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)}, all; repeatable or comma separated")
    ap.add_argument("--format", choices=("json", "md", "csv"))
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--threads", help="worker threads (falls back to PADIC_LAB_THREADS)")
    ap.add_argument("--timing", action="store_true", default=None, help="record per-row microseconds")
    ap.add_argument("--D", help="ramified prime for the constants suite")
    ap.add_argument("--q", help="working place for an extra constants row")
    return ap


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    vals: dict[str, str] = {}
    if args.config:
        try:
            vals.update(read_config_file(args.config))
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from None
    for k in _KEYS:
        v = getattr(args, k, None)
        if v is None:
            continue
        if k == "suite":
            v = ",".join(v)
        vals[k] = v if isinstance(v, str) else str(v)
    if "threads" not in vals and os.environ.get("PADIC_LAB_THREADS"):
        vals["threads"] = os.environ["PADIC_LAB_THREADS"]
    cfg = RunConfig()
    for k, v in vals.items():
        if k == "p":
            cfg.p = _to_int(k, v)
        elif k == "precision":
            cfg.M = _to_int(k, v)
        elif k == "N":
            cfg.N = _int_list(v)
        elif k in ("N0", "m", "D", "q", "threads"):
            setattr(cfg, k, _to_int(k, v))
        elif k == "sigma":
            cfg.xi = _to_int(k, v)
        elif k == "tolerance":
            try:
                cfg.tolerance = float(v)
            except ValueError:
                raise ConfigError(f"tolerance expects a number, got {v!r}") from None
        elif k == "suite":
            cfg.suites = [s.strip() for s in v.split(",") if s.strip()]
        elif k == "timing":
            cfg.timing = v.lower() in ("1", "true", "yes", "on")
        else:
            setattr(cfg, k, v)
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
        report = run_suites(cfg)
    except ConfigError as e:
        print(f"padic-lab: configuration error: {e}", file=sys.stderr)
        return 2
    except PadicLabError as e:
        print(f"padic-lab: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    data = emit_report(report, cfg.format)
    if cfg.out:
        Path(cfg.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    for r in report.failures():
        print(f"FAIL {r.suite} {r.id} {r.inputs}: {r.lhs} != {r.rhs}", file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
