"""Command-line entry point: ``landau-response run|validate <config>``.

Exit codes: 0 all checks pass (warnings allowed), 1 a check or the
computation failed, 2 the config could not be parsed or validated.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import config as config_mod
from .scenarios import run

ENV_OUTPUT_DIR = "LANDAU_OUTPUT_DIR"


def _parser():
    p = argparse.ArgumentParser(prog="landau-response",
                                description="Linear kinetic plasma response scenarios.")
    p.add_argument("--quiet", action="store_true", help="only print the final status line")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario and write CSV artifacts and report.json")
    r.add_argument("config")
    r.add_argument("--output-dir", help=f"overrides ${ENV_OUTPUT_DIR} and the config value")
    r.add_argument("--threads", type=int, default=1, help="worker threads (0 = all cores)")
    r.add_argument("--quiet", action="store_true", dest="quiet_sub")
    v = sub.add_parser("validate", help="check a config without computing anything")
    v.add_argument("config")
    v.add_argument("--quiet", action="store_true", dest="quiet_sub")
    return p


def _output_dir(args, cfg):
    if args.output_dir:
        return args.output_dir
    if os.environ.get(ENV_OUTPUT_DIR):
        return os.environ[ENV_OUTPUT_DIR]
    return cfg.data.get("output_dir", os.path.join("out", cfg.scenario))


def main(argv=None):
    args = _parser().parse_args(argv)
    quiet = args.quiet or getattr(args, "quiet_sub", False)
    try:
        cfg = config_mod.load(args.config)
    except config_mod.ConfigError as exc:
        for line in exc.diagnostics:
            print(f"{args.config}: {line}", file=sys.stderr)
        return 2
    if args.command == "validate":
        if not quiet:
            print(f"{args.config}: ok ({cfg.scenario})")
        return 0

    threads = args.threads if args.threads > 0 else (os.cpu_count() or 1)
    out_dir = _output_dir(args, cfg)
    report = run(cfg, out_dir, threads=threads)
    if not quiet:
        for c in report.checks:
            val = c["value"]
            shown = f"{val:.3e}" if isinstance(val, float) else str(val)
            print(f"[{c['status'].upper():4}] {c['name']}: {shown} (threshold {c['threshold']}) "
                  f"{c['detail']}")
        if report.error:
            print(f"[FAIL] error: {report.error}")
    print(f"{cfg.scenario}: {report.status} ({report.timings['total']:.1f} s) -> "
          f"{os.path.join(out_dir, 'report.json')}")
    return 1 if report.status == "fail" else 0


if __name__ == "__main__":
    sys.exit(main())
