"""Command-line entry point.

    shbopt run    --config FILE [--seed N --iters T --optimizer NAME
                   --mask OPT --gradient MODE --rho R --snr-db S --out DIR
                   --print-config --fail-on-divergence]
    shbopt sweep  --config FILE --out DIR
    shbopt verify --suite NAME [--out DIR]

Exit codes: 0 success, 1 configuration error, 2 verification failure,
3 divergence (run command with --fail-on-divergence).
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import harness


def _add_run_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int, help="run a single seed")
    p.add_argument("--iters", type=int)
    p.add_argument("--objective", choices=harness.OBJECTIVES)
    p.add_argument("--optimizer", choices=harness.OPTIMIZERS)
    p.add_argument("--mask", choices=harness.MASKS)
    p.add_argument("--gradient", choices=harness.GRADIENT_MODES)
    p.add_argument("--rho", type=float)
    p.add_argument("--snr-db", type=float, dest="snr_db")
    p.add_argument("--out")


def _overrides(args: argparse.Namespace) -> dict:
    keys = ("iters", "objective", "optimizer", "mask", "gradient", "rho",
            "snr_db", "out")
    ov = {k: getattr(args, k, None) for k in keys}
    if getattr(args, "seed", None) is not None:
        ov["seeds"] = (args.seed,)
    return ov


def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(prog="shbopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one experiment config")
    _add_run_overrides(run_p)
    run_p.add_argument("--print-config", action="store_true",
                       help="echo the fully resolved configuration and exit")
    run_p.add_argument("--fail-on-divergence", action="store_true")

    sweep_p = sub.add_parser("sweep", help="update-rate x noise-level cross product")
    _add_run_overrides(sweep_p)

    verify_p = sub.add_parser("verify", help="run an empirical verification suite")
    verify_p.add_argument("--suite", required=True, choices=harness.VERIFY_SUITES)
    verify_p.add_argument("--out")

    args = parser.parse_args(argv)

    try:
        if args.command == "verify":
            rows, ok = harness.verify(args.suite, args.out)
            for r in rows:
                print(f"[{r.verdict}] {r.check} {r.instance}: "
                      f"measured={r.measured:.6g} reference={r.predicted:.6g}")
            print(f"verify {args.suite}: {'all checks passed' if ok else 'FAILURES'}")
            return 0 if ok else 2

        cfg = harness.load_config(args.config, _overrides(args))
        if args.command == "run" and args.fail_on_divergence:
            cfg = harness.replace(cfg, fail_on_divergence=True)

        if args.command == "run":
            if args.print_config:
                for k, v in cfg.resolved().items():
                    print(f"{k} = {v}")
                return 0
            traces = harness.run_and_save(cfg)
            for tr in traces:
                print(f"seed {tr.seed}: status={tr.status} "
                      f"final_gap={tr.jbar[-1]:.6g} fevals={tr.total_fevals}")
            if cfg.fail_on_divergence and any(t.status == harness.STATUS_DIVERGED
                                              for t in traces):
                return 3
            return 0

        # sweep
        rows, _ = harness.sweep(cfg)
        print(f"sweep wrote {len(rows)} summary rows to {cfg.out}/summary.csv")
        return 0
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
