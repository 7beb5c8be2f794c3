"""Command-line entry points.

  cocosim run <config.json> [--out trace.jsonl] [--seed N] [--quiet]
  cocosim metrics <trace.jsonl> [--p-on P]
  cocosim serve <config.json> [--port P]

Exit codes: 0 success, 1 configuration error, 2 controller fault.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import ConfigError
from .runner import compute_metrics, load_config_file, read_trace, run_scenario, write_trace


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cocosim")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario and report metrics")
    run_p.add_argument("config")
    run_p.add_argument("--out", default=None, help="write the trace as JSONL")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    run_p.add_argument("--quiet", action="store_true")

    met_p = sub.add_parser("metrics", help="recompute metrics from a trace")
    met_p.add_argument("trace")
    met_p.add_argument("--p-on", type=float, default=0.6,
                       help="cooperation threshold used for switch latency")

    srv_p = sub.add_parser("serve", help="serve a live session over WebSocket")
    srv_p.add_argument("config")
    srv_p.add_argument("--port", type=int, default=8765)
    return parser


def _cmd_run(args) -> int:
    config = load_config_file(args.config)
    if args.seed is not None:
        from .runner import config_to_dict, parse_config
        config = parse_config({**config_to_dict(config), "seed": args.seed})
    trace, metrics = run_scenario(config)
    if args.out:
        write_trace(trace, args.out)
    if not args.quiet:
        print(json.dumps(metrics.to_dict(), indent=2))
    if metrics.fault is not None:
        if not args.quiet:
            print(f"controller fault: {metrics.fault}", file=sys.stderr)
        return 2
    return 0


def _cmd_metrics(args) -> int:
    trace = read_trace(args.trace)
    metrics = compute_metrics(trace, p_on=args.p_on)
    print(json.dumps(metrics.to_dict(), indent=2))
    return 2 if metrics.fault is not None else 0


def _cmd_serve(args) -> int:
    import asyncio

    from .bridge import serve

    config = load_config_file(args.config)
    try:
        asyncio.run(serve(config, args.port))
    except KeyboardInterrupt:
        pass
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "metrics":
            return _cmd_metrics(args)
        return _cmd_serve(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
