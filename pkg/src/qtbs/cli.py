"""Command-line interface.

Subcommands: solve, grad, route, shape, taper, export. Payload goes to
stdout (tables by default, machine JSON with --format json, Graphviz DOT
where applicable); diagnostics go to stderr and failures exit non-zero.
The comparison tolerance can be overridden for testing with QTBS_EPS.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .errors import QtbsError
from .export import dot_graph
from .gradients import Perturbation, forward_grad, gradient_bound
from .metrics import jain_index
from .model import EPS, Network, parse_network, validate
from .planner import accelerate_flow, taper_fold
from .routing import max_rate_path, min_hop_path, rate_if_routed
from .solver import gradient_graph

SCHEMA_VERSION = 1


def _eps() -> float:
    raw = os.environ.get("QTBS_EPS")
    if raw is None:
        return EPS
    try:
        value = float(raw)
    except ValueError:
        raise QtbsError(f"QTBS_EPS must be a number, got {raw!r}")
    if value <= 0:
        raise QtbsError("QTBS_EPS must be positive")
    return value


def _load(path: str) -> Network:
    try:
        with open(path, "rb") as fh:
            net = parse_network(fh.read())
    except OSError as exc:
        raise QtbsError(f"cannot read {path}: {exc}")
    problems = validate(net)
    if problems:
        raise QtbsError(
            "invalid network:\n" + "\n".join(f"  {v}" for v in problems)
        )
    return net


def _report(command: str, net: Network, payload: dict) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "network": {"links": len(net.links), "flows": len(net.flows)},
        **payload,
    }


def _print_json(report: dict):
    print(json.dumps(report, indent=2, sort_keys=True))


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def cmd_solve(args) -> int:
    net = _load(args.file)
    sol = gradient_graph(net, _eps())
    if args.format == "dot":
        sys.stdout.write(dot_graph(sol, backward_edges=args.backward_edges))
        return 0
    rates = dict(sorted(sol.rate.items()))
    shares = dict(sorted(sol.fair_share.items()))
    payload = {
        "rates": rates,
        "fair_shares": shares,
        "bottlenecks_of": {f: list(ls) for f, ls in sorted(sol.bottlenecks_of.items())},
        "levels": dict(sorted(sol.level.items())),
        "jain_index": jain_index(rates.values()) if rates else None,
    }
    if args.format == "json":
        _print_json(_report("solve", net, payload))
        return 0
    print(f"network: {len(net.links)} links, {len(net.flows)} flows")
    print("\nflow rates:")
    for f, r in rates.items():
        bnecks = ",".join(sol.bottlenecks_of[f])
        print(f"  {f:<12} {_fmt(r):>10}  level {sol.level[f]}  bottlenecks: {bnecks}")
    print("\nlink fair shares:")
    for l, s in shares.items():
        cap = net.link(l).capacity
        print(f"  {l:<12} {_fmt(s):>10}  capacity {_fmt(cap)}  level {sol.level[l]}")
    if rates:
        print(f"\njain index: {jain_index(rates.values()):.4f}")
    return 0


def cmd_grad(args) -> int:
    net = _load(args.file)
    sol = gradient_graph(net, _eps())
    direction = -1 if args.direction == "down" else 1
    res = forward_grad(sol, Perturbation(args.target, direction))
    bound = gradient_bound(sol)
    flow_d = res.flow_derivative
    link_d = res.link_derivative
    payload = {
        "target": args.target,
        "direction": args.direction,
        "flow_gradients": dict(sorted(flow_d.items())),
        "link_gradients": dict(sorted(link_d.items())),
        "bound": bound,
    }
    if args.format == "json":
        _print_json(_report("grad", net, payload))
        return 0
    print(f"gradients w.r.t. {args.target} ({args.direction}); "
          f"values are d(rate or fair share)/d(target)")
    nonzero_flows = [(f, g) for f, g in flow_d.items() if g != 0.0 and f != args.target]
    nonzero_links = [(l, g) for l, g in link_d.items() if g != 0.0 and l != args.target]
    if not nonzero_flows and not nonzero_links:
        print("  all gradients zero")
    print("\nflow gradients:")
    for f, g in sorted(nonzero_flows, key=lambda kv: (-abs(kv[1]), kv[0])):
        print(f"  {f:<12} {g:>10.4f}")
    print("\nlink gradients:")
    for l, g in sorted(nonzero_links, key=lambda kv: (-abs(kv[1]), kv[0])):
        print(f"  {l:<12} {g:>10.4f}")
    print(f"\ngradient bound (d^(D/4)): {bound:.4f}")
    return 0


def cmd_route(args) -> int:
    net = _load(args.file)
    eps = _eps()
    route = max_rate_path(net, args.src, args.dst, eps)
    hop_path = min_hop_path(net, args.src, args.dst)
    hop_rate = rate_if_routed(net, hop_path, eps)
    payload = {
        "src": args.src,
        "dst": args.dst,
        "path": list(route.links),
        "predicted_rate": route.predicted_rate,
        "min_hop_path": list(hop_path),
        "min_hop_rate": hop_rate,
    }
    if args.format == "json":
        _print_json(_report("route", net, payload))
        return 0
    print(f"max-rate path {args.src} -> {args.dst}:")
    print(f"  path: {' -> '.join(route.links)}")
    print(f"  predicted rate: {_fmt(route.predicted_rate)}")
    print(f"  min-hop path: {' -> '.join(hop_path)} (rate {_fmt(hop_rate)})")
    if hop_rate > 0:
        gain = 100.0 * (route.predicted_rate - hop_rate) / hop_rate
        print(f"  gain over min-hop: {gain:.2f}%")
    return 0


def cmd_shape(args) -> int:
    net = _load(args.file)
    low = [f.strip() for f in args.low_priority.split(",") if f.strip()]
    plan = accelerate_flow(net, args.target, low, args.floor, _eps())
    from .planner import apply_plan
    from .solver import gradient_graph as solve

    final = solve(apply_plan(net, plan), _eps())
    payload = {
        "target": plan.target,
        "low_priority": list(plan.low_priority),
        "floor_rate": plan.floor_rate,
        "baseline_target_rate": plan.baseline_target_rate,
        "final_target_rate": plan.final_target_rate,
        "actions": [
            {
                "stage": a.stage,
                "flow": a.flow,
                "shaper_rate": a.shaper_rate,
                "predicted_target_rate": a.predicted_target_rate,
            }
            for a in plan.actions
        ],
        "final_rates": dict(sorted(final.rate.items())),
        "jain_index": jain_index(final.rate.values()),
    }
    if args.format == "json":
        _print_json(_report("shape", net, payload))
        return 0
    print(f"shaping plan to accelerate {plan.target} "
          f"(floor {_fmt(plan.floor_rate)}):")
    print(f"  baseline target rate: {_fmt(plan.baseline_target_rate)}")
    if not plan.actions:
        print("  empty plan: no helpful candidate")
    for a in plan.actions:
        print(f"  stage {a.stage}: shape {a.flow} to {_fmt(a.shaper_rate)}"
              f" -> target at {_fmt(a.predicted_target_rate)}")
    print(f"  final target rate: {_fmt(plan.final_target_rate)}")
    print(f"  jain index over final rates: {jain_index(final.rate.values()):.4f}")
    return 0


def cmd_taper(args) -> int:
    net = _load(args.file)
    scale = [l.strip() for l in args.scale_links.split(",") if l.strip()]
    report = taper_fold(net, scale, args.lam, args.tau0, _eps())
    payload = {
        "scale_links": list(report.scaled_links),
        "leaf_capacity": report.leaf_capacity,
        "tau0": args.tau0,
        "tau_star": report.tau_star,
        "spine_capacity_at_fold": report.spine_capacity_at_fold,
        "level_gradients": {str(k): v for k, v in sorted(report.level_gradients.items())},
        "rates_at_fold": dict(sorted(report.rates_at.items())),
        "method": report.method,
    }
    if args.format == "json":
        _print_json(_report("taper", net, payload))
        return 0
    print(f"tapering {','.join(report.scaled_links)} "
          f"(leaf capacity {_fmt(report.leaf_capacity)}, tau0 {args.tau0}):")
    for rate, grad in sorted(report.level_gradients.items()):
        flows = ",".join(report.level_rates[rate])
        print(f"  level at rate {_fmt(rate)}: gradient {grad:+.4f}  ({flows})")
    print(f"  fold at tau* = {report.tau_star:.6f} "
          f"(scaled capacity {_fmt(report.spine_capacity_at_fold)})")
    rates = sorted(set(report.rates_at.values()))
    print(f"  rates at fold: {', '.join(_fmt(r) for r in rates)}")
    print(f"  method: {report.method}")
    return 0


def cmd_export(args) -> int:
    net = _load(args.file)
    sol = gradient_graph(net, _eps())
    sys.stdout.write(dot_graph(sol, backward_edges=args.backward_edges))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtbs",
        description="Bottleneck-structure analysis for max-min fair networks",
    )
    parser.add_argument("--version", action="version", version=f"qtbs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="rates, fair shares and the structure")
    p.add_argument("file")
    p.add_argument("--format", choices=["table", "json", "dot"], default="table")
    p.add_argument("--backward-edges", action="store_true",
                   help="include flow->bottleneck edges in DOT output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("grad", help="gradients w.r.t. one link or flow")
    p.add_argument("file")
    p.add_argument("--target", required=True)
    p.add_argument("--direction", choices=["down", "up"], default="down")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_grad)

    p = sub.add_parser("route", help="highest-rate path for a new flow")
    p.add_argument("file")
    p.add_argument("--src", required=True)
    p.add_argument("--dst", required=True)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("shape", help="traffic-shaping plan accelerating a flow")
    p.add_argument("file")
    p.add_argument("--target", required=True)
    p.add_argument("--low-priority", required=True,
                   help="comma-separated flows that may be shaped")
    p.add_argument("--floor", type=float, default=None,
                   help="minimum rate for shaped flows "
                        "(default: slowest pre-plan rate)")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_shape)

    p = sub.add_parser("taper", help="capacity scale at which levels fold")
    p.add_argument("file")
    p.add_argument("--scale-links", required=True,
                   help="comma-separated links whose capacity scales with tau")
    p.add_argument("--lambda", dest="lam", type=float, required=True,
                   help="leaf capacity")
    p.add_argument("--tau0", type=float, default=1.0)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_taper)

    p = sub.add_parser("export", help="Graphviz DOT of the structure")
    p.add_argument("file")
    p.add_argument("--backward-edges", action="store_true")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QtbsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
