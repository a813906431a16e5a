"""Optimization procedures built on the gradient machinery.

``accelerate_flow`` builds a staged traffic-shaping plan that speeds up one
target flow by throttling low-priority flows, sizing each rate cut at the
first point where the bottleneck structure would change shape.
``taper_fold`` finds the capacity scale at which the levels of a fat-tree
style structure collapse into one. Both verify their predictions by
re-solving the modified network.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    AlreadyFoldedError,
    DuplicateShaperError,
    PlanError,
    UnknownVertexError,
)
from .gradients import Perturbation, forward_grad
from .model import EPS, Flow, FlowId, Link, LinkId, Network
from .solver import BottleneckSolution, flow_levels, gradient_graph, region_of_influence

SHAPER_PREFIX = "__shaper__"


@dataclass(frozen=True)
class ShapingAction:
    """Install one shaper: cap ``flow`` at ``shaper_rate``."""

    flow: FlowId
    shaper_rate: float
    predicted_target_rate: float
    stage: int


@dataclass(frozen=True)
class ShapingPlan:
    target: FlowId
    low_priority: tuple[FlowId, ...]
    actions: tuple[ShapingAction, ...]
    floor_rate: float
    baseline_target_rate: float

    @property
    def final_target_rate(self) -> float:
        if not self.actions:
            return self.baseline_target_rate
        return self.actions[-1].predicted_target_rate


def shaper_link_id(flow: FlowId) -> LinkId:
    return SHAPER_PREFIX + flow


def _with_shaper(network: Network, flow_id: FlowId, cap: float) -> Network:
    lid = shaper_link_id(flow_id)
    if network.has_link(lid):
        raise DuplicateShaperError(f"flow {flow_id!r} already has a shaper")
    if cap <= 0:
        raise PlanError(f"shaper rate for {flow_id!r} must be positive, got {cap}")
    shaped = network.with_link(Link(lid, cap))
    flows = tuple(
        Flow(f.id, f.path + (lid,)) if f.id == flow_id else f
        for f in shaped.flows
    )
    return Network(shaped.links, flows, shaped.routers)


def apply_plan(network: Network, plan: ShapingPlan) -> Network:
    """Materialize a plan: one private virtual link per action."""
    out = network
    seen: set[FlowId] = set()
    for action in plan.actions:
        if action.flow in seen:
            raise DuplicateShaperError(
                f"plan shapes flow {action.flow!r} more than once"
            )
        seen.add(action.flow)
        if not out.has_flow(action.flow):
            raise UnknownVertexError(action.flow)
        out = _with_shaper(out, action.flow, action.shaper_rate)
    return out


def _true_gradients(solution: BottleneckSolution, flow_id: FlowId):
    """One-sided derivatives w.r.t. the flow's rate, from a downward probe."""
    res = forward_grad(solution, Perturbation(flow_id, -1))
    return res.flow_derivative, res.link_derivative, res


def _collision_rho(
    solution: BottleneckSolution,
    link_grads: Mapping[LinkId, float],
    region_links: Iterable[LinkId],
    eps: float,
) -> Optional[float]:
    """Smallest positive rate cut at which two fair-share lines meet.

    Under a cut of size rho each link moves along s_l - rho * g_l; the first
    intersection anywhere in the perturbed region is the first point where
    the structure, and with it the gradients, can change.
    """
    links = sorted(set(region_links))
    best: Optional[float] = None
    for i, la in enumerate(links):
        for lb in links[i + 1:]:
            ga, gb = link_grads.get(la, 0.0), link_grads.get(lb, 0.0)
            if abs(ga - gb) <= eps:
                continue
            rho = (solution.fair_share[la] - solution.fair_share[lb]) / (ga - gb)
            if rho > eps and (best is None or rho < best):
                best = rho
    return best


def accelerate_flow(
    network: Network,
    target: FlowId,
    low_priority: Iterable[FlowId],
    floor_rate: Optional[float] = None,
    eps: float = EPS,
) -> ShapingPlan:
    """Greedy staged shaping plan that accelerates ``target``.

    Per stage: candidates are unshaped low-priority flows with headroom
    above the floor. With a single target bottleneck, the candidate whose
    rate cut helps the target most (most negative rate derivative) is
    shaped; with several bottlenecks, one candidate per bottleneck link is
    shaped by a common amount, since the target only gains when every
    bottleneck's fair share rises together. The cut size is the smallest
    structure-changing collision, clamped to keep every shaped flow at or
    above the floor. Stops when no candidate helps or nothing is gained.
    """
    if not network.has_flow(target):
        raise UnknownVertexError(target)
    low = tuple(sorted(set(low_priority)))
    if not low:
        raise PlanError("low-priority set must be non-empty")
    for f in low:
        if not network.has_flow(f):
            raise UnknownVertexError(f)
    if target in low:
        raise PlanError("target flow cannot be in the low-priority set")

    current = network
    solution = gradient_graph(current, eps)
    if floor_rate is None:
        floor_rate = min(solution.rate.values())
    baseline = solution.rate[target]

    actions: list[ShapingAction] = []
    shaped: set[FlowId] = set()

    for stage in range(1, len(low) + 1):
        bottlenecks = solution.bottlenecks_of[target]
        if not bottlenecks:
            break
        candidates = [
            f for f in low
            if f not in shaped and solution.rate[f] - floor_rate > eps
        ]
        if not candidates:
            break

        grads = {f: _true_gradients(solution, f) for f in candidates}

        if len(bottlenecks) == 1:
            ranked = sorted(
                (g_flow[target], f) for f, (g_flow, _, _) in grads.items()
            )
            best_grad, best_flow = ranked[0]
            if best_grad >= -eps:
                break
            chosen = [best_flow]
        else:
            chosen_set: dict[FlowId, None] = {}
            covered = True
            for b in bottlenecks:
                ranked = sorted(
                    (g_link.get(b, 0.0), f) for f, (_, g_link, _) in grads.items()
                )
                g_b, f_b = ranked[0]
                if g_b >= -eps:
                    covered = False
                    break
                chosen_set[f_b] = None
            if not covered:
                break
            chosen = sorted(chosen_set)

        joint_link_grad: dict[LinkId, float] = {}
        region_links: set[LinkId] = set()
        for f in chosen:
            _, g_link, _ = grads[f]
            for l, g in g_link.items():
                joint_link_grad[l] = joint_link_grad.get(l, 0.0) + g
            region_links.update(
                v for v in region_of_influence(solution, f) if solution.is_link(v)
            )

        gain_slope = min(-joint_link_grad.get(b, 0.0) for b in bottlenecks)
        if gain_slope <= eps:
            break

        rho_collision = _collision_rho(solution, joint_link_grad, region_links, eps)
        rho_floor = min(solution.rate[f] - floor_rate for f in chosen)
        rho = rho_floor if rho_collision is None else min(rho_collision, rho_floor)
        if rho <= eps:
            break

        before = solution.rate[target]
        for f in chosen:
            current = _with_shaper(current, f, solution.rate[f] - rho)
            shaped.add(f)
            after = gradient_graph(current, eps)
            actions.append(
                ShapingAction(
                    flow=f,
                    shaper_rate=solution.rate[f] - rho,
                    predicted_target_rate=after.rate[target],
                    stage=stage,
                )
            )
        solution = gradient_graph(current, eps)
        if solution.rate[target] - before <= eps:
            break

    return ShapingPlan(
        target=target,
        low_priority=low,
        actions=tuple(actions),
        floor_rate=floor_rate,
        baseline_target_rate=baseline,
    )


@dataclass(frozen=True)
class TaperReport:
    """Outcome of the capacity-tapering fold search."""

    tau_star: float
    spine_capacity_at_fold: float
    leaf_capacity: float
    scaled_links: tuple[LinkId, ...]
    level_rates: Mapping[float, tuple[FlowId, ...]]  # base rate -> flows
    level_gradients: Mapping[float, float]  # base rate -> d rate / d spine cap
    rates_below: Mapping[FlowId, float]
    rates_at: Mapping[FlowId, float]
    rates_above: Mapping[FlowId, float]
    slowest_samples: tuple[tuple[float, float], ...]  # (tau, slowest rate)
    method: str  # "gradient" or "bisection"


def _scaled(network: Network, scale_links: Sequence[LinkId], cap: float) -> Network:
    out = network
    for lid in scale_links:
        out = out.with_capacity(lid, cap)
    return out


def _rate_groups(solution: BottleneckSolution, eps: float):
    """Flows grouped by structure level, with each group's common rate."""
    groups = []
    for _, flows in flow_levels(solution).items():
        rates = [solution.rate[f] for f in flows]
        groups.append((min(rates), max(rates), flows))
    return groups


def taper_fold(
    network: Network,
    scale_links: Sequence[LinkId],
    leaf_capacity: float,
    tau0: float = 1.0,
    eps: float = EPS,
) -> TaperReport:
    """Find the scale factor at which the flow levels of the structure fold.

    ``scale_links`` hold capacity ``leaf_capacity * tau``; the remaining
    links are fixed. Per-level rate derivatives w.r.t. the scaled capacity
    give each level's line rate(tau); the first intersection of adjacent
    level lines is the fold. Falls back to bisection on the max-min rate
    gap when a level's flows do not share one derivative.
    """
    scale_links = tuple(sorted(set(scale_links)))
    if not scale_links:
        raise PlanError("at least one scaled link is required")
    for lid in scale_links:
        if not network.has_link(lid):
            raise UnknownVertexError(lid)
    if leaf_capacity <= 0 or tau0 <= 0:
        raise PlanError("leaf capacity and tau0 must be positive")

    base_cap = leaf_capacity * tau0
    base_net = _scaled(network, scale_links, base_cap)
    base = gradient_graph(base_net, eps)
    groups = _rate_groups(base, eps)
    if len(groups) < 2:
        raise AlreadyFoldedError(
            "structure already has a single flow level at tau0"
        )

    def solve_at(tau: float) -> BottleneckSolution:
        return gradient_graph(
            _scaled(network, scale_links, leaf_capacity * tau), eps
        )

    # Band membership is frozen at tau0; two adjacent bands fold when the
    # upper one's slowest flow meets the lower one's fastest.
    bands = [flows for _, _, flows in sorted(groups)]

    def pair_gap(tau: float) -> float:
        sol = solve_at(tau)
        return min(
            min(sol.rate[f] for f in hi) - max(sol.rate[f] for f in lo)
            for lo, hi in zip(bands, bands[1:])
        )

    # Per-level derivative of rate w.r.t. the scaled links' common capacity,
    # from a downward probe of one scaled link (they must all agree).
    tol = 1e-6
    method = "gradient"
    level_grad: dict[float, float] = {}
    level_rates: dict[float, tuple[FlowId, ...]] = {}
    uniform = True
    per_link = [
        forward_grad(base, Perturbation(lid, -1)).flow_derivative
        for lid in scale_links
    ]
    for lo, hi, flows in groups:
        if hi - lo > tol or lo in level_rates:
            uniform = False
            break
        grads = {deriv[f] for deriv in per_link for f in flows}
        if max(grads) - min(grads) > tol:
            uniform = False
            break
        level_rates[lo] = flows
        level_grad[lo] = next(iter(per_link))[flows[0]]

    tau_star: Optional[float] = None
    if uniform:
        ordered = sorted(level_rates)
        best: Optional[float] = None
        for r_lo, r_hi in zip(ordered, ordered[1:]):
            g_lo, g_hi = level_grad[r_lo], level_grad[r_hi]
            if g_lo - g_hi <= eps:
                continue  # lines parallel or diverging
            dcap = (r_hi - r_lo) / (g_lo - g_hi)
            if dcap > eps and (best is None or dcap < best):
                best = dcap
        if best is not None:
            tau_star = (base_cap + best) / leaf_capacity

    if tau_star is None:
        # Bisection on the adjacent-band gap.
        method = "bisection"
        lo_tau, hi_tau = tau0, tau0 * 2.0
        for _ in range(40):
            if pair_gap(hi_tau) <= tol:
                break
            hi_tau *= 2.0
        else:
            raise PlanError("no band gap closes while scaling up")
        for _ in range(100):
            mid = 0.5 * (lo_tau + hi_tau)
            if pair_gap(mid) <= tol:
                hi_tau = mid
            else:
                lo_tau = mid
        tau_star = hi_tau

    at = solve_at(tau_star)
    if pair_gap(tau_star) > 1e-3:
        raise PlanError("fold verification failed: bands still split at tau*")

    below_tau = 0.5 * (tau0 + tau_star)
    above_tau = tau_star + 0.5 * (tau_star - tau0)
    samples = []
    for i in range(9):
        tau = tau0 + (above_tau - tau0) * i / 8.0
        samples.append((tau, min(solve_at(tau).rate.values())))

    return TaperReport(
        tau_star=tau_star,
        spine_capacity_at_fold=leaf_capacity * tau_star,
        leaf_capacity=leaf_capacity,
        scaled_links=scale_links,
        level_rates=level_rates,
        level_gradients=level_grad,
        rates_below=solve_at(below_tau).rate,
        rates_at=at.rate,
        rates_above=solve_at(above_tau).rate,
        slowest_samples=tuple(samples),
        method=method,
    )
