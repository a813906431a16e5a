"""Propagation of infinitesimal perturbations through a bottleneck structure.

``forward_grad`` pushes a unit perturbation of one link capacity or flow
rate through the structure's directed edges, combining two rules:

* flow rule: a flow's drift is the minimum drift over its bottleneck links;
* link rule: a link's drift is minus the accumulated drift of the flows
  feeding it, split evenly over its not-yet-visited bottlenecked flows.

Gradients are reported directionally: ``gradient[y]`` is the first-order
movement of ``y``'s rate or fair share per unit of perturbation magnitude,
for the chosen perturbation direction. The one-sided derivative with the
conventional sign is ``gradient[y] / direction`` and is exposed as
``derivative``.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Mapping

from .errors import UnknownVertexError
from .solver import BottleneckSolution


@dataclass(frozen=True)
class Perturbation:
    """A signed infinitesimal change of one link capacity or flow rate."""

    target: str
    direction: int = -1  # -1 tightens (shrink capacity / shape rate down)

    def __post_init__(self):
        if self.direction not in (-1, 1):
            raise ValueError(f"direction must be +1 or -1, got {self.direction}")


@dataclass(frozen=True)
class GradientResult:
    """All link and flow gradients for one perturbation."""

    perturbation: Perturbation
    link_gradient: Mapping[str, float]
    flow_gradient: Mapping[str, float]
    visit_order: tuple[str, ...]
    # Bookkeeping for the link-rule checksum: which flows fed each link and
    # how many unvisited successors the accumulated inflow was split over.
    link_inflow_from: Mapping[str, tuple[str, ...]]
    link_split_count: Mapping[str, int]

    @property
    def link_derivative(self) -> dict[str, float]:
        """One-sided derivative d(fair share)/d(target quantity)."""
        sign = float(self.perturbation.direction)
        return {l: g / sign for l, g in self.link_gradient.items()}

    @property
    def flow_derivative(self) -> dict[str, float]:
        """One-sided derivative d(rate)/d(target quantity)."""
        sign = float(self.perturbation.direction)
        return {f: g / sign for f, g in self.flow_gradient.items()}

    def gradient(self, vertex: str) -> float:
        if vertex in self.link_gradient:
            return self.link_gradient[vertex]
        if vertex in self.flow_gradient:
            return self.flow_gradient[vertex]
        raise UnknownVertexError(vertex)

    def max_magnitude(self) -> float:
        values = list(self.link_gradient.values()) + list(self.flow_gradient.values())
        return max((abs(v) for v in values), default=0.0)


def forward_grad(solution: BottleneckSolution, p: Perturbation) -> GradientResult:
    """Compute all gradients with respect to one perturbed link or flow.

    Each vertex is visited at most once, in ascending (value, drift, id)
    heap order, mirroring the order in which the solve resolves the
    structure. Vertices outside the target's region of influence keep a
    gradient of exactly zero.
    """
    graph = solution.graph
    is_link = solution.is_link(p.target)
    if not is_link and not solution.is_flow(p.target):
        raise UnknownVertexError(p.target)
    sign = float(p.direction)

    link_drift = {l: 0.0 for l in graph.link_ids}
    flow_drift = {f: 0.0 for f in graph.flow_ids}
    inflow = {l: 0.0 for l in graph.link_ids}
    inflow_from: dict[str, list[str]] = {l: [] for l in graph.link_ids}
    split_count: dict[str, int] = {}

    heap: list[tuple[float, float, str]] = []
    visited: set[str] = set()
    visit_order: list[str] = []

    if is_link:
        succ = graph.bottlenecked_flows(p.target)
        inflow[p.target] = sign
        # The capacity change splits evenly over the bottlenecked flows; a
        # link that bottlenecks no flow absorbs the perturbation silently.
        link_drift[p.target] = sign / len(succ) if succ else 0.0
        split_count[p.target] = len(succ)
        heapq.heappush(
            heap, (solution.fair_share[p.target], link_drift[p.target], p.target)
        )
    else:
        flow_drift[p.target] = sign
        heapq.heappush(heap, (solution.rate[p.target], sign, p.target))

    while heap:
        _value, _drift, y = heapq.heappop(heap)
        if y in visited:
            continue
        visited.add(y)
        visit_order.append(y)
        d_y = link_drift[y] if y in link_drift else flow_drift[y]
        if d_y == 0.0:
            continue  # zero drifts do not propagate
        for y2 in graph.successors(y):
            if y2 in visited:
                continue
            if y2 in flow_drift:
                # Flow rule: minimum drift over the flow's bottleneck links.
                d = min(link_drift[l] for l in graph.bottleneck_links(y2))
                flow_drift[y2] = d
                heapq.heappush(heap, (solution.rate[y2], d, y2))
            else:
                # Link rule: accumulate inflow, split over what remains.
                inflow[y2] -= d_y
                inflow_from[y2].append(y)
                remaining = [
                    s for s in graph.bottlenecked_flows(y2) if s not in visited
                ]
                split_count[y2] = len(remaining)
                link_drift[y2] = inflow[y2] / len(remaining) if remaining else 0.0
                heapq.heappush(
                    heap, (solution.fair_share[y2], link_drift[y2], y2)
                )

    return GradientResult(
        perturbation=p,
        link_gradient=link_drift,
        flow_gradient=flow_drift,
        visit_order=tuple(visit_order),
        link_inflow_from={l: tuple(v) for l, v in inflow_from.items() if v},
        link_split_count=split_count,
    )


def gradient_bound(solution: BottleneckSolution) -> float:
    """Worst-case gradient magnitude ``d ** (D / 4)``.

    ``d`` is the maximum in/out degree over the full structure (backward
    edges included) and ``D`` its diameter: the longest shortest path over
    ordered vertex pairs that are connected at all.
    """
    graph = solution.graph
    succ: dict[str, list[str]] = {v: [] for v in graph.vertices()}
    indeg: dict[str, int] = {v: 0 for v in graph.vertices()}
    for l, f in graph.bottleneck_edges:
        succ[l].append(f)
        succ[f].append(l)
        indeg[f] += 1
        indeg[l] += 1
    for f, l in graph.traversal_edges:
        succ[f].append(l)
        indeg[l] += 1
    d = 0
    for v in graph.vertices():
        d = max(d, len(succ[v]), indeg[v])
    diameter = 0
    for source in graph.vertices():
        dist = {source: 0}
        frontier = [source]
        while frontier:
            nxt = []
            for v in frontier:
                for w in succ[v]:
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        if len(dist) > 1:
            diameter = max(diameter, max(dist.values()))
    return float(d) ** (diameter / 4.0)
