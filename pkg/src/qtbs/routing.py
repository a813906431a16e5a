"""Flow-rate-maximal routing over the router graph.

The search is Dijkstra-shaped, but the distance of a router is the inverse
of the rate a hypothetical new flow would converge to if routed there: the
time to push one bit from the source. Every frontier relaxation re-solves
the network with the tentative flow added.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    MissingEndpointsError,
    NetworkFormatError,
    RoutingError,
    UnreachableError,
)
from .model import EPS, Flow, LinkId, Network, PROBE_FLOW_ID, RouterId
from .solver import gradient_graph


@dataclass(frozen=True)
class RoutePath:
    """A routed path plus the rate the new flow is predicted to receive."""

    links: tuple[LinkId, ...]
    predicted_rate: float
    distance: Mapping[RouterId, float]  # router -> 1 / best rate seen


def rate_if_routed(network: Network, path: Sequence[LinkId], eps: float = EPS) -> float:
    """Rate a probe flow would get on ``path``; the network is untouched."""
    if not path:
        raise NetworkFormatError("probe path must be non-empty")
    if len(set(path)) != len(path):
        raise NetworkFormatError("probe path repeats a link")
    for lid in path:
        if not network.has_link(lid):
            raise NetworkFormatError(f"probe path references unknown link {lid!r}")
    probed = network.with_flow(Flow(PROBE_FLOW_ID, tuple(path)))
    return gradient_graph(probed, eps).rate[PROBE_FLOW_ID]


def _router_adjacency(network: Network) -> dict[RouterId, list[tuple[LinkId, RouterId]]]:
    adj: dict[RouterId, list[tuple[LinkId, RouterId]]] = {}
    for r in network.routers:
        adj.setdefault(r, [])
    for l in network.links:
        if l.src is None or l.dst is None:
            raise MissingEndpointsError(
                f"link {l.id!r} lacks src/dst router annotations"
            )
        adj.setdefault(l.src, []).append((l.id, l.dst))
        adj.setdefault(l.dst, [])
    for r in adj:
        adj[r].sort()
    return adj


def max_rate_path(
    network: Network,
    source: RouterId,
    dest: RouterId,
    eps: float = EPS,
) -> RoutePath:
    """Find the path on which a new flow would get the highest rate.

    Frontier order is (distance, router id); a neighbour is relaxed only
    when the new distance is smaller beyond ``eps``, which together with
    the rate-decay property of path extension makes the search exact.
    """
    adj = _router_adjacency(network)
    if source not in adj or dest not in adj:
        missing = source if source not in adj else dest
        raise RoutingError(f"unknown router {missing!r}")
    if source == dest:
        raise RoutingError("source and destination must differ")

    dist: dict[RouterId, float] = {source: 0.0}
    best_rate: dict[RouterId, float] = {}
    path_to: dict[RouterId, tuple[LinkId, ...]] = {source: ()}
    converged: set[RouterId] = set()
    frontier: list[tuple[float, RouterId]] = [(0.0, source)]

    while frontier:
        d_u, u = heapq.heappop(frontier)
        if u in converged or d_u > dist.get(u, float("inf")):
            continue
        converged.add(u)
        if u == dest:
            break
        for link_id, v in adj[u]:
            if v in converged or link_id in path_to[u]:
                continue
            candidate = path_to[u] + (link_id,)
            rate = rate_if_routed(network, candidate, eps)
            d_v = 1.0 / rate
            if d_v < dist.get(v, float("inf")) - eps:
                dist[v] = d_v
                best_rate[v] = rate
                path_to[v] = candidate
                heapq.heappush(frontier, (d_v, v))

    if dest not in converged:
        raise UnreachableError(f"no path from {source!r} to {dest!r}")
    return RoutePath(
        links=path_to[dest],
        predicted_rate=best_rate[dest],
        distance=dict(sorted(dist.items())),
    )


def min_hop_path(
    network: Network, source: RouterId, dest: RouterId
) -> tuple[LinkId, ...]:
    """Fewest-links path, ties broken by the link-id sequence."""
    adj = _router_adjacency(network)
    if source not in adj or dest not in adj:
        missing = source if source not in adj else dest
        raise RoutingError(f"unknown router {missing!r}")
    best: dict[RouterId, tuple[int, tuple[LinkId, ...]]] = {source: (0, ())}
    frontier = [source]
    while frontier:
        nxt: list[RouterId] = []
        for u in sorted(frontier):
            hops, path = best[u]
            for link_id, v in adj[u]:
                cand = (hops + 1, path + (link_id,))
                if v not in best or cand < best[v]:
                    best[v] = cand
                    nxt.append(v)
        frontier = nxt
    if dest not in best:
        raise UnreachableError(f"no path from {source!r} to {dest!r}")
    return best[dest][1]
