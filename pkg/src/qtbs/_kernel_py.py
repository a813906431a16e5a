"""Pure-Python max-min solve kernel.

Reference implementation of the progressive fair-share refinement loop.
``qtbs._solve_kernel`` is the compiled twin; both must produce identical
output (same floats, same edge order) for any input.
"""
import heapq

IMPL_NAME = "python"

_INF = float("inf")


def solve(caps, flow_links, link_flows, eps):
    """Run the fair-share refinement loop on an interned network.

    caps:       list of link capacities
    flow_links: per flow, sorted list of traversed link indices
    link_flows: per link, sorted list of traversing flow indices
    eps:        absolute tolerance for rate/fair-share ties

    Returns (rate, share, bneck_edges, trav_edges, pop_order, pops, updates):
    rate[f] is each flow's max-min rate, share[l] each link's fair share,
    bneck_edges the (link, flow) bottleneck relation, trav_edges the
    (flow, link) edges to traversed non-bottleneck links, pop_order the
    link resolution order, and pops/updates the heap work counters.

    A link that ends up bottlenecking no flow reports its saturation level:
    leftover capacity plus its fastest flow's rate (full capacity when no
    flow traverses it). That keeps every non-bottleneck link strictly above
    the rates of its flows, so each flow's rate is the minimum fair share
    along its path and the minimizers are exactly its bottlenecks.
    """
    n_links = len(caps)
    n_flows = len(flow_links)
    avail = list(caps)
    nrem = [len(link_flows[l]) for l in range(n_links)]
    # Links with no traversing flows never enter the heap; their fair share
    # is reported as full (leftover) capacity.
    share = [caps[l] if nrem[l] == 0 else caps[l] / nrem[l] for l in range(n_links)]
    dead = [nrem[l] == 0 for l in range(n_links)]
    popped = [False] * n_links
    rate = [_INF] * n_flows
    resolved = [False] * n_flows

    heap = [(share[l], l) for l in range(n_links) if not dead[l]]
    heapq.heapify(heap)

    bneck_edges = []
    trav_edges = []
    pop_order = []
    pops = 0
    updates = 0
    unresolved = n_flows

    def pop_link():
        nonlocal pops
        while heap:
            key, l = heapq.heappop(heap)
            if popped[l] or dead[l] or key != share[l]:
                continue  # stale entry
            popped[l] = True
            pops += 1
            pop_order.append(l)
            return l
        return -1

    while unresolved > 0:
        l = pop_link()
        if l < 0:
            raise RuntimeError("no live link left while flows remain unresolved")
        s_l = share[l]
        for f in link_flows[l]:
            if rate[f] < s_l - eps:
                continue
            bneck_edges.append((l, f))
            if resolved[f]:
                continue
            rate[f] = s_l
            resolved[f] = True
            unresolved -= 1
            for l2 in flow_links[f]:
                if l2 == l or popped[l2] or dead[l2]:
                    continue
                if share[l2] > s_l + eps:
                    trav_edges.append((f, l2))
                    avail[l2] -= s_l
                    nrem[l2] -= 1
                    if nrem[l2] <= 0:
                        # No unresolved flow left: the link bottlenecks
                        # nobody; report its saturation level (leftover
                        # plus the fastest flow, which resolved last).
                        dead[l2] = True
                        share[l2] = avail[l2] + s_l
                    else:
                        share[l2] = avail[l2] / nrem[l2]
                        heapq.heappush(heap, (share[l2], l2))
                        updates += 1
                # else: tie within eps; the flow is bottlenecked at l2 as
                # well and picks up its edge when l2 is popped.

    # Drain remaining live links so equal-share links still record their
    # bottleneck edges (multi-bottleneck flows).
    while True:
        l = pop_link()
        if l < 0:
            break
        s_l = share[l]
        for f in link_flows[l]:
            if rate[f] >= s_l - eps:
                bneck_edges.append((l, f))

    return rate, share, bneck_edges, trav_edges, pop_order, pops, updates
