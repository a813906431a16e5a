# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled max-min solve kernel.

Typed twin of qtbs._kernel_py.solve; identical semantics and output order.
The adjacency lists are flattened to CSR int arrays and the min-heap is a
hand-rolled binary heap over (key, link) pairs with lazy invalidation.
"""
from libc.stdlib cimport malloc, free

IMPL_NAME = "cython"

cdef double _INF = float("inf")


cdef struct Heap:
    double *key
    int *val
    int size


cdef inline bint _less(Heap *h, int a, int b):
    if h.key[a] != h.key[b]:
        return h.key[a] < h.key[b]
    return h.val[a] < h.val[b]


cdef inline void _swap(Heap *h, int a, int b):
    cdef double tk = h.key[a]
    cdef int tv = h.val[a]
    h.key[a] = h.key[b]
    h.val[a] = h.val[b]
    h.key[b] = tk
    h.val[b] = tv


cdef inline void heap_push(Heap *h, double key, int val):
    cdef int i = h.size
    cdef int parent
    h.size += 1
    h.key[i] = key
    h.val[i] = val
    while i > 0:
        parent = (i - 1) >> 1
        if _less(h, i, parent):
            _swap(h, i, parent)
            i = parent
        else:
            break


cdef inline int heap_pop(Heap *h, double *key_out):
    cdef int val, i, child
    if h.size == 0:
        return -1
    val = h.val[0]
    key_out[0] = h.key[0]
    h.size -= 1
    if h.size == 0:
        return val
    h.key[0] = h.key[h.size]
    h.val[0] = h.val[h.size]
    i = 0
    while True:
        child = 2 * i + 1
        if child >= h.size:
            break
        if child + 1 < h.size and _less(h, child + 1, child):
            child += 1
        if _less(h, child, i):
            _swap(h, i, child)
            i = child
        else:
            break
    return val


def solve(caps, flow_links, link_flows, double eps):
    """See qtbs._kernel_py.solve; this is the compiled equivalent."""
    cdef int n_links = len(caps)
    cdef int n_flows = len(flow_links)
    cdef int i, j, k, l, f, l2, unresolved, pops, updates
    cdef double key, s_l

    # CSR-flatten the adjacency lists.
    cdef int lf_total = 0, fl_total = 0
    for i in range(n_links):
        lf_total += len(link_flows[i])
    for i in range(n_flows):
        fl_total += len(flow_links[i])

    cdef double *avail = <double *> malloc((n_links or 1) * sizeof(double))
    cdef double *share = <double *> malloc((n_links or 1) * sizeof(double))
    cdef double *rate = <double *> malloc((n_flows or 1) * sizeof(double))
    cdef int *nrem = <int *> malloc((n_links or 1) * sizeof(int))
    cdef char *dead = <char *> malloc(n_links or 1)
    cdef char *popped = <char *> malloc(n_links or 1)
    cdef char *resolved = <char *> malloc(n_flows or 1)
    cdef int *lf_ptr = <int *> malloc((n_links + 1) * sizeof(int))
    cdef int *lf_dat = <int *> malloc((lf_total or 1) * sizeof(int))
    cdef int *fl_ptr = <int *> malloc((n_flows + 1) * sizeof(int))
    cdef int *fl_dat = <int *> malloc((fl_total or 1) * sizeof(int))
    # Each link is pushed at most once per traversing flow plus once
    # initially, so lf_total + n_links bounds the live heap size.
    cdef Heap heap
    heap.key = <double *> malloc((lf_total + n_links + 1) * sizeof(double))
    heap.val = <int *> malloc((lf_total + n_links + 1) * sizeof(int))
    heap.size = 0

    bneck_edges = []
    trav_edges = []
    pop_order = []

    try:
        lf_ptr[0] = 0
        k = 0
        for i in range(n_links):
            for f in link_flows[i]:
                lf_dat[k] = f
                k += 1
            lf_ptr[i + 1] = k
        fl_ptr[0] = 0
        k = 0
        for i in range(n_flows):
            for l in flow_links[i]:
                fl_dat[k] = l
                k += 1
            fl_ptr[i + 1] = k

        for i in range(n_links):
            avail[i] = caps[i]
            nrem[i] = lf_ptr[i + 1] - lf_ptr[i]
            popped[i] = 0
            if nrem[i] == 0:
                dead[i] = 1
                share[i] = avail[i]
            else:
                dead[i] = 0
                share[i] = avail[i] / nrem[i]
                heap_push(&heap, share[i], i)
        for i in range(n_flows):
            rate[i] = _INF
            resolved[i] = 0

        unresolved = n_flows
        pops = 0
        updates = 0

        while unresolved > 0:
            l = -1
            while heap.size > 0:
                l = heap_pop(&heap, &key)
                if popped[l] or dead[l] or key != share[l]:
                    l = -1
                    continue
                break
            if l < 0:
                raise RuntimeError(
                    "no live link left while flows remain unresolved")
            popped[l] = 1
            pops += 1
            pop_order.append(l)
            s_l = share[l]
            for j in range(lf_ptr[l], lf_ptr[l + 1]):
                f = lf_dat[j]
                if rate[f] < s_l - eps:
                    continue
                bneck_edges.append((l, f))
                if resolved[f]:
                    continue
                rate[f] = s_l
                resolved[f] = 1
                unresolved -= 1
                for k in range(fl_ptr[f], fl_ptr[f + 1]):
                    l2 = fl_dat[k]
                    if l2 == l or popped[l2] or dead[l2]:
                        continue
                    if share[l2] > s_l + eps:
                        trav_edges.append((f, l2))
                        avail[l2] -= s_l
                        nrem[l2] -= 1
                        if nrem[l2] <= 0:
                            dead[l2] = 1
                            share[l2] = avail[l2] + s_l
                        else:
                            share[l2] = avail[l2] / nrem[l2]
                            heap_push(&heap, share[l2], l2)
                            updates += 1

        while heap.size > 0:
            l = heap_pop(&heap, &key)
            if popped[l] or dead[l] or key != share[l]:
                continue
            popped[l] = 1
            pops += 1
            pop_order.append(l)
            s_l = share[l]
            for j in range(lf_ptr[l], lf_ptr[l + 1]):
                f = lf_dat[j]
                if rate[f] >= s_l - eps:
                    bneck_edges.append((l, f))

        rate_out = [rate[i] for i in range(n_flows)]
        share_out = [share[i] for i in range(n_links)]
    finally:
        free(avail)
        free(share)
        free(rate)
        free(nrem)
        free(dead)
        free(popped)
        free(resolved)
        free(lf_ptr)
        free(lf_dat)
        free(fl_ptr)
        free(fl_dat)
        free(heap.key)
        free(heap.val)

    return rate_out, share_out, bneck_edges, trav_edges, pop_order, pops, updates
