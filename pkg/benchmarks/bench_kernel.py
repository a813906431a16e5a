#!/usr/bin/env python3
"""Benchmark the compiled solve kernel against the pure-Python fallback.

Times the raw kernel on random instances of growing size, plus the two
kernel-heavy library operations (a full solve and a max-rate path search).

Run: python benchmarks/bench_kernel.py [--repeat N]
"""
import argparse
import statistics
import time

from qtbs import _kernel_py, gradient_graph, max_rate_path, random_network
from qtbs.model import interned

try:
    from qtbs import _solve_kernel
except ImportError:
    _solve_kernel = None


def _time(fn, repeat):
    samples = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return min(samples), statistics.median(samples)


def bench_kernels(repeat):
    sizes = [(20, 60, 5), (50, 200, 8), (120, 600, 10), (250, 1500, 12)]
    print(f"{'instance':<24}{'python':>12}{'cython':>12}{'speedup':>10}")
    for max_links, max_flows, max_len in sizes:
        nets = [random_network(s, max_links, max_flows, max_len) for s in range(8)]
        args = [interned(n)[2:] for n in nets]

        def run(impl):
            def go():
                for caps, fl, lf in args:
                    impl.solve(caps, fl, lf, 1e-9)
            return go

        py_best, _ = _time(run(_kernel_py), repeat)
        label = f"<=({max_links}L,{max_flows}F) x8"
        if _solve_kernel is None:
            print(f"{label:<24}{py_best * 1e3:>10.2f}ms{'n/a':>12}{'':>10}")
            continue
        cy_best, _ = _time(run(_solve_kernel), repeat)
        print(f"{label:<24}{py_best * 1e3:>10.2f}ms{cy_best * 1e3:>10.2f}ms"
              f"{py_best / cy_best:>9.1f}x")


def bench_operations(repeat):
    import json
    import pathlib

    fixtures = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
    from qtbs import parse_network

    b4 = parse_network(fixtures.joinpath("b4.json").read_text())
    big = random_network(7, max_links=200, max_flows=1200, max_path_len=10)
    cases = {
        "solve wan fixture": lambda: gradient_graph(b4),
        "solve random large": lambda: gradient_graph(big),
        "max_rate_path wan": lambda: max_rate_path(b4, "DC4", "DC11"),
    }
    print(f"\n{'operation':<24}{'best':>12}{'median':>12}")
    for name, fn in cases.items():
        best, med = _time(fn, repeat)
        print(f"{name:<24}{best * 1e3:>10.2f}ms{med * 1e3:>10.2f}ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    from qtbs import KERNEL_IMPLEMENTATION

    print(f"active kernel: {KERNEL_IMPLEMENTATION}\n")
    bench_kernels(args.repeat)
    bench_operations(args.repeat)


if __name__ == "__main__":
    main()
