"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Times the Jacobi eigensolver on random symmetric matrices and on the
200-node complete/star Laplacian, and fixed-step RK4 on FitzHugh-Nagumo
networks, reporting the best of ``--repeat`` runs and the speed-up.
"""
import argparse
import json
import time

import numpy as np

from clustersync import _backend, eigen, gallery, graph, simulate, specfile


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    rng = np.random.default_rng(0)
    for n in (50, 200):
        a = rng.normal(size=(n, n))
        a = 0.5 * (a + a.T)
        yield f"jacobi random n={n}", lambda b, a=a: eigen.eigvalsh(a, backend=b)
    net = specfile.build_network(gallery.spec("complete-star"))
    yield "laplacian split complete-star (N=200)", lambda b: graph.build_laplacian(net, backend=b)
    for name, t_end in (("three-clusters", 100.0), ("complete-star-20", 200.0), ("complete-star", 20.0)):
        net = specfile.build_network(gallery.spec(name))
        x0 = simulate.random_state(net, (-2, 2), 0)
        steps = int(round(t_end / 0.01))
        yield (f"rk4 {name} (N={net.n_nodes}, {steps} steps)",
               lambda b, net=net, x0=x0, t_end=t_end: simulate.integrate(net, None, x0, t_end, backend=b,
                                                                       save_every=100))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", help="also write results here")
    args = parser.parse_args(argv)

    backends = _backend.available_backends()
    if len(backends) == 1:
        print("compiled kernels not built; timing the Python backend only")
    rows = []
    print(f"{'case':48s}" + "".join(f"{b:>12s}" for b in backends) + ("     speed-up" if len(backends) > 1 else ""))
    for label, fn in cases():
        times = {b: best_time(lambda: fn(b), args.repeat) for b in backends}
        line = f"{label:48s}" + "".join(f"{times[b]:11.4f}s" for b in backends)
        if len(backends) > 1:
            line += f"{times['python'] / times['compiled']:12.1f}x"
        print(line)
        rows.append({"case": label, **{f"{b}_s": times[b] for b in backends}})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
