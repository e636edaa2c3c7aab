"""Command-line front end.

Exit codes
----------
0  success (``analyze``: input equivalence holds and the certificate is contractive)
1  input error: unreadable or invalid spec, bad flag values
2  ``analyze``: inconclusive; ``compare``/``quotient``: input equivalence fails
3  ``simulate``/``sweep``: the integration blew up
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, _backend, gallery, report, specfile
from .certify import CertificateUnavailable, fn_certificate_mu
from .graph import build_laplacian, check_cluster_input_equivalence
from .reduce import QuotientError, build_quotient, compare_with_quotient, simulate_quotient
from .simulate import IntegrationError, cluster_errors, integrate
from .specfile import SpecError

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_BLOWUP = 0, 1, 2, 3

PLOT_SCRIPT = '''"""Plot the trajectory and cluster errors written next to this script."""
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).resolve().parent
traj = np.genfromtxt(here / "trajectory.csv", delimiter=",", names=True)
cols = traj.dtype.names
fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
for name in cols[1:]:
    if name.startswith("y_"):
        axes[0].plot(traj["t"], traj[name], lw=0.8)
axes[0].set_ylabel("y")
errs = here / "errors.csv"
if errs.exists():
    err = np.genfromtxt(errs, delimiter=",", names=True)
    for name in err.dtype.names[1:]:
        if name.startswith("err_"):
            axes[1].semilogy(err["t"], np.maximum(err[name], 1e-300), label=name[4:])
    axes[1].legend()
axes[1].set_xlabel("t")
axes[1].set_ylabel("max pairwise error")
fig.tight_layout()
fig.savefig(here / "plot.png", dpi=150)
'''


def fmt(x):
    return format(float(x), ".17g")


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def emit(payload, out):
    if out is None:
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        write_json(out, payload)


def write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def simulation_settings(doc, args):
    sim = doc.simulation
    if sim is None and args.t_end is None:
        raise SpecError("spec has no 'simulation' block; pass --t-end")
    t_end = args.t_end if args.t_end is not None else sim.t_end
    dt = args.dt if args.dt is not None else (sim.dt if sim else 0.01)
    save_every = args.save_every if args.save_every is not None else (sim.save_every if sim else 1)
    return t_end, dt, save_every


# ---------------------------------------------------------------------------
# simulate

def write_trajectory(out, traj, to_original):
    """``t, y_1..y_N, z_1..z_N`` with node columns in original order."""
    X = traj.node_states()
    if to_original is not None:
        X = X[:, to_original, :]
    N, n = X.shape[1], X.shape[2]
    prefix = ["y_", "z_"] if n == 2 else [f"x{k + 1}_" for k in range(n)]
    header = ["t"] + [f"{prefix[k]}{i + 1}" for k in range(n) for i in range(N)]
    rows = (np.concatenate(([t], X[k].T.reshape(-1))) for k, t in enumerate(traj.times))
    write_rows(out / "trajectory.csv", header, rows)


def run_simulation(text, source, out, gamma=None, seed=None, t_end=None, dt=None,
                   save_every=None, backend=None, run_id=None):
    """Simulate one spec into ``out``; returns a summary dict. Raises on failure."""
    doc = specfile.parse_spec(text, source)
    ns = argparse.Namespace(t_end=t_end, dt=dt, save_every=save_every)
    t_end, dt, save_every = simulation_settings(doc, ns)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"tool": "clustersync", "version": __version__, "spec": str(source),
            "input_sha256": specfile.text_digest(text), "run_id": run_id}

    if specfile.is_quotient(doc):
        q = specfile.build_quotient_from_spec(doc)
        if gamma is not None:
            q = type(q)(q.eta, q.cluster_params, (gamma, 0.0), q.cluster_names)
        ics, seed_used = specfile.cluster_state_values(doc, q, seed)
        traj = simulate_quotient(q, ics.reshape(-1), t_end, dt, save_every, backend)
        meta.update(traj.metadata, seed=seed_used, gamma=q.diffusion[0], quotient=True)
        write_trajectory(out, traj, None)
        summary = {"run_id": run_id, "gamma": q.diffusion[0]}
    else:
        net = specfile.build_network(doc)
        if gamma is not None:
            net = net.with_diffusion((gamma, 0.0))
        x0, seed_used = specfile.initial_state(doc, net, seed) if doc.simulation else (None, None)
        if x0 is None:
            raise SpecError("spec has no 'simulation' block with initial conditions")
        split = build_laplacian(net, allow_singletons=True)
        try:
            cert = fn_certificate_mu(net, split)
            mu, verdict = cert.mu, cert.verdict
            P = cert.P
        except CertificateUnavailable:
            mu, verdict, P = float("nan"), "unavailable", np.eye(net.state_dim)
        traj = integrate(net, split, x0, t_end, dt, save_every, backend)
        err = cluster_errors(traj, net, P)
        write_trajectory(out, traj, net.to_canonical)
        header = (["t"] + [f"err_{c}" for c in net.cluster_names] + ["deviation_P", "deviation_P2"])
        rows = (np.concatenate(([t], err.pairwise[k], [err.deviation_P[k], err.deviation_P2[k]]))
                for k, t in enumerate(err.times))
        write_rows(out / "errors.csv", header, rows)
        meta.update(traj.metadata, seed=seed_used, gamma=net.diffusion[0], ic_mode=doc.simulation.ic.mode,
                    certificate_mu=mu, certificate_verdict=verdict)
        summary = {"run_id": run_id, "gamma": net.diffusion[0], "mu": mu, "verdict": verdict}
        summary.update({f"final_err_{c}": float(v) for c, v in zip(net.cluster_names, err.pairwise[-1])})
    meta.setdefault("quotient", False)
    write_json(out / "metadata.json", meta)
    (out / "plot.py").write_text(PLOT_SCRIPT, encoding="utf-8")
    return summary


def cmd_simulate(args):
    text = Path(args.spec).read_text(encoding="utf-8")
    try:
        summary = run_simulation(text, args.spec, args.out, seed=args.seed, t_end=args.t_end, dt=args.dt,
                                 save_every=args.save_every, backend=args.backend)
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _sweep_worker(job):
    text, source, out, gamma, kwargs = job
    try:
        return run_simulation(text, source, out, gamma=gamma, **kwargs), None
    except IntegrationError as exc:
        return {"run_id": kwargs["run_id"], "gamma": gamma}, str(exc)


def cmd_sweep(args):
    text = Path(args.spec).read_text(encoding="utf-8")
    specfile.parse_spec(text, args.spec)
    out = Path(args.out)
    jobs = []
    for k, g in enumerate(args.gamma):
        run_id = f"run{k:03d}"
        kwargs = {"seed": args.seed, "t_end": args.t_end, "dt": args.dt, "save_every": args.save_every,
                  "backend": args.backend, "run_id": run_id}
        jobs.append((text, args.spec, out / run_id, g, kwargs))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_worker, jobs))
    else:
        results = [_sweep_worker(j) for j in jobs]
    summaries = []
    failed = False
    for summary, err in results:
        summary["error"] = err
        failed |= err is not None
        summaries.append(summary)
    write_json(out / "sweep.json", {"runs": summaries})
    print(json.dumps({"runs": summaries}, indent=2))
    return EXIT_BLOWUP if failed else EXIT_OK


# ---------------------------------------------------------------------------
# analyze / compare / quotient / expand / gallery

def cmd_analyze(args):
    doc, text = specfile.load_spec(args.spec)
    if specfile.is_quotient(doc):
        raise SpecError("analyze needs a full network, not a quotient document")
    net = specfile.build_network(doc)
    rep, verdict = report.analyze(net, text, args.backend, doc.name)
    rep["provenance"]["spec"] = str(args.spec)
    emit(rep, args.out)
    return EXIT_OK if verdict == "certified" else EXIT_INCONCLUSIVE


def cmd_compare(args):
    doc, text = specfile.load_spec(args.spec)
    if specfile.is_quotient(doc):
        raise SpecError("compare needs a full network, not a quotient document")
    net = specfile.build_network(doc)
    cie = check_cluster_input_equivalence(net)
    if not cie.passed:
        emit({"cie": report.cie_section(net, cie)}, args.out)
        return EXIT_INCONCLUSIVE
    ns = argparse.Namespace(t_end=args.t_end, dt=args.dt, save_every=args.save_every)
    t_end, dt, save_every = simulation_settings(doc, ns)
    states, seed = specfile.cluster_state_values(doc, net, args.seed)
    rep = compare_with_quotient(net, states, t_end, dt, save_every, args.backend, cie)
    emit({"equivalence": rep.as_dict(), "seed": seed, "cluster_states": states.tolist(),
          "eta": cie.eta.tolist(), "input_sha256": specfile.text_digest(text)}, args.out)
    return EXIT_OK


def cmd_quotient(args):
    doc, _ = specfile.load_spec(args.spec)
    if specfile.is_quotient(doc):
        q = specfile.build_quotient_from_spec(doc)
    else:
        net = specfile.build_network(doc)
        try:
            q = build_quotient(net)
        except QuotientError as exc:
            emit({"cie": report.cie_section(net, exc.report)}, args.out)
            return EXIT_INCONCLUSIVE
    sim = doc.simulation.model_dump(exclude_none=True) if doc.simulation else None
    if sim is not None and sim["ic"]["mode"] in ("explicit", "on_manifold"):
        sim = None
    emit(specfile.quotient_to_document(q, doc.name + "-quotient" if doc.name else "", doc.description, sim),
         args.out)
    return EXIT_OK


def cmd_expand(args):
    doc, _ = specfile.load_spec(args.spec)
    sim = doc.simulation.model_dump(exclude_none=True) if doc.simulation else None
    if specfile.is_quotient(doc):
        q = specfile.build_quotient_from_spec(doc)
        out = specfile.quotient_to_document(q, doc.name, doc.description, sim)
    else:
        out = specfile.network_to_document(specfile.build_network(doc), doc.name, doc.description, sim)
    emit(out, args.out)
    return EXIT_OK


def cmd_gallery(args):
    if args.name is None:
        for name, fn in gallery.GALLERY.items():
            print(f"{name:24s} {fn.__doc__.strip().splitlines()[0]}")
        return EXIT_OK
    emit(gallery.document(args.name), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------

def positive_float(s):
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code, keeping 2 for inconclusive results."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = ArgumentParser(prog="clustersync", description=__doc__.split("\n\n")[0],
                                     epilog=__doc__.split("\n", 2)[2],
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"clustersync {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    def add(name, fn, help, spec=True):
        p = sub.add_parser(name, help=help, description=help)
        if spec:
            p.add_argument("spec", help="network-spec JSON document")
        p.set_defaults(func=fn)
        return p

    def run_flags(p):
        p.add_argument("--seed", type=int, help="override the initial-condition seed")
        p.add_argument("--dt", type=positive_float, help="override the step size")
        p.add_argument("--t-end", type=positive_float, help="override the final time")
        p.add_argument("--save-every", type=positive_int, help="keep every k-th step")

    def backend_flag(p):
        p.add_argument("--backend", choices=["auto", "compiled", "python"], default=None,
                       help=f"numerical kernels (default: {_backend.DEFAULT_BACKEND})")

    p = add("analyze", cmd_analyze, "spectra, input-equivalence check and contraction certificate")
    p.add_argument("--out", help="report file (default: stdout)")
    backend_flag(p)

    p = add("simulate", cmd_simulate, "integrate the network and write trajectory and error tables")
    p.add_argument("--out", required=True, help="output directory")
    run_flags(p)
    backend_flag(p)

    p = add("compare", cmd_compare, "full network on the cluster manifold against its quotient")
    p.add_argument("--out", help="report file (default: stdout)")
    run_flags(p)
    backend_flag(p)

    p = add("quotient", cmd_quotient, "write the quotient network as a spec document")
    p.add_argument("--out", help="output file (default: stdout)")

    p = add("expand", cmd_expand, "expand generators into explicit nodes and edges")
    p.add_argument("--out", help="output file (default: stdout)")

    p = add("sweep", cmd_sweep, "simulate the spec once per coupling gain")
    p.add_argument("--gamma", type=float, nargs="+", required=True, help="coupling gains")
    p.add_argument("--out", required=True, help="output directory; one subdirectory per run")
    p.add_argument("--jobs", type=positive_int, default=1, help="concurrent runs")
    run_flags(p)
    backend_flag(p)

    p = add("gallery", cmd_gallery, "list or write the bundled example specs", spec=False)
    p.add_argument("name", nargs="?", choices=sorted(gallery.GALLERY), help="entry to write")
    p.add_argument("--out", help="output file (default: stdout)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
