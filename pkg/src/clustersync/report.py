"""Structured analysis reports: spectra, input equivalence, certificate and provenance."""
import math

from . import __version__, certify, graph
from .certify import CertificateUnavailable
from .specfile import text_digest


def _num(x):
    """JSON-safe float: NaN and infinities become strings."""
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def cie_section(net, cie):
    return {
        "passed": cie.passed,
        "tol": cie.tol,
        "eta": [[_num(v) for v in row] for row in cie.eta],
        "failures": [
            {
                "target": net.cluster_names[pc.target],
                "source": net.cluster_names[pc.source],
                "incoming": list(pc.incoming),
                "offending_nodes": list(pc.offending),
            }
            for pc in cie.failures()
        ],
    }


def spectra_section(net, split):
    return {
        "lambda2": _num(split.lambda2),
        "cluster_lambda2": {n: _num(v) for n, v in zip(net.cluster_names, split.cluster_lambda2)},
        "bar_lambda2": _num(split.bar_lambda2),
        "Lambda": {n: _num(v) for n, v in zip(net.cluster_names, split.Lambda)},
    }


def certificate_section(cert):
    d = cert.as_dict()
    d["mu"] = _num(d["mu"])
    for c in d["clusters"]:
        c["gamma_threshold"] = _num(c["gamma_threshold"])
        c["Lambda"] = _num(c["Lambda"])
        c["mu"] = _num(c["mu"])
    return d


def analyze(net, source_text=None, backend=None, name=""):
    """Build the analysis report for ``net``.

    Returns ``(report, verdict)`` with ``verdict`` one of ``"certified"``
    (input equivalence holds and ``mu < 0``) or ``"inconclusive"``.
    """
    split = graph.build_laplacian(net, allow_singletons=True, backend=backend)
    cie = graph.check_cluster_input_equivalence(net)
    try:
        cert = certify.fn_certificate_mu(net, split)
        cert_section = certificate_section(cert)
        contractive = cert.contractive
    except CertificateUnavailable as exc:
        cert_section = {"verdict": "unavailable", "reason": str(exc)}
        contractive = False
    verdict = "certified" if (cie.passed and contractive) else "inconclusive"
    report = {
        "name": name,
        "verdict": verdict,
        "network": {
            "n_nodes": net.n_nodes,
            "clusters": {n: len(c) for n, c in zip(net.cluster_names, net.clusters)},
            "n_edges": len(net.edges),
            "diffusion": list(net.diffusion),
        },
        "spectra": spectra_section(net, split),
        "cie": cie_section(net, cie),
        "certificate": cert_section,
        "provenance": {
            "tool": "clustersync",
            "version": __version__,
            "network_sha256": net.digest(),
            "input_sha256": text_digest(source_text) if source_text is not None else None,
        },
    }
    return report, verdict
