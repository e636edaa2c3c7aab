"""Cluster synchronization of diffusively coupled oscillator networks.

Laplacian splits and input-equivalence checks (:mod:`~clustersync.graph`),
matrix measures (:mod:`~clustersync.measures`), node models
(:mod:`~clustersync.dynamics`), contraction certificates
(:mod:`~clustersync.certify`), simulation (:mod:`~clustersync.simulate`) and
quotient networks (:mod:`~clustersync.reduce`).
"""
__version__ = "0.1.0"

from ._backend import DEFAULT_BACKEND, HAVE_COMPILED, available_backends
from .certify import Certificate, CertificateUnavailable, fn_certificate_mu, numeric_certificate_mu
from .dynamics import FNParams, LinearModel
from .graph import ClusteredNetwork, NetworkError, build_laplacian, check_cluster_input_equivalence
from .measures import WeightMatrix, mu_1, mu_2, mu_2_weighted, mu_inf
from .reduce import QuotientNetwork, build_quotient, compare_with_quotient, simulate_quotient
from .simulate import IntegrationError, Trajectory, check_envelope, cluster_errors, integrate

__all__ = [
    "__version__",
    "DEFAULT_BACKEND",
    "HAVE_COMPILED",
    "available_backends",
    "Certificate",
    "CertificateUnavailable",
    "fn_certificate_mu",
    "numeric_certificate_mu",
    "FNParams",
    "LinearModel",
    "ClusteredNetwork",
    "NetworkError",
    "build_laplacian",
    "check_cluster_input_equivalence",
    "WeightMatrix",
    "mu_1",
    "mu_2",
    "mu_2_weighted",
    "mu_inf",
    "QuotientNetwork",
    "build_quotient",
    "compare_with_quotient",
    "simulate_quotient",
    "IntegrationError",
    "Trajectory",
    "check_envelope",
    "cluster_errors",
    "integrate",
]
