"""Discrete Bayesian networks: construction, exact inference, sampling."""
from occupant_dbn.bayes.fitting import fit_cpt_from_counts
from occupant_dbn.bayes.inference import (
    BRUTE_FORCE_CAP,
    Distribution,
    brute_force_marginal,
    evidence_probability,
    exact_marginal,
    full_joint,
)
from occupant_dbn.bayes.network import (
    Network,
    Node,
    build_network,
    cpt_from_function,
    joint_probability,
    renormalize,
)
from occupant_dbn.bayes.sampling import PosteriorSampler, sample_posterior

__all__ = [
    "BRUTE_FORCE_CAP",
    "Distribution",
    "Network",
    "Node",
    "PosteriorSampler",
    "brute_force_marginal",
    "build_network",
    "cpt_from_function",
    "evidence_probability",
    "exact_marginal",
    "fit_cpt_from_counts",
    "full_joint",
    "joint_probability",
    "renormalize",
    "sample_posterior",
]
