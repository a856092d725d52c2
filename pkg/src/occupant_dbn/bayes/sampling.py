"""Exact posterior sampling of total assignments."""
from __future__ import annotations

import numpy as np

from occupant_dbn.bayes.inference import Factor
from occupant_dbn.bayes.network import Assignment, Network
from occupant_dbn.errors import ZeroEvidenceError


class PosteriorSampler:
    """Exact sequential sampler for P(all nodes | evidence).

    Unobserved nodes are drawn one at a time in topological order, each
    from its exact conditional given the evidence and the values already
    drawn. The conditionals come from one variable-elimination pass in
    reverse topological order: when node X is eliminated, the product of
    the factors that mention X is, as a function of X and earlier nodes,
    proportional to P(X | earlier nodes, evidence).

    Nodes without an observed descendant contribute a message of all ones,
    so their own CPT is already the exact conditional and they skip
    elimination.
    """

    def __init__(self, net: Network, evidence: Assignment | None = None):
        self.net = net
        self.evidence = net.check_assignment(evidence or {})
        observed = set(self.evidence)
        # name -> (conditioning vars, table with axes (*conditioning, name))
        self._tables: dict[str, tuple[tuple[str, ...], np.ndarray]] = {}
        pending: list[Factor] = []
        barren = set()
        for name in net.order:
            f = Factor(net.parents(name) + (name,), net.table(name))
            if name not in observed and not (observed & net.descendants(name)):
                barren.add(name)
                self._tables[name] = (net.parents(name), net.table(name))
            else:
                pending.append(f.reduce(self.evidence))
        for name in reversed(net.order):
            if name in observed or name in barren:
                continue
            touching = [f for f in pending if name in f.vars]
            pending = [f for f in pending if name not in f.vars]
            prod = touching[0]
            for f in touching[1:]:
                prod = prod * f
            others = tuple(v for v in prod.vars if v != name)
            self._tables[name] = (others, prod.expand(others + (name,)))
            pending.append(prod.sum_out(name))
        p_evidence = 1.0
        for f in pending:
            p_evidence *= float(f.table)
        if not p_evidence > 0.0:
            raise ZeroEvidenceError(f"evidence {dict(evidence or {})} has probability zero")
        self.evidence_probability = p_evidence

    def sample_indices(self, rng: np.random.Generator, n: int = 1) -> dict[str, np.ndarray]:
        """``n`` joint draws as arrays of label indices, keyed by node."""
        idx: dict[str, np.ndarray] = {k: np.full(n, v, dtype=np.intp) for k, v in self.evidence.items()}
        for name in self.net.order:
            if name in idx:
                continue
            others, table = self._tables[name]
            weights = table[tuple(idx[o] for o in others)] if others else np.broadcast_to(table, (n, table.shape[-1]))
            cdf = np.cumsum(weights, axis=-1)
            u = rng.random(n) * cdf[:, -1]
            draw = (cdf <= u[:, None]).sum(axis=-1)
            idx[name] = np.minimum(draw, table.shape[-1] - 1)
        return idx

    def sample(self, rng: np.random.Generator) -> dict[str, str]:
        idx = self.sample_indices(rng, 1)
        return {n: self.net.states(n)[int(idx[n][0])] for n in self.net.names}


def sample_posterior(net: Network, evidence: Assignment | None, rng: np.random.Generator) -> dict[str, str]:
    """Draw one total assignment from P(all nodes | evidence)."""
    return PosteriorSampler(net, evidence).sample(rng)
