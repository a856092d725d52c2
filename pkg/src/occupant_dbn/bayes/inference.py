"""Exact inference: variable elimination and a brute-force enumeration oracle."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from occupant_dbn.bayes.network import Assignment, Network
from occupant_dbn.errors import TooLargeError, ZeroEvidenceError

BRUTE_FORCE_CAP = 2**20


@dataclass(frozen=True)
class Distribution:
    node: str
    probs: Mapping[str, float]

    def __getitem__(self, label):
        return self.probs[label]

    def as_array(self) -> np.ndarray:
        return np.array(list(self.probs.values()))

    def most_likely(self) -> str:
        return max(self.probs, key=self.probs.get)


class Factor:
    """Non-negative table over an ordered tuple of variables."""

    __slots__ = ("vars", "table")

    def __init__(self, vars_: tuple[str, ...], table: np.ndarray):
        self.vars = vars_
        self.table = table

    def expand(self, vars_: tuple[str, ...]) -> np.ndarray:
        # view of the table with axes ordered like vars_ and size-1 axes for absent vars
        order = [self.vars.index(v) for v in vars_ if v in self.vars]
        arr = self.table.transpose(order)
        shape = []
        it = iter(arr.shape)
        for v in vars_:
            shape.append(next(it) if v in self.vars else 1)
        return arr.reshape(shape)

    def __mul__(self, other: "Factor") -> "Factor":
        vars_ = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return Factor(vars_, self.expand(vars_) * other.expand(vars_))

    def sum_out(self, var: str) -> "Factor":
        axis = self.vars.index(var)
        return Factor(self.vars[:axis] + self.vars[axis + 1:], self.table.sum(axis=axis))

    def reduce(self, evidence: Mapping[str, int]) -> "Factor":
        idx = []
        keep = []
        for v in self.vars:
            if v in evidence:
                idx.append(evidence[v])
            else:
                idx.append(slice(None))
                keep.append(v)
        if len(keep) == len(self.vars):
            return self
        return Factor(tuple(keep), self.table[tuple(idx)])


def min_fill_order(factors: list[Factor], eliminate: set[str]) -> list[str]:
    """Greedy min-fill elimination order, ties broken by node name."""
    adj: dict[str, set[str]] = {v: set() for v in eliminate}
    for f in factors:
        for v in f.vars:
            adj.setdefault(v, set())
            adj[v].update(u for u in f.vars if u != v)
    remaining = set(eliminate)
    order = []
    while remaining:
        best = None
        for v in sorted(remaining):
            nbrs = sorted(adj[v])
            fill = 0
            for i, a in enumerate(nbrs):
                for b in nbrs[i + 1:]:
                    if b not in adj[a]:
                        fill += 1
            if best is None or fill < best[0]:
                best = (fill, v)
        v = best[1]
        order.append(v)
        nbrs = adj.pop(v)
        for a in nbrs:
            adj[a].discard(v)
            adj[a].update(nbrs - {a})
        remaining.discard(v)
    return order


def _posterior_factor(net: Network, query: tuple[str, ...], ev: Mapping[str, int]) -> tuple[Factor, float]:
    """Unnormalized factor over ``query`` (minus evidence vars) and its total mass."""
    relevant = net.ancestors(set(query) | set(ev))
    factors = []
    for name in net.order:
        if name not in relevant:
            continue
        f = Factor(net.parents(name) + (name,), net.table(name)).reduce(ev)
        factors.append(f)
    keep = {q for q in query if q not in ev}
    to_eliminate = {v for f in factors for v in f.vars} - keep
    for var in min_fill_order(factors, to_eliminate):
        touching = [f for f in factors if var in f.vars]
        factors = [f for f in factors if var not in f.vars]
        prod = touching[0]
        for f in touching[1:]:
            prod = prod * f
        factors.append(prod.sum_out(var))
    result = Factor((), np.array(1.0))
    for f in factors:
        result = result * f
    total = float(result.table.sum())
    return result, total


def _validated_evidence(net: Network, evidence: Assignment | None) -> dict[str, int]:
    return net.check_assignment(evidence or {})


def exact_marginal(net: Network, query: str, evidence: Assignment | None = None) -> Distribution:
    """Posterior distribution of ``query`` given ``evidence`` by variable elimination."""
    states = net.states(query)
    ev = _validated_evidence(net, evidence)
    factor, total = _posterior_factor(net, (query,), ev)
    if not total > 0.0:
        raise ZeroEvidenceError(f"evidence {dict(evidence or {})} has probability zero")
    if query in ev:
        probs = [0.0] * len(states)
        probs[ev[query]] = 1.0
    else:
        probs = (factor.expand((query,)) / total).tolist()
    return Distribution(query, dict(zip(states, probs)))


def conditional_row(net: Network, query: str, ev: Mapping[str, int]) -> np.ndarray:
    """Posterior vector of ``query`` given evidence already encoded as indices."""
    factor, total = _posterior_factor(net, (query,), ev)
    if not total > 0.0:
        raise ZeroEvidenceError("evidence has probability zero")
    return factor.expand((query,)) / total


def evidence_probability(net: Network, evidence: Assignment) -> float:
    """Marginal probability of a partial assignment."""
    ev = _validated_evidence(net, evidence)
    return _posterior_factor(net, (), ev)[1]


def full_joint(net: Network, cap: int = BRUTE_FORCE_CAP) -> np.ndarray:
    """Complete joint table with axes in ``net.order``.

    Enumerates every combination explicitly by broadcasting each CPT to the
    full domain product and multiplying; no elimination ordering involved.
    """
    names = net.order
    shape = tuple(len(net.states(n)) for n in names)
    size = int(np.prod(shape, dtype=np.int64))
    if size > cap:
        raise TooLargeError(f"joint has {size} combinations, cap is {cap}")
    pos = {n: i for i, n in enumerate(names)}
    joint = np.ones(shape)
    for n in names:
        axes = [pos[p] for p in net.parents(n)] + [pos[n]]
        tbl = net.table(n)
        # move table axes to their global positions
        perm = np.argsort(axes)
        tbl = tbl.transpose(perm)
        bshape = [1] * len(names)
        for a in sorted(axes):
            bshape[a] = shape[a]
        joint = joint * tbl.reshape(bshape)
    return joint


def brute_force_marginal(
    net: Network, query: str, evidence: Assignment | None = None, cap: int = BRUTE_FORCE_CAP
) -> Distribution:
    """Posterior by summing the joint over every completion of the evidence."""
    states = net.states(query)
    ev = _validated_evidence(net, evidence)
    joint = full_joint(net, cap)
    names = net.order
    idx = tuple(ev[n] if n in ev else slice(None) for n in names)
    free = [n for n in names if n not in ev]
    sub = joint[idx]
    total = float(sub.sum())
    if not total > 0.0:
        raise ZeroEvidenceError(f"evidence {dict(evidence or {})} has probability zero")
    if query in ev:
        probs = [0.0] * len(states)
        probs[ev[query]] = 1.0
    else:
        q = free.index(query)
        other = tuple(i for i in range(len(free)) if i != q)
        probs = (sub.sum(axis=other) / total).tolist()
    return Distribution(query, dict(zip(states, probs)))
