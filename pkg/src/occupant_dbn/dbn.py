"""Dynamic Bayesian network over hourly slices with hard-state propagation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from occupant_dbn.bayes import Network, Node, build_network, sample_posterior
from occupant_dbn.bayes.network import Assignment
from occupant_dbn.errors import DomainError, EvidenceConflictError


@dataclass(frozen=True)
class TemporalLink:
    node: str
    prev: str


@dataclass(frozen=True)
class DbnTemplate:
    """One-slice network whose ``prev`` root nodes carry last slot's values."""

    base: Network
    links: tuple[TemporalLink, ...]
    initial_state: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "initial_state", dict(self.initial_state))
        seen = set()
        for link in self.links:
            for name in (link.node, link.prev):
                if name not in self.base:
                    raise DomainError(f"temporal link refers to unknown node {name!r}")
            if link.prev in seen:
                raise DomainError(f"previous-state node {link.prev!r} linked twice")
            seen.add(link.prev)
            if self.base.parents(link.prev):
                raise DomainError(f"previous-state node {link.prev!r} must be a root")
            if self.base.states(link.prev) != self.base.states(link.node):
                raise DomainError(f"{link.prev!r} and {link.node!r} have different domains")
            if link.prev not in self.initial_state:
                raise DomainError(f"initial state misses {link.prev!r}")
        extra = set(self.initial_state) - seen
        if extra:
            raise DomainError(f"initial state assigns non previous-state nodes {sorted(extra)}")
        self.base.check_assignment(self.initial_state)

    @property
    def prev_nodes(self) -> tuple[str, ...]:
        return tuple(link.prev for link in self.links)


@dataclass(frozen=True)
class SliceState:
    slot: int
    sampled: Mapping[str, str]


def step(
    template: DbnTemplate,
    prev: Assignment,
    evidence: Assignment,
    rng: np.random.Generator,
    slot: int = 0,
) -> SliceState:
    """Sample one slice given last slot's temporal values and this slot's evidence."""
    merged = dict(evidence)
    for name in template.prev_nodes:
        if name not in prev:
            raise EvidenceConflictError(f"previous state misses {name!r}")
        if name in merged and merged[name] != prev[name]:
            raise EvidenceConflictError(
                f"evidence {name}={merged[name]!r} contradicts propagated {prev[name]!r}"
            )
        merged[name] = prev[name]
    return SliceState(slot, sample_posterior(template.base, merged, rng))


def extract_next_prev(state: SliceState, template: DbnTemplate) -> dict[str, str]:
    return {link.prev: state.sampled[link.node] for link in template.links}


def slot_name(name: str, slot: int) -> str:
    return f"{name}@{slot}"


def unroll(template: DbnTemplate, horizon: int) -> Network:
    """Static network with one copy of every non-previous-state node per slot.

    Copies are named ``name@t`` for ``t = 1..horizon``. In slot 1 the
    previous-state parents are fixed to the initial state by slicing the
    children's tables; in later slots they become edges from ``node@t-1``.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    base = template.base
    prev_to_node = {link.prev: link.node for link in template.links}
    nodes = []
    for t in range(1, horizon + 1):
        for node in base.nodes:
            if node.name in prev_to_node:
                continue
            parents = []
            fixed_pos = {}
            for i, p in enumerate(node.parents):
                if p in prev_to_node:
                    if t == 1:
                        fixed_pos[i] = template.initial_state[p]
                        continue
                    parents.append(slot_name(prev_to_node[p], t - 1))
                else:
                    parents.append(slot_name(p, t))
            cpt = {}
            for combo, row in node.cpt.items():
                if any(combo[i] != lbl for i, lbl in fixed_pos.items()):
                    continue
                key = tuple(lbl for i, lbl in enumerate(combo) if i not in fixed_pos)
                cpt[key] = row
            nodes.append(Node(slot_name(node.name, t), node.states, tuple(parents), cpt))
    return build_network(nodes)
