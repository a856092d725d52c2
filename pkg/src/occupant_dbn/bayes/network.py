"""Discrete Bayesian network definition and validation."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from occupant_dbn.errors import (
    CptShapeError,
    CycleError,
    DomainError,
    IncompleteAssignmentError,
    NormalizationError,
    UnknownLabelError,
    UnknownNodeError,
    UnknownParentError,
)

ROW_TOLERANCE = 1e-9

Assignment = Mapping[str, str]


def renormalize(row: Sequence[float]) -> tuple[float, ...]:
    """Return ``row`` rescaled so that ``math.fsum`` of it is exactly 1.

    Idempotent: a row that already sums to exactly 1 comes back unchanged,
    which keeps save/load cycles bit-stable.
    """
    values = [float(p) for p in row]
    total = math.fsum(values)
    if total == 1.0:
        return tuple(values)
    values = [p / total for p in values]
    big = max(range(len(values)), key=lambda i: values[i])
    for _ in range(8):
        total = math.fsum(values)
        if total == 1.0:
            break
        values[big] = max(0.0, values[big] + (1.0 - total))
    return tuple(values)


@dataclass(frozen=True)
class Node:
    """One discrete variable with its conditional probability table.

    ``cpt`` maps each tuple of parent labels (in ``parents`` order) to a
    probability vector over ``states``. Root nodes use the empty tuple.
    """

    name: str
    states: tuple[str, ...]
    parents: tuple[str, ...] = ()
    cpt: Mapping[tuple[str, ...], tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(
            self,
            "cpt",
            {tuple(k): tuple(float(p) for p in v) for k, v in dict(self.cpt).items()},
        )

    @property
    def cardinality(self) -> int:
        return len(self.states)


def cpt_from_function(states, parent_states, fn) -> dict:
    """Build a CPT mapping by calling ``fn(*parent_labels)`` for every row."""
    rows = {}
    for combo in itertools.product(*parent_states):
        rows[combo] = tuple(fn(*combo))
        if len(rows[combo]) != len(states):
            raise CptShapeError(f"row {combo} has {len(rows[combo])} entries, expected {len(states)}")
    return rows


class Network:
    """Immutable, validated discrete Bayesian network.

    Build instances with :func:`build_network`. Each node's table is cached
    as an array of shape ``(*parent_cardinalities, cardinality)``.
    """

    def __init__(self, nodes: Sequence[Node], order: Sequence[str], tables: Mapping[str, np.ndarray]):
        self._nodes = {n.name: n for n in nodes}
        self._declared = tuple(n.name for n in nodes)
        self.order = tuple(order)
        self._tables = dict(tables)
        self._index = {n.name: {s: i for i, s in enumerate(n.states)} for n in nodes}
        children: dict[str, list[str]] = {n.name: [] for n in nodes}
        for n in nodes:
            for p in n.parents:
                children[p].append(n.name)
        self._children = {k: tuple(v) for k, v in children.items()}
        self._descendants: dict[str, frozenset[str]] = {}
        for t in self._tables.values():
            t.setflags(write=False)

    # -- structure ----------------------------------------------------------

    @property
    def names(self) -> tuple[str, ...]:
        """Node names in declaration order."""
        return self._declared

    @property
    def nodes(self) -> tuple[Node, ...]:
        return tuple(self._nodes[n] for n in self._declared)

    def __len__(self):
        return len(self._nodes)

    def __contains__(self, name):
        return name in self._nodes

    def __getitem__(self, name: str) -> Node:
        try:
            return self._nodes[name]
        except KeyError:
            raise UnknownNodeError(f"unknown node {name!r}") from None

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.nodes == other.nodes

    def __repr__(self):
        return f"Network({len(self)} nodes: {', '.join(self.order)})"

    def states(self, name: str) -> tuple[str, ...]:
        return self[name].states

    def parents(self, name: str) -> tuple[str, ...]:
        return self[name].parents

    def children(self, name: str) -> tuple[str, ...]:
        return self._children[name]

    def table(self, name: str) -> np.ndarray:
        return self._tables[name]

    def label_index(self, name: str, label: str) -> int:
        try:
            return self._index[name][label]
        except KeyError:
            if name not in self._index:
                raise UnknownNodeError(f"unknown node {name!r}") from None
            raise UnknownLabelError(
                f"label {label!r} not in domain of {name!r} {list(self[name].states)}"
            ) from None

    def ancestors(self, names: Iterable[str]) -> set[str]:
        """Given nodes plus all their ancestors."""
        seen: set[str] = set()
        stack = list(names)
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(self[n].parents)
        return seen

    def descendants(self, name: str) -> frozenset[str]:
        """Strict descendants of ``name``."""
        if name not in self._descendants:
            seen: set[str] = set()
            stack = list(self._children[name])
            while stack:
                n = stack.pop()
                if n not in seen:
                    seen.add(n)
                    stack.extend(self._children[n])
            self._descendants[name] = frozenset(seen)
        return self._descendants[name]

    def check_assignment(self, assignment: Assignment) -> dict[str, int]:
        """Validate labels and return the same assignment as label indices."""
        return {k: self.label_index(k, v) for k, v in assignment.items()}

    def cpt_row_count(self) -> int:
        return sum(len(n.cpt) for n in self._nodes.values())


def _topological_order(nodes: Mapping[str, Node]) -> list[str]:
    # Kahn's algorithm; ready set kept sorted so the order is deterministic.
    indegree = {name: len(n.parents) for name, n in nodes.items()}
    children: dict[str, list[str]] = {name: [] for name in nodes}
    for name, n in nodes.items():
        for p in n.parents:
            children[p].append(name)
    ready = sorted(name for name, d in indegree.items() if d == 0)
    order = []
    while ready:
        name = ready.pop(0)
        order.append(name)
        for c in children[name]:
            indegree[c] -= 1
            if indegree[c] == 0:
                ready.append(c)
        ready.sort()
    if len(order) != len(nodes):
        raise CycleError(_find_cycle(nodes, set(nodes) - set(order)))
    return order


def _find_cycle(nodes: Mapping[str, Node], remaining: set[str]) -> list[str]:
    # every node left after Kahn has a parent in `remaining`; walk parents until a repeat
    start = min(remaining)
    path = [start]
    seen = {start: 0}
    cur = start
    while True:
        cur = min(p for p in nodes[cur].parents if p in remaining)
        if cur in seen:
            cycle = path[seen[cur]:]
            cycle.reverse()
            return cycle + [cycle[0]]
        seen[cur] = len(path)
        path.append(cur)


def build_network(nodes: Iterable[Node]) -> Network:
    """Validate node definitions and return an immutable :class:`Network`.

    Raises CycleError, UnknownParentError, CptShapeError, NormalizationError
    or DomainError. Rows within 1e-9 of summing to one are renormalized.
    """
    nodes = list(nodes)
    by_name: dict[str, Node] = {}
    for n in nodes:
        if n.name in by_name:
            raise DomainError(f"duplicate node name {n.name!r}")
        if len(n.states) < 2:
            raise DomainError(f"node {n.name!r} needs at least 2 states, has {len(n.states)}")
        if len(set(n.states)) != len(n.states):
            raise DomainError(f"node {n.name!r} has duplicate states")
        if len(set(n.parents)) != len(n.parents):
            raise DomainError(f"node {n.name!r} lists a parent twice")
        if n.name in n.parents:
            raise CycleError([n.name, n.name])
        by_name[n.name] = n
    for n in nodes:
        for p in n.parents:
            if p not in by_name:
                raise UnknownParentError(f"node {n.name!r} has unknown parent {p!r}")
    order = _topological_order(by_name)

    canonical = []
    tables = {}
    for n in nodes:
        parent_states = [by_name[p].states for p in n.parents]
        expected = set(itertools.product(*parent_states))
        given = set(n.cpt)
        if given != expected:
            missing = sorted(expected - given)
            extra = sorted(given - expected)
            parts = []
            if missing:
                parts.append(f"missing rows {missing[:3]}{'...' if len(missing) > 3 else ''}")
            if extra:
                parts.append(f"unexpected rows {extra[:3]}{'...' if len(extra) > 3 else ''}")
            raise CptShapeError(f"node {n.name!r}: " + "; ".join(parts))
        shape = tuple(len(s) for s in parent_states) + (len(n.states),)
        table = np.empty(shape)
        rows = {}
        for combo in itertools.product(*parent_states):
            row = n.cpt[combo]
            if len(row) != len(n.states):
                raise CptShapeError(
                    f"node {n.name!r} row {combo}: {len(row)} entries for {len(n.states)} states"
                )
            if any(not (0.0 <= p <= 1.0) for p in row):
                raise NormalizationError(f"node {n.name!r} row {combo}: entries must lie in [0, 1]")
            total = math.fsum(row)
            if abs(total - 1.0) > ROW_TOLERANCE:
                raise NormalizationError(f"node {n.name!r} row {combo}: sums to {total!r}, not 1")
            row = renormalize(row)
            rows[combo] = row
            idx = tuple(by_name[p].states.index(lbl) for p, lbl in zip(n.parents, combo))
            table[idx] = row
        tables[n.name] = table
        canonical.append(Node(n.name, n.states, n.parents, rows))
    return Network(canonical, order, tables)


def joint_probability(net: Network, assignment: Assignment) -> float:
    """Chain-rule probability of a total assignment."""
    missing = [n for n in net.names if n not in assignment]
    if missing:
        raise IncompleteAssignmentError(f"assignment misses nodes {missing}")
    idx = net.check_assignment(assignment)
    p = 1.0
    for name in net.order:
        key = tuple(idx[q] for q in net.parents(name)) + (idx[name],)
        p *= float(net.table(name)[key])
    return p
