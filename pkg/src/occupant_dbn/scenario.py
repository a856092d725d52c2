"""Scenario model plus JSON loading, validation and canonical serialization.

A scenario document is a single JSON object::

    {
      "format_version": 1,
      "name": "...", "description": "...", "metadata": {...},
      "network": {"nodes": [{"name", "states", "parents", "cpt": [{"given": [...], "p": [...]}]}]},
      "temporal": {"links": [{"node", "prev"}], "initial_state": {prev: label}},
      "calendars": {node: [label per slot]},
      "weather": {"labels": {node: [label per slot]},
                  "temperatures": {"zone": [...], boundary: [...]}},
      "physics": {"volume", "co2_per_person", "gravity", "thresholds",
                  "boundaries": {label: ppm}, "initial_co2", "co2_node",
                  "openings": {"door": {...}, "window": {...}}},
      "mapping": {label: ratio},
      "occupancy": [{"node", "counts": {label: persons}}],
      "run": {"start_hour", "end_hour", "slot_seconds"}
    }

See ``docs/scenario_format.md`` for the field reference.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from occupant_dbn.bayes import Node, build_network
from occupant_dbn.bayes.network import Network
from occupant_dbn.dbn import DbnTemplate, TemporalLink
from occupant_dbn.errors import (
    CycleError,
    NetworkError,
    ParseError,
    ValidationError,
)
from occupant_dbn.physics import CO2_LEVELS, OpeningGeometry, ZoneParams

FORMAT_VERSION = 1
OPENINGS = ("door", "window")


@dataclass(frozen=True)
class Opening:
    geometry: OpeningGeometry
    node: str


@dataclass(frozen=True)
class Horizon:
    start_hour: int = 7
    end_hour: int = 20
    slot_seconds: float = 3600.0

    @property
    def hours(self) -> list[int]:
        return list(range(self.start_hour, self.end_hour + 1))

    def __len__(self):
        return max(0, self.end_hour - self.start_hour + 1)


@dataclass(frozen=True)
class OccupancyTerm:
    """Persons contributed by ``node`` for each of its labels (missing = 0)."""

    node: str
    counts: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "counts", dict(self.counts))


@dataclass(frozen=True)
class Scenario:
    name: str
    template: DbnTemplate
    calendars: Mapping[str, tuple[str, ...]]
    weather_labels: Mapping[str, tuple[str, ...]]
    temperatures: Mapping[str, tuple[float, ...]]
    zone: ZoneParams
    openings: Mapping[str, Opening]
    mapping: Mapping[str, float]
    occupancy: tuple[OccupancyTerm, ...]
    horizon: Horizon
    initial_co2: float
    co2_node: str | None = "CO2Level"
    description: str = ""
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        freeze = lambda m, conv: {k: tuple(conv(x) for x in v) for k, v in dict(m).items()}
        object.__setattr__(self, "calendars", freeze(self.calendars, str))
        object.__setattr__(self, "weather_labels", freeze(self.weather_labels, str))
        object.__setattr__(self, "temperatures", freeze(self.temperatures, float))
        object.__setattr__(self, "openings", dict(self.openings))
        object.__setattr__(self, "mapping", {k: float(v) for k, v in dict(self.mapping).items()})
        object.__setattr__(self, "occupancy", tuple(self.occupancy))
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def network(self) -> Network:
        return self.template.base

    def slot_evidence(self, index: int) -> dict[str, str]:
        ev = {node: labels[index] for node, labels in self.calendars.items()}
        ev.update({node: labels[index] for node, labels in self.weather_labels.items()})
        return ev

    def slot_temperature(self, key: str, index: int) -> float:
        return self.temperatures[key][index]


# -- validation -------------------------------------------------------------


def _require(cond, path, message):
    if not cond:
        raise ValidationError(path, message)


def check_scenario(sc: Scenario) -> Scenario:
    """Cross-section consistency checks; raises ValidationError with a path."""
    net = sc.network
    n = len(sc.horizon)
    _require(sc.horizon.slot_seconds > 0, "run.slot_seconds", "must be positive")
    _require(sc.horizon.end_hour >= sc.horizon.start_hour - 1, "run", "end_hour precedes start_hour")
    for section, series in (("calendars", sc.calendars), ("weather.labels", sc.weather_labels)):
        for node, labels in series.items():
            path = f"{section}.{node}"
            _require(node in net, path, f"node {node!r} not in network")
            _require(len(labels) == n, path, f"has {len(labels)} slots, horizon has {n}")
            for i, lbl in enumerate(labels):
                _require(
                    lbl in net.states(node),
                    f"{path}[{i}]",
                    f"label {lbl!r} not in domain {list(net.states(node))}",
                )
    boundaries = set(sc.zone.boundary_ppm)
    for key in ["zone", *sorted({o.geometry.boundary for o in sc.openings.values()})]:
        path = f"weather.temperatures.{key}"
        _require(key in sc.temperatures, path, "missing temperature series")
        _require(len(sc.temperatures[key]) == n, path, f"has {len(sc.temperatures[key])} slots, horizon has {n}")
        _require(all(math.isfinite(t) for t in sc.temperatures[key]), path, "non-finite temperature")
    _require(set(sc.openings) == set(OPENINGS), "physics.openings", f"must define exactly {list(OPENINGS)}")
    for name in OPENINGS:
        op = sc.openings[name]
        path = f"physics.openings.{name}"
        _require(op.geometry.boundary in boundaries, f"{path}.boundary", f"unknown boundary {op.geometry.boundary!r}")
        _require(op.node in net, f"{path}.node", f"node {op.node!r} not in network")
        for lbl in net.states(op.node):
            _require(lbl in sc.mapping, "mapping", f"no ratio for {op.node} state {lbl!r}")
    for lbl, r in sc.mapping.items():
        _require(0.0 <= r <= 1.0, f"mapping.{lbl}", f"ratio {r} outside [0, 1]")
    for i, term in enumerate(sc.occupancy):
        path = f"occupancy[{i}]"
        _require(term.node in net, f"{path}.node", f"node {term.node!r} not in network")
        for lbl, c in term.counts.items():
            _require(lbl in net.states(term.node), f"{path}.counts.{lbl}", "label not in node domain")
            _require(isinstance(c, int) and c >= 0, f"{path}.counts.{lbl}", "count must be a nonnegative integer")
    if sc.co2_node is not None:
        _require(sc.co2_node in net, "physics.co2_node", f"node {sc.co2_node!r} not in network")
        _require(
            tuple(net.states(sc.co2_node)) == CO2_LEVELS,
            "physics.co2_node",
            f"domain must be {list(CO2_LEVELS)}",
        )
        _require(
            sc.co2_node not in sc.calendars and sc.co2_node not in sc.weather_labels,
            "physics.co2_node",
            "CO2 level is supplied by the physics, not by scenario series",
        )
    _require(math.isfinite(sc.initial_co2) and sc.initial_co2 >= 0, "physics.initial_co2", "must be >= 0")
    prevs = set(sc.template.prev_nodes)
    for section, series in (("calendars", sc.calendars), ("weather.labels", sc.weather_labels)):
        for node in series:
            _require(node not in prevs, f"{section}.{node}", "previous-state nodes are set by propagation")
    return sc


# -- JSON -> Scenario -------------------------------------------------------


def _get(obj, key, path, kind=None, default=...):
    if not isinstance(obj, dict):
        raise ValidationError(path, "expected an object")
    if key not in obj:
        if default is not ...:
            return default
        raise ValidationError(f"{path}.{key}" if path else key, "missing")
    value = obj[key]
    if kind is None:
        return value
    numeric = kind in (int, (int, float))
    if not isinstance(value, kind) or (numeric and isinstance(value, bool)):
        if value is None and default is None:
            return None
        raise ValidationError(f"{path}.{key}" if path else key, f"expected {_kind_name(kind)}")
    return value


def _kind_name(kind):
    names = {dict: "an object", list: "a list", str: "a string", int: "an integer", (int, float): "a number"}
    return names.get(kind, str(kind))


def _network_from_doc(doc) -> Network:
    raw_nodes = _get(doc, "nodes", "network", list)
    nodes = []
    for i, nd in enumerate(raw_nodes):
        path = f"network.nodes[{i}]"
        name = _get(nd, "name", path, str)
        path = f"network.nodes[{i}:{name}]"
        states = _get(nd, "states", path, list)
        parents = _get(nd, "parents", path, list, default=[])
        rows = _get(nd, "cpt", path, list)
        cpt = {}
        for j, row in enumerate(rows):
            rpath = f"{path}.cpt[{j}]"
            given = tuple(_get(row, "given", rpath, list, default=[]))
            probs = _get(row, "p", rpath, list)
            if not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in probs):
                raise ValidationError(f"{rpath}.p", "probabilities must be numbers")
            if given in cpt:
                raise ValidationError(rpath, f"duplicate row for {list(given)}")
            cpt[given] = tuple(float(p) for p in probs)
        nodes.append(Node(name, tuple(states), tuple(parents), cpt))
    try:
        return build_network(nodes)
    except CycleError as exc:
        raise ValidationError("network", str(exc)) from exc
    except NetworkError as exc:
        msg = str(exc)
        where = "network"
        for i, nd in enumerate(nodes):
            if f"node {nd.name!r}" in msg:
                where = f"network.nodes[{i}:{nd.name}]"
                break
        raise ValidationError(where, msg) from exc


def scenario_from_dict(doc: Mapping[str, Any]) -> Scenario:
    """Build and validate a Scenario from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ValidationError("$", "scenario must be a JSON object")
    version = _get(doc, "format_version", "", int)
    if version != FORMAT_VERSION:
        raise ValidationError("format_version", f"unsupported version {version}")
    net = _network_from_doc(_get(doc, "network", "", dict))

    temporal = _get(doc, "temporal", "", dict, default={})
    links = []
    for i, ln in enumerate(_get(temporal, "links", "temporal", list, default=[])):
        links.append(TemporalLink(_get(ln, "node", f"temporal.links[{i}]", str), _get(ln, "prev", f"temporal.links[{i}]", str)))
    initial = _get(temporal, "initial_state", "temporal", dict, default={})
    try:
        template = DbnTemplate(net, tuple(links), initial)
    except (NetworkError, ValueError) as exc:
        raise ValidationError("temporal", str(exc)) from exc

    run = _get(doc, "run", "", dict)
    horizon = Horizon(
        _get(run, "start_hour", "run", int),
        _get(run, "end_hour", "run", int),
        float(_get(run, "slot_seconds", "run", (int, float), default=3600.0)),
    )

    calendars = _series(_get(doc, "calendars", "", dict, default={}), "calendars", str)
    weather = _get(doc, "weather", "", dict, default={})
    weather_labels = _series(_get(weather, "labels", "weather", dict, default={}), "weather.labels", str)
    temperatures = _series(_get(weather, "temperatures", "weather", dict), "weather.temperatures", (int, float))

    phys = _get(doc, "physics", "", dict)
    boundaries = _get(phys, "boundaries", "physics", dict)
    for k, v in boundaries.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool) or v < 0:
            raise ValidationError(f"physics.boundaries.{k}", "concentration must be a nonnegative number")
    thresholds = _get(phys, "thresholds", "physics", list, default=[1000.0, 1700.0])
    try:
        zone = ZoneParams(
            volume=float(_get(phys, "volume", "physics", (int, float))),
            co2_per_person=float(_get(phys, "co2_per_person", "physics", (int, float), default=5e-6)),
            gravity=float(_get(phys, "gravity", "physics", (int, float), default=9.81)),
            boundary_ppm={k: float(v) for k, v in boundaries.items()},
            thresholds=tuple(float(t) for t in thresholds),
        )
    except ValueError as exc:
        raise ValidationError("physics", str(exc)) from exc
    openings = {}
    raw_openings = _get(phys, "openings", "physics", dict)
    for name, op in raw_openings.items():
        path = f"physics.openings.{name}"
        try:
            geom = OpeningGeometry(
                height=float(_get(op, "height", path, (int, float))),
                width=float(_get(op, "width", path, (int, float))),
                cd=float(_get(op, "cd", path, (int, float), default=0.6)),
                neutral_height=_get(op, "neutral_height", path, (int, float), default=None),
                boundary=_get(op, "boundary", path, str),
            )
        except ValueError as exc:
            raise ValidationError(path, str(exc)) from exc
        openings[name] = Opening(geom, _get(op, "node", path, str))

    mapping = _get(doc, "mapping", "", dict)
    for k, v in mapping.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ValidationError(f"mapping.{k}", "ratio must be a number")
    occupancy = []
    for i, term in enumerate(_get(doc, "occupancy", "", list, default=[])):
        occupancy.append(
            OccupancyTerm(_get(term, "node", f"occupancy[{i}]", str), _get(term, "counts", f"occupancy[{i}]", dict))
        )
    co2_node = _get(phys, "co2_node", "physics", default="CO2Level")
    if co2_node is not None and not isinstance(co2_node, str):
        raise ValidationError("physics.co2_node", "expected a string or null")
    sc = Scenario(
        name=_get(doc, "name", "", str, default="scenario"),
        description=_get(doc, "description", "", str, default=""),
        metadata=_get(doc, "metadata", "", dict, default={}),
        template=template,
        calendars=calendars,
        weather_labels=weather_labels,
        temperatures=temperatures,
        zone=zone,
        openings=openings,
        mapping=mapping,
        occupancy=tuple(occupancy),
        horizon=horizon,
        initial_co2=float(_get(phys, "initial_co2", "physics", (int, float))),
        co2_node=co2_node,
    )
    return check_scenario(sc)


def _series(obj, path, kind):
    out = {}
    for key, values in obj.items():
        if not isinstance(values, list):
            raise ValidationError(f"{path}.{key}", "expected a list with one entry per slot")
        for i, v in enumerate(values):
            if not isinstance(v, kind) or isinstance(v, bool):
                raise ValidationError(f"{path}.{key}[{i}]", f"expected {_kind_name(kind)}")
        out[key] = tuple(values)
    return out


def loads_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(doc)


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file. OSError propagates unchanged."""
    text = Path(path).read_text(encoding="utf-8")
    return loads_scenario(text)


# -- Scenario -> JSON -------------------------------------------------------


def scenario_to_dict(sc: Scenario) -> dict:
    net = sc.network
    nodes = []
    for node in net.nodes:
        parent_states = [net.states(p) for p in node.parents]
        rows = [
            {"given": list(combo), "p": list(node.cpt[combo])}
            for combo in itertools.product(*parent_states)
        ]
        nodes.append({"name": node.name, "states": list(node.states), "parents": list(node.parents), "cpt": rows})
    openings = {}
    for name in sorted(sc.openings):
        op = sc.openings[name]
        g = op.geometry
        openings[name] = {
            "node": op.node,
            "boundary": g.boundary,
            "height": g.height,
            "width": g.width,
            "cd": g.cd,
            "neutral_height": g.neutral_height,
        }
    return {
        "format_version": FORMAT_VERSION,
        "name": sc.name,
        "description": sc.description,
        "metadata": dict(sc.metadata),
        "network": {"nodes": nodes},
        "temporal": {
            "links": [{"node": ln.node, "prev": ln.prev} for ln in sc.template.links],
            "initial_state": dict(sc.template.initial_state),
        },
        "calendars": {k: list(v) for k, v in sc.calendars.items()},
        "weather": {
            "labels": {k: list(v) for k, v in sc.weather_labels.items()},
            "temperatures": {k: list(v) for k, v in sc.temperatures.items()},
        },
        "physics": {
            "volume": sc.zone.volume,
            "co2_per_person": sc.zone.co2_per_person,
            "gravity": sc.zone.gravity,
            "thresholds": list(sc.zone.thresholds),
            "boundaries": dict(sc.zone.boundary_ppm),
            "initial_co2": sc.initial_co2,
            "co2_node": sc.co2_node,
            "openings": openings,
        },
        "mapping": dict(sc.mapping),
        "occupancy": [{"node": t.node, "counts": dict(t.counts)} for t in sc.occupancy],
        "run": {
            "start_hour": sc.horizon.start_hour,
            "end_hour": sc.horizon.end_hour,
            "slot_seconds": sc.horizon.slot_seconds,
        },
    }


def _flat(obj) -> bool:
    if isinstance(obj, list):
        return all(not isinstance(x, (dict, list)) for x in obj)
    if isinstance(obj, dict):
        return all(_flat(v) for v in obj.values() if not isinstance(v, dict)) and not any(
            isinstance(v, dict) for v in obj.values()
        )
    return True


def _compact_json(obj, level=0) -> str:
    # short flat values (e.g. CPT rows) stay on one line; lists of scalars always do
    text = json.dumps(obj, ensure_ascii=False)
    if not isinstance(obj, (dict, list)) or _flat(obj) and (isinstance(obj, list) or len(text) <= 120):
        return text
    pad = "  " * (level + 1)
    if isinstance(obj, dict):
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_compact_json(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    items = [pad + _compact_json(v, level + 1) for v in obj]
    return "[\n" + ",\n".join(items) + "\n" + "  " * level + "]"


def dumps_scenario(sc: Scenario) -> str:
    """Canonical JSON text: fixed key order, one CPT row per line, trailing newline."""
    return _compact_json(scenario_to_dict(sc)) + "\n"


def save_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(dumps_scenario(sc), encoding="utf-8")


def bundled_scenario_path(name: str = "office_rain") -> Path:
    """Path of a scenario shipped with the package (``office_rain`` or ``office_dry``)."""
    return Path(str(resources.files("occupant_dbn") / "data" / f"{name}.json"))
