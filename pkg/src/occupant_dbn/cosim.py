"""Occupant/physics co-simulation loop and seeded Monte Carlo ensembles.

The physical zone owns the loop. For every slot it discretizes the current
CO2 concentration, hands it to the occupant network together with the
slot's calendar and weather evidence, turns the sampled door and window
states into opening ratios, and advances the concentration over the slot.

Per-run random streams are derived from ``(master_seed, run_index)`` with
``numpy.random.SeedSequence(entropy=(master_seed mod 2**64, run_index))``
feeding a PCG64 generator. This mapping is part of the output contract.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from occupant_dbn.bayes.network import Assignment
from occupant_dbn.dbn import extract_next_prev, step
from occupant_dbn.errors import InvalidRunCountError, UnmappedLabelError, ZeroEvidenceError
from occupant_dbn.physics import (
    FlowPair,
    co2_step,
    discretize_co2,
    generation_rate,
    stack_airflow,
    total_flows,
)
from occupant_dbn.scenario import OccupancyTerm, Scenario

QUANTILES = (0.1, 0.5, 0.9)

DEFAULT_MAPPING = {
    "always_closed": 0.0,
    "mostly_closed": 0.25,
    "mostly_opened": 0.75,
    "always_opened": 1.0,
    "move": 0.5,
}


@dataclass(frozen=True)
class OccupantOutputs:
    """What the occupant model hands to the physics for one slot.

    ``extras`` carries optional quantities such as metabolic or appliance
    gains, setpoints and heating periods; the CO2 physics ignores them.
    """

    occupied: bool
    occupant_count: int
    door_ratio: float
    window_ratio: float
    extras: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SlotRecord:
    """One slot of a run. ``co2_level`` classifies ``co2_end``; the level used
    as evidence during the slot is ``sampled[co2_node]``."""

    hour: int
    sampled: Mapping[str, str]
    outputs: OccupantOutputs
    q_in: float
    q_out: float
    c_supply: float
    co2_start: float
    co2_end: float
    co2_level: str


@dataclass(frozen=True)
class RunTrace:
    node_names: tuple[str, ...]
    records: tuple[SlotRecord, ...]
    run_index: int | None = None


def _ratio(mapping, label, node):
    try:
        return mapping[label]
    except KeyError:
        raise UnmappedLabelError(f"no opening ratio for {node}={label!r}") from None


def map_actions(
    sampled: Assignment,
    mapping: Mapping[str, float],
    occupancy: Sequence[OccupancyTerm] = (),
    door_node: str = "Door",
    window_node: str = "Window",
) -> OccupantOutputs:
    count = sum(term.counts.get(sampled[term.node], 0) for term in occupancy)
    return OccupantOutputs(
        occupied=count > 0,
        occupant_count=count,
        door_ratio=_ratio(mapping, sampled[door_node], door_node),
        window_ratio=_ratio(mapping, sampled[window_node], window_node),
    )


def run_rng(master_seed: int, run_index: int) -> np.random.Generator:
    """Random stream for one ensemble member."""
    ss = np.random.SeedSequence(entropy=(int(master_seed) % 2**64, int(run_index)))
    return np.random.Generator(np.random.PCG64(ss))


def simulate_day(scenario: Scenario, rng: np.random.Generator, run_index: int | None = None) -> RunTrace:
    template = scenario.template
    zone = scenario.zone
    door = scenario.openings["door"]
    window = scenario.openings["window"]
    dt = scenario.horizon.slot_seconds
    prev = dict(template.initial_state)
    c = scenario.initial_co2
    records = []
    for i, hour in enumerate(scenario.horizon.hours):
        evidence = scenario.slot_evidence(i)
        level = discretize_co2(c, zone.thresholds)
        if scenario.co2_node is not None:
            evidence[scenario.co2_node] = level
        try:
            state = step(template, prev, evidence, rng, slot=hour)
        except ZeroEvidenceError as exc:
            raise ZeroEvidenceError(str(exc), slot=hour) from exc
        out = map_actions(state.sampled, scenario.mapping, scenario.occupancy, door.node, window.node)

        t_zone = scenario.slot_temperature("zone", i)
        pairs = []
        for opening, ratio in ((door, out.door_ratio), (window, out.window_ratio)):
            g = opening.geometry
            flows = stack_airflow(
                g,
                t_zone,
                scenario.slot_temperature(g.boundary, i),
                ratio,
                gravity=zone.gravity,
                density=zone.density,
            )
            pairs.append((flows, zone.boundary_ppm[g.boundary]))
        q_in, q_out, c_supply = total_flows(pairs)
        s = generation_rate(out.occupant_count, zone.co2_per_person)
        c_end = co2_step(c, FlowPair(q_in, q_out), s, c_supply, dt, zone.volume)
        records.append(
            SlotRecord(hour, state.sampled, out, q_in, q_out, c_supply, c, c_end, discretize_co2(c_end, zone.thresholds))
        )
        prev = extract_next_prev(state, template)
        c = c_end
    return RunTrace(scenario.network.names, tuple(records), run_index)


@dataclass(frozen=True)
class Co2Stats:
    mean: float
    min: float
    max: float
    quantiles: tuple[float, ...]


@dataclass(frozen=True)
class Aggregate:
    """Per-slot statistics over an ensemble.

    ``histograms[i][node][label]`` counts runs; ``co2_by_run[r][i]`` is the
    end-of-slot concentration of run ``r``.
    """

    scenario: str
    runs: int
    master_seed: int
    hours: tuple[int, ...]
    node_names: tuple[str, ...]
    states: Mapping[str, tuple[str, ...]]
    histograms: tuple[Mapping[str, Mapping[str, int]], ...]
    co2: tuple[Co2Stats, ...]
    co2_by_run: tuple[tuple[float, ...], ...]


def aggregate(scenario: Scenario, traces: Sequence[RunTrace], master_seed: int) -> Aggregate:
    """Fold traces into an Aggregate; the result does not depend on trace order."""
    net = scenario.network
    hours = tuple(scenario.horizon.hours)
    traces = sorted(traces, key=lambda t: -1 if t.run_index is None else t.run_index)
    histograms = []
    stats = []
    for i in range(len(hours)):
        hist = {n: {s: 0 for s in net.states(n)} for n in net.names}
        for tr in traces:
            for n, lbl in tr.records[i].sampled.items():
                hist[n][lbl] += 1
        histograms.append(hist)
        values = sorted(tr.records[i].co2_end for tr in traces)
        q = np.quantile(np.array(values), QUANTILES)
        stats.append(
            Co2Stats(
                mean=math.fsum(values) / len(values),
                min=values[0],
                max=values[-1],
                quantiles=tuple(float(x) for x in q),
            )
        )
    return Aggregate(
        scenario=scenario.name,
        runs=len(traces),
        master_seed=master_seed,
        hours=hours,
        node_names=net.names,
        states={n: net.states(n) for n in net.names},
        histograms=tuple(histograms),
        co2=tuple(stats),
        co2_by_run=tuple(tuple(r.co2_end for r in tr.records) for tr in traces),
    )


def _run_block(args):
    scenario, master_seed, indices = args
    return [simulate_day(scenario, run_rng(master_seed, i), i) for i in indices]


def run_ensemble(scenario: Scenario, runs: int, master_seed: int = 0, workers: int = 1) -> list[RunTrace]:
    """Execute ``runs`` independent days, optionally across processes."""
    if not isinstance(runs, int) or runs < 1:
        raise InvalidRunCountError(f"runs must be a positive integer, got {runs!r}")
    if workers <= 1 or runs == 1:
        return _run_block((scenario, master_seed, range(runs)))
    blocks = [list(range(runs))[k::workers] for k in range(workers)]
    traces = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_block, [(scenario, master_seed, b) for b in blocks if b]):
            traces.extend(part)
    traces.sort(key=lambda t: t.run_index)
    return traces


def monte_carlo(scenario: Scenario, runs: int, master_seed: int = 0, workers: int = 1) -> Aggregate:
    return aggregate(scenario, run_ensemble(scenario, runs, master_seed, workers), master_seed)
