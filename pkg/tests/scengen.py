"""Synthetic scenarios for cosim and round-trip tests."""
import copy
import itertools

import numpy as np

from netgen import random_network
from occupant_dbn.bayes import Node, build_network
from occupant_dbn.cosim import DEFAULT_MAPPING
from occupant_dbn.dbn import DbnTemplate, TemporalLink
from occupant_dbn.physics import CO2_LEVELS, OpeningGeometry, ZoneParams
from occupant_dbn.scenario import Horizon, Opening, OccupancyTerm, Scenario, check_scenario, scenario_to_dict

DOOR = ("always_closed", "mostly_closed", "mostly_opened", "always_opened", "move")
WINDOW = ("always_closed", "mostly_closed", "mostly_opened", "always_opened")


def _const(parents, net_states, row):
    return {combo: tuple(row) for combo in itertools.product(*(net_states[p] for p in parents))}


def box_scenario(
    door_row,
    window_row=(1.0, 0.0, 0.0, 0.0),
    occupants=4,
    slots=3,
    temps=(25.0, 20.0, 15.0),
    initial_co2=400.0,
    boundary_ppm=(500.0, 400.0),
):
    """Single-zone scenario whose door and window rows ignore every parent.

    ``Present`` is always ``yes`` and counts ``occupants`` persons. CO2Level
    is fed back as evidence each slot but does not change any row, so the
    trajectory only depends on the sampled door and window states.
    """
    states = {"Present": ("no", "yes"), "CO2Level": CO2_LEVELS, "Door_prev": DOOR, "Door": DOOR, "Window": WINDOW}
    nodes = [
        Node("Present", states["Present"], (), {(): (0.0, 1.0)}),
        Node("CO2Level", CO2_LEVELS, (), {(): (0.6, 0.3, 0.1)}),
        Node("Door_prev", DOOR, (), {(): (0.2,) * 5}),
        Node("Door", DOOR, ("Door_prev", "CO2Level"), _const(("Door_prev", "CO2Level"), states, door_row)),
        Node("Window", WINDOW, ("CO2Level",), _const(("CO2Level",), states, window_row)),
    ]
    net = build_network(nodes)
    template = DbnTemplate(net, (TemporalLink("Door", "Door_prev"),), {"Door_prev": "always_closed"})
    t_zone, t_cor, t_out = temps
    sc = Scenario(
        name="box",
        template=template,
        calendars={},
        weather_labels={},
        temperatures={"zone": [t_zone] * slots, "corridor": [t_cor] * slots, "outdoor": [t_out] * slots},
        zone=ZoneParams(volume=50.0, boundary_ppm={"corridor": boundary_ppm[0], "outdoor": boundary_ppm[1]}),
        openings={
            "door": Opening(OpeningGeometry(2.0, 0.9, 0.6, boundary="corridor"), "Door"),
            "window": Opening(OpeningGeometry(1.2, 0.8, 0.6, boundary="outdoor"), "Window"),
        },
        mapping=DEFAULT_MAPPING,
        occupancy=(OccupancyTerm("Present", {"yes": occupants}),),
        horizon=Horizon(7, 7 + slots - 1, 3600.0),
        initial_co2=initial_co2,
    )
    return check_scenario(sc)


def random_scenario(rng, name="random"):
    """A valid scenario with a random core network plus door and window."""
    n = int(rng.integers(1, 6))
    core = random_network(rng, n, max_labels=3, max_parents=2, cap=2**12)
    states = {nm: core.states(nm) for nm in core.names}
    states.update(Door=DOOR, Window=WINDOW, Door_prev=DOOR)
    nodes = list(core.nodes)
    with_link = bool(rng.integers(2))
    if with_link:
        nodes.append(Node("Door_prev", DOOR, (), {(): tuple(rng.dirichlet(np.ones(5)))}))
    pool = list(core.names)
    door_parents = tuple(rng.choice(pool, size=int(rng.integers(1, min(2, len(pool)) + 1)), replace=False))
    if with_link:
        door_parents = ("Door_prev",) + door_parents
    win_parents = tuple(rng.choice(pool, size=int(rng.integers(0, min(2, len(pool)) + 1)), replace=False))
    for nm, sts, parents in (("Door", DOOR, door_parents), ("Window", WINDOW, win_parents)):
        cpt = {
            combo: tuple(rng.dirichlet(np.ones(len(sts))))
            for combo in itertools.product(*(states[p] for p in parents))
        }
        nodes.append(Node(nm, sts, tuple(str(p) for p in parents), cpt))
    order = rng.permutation(len(nodes))
    net = build_network([nodes[i] for i in order])
    links = (TemporalLink("Door", "Door_prev"),) if with_link else ()
    initial = {"Door_prev": DOOR[int(rng.integers(5))]} if with_link else {}
    template = DbnTemplate(net, links, initial)

    start = int(rng.integers(0, 12))
    slots = int(rng.integers(1, 6))
    roots = [nm for nm in core.names if not core.parents(nm)]
    k = int(rng.integers(0, len(roots) + 1))
    chosen = list(rng.choice(roots, size=k, replace=False)) if k else []
    split = int(rng.integers(0, len(chosen) + 1))
    series = lambda nm: [states[nm][int(rng.integers(len(states[nm])))] for _ in range(slots)]
    calendars = {str(nm): series(nm) for nm in chosen[:split]}
    weather = {str(nm): series(nm) for nm in chosen[split:]}
    temps = {key: [round(float(rng.uniform(-5, 35)), 2) for _ in range(slots)] for key in ("zone", "corridor", "outdoor")}
    occ_node = str(rng.choice(core.names))
    counts = {lbl: int(rng.integers(0, 4)) for lbl in states[occ_node] if rng.random() < 0.7}
    sc = Scenario(
        name=name,
        description=f"random scenario with {len(net)} nodes",
        metadata={"seed_note": "generated in tests"},
        template=template,
        calendars=calendars,
        weather_labels=weather,
        temperatures=temps,
        zone=ZoneParams(
            volume=float(rng.uniform(10, 200)),
            boundary_ppm={"corridor": float(rng.uniform(400, 700)), "outdoor": float(rng.uniform(380, 450))},
        ),
        openings={
            "door": Opening(OpeningGeometry(float(rng.uniform(1.8, 2.4)), 0.9, 0.6, boundary="corridor"), "Door"),
            "window": Opening(
                OpeningGeometry(1.2, 0.8, float(rng.uniform(0.5, 0.7)), float(rng.uniform(0.2, 1.0)), "outdoor"),
                "Window",
            ),
        },
        mapping=DEFAULT_MAPPING,
        occupancy=(OccupancyTerm(occ_node, counts),),
        horizon=Horizon(start, start + slots - 1, 3600.0),
        initial_co2=float(rng.uniform(380, 2000)),
        co2_node=None,
    )
    return check_scenario(sc)


# -- invalid mutations ---------------------------------------------------------


def _node_index(doc, name):
    return next(i for i, nd in enumerate(doc["network"]["nodes"]) if nd["name"] == name)


def mutate_cycle(doc, rng):
    """Make a parent of Door depend on Door; CPT rows stay complete."""
    doc = copy.deepcopy(doc)
    nodes = doc["network"]["nodes"]
    door = nodes[_node_index(doc, "Door")]
    parent = str(rng.choice([p for p in door["parents"] if p != "Door_prev"]))
    target = nodes[_node_index(doc, parent)]
    target["parents"].append("Door")
    target["cpt"] = [{"given": r["given"] + [s], "p": r["p"]} for r in target["cpt"] for s in DOOR]
    return doc, "network"


def mutate_row_sum(doc, rng):
    doc = copy.deepcopy(doc)
    nodes = doc["network"]["nodes"]
    i = int(rng.integers(len(nodes)))
    row = nodes[i]["cpt"][int(rng.integers(len(nodes[i]["cpt"])))]
    row["p"][0] += 0.05 + 0.5 * float(rng.random())
    return doc, f"network.nodes[{i}:{nodes[i]['name']}]"


def mutate_missing_slot(doc, rng):
    doc = copy.deepcopy(doc)
    series = [("weather.temperatures", k, doc["weather"]["temperatures"]) for k in ("zone", "corridor", "outdoor")]
    series += [("calendars", k, doc["calendars"]) for k in doc["calendars"]]
    series += [("weather.labels", k, doc["weather"]["labels"]) for k in doc["weather"]["labels"]]
    section, key, holder = series[int(rng.integers(len(series)))]
    holder[key] = holder[key][:-1]
    return doc, f"{section}.{key}"


MUTATIONS = (mutate_cycle, mutate_row_sum, mutate_missing_slot)


def invalid_docs(seed, count=50):
    """``count`` (kind, doc, expected path) triples cycling over the mutation kinds."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        sc = random_scenario(rng)
        mutate = MUTATIONS[k % len(MUTATIONS)]
        doc, path = mutate(scenario_to_dict(sc), rng)
        out.append((mutate.__name__.removeprefix("mutate_"), doc, path))
    return out
