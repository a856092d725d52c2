"""Builder for the shipped four-occupant office scenario.

The network has 16 nodes: four calendars, rain, temperature class, CO2
level, the previous door and window states, visitor presence, presence of
the three non-professor occupants, the professor's activity, whether the
present group is bothered by an open door, the group's deliberation, and
the door and window actions.

Calendars are the hourly busy/free table of the four occupants for 7h-20h.
Every probability below is an illustrative value chosen to give plausible
behaviour; none is a measured quantity. Rows come from small additive
score tables pushed through a softmax, so the intent of each influence is
readable here rather than in the generated JSON.

Regenerate the bundled files with ``python -m occupant_dbn.office``.
"""
from __future__ import annotations

import itertools
import math

from occupant_dbn.bayes import Node, build_network
from occupant_dbn.cosim import DEFAULT_MAPPING
from occupant_dbn.dbn import DbnTemplate, TemporalLink
from occupant_dbn.physics import CO2_LEVELS, OpeningGeometry, ZoneParams
from occupant_dbn.scenario import (
    Horizon,
    OccupancyTerm,
    Opening,
    Scenario,
    bundled_scenario_path,
    check_scenario,
    save_scenario,
)

HOURS = list(range(7, 21))
BUSY_FREE = ("busy", "free")
BOOL = ("false", "true")
NO_YES = ("no", "yes")
TEMP = ("cold", "mild", "hot")
DOOR = ("always_closed", "mostly_closed", "mostly_opened", "always_opened", "move")
WINDOW = ("always_closed", "mostly_closed", "mostly_opened", "always_opened")
PROF = ("out", "alone", "meeting", "virtual")
OTHERS = ("none", "one", "two", "three")
DELIBERATION = ("close", "keep", "open")

_f, _b = "free", "busy"
CALENDARS = {
    "PrCalendar": [_f, _f, _b, _b, _f, _f, _f, _b, _b, _b, _f, _f, _f, _f],
    "PCalendar": [_f, _b, _b, _b, _b, _f, _f, _b, _b, _b, _f, _f, _b, _b],
    "ICalendar": [_f, _f, _b, _b, _b, _f, _f, _b, _b, _b, _f, _b, _b, _f],
    "GCalendar": [_f, _f, _b, _b, _b, _f, _f, _b, _b, _b, _b, _f, _f, _f],
}


def _row(probs, digits=4):
    # round for readability, then let the largest entry absorb the residue
    probs = [round(p, digits) for p in probs]
    big = max(range(len(probs)), key=lambda i: probs[i])
    probs[big] = round(1.0 - sum(p for i, p in enumerate(probs) if i != big), digits)
    return tuple(probs)


def _softmax(scores):
    m = max(scores)
    e = [math.exp(s - m) for s in scores]
    t = sum(e)
    return _row([x / t for x in e])


def _node(name, states, parents, fn, parent_states):
    cpt = {combo: fn(*combo) for combo in itertools.product(*parent_states)}
    return Node(name, states, tuple(parents), cpt)


def _uniform(n):
    return _row([1.0 / n] * n)


def _present_count(p_present):
    # number of people present among independent occupants (Poisson-binomial)
    dist = [1.0]
    for p in p_present:
        nxt = [0.0] * (len(dist) + 1)
        for k, q in enumerate(dist):
            nxt[k] += q * (1 - p)
            nxt[k + 1] += q * p
        dist = nxt
    return _row(dist)


def _visitor(pr_cal):
    return _row([0.85, 0.15] if pr_cal == "busy" else [0.75, 0.25])


def _others(p_cal, i_cal, g_cal):
    at_desk = {"busy": 0.9, "free": 0.35}
    return _present_count([at_desk[p_cal], at_desk[i_cal], at_desk[g_cal]])


def _prof(pr_cal, visitor, others):
    p_in = 0.8 if pr_cal == "busy" else 0.45
    if visitor == "yes":
        p_in = max(p_in, 0.9)
        inside = {"alone": 0.1, "meeting": 0.75, "virtual": 0.15}
    elif others == "none":
        inside = {"alone": 0.6, "meeting": 0.0, "virtual": 0.4}
    else:
        inside = {"alone": 0.5, "meeting": 0.25, "virtual": 0.25}
    return _row([1 - p_in] + [p_in * inside[a] for a in PROF[1:]])


def _troubled(prof, g_cal):
    p_prof = {"out": 0.0, "alone": 0.5, "meeting": 0.85, "virtual": 0.8}[prof]
    p_guest = 0.5 if g_cal == "busy" else 0.2
    yes = 1 - (1 - p_prof) * (1 - p_guest)
    return _row([1 - yes, yes])


def _deliberation(troubled, co2, temp, others):
    desire = {"low": -0.5, "medium": 1.0, "high": 2.5}[co2]
    desire += {"cold": -1.0, "mild": 0.0, "hot": 0.8}[temp]
    if troubled == "yes":
        desire -= 1.0
    keep = 0.5 + (1.5 if others == "none" else 0.0)
    return _softmax([-desire, keep, desire])


def _door(prev, delib, prof, visitor, others, rain):
    s = dict.fromkeys(DOOR, 0.0)
    s[prev] += 1.5
    s["move"] += 0.6 + 0.4 * OTHERS[::-1].index(others)
    if delib == "close":
        s["always_closed"] += 1.5
        s["mostly_closed"] += 0.8
    elif delib == "open":
        s["always_opened"] += 1.5
        s["mostly_opened"] += 0.8
    if prof in ("meeting", "virtual"):
        s["always_closed"] += 1.2
    elif prof == "alone":
        s["mostly_closed"] += 0.3
    if visitor == "yes":
        s["move"] += 1.0
    if rain == "true":
        s["always_closed"] += 0.3
    return _softmax([s[d] for d in DOOR])


def _window(prev, rain, temp, co2, delib):
    if rain == "true":
        # everyone shuts the window when it rains
        return (1.0, 0.0, 0.0, 0.0)
    s = dict.fromkeys(WINDOW, 0.0)
    s[prev] += 1.5
    if delib == "open":
        s["always_opened"] += 1.2
        s["mostly_opened"] += 0.8
    elif delib == "close":
        s["always_closed"] += 1.2
        s["mostly_closed"] += 0.6
    if temp == "hot":
        s["mostly_opened"] += 0.6
        s["always_opened"] += 0.6
    elif temp == "cold":
        s["always_closed"] += 1.0
    s["always_opened"] += {"low": 0.0, "medium": 0.4, "high": 0.8}[co2]
    s["mostly_opened"] += {"low": 0.0, "medium": 0.4, "high": 0.4}[co2]
    return _softmax([s[w] for w in WINDOW])


def office_network():
    nodes = [
        Node("PrCalendar", BUSY_FREE, (), {(): (0.5, 0.5)}),
        Node("PCalendar", BUSY_FREE, (), {(): (0.5, 0.5)}),
        Node("ICalendar", BUSY_FREE, (), {(): (0.5, 0.5)}),
        Node("GCalendar", BUSY_FREE, (), {(): (0.5, 0.5)}),
        Node("Rain", BOOL, (), {(): (0.8, 0.2)}),
        Node("TempClass", TEMP, (), {(): (0.3, 0.4, 0.3)}),
        Node("CO2Level", CO2_LEVELS, (), {(): (0.6, 0.3, 0.1)}),
        Node("Door_prev", DOOR, (), {(): _uniform(len(DOOR))}),
        Node("Window_prev", WINDOW, (), {(): _uniform(len(WINDOW))}),
        _node("VisitorPresent", NO_YES, ["PrCalendar"], _visitor, [BUSY_FREE]),
        _node("OthersPresent", OTHERS, ["PCalendar", "ICalendar", "GCalendar"], _others, [BUSY_FREE] * 3),
        _node("ProfActivity", PROF, ["PrCalendar", "VisitorPresent", "OthersPresent"], _prof, [BUSY_FREE, NO_YES, OTHERS]),
        _node("TroubledByDoor", NO_YES, ["ProfActivity", "GCalendar"], _troubled, [PROF, BUSY_FREE]),
        _node(
            "Deliberation",
            DELIBERATION,
            ["TroubledByDoor", "CO2Level", "TempClass", "OthersPresent"],
            _deliberation,
            [NO_YES, CO2_LEVELS, TEMP, OTHERS],
        ),
        _node(
            "Door",
            DOOR,
            ["Door_prev", "Deliberation", "ProfActivity", "VisitorPresent", "OthersPresent", "Rain"],
            _door,
            [DOOR, DELIBERATION, PROF, NO_YES, OTHERS, BOOL],
        ),
        _node(
            "Window",
            WINDOW,
            ["Window_prev", "Rain", "TempClass", "CO2Level", "Deliberation"],
            _window,
            [WINDOW, BOOL, TEMP, CO2_LEVELS, DELIBERATION],
        ),
    ]
    return build_network(nodes)


def office_scenario(rain_hours=(12, 13, 14), name=None) -> Scenario:
    """The office day: hot weather, optional rain in ``rain_hours``."""
    rain_hours = set(rain_hours)
    net = office_network()
    template = DbnTemplate(
        net,
        (TemporalLink("Door", "Door_prev"), TemporalLink("Window", "Window_prev")),
        {"Door_prev": "always_closed", "Window_prev": "always_closed"},
    )
    outdoor = [26.0, 27.0, 28.0, 29.0, 30.0, 31.0, 31.0, 31.0, 30.0, 29.0, 28.0, 27.0, 26.0, 25.0]
    outdoor = [23.0 if h in rain_hours else t for h, t in zip(HOURS, outdoor)]
    if name is None:
        name = "office_rain" if rain_hours else "office_dry"
    sc = Scenario(
        name=name,
        description=(
            "Four-occupant office, hot day"
            + (f", rain at {', '.join(f'{h}h' for h in sorted(rain_hours))}" if rain_hours else ", no rain")
            + ". Network structure is a reconstruction; all probabilities are illustrative."
        ),
        metadata={
            "cpt_values": "illustrative, not measured",
            "calendars": "hourly busy/free table of the four occupants, 7h-20h",
            "generator": "python -m occupant_dbn.office",
        },
        template=template,
        calendars=CALENDARS,
        weather_labels={
            "Rain": ["true" if h in rain_hours else "false" for h in HOURS],
            "TempClass": ["hot"] * len(HOURS),
        },
        temperatures={
            "zone": [25.0] * len(HOURS),
            "corridor": [23.0] * len(HOURS),
            "outdoor": outdoor,
        },
        zone=ZoneParams(volume=50.0, boundary_ppm={"corridor": 500.0, "outdoor": 400.0}),
        openings={
            "door": Opening(OpeningGeometry(2.0, 0.9, 0.6, boundary="corridor"), "Door"),
            "window": Opening(OpeningGeometry(1.2, 0.8, 0.6, boundary="outdoor"), "Window"),
        },
        mapping=DEFAULT_MAPPING,
        occupancy=(
            OccupancyTerm("ProfActivity", {"alone": 1, "meeting": 1, "virtual": 1}),
            OccupancyTerm("VisitorPresent", {"yes": 1}),
            OccupancyTerm("OthersPresent", {"one": 1, "two": 2, "three": 3}),
        ),
        horizon=Horizon(7, 20, 3600.0),
        initial_co2=420.0,
        co2_node="CO2Level",
    )
    return check_scenario(sc)


def main():
    for sc in (office_scenario(), office_scenario(rain_hours=())):
        path = bundled_scenario_path(sc.name)
        save_scenario(sc, path)
        print(path)


if __name__ == "__main__":
    main()
