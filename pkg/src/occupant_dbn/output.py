"""Trace and aggregate writers (CSV and JSON) with fixed column order."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from occupant_dbn.cosim import QUANTILES, Aggregate, RunTrace
from occupant_dbn.scenario import FORMAT_VERSION

TRACE_TAIL = ("occupant_count", "door_ratio", "window_ratio", "Q_in", "Q_out", "co2_ppm", "co2_level")


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def _q_name(q: float) -> str:
    return f"co2_q{round(q * 100):02d}"


def _emit(text: str, destination) -> None:
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def trace_csv(trace: RunTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("slot", *trace.node_names, *TRACE_TAIL))
    for r in trace.records:
        o = r.outputs
        w.writerow(
            (
                r.hour,
                *(r.sampled[n] for n in trace.node_names),
                o.occupant_count,
                _fmt(o.door_ratio),
                _fmt(o.window_ratio),
                _fmt(r.q_in),
                _fmt(r.q_out),
                _fmt(r.co2_end),
                r.co2_level,
            )
        )
    return buf.getvalue()


def write_trace(trace: RunTrace, destination) -> None:
    """Write one run as CSV: one row per slot, header always present."""
    _emit(trace_csv(trace), destination)


def aggregate_csv(agg: Aggregate) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cells = [(n, s) for n in agg.node_names for s in agg.states[n]]
    w.writerow(
        (
            "slot",
            "runs",
            "co2_mean",
            "co2_min",
            *(_q_name(q) for q in QUANTILES),
            "co2_max",
            *(f"{n}={s}" for n, s in cells),
        )
    )
    for hour, hist, st in zip(agg.hours, agg.histograms, agg.co2):
        w.writerow(
            (
                hour,
                agg.runs,
                _fmt(st.mean),
                _fmt(st.min),
                *(_fmt(q) for q in st.quantiles),
                _fmt(st.max),
                *(hist[n][s] for n, s in cells),
            )
        )
    return buf.getvalue()


def aggregate_dict(agg: Aggregate) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "scenario": agg.scenario,
        "runs": agg.runs,
        "master_seed": agg.master_seed,
        "quantile_levels": list(QUANTILES),
        "slots": [
            {
                "slot": hour,
                "co2": {
                    "mean": st.mean,
                    "min": st.min,
                    "max": st.max,
                    "quantiles": list(st.quantiles),
                },
                "histograms": {n: dict(hist[n]) for n in agg.node_names},
            }
            for hour, hist, st in zip(agg.hours, agg.histograms, agg.co2)
        ],
        "co2_by_run": [list(r) for r in agg.co2_by_run],
    }


def aggregate_json(agg: Aggregate) -> str:
    return json.dumps(aggregate_dict(agg), indent=2) + "\n"


def write_aggregate(agg: Aggregate, destination) -> None:
    """Write the aggregate; ``.csv`` destinations get the table, others JSON."""
    if not hasattr(destination, "write") and Path(destination).suffix == ".csv":
        _emit(aggregate_csv(agg), destination)
    else:
        _emit(aggregate_json(agg), destination)
