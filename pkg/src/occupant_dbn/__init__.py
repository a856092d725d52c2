"""Occupant behaviour as a dynamic Bayesian network, co-simulated with zone CO2."""
from occupant_dbn.cosim import Aggregate, RunTrace, map_actions, monte_carlo, simulate_day
from occupant_dbn.scenario import Scenario, load_scenario, save_scenario

__all__ = [
    "Aggregate",
    "RunTrace",
    "Scenario",
    "load_scenario",
    "map_actions",
    "monte_carlo",
    "save_scenario",
    "simulate_day",
]

__version__ = "0.1.0"
