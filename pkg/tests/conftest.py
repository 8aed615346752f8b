"""Shared fixtures: the two long acceptance scenarios and their trajectories.

Trajectories are generated once per session (a few seconds of wall time);
the per-criterion runtime budgets in the acceptance module measure the
verification work itself, not this shared setup.
"""

import numpy as np
import pytest

from metastab.cli import LEMMA_SUITE_STEPS, _truncated
from metastab.bounds import shift_index
from metastab.iteration import ishikawa, shifted_view
from metastab.scenario import scenario_from_mapping

ACCEPTANCE_GS = ("const(0)", "const(5)", "affine(1,1)")
ACCEPTANCE_KS = (0, 1, 2)


def _acceptance_mapping(operator, x0):
    return {
        "operator": operator,
        "x0": x0,
        "schedule": "canonical",
        "steps": 200_000,
        "seed": 2024,
        "queries": [
            {"k": k, "g": g, "cap": 100_000}
            for k in ACCEPTANCE_KS
            for g in ACCEPTANCE_GS
        ],
        "liminf_grid": {"l_max": 10, "k_max": 3},
        "fejer_grid": {"n": [0, 10], "m": [0, 1, 3], "r": [0, 2]},
        "closedness": {"k_max": 5, "samples": 1000},
    }


@pytest.fixture(scope="session")
def cubic_scenario():
    return scenario_from_mapping(_acceptance_mapping("cubic", [0.9]))


@pytest.fixture(scope="session")
def negation_scenario():
    return scenario_from_mapping(_acceptance_mapping("negation", [0.8, 0.3]))


@pytest.fixture(scope="session")
def cubic_traj(cubic_scenario):
    sc = cubic_scenario
    return ishikawa(sc.operator, sc.x0, sc.schedule, sc.steps)


@pytest.fixture(scope="session")
def negation_traj(negation_scenario):
    sc = negation_scenario
    return ishikawa(sc.operator, sc.x0, sc.schedule, sc.steps)


@pytest.fixture(scope="session")
def scenario_pack(cubic_scenario, negation_scenario, cubic_traj, negation_traj):
    """Both acceptance scenarios with trajectory, lemma view, and shifted view."""
    pack = {}
    for sc, traj in ((cubic_scenario, cubic_traj), (negation_scenario, negation_traj)):
        k_shift = shift_index(sc.operator.lipschitz_L, sc.schedule.rate_beta)
        pack[sc.operator.name] = {
            "scenario": sc,
            "traj": traj,
            "lemma_traj": _truncated(traj, LEMMA_SUITE_STEPS),
            "shifted": shifted_view(traj, k_shift),
            "shift_index": k_shift,
        }
    return pack
