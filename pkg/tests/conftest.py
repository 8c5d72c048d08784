import json
from pathlib import Path

import pytest

from splitsim.harness import run
from splitsim.scenario import load_scenario

GOLDEN_DIR = Path(__file__).parent / "golden"

ACCEPTANCE_LINES = []


def record_line(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


@pytest.fixture
def record():
    return record_line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# Shared designated material for the negative controls: small runs that
# legitimately exercise the state each corruption needs to forge.

INJURY_DOC = {
    "construction": "robinson",
    "horizon": 10,
    "b": [[5, 0]],
    "c": [],
    "d": [],
    "functionals": [
        {"side": 1, "e": 0, "axioms": [{"theta": "", "sigma": "", "x": 0, "k": 0, "stage": 0}]},
        {"side": 0, "e": 1, "axioms": [{"theta": "", "sigma": "", "x": 0, "k": 0, "stage": 0}]},
    ],
    "p_policy": {"type": "truthful_delay", "d": 1},
}

CERTIFY_DOC = {
    "construction": "robinson",
    "horizon": 8,
    "b": [],
    "c": [[4, 0]],
    "d": [],
    "functionals": [
        {"side": 0, "e": 0, "axioms": [{"theta": "0", "sigma": "0", "x": 0, "k": 0, "stage": 0}]}
    ],
    "p_policy": {"type": "truthful_delay", "d": 1},
}

# Heavy C churn with a tiny change budget: the only honest way to stay
# inside the budget is to enumerate nothing, which is what happens.
CHURN_DOC = {
    "construction": "robinson",
    "horizon": 12,
    "b": [],
    "c": [[1, 0], [2, 1], [3, 2], [4, 3], [5, 4]],
    "d": [],
    "functionals": [],
    "p_policy": {"type": "truthful_delay", "d": 1},
    "q_default": 2,
}

_GOLDEN_FILES = {
    "deflection": "deflection-update-scenario.json",
    "forced": "forced-diagonalization-scenario.json",
}

_INLINE_DOCS = {"injury": INJURY_DOC, "certify": CERTIFY_DOC, "churn": CHURN_DOC}


def _material(name):
    if name in _GOLDEN_FILES:
        doc = json.loads((GOLDEN_DIR / _GOLDEN_FILES[name]).read_text())
    else:
        doc = _INLINE_DOCS[name]
    sc = load_scenario(doc)
    events, final = run(sc)
    return sc, events, final


@pytest.fixture(scope="session")
def control_materials():
    return {name: _material(name) for name in ("deflection", "forced", "injury", "certify", "churn")}
