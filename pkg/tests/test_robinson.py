import pytest

from splitsim.harness import run
from splitsim.robinson import TablePolicy, TruthfulDelayPolicy, string_lifetime
from splitsim.scenario import load_scenario


def test_string_lifetime_frozen_cases():
    assert string_lifetime("", {}) == (0, None)
    assert string_lifetime("1", {0: 3}) == (3, None)
    assert string_lifetime("1", {}) == (1 << 62, None)
    assert string_lifetime("0", {0: 3}) == (0, 3)
    assert string_lifetime("10", {0: 1, 1: 4}) == (1, 4)
    assert string_lifetime("11", {0: 2, 1: 5}) == (5, None)
    assert string_lifetime("00", {0: 2, 1: 5}) == (0, 2)


def test_truthful_delay_policy():
    with pytest.raises(ValueError):
        TruthfulDelayPolicy(0, {})
    pol = TruthfulDelayPolicy(2, {0: 3})
    alive = [(1, "1")]  # joins the cone at stage 3, never leaves
    assert [pol.value(0, alive, t) for t in range(7)] == [0, 0, 0, 0, 0, 1, 1]
    assert pol.first_hit(0, alive, 0, 8) == 5
    assert pol.first_hit(0, alive, 6, 8) == 6
    assert pol.first_hit(0, alive, 0, 4) is None
    dying = [(0, "0")]  # dies when 0 enters C at stage 3
    assert [pol.value(0, dying, t) for t in range(7)] == [0, 0, 1, 1, 1, 0, 0]
    assert pol.first_hit(0, dying, 0, 8) == 2
    assert pol.first_hit(0, dying, 5, 8) is None


def test_table_policy():
    pol = TablePolicy({"0": [0, 1, 0]})
    assert [pol.value(0, [], t) for t in range(4)] == [0, 1, 0, 0]
    assert pol.value(7, [], 1) == 0
    assert pol.first_hit(0, [], 0, 8) == 1
    assert pol.first_hit(0, [], 2, 8) is None
    with pytest.raises(ValueError):
        TablePolicy({0: [1, 0]})
    with pytest.raises(ValueError):
        TablePolicy({0: [0, 2]})


def _doc(horizon, c, delay, functionals, b=()):
    return {
        "construction": "robinson",
        "horizon": horizon,
        "b": [list(r) for r in b],
        "c": [list(r) for r in c],
        "d": [],
        "functionals": functionals,
        "p_policy": {"type": "truthful_delay", "d": delay},
    }


_BASE_AXIOM = {"theta": "0", "sigma": "0", "x": 0, "k": 0, "stage": 0}


def test_certification_race_won_by_policy_hit():
    # sigma=0 dies when C enumerates 0 at stage 4; with delay 1 the policy
    # answers 1 at stage 3 first, so the scan certifies.
    doc = _doc(8, [[4, 0]], 1, [{"side": 0, "e": 0, "axioms": [_BASE_AXIOM]}])
    events, state = run(load_scenario(doc))
    certs = [ev for ev in events if ev.kind == "certify"]
    assert len(certs) == 1
    assert certs[0].stage == 2
    assert certs[0].payload == {
        "entry": "2",
        "j": "0",
        "k": "0",
        "req": "P:0",
        "resolved": "3",
        "sigma": "0",
        "theta": "0",
        "x": "0",
    }
    enums = [ev for ev in events if ev.kind == "enumerate" and ev.payload["set"] == "W"]
    assert [(ev.stage, ev.payload["j"], ev.payload["sigma"]) for ev in enums] == [(2, "0", "0")]
    reg = state["guessing_sets"]["0"]
    # p holds only while C stays out of the cone, one stage late.
    assert reg["p_changes"] == 2
    assert reg["p_final"] == 0 == reg["cone_truth"]
    assert not state["unsettled"]
    assert state["p_contract_ok"]
    # The local definition died with its sigma cone.
    defs = state["requirements"]["P:0"]["definitions"]
    assert defs == [
        {"x": 0, "k": 0, "theta": "0", "sigma": "0", "defined_at": 2, "live": False}
    ]


def test_refusal_and_memo():
    # C enumerates 0 at stage 6; with delay 5 the cone exit comes first,
    # so the scan refuses and the stage-4 retry answers from the memo.
    doc = _doc(8, [[6, 0]], 5, [{"side": 0, "e": 0, "axioms": [_BASE_AXIOM]}])
    events, state = run(load_scenario(doc))
    assert not [ev for ev in events if ev.kind == "certify"]
    refusals = [ev for ev in events if ev.kind == "refuse-certify"]
    assert [(ev.stage, ev.payload["result"]) for ev in refusals] == [
        (2, "refused"),
        (4, "refused"),
    ]
    assert refusals[0].payload["resolved"] == "6"
    assert "memo" not in refusals[0].payload
    assert refusals[1].payload["memo"] == "1"
    assert refusals[1].payload["resolved"] == "6"
    # Only one W enumeration: the cone still held at the retry.
    enums = [ev for ev in events if ev.kind == "enumerate" and ev.payload["set"] == "W"]
    assert len(enums) == 1
    assert not [ev for ev in events if ev.kind == "define-local"]
    # p answers 1 after the horizon-clipped delay, too late to be seen
    # settled: the final p value disagrees with the cone truth.
    assert state["unsettled"]
    assert state["pending_scans"] == 0


def test_pending_scan_marks_run_unsettled():
    doc = _doc(8, [], 10, [{"side": 0, "e": 0, "axioms": [_BASE_AXIOM]}])
    events, state = run(load_scenario(doc))
    refusals = [ev for ev in events if ev.kind == "refuse-certify"]
    assert refusals and all(ev.payload["result"] == "pending" for ev in refusals)
    assert all("resolved" not in ev.payload for ev in refusals)
    assert state["pending_scans"] == len(refusals) == 4
    assert state["unsettled"]


def test_initialization_injury_is_attributed():
    # Q:0 certifies and restrains at stage 2, P:1 at stage 4.  The B
    # arrival at stage 5 threatens Q:0, deflects to A0, and initializes
    # P:1, whose certified input is reported as an initialization injury.
    doc = _doc(
        10,
        [],
        1,
        [
            {"side": 1, "e": 0, "axioms": [{"theta": "", "sigma": "", "x": 0, "k": 0, "stage": 0}]},
            {"side": 0, "e": 1, "axioms": [{"theta": "", "sigma": "", "x": 0, "k": 0, "stage": 0}]},
        ],
        b=[[5, 0]],
    )
    events, state = run(load_scenario(doc))
    injuries = [ev for ev in events if ev.kind == "injury"]
    assert len(injuries) == 1
    assert injuries[0].stage == 5
    assert injuries[0].payload == {"cause": "initialized", "req": "P:1", "x": "0"}
    same_stage_inits = [
        ev for ev in events if ev.kind == "initialize" and ev.stage == 5
    ]
    assert {ev.payload["block"] for ev in same_stage_inits} == {"P:1", "Q:1"}
    # The requirement recovers with a fresh index afterwards.
    owners = {j: row["owner"] for j, row in state["guessing_sets"].items()}
    assert owners == {
        "0": ["Q:0", 0, 0],
        "1": ["P:1", 0, 0],
        "2": ["P:1", 0, 1],
    }
    certs = [ev for ev in events if ev.kind == "certify"]
    assert [(ev.stage, ev.payload["j"]) for ev in certs] == [(2, "0"), (4, "1"), (6, "2")]
    assert not state["unsettled"]
    assert state["p_contract_ok"]
