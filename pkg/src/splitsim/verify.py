"""Trace verification: recompute every run invariant from public data.

The verifier consumes a scenario plus the event list of a finished run
and replays everything it can recompute purely: routing decisions,
restraint windows, assignment updates, certification scans, and the
change-set coding of the p approximations.  Engine and strategy
internals are never consulted, so a failure always indicts the trace,
not the bookkeeping that produced it.

Checks:
  V1  partition                     A0 and A1 split B exactly, stage by stage.
  V2  monotone-enumerations         line grammar, stage order, c.e. discipline.
  V3  assignment-monotone           block assignments only ever move down.
  V4  restraint-integrity           routing and arrivals respect live restraints.
  V5  diagonalization-persistence   diagonalized disagreements survive to the horizon.
  V6  injury-discipline             injuries only under same-stage initialization.
  V7  certification-soundness       scans match the C schedule and the p policy.
  V8  p-contract                    p starts at 0, stays within its change budget.
  V9  local-global-coherence        live local values track the watched functional.
  V10 change-coding-equivalence     coded p rows decode back to their limits.
  V11 assignment-update-rule        every update names the true tail and initiator.

A report is a plain dict: {"checks", "flags", "diagnostics"}.  Failing
checks carry minimal witnesses (stage plus the offending trace lines).
"""

from __future__ import annotations

import re
from bisect import bisect_right

from .engine import block_label, priority_order
from .harness import build_policy
from .model import Snapshot, cone_holds, evaluate
from .omegace import ApproxTable, limit_eval, restrict
from .robinson import string_lifetime
from .trace import TraceEvent

CHECKS = (
    ("V1", "partition"),
    ("V2", "monotone-enumerations"),
    ("V3", "assignment-monotone"),
    ("V4", "restraint-integrity"),
    ("V5", "diagonalization-persistence"),
    ("V6", "injury-discipline"),
    ("V7", "certification-soundness"),
    ("V8", "p-contract"),
    ("V9", "local-global-coherence"),
    ("V10", "change-coding-equivalence"),
    ("V11", "assignment-update-rule"),
)

WITNESS_CAP = 5

_REQ_RE = re.compile(r"^([PQ]):(\d+)$")

# Stage-parity discipline: arrivals are routed at odd stages, strategies
# run at even stages; the remaining kinds are legitimate at either.
_ODD_KINDS = frozenset({"route"})
_EVEN_KINDS = frozenset(
    {"restraint-set", "expansionary", "diagonalize", "certify",
     "refuse-certify", "define-local", "act"}
)


def parse_req(label: str):
    m = _REQ_RE.match(label)
    if m is None:
        return None
    return (0 if m.group(1) == "P" else 1, int(m.group(2)))


def _label_order(label: str) -> int:
    side = 0 if label.startswith("P") else 1
    return priority_order(side, int(label[2:]))


class _AssignReplica:
    """Mechanical replay of one side's assignment, trusting trace claims.

    Same prefix-plus-unit-slope shape as the engine's, but updates apply
    exactly what the trace states, without sanity assertions; the checks
    compare claims against recomputation instead of raising.
    """

    def __init__(self):
        self.prefix = [0]

    def value(self, e: int) -> int:
        last = len(self.prefix) - 1
        if e <= last:
            return self.prefix[e]
        return self.prefix[last] + (e - last)

    def tail_scan(self, i: int):
        """Largest index assigned to block i, or None if none is."""
        last = len(self.prefix) - 1
        top = self.prefix[last]
        if i >= top:
            return last + (i - top)
        e = bisect_right(self.prefix, i) - 1
        if e < 0 or self.prefix[e] != i:
            return None
        return e

    def claimed_update(self, s: int, i: int, m: int) -> list[int]:
        return [self.value(e) for e in range(m + 1)] + [i] * max(0, s - m)


class _Problems:
    """Per-check witness accumulator with a cap and a total count."""

    def __init__(self):
        self.by_check = {name: [] for name, _ in CHECKS}
        self.counts = {name: 0 for name, _ in CHECKS}

    def add(self, check: str, stage: int, text: str, ev: TraceEvent | None = None):
        self.counts[check] += 1
        if len(self.by_check[check]) < WITNESS_CAP:
            witness = {"stage": stage, "note": text}
            if ev is not None:
                witness["line"] = ev.to_line()
            self.by_check[check].append(witness)

    def failed(self, check: str) -> bool:
        return self.counts[check] > 0


class _StageState:
    """Buffers that reset at every stage boundary."""

    def __init__(self):
        self.routes = []          # (event, x, destination) awaiting enumeration
        self.expected_inits = []  # (target label, route event) from deflections
        self.violations = []      # (block label, arrival event) to be forgiven
        self.injuries = []        # (event, containing label or None)

    def clear(self):
        self.routes.clear()
        self.expected_inits.clear()
        self.violations.clear()
        self.injuries.clear()


class _Context:
    """Everything the post-replay checks need, gathered in one pass."""

    def __init__(self, scenario):
        self.scenario = scenario
        self.horizon = scenario.horizon
        self.problems = _Problems()
        self.b_entry = dict(scenario.b_schedule.entry_stage())
        self.c_entry = dict(scenario.c_schedule.entry_stage())
        self.d_entry = dict(scenario.d_schedule.entry_stage())
        self.a_entries = ([], [])  # ordered (stage, element) per half
        self.routed = {}
        self.restraint = {}
        self.block_side = {}
        self.max_restraint = {}
        self.last_initialized = {}
        self.inits_by_stage = {}
        self.initiators_by_stage = {}
        self.updates_per_stage = {}
        self.none_update_stages = []
        self.assignments = (_AssignReplica(), _AssignReplica())
        self.last_change = [-1, -1]
        self.w_sets = {}
        self.w_seen = set()
        self.cert_events = []
        self.refuse_events = []
        self.pending_count = 0
        self.defined_k = {}
        self.diags = []
        self.expansionary = []
        self.definitions = []
        self.cancels = {}
        self.injuries = []
        self.injuries_per_block = {}
        self.action_counts = {}
        self.owners = sorted(scenario.functionals)

    def d_value(self, x: int, s: int) -> int:
        st = self.d_entry.get(x)
        return 1 if st is not None and st <= s else 0

    def a_members(self, side: int, s: int) -> frozenset[int]:
        rows = self.a_entries[side]
        hi = bisect_right(rows, (s, 1 << 62))
        return frozenset(x for _, x in rows[:hi])

    def c_members(self, s: int) -> frozenset[int]:
        return frozenset(x for x, u in self.c_entry.items() if u <= s)

    def cancelled_after(self, side: int, e: int, stage: int):
        """First cancellation of the requirement strictly after stage."""
        for t in self.cancels.get((side, e), ()):
            if t > stage:
                return t
        return None

    def containing_label(self, side: int, e: int) -> str:
        return block_label(side, self.assignments[side].value(e))


def _replay(scenario, events) -> _Context:
    ctx = _Context(scenario)
    prob = ctx.problems
    pend = _StageState()
    last_stage = 0

    def close_stage(s: int):
        inits = ctx.inits_by_stage.get(s, set())
        for ev, x, to in pend.routes:
            prob.add("V4", s, "route of %d to %s without its enumeration" % (x, to), ev)
        for target, ev in pend.expected_inits:
            if target not in inits:
                prob.add("V4", s, "deflection without initializing %s" % target, ev)
        for label, ev in pend.violations:
            if label not in inits:
                prob.add(
                    "V4", s,
                    "arrival under the restraint of %s without initializing it" % label,
                    ev,
                )
        for ev, label in pend.injuries:
            if ev.payload.get("cause") != "initialized":
                prob.add("V6", s, "injury without initialization cause", ev)
            elif label is None:
                prob.add("V6", s, "injury names no requirement", ev)
            elif label not in inits:
                prob.add(
                    "V6", s, "injury with no same-stage initialization of %s" % label, ev
                )
        pend.clear()

    for ev in events:
        s = ev.stage
        if s < last_stage:
            prob.add("V2", s, "stage goes backwards (after %d)" % last_stage, ev)
        if s < 0 or s > ctx.horizon:
            prob.add("V2", s, "stage outside 0..%d" % ctx.horizon, ev)
            continue
        if s > last_stage:
            close_stage(last_stage)
            last_stage = s
        if ev.kind in _ODD_KINDS and s % 2 == 0:
            prob.add("V2", s, "%s event at an even stage" % ev.kind, ev)
        if ev.kind in _EVEN_KINDS and s % 2 == 1:
            prob.add("V2", s, "%s event at an odd stage" % ev.kind, ev)
        try:
            _replay_event(ctx, ev, s, pend)
        except (KeyError, ValueError):
            prob.add("V2", s, "malformed %s payload" % ev.kind, ev)
    close_stage(last_stage)

    for x, t in sorted(ctx.b_entry.items()):
        if x not in ctx.routed:
            prob.add("V1", t, "arrival %d at stage %d was never routed" % (x, t))
    for s in range(ctx.horizon + 1):
        n = ctx.updates_per_stage.get(s, 0)
        if n != 1:
            prob.add("V11", s, "stage has %d assignment updates instead of one" % n)
    for s in ctx.none_update_stages:
        if ctx.inits_by_stage.get(s):
            prob.add("V11", s, "update claims no initialization despite one")
    return ctx


def _replay_event(ctx, ev, s, pend):
    prob = ctx.problems
    pay = ev.payload
    kind = ev.kind

    if kind == "enumerate":
        target = pay["set"]
        if target == "W":
            j = int(pay["j"])
            sigma = pay["sigma"]
            if s % 2 == 1:
                prob.add("V2", s, "guessing-set enumeration at an odd stage", ev)
            if ctx.scenario.construction != "robinson":
                prob.add("V2", s, "guessing-set enumeration in a plain-construction trace", ev)
            if (j, sigma) in ctx.w_seen:
                prob.add("V2", s, "string enumerated twice into W_%d" % j, ev)
            ctx.w_seen.add((j, sigma))
            prior = ctx.w_sets.setdefault(j, [])
            for _, old in prior:
                if cone_holds(old, ctx.c_entry, s):
                    prob.add(
                        "V7", s,
                        "enumeration into W_%d while C already lies in a cone" % j, ev,
                    )
                    break
            prior.append((s, sigma))
            return
        x = int(pay["element"])
        if target == "D":
            if s % 2 == 0:
                prob.add("V2", s, "policy enumeration into D at an even stage", ev)
            if x in ctx.d_entry:
                prob.add("V2", s, "element %d enumerated into D twice" % x, ev)
            else:
                ctx.d_entry[x] = s
            return
        if target not in ("A0", "A1"):
            prob.add("V2", s, "unknown enumeration target %r" % (target,), ev)
            return
        side = int(target[1])
        if s % 2 == 0:
            prob.add("V2", s, "arrival routed at an even stage", ev)
        if x in ctx.routed:
            prob.add("V1", s, "element %d enters a half twice" % x, ev)
            return
        if ctx.b_entry.get(x) != s:
            prob.add("V1", s, "element %d is no stage-%d arrival of B" % (x, s), ev)
        matched = None
        for idx, (_, rx, rto) in enumerate(pend.routes):
            if rx == x and rto == target:
                matched = idx
                break
        if matched is None:
            prob.add("V4", s, "arrival enumerated without a matching route", ev)
        else:
            pend.routes.pop(matched)
        ctx.routed[x] = (side, s)
        ctx.a_entries[side].append((s, x))
        for label, r in ctx.restraint.items():
            if ctx.block_side[label] == side and 0 <= x <= r:
                pend.violations.append((label, ev))
        return

    if kind == "route":
        x = int(pay["x"])
        to = pay["to"]
        threatened = sorted(
            (_label_order(label), label)
            for label, r in ctx.restraint.items()
            if 0 <= x <= r
        )
        want_label = threatened[0][1] if threatened else "-"
        if pay.get("threatened", "-") != want_label:
            prob.add("V4", s, "route names the wrong threatened block (%s)" % want_label, ev)
        if threatened:
            side = ctx.block_side[want_label]
            want_to = "A1" if side == 0 else "A0"
            index = int(want_label[2:])
            target = block_label(1, index) if side == 0 else block_label(0, index + 1)
            pend.expected_inits.append((target, ev))
        else:
            want_to = "A0"
        if to != want_to:
            prob.add("V4", s, "route sends the arrival to %s instead of %s" % (to, want_to), ev)
        pend.routes.append((ev, x, to))
        return

    if kind == "restraint-set":
        label = pay["block"]
        value = int(pay["value"])
        ctx.block_side[label] = 0 if label.startswith("P") else 1
        ctx.restraint[label] = value
        ctx.max_restraint[label] = max(ctx.max_restraint.get(label, -1), value)
        return

    if kind == "initialize":
        label = pay["block"]
        side = 0 if label.startswith("P") else 1
        ctx.block_side.setdefault(label, side)
        ctx.restraint[label] = -1
        ctx.last_initialized[label] = s
        ctx.inits_by_stage.setdefault(s, set()).add(label)
        ctx.initiators_by_stage.setdefault(s, set()).add(pay.get("initiator", label))
        index = int(label[2:])
        gone = {
            (oside, e)
            for oside, e in ctx.owners
            if oside == side and ctx.assignments[side].value(e) == index
        }
        for key in gone:
            ctx.cancels.setdefault(key, []).append(s)
        if gone:
            ctx.defined_k = {
                key: v for key, v in ctx.defined_k.items() if key[0] not in gone
            }
        return

    if kind == "define-local":
        req = parse_req(pay["req"])
        if req is None:
            prob.add("V2", s, "definition names no requirement", ev)
            return
        x = int(pay["x"])
        k = int(pay["k"])
        if "theta" in pay:
            ctx.definitions.append(
                {"req": req, "x": x, "k": k, "theta": pay["theta"],
                 "sigma": pay["sigma"], "stage": s, "ev": ev}
            )
        else:
            ctx.defined_k[(req, x)] = (k, s)
        return

    if kind == "diagonalize":
        req = parse_req(pay["req"])
        if req is None:
            prob.add("V2", s, "diagonalization names no requirement", ev)
            return
        ctx.diags.append({"req": req, "x": int(pay["x"]), "stage": s, "ev": ev})
        return

    if kind == "expansionary":
        req = parse_req(pay["req"])
        if req is None:
            prob.add("V2", s, "expansionary event names no requirement", ev)
            return
        ctx.expansionary.append({"req": req, "ell": int(pay["ell"]), "stage": s, "ev": ev})
        return

    if kind == "act":
        label = pay.get("req", "?")
        ctx.action_counts[label] = ctx.action_counts.get(label, 0) + 1
        return

    if kind == "certify":
        ctx.cert_events.append(ev)
        return

    if kind == "refuse-certify":
        ctx.refuse_events.append(ev)
        if pay.get("result") == "pending":
            ctx.pending_count += 1
        return

    if kind == "injury":
        req = parse_req(pay.get("req", ""))
        label = None
        if req is not None:
            label = ctx.containing_label(*req)
            ctx.injuries_per_block[label] = ctx.injuries_per_block.get(label, 0) + 1
        pend.injuries.append((ev, label))
        ctx.injuries.append(ev)
        return

    if kind == "assignment-update":
        ctx.updates_per_stage[s] = ctx.updates_per_stage.get(s, 0) + 1
        side_label = pay["side"]
        if side_label == "none":
            ctx.none_update_stages.append(s)
            return
        side = 0 if side_label == "P" else 1
        i = int(pay["i"])
        m = int(pay["tail"])
        if not ctx.inits_by_stage.get(s):
            prob.add("V11", s, "update without any initialization this stage", ev)
        else:
            ranked = sorted(
                (_label_order(lab), lab) for lab in ctx.initiators_by_stage.get(s, set())
            )
            if ranked and ranked[0][1] != block_label(side, i):
                prob.add(
                    "V11", s,
                    "update target %s is not the strongest initiator %s"
                    % (block_label(side, i), ranked[0][1]),
                    ev,
                )
        replica = ctx.assignments[side]
        want_m = replica.tail_scan(i)
        if want_m is None:
            prob.add("V11", s, "update targets a block with an empty preimage", ev)
        elif want_m != m:
            prob.add("V11", s, "update tail %d differs from the true tail %d" % (m, want_m), ev)
        if m > s:
            prob.add("V11", s, "update tail %d exceeds the stage" % m, ev)
            m = s
        new_prefix = replica.claimed_update(s, i, m)
        top = max(len(replica.prefix), len(new_prefix))
        old_values = [replica.value(e) for e in range(top)]
        replica.prefix = new_prefix
        for e in range(top):
            if replica.value(e) > old_values[e]:
                prob.add(
                    "V3", s,
                    "assignment of index %d rose from %d to %d"
                    % (e, old_values[e], replica.value(e)),
                    ev,
                )
                break
        ctx.last_change[side] = s
        return


def _recompute_agreement(table, members, ctx, s) -> int:
    snap = Snapshot(members, s)
    y = -1
    x = 0
    while True:
        out = evaluate(table, s, snap, None, x)
        if not out.converges or out.k != ctx.d_value(x, s):
            return y
        y = x
        x += 1


def _check_v5(ctx):
    prob = ctx.problems
    sc = ctx.scenario
    if sc.construction != "sacks":
        for d in ctx.diags:
            prob.add("V5", d["stage"], "diagonalization in an oracle-construction trace", d["ev"])
        return
    for rec in ctx.expansionary:
        table = sc.functionals.get(rec["req"])
        if table is None:
            prob.add("V5", rec["stage"], "expansionary event for an unknown functional", rec["ev"])
            continue
        members = ctx.a_members(rec["req"][0], rec["stage"])
        ell = _recompute_agreement(table, members, ctx, rec["stage"])
        if ell != rec["ell"]:
            prob.add(
                "V5", rec["stage"],
                "recorded agreement %d, recomputed %d" % (rec["ell"], ell), rec["ev"],
            )
    for d in ctx.diags:
        side, e = d["req"]
        if ctx.cancelled_after(side, e, d["stage"]) is not None:
            continue
        got = ctx.defined_k.get((d["req"], d["x"]))
        if got is None:
            prob.add("V5", d["stage"], "diagonalization without a surviving definition", d["ev"])
            continue
        k, defined_at = got
        table = sc.functionals.get(d["req"])
        if table is None:
            prob.add("V5", d["stage"], "diagonalization by an unknown functional", d["ev"])
            continue
        snap_def = Snapshot(ctx.a_members(side, defined_at), defined_at)
        out_def = evaluate(table, defined_at, snap_def, None, d["x"])
        if not out_def.converges:
            prob.add("V5", defined_at, "no computation behind the defined value", d["ev"])
            continue
        if out_def.use > defined_at + 1:
            # The recorded restraint cannot shield a use this long, so the
            # disagreement is not required to persist.
            continue
        h = ctx.horizon
        out = evaluate(table, h, Snapshot(ctx.a_members(side, h), h), None, d["x"])
        if not out.converges:
            prob.add("V5", h, "diagonalized computation lost by the horizon", d["ev"])
        elif out.k != k:
            prob.add("V5", h, "computed value drifted from %d to %d" % (k, out.k), d["ev"])
        elif out.k == ctx.d_value(d["x"], h):
            prob.add("V5", h, "diagonalized value rejoined D at input %d" % d["x"], d["ev"])


def _p_row(policy, j, strings, horizon: int, c_entry) -> list[int]:
    """The canonical p row over stages 0..horizon for one guessing set."""
    if hasattr(policy, "delay"):
        row = [0] * (horizon + 1)
        d = policy.delay
        for enum_stage, sigma in strings:
            birth, death = string_lifetime(sigma, c_entry)
            lo = max(enum_stage, birth) + d
            hi = horizon if death is None else min(horizon, death - 1 + d)
            for t in range(max(0, lo), hi + 1):
                row[t] = 1
        return row
    return [policy.value(j, strings, t) for t in range(horizon + 1)]


def _check_v7(ctx, p_rows):
    prob = ctx.problems
    if ctx.scenario.construction != "robinson":
        for ev in ctx.cert_events + ctx.refuse_events:
            prob.add("V7", ev.stage, "certification event in a plain-construction trace", ev)
        return
    h = ctx.horizon
    for ev in ctx.cert_events:
        pay = ev.payload
        try:
            j, sigma = int(pay["j"]), pay["sigma"]
            entry, resolved = int(pay["entry"]), int(pay["resolved"])
        except (KeyError, ValueError):
            prob.add("V7", ev.stage, "malformed certification record", ev)
            continue
        if not 0 <= entry <= resolved <= h:
            prob.add("V7", ev.stage, "resolution outside the scan window", ev)
            continue
        birth, death = string_lifetime(sigma, ctx.c_entry)
        if birth > entry or (death is not None and death <= resolved):
            prob.add("V7", ev.stage, "C leaves the certified cone inside the window", ev)
        row = p_rows.get(j)
        if row is None or row[resolved] != 1:
            prob.add("V7", ev.stage, "p does not answer 1 at resolution", ev)
        elif any(row[u] for u in range(entry, resolved)):
            prob.add("V7", ev.stage, "p answered 1 before the recorded resolution", ev)
    for ev in ctx.refuse_events:
        pay = ev.payload
        sigma = pay.get("sigma", "")
        entry = int(pay.get("entry", ev.stage))
        result = pay.get("result")
        row = p_rows.get(int(pay.get("j", -1)))
        if result == "refused":
            try:
                resolved = int(pay["resolved"])
            except (KeyError, ValueError):
                prob.add("V7", ev.stage, "refusal without a resolution stage", ev)
                continue
            if cone_holds(sigma, ctx.c_entry, resolved):
                prob.add("V7", ev.stage, "refusal without a cone-exit witness", ev)
            if "memo" not in pay and row is not None:
                if any(row[u] for u in range(max(0, entry), min(resolved, h + 1))):
                    prob.add("V7", ev.stage, "refusal despite an earlier p hit", ev)
        elif result == "pending":
            birth, death = string_lifetime(sigma, ctx.c_entry)
            if birth > entry or (death is not None and death <= h):
                prob.add("V7", ev.stage, "pending scan despite a cone exit", ev)
            elif row is not None and any(row[u] for u in range(max(0, entry), h + 1)):
                prob.add("V7", ev.stage, "pending scan despite a p hit", ev)
        else:
            prob.add("V7", ev.stage, "unknown refusal result %r" % (result,), ev)


def _check_v8_v10(ctx, p_rows):
    """The p contract and the change-set coding of the p rows."""
    prob = ctx.problems
    sc = ctx.scenario
    if sc.construction != "robinson":
        return True
    h = ctx.horizon
    truth = {}
    for j, row in sorted(p_rows.items()):
        q = sc.q_overrides.get(j, sc.q_default)
        changes = sum(1 for a, b in zip(row, row[1:]) if a != b)
        truth[j] = int(any(cone_holds(sig, ctx.c_entry, h) for _, sig in ctx.w_sets[j]))
        if row[0] != 0:
            prob.add("V8", 0, "p(%d, 0) is %d, not 0" % (j, row[0]))
        if changes > q:
            prob.add(
                "V8", h, "p row %d changes its mind %d times, budget %d" % (j, changes, q)
            )
    settled = ctx.pending_count == 0 and all(p_rows[j][h] == truth[j] for j in p_rows)
    rows = {j: tuple(row) for j, row in p_rows.items()}
    bounds = {j: sc.q_overrides.get(j, sc.q_default) + 1 for j in p_rows}
    try:
        tab = ApproxTable(h, rows, bounds)
    except ValueError as err:
        prob.add("V10", h, "p rows are no bounded approximation: %s" % err)
        return settled
    top = min(h, (max(p_rows) + 2) if p_rows else 1)
    for n in range(top + 1):
        want = {x for x in range(n) if limit_eval(tab, x) == 1}
        got = restrict(tab, n)
        if got != want:
            prob.add(
                "V10", h, "restriction below %d decodes to %s, limit is %s"
                % (n, sorted(got), sorted(want))
            )
            break
    return settled


def _check_v9(ctx, settled):
    prob = ctx.problems
    sc = ctx.scenario
    if sc.construction != "robinson" or not settled:
        return
    h = ctx.horizon
    c_stages = sorted(set(ctx.c_entry.values()))
    for d in ctx.definitions:
        side, e = d["req"]
        table = sc.functionals.get(d["req"])
        if table is None:
            prob.add("V9", d["stage"], "definition by an unknown functional", d["ev"])
            continue
        end = ctx.cancelled_after(side, e, d["stage"])
        end = h + 1 if end is None else end
        marks = {d["stage"]}
        marks.update(t for t, _ in ctx.a_entries[side] if d["stage"] < t < end)
        marks.update(t for t in c_stages if d["stage"] < t < end)
        for t in sorted(marks):
            if not cone_holds(d["sigma"], ctx.c_entry, t):
                continue
            out = evaluate(
                table, t,
                Snapshot(ctx.a_members(side, t), t),
                Snapshot(ctx.c_members(t), t),
                d["x"],
            )
            if not out.converges:
                prob.add(
                    "V9", t,
                    "live local value at input %d with no global computation" % d["x"],
                    d["ev"],
                )
                break
            if out.k != d["k"]:
                prob.add(
                    "V9", t,
                    "local value %d against global value %d at input %d"
                    % (d["k"], out.k, d["x"]),
                    d["ev"],
                )
                break


def verify(scenario, events, final=None) -> dict:
    """Check a finished run; returns {"checks", "flags", "diagnostics"}."""
    ctx = _replay(scenario, events)
    policy = build_policy(scenario) if scenario.construction == "robinson" else None
    p_rows = {
        j: _p_row(policy, j, strings, ctx.horizon, ctx.c_entry)
        for j, strings in ctx.w_sets.items()
    }
    _check_v5(ctx)
    _check_v7(ctx, p_rows)
    settled = _check_v8_v10(ctx, p_rows)
    _check_v9(ctx, settled)

    skipped = {}
    if scenario.construction == "robinson":
        if not ctx.diags:
            skipped["V5"] = "no diagonalization in this construction"
        if not settled:
            skipped["V9"] = "run is unsettled"
    else:
        if not ctx.injuries:
            skipped["V6"] = "no certified state to injure in this construction"
        if not ctx.cert_events and not ctx.refuse_events:
            skipped["V7"] = "no certification in this construction"
        if not ctx.w_sets:
            skipped["V8"] = "no guessing sets in this construction"
            skipped["V10"] = "no p rows in this construction"
        if not ctx.definitions:
            skipped["V9"] = "no oracle-relative definitions in this construction"

    checks = {}
    for name, title in CHECKS:
        if ctx.problems.failed(name):
            checks[name] = {
                "title": title,
                "status": "fail",
                "failures": ctx.problems.counts[name],
                "witnesses": ctx.problems.by_check[name],
            }
        elif name in skipped:
            checks[name] = {"title": title, "status": "skipped", "reason": skipped[name]}
        else:
            checks[name] = {"title": title, "status": "pass"}

    flags = {
        "status": "settled" if settled else "unsettled",
        "p_contract_violated": ctx.problems.failed("V8"),
    }
    diagnostics = {
        "max_restraint": dict(sorted(ctx.max_restraint.items())),
        "last_initialized": dict(sorted(ctx.last_initialized.items())),
        "injuries_per_block": dict(sorted(ctx.injuries_per_block.items())),
        "action_counts": dict(sorted(ctx.action_counts.items())),
        "assignment_p": [ctx.assignments[0].value(e) for e in range(ctx.horizon + 1)],
        "assignment_q": [ctx.assignments[1].value(e) for e in range(ctx.horizon + 1)],
        "last_assignment_change": {"P": ctx.last_change[0], "Q": ctx.last_change[1]},
        "pending_scans": ctx.pending_count,
        "guessing_sets": len(ctx.w_sets),
        "events": len(events),
    }
    if final is not None:
        diagnostics["reported_flags"] = {
            "unsettled": bool(final.get("unsettled")),
            "pending_scans": final.get("pending_scans"),
        }
    return {"checks": checks, "flags": flags, "diagnostics": diagnostics}


def passed(report: dict) -> bool:
    """True iff no non-skipped check failed."""
    return all(c["status"] != "fail" for c in report["checks"].values())
