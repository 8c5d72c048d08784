"""Priority-block engine: the stage loop shared by both constructions.

A run splits the arrivals of one enumeration B into two halves A0 and A1
under the control of priority blocks.  Side-0 blocks group the
requirements that restrain A0, side-1 blocks the ones that restrain A1,
and the two families interleave in priority order

    order(side, i) = 2 * i + side

so block (0, 0) is strongest, then (1, 0), then (0, 1), and so on.

Each stage has up to three parts.  Odd stages route the stage's B-arrival
(if any): the arrival is deflected away from the strongest block whose
restraint it would violate, and the next-weaker block on the receiving
side is initialized, together with everything below it.  Even stages let
blocks act in priority order, stopping at the first block that contains
the stage-indexed requirement of either family, or early as soon as some
requirement in a block acts.  Every stage ends by updating the dynamic
assignment of requirements to blocks, driven by the strongest block
initialized during the stage; requirement indices above the tail of that
block are pulled down onto it, and the indices beyond the current stage
keep unit spacing, so assignments only ever decrease pointwise.

Requirements that own no functional table can never act, define nothing
and hold no state, so the engine visits only blocks containing table
owners; skipped blocks are observationally identical to visited ones.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

from .trace import TraceEvent, event


class ConstructionInvariantError(RuntimeError):
    """An internal invariant of the construction failed during a run."""


SIDE_LABEL = ("P", "Q")


def priority_order(side: int, i: int) -> int:
    """Position of block (side, i) in the interleaved priority order."""
    if side not in (0, 1) or i < 0:
        raise ValueError("block address out of range")
    return 2 * i + side


def order_block(order: int) -> tuple[int, int]:
    """Inverse of priority_order."""
    return (order % 2, order // 2)


def block_label(side: int, i: int) -> str:
    return "%s:%d" % (SIDE_LABEL[side], i)


def req_label(side: int, e: int) -> str:
    return "%s:%d" % (SIDE_LABEL[side], e)


def threatens(x: int, restraint: int) -> bool:
    """An arrival threatens a block iff it is at or below the restraint."""
    return restraint >= 0 and x <= restraint


@dataclass
class BlockState:
    """Mutable per-block bookkeeping.  restraint -1 means none is held."""

    side: int
    index: int
    restraint: int = -1
    last_initialized: int = -1
    max_restraint: int = -1

    @property
    def order(self) -> int:
        return priority_order(self.side, self.index)

    @property
    def label(self) -> str:
        return block_label(self.side, self.index)


class PriorityAssignment:
    """One side's dynamic requirement-to-block assignment.

    The map is nondecreasing in the requirement index, starts at 0, and
    never steps by more than one, so it is stored as an explicit prefix
    plus a unit-slope extension: value(e) for e beyond the prefix is the
    last prefix value plus the distance.  The initial assignment is the
    identity; every update preserves the representation invariants.
    """

    def __init__(self):
        self.prefix: list[int] = [0]

    def value(self, e: int) -> int:
        if e < 0:
            raise ValueError("requirement index must be a natural")
        last = len(self.prefix) - 1
        if e <= last:
            return self.prefix[e]
        return self.prefix[last] + (e - last)

    def tail(self, i: int) -> int:
        """Largest requirement index currently assigned to block i."""
        last = len(self.prefix) - 1
        top = self.prefix[last]
        if i >= top:
            return last + (i - top)
        e = bisect_right(self.prefix, i) - 1
        if e < 0 or self.prefix[e] != i:
            raise ConstructionInvariantError("block %d has an empty preimage" % i)
        return e

    def update(self, s: int, i: int, m: int) -> None:
        """Pull indices m+1..s onto block i; keep unit spacing beyond s.

        m must be the tail of block i.  Indices at or below m keep their
        block; everything strictly above s lands on i + distance-from-s.
        """
        if m > s:
            raise ConstructionInvariantError(
                "tail %d beyond the current stage %d" % (m, s)
            )
        new = [self.value(e) for e in range(m + 1)]
        new.extend(i for _ in range(s - m))
        if new[m] != i:
            raise ConstructionInvariantError("update tail is not on the target block")
        self.prefix = new

    def snapshot_values(self, upto: int) -> list[int]:
        return [self.value(e) for e in range(upto + 1)]


class Run:
    """One deterministic execution of a scenario over its horizon."""

    def __init__(self, scenario, strategy):
        self.scenario = scenario
        self.horizon = scenario.horizon
        self.strategy = strategy
        self.b_entry = dict(scenario.b_schedule.entry_stage())
        self.b_by_stage = {s: x for s, x in scenario.b_schedule.entries}
        self.c_entry = dict(scenario.c_schedule.entry_stage())
        self.d_entry = dict(scenario.d_schedule.entry_stage())
        self.a_entry: tuple[dict[int, int], dict[int, int]] = ({}, {})
        self.blocks: dict[tuple[int, int], BlockState] = {}
        self.assignments = (PriorityAssignment(), PriorityAssignment())
        self.events: list[TraceEvent] = []
        self.action_counts: dict[str, int] = {}
        self.pending_scans = 0
        self.unsettled = False
        self._init_target: tuple[int, int, int] | None = None
        self._pending_d: list[int] = []
        self._d_budget = scenario.d_policy_limit if scenario.d_policy else 0
        strategy.bind(self)

    # -- plumbing ---------------------------------------------------------

    def emit(self, ev: TraceEvent) -> None:
        self.events.append(ev)
        if (
            self.scenario.d_policy == "anti-delta"
            and ev.kind == "define-local"
            and ev.payload.get("k") == "0"
        ):
            x = int(ev.payload["x"])
            # Arrivals beyond the horizon could never be scheduled, so the
            # policy leaves such definitions alone.
            if x < self.horizon and x not in self.d_entry and x not in self._pending_d:
                self._pending_d.append(x)

    def d_value(self, x: int, s: int) -> int:
        st = self.d_entry.get(x)
        return 1 if st is not None and st <= s else 0

    def block(self, side: int, i: int) -> BlockState:
        key = (side, i)
        found = self.blocks.get(key)
        if found is None:
            found = self.blocks[key] = BlockState(side, i)
        return found

    def set_restraint(self, blk: BlockState, s: int) -> None:
        if blk.restraint == s:
            return
        blk.restraint = s
        blk.max_restraint = max(blk.max_restraint, s)
        self.emit(event(s, "restraint-set", block=blk.label, value=s))

    def count_action(self, label: str) -> None:
        self.action_counts[label] = self.action_counts.get(label, 0) + 1

    # -- stage parts ------------------------------------------------------

    def execute(self) -> list[TraceEvent]:
        for s in range(self.horizon + 1):
            if s % 2 == 1:
                self._policy_enumerations(s)
                self._part_one(s)
            else:
                self._part_two(s)
            self.strategy.refresh_pass(s)
            self._part_three(s)
        return self.events

    def _policy_enumerations(self, s: int) -> None:
        while self._pending_d and self._d_budget != 0:
            x = self._pending_d.pop(0)
            if x in self.d_entry:
                continue
            self.d_entry[x] = s
            if self._d_budget > 0:
                self._d_budget -= 1
            self.emit(event(s, "enumerate", element=x, set="D"))

    def _part_one(self, s: int) -> None:
        x = self.b_by_stage.get(s)
        if x is None:
            return
        threatened = sorted(
            (blk.order, blk) for blk in self.blocks.values() if threatens(x, blk.restraint)
        )
        if not threatened:
            self.emit(event(s, "route", threatened="-", to="A0", x=x))
            self._enumerate_half(0, x, s)
            return
        _, blk = threatened[0]
        if blk.side == 0:
            self.emit(event(s, "route", threatened=blk.label, to="A1", x=x))
            self._enumerate_half(1, x, s)
            self.initialize_block(1, blk.index, s, cause="route")
        else:
            self.emit(event(s, "route", threatened=blk.label, to="A0", x=x))
            self._enumerate_half(0, x, s)
            self.initialize_block(0, blk.index + 1, s, cause="route")

    def _enumerate_half(self, side: int, x: int, s: int) -> None:
        if x in self.a_entry[0] or x in self.a_entry[1]:
            raise ConstructionInvariantError("element %d routed twice" % x)
        self.a_entry[side][x] = s
        self.emit(event(s, "enumerate", element=x, set="A%d" % side))

    def _part_two(self, s: int) -> None:
        stop_order = min(
            2 * self.assignments[0].value(s),
            2 * self.assignments[1].value(s) + 1,
        )
        orders = set()
        for side, e in self.strategy.owners:
            i = self.assignments[side].value(e)
            order = priority_order(side, i)
            if order <= stop_order:
                orders.add(order)
        for order in sorted(orders):
            side, i = order_block(order)
            blk = self.block(side, i)
            acted = self.strategy.run_block(blk, s)
            if acted:
                nxt_side, nxt_i = order_block(order + 1)
                self.initialize_block(nxt_side, nxt_i, s, cause="act")
                return

    def block_members(self, blk: BlockState) -> list[int]:
        """Table-owning requirement indices currently assigned to blk."""
        assign = self.assignments[blk.side]
        return sorted(
            e
            for side, e in self.strategy.owners
            if side == blk.side and assign.value(e) == blk.index
        )

    def initialize_block(self, side: int, i: int, s: int, cause: str) -> None:
        """Initialize block (side, i) and everything of lower priority."""
        target = self.block(side, i)
        floor = target.order
        if self._init_target is None or floor < self._init_target[0]:
            self._init_target = (floor, side, i)
        victims = sorted(
            (blk.order, blk) for blk in self.blocks.values() if blk.order >= floor
        )
        for _, blk in victims:
            blk.restraint = -1
            blk.last_initialized = s
            for e in self.block_members(blk):
                self.strategy.cancel_requirement(blk.side, e, s)
            self.emit(
                event(s, "initialize", block=blk.label, cause=cause, initiator=target.label)
            )

    def _part_three(self, s: int) -> None:
        if self._init_target is None:
            self.emit(event(s, "assignment-update", side="none"))
            return
        _, side, i = self._init_target
        self._init_target = None
        assign = self.assignments[side]
        m = assign.tail(i)
        if m > s:
            raise ConstructionInvariantError(
                "tail %d of freshly initialized block exceeds stage %d" % (m, s)
            )
        assign.update(s, i, m)
        self.emit(event(s, "assignment-update", i=i, side=SIDE_LABEL[side], tail=m))

    # -- results ----------------------------------------------------------

    def final_state(self) -> dict:
        blocks = {
            blk.label: {
                "restraint": blk.restraint,
                "last_initialized": blk.last_initialized,
                "max_restraint": blk.max_restraint,
            }
            for _, blk in sorted(self.blocks.items())
        }
        # The strategy snapshot may discover late disagreement between p and
        # the cone truth and flip unsettled, so take it first.
        extra = self.strategy.final_state()
        state = {
            "construction": self.scenario.construction,
            "horizon": self.horizon,
            "a0": sorted((s, x) for x, s in self.a_entry[0].items()),
            "a1": sorted((s, x) for x, s in self.a_entry[1].items()),
            "d": sorted((s, x) for x, s in self.d_entry.items()),
            "assignment_p": self.assignments[0].snapshot_values(self.horizon),
            "assignment_q": self.assignments[1].snapshot_values(self.horizon),
            "blocks": blocks,
            "action_counts": dict(sorted(self.action_counts.items())),
            "pending_scans": self.pending_scans,
            "unsettled": self.unsettled,
        }
        state.update(extra)
        return state
