"""Plain splitting strategies: agreement lengths and diagonalizing triples.

Each table-owning requirement watches its functional over one half of the
split against the target enumeration D.  At an eligible even stage the
requirement stops on the first of four exits:

  1. it has already diagonalized (and was not initialized since);
  2. some previously defined local value now disagrees with D, in which
     case it diagonalizes there and acts;
  3. the stage is expansionary (the agreement length strictly exceeds
     every length recorded since the last initialization), in which case
     it copies D onto all not-yet-defined inputs up to the agreement
     length, records one diagonalizing triple per new value, raises the
     block restraint to the current stage, and acts;
  4. otherwise it does nothing.

Local values are one-shot: a defined input is never redefined without an
intervening initialization.  The recorded triple keeps the half-snapshot
the definition saw, so a later disagreement certifies that the watched
functional computes a value D has since abandoned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import req_label
from .model import FunctionalTable, in_cone
from .trace import event


@dataclass(frozen=True)
class DiagTriple:
    """One diagonalization witness: half-snapshot, input, copied bit."""

    sigma: str
    x: int
    k: int
    defined_at: int


@dataclass
class SacksRequirement:
    side: int
    e: int
    values: dict[int, int] = field(default_factory=dict)
    triples: dict[int, DiagTriple] = field(default_factory=dict)
    diagonalized: tuple[int, int] | None = None
    ell_history: list[tuple[int, int]] = field(default_factory=list)
    max_ell: int = -1

    @property
    def label(self) -> str:
        return req_label(self.side, self.e)

    def reset(self) -> None:
        self.values.clear()
        self.triples.clear()
        self.diagonalized = None
        self.ell_history.clear()
        self.max_ell = -1


def agreement_length(table: FunctionalTable, a_members, d_entry: dict[int, int], s: int) -> int:
    """Largest y with the functional agreeing with D on every x <= y; -1 if none.

    Convergence is checked against the current half a_members (whose
    elements all entered by stage s); agreement against D's stage-s
    snapshot.  The scan stops at the first divergence or disagreement,
    and the table is finite, so it always terminates.
    """
    y = -1
    x = 0
    view = _SetView(a_members)
    while True:
        got = None
        for appear, ax in table.axioms_for(x):
            if appear <= s and in_cone(ax.theta, view):
                got = ax
                break
        if got is None:
            return y
        dst = d_entry.get(x)
        if got.k != (1 if dst is not None and dst <= s else 0):
            return y
        y = x
        x += 1


class _SetView:
    """Adapter so in_cone can read a bare membership set as a snapshot."""

    __slots__ = ("members",)

    def __init__(self, members):
        self.members = members


def is_expansionary(ell: int, max_recorded: int) -> bool:
    """A stage is expansionary iff the agreement length reaches a new high.

    The baseline after (re)initialization is -1, so a stage with no
    agreement at all is never expansionary.
    """
    return ell > max_recorded


class SacksStrategy:
    """Per-run state and block dispatch for the plain construction."""

    def __init__(self, tables: dict[tuple[int, int], FunctionalTable]):
        self.tables = tables
        self.owners: list[tuple[int, int]] = sorted(tables)
        self.requirements: dict[tuple[int, int], SacksRequirement] = {
            key: SacksRequirement(*key) for key in self.owners
        }
        self.run = None

    def bind(self, run) -> None:
        self.run = run

    def run_block(self, blk, s: int) -> bool:
        acted = False
        for e in self.run.block_members(blk):
            acted |= self.run_requirement(self.requirements[(blk.side, e)], blk, s)
        return acted

    def run_requirement(self, req: SacksRequirement, blk, s: int) -> bool:
        if req.diagonalized is not None:
            return False
        run = self.run
        for x in sorted(req.values):
            if req.values[x] != run.d_value(x, s):
                req.diagonalized = (x, s)
                run.emit(event(s, "diagonalize", req=req.label, x=x))
                run.emit(event(s, "act", block=blk.label, req=req.label, via="diagonalize"))
                run.count_action(req.label)
                return True
        members = run.a_entry[req.side].keys()
        ell = agreement_length(self.tables[(req.side, req.e)], members, run.d_entry, s)
        if not is_expansionary(ell, req.max_ell):
            req.ell_history.append((s, ell))
            return False
        req.ell_history.append((s, ell))
        req.max_ell = ell
        run.emit(event(s, "expansionary", block=blk.label, ell=ell, req=req.label))
        sigma = "".join("1" if i in members else "0" for i in range(s))
        for x in range(ell + 1):
            if x in req.values:
                continue
            k = run.d_value(x, s)
            req.values[x] = k
            req.triples[x] = DiagTriple(sigma, x, k, s)
            run.emit(event(s, "define-local", k=k, req=req.label, sigma=sigma, x=x))
        run.set_restraint(blk, s)
        run.emit(event(s, "act", block=blk.label, req=req.label, via="expansionary"))
        run.count_action(req.label)
        return True

    def cancel_requirement(self, side: int, e: int, s: int) -> None:
        self.requirements[(side, e)].reset()

    def refresh_pass(self, s: int) -> None:
        pass

    def final_state(self) -> dict:
        locals_out = {}
        for key in self.owners:
            req = self.requirements[key]
            locals_out[req.label] = {
                "values": {str(x): req.values[x] for x in sorted(req.values)},
                "diagonalized": list(req.diagonalized) if req.diagonalized else None,
                "max_ell": req.max_ell,
            }
        return {"requirements": locals_out}
