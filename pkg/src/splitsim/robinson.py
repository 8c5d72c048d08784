"""Oracle-splitting strategies: certification before every definition.

The refinement works against binary functionals over a half of the split
joined with a third enumeration C, and builds local functionals relative
to C.  A computation may only be copied into a local functional after it
is certified: its C-side string sigma is enumerated into the guessing set
of a per-input index j (unless C already lies in one of the set's cones),
and the stage scans forward for the first moment that either C leaves the
cone of sigma (refusal) or the external approximation p answers 1 for j
(certification).  The scan happens inside the stage against the
pre-specified C schedule and p policy, both oblivious to the run, so a
run remains a pure function of its scenario.

Indices are never reused.  Whenever a certified computation loses its
half-side oracle string, or the owning requirement is initialized, the
input's certified set is cleared, its refusal memos are dropped, and a
fresh index is issued on next use; the old guessing set stays behind for
the verifier.  A refusal memo suppresses re-certification of a string
whose future cone exit is already known.

Certified definitions carry the axiom (theta, sigma, x, k): theta keeps
the half-side string protected by the block restraint, sigma makes the
local value C-relative, so the definition dies by itself once C leaves
sigma's cone, and dies with its requirement on initialization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import ConstructionInvariantError, req_label
from .model import Axiom, FunctionalTable, cone_holds, in_cone
from .trace import event


@dataclass
class OracleAxiom:
    """One live-or-dead local definition relative to C."""

    theta: str
    sigma: str
    x: int
    k: int
    defined_at: int
    live: bool = True


@dataclass(frozen=True)
class CertRecord:
    """A certified computation: scan entry, resolution stage, and index."""

    axiom: Axiom
    entry: int
    resolved: int
    j: int


@dataclass
class InputState:
    """Certification bookkeeping for one (requirement, input) pair."""

    epoch: int = 0
    j: int | None = None
    certified: list[CertRecord] = field(default_factory=list)
    refusal_memo: dict[str, int] = field(default_factory=dict)

    def refresh(self) -> None:
        self.epoch += 1
        self.j = None
        self.certified.clear()
        self.refusal_memo.clear()


class GuessingRegistry:
    """Issues fresh guessing-set indices and stores their enumerations."""

    def __init__(self, q_default: int, q_overrides: dict[int, int]):
        self.next_j = 0
        self.sets: dict[int, list[tuple[int, str]]] = {}
        self.owner: dict[int, tuple[str, int, int]] = {}
        self.q_default = q_default
        self.q_overrides = dict(q_overrides)

    def issue(self, label: str, x: int, epoch: int) -> int:
        j = self.next_j
        self.next_j += 1
        self.sets[j] = []
        self.owner[j] = (label, x, epoch)
        return j

    def q(self, j: int) -> int:
        return self.q_overrides.get(j, self.q_default)


def string_lifetime(sigma: str, c_entry: dict[int, int]) -> tuple[int, int | None]:
    """(birth, death) of C's membership in sigma's cone.

    C enters the cone once every 1-position has arrived and leaves it for
    good when the first 0-position arrives; death None means never.
    """
    birth = 0
    death: int | None = None
    for i, c in enumerate(sigma):
        st = c_entry.get(i)
        if c == "1":
            if st is None:
                return (1 << 62), None
            birth = max(birth, st)
        elif st is not None:
            death = st if death is None else min(death, st)
    return birth, death


class TruthfulDelayPolicy:
    """p answers the cone question about W_j truthfully, d stages late.

    p(j, t) is 0 for t < d and otherwise 1 exactly when C at stage t - d
    lay in the cone of some string enumerated into W_j by stage t - d.
    """

    def __init__(self, delay: int, c_entry: dict[int, int]):
        if delay < 1:
            raise ValueError("truthful delay must be at least 1")
        self.delay = delay
        self.c_entry = c_entry

    def value(self, j: int, strings: list[tuple[int, str]], t: int) -> int:
        if t < self.delay:
            return 0
        u = t - self.delay
        for enum_stage, sigma in strings:
            if enum_stage > u:
                continue
            birth, death = string_lifetime(sigma, self.c_entry)
            if birth <= u and (death is None or u < death):
                return 1
        return 0

    def first_hit(self, j: int, strings: list[tuple[int, str]], s: int, horizon: int) -> int | None:
        best = None
        for enum_stage, sigma in strings:
            birth, death = string_lifetime(sigma, self.c_entry)
            lo = max(enum_stage, birth) + self.delay
            t = max(s, lo)
            if death is not None and t >= death + self.delay:
                continue
            if best is None or t < best:
                best = t
        if best is None or best > horizon:
            return None
        return best


class TablePolicy:
    """p read off an explicit per-index table; missing entries are 0."""

    def __init__(self, values: dict[int, list[int]]):
        self.values = {int(j): list(row) for j, row in values.items()}
        for j, row in self.values.items():
            if any(v not in (0, 1) for v in row):
                raise ValueError("p table rows must consist of bits")
            if row and row[0] != 0:
                raise ValueError("p must answer 0 at stage 0 (index %d)" % j)

    def value(self, j: int, strings, t: int) -> int:
        row = self.values.get(j)
        if row is None or t >= len(row):
            return 0
        return row[t]

    def first_hit(self, j: int, strings, s: int, horizon: int) -> int | None:
        for t in range(s, horizon + 1):
            if self.value(j, strings, t) == 1:
                return t
        return None


class RobinsonStrategy:
    """Per-run state and block dispatch for the oracle construction."""

    def __init__(
        self,
        tables: dict[tuple[int, int], FunctionalTable],
        policy,
        q_default: int,
        q_overrides: dict[int, int],
    ):
        self.tables = tables
        self.owners: list[tuple[int, int]] = sorted(tables)
        self.policy = policy
        self.registry = GuessingRegistry(q_default, q_overrides)
        self.inputs: dict[tuple[int, int, int], InputState] = {}
        self.local_axioms: dict[tuple[int, int], list[OracleAxiom]] = {
            key: [] for key in self.owners
        }
        self.stop_marks: dict[tuple[int, int], list[tuple[int, int]]] = {
            key: [] for key in self.owners
        }
        self._refresh_flags: set[tuple[int, int]] = set()
        self.run = None

    def bind(self, run) -> None:
        self.run = run

    # -- local functionals --------------------------------------------------

    def live_axiom(self, side: int, e: int, x: int, s: int) -> OracleAxiom | None:
        """The current C-valid definition at x, expiring dead ones lazily."""
        c_entry = self.run.c_entry
        found = None
        for ax in self.local_axioms[(side, e)]:
            if ax.x != x or not ax.live:
                continue
            if not cone_holds(ax.sigma, c_entry, s):
                ax.live = False
                continue
            if found is not None:
                raise ConstructionInvariantError(
                    "two live definitions at input %d of %s" % (x, req_label(side, e))
                )
            found = ax
        return found

    def input_state(self, side: int, e: int, x: int) -> InputState:
        key = (side, e, x)
        st = self.inputs.get(key)
        if st is None:
            st = self.inputs[key] = InputState()
        return st

    # -- certification --------------------------------------------------------

    def certify(self, side: int, e: int, x: int, axiom: Axiom, s: int):
        """Run the certification procedure; returns a CertRecord or None.

        None covers both refusal and a scan still pending at the horizon;
        a pending scan flags the whole run as unsettled.
        """
        run = self.run
        label = req_label(side, e)
        st = self.input_state(side, e, x)
        if st.j is None:
            st.j = self.registry.issue(label, x, st.epoch)
        owner = self.registry.owner[st.j]
        if owner[2] != st.epoch:
            raise ConstructionInvariantError(
                "stale guessing set for %s input %d" % (label, x)
            )
        j = st.j
        strings = self.registry.sets[j]
        if not any(cone_holds(sig, run.c_entry, s) for _, sig in strings):
            strings.append((s, axiom.sigma))
            run.emit(event(s, "enumerate", j=j, set="W", sigma=axiom.sigma))
        memo = st.refusal_memo.get(axiom.sigma)
        if memo is not None and s <= memo:
            run.emit(
                event(
                    s,
                    "refuse-certify",
                    entry=s,
                    j=j,
                    k=axiom.k,
                    memo=1,
                    req=label,
                    resolved=memo,
                    result="refused",
                    sigma=axiom.sigma,
                    theta=axiom.theta,
                    x=x,
                )
            )
            return None
        _, death = string_lifetime(axiom.sigma, run.c_entry)
        t_exit = death if death is not None and death <= run.horizon else None
        t_hit = self.policy.first_hit(j, strings, s, run.horizon)
        if t_exit is None and t_hit is None:
            run.pending_scans += 1
            run.unsettled = True
            run.emit(
                event(
                    s,
                    "refuse-certify",
                    entry=s,
                    j=j,
                    k=axiom.k,
                    req=label,
                    result="pending",
                    sigma=axiom.sigma,
                    theta=axiom.theta,
                    x=x,
                )
            )
            return None
        if t_exit is not None and (t_hit is None or t_exit <= t_hit):
            st.refusal_memo[axiom.sigma] = t_exit
            run.emit(
                event(
                    s,
                    "refuse-certify",
                    entry=s,
                    j=j,
                    k=axiom.k,
                    req=label,
                    resolved=t_exit,
                    result="refused",
                    sigma=axiom.sigma,
                    theta=axiom.theta,
                    x=x,
                )
            )
            return None
        rec = CertRecord(axiom, s, t_hit, j)
        st.certified.append(rec)
        run.emit(
            event(
                s,
                "certify",
                entry=s,
                j=j,
                k=axiom.k,
                req=label,
                resolved=t_hit,
                sigma=axiom.sigma,
                theta=axiom.theta,
                x=x,
            )
        )
        return rec

    # -- requirement strategies ------------------------------------------------

    def run_block(self, blk, s: int) -> bool:
        acted = False
        for e in self.run.block_members(blk):
            acted |= self.run_requirement(blk.side, e, blk, s)
        return acted

    def run_requirement(self, side: int, e: int, blk, s: int) -> bool:
        acted = False
        x = 0
        while x < s:
            result = self.run_input_strategy(side, e, x, blk, s)
            if result in ("defined", "acted"):
                acted |= result == "acted"
                x += 1
                continue
            self.stop_marks[(side, e)].append((s, x))
            break
        return acted

    def run_input_strategy(self, side: int, e: int, x: int, blk, s: int) -> str:
        """One pass of the per-input strategy; returns its exit.

        "nocomp": the watched functional diverges or disagrees with D
        (includes a deferred action whose stage has not yet passed the
        use); "defined": a live local value already covers x; "refused":
        the certification scan refused or is pending; "acted": a fresh
        value was defined under a new restraint.
        """
        run = self.run
        table = self.tables[(side, e)]
        got = self._applicable(table, side, x, s)
        d_now = run.d_value(x, s)
        if got is None or got.k != d_now:
            return "nocomp"
        live = self.live_axiom(side, e, x, s)
        if live is not None:
            if live.k != d_now:
                raise ConstructionInvariantError(
                    "live definition at %s input %d contradicts D"
                    % (req_label(side, e), x)
                )
            return "defined"
        if s <= got.use:
            return "nocomp"
        rec = self.certify(side, e, x, got, s)
        if rec is None:
            return "refused"
        self.local_axioms[(side, e)].append(
            OracleAxiom(got.theta, got.sigma, x, got.k, s)
        )
        run.emit(
            event(
                s,
                "define-local",
                k=got.k,
                req=req_label(side, e),
                sigma=got.sigma,
                theta=got.theta,
                x=x,
            )
        )
        run.set_restraint(blk, s)
        run.emit(event(s, "act", block=blk.label, req=req_label(side, e), via="certified"))
        run.count_action(req_label(side, e))
        return "acted"

    def _applicable(self, table: FunctionalTable, side: int, x: int, s: int) -> Axiom | None:
        run = self.run
        members = run.a_entry[side].keys()
        for appear, ax in table.axioms_for(x):
            if appear > s:
                continue
            if not all((c == "1") == (i in members) for i, c in enumerate(ax.theta)):
                continue
            if not cone_holds(ax.sigma, run.c_entry, s):
                continue
            return ax
        return None

    # -- refresh ---------------------------------------------------------------

    def cancel_requirement(self, side: int, e: int, s: int) -> None:
        self._refresh_flags.add((side, e))
        for ax in self.local_axioms[(side, e)]:
            ax.live = False

    def refresh_pass(self, s: int) -> None:
        run = self.run
        hits: list[tuple[int, int, int, str]] = []
        for (side, e, x), st in sorted(self.inputs.items()):
            if (side, e) in self._refresh_flags:
                if st.j is not None or st.certified:
                    hits.append((side, e, x, "initialized"))
                else:
                    st.refresh()
                continue
            members = run.a_entry[side].keys()
            broken = any(
                not all((c == "1") == (i in members) for i, c in enumerate(r.axiom.theta))
                for r in st.certified
            )
            if broken:
                hits.append((side, e, x, "a0-change" if side == 0 else "a1-change"))
        for side, e, x, cause in hits:
            self.inputs[(side, e, x)].refresh()
            run.emit(event(s, "injury", cause=cause, req=req_label(side, e), x=x))
        self._refresh_flags.clear()

    # -- results -----------------------------------------------------------------

    def canonical_p(self, j: int, horizon: int) -> list[int]:
        strings = self.registry.sets[j]
        return [self.policy.value(j, strings, t) for t in range(horizon + 1)]

    def cone_truth(self, j: int, at: int) -> int:
        """Whether C at the given stage lies in a cone of W_j's strings."""
        for enum_stage, sigma in self.registry.sets[j]:
            if enum_stage <= at and cone_holds(sigma, self.run.c_entry, at):
                return 1
        return 0

    def final_state(self) -> dict:
        run = self.run
        horizon = run.horizon
        registry_out = {}
        p_ok = True
        for j in range(self.registry.next_j):
            label, x, epoch = self.registry.owner[j]
            p_row = self.canonical_p(j, horizon)
            changes = sum(1 for a, b in zip(p_row, p_row[1:]) if a != b)
            truth = self.cone_truth(j, horizon)
            if p_row[horizon] != truth:
                run.unsettled = True
            if p_row[0] != 0 or changes > self.registry.q(j):
                p_ok = False
            registry_out[str(j)] = {
                "owner": [label, x, epoch],
                "strings": [[u, sig] for u, sig in self.registry.sets[j]],
                "q": self.registry.q(j),
                "p_changes": changes,
                "p_final": p_row[horizon],
                "cone_truth": truth,
            }
        locals_out = {}
        for side, e in self.owners:
            axioms = self.local_axioms[(side, e)]
            locals_out[req_label(side, e)] = {
                "definitions": [
                    {
                        "x": ax.x,
                        "k": ax.k,
                        "theta": ax.theta,
                        "sigma": ax.sigma,
                        "defined_at": ax.defined_at,
                        "live": ax.live and cone_holds(ax.sigma, run.c_entry, horizon),
                    }
                    for ax in axioms
                ],
                "stop_marks": [list(m) for m in self.stop_marks[(side, e)]],
            }
        return {
            "requirements": locals_out,
            "guessing_sets": registry_out,
            "p_contract_ok": p_ok,
        }
