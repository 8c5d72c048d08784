"""Foundational data model for stage-indexed enumerations.

Everything downstream (the construction engine, the strategies, the
verifier) is phrased over four ingredients defined here:

* Cantor pairing on naturals,
* finite oracle strings over {0, 1},
* monotone enumeration schedules (stage-stamped element arrivals), and
* Turing functionals given as finite axiom tables with explicit use.

A functional converges on an input exactly when some axiom whose oracle
string(s) are initial segments of the current oracle set(s) has appeared
by the current stage.  Ties between applicable axioms are broken by the
lexicographically least (use, value) pair, so evaluation is a pure
function of (table, stage, oracles, input).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class ConflictError(ValueError):
    """A functional table contains contradictory axioms.

    Two axioms conflict when their oracle strings are pairwise compatible
    (one an initial segment of the other, coordinate by coordinate), they
    answer the same input, and they disagree on the output bit.
    """

    def __init__(self, pairs: list[tuple["Axiom", "Axiom"]]):
        self.pairs = list(pairs)
        super().__init__("%d conflicting axiom pair(s)" % len(self.pairs))


def pair(a: int, b: int) -> int:
    """Cantor pairing code of (a, b)."""
    if a < 0 or b < 0:
        raise ValueError("pair is defined on naturals")
    return (a + b) * (a + b + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    """Inverse of pair: the unique (a, b) with pair(a, b) == n."""
    if n < 0:
        raise ValueError("unpair is defined on naturals")
    w = (math.isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return (w - b, b)


def check_bits(s: str) -> str:
    """Validate that s is a finite string over {0, 1}; returns s."""
    if not isinstance(s, str) or any(c not in "01" for c in s):
        raise ValueError("oracle strings must consist of 0/1 characters: %r" % (s,))
    return s


@dataclass(frozen=True)
class Snapshot:
    """The finite set of elements enumerated by the end of a stage."""

    members: frozenset[int]
    stage: int


@dataclass(frozen=True)
class EnumerationSchedule:
    """A monotone enumeration: elements stamped with their entry stage.

    Entries are kept sorted by (stage, element).  An element appears at
    most once; once enumerated it never leaves, so the snapshot at stage
    s is simply every element whose stamp is <= s.
    """

    role: str
    entries: tuple[tuple[int, int], ...]

    @staticmethod
    def build(role: str, entries) -> "EnumerationSchedule":
        rows = sorted((int(s), int(x)) for s, x in entries)
        seen: set[int] = set()
        for s, x in rows:
            if s < 0 or x < 0:
                raise ValueError("%s schedule entries must be naturals" % role)
            if x in seen:
                raise ValueError("%s schedule enumerates element %d twice" % (role, x))
            seen.add(x)
        return EnumerationSchedule(role, tuple(rows))

    def entry_stage(self) -> dict[int, int]:
        """Element -> stage-of-entry map."""
        return {x: s for s, x in self.entries}

    def members_at(self, s: int) -> frozenset[int]:
        return frozenset(x for t, x in self.entries if t <= s)


def snapshot(sched: EnumerationSchedule, s: int) -> Snapshot:
    """The schedule's snapshot at stage s."""
    if s < 0:
        raise ValueError("snapshot stage must be a natural")
    return Snapshot(sched.members_at(s), s)


def in_cone(sigma: str, snap: Snapshot) -> bool:
    """True iff sigma is an initial segment of the snapshot's set.

    Position i of sigma must be 1 exactly when i is a member; a 0 bit
    over a present element is as disqualifying as a missing 1 bit.
    """
    members = snap.members
    return all((c == "1") == (i in members) for i, c in enumerate(sigma))


def cone_holds(sigma: str, entry: dict[int, int], s: int) -> bool:
    """in_cone against an element->entry-stage map, at stage s."""
    for i, c in enumerate(sigma):
        st = entry.get(i)
        present = st is not None and st <= s
        if (c == "1") != present:
            return False
    return True


@dataclass(frozen=True)
class Axiom:
    """One oracle axiom: output k on input x over cones theta (and sigma).

    Unary axioms carry only theta.  Binary axioms carry a second string
    sigma of the same length, so a single use bounds both oracles.
    """

    theta: str
    x: int
    k: int
    sigma: str | None = None

    @property
    def use(self) -> int:
        return len(self.theta)

    def validate(self, binary: bool) -> None:
        check_bits(self.theta)
        if self.x < 0:
            raise ValueError("axiom input must be a natural")
        if self.k not in (0, 1):
            raise ValueError("axiom output must be a bit")
        if binary:
            if self.sigma is None:
                raise ValueError("binary axiom lacks its second oracle string")
            check_bits(self.sigma)
            if len(self.sigma) != len(self.theta):
                raise ValueError("binary axiom oracle strings must share one use")
        elif self.sigma is not None:
            raise ValueError("unary axiom carries an unexpected second oracle string")


@dataclass(frozen=True)
class Outcome:
    """Result of evaluating a functional: convergent(k, use) or divergent."""

    converges: bool
    k: int | None = None
    use: int | None = None

    @staticmethod
    def convergent(k: int, use: int) -> "Outcome":
        return Outcome(True, k, use)

    @staticmethod
    def divergent() -> "Outcome":
        return Outcome(False)


class FunctionalTable:
    """A Turing functional as a finite, stage-stamped axiom table.

    Axioms become visible at their appear stage and never retract.  The
    table is indexed by input for evaluation; per input, axioms are kept
    in (use, k) order so the first applicable one is the selected one.
    """

    def __init__(self, side: int, e: int, axioms, binary: bool):
        if side not in (0, 1):
            raise ValueError("functional side must be 0 or 1")
        if e < 0:
            raise ValueError("functional index must be a natural")
        self.side = side
        self.e = e
        self.binary = binary
        rows = []
        for appear, ax in axioms:
            if appear < 0:
                raise ValueError("appear stage must be a natural")
            ax.validate(binary)
            rows.append((int(appear), ax))
        rows.sort(key=lambda r: (r[1].x, r[1].use, r[1].k, r[0]))
        self.axioms: tuple[tuple[int, Axiom], ...] = tuple(rows)
        self._by_x: dict[int, list[tuple[int, Axiom]]] = {}
        for appear, ax in self.axioms:
            self._by_x.setdefault(ax.x, []).append((appear, ax))

    def axioms_for(self, x: int) -> list[tuple[int, Axiom]]:
        return self._by_x.get(x, [])

    def max_input(self) -> int:
        return max(self._by_x) if self._by_x else -1


def _segments(a: str, b: str) -> bool:
    return a == b[: len(a)] or b == a[: len(b)]


def consistency_conflicts(table: FunctionalTable) -> list[tuple[Axiom, Axiom]]:
    """All pairs of axioms that answer one input incompatibly."""
    bad = []
    for x, rows in table._by_x.items():
        for i in range(len(rows)):
            for j in range(i + 1, len(rows)):
                a, b = rows[i][1], rows[j][1]
                if a.k == b.k:
                    continue
                if not _segments(a.theta, b.theta):
                    continue
                if table.binary and not _segments(a.sigma, b.sigma):
                    continue
                bad.append((a, b))
    return bad


def validate_consistency(table: FunctionalTable) -> None:
    """Raise ConflictError unless the table is consistent."""
    bad = consistency_conflicts(table)
    if bad:
        raise ConflictError(bad)


def evaluate(
    table: FunctionalTable,
    s: int,
    oracle_a: Snapshot,
    oracle_c: Snapshot | None,
    x: int,
) -> Outcome:
    """Stage-s evaluation of the functional on input x.

    Applicable means: appeared by stage s, theta an initial segment of
    oracle_a, and (for binary tables) sigma an initial segment of
    oracle_c.  Among applicable axioms the (use, k)-least is selected.
    """
    if table.binary and oracle_c is None:
        raise ValueError("binary functional evaluated without its second oracle")
    if not table.binary and oracle_c is not None:
        raise ValueError("unary functional evaluated with a second oracle")
    got = _applicable_axiom(table, s, oracle_a, oracle_c, x)
    if got is None:
        return Outcome.divergent()
    return Outcome.convergent(got.k, got.use)


def _applicable_axiom(
    table: FunctionalTable,
    s: int,
    oracle_a: Snapshot,
    oracle_c: Snapshot | None,
    x: int,
) -> Axiom | None:
    """The selected axiom behind evaluate, or None; rows are presorted."""
    for appear, ax in table.axioms_for(x):
        if appear > s:
            continue
        if not in_cone(ax.theta, oracle_a):
            continue
        if table.binary and not in_cone(ax.sigma, oracle_c):
            continue
        return ax
    return None
