"""Run traces: one structured event per line, bit-exact and replayable.

The trace is the verification substrate: every check the verifier runs is
recomputed from trace lines plus the scenario document, never from engine
internals.  Serialization is therefore deliberately rigid; stage first,
kind second, remaining payload keys in lexicographic order, tab-separated
key=value pairs.  Two runs of the same scenario must produce byte-equal
trace text.
"""

from __future__ import annotations

from dataclasses import dataclass, field

KINDS = (
    "enumerate",
    "route",
    "initialize",
    "act",
    "expansionary",
    "diagonalize",
    "certify",
    "refuse-certify",
    "define-local",
    "restraint-set",
    "assignment-update",
    "injury",
)


class TraceParseError(ValueError):
    """A trace line does not follow the serialized event grammar."""


@dataclass(frozen=True)
class TraceEvent:
    stage: int
    kind: str
    payload: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("unknown trace event kind %r" % (self.kind,))
        for key, value in self.payload.items():
            for text, what in ((key, "key"), (value, "value")):
                if not isinstance(text, str):
                    raise ValueError("payload %s must be a string" % what)
                if "\t" in text or "\n" in text:
                    raise ValueError("payload %s %r breaks the line grammar" % (what, text))
            if not key or "=" in key:
                raise ValueError("payload key %r breaks the line grammar" % (key,))

    def to_line(self) -> str:
        parts = ["stage=%d" % self.stage, "kind=%s" % self.kind]
        parts += ["%s=%s" % (k, self.payload[k]) for k in sorted(self.payload)]
        return "\t".join(parts)


def event(stage: int, kind: str, **payload) -> TraceEvent:
    """Build an event, stringifying payload values."""
    return TraceEvent(stage, kind, {k: str(v) for k, v in payload.items()})


def parse_line(line: str) -> TraceEvent:
    fields = line.rstrip("\n").split("\t")
    if len(fields) < 2:
        raise TraceParseError("truncated trace line: %r" % (line,))
    payload: dict[str, str] = {}
    keys = []
    for i, chunk in enumerate(fields):
        if "=" not in chunk:
            raise TraceParseError("malformed field %r" % (chunk,))
        key, value = chunk.split("=", 1)
        if i == 0:
            if key != "stage":
                raise TraceParseError("trace line must start with its stage")
            try:
                stage = int(value)
            except ValueError as err:
                raise TraceParseError("bad stage %r" % (value,)) from err
        elif i == 1:
            if key != "kind":
                raise TraceParseError("second field must be the event kind")
            kind = value
        else:
            if key in payload:
                raise TraceParseError("duplicate payload key %r" % (key,))
            payload[key] = value
            keys.append(key)
    if keys != sorted(keys):
        raise TraceParseError("payload keys out of order in %r" % (line,))
    if kind not in KINDS:
        raise TraceParseError("unknown event kind %r" % (kind,))
    return TraceEvent(stage, kind, payload)


def render(events) -> str:
    """The full trace text: one line per event, newline-terminated."""
    return "".join(ev.to_line() + "\n" for ev in events)


def parse(text: str) -> list[TraceEvent]:
    return [parse_line(line) for line in text.splitlines() if line]
