"""Trace serialization and replay verification.

Format: JSON Lines. The first line is a metadata object; every further
line is one slot:

    {"meta": {"n": 4, "cd": false, "protocol": ..., "seed": ..., ...}}
    {"slot": 0, "actions": {"0": "L", "1": ["b", "beacon"]}, "feedback": {"0": ["m", "beacon"]}}

Actions: "L" listen, "I" idle, ["b", kind(, payload)] broadcast.
Feedback: "S" silence, "N" noise, ["m", kind(, payload)] received.

replay_verify re-derives every listener's feedback from the recorded
actions through the channel rules and compares, and re-checks the
structural slot properties (half-duplex, no noise without collision
detection), so a stored trace proves the run obeyed the model.
"""

from __future__ import annotations

import json
from typing import Optional

from .engine import Trace, resolve_channel
from .messages import (
    IDLE,
    LISTEN,
    NOISE,
    decode_action,
    decode_feedback,
    encode_action,
    encode_feedback,
)
from .topology import Topology


class TraceFormatError(ValueError):
    pass


class ReplayMismatch(AssertionError):
    pass


def dump_trace(trace: Trace, fh, meta: Optional[dict] = None) -> None:
    fh.write(json.dumps({"meta": meta or {}}, sort_keys=True) + "\n")
    for k, (actions, feedback) in enumerate(trace.slots):
        obj = {
            "slot": k,
            "actions": {str(u): encode_action(a) for u, a in actions.items()},
            "feedback": {str(u): encode_feedback(f) for u, f in feedback.items()},
        }
        fh.write(json.dumps(obj, sort_keys=True) + "\n")


def load_trace(fh) -> tuple[dict, Trace]:
    first = fh.readline()
    if not first:
        raise TraceFormatError("empty trace file")
    head = json.loads(first)
    if "meta" not in head:
        raise TraceFormatError("first line must be the metadata object")
    trace = Trace()
    expect = 0
    for line in fh:
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if obj.get("slot") != expect:
            raise TraceFormatError(f"slot {expect} missing or out of order")
        actions = {int(u): decode_action(a) for u, a in obj["actions"].items()}
        feedback = {int(u): decode_feedback(f)
                    for u, f in obj["feedback"].items()}
        trace.slots.append((actions, feedback))
        expect += 1
    return head["meta"], trace


def replay_verify(trace: Trace, topology: Topology, cd: bool) -> None:
    """Raise ReplayMismatch unless the trace is internally consistent
    with the channel rules on this topology."""
    for k, (actions, feedback) in enumerate(trace.slots):
        listeners = {u for u, a in actions.items() if a is LISTEN}
        broadcasters = {u: a.message for u, a in actions.items()
                        if a is not LISTEN and a is not IDLE}
        if set(feedback) != listeners:
            raise ReplayMismatch(
                f"slot {k}: feedback keys {sorted(feedback)} != listeners "
                f"{sorted(listeners)}")
        overlap = listeners & set(broadcasters)
        if overlap:
            raise ReplayMismatch(f"slot {k}: nodes {sorted(overlap)} both "
                                 "broadcast and listen")
        for u in listeners:
            local = {(v, m) for v, m in broadcasters.items()
                     if topology.adjacent(u, v)}
            want = resolve_channel(u, local, cd)
            got = feedback[u]
            if want != got:
                raise ReplayMismatch(
                    f"slot {k}: listener {u} recorded {got!r}, channel "
                    f"rules give {want!r}")
            if not cd and got is NOISE:
                raise ReplayMismatch(f"slot {k}: noise without collision "
                                     "detection")
