"""Per-slot actions, messages, and channel feedback.

Every active node emits exactly one action per slot: broadcast a message,
listen, or idle. A node cannot broadcast and listen in the same slot
(half-duplex radio). Listeners receive one Feedback value per slot;
broadcasters and idle nodes receive nothing.

Actions and feedback are compared by identity in hot paths, so the
module exports interned singletons (LISTEN, IDLE, SILENCE, NOISE) and
pre-built Broadcast constants for the common payload-free messages.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Union


class MessageKind(IntEnum):
    BEACON = 0
    STOP = 1
    INFORMED = 2
    OVER_EST = 3
    UNDER_EST = 4
    CONTINUE = 5
    SILENCE_ECHO = 6
    NOISE_ECHO = 7


_KIND_NAMES = {k: k.name.lower() for k in MessageKind}
_KIND_BY_NAME = {v: k for k, v in _KIND_NAMES.items()}


@dataclass(frozen=True, slots=True)
class Message:
    kind: MessageKind
    payload: Optional[int] = None


@dataclass(frozen=True, slots=True)
class Broadcast:
    message: Message


class _Listen:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Listen"


class _Idle:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Idle"


LISTEN = _Listen()
IDLE = _Idle()

SlotAction = Union[Broadcast, _Listen, _Idle]


class _Silence:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Silence"


class _Noise:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Noise"


@dataclass(frozen=True, slots=True)
class Received:
    message: Message


SILENCE = _Silence()
NOISE = _Noise()

Feedback = Union[_Silence, _Noise, Received]

# Interned broadcasts for the payload-free protocol vocabulary.
MSG_BEACON = Message(MessageKind.BEACON)
MSG_STOP = Message(MessageKind.STOP)
MSG_INFORMED = Message(MessageKind.INFORMED)
MSG_OVER_EST = Message(MessageKind.OVER_EST)
MSG_UNDER_EST = Message(MessageKind.UNDER_EST)
MSG_CONTINUE = Message(MessageKind.CONTINUE)
MSG_SILENCE_ECHO = Message(MessageKind.SILENCE_ECHO)
MSG_NOISE_ECHO = Message(MessageKind.NOISE_ECHO)

BCAST_BEACON = Broadcast(MSG_BEACON)
BCAST_STOP = Broadcast(MSG_STOP)
BCAST_INFORMED = Broadcast(MSG_INFORMED)
BCAST_OVER_EST = Broadcast(MSG_OVER_EST)
BCAST_UNDER_EST = Broadcast(MSG_UNDER_EST)
BCAST_CONTINUE = Broadcast(MSG_CONTINUE)
BCAST_SILENCE_ECHO = Broadcast(MSG_SILENCE_ECHO)
BCAST_NOISE_ECHO = Broadcast(MSG_NOISE_ECHO)


def received_kind(fb: Optional[Feedback]) -> Optional[MessageKind]:
    """Kind of the received message, or None for silence/noise/no feedback."""
    if type(fb) is Received:
        return fb.message.kind
    return None


def encode_action(action: SlotAction):
    """JSON-friendly encoding: "L", "I", or ["b", kind] / ["b", kind, payload]."""
    if action is LISTEN:
        return "L"
    if action is IDLE:
        return "I"
    msg = action.message
    if msg.payload is None:
        return ["b", _KIND_NAMES[msg.kind]]
    return ["b", _KIND_NAMES[msg.kind], msg.payload]


def decode_action(obj) -> SlotAction:
    if obj == "L":
        return LISTEN
    if obj == "I":
        return IDLE
    kind = _KIND_BY_NAME[obj[1]]
    payload = obj[2] if len(obj) > 2 else None
    return Broadcast(Message(kind, payload))


def encode_feedback(fb: Feedback):
    """JSON-friendly encoding: "S", "N", or ["m", kind] / ["m", kind, payload]."""
    if fb is SILENCE:
        return "S"
    if fb is NOISE:
        return "N"
    msg = fb.message
    if msg.payload is None:
        return ["m", _KIND_NAMES[msg.kind]]
    return ["m", _KIND_NAMES[msg.kind], msg.payload]


def decode_feedback(obj) -> Feedback:
    if obj == "S":
        return SILENCE
    if obj == "N":
        return NOISE
    kind = _KIND_BY_NAME[obj[1]]
    payload = obj[2] if len(obj) > 2 else None
    return Received(Message(kind, payload))
