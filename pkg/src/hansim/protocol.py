"""Node<->master wire protocol: one pipe-delimited ASCII line per message.

The master splits each line on the delimiter and dispatches on the leading
tag, so encode/decode are exact inverses on valid messages and decode rejects
anything else with a structured error instead of guessing.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from .domain import LoadClass
from .errors import HansimError

DELIM = "|"

_TOKEN_RE = re.compile(r"^[^|\s]+$")


class ProtocolError(HansimError):
    pass


class InvalidMessage(ProtocolError):
    pass


class EmptyLine(ProtocolError):
    pass


class UnknownTag(ProtocolError):
    pass


class FieldCount(ProtocolError):
    pass


class FieldParse(ProtocolError):
    def __init__(self, position: int, expected: str, got: str):
        super().__init__(f"field {position}: expected {expected}, got {got!r}")
        self.position = position
        self.expected = expected
        self.got = got


class Action(Enum):
    ON = "ON"
    OFF = "OFF"


@dataclass(frozen=True)
class ConfigLog:
    """Node -> master: the consumer's logged class and window for one load."""

    node_id: str
    load_class: LoadClass
    alpha: int
    beta: int
    gamma_minutes: int
    rated_kw: float


@dataclass(frozen=True)
class Telemetry:
    """Node -> master: measured electrical state at the end of an interval."""

    node_id: str
    timestamp: float
    vrms: float
    irms: float
    real_power: float
    power_factor: float
    relay: Action


@dataclass(frozen=True)
class Command:
    """Master -> node: switch the relay."""

    node_id: str
    action: Action
    issued_at: float


@dataclass(frozen=True)
class Ack:
    """Node -> master: receipt for a config or command (delivery accounting only)."""

    node_id: str
    ref_kind: str  # "CFG" or "CMD"
    status: str


Message = ConfigLog | Telemetry | Command | Ack


def format_number(x: float | int) -> str:
    """Shortest exact rendering: integral values without a trailing '.0'."""
    if isinstance(x, int):
        return str(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _check_token(value: str, what: str) -> str:
    if not isinstance(value, str) or not _TOKEN_RE.match(value):
        raise InvalidMessage(f"{what} must be a non-empty token without '{DELIM}' or whitespace: {value!r}")
    return value


def _check_finite(x: float, what: str) -> float:
    if not math.isfinite(x):
        raise InvalidMessage(f"{what} must be finite, got {x!r}")
    return x


def encode(msg: Message) -> str:
    """Render a message as its wire line, newline-terminated."""
    if isinstance(msg, ConfigLog):
        _check_token(msg.node_id, "node_id")
        _check_finite(msg.rated_kw, "rated_kw")
        if msg.rated_kw < 0:
            raise InvalidMessage(f"rated_kw must be >= 0, got {msg.rated_kw}")
        if msg.load_class.schedulable:
            # Horizon-free subset of the window rules; full validation happens
            # at registration where the time model is known.
            if msg.alpha < 0 or msg.alpha > msg.beta:
                raise InvalidMessage(f"bad window [{msg.alpha}, {msg.beta}]")
            if msg.gamma_minutes <= 0:
                raise InvalidMessage(f"gamma must be positive, got {msg.gamma_minutes}")
        elif (msg.alpha, msg.beta, msg.gamma_minutes) != (0, 0, 0):
            raise InvalidMessage("NINSL config lines must carry the (0,0,0) triple")
        fields = ["CFG", msg.node_id, msg.load_class.value,
                  str(msg.alpha), str(msg.beta), str(msg.gamma_minutes),
                  format_number(msg.rated_kw)]
    elif isinstance(msg, Telemetry):
        _check_token(msg.node_id, "node_id")
        for what, x in (("timestamp", msg.timestamp), ("vrms", msg.vrms),
                        ("irms", msg.irms), ("real_power", msg.real_power),
                        ("power_factor", msg.power_factor)):
            _check_finite(x, what)
        fields = ["TEL", msg.node_id, format_number(msg.timestamp),
                  format_number(msg.vrms), format_number(msg.irms),
                  format_number(msg.real_power), format_number(msg.power_factor),
                  msg.relay.value]
    elif isinstance(msg, Command):
        _check_token(msg.node_id, "node_id")
        _check_finite(msg.issued_at, "issued_at")
        fields = ["CMD", msg.node_id, msg.action.value, format_number(msg.issued_at)]
    elif isinstance(msg, Ack):
        _check_token(msg.node_id, "node_id")
        if msg.ref_kind not in ("CFG", "CMD"):
            raise InvalidMessage(f"ref_kind must be CFG or CMD, got {msg.ref_kind!r}")
        _check_token(msg.status, "status")
        fields = ["ACK", msg.node_id, msg.ref_kind, msg.status]
    else:
        raise InvalidMessage(f"not a protocol message: {msg!r}")
    return DELIM.join(fields) + "\n"


_FIELD_COUNTS = {"CFG": 7, "TEL": 8, "CMD": 4, "ACK": 4}


def _parse_token(fields: list[str], pos: int, what: str) -> str:
    if not _TOKEN_RE.match(fields[pos]):
        raise FieldParse(pos, f"{what} token", fields[pos])
    return fields[pos]


def _parse_int(fields: list[str], pos: int, what: str) -> int:
    try:
        return int(fields[pos], 10)
    except ValueError:
        raise FieldParse(pos, f"{what} integer", fields[pos]) from None


def _parse_float(fields: list[str], pos: int, what: str) -> float:
    try:
        x = float(fields[pos])
    except ValueError:
        raise FieldParse(pos, f"{what} number", fields[pos]) from None
    if not math.isfinite(x):
        raise FieldParse(pos, f"finite {what}", fields[pos])
    return x


def _parse_class(fields: list[str], pos: int) -> LoadClass:
    try:
        return LoadClass(fields[pos])
    except ValueError:
        raise FieldParse(pos, "load class (NINSL/NISL/ISL)", fields[pos]) from None


def _parse_action(fields: list[str], pos: int) -> Action:
    try:
        return Action(fields[pos])
    except ValueError:
        raise FieldParse(pos, "action (ON/OFF)", fields[pos]) from None


def decode(line: str | bytes) -> Message:
    """Parse one wire line back into a message.

    Total over arbitrary input: anything that is not the exact image of
    encode() raises a ProtocolError subclass, never an unstructured crash.
    """
    if isinstance(line, (bytes, bytearray)):
        line = bytes(line).decode("utf-8", errors="replace")
    if line.endswith("\n"):
        line = line[:-1]
    if line.endswith("\r"):
        line = line[:-1]
    if not line.strip():
        raise EmptyLine("blank line")
    fields = line.split(DELIM)
    tag = fields[0]
    expected = _FIELD_COUNTS.get(tag)
    if expected is None:
        raise UnknownTag(f"unknown message tag {tag!r}")
    if len(fields) != expected:
        raise FieldCount(f"{tag} needs {expected} fields, got {len(fields)}")
    node_id = _parse_token(fields, 1, "node_id")
    if tag == "CFG":
        return ConfigLog(
            node_id=node_id,
            load_class=_parse_class(fields, 2),
            alpha=_parse_int(fields, 3, "alpha"),
            beta=_parse_int(fields, 4, "beta"),
            gamma_minutes=_parse_int(fields, 5, "gamma"),
            rated_kw=_parse_float(fields, 6, "rated_kw"),
        )
    if tag == "TEL":
        return Telemetry(
            node_id=node_id,
            timestamp=_parse_float(fields, 2, "timestamp"),
            vrms=_parse_float(fields, 3, "vrms"),
            irms=_parse_float(fields, 4, "irms"),
            real_power=_parse_float(fields, 5, "real_power"),
            power_factor=_parse_float(fields, 6, "power_factor"),
            relay=_parse_action(fields, 7),
        )
    if tag == "CMD":
        return Command(
            node_id=node_id,
            action=_parse_action(fields, 2),
            issued_at=_parse_float(fields, 3, "issued_at"),
        )
    if fields[2] not in ("CFG", "CMD"):
        raise FieldParse(2, "ref_kind (CFG/CMD)", fields[2])
    return Ack(
        node_id=node_id,
        ref_kind=fields[2],
        status=_parse_token(fields, 3, "status"),
    )
