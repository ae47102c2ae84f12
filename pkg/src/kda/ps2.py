"""PS/2 scan-code set 2 byte-stream decoding.

A keyboard sends the make code of a key when it goes down and the same
code prefixed by 0xF0 (the break prefix) when it comes up. Extended
keys carry an additional 0xE0 prefix on both make and break. While a
key is held the keyboard re-sends its make code (typematic repeat);
those repeats carry no new timing information and are collapsed to the
first press.

The decoder is keymap-agnostic: any non-prefix byte is a valid code,
and key identity is the (code, extended) pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from kda.core import KeystrokeSample

BREAK_PREFIX = 0xF0
EXTENDED_PREFIX = 0xE0


class Ps2StreamError(ValueError):
    """Structurally broken byte stream (truncated after a prefix)."""


class Ps2PairingError(ValueError):
    """Press/release events that cannot be paired into keystrokes."""


@dataclass(frozen=True)
class Ps2Event:
    code: int
    extended: bool
    kind: str  # "press" | "release"
    timestamp: int

    def __post_init__(self) -> None:
        if not (0 <= self.code <= 0xFF):
            raise ValueError(f"code out of byte range: {self.code:#x}")
        if self.kind not in ("press", "release"):
            raise ValueError(f"unknown event kind {self.kind!r}")


def decode_ps2_stream(stream: Iterable[tuple[int, int]]) -> list[Ps2Event]:
    """Turn (byte, timestamp) pairs into press/release events.

    Timestamps are taken from the byte that completes an event (the
    code byte, not its prefixes). Raises Ps2StreamError if the stream
    ends with a dangling 0xE0/0xF0 prefix.
    """
    events: list[Ps2Event] = []
    held: set[tuple[int, bool]] = set()
    extended = False
    breaking = False
    for byte, timestamp in stream:
        if not (0 <= byte <= 0xFF):
            raise Ps2StreamError(f"byte out of range: {byte:#x}")
        if byte == EXTENDED_PREFIX:
            extended = True
            continue
        if byte == BREAK_PREFIX:
            breaking = True
            continue
        key = (byte, extended)
        if breaking:
            events.append(
                Ps2Event(code=byte, extended=extended, kind="release", timestamp=timestamp)
            )
            held.discard(key)
        elif key in held:
            pass  # typematic repeat of a held key
        else:
            events.append(
                Ps2Event(code=byte, extended=extended, kind="press", timestamp=timestamp)
            )
            held.add(key)
        extended = False
        breaking = False
    if extended or breaking:
        prefix = "0xE0" if extended else "0xF0"
        raise Ps2StreamError(f"stream truncated after {prefix} prefix")
    return events


def encode_ps2_events(events: Sequence[Ps2Event]) -> list[tuple[int, int]]:
    """Inverse of decode_ps2_stream for well-formed event lists.

    Prefix bytes share the timestamp of their code byte, matching how
    the decoder assigns times.
    """
    stream: list[tuple[int, int]] = []
    for ev in events:
        if ev.extended:
            stream.append((EXTENDED_PREFIX, ev.timestamp))
        if ev.kind == "release":
            stream.append((BREAK_PREFIX, ev.timestamp))
        stream.append((ev.code, ev.timestamp))
    return stream


def ps2_events_to_sample(events: Sequence[Ps2Event], label: str = "unlabeled") -> KeystrokeSample:
    """Pair press/release events into a keystroke sample.

    Keys are matched by (code, extended) identity, so rollover across
    different keys is fine. A release with no open press, a second
    press of an already-open key, or presses left open at the end of
    the stream all raise Ps2PairingError.
    """
    open_presses: dict[tuple[int, bool], int] = {}
    pairs: list[tuple[int, int]] = []
    for ev in events:
        key = (ev.code, ev.extended)
        if ev.kind == "press":
            if key in open_presses:
                raise Ps2PairingError(f"second press of held key {ev.code:#04x} at {ev.timestamp}")
            open_presses[key] = ev.timestamp
        else:
            if key not in open_presses:
                raise Ps2PairingError(f"release without press for key {ev.code:#04x} at {ev.timestamp}")
            pairs.append((open_presses.pop(key), ev.timestamp))
    if open_presses:
        codes = ", ".join(f"{code:#04x}" for code, _ in sorted(open_presses))
        raise Ps2PairingError(f"unmatched press at stream end: {codes}")
    pairs.sort()
    return KeystrokeSample(
        presses=tuple(p for p, _ in pairs),
        releases=tuple(r for _, r in pairs),
        label=label,
    )
