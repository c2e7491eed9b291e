"""
Module: Probe Message Model

This module defines the probe message shared by agents, the topology manager and the
simulator: the header, the payload entries (or sealed payload segments), and the pure
header rules (TTL advance, classification, append).

Every payload line is terminated by a newline and PAYLOAD-LENGTH counts those bytes, so
a message can only be constructed with a length that matches its payload.
"""

import base64
import binascii
import enum
import re
from dataclasses import dataclass, field, replace

from ._error import error_stack

NONE = 'NONE'
PENDING = 'PENDING'

DEFAULT_TTL_MAX = 32
DISCOVERY_PORT = 7077
PATH_CHECKER_PORT_BASE = 7078

_NAME_PATTERN = re.compile(r'[A-Za-z0-9_.\-/]+')


class ProbeKind(enum.Enum):
    DISCOVERY = 'DISCOVERY'
    PATHCHECK = 'PATHCHECK'


class _Discard:
    """Marker returned by `advance_ttl` once the TTL threshold is reached."""

    def __repr__(self):
        return 'DISCARD'

    def __bool__(self):
        return False


DISCARD = _Discard()


@dataclass(frozen=True)
class ClearPair:
    """Probe-pair identity carried in clear: source and destination interface IPs."""
    src_ip: str
    dst_ip: str

    def __str__(self):
        return f'{self.src_ip}->{self.dst_ip}'


@dataclass(frozen=True)
class Token:
    """Opaque 64-bit probe-pair identity used when header security is on."""
    value: int

    def __post_init__(self):
        if not 0 <= self.value < 2 ** 64:
            error_stack('PROTO-VALUE', f'token {self.value} outside 64 bits')

    def __str__(self):
        return f'TOKEN:{self.value:016x}'


@dataclass(frozen=True)
class PayloadEntry:
    """
    One hop's report: the device and the interfaces the probe used there.

    Attributes:
        device_id (str): Middlebox identifier.
        in_interface (str): Ingress interface, or NONE at the source.
        out_interface (str): Egress interface, PENDING until corrected, or NONE at the destination.
    """
    device_id: str
    in_interface: str = NONE
    out_interface: str = NONE

    def __post_init__(self):
        for value in (self.device_id, self.in_interface, self.out_interface):
            if not isinstance(value, str) or _NAME_PATTERN.fullmatch(value) is None:
                error_stack('PROTO-ENTRY', repr(value))
        if self.in_interface == PENDING:
            error_stack('PROTO-ENTRY', 'in interface cannot be PENDING')

    def to_line(self):
        return f'device={self.device_id};in={self.in_interface};out={self.out_interface}\n'

    @staticmethod
    def from_line(line):
        """
        Parses one ``device=..;in=..;out=..`` line (without its newline).

        Raises:
            BadValue: If the line does not follow the entry grammar.
        """
        parts = line.split(';')
        if len(parts) != 3:
            error_stack('PROTO-ENTRY', line)
        values = {}
        for part, key in zip(parts, ('device', 'in', 'out')):
            name, sep, value = part.partition('=')
            if name != key or not sep:
                error_stack('PROTO-ENTRY', line)
            values[key] = value
        return PayloadEntry(values['device'], values['in'], values['out'])


@dataclass(frozen=True)
class SealedPayload:
    """
    One sealed payload segment.

    Attributes:
        wrapped_blob (bytes): Symmetric key and digest sealed to the controller public key.
        ciphertext (bytes): Nonce followed by the symmetric ciphertext of the entry bytes.
    """
    wrapped_blob: bytes
    ciphertext: bytes

    def to_line(self):
        wrapped = base64.b64encode(self.wrapped_blob).decode('ascii')
        cipher = base64.b64encode(self.ciphertext).decode('ascii')
        return f'seg={wrapped}:{cipher}\n'

    @staticmethod
    def from_line(line):
        if not line.startswith('seg='):
            error_stack('PROTO-ENTRY', line[:32])
        wrapped, sep, cipher = line[4:].partition(':')
        if not sep:
            error_stack('PROTO-ENTRY', line[:32])
        try:
            segment = SealedPayload(base64.b64decode(wrapped, validate=True),
                                    base64.b64decode(cipher, validate=True))
        except (binascii.Error, ValueError):
            error_stack('PROTO-ENTRY', 'segment is not base64')
        if segment.to_line() != line + '\n':
            error_stack('PROTO-ENTRY', 'segment is not canonical base64')
        return segment


def payload_bytes(payload):
    """Returns the encoded payload section for a sequence of entries or segments."""
    return ''.join(item.to_line() for item in payload).encode('ascii')


@dataclass(frozen=True)
class ProbeHeader:
    """
    Probe header fields.

    Attributes:
        probe_ttl (int): Hop counter, 0 at the source agent.
        path_id (int): 0 for discovery probes, >0 for path-checker probes.
        payload_length (int): Byte length of the encoded payload section.
        flag_payload_append (bool): Hops append entries instead of making per-hop up-calls.
        flag_header_sec (bool): The probe-pair identity is an opaque token.
        flag_payload_sec (bool): The payload is a list of sealed segments.
        probe_pair_id (ClearPair or Token): Probe-pair identity.
    """
    probe_ttl: int
    path_id: int
    payload_length: int
    flag_payload_append: bool
    flag_header_sec: bool
    flag_payload_sec: bool
    probe_pair_id: object

    def __post_init__(self):
        for name in ('probe_ttl', 'path_id', 'payload_length'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                error_stack('PROTO-VALUE', f'{name}={value!r}')
        if self.flag_header_sec != isinstance(self.probe_pair_id, Token):
            error_stack('PROTO-PAIR', str(self.probe_pair_id))
        if not isinstance(self.probe_pair_id, (Token, ClearPair)):
            error_stack('PROTO-PAIR', repr(self.probe_pair_id))


@dataclass(frozen=True)
class ProbeMessage:
    """
    A probe: header plus ordered payload.

    The payload is a tuple of `PayloadEntry` or, when `flag_payload_sec` is set, a tuple
    of `SealedPayload` segments (one per sealed hop).
    """
    header: ProbeHeader
    payload: tuple = field(default_factory=tuple)

    def __post_init__(self):
        payload = tuple(self.payload)
        object.__setattr__(self, 'payload', payload)
        expected = SealedPayload if self.header.flag_payload_sec else PayloadEntry
        if any(not isinstance(item, expected) for item in payload):
            error_stack('PROTO-ENTRY', f'payload items must be {expected.__name__}')
        if len(payload_bytes(payload)) != self.header.payload_length:
            error_stack('PROTO-LENGTH', f'declared {self.header.payload_length}')
        if not self.header.flag_payload_append and len(payload) > 1:
            error_stack('PROTO-SINGLE', f'{len(payload)} entries')
        if expected is PayloadEntry:
            _check_entry_order(payload)

    @property
    def kind(self):
        return classify_probe(self.header)

    @property
    def entries(self):
        """Clear payload entries; empty for sealed payloads."""
        return () if self.header.flag_payload_sec else self.payload


def _check_entry_order(entries):
    for index, entry in enumerate(entries):
        if (entry.in_interface == NONE) != (index == 0):
            error_stack('PROTO-ENTRY-ORDER', f'entry {index} in={entry.in_interface}')
        if entry.out_interface == NONE and index != len(entries) - 1:
            error_stack('PROTO-ENTRY-ORDER', f'entry {index} out=NONE before the end')


def build_probe(probe_pair_id, payload=(), probe_ttl=0, path_id=0, append=False,
                header_sec=False, payload_sec=False):
    """
    Builds a probe whose PAYLOAD-LENGTH matches `payload`.

    Args:
        probe_pair_id (ClearPair or Token): Probe-pair identity.
        payload (sequence): Entries or sealed segments.
        probe_ttl (int): Initial TTL. Defaults to 0.
        path_id (int): 0 for discovery probes.
        append (bool): Payload-append flag.
        header_sec (bool): Header security flag, must agree with the identity form.
        payload_sec (bool): Payload security flag.

    Returns:
        ProbeMessage: The new probe.
    """
    payload = tuple(payload)
    header = ProbeHeader(
        probe_ttl=probe_ttl,
        path_id=path_id,
        payload_length=len(payload_bytes(payload)),
        flag_payload_append=append,
        flag_header_sec=header_sec,
        flag_payload_sec=payload_sec,
        probe_pair_id=probe_pair_id,
    )
    return ProbeMessage(header, payload)


def with_payload(msg, payload):
    """Returns `msg` carrying `payload`, with PAYLOAD-LENGTH recomputed."""
    payload = tuple(payload)
    header = replace(msg.header, payload_length=len(payload_bytes(payload)))
    return ProbeMessage(header, payload)


def advance_ttl(header, max_threshold=DEFAULT_TTL_MAX):
    """
    Increments the probe TTL by one hop.

    Args:
        header (ProbeHeader): Current header.
        max_threshold (int): Configured TTL threshold, at least 1.

    Returns:
        ProbeHeader or DISCARD: The advanced header, or DISCARD once the threshold is reached.
    """
    if max_threshold < 1:
        error_stack('PROTO-TTL-THRESHOLD', str(max_threshold))
    ttl = header.probe_ttl + 1
    if ttl >= max_threshold:
        return DISCARD
    return replace(header, probe_ttl=ttl)


def classify_probe(header):
    """Discovery probes carry path-id 0; anything else is a path-checker probe."""
    return ProbeKind.DISCOVERY if header.path_id == 0 else ProbeKind.PATHCHECK


def append_entry(msg, entry):
    """
    Appends this hop's entry at the tail of an append-mode probe.

    Raises:
        AppendOnNonAppendProbe: If the payload-append flag is clear.
        BadValue: If the payload is sealed; use `append_segment` instead.
    """
    if not msg.header.flag_payload_append:
        error_stack('PROTO-APPEND', str(msg.header.probe_pair_id))
    if msg.header.flag_payload_sec:
        error_stack('PROTO-APPEND-SEALED')
    return with_payload(msg, msg.payload + (entry,))


def append_segment(msg, segment):
    """Appends a sealed hop segment to an append-mode probe with payload security."""
    if not msg.header.flag_payload_append:
        error_stack('PROTO-APPEND', str(msg.header.probe_pair_id))
    if not msg.header.flag_payload_sec:
        error_stack('PROTO-VALUE', 'segment on a clear payload')
    return with_payload(msg, msg.payload + (segment,))


def probe_port(header):
    """Transport port the probe is addressed to; path-checker ports encode the path-id."""
    if header.path_id == 0:
        return DISCOVERY_PORT
    return PATH_CHECKER_PORT_BASE + header.path_id
