"""
Module: Probe Protocol

Probe message model, text wire codec and controller API messages.
"""

from .message import (
    DEFAULT_TTL_MAX,
    DISCARD,
    NONE,
    PENDING,
    ClearPair,
    PayloadEntry,
    ProbeHeader,
    ProbeKind,
    ProbeMessage,
    SealedPayload,
    Token,
    advance_ttl,
    append_entry,
    append_segment,
    build_probe,
    classify_probe,
    probe_port,
    with_payload,
)
from .codec import canonical_auth_fields, decode_message, encode_message
from ._error import AppendOnNonAppendProbe, BadValue, LengthMismatch, MalformedHeader, ProtocolError
