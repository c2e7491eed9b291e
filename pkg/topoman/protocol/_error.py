"""
Protocol Error Handling Module
------------------------------

Errors raised while building, encoding and decoding probe messages and controller API
messages.

Classes:
--------
ProtocolError
    Base of all protocol errors.
MalformedHeader
    A required header key is missing or duplicated, or an unknown key is present.
LengthMismatch
    The declared payload length differs from the payload bytes carried.
BadValue
    A field value cannot be parsed or violates a message invariant.
AppendOnNonAppendProbe
    An entry was appended to a probe without the payload-append flag.
"""

from ..error.error import ErrorStack, TopoManError


class ProtocolError(TopoManError, ValueError):
    """Base class for probe and API message errors."""


class MalformedHeader(ProtocolError):
    """Missing, duplicated or unknown header key."""


class LengthMismatch(ProtocolError):
    """Declared PAYLOAD-LENGTH does not match the payload section."""


class BadValue(ProtocolError):
    """Unparseable or inconsistent field value."""


class AppendOnNonAppendProbe(ProtocolError):
    """Appending to a probe whose payload-append flag is clear."""


_module_name = 'PROTO'

error_stack = ErrorStack({
    f'{_module_name}-HDR-MISSING': dict(type=MalformedHeader, info='Required header key missing'),
    f'{_module_name}-HDR-DUPLICATE': dict(type=MalformedHeader, info='Header key repeated'),
    f'{_module_name}-HDR-UNKNOWN': dict(type=MalformedHeader, info='Unknown header key'),
    f'{_module_name}-HDR-START': dict(type=MalformedHeader, info='Bad start line'),
    f'{_module_name}-HDR-KIND': dict(type=MalformedHeader, info='Start line kind disagrees with PATH-ID'),
    f'{_module_name}-HDR-ORDER': dict(type=MalformedHeader, info='Header keys out of order'),
    f'{_module_name}-HDR-NOBODY': dict(type=MalformedHeader, info='Missing blank line before payload'),
    f'{_module_name}-HDR-SPACING': dict(type=MalformedHeader, info='Header value not separated by exactly one space'),
    f'{_module_name}-LENGTH': dict(type=LengthMismatch, info='Payload length mismatch'),
    f'{_module_name}-VALUE': dict(type=BadValue, info='Bad field value'),
    f'{_module_name}-ENCODING': dict(type=BadValue, info='Message is not ASCII text'),
    f'{_module_name}-ENTRY': dict(type=BadValue, info='Malformed payload entry'),
    f'{_module_name}-ENTRY-ORDER': dict(type=BadValue, info='Payload entry order violated'),
    f'{_module_name}-FLAGS': dict(type=BadValue, info='Bad flag set'),
    f'{_module_name}-PAIR': dict(type=BadValue, info='Probe-pair-ID disagrees with header-sec flag'),
    f'{_module_name}-SINGLE': dict(type=BadValue, info='Non-append probe carries more than one entry'),
    f'{_module_name}-TTL-THRESHOLD': dict(type=BadValue, info='TTL threshold must be at least 1'),
    f'{_module_name}-APPEND': dict(type=AppendOnNonAppendProbe, info='Probe does not carry the append flag'),
    f'{_module_name}-APPEND-SEALED': dict(type=BadValue, info='Sealed payloads take segments, not entries'),
    f'{_module_name}-API-NAME': dict(type=MalformedHeader, info='Unknown API message'),
    f'{_module_name}-API-FIELD': dict(type=MalformedHeader, info='API message field missing'),
})
