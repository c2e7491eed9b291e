"""
Module: Probe Text Codec

Line-oriented ASCII encoding of probe messages::

    TOPOMAN/1 DISCOVERY
    PROBE-TTL: 0
    PATH-ID: 0
    PAYLOAD-LENGTH: 28
    FLAGS: APPEND
    PROBE-PAIR-ID: 10.0.0.1->10.0.0.9

    device=fw1;in=NONE;out=eth1

Header keys appear once each, in the fixed order above. FLAGS lists the set flags
(APPEND, HDRSEC, PAYSEC) comma separated; an empty value means all clear. The payload
section holds one entry line per hop, or one ``seg=<b64>:<b64>`` line per sealed
segment when PAYSEC is set.

Only the canonical form decodes: one space after each colon, decimals without leading
zeros, lowercase token digits and dotted quads as `ipaddress` prints them. Re-encoding a
decoded probe therefore reproduces its bytes.
"""

import ipaddress
import re
from functools import lru_cache

from ._error import error_stack
from .message import (
    ClearPair,
    PayloadEntry,
    ProbeHeader,
    ProbeKind,
    ProbeMessage,
    SealedPayload,
    Token,
    classify_probe,
    payload_bytes,
)

MAGIC = 'TOPOMAN/1'
HEADER_KEYS = ('PROBE-TTL', 'PATH-ID', 'PAYLOAD-LENGTH', 'FLAGS', 'PROBE-PAIR-ID')
FLAG_TOKENS = ('APPEND', 'HDRSEC', 'PAYSEC')
_TOKEN_DIGITS = re.compile(r'[0-9a-f]{16}')
_DECIMAL = re.compile(r'0|[1-9][0-9]*')


def encode_flags(append, header_sec, payload_sec):
    tokens = [token for token, on in zip(FLAG_TOKENS, (append, header_sec, payload_sec)) if on]
    return ','.join(tokens)


def decode_flags(value):
    tokens = [token for token in value.split(',')] if value else []
    flags = tuple(token in tokens for token in FLAG_TOKENS)
    if any(token not in FLAG_TOKENS for token in tokens) or encode_flags(*flags) != value:
        error_stack('PROTO-FLAGS', value)
    return flags


def encode_pair(pair):
    return str(pair)


def decode_pair(value):
    """Parses ``a.b.c.d->e.f.g.h`` or ``TOKEN:<16 hex digits>``."""
    if value.startswith('TOKEN:'):
        digits = value[len('TOKEN:'):]
        if _TOKEN_DIGITS.fullmatch(digits) is None:
            error_stack('PROTO-VALUE', value)
        return Token(int(digits, 16))
    src, sep, dst = value.partition('->')
    if not sep:
        error_stack('PROTO-VALUE', value)
    if not (_is_dotted_quad(src) and _is_dotted_quad(dst)):
        error_stack('PROTO-VALUE', value)
    return ClearPair(src, dst)


@lru_cache(maxsize=65536)
def _is_dotted_quad(text):
    try:
        return str(ipaddress.IPv4Address(text)) == text
    except ipaddress.AddressValueError:
        return False


def canonical_auth_fields(probe_pair_id, header_sec, payload_sec, append):
    """
    Canonical bytes of the header subset bound into the payload digest.

    The FLAGS and PROBE-PAIR-ID lines exactly as they appear on the wire.
    """
    return (f'FLAGS: {encode_flags(append, header_sec, payload_sec)}\n'
            f'PROBE-PAIR-ID: {encode_pair(probe_pair_id)}\n').encode('ascii')


def encode_message(msg):
    """
    Encodes a probe message to its wire bytes.

    Args:
        msg (ProbeMessage): The message.

    Returns:
        bytes: Deterministic text encoding.
    """
    header = msg.header
    body = payload_bytes(msg.payload)
    lines = [
        f'{MAGIC} {classify_probe(header).value}',
        f'PROBE-TTL: {header.probe_ttl}',
        f'PATH-ID: {header.path_id}',
        f'PAYLOAD-LENGTH: {len(body)}',
        f'FLAGS: {encode_flags(header.flag_payload_append, header.flag_header_sec, header.flag_payload_sec)}',
        f'PROBE-PAIR-ID: {encode_pair(header.probe_pair_id)}',
        '',
    ]
    return '\n'.join(lines).encode('ascii') + b'\n' + body


def _parse_int(key, value):
    if _DECIMAL.fullmatch(value) is None:
        error_stack('PROTO-VALUE', f'{key}: {value}')
    return int(value)


def decode_message(data):
    """
    Decodes wire bytes into a probe message.

    Args:
        data (bytes): Encoded message.

    Returns:
        ProbeMessage: The decoded message.

    Raises:
        MalformedHeader: Missing, duplicated, unknown or misordered header keys.
        LengthMismatch: PAYLOAD-LENGTH differs from the payload bytes.
        BadValue: Unparseable values or invalid entries.
    """
    try:
        text = data.decode('ascii')
    except (UnicodeDecodeError, AttributeError):
        error_stack('PROTO-ENCODING')
    head, sep, body = text.partition('\n\n')
    if not sep:
        error_stack('PROTO-HDR-NOBODY')
    lines = head.split('\n')
    magic, _, kind = lines[0].partition(' ')
    if magic != MAGIC or kind not in (ProbeKind.DISCOVERY.value, ProbeKind.PATHCHECK.value):
        error_stack('PROTO-HDR-START', lines[0])
    fields = {}
    for line in lines[1:]:
        key, colon, value = line.partition(':')
        if not colon:
            error_stack('PROTO-HDR-UNKNOWN', line)
        if not value.startswith(' ') or value[1:] != value[1:].strip():
            error_stack('PROTO-HDR-SPACING', line)
        if key not in HEADER_KEYS:
            error_stack('PROTO-HDR-UNKNOWN', key)
        if key in fields:
            error_stack('PROTO-HDR-DUPLICATE', key)
        fields[key] = value[1:]
    for key in HEADER_KEYS:
        if key not in fields:
            error_stack('PROTO-HDR-MISSING', key)
    if tuple(fields) != HEADER_KEYS:
        error_stack('PROTO-HDR-ORDER', ','.join(fields))

    ttl = _parse_int('PROBE-TTL', fields['PROBE-TTL'])
    path_id = _parse_int('PATH-ID', fields['PATH-ID'])
    length = _parse_int('PAYLOAD-LENGTH', fields['PAYLOAD-LENGTH'])
    append, header_sec, payload_sec = decode_flags(fields['FLAGS'])
    pair = decode_pair(fields['PROBE-PAIR-ID'])
    if (path_id == 0) != (kind == ProbeKind.DISCOVERY.value):
        error_stack('PROTO-HDR-KIND', f'{kind} with PATH-ID {path_id}')

    raw_body = body.encode('ascii')
    if len(raw_body) != length:
        error_stack('PROTO-LENGTH', f'declared {length}, carried {len(raw_body)}')
    if body and not body.endswith('\n'):
        error_stack('PROTO-ENTRY', 'payload not newline terminated')
    parse_line = SealedPayload.from_line if payload_sec else PayloadEntry.from_line
    payload = tuple(parse_line(line) for line in body.split('\n')[:-1]) if body else ()

    header = ProbeHeader(
        probe_ttl=ttl,
        path_id=path_id,
        payload_length=length,
        flag_payload_append=append,
        flag_header_sec=header_sec,
        flag_payload_sec=payload_sec,
        probe_pair_id=pair,
    )
    return ProbeMessage(header, payload)
