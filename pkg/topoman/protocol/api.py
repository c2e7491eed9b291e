"""
Module: Controller API Messages

Messages exchanged between MB Agents and the MB Controller, encoded in the same text
style as probes: an ``API: <NAME>`` first line followed by ``KEY: value`` lines. Keys
such as ENTRY, INTERFACE and ROUTE may repeat; their order is preserved.

    API: PROBE-UPDATE
    DEVICE: ids2
    PROBE-PAIR-ID: 10.0.0.1->10.0.0.9
    PROBE-TTL: 2
    TERMINAL: 0
    ENTRY: device=ids2;in=eth0;out=eth1
"""

from dataclasses import dataclass, field

from ._error import error_stack
from .codec import decode_flags, decode_pair, encode_flags, encode_pair
from .message import PayloadEntry, SealedPayload

_registry = {}


def _register(cls):
    _registry[cls.NAME] = cls
    return cls


class ApiMessage:
    """Base class for controller API messages."""

    NAME = ''

    def to_fields(self):
        raise NotImplementedError

    @classmethod
    def from_fields(cls, fields):
        raise NotImplementedError

    def encode(self):
        """Encodes the message as ``API: NAME`` plus ``KEY: value`` lines."""
        lines = [f'API: {self.NAME}'] + [f'{key}: {value}' for key, value in self.to_fields()]
        return ('\n'.join(lines) + '\n').encode('ascii')


def _one(fields, key):
    values = [value for _key, value in fields if _key == key]
    if len(values) != 1:
        error_stack('PROTO-API-FIELD', key)
    return values[0]


def _many(fields, key):
    return [value for _key, value in fields if _key == key]


def _int(value):
    if not value.lstrip('-').isdigit():
        error_stack('PROTO-VALUE', value)
    return int(value)


def decode_api(data):
    """
    Decodes any controller API message.

    Raises:
        MalformedHeader: Unknown API name or a missing required field.
    """
    try:
        text = data.decode('ascii')
    except (UnicodeDecodeError, AttributeError):
        error_stack('PROTO-ENCODING')
    lines = [line for line in text.split('\n') if line]
    if not lines or not lines[0].startswith('API: '):
        error_stack('PROTO-API-NAME', lines[0] if lines else '')
    name = lines[0][len('API: '):]
    if name not in _registry:
        error_stack('PROTO-API-NAME', name)
    fields = []
    for line in lines[1:]:
        key, sep, value = line.partition(': ')
        if not sep:
            error_stack('PROTO-API-FIELD', line)
        fields.append((key, value))
    return _registry[name].from_fields(fields)


@_register
@dataclass(frozen=True)
class DeviceCapabilities(ApiMessage):
    """
    Graybox capability exchange: identity, kind, interfaces and routes of a device.

    Interfaces are ``name ip/prefix [edge]``; routes are ``prefix out_interface next_hop``.
    """
    device_id: str
    kind: str
    dynamic_egress: bool
    interfaces: tuple
    routes: tuple
    NAME = 'DEVICE-CAPABILITIES'

    def to_fields(self):
        fields = [('DEVICE', self.device_id), ('KIND', self.kind),
                  ('DYNAMIC-EGRESS', str(int(self.dynamic_egress)))]
        fields += [('INTERFACE', line) for line in self.interfaces]
        fields += [('ROUTE', line) for line in self.routes]
        return fields

    @classmethod
    def from_fields(cls, fields):
        return cls(_one(fields, 'DEVICE'), _one(fields, 'KIND'), _one(fields, 'DYNAMIC-EGRESS') == '1',
                   tuple(_many(fields, 'INTERFACE')), tuple(_many(fields, 'ROUTE')))


@_register
@dataclass(frozen=True)
class ProbeInit(ApiMessage):
    """
    Triggers a source agent to probe the interfaces of a destination device.

    Attributes:
        dest_device (str): Destination middlebox.
        dest_ips (tuple): Destination interface IPs, the selected one first.
        append, header_sec, payload_sec (bool): Flags for the probes to originate.
        ttl_max (int): TTL threshold.
        tokens (tuple): One token per destination IP when header security is on.
    """
    dest_device: str
    dest_ips: tuple
    append: bool = False
    header_sec: bool = False
    payload_sec: bool = False
    ttl_max: int = 32
    tokens: tuple = ()
    NAME = 'PROBE-INIT'

    def to_fields(self):
        fields = [('DEST-DEVICE', self.dest_device)]
        fields += [('DEST-IP', ip) for ip in self.dest_ips]
        fields.append(('FLAGS', encode_flags(self.append, self.header_sec, self.payload_sec)))
        fields.append(('TTL-MAX', str(self.ttl_max)))
        fields += [('TOKEN', f'{token:016x}') for token in self.tokens]
        return fields

    @classmethod
    def from_fields(cls, fields):
        flags = [value for key, value in fields if key == 'FLAGS']
        append, header_sec, payload_sec = decode_flags(flags[0] if flags else '')
        return cls(_one(fields, 'DEST-DEVICE'), tuple(_many(fields, 'DEST-IP')),
                   append, header_sec, payload_sec, _int(_one(fields, 'TTL-MAX')),
                   tuple(int(token, 16) for token in _many(fields, 'TOKEN')))

    def token_for(self, dest_ip):
        if not self.tokens:
            return None
        return self.tokens[self.dest_ips.index(dest_ip)]


@_register
@dataclass(frozen=True)
class ProbeUpdate(ApiMessage):
    """
    Up-call reporting probe traversal details.

    Per-hop up-calls carry one entry and the TTL observed at that hop; terminal up-calls
    in append mode carry the whole trace. With payload security each entry is a sealed
    segment.
    """
    device_id: str
    probe_pair_id: object
    probe_ttl: int
    terminal: bool
    entries: tuple = ()
    segments: tuple = ()
    NAME = 'PROBE-UPDATE'

    def to_fields(self):
        fields = [('DEVICE', self.device_id), ('PROBE-PAIR-ID', encode_pair(self.probe_pair_id)),
                  ('PROBE-TTL', str(self.probe_ttl)), ('TERMINAL', str(int(self.terminal)))]
        fields += [('ENTRY', entry.to_line().rstrip('\n')) for entry in self.entries]
        fields += [('SEGMENT', segment.to_line().rstrip('\n')) for segment in self.segments]
        return fields

    @classmethod
    def from_fields(cls, fields):
        return cls(_one(fields, 'DEVICE'), decode_pair(_one(fields, 'PROBE-PAIR-ID')),
                   _int(_one(fields, 'PROBE-TTL')), _one(fields, 'TERMINAL') == '1',
                   tuple(PayloadEntry.from_line(line) for line in _many(fields, 'ENTRY')),
                   tuple(SealedPayload.from_line(line) for line in _many(fields, 'SEGMENT')))


@_register
@dataclass(frozen=True)
class UpdateOutInterface(ApiMessage):
    """Correction of the egress interface a probe actually took at one hop."""
    device_id: str
    probe_pair_id: object
    probe_ttl: int
    predicted: str
    actual: str
    NAME = 'UPDATE-OUTINTERFACE'

    def to_fields(self):
        return [('DEVICE', self.device_id), ('PROBE-PAIR-ID', encode_pair(self.probe_pair_id)),
                ('PROBE-TTL', str(self.probe_ttl)), ('PREDICTED', self.predicted), ('ACTUAL', self.actual)]

    @classmethod
    def from_fields(cls, fields):
        return cls(_one(fields, 'DEVICE'), decode_pair(_one(fields, 'PROBE-PAIR-ID')),
                   _int(_one(fields, 'PROBE-TTL')), _one(fields, 'PREDICTED'), _one(fields, 'ACTUAL'))


@_register
@dataclass(frozen=True)
class ResolveProbeId(ApiMessage):
    """Request to map a probe-pair token back to its interface IPs."""
    device_id: str
    token: int
    NAME = 'RESOLVE-PROBEID'

    def to_fields(self):
        return [('DEVICE', self.device_id), ('TOKEN', f'{self.token:016x}')]

    @classmethod
    def from_fields(cls, fields):
        return cls(_one(fields, 'DEVICE'), int(_one(fields, 'TOKEN'), 16))


@_register
@dataclass(frozen=True)
class Heartbeat(ApiMessage):
    """Periodic device status."""
    device_id: str
    status: str
    time: int
    NAME = 'HEARTBEAT'

    def to_fields(self):
        return [('DEVICE', self.device_id), ('STATUS', self.status), ('TIME', str(self.time))]

    @classmethod
    def from_fields(cls, fields):
        return cls(_one(fields, 'DEVICE'), _one(fields, 'STATUS'), _int(_one(fields, 'TIME')))


@_register
@dataclass(frozen=True)
class PathReport(ApiMessage):
    """
    Outcome of a path-checker probe: OK at the terminal device, BROKEN where no rule
    exists for the path-id, DISCARD on TTL expiry. The trace lists the devices that
    handled the probe, the reporting device last.
    """
    device_id: str
    path_id: int
    status: str
    trace: tuple = field(default_factory=tuple)
    NAME = 'PATH-REPORT'

    def to_fields(self):
        fields = [('DEVICE', self.device_id), ('PATH-ID', str(self.path_id)), ('STATUS', self.status)]
        fields += [('ENTRY', entry.to_line().rstrip('\n')) for entry in self.trace]
        return fields

    @classmethod
    def from_fields(cls, fields):
        return cls(_one(fields, 'DEVICE'), _int(_one(fields, 'PATH-ID')), _one(fields, 'STATUS'),
                   tuple(PayloadEntry.from_line(line) for line in _many(fields, 'ENTRY')))
