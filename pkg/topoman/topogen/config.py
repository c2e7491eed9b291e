"""
Module: Network Configuration Files

Reading and writing the network configuration and policy files.

A network configuration is a flat text file split into sections. ``#`` starts a
comment; blank lines are ignored. Indented lines belong to the unindented line above.

    [middlebox]
    fw1 firewall                    # id kind [dynamic]
      eth0 10.0.0.1/30              # interface ip/prefix [edge]
      lan0 192.168.0.1/24 edge
    lb1 load_balancer dynamic
      eth0 10.0.0.2/30

    [island]
    acc0 acc0s0 acc0s1              # id switch...
      acc0s0:x1 acc0s1:x0           # internal switch link

    [link]
    fw1:eth0 lb1:eth0               # node:port node:port
    fw1:lan0 edge0s0:p0

    [route]
    fw1 10.1.0.0/16 eth0 10.0.0.2   # device prefix out-interface next-hop|DIRECT

    [policy]
    192.168.0.0/24 -> 192.168.1.0/24 allow

Island border ports are the switch ports named in ``[link]``. A policy file holds
``[policy]`` lines only; its section header is optional.
"""

import ipaddress
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..error.error import TopoManError
from ..manager.heuristics import PolicyRule
from ..topology import DIRECT, Endpoint, Interface, Link, Middlebox, RouteEntry, SdnIsland, TopologyGraph
from ..valuetype.value_type import value_types
from ._error import error_stack
from .instance import NetworkInstance

logger = logging.getLogger(__name__)

SECTIONS = ('middlebox', 'island', 'link', 'route', 'policy')

_SECTION = re.compile(r'\[\s*(\S+)\s*\]')
_POLICY = re.compile(r'(\S+)\s*->\s*(\S+)(?:\s+(\S+))?')


@dataclass
class _Draft:
    line: int
    kind: str
    dynamic: bool
    interfaces: list = field(default_factory=list)
    routes: list = field(default_factory=list)


def _lines(text):
    """Yields ``(lineno, indented, fields)`` for every non-empty line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0].rstrip()
        if not content.strip():
            continue
        yield lineno, content[0].isspace(), content.split()


def _value(kind, raw, lineno):
    try:
        return value_types[kind](raw)
    except TopoManError as e:
        raise error_stack.build('CONF-VALUE', f'line {lineno}: {e}') from e


def _prefix(raw, lineno):
    if raw.count('/') != 1:
        error_stack('CONF-VALUE', f'line {lineno}: {raw!r} is not address/prefix')
    address, length = raw.split('/')
    address = _value('ipv4', address, lineno)
    length = _value('prefix_len', length, lineno)
    try:
        ipaddress.IPv4Interface(f'{address}/{length}')
    except ValueError as e:
        raise error_stack.build('CONF-VALUE', f'line {lineno}: {raw!r}') from e
    return address, length


def _endpoint(raw, lineno):
    if ':' not in raw:
        error_stack('CONF-VALUE', f'line {lineno}: {raw!r} is not node:port')
    node, port = raw.rsplit(':', 1)
    return Endpoint(_value('device_id', node, lineno), _value('iface_name', port, lineno))


def _fields(fields, lineno, low, high=None):
    high = low if high is None else high
    if not low <= len(fields) <= high:
        error_stack('CONF-FIELDS', f'line {lineno}: {" ".join(fields)}')


def _policy_rule(text, lineno):
    match = _POLICY.fullmatch(text.strip())
    if match is None:
        error_stack('CONF-FIELDS', f'line {lineno}: {text.strip()}')
    src, dst, action = match.groups()
    try:
        return PolicyRule(ipaddress.IPv4Network(src), ipaddress.IPv4Network(dst), action or 'allow')
    except ValueError as e:
        raise error_stack.build('CONF-VALUE', f'line {lineno}: {e}') from e


class _NetworkParser:
    """Collects sections line by line, then resolves names and builds the graph."""

    def __init__(self):
        self.devices = {}
        self.islands = {}
        self.switches = {}
        self.links = []
        self.routes = []
        self.policies = []
        self.origin = {}
        self._device = None
        self._island = None

    def feed(self, text):
        section = None
        for lineno, indented, fields in _lines(text):
            match = _SECTION.fullmatch(' '.join(fields))
            if match and not indented:
                section = match.group(1).lower()
                if section not in SECTIONS:
                    error_stack('CONF-SECTION', f'line {lineno}: [{section}]')
                self._device = self._island = None
                continue
            if section is None:
                error_stack('CONF-OUTSIDE', f'line {lineno}')
            getattr(self, f'_read_{section}')(lineno, indented, fields)
        return self

    def _read_middlebox(self, lineno, indented, fields):
        if not indented:
            _fields(fields, lineno, 2, 3)
            device_id = _value('device_id', fields[0], lineno)
            kind = _value('kind', fields[1], lineno)
            if len(fields) == 3 and fields[2] != 'dynamic':
                error_stack('CONF-VALUE', f'line {lineno}: {fields[2]!r}')
            if device_id in self.devices:
                error_stack('CONF-DUPLICATE', f'line {lineno}: {device_id}')
            self.devices[device_id] = _Draft(lineno, kind, len(fields) == 3)
            self._device = device_id
            return
        if self._device is None:
            error_stack('CONF-OUTSIDE', f'line {lineno}: interface without device')
        _fields(fields, lineno, 2, 3)
        if len(fields) == 3 and fields[2] != 'edge':
            error_stack('CONF-VALUE', f'line {lineno}: {fields[2]!r}')
        name = _value('iface_name', fields[0], lineno)
        ip, length = _prefix(fields[1], lineno)
        draft = self.devices[self._device]
        if any(iface.name == name for iface in draft.interfaces):
            error_stack('CONF-DUPLICATE', f'line {lineno}: {self._device}:{name}')
        draft.interfaces.append(Interface(name, ip, length, edge_facing=len(fields) == 3))

    def _read_island(self, lineno, indented, fields):
        if not indented:
            _fields(fields, lineno, 2, max(len(fields), 2))
            island_id = _value('device_id', fields[0], lineno)
            if island_id in self.islands:
                error_stack('CONF-DUPLICATE', f'line {lineno}: {island_id}')
            switches = []
            for raw in fields[1:]:
                switch = _value('device_id', raw, lineno)
                if switch in self.switches:
                    error_stack('CONF-DUPLICATE', f'line {lineno}: {switch}')
                self.switches[switch] = island_id
                switches.append(switch)
            self.islands[island_id] = dict(line=lineno, switches=switches, links=[])
            self._island = island_id
            return
        if self._island is None:
            error_stack('CONF-OUTSIDE', f'line {lineno}: switch link without island')
        _fields(fields, lineno, 2)
        a, b = (_endpoint(raw, lineno) for raw in fields)
        for endpoint in (a, b):
            if self.switches.get(endpoint.node) != self._island:
                error_stack('CONF-ENDPOINT', f'line {lineno}: {endpoint}')
        self.islands[self._island]['links'].append(Link(a, b))

    def _read_link(self, lineno, indented, fields):
        _fields(fields, lineno, 2)
        self.links.append((lineno, _endpoint(fields[0], lineno), _endpoint(fields[1], lineno)))

    def _read_route(self, lineno, indented, fields):
        _fields(fields, lineno, 4)
        device_id = _value('device_id', fields[0], lineno)
        dest, length = _prefix(fields[1], lineno)
        out_interface = _value('iface_name', fields[2], lineno)
        next_hop = DIRECT if fields[3] == DIRECT else _value('ipv4', fields[3], lineno)
        self.routes.append((lineno, device_id, RouteEntry(dest, length, out_interface, next_hop)))

    def _read_policy(self, lineno, indented, fields):
        self.policies.append(_policy_rule(' '.join(fields), lineno))

    def _check_endpoint(self, endpoint, lineno):
        draft = self.devices.get(endpoint.node)
        if draft is not None:
            if not any(iface.name == endpoint.port for iface in draft.interfaces):
                error_stack('CONF-INTERFACE', f'line {lineno}: {endpoint}')
        elif endpoint.node not in self.switches:
            error_stack('CONF-ENDPOINT', f'line {lineno}: {endpoint}')

    def build(self):
        used = {}
        border = {island_id: set() for island_id in self.islands}
        for island in self.islands.values():
            for link in island['links']:
                for endpoint in link.endpoints:
                    used[endpoint] = island['line']
        links = []
        for lineno, a, b in self.links:
            for endpoint in (a, b):
                self._check_endpoint(endpoint, lineno)
                if endpoint in used:
                    error_stack('CONF-DUPLICATE', f'line {lineno}: {endpoint} already linked on line {used[endpoint]}')
                used[endpoint] = lineno
                if endpoint.node in self.switches:
                    border[self.switches[endpoint.node]].add(endpoint)
            try:
                link = Link(a, b)
            except TopoManError as e:
                raise error_stack.build('CONF-VALUE', f'line {lineno}: {e}') from e
            self.origin[link] = lineno
            links.append(link)

        for lineno, device_id, route in self.routes:
            draft = self.devices.get(device_id)
            if draft is None:
                error_stack('CONF-DEVICE', f'line {lineno}: {device_id}')
            if not any(iface.name == route.out_interface for iface in draft.interfaces):
                error_stack('CONF-INTERFACE', f'line {lineno}: {device_id}:{route.out_interface}')
            draft.routes.append(route)
            self.origin[(device_id, route)] = lineno

        middleboxes = []
        for device_id, draft in self.devices.items():
            try:
                middleboxes.append(Middlebox(device_id, draft.kind, draft.interfaces, draft.routes, draft.dynamic))
            except TopoManError as e:
                raise error_stack.build('CONF-VALUE', f'line {draft.line}: {e}') from e
            self.origin[device_id] = draft.line
        islands = [SdnIsland(island_id, island['switches'], island['links'], sorted(border[island_id]))
                   for island_id, island in self.islands.items()]
        try:
            graph = TopologyGraph(middleboxes, islands, links)
        except TopoManError as e:
            raise error_stack.build('CONF-VALUE', str(e)) from e
        return NetworkInstance(graph, tuple(self.policies), origin=self.origin)


def loads_network_config(text):
    """
    Parses network configuration text.

    Returns:
        NetworkInstance: The validated instance.

    Raises:
        ParseError: A line breaks the grammar; the message names the line.
        InconsistentRoute: A route's next hop is not adjacent through its out interface.
        SubnetMismatch: Linked interfaces are on different subnets.
    """
    instance = _NetworkParser().feed(text).build().validate()
    logger.debug('parsed %d middleboxes, %d islands, %d links',
                 len(instance.middleboxes), len(instance.islands), len(instance.links))
    return instance


def parse_network_config(path):
    """Reads and parses a network configuration file."""
    return loads_network_config(Path(path).read_text())


def loads_policy_config(text):
    """Parses policy lines; an empty text gives an empty list."""
    rules = []
    for lineno, indented, fields in _lines(text):
        line = ' '.join(fields)
        match = _SECTION.fullmatch(line)
        if match:
            if match.group(1).lower() != 'policy':
                error_stack('CONF-SECTION', f'line {lineno}: [{match.group(1)}]')
            continue
        rules.append(_policy_rule(line, lineno))
    return rules


def parse_policy_config(path):
    """
    Reads a policy file.

    Returns:
        list: `PolicyRule` values in file order.

    Raises:
        ParseError: A malformed rule or prefix.
    """
    return loads_policy_config(Path(path).read_text())


def dumps_policy_config(policies):
    return ''.join(f'{rule}\n' for rule in policies)


def write_policy_config(policies, path):
    Path(path).write_text('[policy]\n' + dumps_policy_config(policies))


def serialize_network_config(instance):
    """Renders `instance` in the configuration format; parsing the text gives the instance back."""
    graph = instance.graph
    out = []
    if instance.family != 'custom':
        out.append(f'# family={instance.family} nodes={instance.nodes} seed={instance.seed}\n')
    out.append('[middlebox]\n')
    for mb in graph.middleboxes.values():
        out.append(f'{mb.id} {mb.kind}' + (' dynamic' if mb.dynamic_egress else '') + '\n')
        for iface in mb.interfaces:
            out.append(f'  {iface.name} {iface.ip}/{iface.prefix_len}' + (' edge' if iface.edge_facing else '') + '\n')
    internal = set()
    if graph.islands:
        out.append('\n[island]\n')
        for island in graph.islands.values():
            out.append(f'{island.id} {" ".join(island.switches)}\n')
            for link in island.internal_links:
                internal.add(link)
                out.append(f'  {link.endpoint_a} {link.endpoint_b}\n')
    out.append('\n[link]\n')
    for link in sorted(graph.links - internal, key=str):
        out.append(f'{link.endpoint_a} {link.endpoint_b}\n')
    out.append('\n[route]\n')
    for mb in graph.middleboxes.values():
        for route in mb.routes:
            out.append(f'{mb.id} {route.dest_ip}/{route.prefix_len} {route.out_interface} {route.next_hop}\n')
    if instance.policies:
        out.append('\n[policy]\n')
        out.append(dumps_policy_config(instance.policies))
    return ''.join(out)


def write_network_config(instance, path):
    Path(path).write_text(serialize_network_config(instance))
