"""
Module: Topology Generator

Seeded generation of the evaluation topology families.

cisco
    Three tiers. Two linked cores, ``ceil(n/5)`` distribution middleboxes and the rest at
    the edge. Even distribution middleboxes are dual-homed load balancers. Edge
    middleboxes cycle through inline firewall, inline proxy and two offline devices
    hung off the distribution's access island.
inline_offline
    A chain of inline middleboxes. Every third device is offline, attached to an SDN
    island that sits between two inline neighbours.
tree
    Rooted tree with a fixed fanout; every leaf fronts a LAN.
full_mesh
    Every pair of middleboxes directly linked.

Middlebox-to-middlebox links get /30 subnets from 10.0.0.0/8, access islands /24s from
172.16.0.0/12 and edge LANs /24s from 192.168.0.0/16. Every LAN sits behind a
single-switch edge island, so its interface is edge-facing. Routes are shortest-path
host routes toward each interface's owner, with the most common next hop folded into
a default route.
"""

import ipaddress
import logging
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from itertools import chain

import networkx as nx

from ..manager.heuristics import PolicyRule
from ..topology import Endpoint, Interface, Link, Middlebox, RouteEntry, SdnIsland, TopologyGraph, device_adjacency
from ..valuetype.value_type import value_types
from ._error import error_stack
from .instance import NetworkInstance

logger = logging.getLogger(__name__)

CISCO = 'cisco'
INLINE_OFFLINE = 'inline_offline'
TREE = 'tree'
FULL_MESH = 'full_mesh'
FAMILIES = (CISCO, INLINE_OFFLINE, TREE, FULL_MESH)

INLINE_KINDS = ('firewall', 'proxy', 'vpn')
OFFLINE_KINDS = ('ids', 'generic')
DEFAULT_FANOUT = 3


@dataclass
class _Draft:
    kind: str
    dynamic: bool = False
    interfaces: list = field(default_factory=list)


@dataclass
class _Island:
    id: str
    network: ipaddress.IPv4Network
    switches: tuple
    hosts: object = None
    members: int = 0
    ports: dict = field(default_factory=dict)

    def __post_init__(self):
        self.hosts = self.network.hosts()

    def next_port(self, switch):
        index = self.ports.get(switch, 0)
        self.ports[switch] = index + 1
        return Endpoint(switch, f'p{index}')

    @property
    def internal_links(self):
        return tuple(Link(Endpoint(a, 'x1'), Endpoint(b, 'x0')) for a, b in zip(self.switches, self.switches[1:]))


class _Builder:
    """Accumulates devices, islands and links, then derives routes and policies."""

    def __init__(self, rng):
        self.rng = rng
        self.devices = {}
        self.links = []
        self.islands = []
        self.lans = []
        self._border = {}
        self._link_nets = ipaddress.ip_network('10.0.0.0/8').subnets(new_prefix=30)
        self._access_nets = ipaddress.ip_network('172.16.0.0/12').subnets(new_prefix=24)
        self._lan_nets = chain(ipaddress.ip_network('192.168.0.0/16').subnets(new_prefix=24),
                               ipaddress.ip_network('198.18.0.0/15').subnets(new_prefix=24))

    def device(self, device_id, kinds=INLINE_KINDS, kind=None, dynamic=False):
        self.devices[device_id] = _Draft(kind or self.rng.choice(kinds), dynamic)
        return device_id

    def _interface(self, device_id, ip, prefix_len, edge=False):
        draft = self.devices[device_id]
        name = 'lan0' if edge else f'eth{sum(1 for iface in draft.interfaces if not iface.edge_facing)}'
        draft.interfaces.append(Interface(name, str(ip), prefix_len, edge_facing=edge))
        return Endpoint(device_id, name)

    @staticmethod
    def _next(pool, what):
        try:
            return next(pool)
        except StopIteration:
            error_stack('CONF-VALUE', f'{what} address pool exhausted')

    def connect(self, a, b):
        network = self._next(self._link_nets, 'link')
        low, high = network.hosts()
        self.links.append(Link(self._interface(a, low, 30), self._interface(b, high, 30)))

    def lan(self, device_id):
        network = self._next(self._lan_nets, 'LAN')
        index = len(self.lans)
        island = _Island(f'edge{index}', network, (f'edge{index}s0',))
        endpoint = self._interface(device_id, next(island.hosts), network.prefixlen, edge=True)
        self._attach(island, endpoint, island.switches[0])
        self.lans.append(network)

    def access_island(self, switches=2):
        network = self._next(self._access_nets, 'access island')
        index = sum(1 for island in self.islands if island.id.startswith('acc'))
        island = _Island(f'acc{index}', network, tuple(f'acc{index}s{k}' for k in range(switches)))
        return island

    def join(self, island, device_id, switch=None):
        """Attaches a device to an access island, spreading members over its switches."""
        if switch is None:
            switch = island.switches[island.members % len(island.switches)]
        island.members += 1
        endpoint = self._interface(device_id, next(island.hosts), island.network.prefixlen)
        self._attach(island, endpoint, switch)

    def _attach(self, island, endpoint, switch):
        if island.id not in self._border:
            self._border[island.id] = []
            self.islands.append(island)
        port = island.next_port(switch)
        self._border[island.id].append(port)
        self.links.append(Link(endpoint, port))

    def build(self, family, n, seed):
        islands = [SdnIsland(island.id, island.switches, island.internal_links, sorted(self._border[island.id]))
                   for island in self.islands]
        skeleton = TopologyGraph(
            [Middlebox(device_id, draft.kind, draft.interfaces, (), draft.dynamic)
             for device_id, draft in self.devices.items()],
            islands, set(self.links),
        )
        routes = compute_routes(skeleton)
        graph = TopologyGraph([replace(mb, routes=routes[mb.id]) for mb in skeleton.middleboxes.values()],
                              islands, set(self.links))
        half = len(self.lans) // 2
        lans = sorted(self.lans)
        policies = tuple(PolicyRule(src, dst) for src in lans[:half] for dst in lans[half:])
        return NetworkInstance(graph, policies, family, n, seed)


def _destinations(graph):
    """Route targets per device: host prefixes of its interfaces, whole LANs for edge-facing ones, each with its subnet."""
    targets = {}
    for mb in graph.middleboxes.values():
        prefixes = []
        for iface in mb.interfaces:
            if iface.edge_facing:
                prefixes.append((str(iface.network.network_address), iface.prefix_len, iface.network))
            else:
                prefixes.append((iface.ip, 32, iface.network))
        targets[mb.id] = prefixes
    return targets


def compute_routes(graph):
    """
    Shortest-path routes of every device.

    Destinations on a directly connected subnet get no entry. Among equal-cost first
    hops the first in adjacency order is taken.

    Returns:
        dict: device id -> tuple of `RouteEntry`, the default route last.
    """
    adjacency = device_adjacency(graph)
    devices = nx.Graph()
    devices.add_nodes_from(graph.middleboxes)
    for device_id, neighbours in adjacency.items():
        devices.add_edges_from((device_id, neighbour) for _local, neighbour, _remote in neighbours)
    targets = _destinations(graph)
    attached = defaultdict(set)
    for mb in graph.middleboxes.values():
        for iface in mb.interfaces:
            attached[iface.network].add(mb.id)
    routes = {device_id: [] for device_id in graph.middleboxes}
    for target in sorted(graph.middleboxes):
        distance = nx.single_source_shortest_path_length(devices, target)
        for device_id in sorted(graph.middleboxes):
            if device_id == target or device_id not in distance:
                continue
            local, neighbour, remote = next(hop for hop in adjacency[device_id]
                                            if distance.get(hop[1]) == distance[device_id] - 1)
            next_hop = graph.middleboxes[neighbour].interface(remote).ip
            for dest, prefix_len, network in targets[target]:
                # only a neighbour can share a subnet
                if distance[device_id] == 1 and device_id in attached[network]:
                    continue
                routes[device_id].append((dest, prefix_len, local, next_hop))
    return {device_id: _fold_default(entries) for device_id, entries in routes.items()}


def _fold_default(entries):
    if not entries:
        return ()
    counts = Counter((out_interface, next_hop) for _dest, _length, out_interface, next_hop in entries)
    (default_out, default_hop), _ = min(counts.items(), key=lambda item: (-item[1], item[0]))
    kept = tuple(RouteEntry(dest, length, out_interface, next_hop)
                 for dest, length, out_interface, next_hop in entries
                 if (out_interface, next_hop) != (default_out, default_hop))
    return kept + (RouteEntry('0.0.0.0', 0, default_out, default_hop),)


def _cisco(builder, n, **_):
    cores = [builder.device(f'core{k}') for k in range(2)]
    builder.connect(*cores)
    distribution = []
    for k in range(min(math.ceil(n / 5), n - 2)):
        dual = k % 2 == 0
        dist = builder.device(f'dist{k}', kind='load_balancer' if dual else None, dynamic=dual)
        for core in (cores if dual else [cores[k % 2]]):
            builder.connect(core, dist)
        distribution.append(dist)
    access = {}
    for i in range(n - 2 - len(distribution)):
        dist = distribution[i % len(distribution)]
        role = 'XYOO'[i % 4]
        if role == 'O':
            edge = builder.device(f'edge{i}', OFFLINE_KINDS)
            if dist not in access:
                access[dist] = builder.access_island()
                builder.join(access[dist], dist)
            builder.join(access[dist], edge)
        else:
            edge = builder.device(f'edge{i}', kind='firewall' if role == 'X' else 'proxy')
            builder.connect(dist, edge)
            builder.lan(edge)


def _inline_offline(builder, n, **_):
    inline = []
    pending = []
    for i in range(n):
        if i % 3 == 2:
            pending.append(builder.device(f'mb{i}', OFFLINE_KINDS))
            continue
        device_id = builder.device(f'mb{i}')
        if inline:
            _segment(builder, inline[-1], pending, device_id)
        inline.append(device_id)
        pending = []
    if pending:
        _segment(builder, inline[-1], pending, None)
    for position, device_id in enumerate(inline):
        if position in (0, len(inline) - 1) or position % 4 == 3:
            builder.lan(device_id)


def _segment(builder, west, offline, east):
    """Joins two inline neighbours, through an island when offline devices hang between them."""
    if not offline:
        builder.connect(west, east)
        return
    island = builder.access_island()
    builder.join(island, west, island.switches[0])
    for device_id in offline:
        builder.join(island, device_id)
    if east is not None:
        builder.join(island, east, island.switches[-1])


def _tree(builder, n, fanout=DEFAULT_FANOUT, **_):
    nodes = [builder.device(f'mb{i}') for i in range(n)]
    for i in range(1, n):
        builder.connect(nodes[(i - 1) // fanout], nodes[i])
    for i in range(n):
        if fanout * i + 1 >= n:
            builder.lan(nodes[i])


def _full_mesh(builder, n, **_):
    nodes = [builder.device(f'mb{i}') for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            builder.connect(nodes[i], nodes[j])


_families = {
    CISCO: _cisco,
    INLINE_OFFLINE: _inline_offline,
    TREE: _tree,
    FULL_MESH: _full_mesh,
}


def generate_topology(family, n, seed=0, fanout=DEFAULT_FANOUT):
    """
    Generates a validated network of `n` middleboxes.

    Args:
        family (str): One of `FAMILIES`.
        n (int): Middlebox count, at least 2.
        seed (int): Seed; the same arguments give the same instance.
        fanout (int): Children per node for the tree family.

    Returns:
        NetworkInstance: Ground truth with routes and policies.
    """
    family = value_types['family'](family)
    n = value_types['nodes'](n)
    fanout = value_types['nodes'](fanout, label='fanout')
    builder = _Builder(random.Random(f'{family}:{n}:{seed}'))
    _families[family](builder, n, fanout=fanout)
    instance = builder.build(family, n, seed).validate()
    logger.debug('generated %s n=%d seed=%d: %d links, %.2f interfaces per middlebox',
                 family, n, seed, len(instance.links), instance.interface_density)
    return instance
