"""
Module: Topology Model

The labeled network graph of middleboxes, SDN islands and links. The same types hold
the simulator's ground truth and the controller's discovered view.

Link endpoints are ``(node, port)`` pairs where the node is a middlebox id and the port
one of its interface names, or the node is an island switch and the port one of its
ports. Links are undirected and stored with their endpoints in sorted order, so a link
and its reversal compare equal.
"""

import ipaddress
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import NamedTuple

import networkx as nx

from ._error import error_stack

DIRECT = 'DIRECT'
MIDDLEBOX_KINDS = ('firewall', 'ids', 'proxy', 'vpn', 'load_balancer', 'generic')


def _network(ip, prefix_len):
    try:
        return _parse_network(ip, prefix_len)
    except (ipaddress.AddressValueError, ipaddress.NetmaskValueError, ValueError, TypeError):
        error_stack('TOPO-ADDRESS', f'{ip}/{prefix_len}')


@lru_cache(maxsize=None)
def _parse_network(ip, prefix_len):
    return ipaddress.IPv4Interface(f'{ip}/{prefix_len}').network


@dataclass(frozen=True)
class Interface:
    """
    A middlebox interface.

    Attributes:
        name (str): Unique within its device.
        ip (str): IPv4 address.
        prefix_len (int): Subnet prefix length.
        edge_facing (bool): Attached to an edge switch that no other middlebox shares.
    """
    name: str
    ip: str
    prefix_len: int
    edge_facing: bool = False
    network: ipaddress.IPv4Network = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'network', _network(self.ip, self.prefix_len))


@dataclass(frozen=True)
class RouteEntry:
    """A route toward ``dest_ip/prefix_len`` leaving `out_interface`."""
    dest_ip: str
    prefix_len: int
    out_interface: str
    next_hop: str = DIRECT
    network: ipaddress.IPv4Network = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'network', _network(self.dest_ip, self.prefix_len))


@dataclass(frozen=True)
class Middlebox:
    """
    A multi-homed middlebox.

    Attributes:
        id (str): Device identifier.
        kind (str): One of `MIDDLEBOX_KINDS`.
        interfaces (tuple): `Interface` values.
        routes (tuple): `RouteEntry` values in declaration order.
        dynamic_egress (bool): Egress is chosen at run time (load balancers only).
    """
    id: str
    kind: str
    interfaces: tuple
    routes: tuple = ()
    dynamic_egress: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'interfaces', tuple(self.interfaces))
        object.__setattr__(self, 'routes', tuple(self.routes))
        if not self.interfaces:
            error_stack('TOPO-NO-IFACE', self.id)
        names = {iface.name for iface in self.interfaces}
        if len(names) != len(self.interfaces):
            error_stack('TOPO-IFACE-DUP', self.id)
        if self.kind not in MIDDLEBOX_KINDS:
            error_stack('TOPO-KIND', f'{self.id}: {self.kind}')
        if self.dynamic_egress and self.kind != 'load_balancer':
            error_stack('TOPO-DYNAMIC', self.id)
        for route in self.routes:
            if route.out_interface not in names:
                error_stack('TOPO-ROUTE-IFACE', f'{self.id}: {route.out_interface}')

    @cached_property
    def _by_name(self):
        return {iface.name: iface for iface in self.interfaces}

    @cached_property
    def _by_ip(self):
        return {iface.ip: iface for iface in self.interfaces}

    @cached_property
    def route_table(self):
        from .routing import RouteTable
        return RouteTable(self.routes, self.interfaces)

    def interface(self, name):
        return self._by_name.get(name)

    def interface_for_ip(self, ip):
        return self._by_ip.get(ip)

    @property
    def ips(self):
        return tuple(iface.ip for iface in self.interfaces)


class Endpoint(NamedTuple):
    node: str
    port: str

    def __str__(self):
        return f'{self.node}:{self.port}'


@dataclass(frozen=True)
class Link:
    """Undirected link between two endpoints."""
    endpoint_a: Endpoint
    endpoint_b: Endpoint

    def __post_init__(self):
        a, b = Endpoint(*self.endpoint_a), Endpoint(*self.endpoint_b)
        if a == b:
            error_stack('TOPO-LINK-SELF', str(a))
        if b < a:
            a, b = b, a
        object.__setattr__(self, 'endpoint_a', a)
        object.__setattr__(self, 'endpoint_b', b)

    @property
    def endpoints(self):
        return (self.endpoint_a, self.endpoint_b)

    def other(self, endpoint):
        return self.endpoint_b if endpoint == self.endpoint_a else self.endpoint_a

    def __str__(self):
        return f'{self.endpoint_a} -- {self.endpoint_b}'


@dataclass(frozen=True)
class SdnIsland:
    """
    A set of SDN switches whose internal topology the SDN controller knows.

    Attributes:
        id (str): Island identifier.
        switches (tuple): Switch node ids, globally unique.
        internal_links (tuple): Switch-to-switch `Link` values.
        border_ports (tuple): `Endpoint` values where middlebox interfaces attach.
    """
    id: str
    switches: tuple
    internal_links: tuple = ()
    border_ports: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'switches', tuple(self.switches))
        object.__setattr__(self, 'internal_links', tuple(self.internal_links))
        object.__setattr__(self, 'border_ports', tuple(Endpoint(*p) for p in self.border_ports))

    @cached_property
    def ports(self):
        """Endpoint set of every switch port in the island."""
        ports = set(self.border_ports)
        for link in self.internal_links:
            ports.update(link.endpoints)
        return frozenset(ports)

    @cached_property
    def switch_graph(self):
        """Switch adjacency; each edge carries the link it stands for."""
        graph = nx.Graph()
        graph.add_nodes_from(self.switches)
        for link in self.internal_links:
            graph.add_edge(link.endpoint_a.node, link.endpoint_b.node, link=link)
        return graph


@dataclass
class GraphDiff:
    """Set differences between a discovered and a reference graph."""
    missing_links: frozenset = frozenset()
    extra_links: frozenset = frozenset()
    missing_nodes: frozenset = frozenset()
    extra_nodes: frozenset = frozenset()

    @property
    def is_empty(self):
        return not (self.missing_links or self.extra_links or self.missing_nodes or self.extra_nodes)


@dataclass
class TopologyGraph:
    """
    Middleboxes, islands and links.

    Adding an island also inserts its internal links.
    """
    middleboxes: dict = field(default_factory=dict)
    islands: dict = field(default_factory=dict)
    links: set = field(default_factory=set)

    def __post_init__(self):
        self._switch_island = {}
        self._ip_owner = {}
        self._endpoint_links = {}
        middleboxes, islands, links = self.middleboxes, self.islands, self.links
        self.middleboxes, self.islands, self.links = {}, {}, set()
        for mb in (middleboxes.values() if isinstance(middleboxes, dict) else middleboxes):
            self.add_middlebox(mb)
        for island in (islands.values() if isinstance(islands, dict) else islands):
            self.add_island(island)
        for link in links:
            self.insert_link(link)

    def add_middlebox(self, mb):
        if mb.id in self.middleboxes or mb.id in self._switch_island:
            error_stack('TOPO-NODE-DUP', mb.id)
        self.middleboxes[mb.id] = mb
        for iface in mb.interfaces:
            self._ip_owner[iface.ip] = (mb.id, iface.name)
        return self

    def add_island(self, island):
        if island.id in self.islands:
            error_stack('TOPO-NODE-DUP', island.id)
        for switch in island.switches:
            if switch in self._switch_island or switch in self.middleboxes:
                error_stack('TOPO-NODE-DUP', switch)
        self.islands[island.id] = island
        for switch in island.switches:
            self._switch_island[switch] = island
        for link in island.internal_links:
            self.insert_link(link)
        return self

    def island_of(self, switch):
        return self._switch_island.get(switch)

    def owner_of(self, ip):
        """Returns ``(device_id, interface_name)`` owning `ip`, or None."""
        return self._ip_owner.get(ip)

    def has_endpoint(self, endpoint):
        node, port = endpoint
        mb = self.middleboxes.get(node)
        if mb is not None:
            return mb.interface(port) is not None
        island = self._switch_island.get(node)
        return island is not None and Endpoint(node, port) in island.ports

    def insert_link(self, link):
        """
        Inserts an undirected link; inserting an existing link is a no-op.

        Raises:
            UnknownEndpoint: An endpoint is not in the graph.
        """
        for endpoint in link.endpoints:
            if not self.has_endpoint(endpoint):
                error_stack('TOPO-ENDPOINT', str(endpoint))
        self.links.add(link)
        for endpoint in link.endpoints:
            self._endpoint_links.setdefault(endpoint, set()).add(link)
        return self

    def links_at(self, endpoint):
        """The links attached to `endpoint`."""
        return frozenset(self._endpoint_links.get(Endpoint(*endpoint), ()))

    @property
    def node_ids(self):
        return frozenset(self.middleboxes) | frozenset(self._switch_island)

    def copy(self):
        return TopologyGraph(dict(self.middleboxes), dict(self.islands), set(self.links))

    def to_networkx(self):
        """Node-level multigraph; each edge is keyed by its `Link`."""
        graph = nx.MultiGraph()
        for mb in self.middleboxes.values():
            graph.add_node(mb.id, kind=mb.kind)
        for switch, island in self._switch_island.items():
            graph.add_node(switch, kind='switch', island=island.id)
        for link in self.links:
            graph.add_edge(link.endpoint_a.node, link.endpoint_b.node, key=link)
        return graph


def insert_link(graph, link):
    """Inserts `link` into `graph` and returns the graph."""
    return graph.insert_link(link)


def diff_graphs(discovered, reference):
    """
    Compares a discovered graph against a reference.

    Returns:
        GraphDiff: Links and nodes present in only one of the two graphs.
    """
    return GraphDiff(
        missing_links=frozenset(reference.links - discovered.links),
        extra_links=frozenset(discovered.links - reference.links),
        missing_nodes=reference.node_ids - discovered.node_ids,
        extra_nodes=discovered.node_ids - reference.node_ids,
    )


def device_adjacency(graph):
    """
    Middlebox-level adjacency, looking through SDN islands.

    Returns:
        dict: device id -> sorted list of ``(local_interface, neighbour_id, neighbour_interface)``.
    """
    adjacency = {mb_id: set() for mb_id in graph.middleboxes}
    attached = {}
    for link in graph.links:
        a, b = link.endpoints
        a_mb, b_mb = a.node in graph.middleboxes, b.node in graph.middleboxes
        if a_mb and b_mb:
            adjacency[a.node].add((a.port, b.node, b.port))
            adjacency[b.node].add((b.port, a.node, a.port))
        elif a_mb or b_mb:
            device, port = (a, b) if a_mb else (b, a)
            island = graph.island_of(port.node)
            if island is not None:
                attached.setdefault(island.id, set()).add(device)
    for members in attached.values():
        for here in members:
            for there in members:
                if here.node != there.node:
                    adjacency[here.node].add((here.port, there.node, there.port))
    return {mb_id: sorted(neighbours) for mb_id, neighbours in adjacency.items()}
