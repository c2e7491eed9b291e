"""
Module: Network Instance

Ground truth of one network: the topology graph plus the policy list.
"""

from dataclasses import dataclass, field

from ..topology import DIRECT, Endpoint, device_adjacency
from ._error import error_stack


@dataclass
class NetworkInstance:
    """
    Attributes:
        graph (TopologyGraph): Middleboxes, islands and ground-truth links.
        policies (tuple): `PolicyRule` values.
        family (str): Generator family, or 'custom' for parsed files.
        nodes (int): Requested middlebox count.
        seed (int): Generator seed.
    """
    graph: object
    policies: tuple = ()
    family: str = 'custom'
    nodes: int = 0
    seed: int = 0
    origin: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def middleboxes(self):
        return self.graph.middleboxes

    @property
    def islands(self):
        return self.graph.islands

    @property
    def links(self):
        return self.graph.links

    @property
    def edge_interfaces(self):
        """Interfaces flagged as attached to an edge switch."""
        return frozenset(Endpoint(mb.id, iface.name)
                         for mb in self.graph.middleboxes.values()
                         for iface in mb.interfaces if iface.edge_facing)

    @property
    def interface_density(self):
        devices = self.graph.middleboxes.values()
        return sum(len(mb.interfaces) for mb in devices) / max(len(devices), 1)

    def _where(self, key):
        line = self.origin.get(key)
        return f' (line {line})' if line else ''

    def validate(self):
        """
        Checks subnet and route consistency.

        Raises:
            SubnetMismatch: Two linked interfaces, or two interfaces on one island, differ in subnet.
            InconsistentRoute: A route's next hop is not adjacent through its out interface.
        """
        graph = self.graph
        island_subnets = {}
        for link in sorted(graph.links, key=str):
            a, b = link.endpoints
            a_mb, b_mb = graph.middleboxes.get(a.node), graph.middleboxes.get(b.node)
            if a_mb and b_mb:
                net_a, net_b = a_mb.interface(a.port).network, b_mb.interface(b.port).network
                if net_a != net_b:
                    error_stack('CONF-SUBNET', f'{link}{self._where(link)}')
            elif a_mb or b_mb:
                mb, device_end, port = (a_mb, a, b) if a_mb else (b_mb, b, a)
                island = graph.island_of(port.node)
                network = mb.interface(device_end.port).network
                known = island_subnets.setdefault(island.id, network)
                if known != network:
                    error_stack('CONF-SUBNET', f'{device_end} on island {island.id}{self._where(link)}')

        adjacency = {mb_id: set(entries) for mb_id, entries in device_adjacency(graph).items()}
        for mb in graph.middleboxes.values():
            for route in mb.routes:
                if route.next_hop == DIRECT:
                    continue
                owner = graph.owner_of(route.next_hop)
                if owner is None or (route.out_interface, owner[0], owner[1]) not in adjacency[mb.id]:
                    error_stack('CONF-ROUTE', f'{mb.id} {route.dest_ip}/{route.prefix_len} '
                                              f'via {route.next_hop}{self._where((mb.id, route))}')
        return self
