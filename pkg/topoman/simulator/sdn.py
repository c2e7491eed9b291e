"""
Module: SDN Controller Model

Forwarding inside SDN islands and the packet-in / packet-out observations the SDN
controller shares with the MB Controller. Islands forward along the shortest switch
path from the ingress port to the port where the L2 target is attached, without
modifying the probe.
"""

import logging
from dataclasses import dataclass

import networkx as nx

from ..topology import Endpoint
from ._error import error_stack

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrafficObservation:
    """Packet-in from data traffic revealing which switch port a device interface uses."""
    switch: str
    port: str
    device_id: str
    interface: str


class SdnControllerModel:
    """
    Args:
        graph (TopologyGraph): Ground truth, including island border attachments.
    """

    def __init__(self, graph):
        self.graph = graph
        self.packet_ins = 0
        self.packet_outs = 0
        self._transits = {}

    def attachment(self, endpoint):
        """The switch port `endpoint` is linked to, or None."""
        for link in self.graph.links_at(endpoint):
            other = link.other(Endpoint(*endpoint))
            if self.graph.island_of(other.node) is not None:
                return other
        return None

    def forward(self, identity, ttl, ingress, target):
        """
        Carries a probe across the island it entered at `ingress`.

        Args:
            identity: Probe-pair-ID as carried by the probe.
            ttl (int): TTL the probe left its last middlebox with.
            ingress (Endpoint): Switch port the probe entered on.
            target (Endpoint): Middlebox interface owning the L2 next hop.

        Returns:
            Endpoint: The egress switch port.
        """
        island = self.graph.island_of(ingress.node)
        egress = self.attachment(target)
        if egress is None or self.graph.island_of(egress.node) is not island:
            error_stack('SIM-NO-TARGET', f'{target} from {ingress}')
        self.packet_ins += 1
        switches = nx.shortest_path(island.switch_graph, ingress.node, egress.node)
        self.packet_outs += 1
        self._transits[(identity, ttl)] = (ingress, egress)
        logger.debug('island %s: %s -> %s via %s', island.id, ingress, egress, switches)
        return egress

    def transit(self, identity, ttl):
        """``(ingress, egress)`` ports of the island crossed after hop `ttl`, or None."""
        return self._transits.get((identity, ttl))

    def clear(self):
        self._transits.clear()

    def observe_traffic(self, device_id, interface):
        """
        Packet-in for data traffic sent out of an edge-facing interface.

        Raises:
            NotEdgeAttached: The interface is not flagged edge-facing or not on a switch.
        """
        device = self.graph.middleboxes.get(device_id)
        iface = device.interface(interface) if device is not None else None
        port = self.attachment(Endpoint(device_id, interface)) if iface is not None else None
        if iface is None or not iface.edge_facing or port is None:
            error_stack('SIM-NOT-EDGE', f'{device_id}:{interface}')
        self.packet_ins += 1
        return TrafficObservation(port.node, port.port, device_id, interface)
