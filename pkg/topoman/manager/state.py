"""
Module: Discovery State

Discovered and undiscovered interface bookkeeping of one discovery run.
"""

from collections import Counter
from dataclasses import dataclass, field

from ..topology import Endpoint

ATTEMPT_CAP = 2


@dataclass
class DiscoveryState:
    """
    Attributes:
        undiscovered (set): `Endpoint` (device, interface) values not yet on a link.
        discovered (set): Interfaces with an inserted incident link.
        attempts (Counter): (src, dst) interface pair -> times selected.
        pending_probes (set): Tokens issued this round; revoked when the next round begins.
        edge_set (frozenset): Edge device ids.
        edge_facing (frozenset): Interfaces flagged as attached to an edge switch.
        attempt_cap (int): Selections allowed per pair.
    """
    undiscovered: set = field(default_factory=set)
    discovered: set = field(default_factory=set)
    attempts: Counter = field(default_factory=Counter)
    pending_probes: set = field(default_factory=set)
    edge_set: frozenset = frozenset()
    edge_facing: frozenset = frozenset()
    attempt_cap: int = ATTEMPT_CAP

    def add_interfaces(self, device):
        for iface in device.interfaces:
            self.undiscovered.add(Endpoint(device.id, iface.name))
        self.edge_facing = self.edge_facing | {
            Endpoint(device.id, iface.name) for iface in device.interfaces if iface.edge_facing
        }

    def mark_discovered(self, endpoint):
        """Moves an interface to discovered; returns False if it already was."""
        endpoint = Endpoint(*endpoint)
        if endpoint in self.discovered:
            return False
        self.undiscovered.discard(endpoint)
        self.discovered.add(endpoint)
        return True

    def record_attempt(self, src, dst):
        self.attempts[(src, dst)] += 1

    def can_attempt(self, src, dst):
        return self.attempts[(src, dst)] < self.attempt_cap

    @property
    def max_attempts(self):
        return max(self.attempts.values(), default=0)
