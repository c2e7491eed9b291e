"""
Module: Edge Heuristics

Identification of edge middleboxes, either from interface subnets alone or from the
source and destination networks of the policy configuration.
"""

import ipaddress
from collections import Counter
from dataclasses import dataclass

from ._error import error_stack

INTERFACE_BASED = 'edge'
POLICY_BASED = 'policy'


@dataclass(frozen=True)
class PolicyRule:
    """A network policy; `action` is opaque to discovery."""
    src_network: ipaddress.IPv4Network
    dst_network: ipaddress.IPv4Network
    action: str = 'allow'

    def __post_init__(self):
        object.__setattr__(self, 'src_network', ipaddress.IPv4Network(self.src_network))
        object.__setattr__(self, 'dst_network', ipaddress.IPv4Network(self.dst_network))

    def __str__(self):
        return f'{self.src_network} -> {self.dst_network} {self.action}'


def interface_edge_set(devices):
    """
    Devices owning at least one interface subnet that no other middlebox shares.

    Link and island subnets are shared by the attached devices, so what remains unique
    are the networks a device fronts alone.
    """
    owners = Counter()
    for mb in devices:
        for network in {iface.network for iface in mb.interfaces}:
            owners[network] += 1
    return frozenset(mb.id for mb in devices
                     if any(owners[iface.network] == 1 for iface in mb.interfaces))


def endpoint_networks(policies):
    """Policy networks that appear only as a source or only as a destination."""
    srcs = {rule.src_network for rule in policies}
    dsts = {rule.dst_network for rule in policies}
    return frozenset((srcs | dsts) - (srcs & dsts))


def policy_edge_set(devices, policies):
    networks = endpoint_networks(policies)
    return frozenset(
        mb.id for mb in devices
        if any(iface.network.subnet_of(net) for iface in mb.interfaces for net in networks)
    )


def compute_edge_set(devices, policies=None, heuristic=INTERFACE_BASED):
    """
    Computes the edge middlebox ids.

    Args:
        devices (iterable): Registered `Middlebox` values.
        policies (list): `PolicyRule` values, required by the policy heuristic.
        heuristic (str): 'edge' (interface based) or 'policy'.

    Returns:
        frozenset: Edge device ids, independent of registration order.
    """
    devices = list(devices)
    if heuristic == POLICY_BASED:
        if policies is None:
            error_stack('MGR-POLICY')
        return policy_edge_set(devices, policies)
    return interface_edge_set(devices)
