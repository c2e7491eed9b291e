"""
Topology Error Handling Module
------------------------------

Errors raised by the topology model and route lookup.

Classes:
--------
TopologyError
    Base of the topology errors.
NoRoute
    No route entry and no connected subnet covers the destination.
UnknownEndpoint
    A link endpoint names an interface or port that does not exist.
InvalidTopology
    A device, island or graph violates a structural invariant.
"""

from ..error.error import ErrorStack, TopoManError


class TopologyError(TopoManError):
    """Base class for topology model errors."""


class NoRoute(TopologyError, LookupError):
    """No matching prefix and no default route."""


class UnknownEndpoint(TopologyError, LookupError):
    """Link endpoint not present in the graph."""


class InvalidTopology(TopologyError, ValueError):
    """Structural invariant violated."""


_module_name = 'TOPO'

error_stack = ErrorStack({
    f'{_module_name}-NO-ROUTE': dict(type=NoRoute, info='No route to destination'),
    f'{_module_name}-ENDPOINT': dict(type=UnknownEndpoint, info='Unknown link endpoint'),
    f'{_module_name}-LINK-SELF': dict(type=InvalidTopology, info='Link endpoints must be distinct'),
    f'{_module_name}-NO-IFACE': dict(type=InvalidTopology, info='Middlebox needs at least one interface'),
    f'{_module_name}-IFACE-DUP': dict(type=InvalidTopology, info='Interface name repeated on device'),
    f'{_module_name}-KIND': dict(type=InvalidTopology, info='Unknown middlebox kind'),
    f'{_module_name}-DYNAMIC': dict(type=InvalidTopology, info='Only load balancers choose egress dynamically'),
    f'{_module_name}-ROUTE-IFACE': dict(type=InvalidTopology, info='Route names an interface the device lacks'),
    f'{_module_name}-NODE-DUP': dict(type=InvalidTopology, info='Node identifier already present'),
    f'{_module_name}-ADDRESS': dict(type=InvalidTopology, info='Bad IPv4 address or prefix'),
})
