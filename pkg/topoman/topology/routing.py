"""
Module: Route Lookup

Longest-prefix match over a middlebox's route entries, with its directly connected
subnets implicitly present. Entries are indexed by prefix length, so a lookup probes at
most one dictionary per distinct length, longest first. At equal prefix length the
first declared entry wins; connected subnets are declared ahead of the explicit routes.
"""

import ipaddress
from functools import lru_cache

from ._error import NoRoute, error_stack
from .model import DIRECT, RouteEntry


@lru_cache(maxsize=65536)
def _address(dest):
    return int(ipaddress.IPv4Address(dest))


class RouteTable:
    """
    Indexed route table of one device.

    Args:
        routes (iterable): Explicit `RouteEntry` values in declaration order.
        interfaces (iterable): Interfaces whose subnets are directly connected.
    """

    def __init__(self, routes=(), interfaces=()):
        connected = [RouteEntry(str(iface.network.network_address), iface.prefix_len, iface.name, DIRECT)
                     for iface in interfaces]
        self.entries = tuple(connected) + tuple(routes)
        self._index = {}
        for entry in self.entries:
            network = entry.network
            by_prefix = self._index.setdefault(network.prefixlen, {})
            by_prefix.setdefault(int(network.network_address), entry)
        self._lengths = sorted(self._index, reverse=True)

    def __len__(self):
        return len(self.entries)

    def lookup(self, dest):
        """
        Returns the matching `RouteEntry` for `dest`.

        Raises:
            NoRoute: No prefix covers `dest`.
        """
        address = _address(dest)
        for length in self._lengths:
            mask = (0xFFFFFFFF << (32 - length)) & 0xFFFFFFFF
            entry = self._index[length].get(address & mask)
            if entry is not None:
                return entry
        error_stack('TOPO-NO-ROUTE', str(dest))


def lookup_route(mb, dest):
    """
    Returns the out interface `mb` uses toward `dest`.

    Raises:
        NoRoute: Neither a route nor a connected subnet covers `dest`.
    """
    try:
        return mb.route_table.lookup(dest).out_interface
    except NoRoute:
        raise error_stack.build('TOPO-NO-ROUTE', f'{mb.id} -> {dest}') from None


def lookup_entry(mb, dest):
    """Like `lookup_route` but returns the whole entry, next hop included."""
    return mb.route_table.lookup(dest)
