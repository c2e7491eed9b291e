"""
Module: Topology Model

Network graph types, longest-prefix route lookup and graph diffing.
"""

from .model import (
    DIRECT,
    MIDDLEBOX_KINDS,
    Endpoint,
    GraphDiff,
    Interface,
    Link,
    Middlebox,
    RouteEntry,
    SdnIsland,
    TopologyGraph,
    device_adjacency,
    diff_graphs,
    insert_link,
)
from .routing import RouteTable, lookup_entry, lookup_route
from ._error import InvalidTopology, NoRoute, TopologyError, UnknownEndpoint
