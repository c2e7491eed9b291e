"""
Module: Topology Generation

Network configuration and policy files, and seeded generation of the evaluation
topology families.
"""

from .config import (
    dumps_policy_config,
    loads_network_config,
    loads_policy_config,
    parse_network_config,
    parse_policy_config,
    serialize_network_config,
    write_network_config,
    write_policy_config,
)
from .generator import CISCO, FAMILIES, FULL_MESH, INLINE_OFFLINE, TREE, compute_routes, generate_topology
from .instance import NetworkInstance
from ._error import ConfigError, InconsistentRoute, ParseError, SubnetMismatch
