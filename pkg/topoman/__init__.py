"""
Module: TopoMan Package

Probe-based topology discovery for networks of middleboxes and SDN islands: the probe
protocol and its security envelope, middlebox agents, the controller-side topology
manager, a deterministic simulator, topology generators and the experiment suite.
"""

__version__ = '1.0.0'

from .manager import ManagerConfig, TopologyManager, verify_offline
from .simulator import DiscoveryMode, Simulation, run_discovery
from .topogen import generate_topology, parse_network_config, parse_policy_config
from .experiment import ExperimentSpec, run_suite
from .progress import LoadProgress
