"""
Module: Topology Manager

Controller-side discovery: registration, edge heuristics, probe-pair selection, link
inference, termination, late discovery, device monitoring and verification.
"""

from .heuristics import INTERFACE_BASED, POLICY_BASED, PolicyRule, compute_edge_set, endpoint_networks
from .manager import Continue, Done, ManagerConfig, TopologyManager, parse_interface_line, parse_route_line
from .monitor import DOWN, UNKNOWN, UP, DeviceMonitor
from .selection import EDGE_HEURISTIC, EXHAUSTED, RANDOM_SELECT, ProbePairSelector, select_probe_pair
from .state import ATTEMPT_CAP, DiscoveryState
from .verification import (
    PathFail,
    PathOk,
    PathSpec,
    VerificationReport,
    judge_path_report,
    run_path_verification,
    verify_offline,
)
from ._error import CorruptReport, DuplicateDevice, InvalidPathSpec, ManagerError, UnknownDevice
