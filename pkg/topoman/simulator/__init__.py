"""
Module: Simulator

Discrete-event simulation of middlebox agents, SDN islands and the topology manager.
"""

from .events import SimEvent, Transcript
from .harness import DiscoveryMode, DiscoveryResult, Simulation, capabilities_of, run_discovery
from .metrics import Metrics
from .sdn import SdnControllerModel, TrafficObservation
from ._error import NotEdgeAttached, SimulationInvariantError, SimulatorError
