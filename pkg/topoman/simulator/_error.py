"""
Simulator Error Handling Module
-------------------------------

Classes:
--------
SimulatorError
    Base of the simulator errors.
NotEdgeAttached
    Data traffic was injected on an interface that is not attached to an edge switch.
SimulationInvariantError
    The simulation reached a state the ground truth cannot produce; the run aborts.
"""

from ..error.error import ErrorStack, TopoManError


class SimulatorError(TopoManError):
    """Base class for simulator errors."""


class NotEdgeAttached(SimulatorError, ValueError):
    """Interface is not attached to an edge SDN switch."""


class SimulationInvariantError(SimulatorError, RuntimeError):
    """Dangling link endpoint or other ground-truth violation."""


_module_name = 'SIM'

error_stack = ErrorStack({
    f'{_module_name}-NOT-EDGE': dict(type=NotEdgeAttached, info='Interface is not attached to an edge switch'),
    f'{_module_name}-DANGLING': dict(type=SimulationInvariantError, info='Probe left on an unlinked interface'),
    f'{_module_name}-NO-TARGET': dict(type=SimulationInvariantError, info='Next hop not attached to the island'),
    f'{_module_name}-LEAK': dict(type=SimulationInvariantError, info='Events left after the round'),
})
