"""
Manager Error Handling Module
-----------------------------

Errors raised by the topology manager.

Classes:
--------
ManagerError
    Base of the manager errors.
DuplicateDevice
    A device id registered twice.
UnknownDevice
    A report names a device or interface that never registered.
CorruptReport
    A sealed report failed to open or verify.
InvalidPathSpec
    A path specification is reserved, empty or not adjacent in the reference graph.
"""

from ..error.error import ErrorStack, TopoManError


class ManagerError(TopoManError):
    """Base class for topology manager errors."""


class DuplicateDevice(ManagerError, ValueError):
    """Device id already registered."""


class UnknownDevice(ManagerError, LookupError):
    """Report from or about an unregistered device."""


class CorruptReport(ManagerError):
    """Integrity or decryption failure on a sealed report."""


class InvalidPathSpec(ManagerError, ValueError):
    """Path specification rejected before setup."""


_module_name = 'MGR'

error_stack = ErrorStack({
    f'{_module_name}-DUPLICATE': dict(type=DuplicateDevice, info='Device already registered'),
    f'{_module_name}-UNKNOWN-DEVICE': dict(type=UnknownDevice, info='Unregistered device'),
    f'{_module_name}-UNKNOWN-IFACE': dict(type=UnknownDevice, info='Unregistered interface'),
    f'{_module_name}-CORRUPT': dict(type=CorruptReport, info='Sealed report failed verification'),
    f'{_module_name}-CAPABILITY': dict(type=CorruptReport, info='Malformed capability line'),
    f'{_module_name}-PATH-ID': dict(type=InvalidPathSpec, info='Path-id 0 is reserved for discovery'),
    f'{_module_name}-PATH-SHORT': dict(type=InvalidPathSpec, info='Path needs at least two devices'),
    f'{_module_name}-PATH-NODE': dict(type=InvalidPathSpec, info='Path names an unknown device'),
    f'{_module_name}-PATH-ADJACENT': dict(type=InvalidPathSpec, info='Consecutive path devices are not adjacent'),
    f'{_module_name}-POLICY': dict(type=ManagerError, info='Policy heuristic needs a policy list'),
})
