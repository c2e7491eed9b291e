"""
Topology Generation Error Handling Module
-----------------------------------------

Errors raised while parsing or validating network and policy configuration.

Classes:
--------
ConfigError
    Base of the configuration errors.
ParseError
    A line does not follow the configuration grammar.
InconsistentRoute
    A route's next hop is not reachable over a link from its out interface.
SubnetMismatch
    Linked interfaces are on different subnets.
"""

from ..error.error import ErrorStack, TopoManError


class ConfigError(TopoManError, ValueError):
    """Base class for configuration errors."""


class ParseError(ConfigError):
    """Malformed configuration line."""


class InconsistentRoute(ConfigError):
    """Route next hop not adjacent through the out interface."""


class SubnetMismatch(ConfigError):
    """Linked interfaces on different subnets."""


_module_name = 'CONF'

error_stack = ErrorStack({
    f'{_module_name}-SECTION': dict(type=ParseError, info='Unknown section'),
    f'{_module_name}-OUTSIDE': dict(type=ParseError, info='Line outside any section'),
    f'{_module_name}-FIELDS': dict(type=ParseError, info='Wrong number of fields'),
    f'{_module_name}-VALUE': dict(type=ParseError, info='Bad value'),
    f'{_module_name}-DEVICE': dict(type=ParseError, info='Unknown device'),
    f'{_module_name}-INTERFACE': dict(type=ParseError, info='Unknown interface'),
    f'{_module_name}-DUPLICATE': dict(type=ParseError, info='Duplicate definition'),
    f'{_module_name}-ENDPOINT': dict(type=ParseError, info='Unknown link endpoint'),
    f'{_module_name}-ROUTE': dict(type=InconsistentRoute, info='Next hop not reachable over a link'),
    f'{_module_name}-SUBNET': dict(type=SubnetMismatch, info='Linked interfaces on different subnets'),
})
