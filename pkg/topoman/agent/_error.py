"""
Agent Error Handling Module
---------------------------

Errors raised by the per-middlebox agent.

Classes:
--------
AgentError
    Base of the agent errors.
NoRouteToDestination
    PROBE-INIT named a destination none of whose interfaces is reachable.
UnresolvableToken
    The controller could not resolve a probe-pair token.
PathBroken
    A path-checker probe reached a device with no rule for its path-id.
"""

from ..error.error import ErrorStack, TopoManError


class AgentError(TopoManError):
    """Base class for agent errors."""


class NoRouteToDestination(AgentError, LookupError):
    """No destination interface is reachable from the source."""


class UnresolvableToken(AgentError):
    """Token unknown to the controller; the probe may be spoofed."""


class PathBroken(AgentError):
    """
    Missing port-routing rule for a path-checker probe.

    Attributes:
        report (PathReport): The BROKEN report to up-call, attached by the agent.
    """
    report = None


_module_name = 'AGENT'

error_stack = ErrorStack({
    f'{_module_name}-NO-ROUTE': dict(type=NoRouteToDestination, info='No route to any destination interface'),
    f'{_module_name}-TOKEN': dict(type=UnresolvableToken, info='Probe-pair token not resolvable'),
    f'{_module_name}-PATH-BROKEN': dict(type=PathBroken, info='No port-routing rule for path-id'),
    f'{_module_name}-NOT-PATHCHECK': dict(type=AgentError, info='Not a path-checker probe'),
})
