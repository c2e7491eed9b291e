"""
Experiment Error Handling Module
--------------------------------

Classes:
--------
InvalidExperiment
    Experiment options failed validation.
"""

from ..error.error import ErrorStack, TopoManError


class InvalidExperiment(TopoManError, ValueError):
    """Experiment options are missing or out of range."""


_module_name = 'EXP'

error_stack = ErrorStack({
    f'{_module_name}-OPTION': dict(type=InvalidExperiment, info='Invalid experiment option'),
    f'{_module_name}-MISSING': dict(type=InvalidExperiment, info='Required experiment option missing'),
    f'{_module_name}-SEEDS': dict(type=InvalidExperiment, info='Unreadable seed list'),
    f'{_module_name}-JSON': dict(type=InvalidExperiment, info='Unreadable experiment file'),
})
