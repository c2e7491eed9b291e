"""
Value Type Error Handling Module
--------------------------------

This module defines the errors raised when a configuration value or experiment option
fails validation, and registers them in the sub-package error stack.

Classes:
--------
ValueTypeMetaError
    The value cannot be converted to the declared meta type.
ValueTypeConditionFormatError
    The declared condition itself is malformed.
ValueTypeConditionMatchError
    The value does not satisfy the declared condition.
"""

from ..error.error import ErrorStack, TopoManError


class ValueTypeMetaError(TopoManError, TypeError):
    """
    Exception raised when a value is not of the declared meta type.
    """


class ValueTypeConditionFormatError(TopoManError, ValueError):
    """
    Exception raised when a condition (range, pattern) is itself irregular.
    """


class ValueTypeConditionMatchError(TopoManError, ValueError):
    """
    Exception raised when a value falls outside its declared condition.
    """


_module_name = 'VALUE-META'

error_stack = ErrorStack({
    f'{_module_name}-INT': dict(type=ValueTypeMetaError, info='Not integer data'),
    f'{_module_name}-NUM-MIN': dict(type=ValueTypeConditionMatchError, info='Value smaller than min'),
    f'{_module_name}-NUM-MAX': dict(type=ValueTypeConditionMatchError, info='Value larger than max'),
    f'{_module_name}-NUM-MINMAX': dict(type=ValueTypeConditionFormatError, info='Min > Max'),
    f'{_module_name}-NUM-IRR': dict(type=ValueTypeConditionFormatError, info='Irregular conditional format'),
    f'{_module_name}-STR': dict(type=ValueTypeMetaError, info='Not string data'),
    f'{_module_name}-STR-IRR': dict(type=ValueTypeConditionFormatError, info='Irregular conditional format'),
    f'{_module_name}-STR-NM': dict(type=ValueTypeConditionMatchError, info='Regular expression not match'),
    f'{_module_name}-INTARR': dict(type=ValueTypeMetaError, info='Not integer array'),
    f'{_module_name}-INTARR-EMPTY': dict(type=ValueTypeConditionMatchError, info='Array shorter than min length'),
    f'{_module_name}-INTARR-IRR': dict(type=ValueTypeConditionFormatError, info='Irregular conditional format'),
})
