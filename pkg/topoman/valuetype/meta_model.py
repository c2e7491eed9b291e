"""
ValueMetaType module
--------------------

Meta types used to coerce and check configuration values: integers with a range,
strings matching a regular expression, and integer arrays (seed lists). Each meta type
formats the raw value first and then checks it against an optional condition; failures
go through the sub-package error stack.

Classes:
--------
ValueMetaTypeModel
    Base class: format, then check.
ValueMetaTypeInteger
    Integer values, condition ``{'min': .., 'max': ..}``.
ValueMetaTypeString
    String values, condition is a regular expression matched in full.
ValueMetaTypeIntegerArray
    Lists of integers, condition ``{'min_len': ..}``.
"""

import re
from ._error import error_stack


class ValueMetaTypeModel(object):
    """
    Base class for value meta types.

    Attributes:
    ----------
    _meta : str
        The name of the meta type.
    data : any
        The formatted and validated value.
    """

    _meta = 'null'

    def __init__(self, data, condition=None, label=None):
        """
        Formats and checks `data`.

        Parameters:
        ----------
        data : any
            The raw value.
        condition : any, optional
            The condition to validate against.
        label : str, optional
            Field name included in error messages.
        """
        self._label = label
        self._meta_data = self._format(data)
        self.data = self._check(self._meta_data, condition)

    def _fail(self, errid, value=None):
        detail = self._label if value is None else f'{self._label}={value!r}'
        error_stack(errid, detail)

    def _format(self, data):
        raise NotImplementedError

    def _check(self, meta_data, condition=None):
        raise NotImplementedError

    def _check_range(self, meta_data, condition):
        if condition is None:
            return meta_data
        if not isinstance(condition, dict):
            self._fail('VALUE-META-NUM-IRR')
        _min = condition.get('min')
        _max = condition.get('max')
        if _min is not None and _max is not None and _min > _max:
            self._fail('VALUE-META-NUM-MINMAX')
        if _min is not None and meta_data < _min:
            self._fail('VALUE-META-NUM-MIN', meta_data)
        if _max is not None and meta_data > _max:
            self._fail('VALUE-META-NUM-MAX', meta_data)
        return meta_data


class ValueMetaTypeInteger(ValueMetaTypeModel):
    """
    Integer values checked against an optional ``min``/``max`` range.

    Booleans and non-integral floats are rejected; decimal strings are accepted.
    """

    _meta = 'int'

    def _format(self, data):
        if isinstance(data, bool):
            self._fail('VALUE-META-INT', data)
        if isinstance(data, int):
            return data
        if isinstance(data, str) and re.fullmatch(r'[+-]?\d+', data.strip()):
            return int(data)
        if isinstance(data, float) and data.is_integer():
            return int(data)
        self._fail('VALUE-META-INT', data)

    def _check(self, meta_data, condition=None):
        return self._check_range(meta_data, condition)


class ValueMetaTypeIntegerArray(ValueMetaTypeModel):
    """Lists of integers; a comma separated string is split first."""

    _meta = 'array(int)'

    def _format(self, data):
        if isinstance(data, str):
            data = [item for item in data.split(',') if item.strip()]
        try:
            return [ValueMetaTypeInteger(item, label=self._label).data for item in data]
        except TypeError:
            self._fail('VALUE-META-INTARR', data)

    def _check(self, meta_data, condition=None):
        if condition is None:
            return meta_data
        if not isinstance(condition, dict):
            self._fail('VALUE-META-INTARR-IRR')
        if len(meta_data) < condition.get('min_len', 0):
            self._fail('VALUE-META-INTARR-EMPTY', meta_data)
        return meta_data


class ValueMetaTypeString(ValueMetaTypeModel):
    """Strings matched in full against an optional regular expression."""

    _meta = 'string'

    def _format(self, data):
        if data is None:
            self._fail('VALUE-META-STR', data)
        return str(data)

    def _check(self, meta_data, condition=None):
        if condition is None:
            return meta_data
        if not isinstance(condition, str):
            self._fail('VALUE-META-STR-IRR')
        if re.fullmatch(condition, meta_data) is None:
            self._fail('VALUE-META-STR-NM', meta_data)
        return meta_data
