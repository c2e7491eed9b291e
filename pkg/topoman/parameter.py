"""
Module: Parameter Definition

This module defines the `Parameter` class describing one experiment option: its name,
value type, description, default and optionality. `ExperimentSpec` validates user
options against the declared parameters, and the CLI derives its help text from them.
"""

from .valuetype.value_type import ValueType, value_types


class Parameter:
    """
    An experiment option with metadata.

    Attributes:
        name (str): Name of the option.
        desc (str): Description of the option.
        optional (bool): Whether the option may be left out.
        default: Value used when the option is left out.
        valuetype (ValueType): Type the raw value is validated against.
    """

    def __init__(self, name, value_type, desc='', default_value=None, optional=False):
        """
        Args:
            name (str): Name of the option.
            value_type (ValueType, str or dict): A `ValueType`, the id of a predefined one,
                or keyword arguments for a new one.
            desc (str, optional): Description. Defaults to an empty string.
            default_value (optional): Default value. Defaults to None.
            optional (bool, optional): Whether the option is optional. Defaults to False.
        """
        self.name = name
        self.desc = desc
        self.optional = optional
        self.default = default_value
        if isinstance(value_type, ValueType):
            self.valuetype = value_type
        elif isinstance(value_type, str):
            self.valuetype = value_types[value_type]
        else:
            self.valuetype = ValueType(**value_type)

    def __call__(self, value):
        """Validates `value`; the option name labels any error."""
        if self.valuetype.id == 'flag':
            return bool(self.valuetype(int(value) if isinstance(value, bool) else value, label=self.name))
        return self.valuetype(value, label=self.name)

    def to_dict(self):
        return {
            'name': self.name,
            'value_type': self.valuetype.to_dict(),
            'desc': self.desc,
            'default_value': self.default,
            'optional': self.optional,
        }

    @property
    def property(self):
        """
        Simplified view used for help and documentation tables.

        Returns:
            dict: Name, value type id, optionality, default and description.
        """
        return {
            'name': self.name,
            'type': self.valuetype.id,
            'optional': self.optional,
            'default': self.default,
            'desc': self.desc,
        }

    @staticmethod
    def integer(name, desc='', default_value=None, optional=False, minimum=None, maximum=None):
        """Creates an integer option with an optional range."""
        return Parameter(
            name,
            ValueType(meta='integer', id='integer', name='integer', condition={'min': minimum, 'max': maximum}),
            desc,
            default_value,
            optional,
        )

    @staticmethod
    def string(name, desc='', default_value=None, optional=False, pattern=None):
        """Creates a string option, optionally restricted to a regular expression."""
        return Parameter(
            name,
            ValueType(meta='string', id='string', name='string', condition=pattern),
            desc,
            default_value,
            optional,
        )

    @staticmethod
    def flag(name, desc='', default_value=False):
        """Creates an optional on/off option."""
        return Parameter(name, value_types['flag'], desc, default_value, optional=True)


def build_params(parameters, options):
    """
    Validates `options` against `parameters`.

    Optional parameters missing from `options` take their default; unknown option names
    are ignored.

    Args:
        parameters (dict): Name -> `Parameter`.
        options (dict): Raw option values.

    Returns:
        dict: Validated values for every parameter.

    Raises:
        KeyError: A required option is missing.
    """
    params = {}
    for name, parameter in parameters.items():
        if options.get(name) is None:
            if not parameter.optional:
                raise KeyError(f'{name} is required.')
            params[name] = parameter.default
        else:
            params[name] = parameter(options[name])
    return params
