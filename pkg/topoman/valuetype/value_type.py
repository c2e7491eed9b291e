"""
Module: ValueType

This module provides `ValueType`, a named value type with a meta type and an optional
condition, used to validate every field read from network configuration files and every
experiment option. A handful of predefined types cover the fields the package reads.
"""

from .meta_model import (
    ValueMetaTypeInteger,
    ValueMetaTypeIntegerArray,
    ValueMetaTypeString,
)


class ValueType:
    """
    A named value type with metadata and validation.

    Attributes:
        meta (str): Meta type ('string', 'integer' or 'intarray').
        id (str): Unique identifier for the value type.
        name (str): Human readable name.
        doc (str): Documentation string.
        condition (optional): Validation condition for the meta type.
    """

    _accept_meta_types = {
        'string': ValueMetaTypeString,
        'integer': ValueMetaTypeInteger,
        'intarray': ValueMetaTypeIntegerArray,
    }

    def __init__(self, meta='string', id='', name='', doc='', condition=None):
        if meta not in self._accept_meta_types:
            raise ValueError(f'Unsupported meta type {meta}')
        self.meta = meta
        self.id = id
        self.name = name
        self.doc = doc
        self.condition = condition

    def to_dict(self):
        """
        Converts the ValueType instance to a dictionary.

        Returns:
            dict: Dictionary representation of the value type.
        """
        return {
            'meta': self.meta,
            'id': self.id,
            'name': self.name,
            'doc': self.doc,
            'condition': self.condition,
        }

    def __repr__(self):
        return f'<{self.name}({self.meta}) {self.id}>'

    def __call__(self, data, label=None):
        """
        Validates `data` against the meta type and condition.

        Args:
            data: Raw value.
            label (str, optional): Field name used in error messages. Defaults to the type id.

        Returns:
            The converted and validated value.
        """
        meta_type_class = self._accept_meta_types[self.meta]
        return meta_type_class(data, self.condition, label=label or self.id).data


# Predefined value types
value_types = {
    'device_id': ValueType(meta='string', id='device_id', name='Device ID',
                           doc='Middlebox or switch identifier.', condition=r'[A-Za-z][A-Za-z0-9_.\-]*'),
    'iface_name': ValueType(meta='string', id='iface_name', name='Interface Name',
                            doc='Interface or port name.', condition=r'[A-Za-z][A-Za-z0-9_.\-/]*'),
    'prefix_len': ValueType(meta='integer', id='prefix_len', name='Prefix Length',
                            doc='IPv4 prefix length.', condition={'min': 0, 'max': 32}),
    'ipv4': ValueType(meta='string', id='ipv4', name='IPv4 Address',
                      doc='Dotted quad IPv4 address.', condition=r'\d{1,3}(\.\d{1,3}){3}'),
    'kind': ValueType(meta='string', id='kind', name='Middlebox Kind',
                      doc='Middlebox role.', condition=r'firewall|ids|proxy|vpn|load_balancer|generic'),
    'ttl_max': ValueType(meta='integer', id='ttl_max', name='Probe TTL Threshold',
                         doc='Maximum probe hop count.', condition={'min': 1, 'max': 255}),
    'nodes': ValueType(meta='integer', id='nodes', name='Node Count',
                       doc='Number of middleboxes.', condition={'min': 2}),
    'seeds': ValueType(meta='intarray', id='seeds', name='Seeds',
                       doc='Random seeds, one run each.', condition={'min_len': 1}),
    'workers': ValueType(meta='integer', id='workers', name='Workers',
                         doc='Worker processes.', condition={'min': 1, 'max': 256}),
    'family': ValueType(meta='string', id='family', name='Topology Family',
                        doc='Generated topology family.', condition=r'cisco|inline_offline|tree|full_mesh'),
    'heuristic': ValueType(meta='string', id='heuristic', name='Selection Heuristic',
                           doc='Probe-pair selection mode.', condition=r'edge|random|policy'),
    'egress': ValueType(meta='string', id='egress', name='Egress Mode',
                        doc='Output interface approach.', condition=r'predict|steer'),
    'flag': ValueType(meta='integer', id='flag', name='Flag', doc='Boolean switch.',
                      condition={'min': 0, 'max': 1}),
}
