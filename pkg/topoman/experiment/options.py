"""
Module: Experiment Options

`ExperimentSpec` names a sweep: topology families and sizes, seeds, selection
heuristics, payload modes and the shared security and TTL settings. Options are
declared as `Parameter` values and validated through them, whether they come from
the command line, keyword arguments or a JSON file.
"""

import json
import re
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import NamedTuple

from ..error.error import TopoManError
from ..parameter import Parameter, build_params
from ..protocol.message import DEFAULT_TTL_MAX
from ..simulator.harness import DiscoveryMode
from ..topogen.generator import FAMILIES
from ._error import error_stack

parameters = {
    'families': Parameter('families', 'family', 'Topology families to sweep.', FAMILIES, optional=True),
    'nodes': Parameter('nodes', 'nodes', 'Middleboxes per generated network.', (20,), optional=True),
    'seeds': Parameter('seeds', 'seeds', 'Seeds, one run per seed and configuration.'),
    'heuristics': Parameter('heuristics', 'heuristic', 'Probe-pair selection modes.', ('edge', 'random'), optional=True),
    'appends': Parameter.flag('appends', 'Payload-append settings to sweep.', (False, True)),
    'header_sec': Parameter.flag('header_sec', 'Token probe-pair identities.'),
    'payload_sec': Parameter.flag('payload_sec', 'Sealed payload entries.'),
    'ttl_max': Parameter('ttl_max', 'ttl_max', 'Probe TTL threshold.', DEFAULT_TTL_MAX, optional=True),
    'egress': Parameter('egress', 'egress', 'Output interface approach.', 'predict', optional=True),
    'workers': Parameter('workers', 'workers', 'Worker processes.', 1, optional=True),
    'timing': Parameter.flag('timing', 'Add wall-clock seconds to the table.'),
    'out': Parameter.string('out', 'CSV output path.', optional=True),
}

_sweeps = ('families', 'nodes', 'heuristics', 'appends')
_RANGE = re.compile(r'\s*(-?\d+)\s*-\s*(-?\d+)\s*')


def parse_seeds(text):
    """
    Reads a seed list such as ``0-29`` or ``1,5,9-11``.

    Raises:
        InvalidExperiment: The text is not a seed list.
    """
    if not isinstance(text, str):
        return list(text)
    seeds = []
    for part in filter(None, (item.strip() for item in text.split(','))):
        match = _RANGE.fullmatch(part)
        if match:
            low, high = int(match.group(1)), int(match.group(2))
            if high < low:
                error_stack('EXP-SEEDS', part)
            seeds.extend(range(low, high + 1))
        elif re.fullmatch(r'-?\d+', part):
            seeds.append(int(part))
        else:
            error_stack('EXP-SEEDS', part)
    return seeds


def _items(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(',') if item.strip()]
    if isinstance(value, (list, tuple, set, frozenset)):
        return list(value)
    return [value]


class RunSpec(NamedTuple):
    """One generated network; every mode of the sweep runs on it."""
    family: str
    nodes: int
    seed: int


@dataclass(frozen=True)
class ExperimentSpec:
    """
    A validated experiment sweep.

    Attributes:
        families (tuple): Topology families.
        nodes (tuple): Middlebox counts.
        seeds (tuple): At least one seed.
        heuristics (tuple): Selection modes ('edge', 'random', 'policy').
        appends (tuple): Payload-append settings.
        header_sec (bool): Token probe-pair identities.
        payload_sec (bool): Sealed payload entries.
        ttl_max (int): TTL threshold.
        egress (str): 'predict' or 'steer'.
        workers (int): Worker processes.
        timing (bool): Report wall-clock seconds.
        out (str): CSV path, or None.
    """
    families: tuple
    nodes: tuple
    seeds: tuple
    heuristics: tuple = ('edge', 'random')
    appends: tuple = (False, True)
    header_sec: bool = False
    payload_sec: bool = False
    ttl_max: int = DEFAULT_TTL_MAX
    egress: str = 'predict'
    workers: int = 1
    timing: bool = False
    out: str = None

    @classmethod
    def from_options(cls, **options):
        """
        Validates raw options against the declared parameters.

        List-valued options accept a sequence or a comma separated string; seeds also
        accept ranges such as ``0-29``.

        Raises:
            InvalidExperiment: An option is missing or invalid.
        """
        options = {name: value for name, value in options.items() if value is not None}
        try:
            if 'seeds' in options:
                options['seeds'] = parse_seeds(options['seeds'])
            values = build_params({name: p for name, p in parameters.items() if name not in _sweeps}, options)
            for name in _sweeps:
                parameter = parameters[name]
                raw = options.get(name, parameter.default)
                values[name] = tuple(dict.fromkeys(parameter(item) for item in _items(raw)))
        except KeyError as e:
            raise error_stack.build('EXP-MISSING', str(e)) from e
        except TopoManError as e:
            raise error_stack.build('EXP-OPTION', str(e)) from e
        values['seeds'] = tuple(values['seeds'])
        for name in _sweeps:
            if not values[name]:
                error_stack('EXP-OPTION', f'{name} is empty')
        return cls(**values)

    @classmethod
    def from_json(cls, path, **overrides):
        """Loads options from a JSON object file; `overrides` win over the file."""
        try:
            options = json.loads(Path(path).read_text())
        except (OSError, ValueError) as e:
            raise error_stack.build('EXP-JSON', f'{path}: {e}') from e
        if not isinstance(options, dict):
            error_stack('EXP-JSON', f'{path}: not an object')
        options.update({name: value for name, value in overrides.items() if value is not None})
        return cls.from_options(**options)

    def to_dict(self):
        return asdict(self)

    def runs(self):
        """Networks to generate, in sorted order."""
        return [RunSpec(family, n, seed)
                for family in sorted(self.families)
                for n in sorted(self.nodes)
                for seed in sorted(self.seeds)]

    def modes(self):
        """`DiscoveryMode` values of the sweep."""
        return [DiscoveryMode(heuristic, append, self.header_sec, self.payload_sec, self.ttl_max, self.egress)
                for heuristic in self.heuristics for append in self.appends]
