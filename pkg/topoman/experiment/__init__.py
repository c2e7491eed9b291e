"""
Module: Experiment

Experiment sweeps over generated topologies and their metric tables.
"""

from .options import ExperimentSpec, RunSpec, parameters, parse_seeds
from .suite import SuiteResult, run_network, run_suite, tabulate
from ._error import InvalidExperiment
