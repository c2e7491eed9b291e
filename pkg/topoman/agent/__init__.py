"""
Module: MB Agent

Per-middlebox probe handling: origination, in-transit digestion, egress correction,
path-checker steering and heartbeats.
"""

from .agent import (
    PREDICT,
    STEER,
    AgentState,
    AppendAndForward,
    Drop,
    EgressRecord,
    Emission,
    Forward,
    MbAgent,
    PathRule,
    PathVerdict,
    SecurityPolicy,
    TerminalUpCall,
    UpCallAndForward,
)
from ._error import AgentError, NoRouteToDestination, PathBroken, UnresolvableToken
