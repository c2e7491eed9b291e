"""
Module: Payload Security

Sealing of probe payloads to the controller and the probe-pair token table.
"""

from ..protocol import SealedPayload
from .sealing import (
    AuthenticatedHeaderFields,
    ControllerKeyPair,
    open_payload,
    open_segments,
    seal_entry,
    seal_payload,
)
from .tokens import ProbeIdToken, TokenTable
from ._error import DecryptError, IntegrityError, SecurityError, UnknownToken
