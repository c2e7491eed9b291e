"""
Module: Probe-Pair Tokens

Controller-side table mapping opaque 64-bit tokens to clear probe pairs, used when
header security hides the probe-pair identity on the wire.
"""

import logging
import random
from dataclasses import dataclass

from ..protocol import ClearPair, Token
from ._error import error_stack

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProbeIdToken:
    """A live token mapping."""
    token: Token
    pair: ClearPair
    issued_at: int
    expires_at: int


class TokenTable:
    """
    Live token mappings with a validity window in simulation ticks.

    Args:
        rng: Randomness source with ``getrandbits``.
        validity (int): Ticks a token stays resolvable after issuance.
    """

    def __init__(self, rng=None, validity=72):
        self.rng = rng or random.SystemRandom()
        self.validity = validity
        self._live = {}
        self.collisions = 0

    def __len__(self):
        return len(self._live)

    def __contains__(self, token):
        return token in self._live

    def issue(self, pair, now=0):
        """
        Issues a token for `pair`, unique among live mappings.

        Colliding draws are retried.
        """
        while True:
            token = Token(self.rng.getrandbits(64))
            if token not in self._live:
                break
            self.collisions += 1
            logger.debug('token collision on %s, retrying', token)
        self._live[token] = ProbeIdToken(token, pair, now, now + self.validity)
        return token

    def resolve(self, token, now=0):
        """
        Returns the clear pair a live token stands for.

        Raises:
            UnknownToken: Never issued, or the validity window has lapsed.
        """
        record = self._live.get(token)
        if record is None or now > record.expires_at:
            error_stack('SEC-TOKEN', str(token))
        return record.pair

    def revoke(self, tokens):
        """Drops the given mappings; unknown tokens are ignored."""
        for token in tokens:
            self._live.pop(token, None)

    def purge(self, now=None):
        """Drops expired mappings, or every mapping when `now` is None."""
        if now is None:
            self._live.clear()
            return
        for token in [t for t, r in self._live.items() if now > r.expires_at]:
            del self._live[token]
