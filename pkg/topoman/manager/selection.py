"""
Module: Probe-Pair Selection

Chooses the next (source interface, destination interface) pair to probe.

A pair is eligible only when the source device's route toward the destination IP leaves
through the source interface, so the probe actually exits the selected interface. The
eligible destinations of every source interface are computed once from the registered
route tables. Selection then walks preference tiers:

    1. (edge heuristic only) both interfaces undiscovered, both devices edge
    2. both interfaces undiscovered
    3. source interface undiscovered

Within a tier the source interface is drawn uniformly among those with an eligible
destination, then the destination uniformly among its eligible destinations. Pairs
already selected `attempt_cap` times are never returned.
"""

import logging
from functools import lru_cache

from ..topology import Endpoint, NoRoute, lookup_route

logger = logging.getLogger(__name__)

EDGE_HEURISTIC = 'edge'
RANDOM_SELECT = 'random'


class _Exhausted:
    def __repr__(self):
        return 'EXHAUSTED'

    def __bool__(self):
        return False


EXHAUSTED = _Exhausted()


@lru_cache(maxsize=64)
def _eligibility(devices):
    """Source interface -> destinations its route toward them leaves through. Read-only."""
    targets = [(Endpoint(mb.id, iface.name), iface.ip) for mb in devices for iface in mb.interfaces]
    eligible = {}
    for mb in devices:
        per_interface = {iface.name: [] for iface in mb.interfaces}
        for dst, ip in targets:
            if dst.node == mb.id:
                continue
            try:
                per_interface[lookup_route(mb, ip)].append(dst)
            except NoRoute:
                continue
        for name, dsts in per_interface.items():
            if dsts:
                eligible[Endpoint(mb.id, name)] = tuple(dsts)
    return eligible


class ProbePairSelector:
    """
    Precomputed eligibility over a set of registered devices.

    Args:
        devices (iterable): Registered `Middlebox` values.
        edge_set (frozenset): Edge device ids.
    """

    def __init__(self, devices, edge_set=frozenset()):
        self.edge_set = frozenset(edge_set)
        self.eligible = _eligibility(tuple(sorted(devices, key=lambda mb: mb.id)))
        self.sources = tuple(sorted(self.eligible))
        logger.debug('%d source interfaces with eligible destinations', len(self.sources))

    def _tiers(self, state, mode):
        undiscovered = state.undiscovered
        edge = self.edge_set
        tiers = []
        if mode == EDGE_HEURISTIC:
            tiers.append((
                lambda src: src.node in edge,
                lambda src, dst: dst in undiscovered and dst.node in edge and state.can_attempt(src, dst),
            ))
        tiers.append((lambda src: True, lambda src, dst: dst in undiscovered and state.can_attempt(src, dst)))
        tiers.append((lambda src: True, lambda src, dst: state.can_attempt(src, dst)))
        return tiers

    def select(self, state, mode, rng):
        """
        Returns the next pair, or EXHAUSTED.

        Args:
            state (DiscoveryState): Current bookkeeping.
            mode (str): 'edge' or 'random'.
            rng (random.Random): Seeded selection randomness.
        """
        sources = [src for src in self.sources if src in state.undiscovered]
        for src_ok, dst_ok in self._tiers(state, mode):
            candidates = [src for src in sources if src_ok(src)]
            rng.shuffle(candidates)
            for src in candidates:
                dsts = [dst for dst in self.eligible[src] if dst_ok(src, dst)]
                if dsts:
                    return src, rng.choice(dsts)
        return EXHAUSTED


def select_probe_pair(state, selector, mode, rng):
    """Selects a pair and records the attempt; returns EXHAUSTED when none is eligible."""
    pair = selector.select(state, mode, rng)
    if pair is not EXHAUSTED:
        state.record_attempt(*pair)
    return pair
