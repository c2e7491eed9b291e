"""
Module: Topology Manager

The controller's discovery engine. It registers device capabilities, selects probe
pairs, turns probe reports into links, tracks discovered interfaces and decides when
discovery is done.

Per-hop reports are correlated by probe identity (the probe-pair-ID as carried on the
wire) and TTL: the entry observed at TTL k and the one at TTL k+1 are consecutive hops.
A link is inserted as soon as both hops are known. When the SDN controller model saw the
probe cross an island between the two hops, the link is split into the two border links
of that island. Hops whose egress is PENDING wait for the matching correction.
"""

import ipaddress
import logging
import random
from dataclasses import dataclass
from functools import lru_cache

from ..protocol import NONE, PENDING, ClearPair, Token
from ..protocol.api import ProbeInit
from ..protocol.message import DEFAULT_TTL_MAX
from ..security import (
    AuthenticatedHeaderFields,
    DecryptError,
    IntegrityError,
    TokenTable,
    open_segments,
)
from ..topology import Endpoint, Interface, Link, Middlebox, NoRoute, RouteEntry, TopologyGraph, lookup_route
from ._error import error_stack
from .heuristics import INTERFACE_BASED, POLICY_BASED, compute_edge_set
from .monitor import DeviceMonitor
from .selection import EDGE_HEURISTIC, EXHAUSTED, RANDOM_SELECT, ProbePairSelector, select_probe_pair
from .state import ATTEMPT_CAP, DiscoveryState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ManagerConfig:
    """
    Discovery options.

    Attributes:
        heuristic (str): 'edge', 'policy' (edge heuristic with policy-based edge set) or 'random'.
        append (bool): Probes use payload append.
        header_sec (bool): Probe-pair identities are tokens.
        payload_sec (bool): Payload entries are sealed.
        ttl_max (int): TTL threshold.
        attempt_cap (int): Selections allowed per interface pair.
        token_validity (int): Ticks a token stays resolvable; defaults to ``2 * ttl_max + 8``.
    """
    heuristic: str = INTERFACE_BASED
    append: bool = False
    header_sec: bool = False
    payload_sec: bool = False
    ttl_max: int = DEFAULT_TTL_MAX
    attempt_cap: int = ATTEMPT_CAP
    token_validity: int = None

    @property
    def selection_mode(self):
        return RANDOM_SELECT if self.heuristic == RANDOM_SELECT else EDGE_HEURISTIC


@dataclass(frozen=True)
class Continue:
    pass


@dataclass(frozen=True)
class Done:
    residual: frozenset = frozenset()


@lru_cache(maxsize=65536)
def parse_interface_line(line):
    """``name ip/prefix [edge]`` as carried by DEVICE-CAPABILITIES."""
    parts = line.split()
    if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] != 'edge'):
        error_stack('MGR-CAPABILITY', line)
    try:
        iface = ipaddress.IPv4Interface(parts[1])
    except ValueError:
        error_stack('MGR-CAPABILITY', line)
    return Interface(parts[0], str(iface.ip), iface.network.prefixlen, len(parts) == 3)


@lru_cache(maxsize=65536)
def parse_route_line(line):
    """``prefix out_interface next_hop`` as carried by DEVICE-CAPABILITIES."""
    parts = line.split()
    if len(parts) != 3:
        error_stack('MGR-CAPABILITY', line)
    try:
        network = ipaddress.IPv4Network(parts[0])
    except ValueError:
        error_stack('MGR-CAPABILITY', line)
    return RouteEntry(str(network.network_address), network.prefixlen, parts[1], parts[2])


@lru_cache(maxsize=4096)
def device_from_capabilities(msg):
    """The `Middlebox` a DEVICE-CAPABILITIES message describes; equal messages share one device."""
    return Middlebox(
        id=msg.device_id,
        kind=msg.kind,
        interfaces=tuple(parse_interface_line(line) for line in msg.interfaces),
        routes=tuple(parse_route_line(line) for line in msg.routes),
        dynamic_egress=msg.dynamic_egress,
    )


class TopologyManager:
    """
    Controller-side discovery state machine.

    Args:
        config (ManagerConfig): Discovery options.
        keypair (ControllerKeyPair): Key pair for opening sealed reports.
        rng (random.Random): Seeded selection randomness.
        sdn: SDN controller model answering island transits; None when there are no islands.
        policies (list): `PolicyRule` values for the policy heuristic.
    """

    def __init__(self, config=None, keypair=None, rng=None, sdn=None, policies=None):
        self.config = config or ManagerConfig()
        self.keypair = keypair
        self.rng = rng or random.Random(0)
        self.sdn = sdn
        self.policies = policies
        self.graph = TopologyGraph()
        self.state = DiscoveryState(attempt_cap=self.config.attempt_cap)
        validity = self.config.token_validity or 2 * self.config.ttl_max + 8
        self.tokens = TokenTable(random.Random(self.rng.getrandbits(64)), validity)
        self.monitor = DeviceMonitor()
        self.selector = None
        self.exhausted = False
        self.now = 0
        self.resolve_requests = 0
        self.selections = 0
        self._hops = {}
        self._corrections = {}
        self._linked = set()

    # registration

    def register_capabilities(self, msg):
        """
        Adds a device as an isolated node with every interface undiscovered.

        Args:
            msg (DeviceCapabilities): The capability exchange.

        Returns:
            Middlebox: The registered device.

        Raises:
            DuplicateDevice: The id is already registered.
        """
        if msg.device_id in self.graph.middleboxes:
            error_stack('MGR-DUPLICATE', msg.device_id)
        device = device_from_capabilities(msg)
        self.graph.add_middlebox(device)
        self.state.add_interfaces(device)
        self.monitor.register(device.id, self.now)
        self.selector = None
        logger.debug('registered %s with %d interfaces', device.id, len(device.interfaces))
        return device

    def register_island(self, island):
        """Registers an SDN island with its full internal topology."""
        self.graph.add_island(island)

    def prepare(self):
        """Computes the edge set and probe-pair eligibility once registration is complete."""
        devices = list(self.graph.middleboxes.values())
        if self.config.heuristic == POLICY_BASED:
            edge_set = compute_edge_set(devices, self.policies or [], POLICY_BASED)
        else:
            edge_set = compute_edge_set(devices, heuristic=INTERFACE_BASED)
        self.state.edge_set = edge_set
        self.selector = ProbePairSelector(devices, edge_set)
        logger.info('%d devices registered, %d edge', len(devices), len(edge_set))

    # probing rounds

    def select_probe_pair(self):
        """Returns the next (src, dst) interface pair, or EXHAUSTED."""
        if self.selector is None:
            self.prepare()
        pair = select_probe_pair(self.state, self.selector, self.config.selection_mode, self.rng)
        if pair is EXHAUSTED:
            self.exhausted = True
        else:
            self.selections += 1
        return pair

    def begin_round(self):
        """
        Clears per-round correlation state.

        Tokens issued for the previous round are revoked, so an identity is only resolvable
        during the round it was issued for.
        """
        pending = [key for key, hops in self._hops.items()
                   for ttl, entry in hops.items() if entry.out_interface == PENDING]
        if pending:
            logger.warning('%d hop(s) still awaiting an egress correction', len(pending))
        self._hops.clear()
        self._corrections.clear()
        self._linked.clear()
        self.tokens.revoke(self.state.pending_probes)
        self.tokens.purge(self.now)
        self.state.pending_probes.clear()
        if self.sdn is not None:
            self.sdn.clear()

    def probe_init(self, pair):
        """
        Builds the PROBE-INIT for a selected pair.

        The destination's interface IPs are listed with the selected one first. With
        header security a token is issued for each destination IP, bound to the egress
        the source is predicted to use.
        """
        src, dst = pair
        source = self.graph.middleboxes[src.node]
        dest = self.graph.middleboxes[dst.node]
        first = dest.interface(dst.port).ip
        dest_ips = (first,) + tuple(ip for ip in dest.ips if ip != first)
        tokens = ()
        if self.config.header_sec:
            issued = []
            for ip in dest_ips:
                try:
                    egress = source.interface(lookup_route(source, ip)).ip
                except NoRoute:
                    egress = source.interface(src.port).ip
                token = self.tokens.issue(ClearPair(egress, ip), self.now)
                issued.append(token.value)
                self.state.pending_probes.add(token)
            tokens = tuple(issued)
        return ProbeInit(dest.id, dest_ips, self.config.append, self.config.header_sec,
                         self.config.payload_sec, self.config.ttl_max, tokens)

    def resolve_probe_id(self, request):
        """
        Answers RESOLVE-PROBEID.

        Raises:
            UnknownToken: The token is not live.
        """
        self.resolve_requests += 1
        return self.tokens.resolve(Token(request.token), self.now)

    # reports

    def _check_entry(self, entry):
        device = self.graph.middleboxes.get(entry.device_id)
        if device is None:
            error_stack('MGR-UNKNOWN-DEVICE', entry.device_id)
        for name in (entry.in_interface, entry.out_interface):
            if name not in (NONE, PENDING) and device.interface(name) is None:
                error_stack('MGR-UNKNOWN-IFACE', f'{entry.device_id}:{name}')

    def _open(self, report):
        if not report.segments:
            return report.entries
        if self.keypair is None:
            error_stack('MGR-CORRUPT', 'no private key to open sealed report')
        hdr = AuthenticatedHeaderFields(report.probe_pair_id, isinstance(report.probe_pair_id, Token),
                                        True, self.config.append)
        try:
            return open_segments(report.segments, hdr, self.keypair.private_key)
        except (IntegrityError, DecryptError) as e:
            raise error_stack.build('MGR-CORRUPT', f'{report.device_id}: {e}') from e

    def process_probe_update(self, report):
        """
        Infers links from a PROBE-UPDATE.

        Args:
            report (ProbeUpdate): Per-hop or terminal up-call.

        Returns:
            list: Links inserted by this report.

        Raises:
            UnknownDevice: Reporter or reported entry not registered.
            CorruptReport: A sealed segment failed to open.
        """
        if report.device_id not in self.graph.middleboxes:
            error_stack('MGR-UNKNOWN-DEVICE', report.device_id)
        entries = self._open(report)
        for entry in entries:
            self._check_entry(entry)
        base = report.probe_ttl - len(entries) + 1
        identity = report.probe_pair_id
        hops = self._hops.setdefault(identity, {})
        inserted = []
        for offset, entry in enumerate(entries):
            ttl = base + offset
            correction = self._corrections.get((identity, ttl))
            if entry.out_interface == PENDING and correction is not None:
                entry = type(entry)(entry.device_id, entry.in_interface, correction)
            hops[ttl] = entry
        for ttl in sorted({base + offset + delta for offset in range(len(entries)) for delta in (-1, 0)}):
            inserted += self._link_hops(identity, ttl)
        return inserted

    def process_correction(self, msg):
        """
        Applies UPDATE-OUTINTERFACE to a PENDING hop, before or after its report arrives.

        Returns:
            list: Links the correction released.
        """
        identity = msg.probe_pair_id
        self._corrections[(identity, msg.probe_ttl)] = msg.actual
        entry = self._hops.get(identity, {}).get(msg.probe_ttl)
        if entry is None or entry.out_interface != PENDING:
            return []
        self._hops[identity][msg.probe_ttl] = type(entry)(entry.device_id, entry.in_interface, msg.actual)
        return self._link_hops(identity, msg.probe_ttl)

    def _link_hops(self, identity, ttl):
        hops = self._hops.get(identity, {})
        here, there = hops.get(ttl), hops.get(ttl + 1)
        if here is None or there is None or (identity, ttl) in self._linked:
            return []
        if here.out_interface in (PENDING, NONE):
            return []
        self._linked.add((identity, ttl))
        near = Endpoint(here.device_id, here.out_interface)
        far = Endpoint(there.device_id, there.in_interface)
        transit = self.sdn.transit(identity, ttl) if self.sdn is not None else None
        if transit is None:
            links = [Link(near, far)]
        else:
            ingress, egress = transit
            links = [Link(near, ingress), Link(egress, far)]
        inserted = []
        for link in links:
            if link not in self.graph.links:
                self.graph.insert_link(link)
                inserted.append(link)
                logger.debug('link %s', link)
        self.state.mark_discovered(near)
        self.state.mark_discovered(far)
        return inserted

    # termination and late discovery

    def check_termination(self):
        """
        Returns Done when nothing is undiscovered, only edge-facing interfaces remain,
        or selection is exhausted; Continue otherwise.
        """
        undiscovered = frozenset(self.state.undiscovered)
        if not undiscovered or undiscovered <= self.state.edge_facing or self.exhausted:
            return Done(undiscovered)
        return Continue()

    def handle_late_discovery(self, obs):
        """
        Inserts the link a data-traffic packet-in revealed.

        Returns:
            Link or None: The inserted link, None when already known.
        """
        link = Link(Endpoint(obs.device_id, obs.interface), Endpoint(obs.switch, obs.port))
        if link in self.graph.links:
            return None
        self.graph.insert_link(link)
        self.state.mark_discovered(Endpoint(obs.device_id, obs.interface))
        logger.debug('late discovery %s', link)
        return link

    def observe_heartbeat(self, heartbeat):
        self.monitor.observe(heartbeat)
