"""
Module: MB Agent

The per-middlebox agent. It originates probes on PROBE-INIT, digests probes in transit
(up-call or append), predicts and corrects egress interfaces, steers path-checker
probes by path-id and emits heartbeats.

The agent never touches the network itself. Every handler returns an action value and
the caller (the simulator) delivers the emissions and controller messages it carries.
Two hooks connect the agent to its surroundings:

    resolver(ResolveProbeId) -> ClearPair
        The controller round-trip that maps a probe-pair token back to its IPs.
    egress_candidates(device_id, dest_ip) -> {interface: next_hop_ip}
        The egresses a dynamic-egress device may realise toward `dest_ip`.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import NamedTuple

from ..protocol import (
    DISCARD,
    NONE,
    PENDING,
    ClearPair,
    PayloadEntry,
    ProbeKind,
    Token,
    advance_ttl,
    append_entry,
    append_segment,
    build_probe,
    classify_probe,
)
from ..protocol.api import Heartbeat, PathReport, ProbeUpdate, ResolveProbeId, UpdateOutInterface
from ..protocol.message import DEFAULT_TTL_MAX
from ..security import AuthenticatedHeaderFields, UnknownToken, seal_entry
from ..topology import DIRECT, NoRoute, lookup_entry
from ._error import UnresolvableToken, error_stack

logger = logging.getLogger(__name__)

PREDICT = 'predict'
STEER = 'steer'


@dataclass(frozen=True)
class SecurityPolicy:
    """Flags applied to the probes an agent originates."""
    payload_append: bool = False
    header_sec: bool = False
    payload_sec: bool = False


@dataclass(frozen=True)
class PathRule:
    """Port-routing rule for one path-id."""
    out_interface: str
    next_hop: str


@dataclass
class AgentState:
    """
    Attributes:
        device (Middlebox): The device this agent runs on.
        controller_pub: Controller public key used for payload sealing.
        port_routing_rules (dict): path_id -> `PathRule`, consulted by path-checker probes only.
        security_policy (SecurityPolicy): Flags for originated probes.
        ttl_max (int): TTL threshold.
        egress_mode (str): 'predict' (route prediction plus correction) or 'steer' (pinned egress).
    """
    device: object
    controller_pub: object = None
    port_routing_rules: dict = field(default_factory=dict)
    security_policy: SecurityPolicy = field(default_factory=SecurityPolicy)
    ttl_max: int = DEFAULT_TTL_MAX
    egress_mode: str = PREDICT


@dataclass(frozen=True)
class EgressRecord:
    """The egress an agent predicted for a probe and the one the probe actually left by."""
    probe_pair_id: object
    probe_ttl: int
    predicted_out: str
    actual_out: str

    @property
    def diverged(self):
        return self.predicted_out != self.actual_out

    def correction(self, device_id):
        """The UPDATE-OUT-INTERFACE message owed for this probe, or None when the prediction held."""
        if not self.diverged:
            return None
        return UpdateOutInterface(device_id, self.probe_pair_id, self.probe_ttl, self.predicted_out, self.actual_out)


class Emission(NamedTuple):
    """A probe leaving `out_interface` toward the L2 neighbour owning `next_hop`."""
    probe: object
    out_interface: str
    next_hop: str


@dataclass(frozen=True)
class UpCallAndForward:
    update: ProbeUpdate
    forward: Emission
    correction: UpdateOutInterface = None


@dataclass(frozen=True)
class AppendAndForward:
    forward: Emission
    correction: UpdateOutInterface = None


@dataclass(frozen=True)
class TerminalUpCall:
    update: ProbeUpdate


@dataclass(frozen=True)
class Drop:
    reason: str
    alert: bool = False


@dataclass(frozen=True)
class Forward:
    forward: Emission


@dataclass(frozen=True)
class PathVerdict:
    """Terminal or TTL-expired path-checker probe; `report` goes to the controller."""
    report: PathReport


class MbAgent:
    """
    Agent state machine of one middlebox.

    Args:
        state (AgentState): Device, keys, rules and policy.
        rng (random.Random): Seeded source for sealing and dynamic egress draws.
        resolver (callable): Token resolution round-trip to the controller.
        egress_candidates (callable): Realisable egresses of a dynamic-egress device.
    """

    def __init__(self, state, rng=None, resolver=None, egress_candidates=None):
        self.state = state
        self.rng = rng or random.Random(0)
        self.seal_rng = random.Random(self.rng.getrandbits(64))
        self.resolver = resolver
        self.egress_candidates = egress_candidates

    @property
    def device(self):
        return self.state.device

    @property
    def device_id(self):
        return self.state.device.id

    def _route(self, dest_ip):
        entry = lookup_entry(self.device, dest_ip)
        next_hop = dest_ip if entry.next_hop == DIRECT else entry.next_hop
        return entry.out_interface, next_hop

    def _egress(self, dest_ip, mode=None):
        """Returns ``(predicted, actual, next_hop)`` toward `dest_ip`."""
        mode = mode or self.state.egress_mode
        predicted, next_hop = self._route(dest_ip)
        if mode == STEER or not self.device.dynamic_egress or self.egress_candidates is None:
            return predicted, predicted, next_hop
        candidates = self.egress_candidates(self.device_id, dest_ip)
        if not candidates:
            return predicted, predicted, next_hop
        actual = self.rng.choice(sorted(candidates))
        return predicted, actual, candidates[actual]

    def compute_output_interface(self, dest_ip, mode=None):
        """
        Decides the egress toward `dest_ip`.

        Args:
            dest_ip (str): Probe destination.
            mode (str): 'predict' or 'steer'; defaults to the agent's mode.

        Returns:
            tuple: ``(interface, correction_needed)``.

        Raises:
            NoRoute: No route toward `dest_ip`.
        """
        predicted, actual, _ = self._egress(dest_ip, mode)
        return actual, predicted != actual

    def _seal(self, entry, header):
        hdr = header if isinstance(header, AuthenticatedHeaderFields) else AuthenticatedHeaderFields.from_header(header)
        return seal_entry(entry, hdr, self.state.controller_pub, self.seal_rng)

    def handle_probe_init(self, cmd):
        """
        Originates discovery probes toward the destination named by PROBE-INIT.

        One probe is emitted per distinct egress interface among the destination IPs,
        addressed to the first destination IP reached through that egress. Originated
        probes leave on the computed egress.

        Args:
            cmd (ProbeInit): The trigger.

        Returns:
            list: `Emission` values, one per probe.

        Raises:
            NoRouteToDestination: No destination IP is routable.
        """
        policy = SecurityPolicy(cmd.append, cmd.header_sec, cmd.payload_sec)
        self.state.security_policy = policy
        self.state.ttl_max = cmd.ttl_max
        by_egress = {}
        for dest_ip in cmd.dest_ips:
            try:
                out_interface, next_hop = self._route(dest_ip)
            except NoRoute:
                continue
            by_egress.setdefault(out_interface, (dest_ip, next_hop))
        if not by_egress:
            error_stack('AGENT-NO-ROUTE', f'{self.device_id} -> {cmd.dest_device}')

        emissions = []
        for out_interface, (dest_ip, next_hop) in by_egress.items():
            src_ip = self.device.interface(out_interface).ip
            token = cmd.token_for(dest_ip)
            pair = Token(token) if cmd.header_sec else ClearPair(src_ip, dest_ip)
            seed = PayloadEntry(self.device_id, NONE, out_interface)
            hdr = AuthenticatedHeaderFields(pair, policy.header_sec, policy.payload_sec, policy.payload_append)
            payload = (self._seal(seed, hdr),) if policy.payload_sec else (seed,)
            probe = build_probe(pair, payload, append=policy.payload_append,
                                header_sec=policy.header_sec, payload_sec=policy.payload_sec)
            emissions.append(Emission(probe, out_interface, next_hop))
        logger.debug('%s originates %d probe(s) toward %s', self.device_id, len(emissions), cmd.dest_device)
        return emissions

    def source_update(self, probe):
        """Per-hop up-call of the source's seeded entry; append-mode probes make none."""
        if probe.header.flag_payload_append:
            return None
        return self._update(probe, terminal=False, items=probe.payload)

    def _update(self, probe, terminal, items):
        sealed = probe.header.flag_payload_sec
        return ProbeUpdate(
            device_id=self.device_id,
            probe_pair_id=probe.header.probe_pair_id,
            probe_ttl=probe.header.probe_ttl,
            terminal=terminal,
            entries=() if sealed else tuple(items),
            segments=tuple(items) if sealed else (),
        )

    def _resolve(self, pair):
        if isinstance(pair, ClearPair):
            return pair
        if self.resolver is None:
            error_stack('AGENT-TOKEN', f'{pair} (no resolver)')
        try:
            return self.resolver(ResolveProbeId(self.device_id, pair.value))
        except UnknownToken as e:
            raise error_stack.build('AGENT-TOKEN', str(pair)) from e

    def receive(self, msg, in_interface):
        """Dispatches a probe by kind."""
        if classify_probe(msg.header) is ProbeKind.PATHCHECK:
            return self.handle_path_checker(msg, in_interface)
        return self.handle_incoming_probe(msg, in_interface)

    def handle_incoming_probe(self, msg, in_interface):
        """
        Digests a discovery probe arriving on `in_interface`.

        Returns:
            UpCallAndForward, AppendAndForward, TerminalUpCall or Drop.
        """
        header = advance_ttl(msg.header, self.state.ttl_max)
        if header is DISCARD:
            logger.debug('%s discards %s at ttl %d', self.device_id, msg.header.probe_pair_id, msg.header.probe_ttl)
            return Drop('ttl')
        try:
            pair = self._resolve(header.probe_pair_id)
        except UnresolvableToken:
            logger.warning('%s drops probe with unresolvable token %s', self.device_id, header.probe_pair_id)
            return Drop('token', alert=True)

        msg = type(msg)(header, msg.payload)
        append = header.flag_payload_append
        sealed = header.flag_payload_sec

        if self.device.interface_for_ip(pair.dst_ip) is not None:
            entry = PayloadEntry(self.device_id, in_interface, NONE)
            item = self._seal(entry, header) if sealed else entry
            items = msg.payload + (item,) if append else (item,)
            return TerminalUpCall(self._update(msg, terminal=True, items=items))

        try:
            predicted, actual, next_hop = self._egress(pair.dst_ip)
        except NoRoute:
            logger.warning('%s has no route toward %s', self.device_id, pair.dst_ip)
            return Drop('no-route')
        record = EgressRecord(header.probe_pair_id, header.probe_ttl, predicted, actual)
        correction = record.correction(self.device_id)
        out_field = PENDING if record.diverged else predicted

        entry = PayloadEntry(self.device_id, in_interface, out_field)
        item = self._seal(entry, header) if sealed else entry
        if append:
            forwarded = append_segment(msg, item) if sealed else append_entry(msg, item)
            return AppendAndForward(Emission(forwarded, actual, next_hop), correction)
        update = self._update(msg, terminal=False, items=(item,))
        return UpCallAndForward(update, Emission(msg, actual, next_hop), correction)

    def originate_path_check(self, path_id, dest_ip):
        """
        Builds the path-checker probe for `path_id` at the path's source.

        Raises:
            PathBroken: The source has no rule for `path_id`.
        """
        rule = self.state.port_routing_rules.get(path_id)
        if rule is None:
            self._broken(path_id, ())
        pair = ClearPair(self.device.interface(rule.out_interface).ip, dest_ip)
        seed = PayloadEntry(self.device_id, NONE, rule.out_interface)
        probe = build_probe(pair, (seed,), path_id=path_id, append=True)
        return Emission(probe, rule.out_interface, rule.next_hop)

    def _broken(self, path_id, trace):
        exc = error_stack.build('AGENT-PATH-BROKEN', f'{self.device_id} path-id {path_id}')
        exc.report = PathReport(self.device_id, path_id, 'BROKEN', tuple(trace))
        raise exc

    def handle_path_checker(self, msg, in_interface):
        """
        Steers a path-checker probe by its path-id.

        Returns:
            Forward, or PathVerdict at the terminal device or on TTL expiry.

        Raises:
            PathBroken: No rule for the path-id; the attached report is BROKEN.
        """
        if classify_probe(msg.header) is not ProbeKind.PATHCHECK:
            error_stack('AGENT-NOT-PATHCHECK', str(msg.header.probe_pair_id))
        path_id = msg.header.path_id
        header = advance_ttl(msg.header, self.state.ttl_max)
        if header is DISCARD:
            trace = msg.entries + (PayloadEntry(self.device_id, in_interface, NONE),)
            return PathVerdict(PathReport(self.device_id, path_id, 'DISCARD', trace))
        msg = type(msg)(header, msg.payload)
        if self.device.interface_for_ip(header.probe_pair_id.dst_ip) is not None:
            trace = msg.entries + (PayloadEntry(self.device_id, in_interface, NONE),)
            return PathVerdict(PathReport(self.device_id, path_id, 'OK', trace))
        rule = self.state.port_routing_rules.get(path_id)
        if rule is None:
            self._broken(path_id, msg.entries + (PayloadEntry(self.device_id, in_interface, NONE),))
        forwarded = append_entry(msg, PayloadEntry(self.device_id, in_interface, rule.out_interface))
        return Forward(Emission(forwarded, rule.out_interface, rule.next_hop))

    def heartbeat_tick(self, now):
        return Heartbeat(self.device_id, 'UP', now)
