"""
Module: Simulation Harness

Deterministic discrete-event simulation of TopoMan over a ground-truth network.

Every probe crosses the simulated wire as encoded bytes and every agent-controller
exchange as an encoded API message. Link deliveries and controller messages take one
tick, an SDN island transit one more. Token resolution is a synchronous round-trip and
takes no simulated time. Events at equal times run in scheduling order, so a seed fixes
the whole run.

A discovery run repeats rounds until the manager reports Done:

    select a probe pair -> PROBE-INIT to the source agent -> traversal -> up-calls
"""

import logging
import random
import time
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import simpy

from ..agent import (
    AgentState,
    AppendAndForward,
    Drop,
    Forward,
    MbAgent,
    NoRouteToDestination,
    PathBroken,
    PathVerdict,
    TerminalUpCall,
    UpCallAndForward,
)
from ..error.error import TopoManError
from ..manager import DOWN, Done, ManagerConfig, TopologyManager, verify_offline
from ..manager.selection import EXHAUSTED
from ..protocol import decode_message, encode_message
from ..protocol.api import (
    DeviceCapabilities,
    Heartbeat,
    PathReport,
    ProbeUpdate,
    UpdateOutInterface,
    decode_api,
)
from ..protocol.message import DEFAULT_TTL_MAX
from ..security import ControllerKeyPair
from ..topology import Endpoint, device_adjacency
from . import events
from ._error import error_stack
from .events import Transcript
from .metrics import Metrics
from .sdn import SdnControllerModel

logger = logging.getLogger(__name__)

LINK_DELAY = 1
ISLAND_DELAY = 1
CONTROLLER_DELAY = 1


@dataclass(frozen=True)
class DiscoveryMode:
    """
    Attributes:
        heuristic (str): 'edge', 'policy' or 'random'.
        append (bool): Payload-append probes.
        header_sec (bool): Token probe-pair identities.
        payload_sec (bool): Sealed payload entries.
        ttl_max (int): TTL threshold.
        egress (str): 'predict' or 'steer'.
    """
    heuristic: str = 'edge'
    append: bool = False
    header_sec: bool = False
    payload_sec: bool = False
    ttl_max: int = DEFAULT_TTL_MAX
    egress: str = 'predict'

    @property
    def label(self):
        flags = ['append' if self.append else 'no-append']
        if self.header_sec:
            flags.append('hdrsec')
        if self.payload_sec:
            flags.append('paysec')
        if self.egress != 'predict':
            flags.append(self.egress)
        return f'{self.heuristic}/{"+".join(flags)}'


@dataclass
class DiscoveryResult:
    """
    Attributes:
        graph (TopologyGraph): The discovered view.
        metrics (Metrics): Run counters.
        report (VerificationReport): Offline verification against ground truth.
        residual (frozenset): Interfaces left for late discovery.
        transcript (Transcript): Event log.
    """
    graph: object
    metrics: Metrics
    report: object
    residual: frozenset = frozenset()
    transcript: Transcript = field(default=None, repr=False)

    def __iter__(self):
        return iter((self.graph, self.metrics, self.report))


@lru_cache(maxsize=4096)
def capabilities_of(device):
    """The DEVICE-CAPABILITIES message a device sends at start-up."""
    interfaces = tuple(f'{iface.name} {iface.ip}/{iface.prefix_len}' + (' edge' if iface.edge_facing else '')
                       for iface in device.interfaces)
    routes = tuple(f'{route.dest_ip}/{route.prefix_len} {route.out_interface} {route.next_hop}'
                   for route in device.routes)
    return DeviceCapabilities(device.id, device.kind, device.dynamic_egress, interfaces, routes)


class Simulation:
    """
    One simulated network with its agents, SDN controller model and topology manager.

    Args:
        net (NetworkInstance): Ground truth.
        mode (DiscoveryMode): Discovery options.
        seed (int): Seed for every random draw of the run.
        transcript (bool): Keep the event log.
    """

    def __init__(self, net, mode=None, seed=0, transcript=True):
        self.net = net
        self.reference = net.graph
        self.mode = mode or DiscoveryMode()
        self.seed = seed
        rng = random.Random(seed)
        self.env = simpy.Environment()
        self.metrics = Metrics()
        self.transcript = Transcript(enabled=transcript)
        self.sdn = SdnControllerModel(self.reference)
        self.keypair = ControllerKeyPair.generate(random.Random(rng.getrandbits(64)))
        config = ManagerConfig(
            heuristic=self.mode.heuristic,
            append=self.mode.append,
            header_sec=self.mode.header_sec,
            payload_sec=self.mode.payload_sec,
            ttl_max=self.mode.ttl_max,
        )
        self.manager = TopologyManager(config, self.keypair, random.Random(rng.getrandbits(64)),
                                       self.sdn, list(net.policies))
        self.agents = {}
        for device_id in sorted(self.reference.middleboxes):
            state = AgentState(
                device=self.reference.middleboxes[device_id],
                controller_pub=self.keypair.public_key,
                ttl_max=self.mode.ttl_max,
                egress_mode=self.mode.egress,
            )
            self.agents[device_id] = MbAgent(state, random.Random(rng.getrandbits(64)),
                                             resolver=self._resolve, egress_candidates=self._ecmp)
        self._adjacency = None
        self._distances = {}
        self._path_reports = []
        self._register()

    # plumbing

    def _later(self, delay, callback, *args):
        event = self.env.timeout(delay)
        event.callbacks.append(lambda _event: callback(*args))

    def _log(self, kind, detail):
        self.transcript.record(self.env.now, kind, detail)

    def _register(self):
        for device_id in sorted(self.reference.middleboxes):
            wire = capabilities_of(self.reference.middleboxes[device_id]).encode()
            self.manager.register_capabilities(decode_api(wire))
        for island_id in sorted(self.reference.islands):
            self.manager.register_island(self.reference.islands[island_id])
        self.manager.prepare()

    def _resolve(self, request):
        self.metrics.resolve_requests += 1
        self.manager.now = self.env.now
        return self.manager.resolve_probe_id(decode_api(request.encode()))

    def _ecmp(self, device_id, dest_ip):
        """Egresses on a shortest path toward the device owning `dest_ip`."""
        owner = self.reference.owner_of(dest_ip)
        if owner is None:
            return {}
        if self._adjacency is None:
            self._adjacency = device_adjacency(self.reference)
        distances = self._distances.get(owner[0])
        if distances is None:
            distances = {owner[0]: 0}
            queue = deque([owner[0]])
            while queue:
                node = queue.popleft()
                for _local, neighbour, _remote in self._adjacency[node]:
                    if neighbour not in distances:
                        distances[neighbour] = distances[node] + 1
                        queue.append(neighbour)
            self._distances[owner[0]] = distances
        here = distances.get(device_id)
        candidates = {}
        for local, neighbour, remote in self._adjacency[device_id]:
            if here is not None and distances.get(neighbour) == here - 1 and local not in candidates:
                candidates[local] = self.reference.middleboxes[neighbour].interface(remote).ip
        return candidates

    # controller messages

    def _to_controller(self, msg):
        if isinstance(msg, ProbeUpdate):
            self.metrics.up_calls += 1
        elif isinstance(msg, UpdateOutInterface):
            self.metrics.corrections += 1
        self._later(CONTROLLER_DELAY, self._controller_receive, msg.encode())

    def _controller_receive(self, wire):
        msg = decode_api(wire)
        self.manager.now = self.env.now
        try:
            if isinstance(msg, ProbeUpdate):
                links = self.manager.process_probe_update(msg)
                self._log(events.CONTROLLER, f'PROBE-UPDATE {msg.device_id} {msg.probe_pair_id} '
                                             f'ttl={msg.probe_ttl} links={len(links)}')
            elif isinstance(msg, UpdateOutInterface):
                links = self.manager.process_correction(msg)
                self._log(events.CONTROLLER, f'UPDATE-OUTINTERFACE {msg.device_id} {msg.probe_pair_id} '
                                             f'ttl={msg.probe_ttl} {msg.predicted}->{msg.actual} links={len(links)}')
            elif isinstance(msg, Heartbeat):
                self.manager.observe_heartbeat(msg)
            elif isinstance(msg, PathReport):
                self._path_reports.append(msg)
                self._log(events.CONTROLLER, f'PATH-REPORT {msg.device_id} path={msg.path_id} {msg.status}')
        except TopoManError as e:
            self.metrics.rejected += 1
            self._log(events.REJECT, str(e))
            logger.warning('controller rejected %s: %s', msg.NAME, e)

    # probe transport

    def _send(self, emission, device_id):
        """Puts a probe on the wire at (device, out interface)."""
        source = Endpoint(device_id, emission.out_interface)
        links = self.reference.links_at(source)
        if not links:
            error_stack('SIM-DANGLING', str(source))
        far = next(iter(links)).other(source)
        wire = encode_message(emission.probe)
        header = emission.probe.header
        if far.node in self.reference.middleboxes:
            self._later(LINK_DELAY, self.deliver_hop, wire, far)
            return
        owner = self.reference.owner_of(emission.next_hop)
        if owner is None:
            error_stack('SIM-NO-TARGET', emission.next_hop)
        egress = self.sdn.forward(header.probe_pair_id, header.probe_ttl, far, Endpoint(*owner))
        self._log(events.DELIVER, f'island {self.reference.island_of(far.node).id} {far}->{egress}')
        self._later(LINK_DELAY + ISLAND_DELAY, self.deliver_hop, wire, Endpoint(*owner))

    def deliver_hop(self, wire, at):
        """
        Hands a probe to the agent of the middlebox interface `at`.

        The agent's action is carried out: up-calls and corrections go to the controller,
        forwarded probes go back on the wire.
        """
        msg = decode_message(wire)
        agent = self.agents[at.node]
        try:
            action = agent.receive(msg, at.port)
        except PathBroken as e:
            self._to_controller(e.report)
            return
        self._log(events.DELIVER, f'{at} {msg.header.probe_pair_id} ttl={msg.header.probe_ttl} '
                                  f'{type(action).__name__}')
        if isinstance(action, UpCallAndForward):
            self._to_controller(action.update)
            if action.correction is not None:
                self._to_controller(action.correction)
            self._send(action.forward, at.node)
        elif isinstance(action, AppendAndForward):
            if action.correction is not None:
                self._to_controller(action.correction)
            self._send(action.forward, at.node)
        elif isinstance(action, TerminalUpCall):
            self._to_controller(action.update)
        elif isinstance(action, Forward):
            self._send(action.forward, at.node)
        elif isinstance(action, PathVerdict):
            self._to_controller(action.report)
        elif isinstance(action, Drop):
            self.metrics.drops += 1
            self._log(events.DROP, f'{at} {action.reason}' + (' ALERT' if action.alert else ''))

    def _probe_init(self, wire, device_id):
        cmd = decode_api(wire)
        agent = self.agents[device_id]
        try:
            emissions = agent.handle_probe_init(cmd)
        except NoRouteToDestination as e:
            self._log(events.DROP, str(e))
            return
        self.metrics.probe_triggers += len(emissions)
        for emission in emissions:
            self._log(events.EMIT, f'{device_id}:{emission.out_interface} {emission.probe.header.probe_pair_id}')
            update = agent.source_update(emission.probe)
            if update is not None:
                self._to_controller(update)
            self._send(emission, device_id)

    # discovery

    def run_round(self, pair):
        """Runs one probing round for a selected pair until the network is idle."""
        self.manager.begin_round()
        self.manager.now = self.env.now
        cmd = self.manager.probe_init(pair)
        src, dst = pair
        self._log(events.ROUND, f'{src} -> {dst}')
        self._later(CONTROLLER_DELAY, self._probe_init, cmd.encode(), src.node)
        self.env.run()
        if self.env.peek() != float('inf'):
            error_stack('SIM-LEAK', str(pair))

    def run_discovery(self):
        """
        Discovers the network and verifies the result offline.

        Returns:
            DiscoveryResult: Discovered graph, metrics and verification report.
        """
        started = time.perf_counter()
        status = self.manager.check_termination()
        while not isinstance(status, Done):
            pair = self.manager.select_probe_pair()
            if pair is not EXHAUSTED:
                self.metrics.selections += 1
                self.run_round(pair)
            status = self.manager.check_termination()
        self.manager.begin_round()
        self.metrics.sim_ticks = int(self.env.now)
        report = verify_offline(self.manager.graph, self.reference, status.residual)
        self._log(events.DONE, f'residual={len(status.residual)} {report.verdict}')
        self.metrics.wall_clock = time.perf_counter() - started
        logger.info('discovery done after %d selections: %s', self.metrics.selections, report.verdict)
        return DiscoveryResult(self.manager.graph, self.metrics, report, status.residual, self.transcript)

    # late discovery

    def inject_data_traffic(self, endpoint):
        """
        Sends data traffic out of an edge interface and returns the packet-in it causes.

        Raises:
            NotEdgeAttached: The interface is not attached to an edge switch.
        """
        device_id, interface = endpoint
        obs = self.sdn.observe_traffic(device_id, interface)
        self._log(events.TRAFFIC, f'{device_id}:{interface} -> {obs.switch}:{obs.port}')
        return obs

    def close_late_discovery(self, residual=None):
        """
        Injects traffic on every residual edge-facing interface and re-verifies.

        Returns:
            VerificationReport: The report after late discovery.
        """
        residual = self.manager.state.undiscovered if residual is None else residual
        for endpoint in sorted(set(residual) & self.manager.state.edge_facing):
            if self.manager.handle_late_discovery(self.inject_data_traffic(endpoint)) is not None:
                self.metrics.late_discoveries += 1
        return verify_offline(self.manager.graph, self.reference, frozenset(self.manager.state.undiscovered))

    # heartbeats

    def run_heartbeats(self, duration, silent=None):
        """
        Runs `duration` heartbeat intervals.

        Args:
            duration (int): Intervals to simulate.
            silent (dict or set): Devices that stop sending; a dict maps each to the tick it
                falls silent, a set silences them from the start.

        Returns:
            list: ``(tick, {device: status})`` after each interval.
        """
        silent = silent or {}
        if not isinstance(silent, dict):
            silent = {device_id: 0 for device_id in silent}
        history = []
        start = self.env.now
        monitor = self.manager.monitor
        monitor.reset(start)

        def beat():
            for _ in range(duration):
                now = self.env.now
                for device_id, agent in self.agents.items():
                    since = silent.get(device_id)
                    if since is None or now - start < since:
                        self._to_controller(agent.heartbeat_tick(now))
                yield self.env.timeout(monitor.interval)
                statuses = monitor.sweep(self.env.now)
                down = sorted(device_id for device_id, status in statuses.items() if status == DOWN)
                if down:
                    self._log(events.HEARTBEAT, 'DOWN ' + ' '.join(down))
                history.append((self.env.now - start, statuses))

        self.env.process(beat())
        self.env.run()
        return history

    # path verification

    def install_path_rules(self, spec):
        """Installs (or clears) the port-routing rule of each device on the path."""
        for node in spec.nodes:
            rules = self.agents[node].state.port_routing_rules
            if node in spec.rules:
                rules[spec.path_id] = spec.rules[node]
            else:
                rules.pop(spec.path_id, None)

    def run_path_check(self, spec):
        """
        Triggers the path's source and returns the controller's path report.

        Returns:
            PathReport: OK, BROKEN, DISCARD, or LOST when no report arrived.
        """
        self._path_reports = []
        source = self.agents[spec.nodes[0]]
        try:
            emission = source.originate_path_check(spec.path_id, spec.dest_ip)
        except PathBroken as e:
            return e.report
        self._send(emission, source.device_id)
        self.env.run()
        for report in self._path_reports:
            if report.path_id == spec.path_id:
                return report
        return PathReport(source.device_id, spec.path_id, 'LOST', ())


def run_discovery(net, mode=None, seed=0, transcript=True):
    """
    Runs one discovery on `net`.

    Returns:
        DiscoveryResult: Unpacks as ``(graph, metrics, report)``.
    """
    return Simulation(net, mode, seed, transcript).run_discovery()
