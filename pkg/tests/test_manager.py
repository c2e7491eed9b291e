import random
from dataclasses import replace

import pytest

from topoman.agent import PathRule
from topoman.manager import (
    DOWN,
    EXHAUSTED,
    UNKNOWN,
    UP,
    Continue,
    CorruptReport,
    DeviceMonitor,
    DiscoveryState,
    Done,
    DuplicateDevice,
    InvalidPathSpec,
    ManagerConfig,
    ManagerError,
    PathFail,
    PathOk,
    PathSpec,
    PolicyRule,
    ProbePairSelector,
    TopologyManager,
    UnknownDevice,
    compute_edge_set,
    endpoint_networks,
    judge_path_report,
    parse_interface_line,
    select_probe_pair,
    verify_offline,
)
from topoman.manager.heuristics import interface_edge_set
from topoman.protocol import NONE, PENDING, ClearPair, PayloadEntry, SealedPayload, Token
from topoman.protocol.api import Heartbeat, PathReport, ProbeUpdate, ResolveProbeId, UpdateOutInterface
from topoman.security import AuthenticatedHeaderFields, UnknownToken, seal_entry
from topoman.simulator import TrafficObservation, capabilities_of
from topoman.topology import Endpoint, Link

PAIR = ClearPair('10.0.0.1', '10.0.0.6')
SEED = PayloadEntry('fw1', NONE, 'eth0')
MIDDLE = PayloadEntry('ids1', 'eth0', 'eth1')
LAST = PayloadEntry('px1', 'eth0', NONE)
FW_IDS = Link(Endpoint('fw1', 'eth0'), Endpoint('ids1', 'eth0'))
IDS_PX = Link(Endpoint('ids1', 'eth1'), Endpoint('px1', 'eth0'))


def _manager(net, keypair=None, **config):
    manager = TopologyManager(ManagerConfig(**config), keypair, random.Random(0), policies=list(net.policies))
    for mb in net.middleboxes.values():
        manager.register_capabilities(capabilities_of(mb))
    for island in net.islands.values():
        manager.register_island(island)
    manager.prepare()
    return manager


def _update(device_id, ttl, *entries, terminal=False, pair=PAIR):
    return ProbeUpdate(device_id, pair, ttl, terminal, entries=entries)


class TestHeuristics:

    def test_interface_based(self, line_net):
        assert compute_edge_set(line_net.middleboxes.values()) == {'fw1', 'px1'}

    def test_one_unshared_subnet_makes_an_edge_device(self, line_net):
        fw1 = line_net.middleboxes['fw1']
        assert {str(iface.network) for iface in fw1.interfaces} == {'10.0.0.0/30', '192.168.0.0/24'}
        assert 'fw1' in interface_edge_set(line_net.middleboxes.values())
        assert 'ids1' not in interface_edge_set(line_net.middleboxes.values())

    def test_policy_based(self, line_net):
        assert compute_edge_set(line_net.middleboxes.values(), list(line_net.policies), 'policy') == {'fw1', 'px1'}

    def test_policy_based_needs_policies(self, line_net):
        with pytest.raises(ManagerError):
            compute_edge_set(line_net.middleboxes.values(), None, 'policy')

    def test_empty_policy_list_has_no_edge(self, line_net):
        assert compute_edge_set(line_net.middleboxes.values(), [], 'policy') == frozenset()

    def test_transit_networks_are_not_endpoints(self):
        a, b, c = '192.168.0.0/24', '192.168.1.0/24', '192.168.2.0/24'
        rules = [PolicyRule(a, b), PolicyRule(b, c)]
        assert {str(net) for net in endpoint_networks(rules)} == {a, c}

    def test_order_independent(self, line_net):
        devices = list(line_net.middleboxes.values())
        assert compute_edge_set(devices) == compute_edge_set(devices[::-1])


class TestSelection:

    def test_eligibility_follows_routes(self, line_net):
        selector = ProbePairSelector(line_net.middleboxes.values(), frozenset({'fw1', 'px1'}))
        assert Endpoint('fw1', 'lan0') not in selector.eligible
        assert set(selector.eligible[Endpoint('fw1', 'eth0')]) == {
            Endpoint('ids1', 'eth0'), Endpoint('ids1', 'eth1'), Endpoint('px1', 'eth0'), Endpoint('px1', 'lan0')}
        assert set(selector.eligible[Endpoint('ids1', 'eth1')]) == {Endpoint('px1', 'eth0'), Endpoint('px1', 'lan0')}

    def test_edge_tier_first(self, line_net):
        manager = _manager(line_net)
        for seed in range(10):
            manager.rng = random.Random(seed)
            manager.state.attempts.clear()
            src, dst = manager.select_probe_pair()
            assert src.node in {'fw1', 'px1'} and dst.node in {'fw1', 'px1'} and src.node != dst.node

    def test_attempt_cap(self, line_net):
        state = DiscoveryState()
        for mb in line_net.middleboxes.values():
            state.add_interfaces(mb)
        selector = ProbePairSelector(line_net.middleboxes.values())
        rng = random.Random(0)
        picks = []
        while (pair := select_probe_pair(state, selector, 'random', rng)) is not EXHAUSTED:
            picks.append(pair)
        total = sum(len(dsts) for dsts in selector.eligible.values())
        assert len(picks) == 2 * total
        assert state.max_attempts == 2

    def test_discovered_sources_are_skipped(self, line_net):
        manager = _manager(line_net, heuristic='random')
        for endpoint in list(manager.state.undiscovered):
            if endpoint != Endpoint('ids1', 'eth1'):
                manager.state.mark_discovered(endpoint)
        assert manager.select_probe_pair()[0] == Endpoint('ids1', 'eth1')


class TestReports:

    def test_registration(self, line_net):
        manager = _manager(line_net)
        assert len(manager.state.undiscovered) == 6
        assert manager.state.edge_facing == {Endpoint('fw1', 'lan0'), Endpoint('px1', 'lan0')}
        with pytest.raises(DuplicateDevice):
            manager.register_capabilities(capabilities_of(line_net.middleboxes['fw1']))

    def test_bad_capability_line(self):
        with pytest.raises(CorruptReport):
            parse_interface_line('eth0 10.0.0.1/30 core')

    @pytest.mark.parametrize('order', [(0, 1, 2), (2, 1, 0), (1, 2, 0)])
    def test_per_hop_reports_in_any_order(self, line_net, order):
        manager = _manager(line_net)
        reports = [_update('fw1', 0, SEED), _update('ids1', 1, MIDDLE), _update('px1', 2, LAST, terminal=True)]
        for index in order:
            manager.process_probe_update(reports[index])
        assert manager.graph.links >= {FW_IDS, IDS_PX}
        assert isinstance(manager.check_termination(), Done)

    def test_terminal_append_report(self, line_net):
        manager = _manager(line_net, append=True)
        inserted = manager.process_probe_update(_update('px1', 2, SEED, MIDDLE, LAST, terminal=True))
        assert set(inserted) == {FW_IDS, IDS_PX}

    def test_termination_leaves_edge_facing_residual(self, line_net):
        manager = _manager(line_net)
        assert isinstance(manager.check_termination(), Continue)
        manager.process_probe_update(_update('px1', 2, SEED, MIDDLE, LAST, terminal=True))
        done = manager.check_termination()
        assert done == Done(frozenset({Endpoint('fw1', 'lan0'), Endpoint('px1', 'lan0')}))

    @pytest.mark.parametrize('correction_first', [True, False])
    def test_pending_egress_waits_for_correction(self, line_net, correction_first):
        manager = _manager(line_net)
        correction = UpdateOutInterface('ids1', PAIR, 1, 'eth0', 'eth1')
        if correction_first:
            manager.process_correction(correction)
        manager.process_probe_update(_update('ids1', 1, replace(MIDDLE, out_interface=PENDING)))
        manager.process_probe_update(_update('px1', 2, LAST, terminal=True))
        if not correction_first:
            assert IDS_PX not in manager.graph.links
            assert manager.process_correction(correction) == [IDS_PX]
        assert IDS_PX in manager.graph.links

    def test_unknown_device(self, line_net):
        manager = _manager(line_net)
        with pytest.raises(UnknownDevice):
            manager.process_probe_update(_update('ghost', 1, MIDDLE))
        with pytest.raises(UnknownDevice):
            manager.process_probe_update(_update('ids1', 1, PayloadEntry('ids1', 'eth9', 'eth1')))

    def test_sealed_report(self, line_net, keypair, rng):
        manager = _manager(line_net, keypair, append=True, payload_sec=True)
        hdr = AuthenticatedHeaderFields(PAIR, False, True, True)
        segments = tuple(seal_entry(entry, hdr, keypair.public_key, rng) for entry in (SEED, MIDDLE, LAST))
        report = ProbeUpdate('px1', PAIR, 2, True, segments=segments)
        assert set(manager.process_probe_update(report)) == {FW_IDS, IDS_PX}

    def test_tampered_sealed_report(self, line_net, keypair, rng):
        manager = _manager(line_net, keypair, append=True, payload_sec=True)
        hdr = AuthenticatedHeaderFields(PAIR, False, True, True)
        segment = seal_entry(SEED, hdr, keypair.public_key, rng)
        flipped = SealedPayload(segment.wrapped_blob, segment.ciphertext[:-1] + bytes([segment.ciphertext[-1] ^ 1]))
        with pytest.raises(CorruptReport):
            manager.process_probe_update(ProbeUpdate('px1', PAIR, 0, True, segments=(flipped,)))

    def test_token_round_trip(self, line_net):
        manager = _manager(line_net, header_sec=True)
        cmd = manager.probe_init((Endpoint('fw1', 'eth0'), Endpoint('px1', 'eth0')))
        assert cmd.dest_ips == ('10.0.0.6', '192.168.1.1')
        assert len(cmd.tokens) == 2
        resolved = manager.resolve_probe_id(ResolveProbeId('ids1', cmd.tokens[0]))
        assert resolved == PAIR
        with pytest.raises(UnknownToken):
            manager.resolve_probe_id(ResolveProbeId('ids1', cmd.tokens[0] ^ 1))

    def test_token_expires(self, line_net):
        manager = _manager(line_net, header_sec=True, ttl_max=4)
        cmd = manager.probe_init((Endpoint('fw1', 'eth0'), Endpoint('px1', 'eth0')))
        manager.now = 2 * 4 + 8 + 1
        with pytest.raises(UnknownToken):
            manager.resolve_probe_id(ResolveProbeId('ids1', cmd.tokens[0]))

    def test_token_is_retired_with_its_round(self, line_net):
        manager = _manager(line_net, header_sec=True)
        manager.begin_round()
        first = manager.probe_init((Endpoint('fw1', 'eth0'), Endpoint('px1', 'eth0')))
        assert manager.resolve_probe_id(ResolveProbeId('ids1', first.tokens[0])) == PAIR
        manager.begin_round()
        second = manager.probe_init((Endpoint('px1', 'eth0'), Endpoint('fw1', 'eth0')))
        with pytest.raises(UnknownToken):
            manager.resolve_probe_id(ResolveProbeId('ids1', first.tokens[0]))
        assert len(manager.tokens) == len(second.tokens)
        assert manager.state.pending_probes == {Token(value) for value in second.tokens}

    def test_late_discovery(self, line_net):
        manager = _manager(line_net)
        obs = TrafficObservation('edge0s0', 'p0', 'fw1', 'lan0')
        link = manager.handle_late_discovery(obs)
        assert link == Link(Endpoint('fw1', 'lan0'), Endpoint('edge0s0', 'p0'))
        assert Endpoint('fw1', 'lan0') in manager.state.discovered
        assert manager.handle_late_discovery(obs) is None


class TestMonitor:

    def test_statuses(self):
        monitor = DeviceMonitor(interval=1, misses=3)
        monitor.register('fw1', 0)
        monitor.observe(Heartbeat('fw1', 'UP', 4))
        assert monitor.status('fw1', 6) == UP
        assert monitor.status('fw1', 7) == DOWN
        assert monitor.status('ghost', 7) == UNKNOWN

    def test_recovery(self):
        monitor = DeviceMonitor()
        monitor.register('fw1', 0)
        assert monitor.sweep(5) == {'fw1': DOWN}
        monitor.observe(Heartbeat('fw1', 'UP', 5))
        assert monitor.sweep(6) == {'fw1': UP}

    def test_stale_heartbeat_does_not_rewind(self):
        monitor = DeviceMonitor()
        monitor.observe(Heartbeat('fw1', 'UP', 9))
        monitor.observe(Heartbeat('fw1', 'UP', 2))
        assert monitor.last_seen['fw1'] == 9


class TestVerification:

    def test_reference_against_itself(self, line_net):
        report = verify_offline(line_net.graph, line_net.graph)
        assert report.is_clean and report.verdict == 'CLEAN'

    @pytest.mark.parametrize('with_residual', [True, False])
    def test_edge_links_pending_late_discovery(self, line_net, with_residual):
        manager = _manager(line_net, append=True)
        manager.process_probe_update(_update('px1', 2, SEED, MIDDLE, LAST, terminal=True))
        residual = manager.check_termination().residual if with_residual else frozenset()
        report = verify_offline(manager.graph, line_net.graph, residual)
        assert len(report.missing_links) == 2
        assert not report.extra_links
        assert report.is_clean is with_residual
        assert len(report.pending_links) == (2 if with_residual else 0)
        assert 'Verification' in report.markdown

    def test_extra_link_is_dirty(self, line_net):
        manager = _manager(line_net)
        manager.graph.insert_link(Link(Endpoint('fw1', 'eth0'), Endpoint('px1', 'eth0')))
        report = verify_offline(manager.graph, line_net.graph, manager.state.undiscovered)
        assert report.verdict == 'DIRTY'
        assert report.extra_links == {Link(Endpoint('fw1', 'eth0'), Endpoint('px1', 'eth0'))}


class TestPathSpec:

    def test_rules_from_reference(self, line_net):
        spec = PathSpec.from_reference(line_net.graph, 3, ['fw1', 'ids1', 'px1'])
        assert spec.rules == {'fw1': PathRule('eth0', '10.0.0.2'), 'ids1': PathRule('eth1', '10.0.0.6')}
        assert spec.dest_ip == '10.0.0.6'
        assert 'ids1' not in spec.without_rule('ids1').rules

    @pytest.mark.parametrize('path_id, nodes', [
        (0, ['fw1', 'ids1']),
        (-1, ['fw1', 'ids1']),
        (1, ['fw1']),
        (1, ['fw1', 'ghost']),
        (1, ['fw1', 'ids1', 'fw1']),
        (1, ['fw1', 'px1']),
    ])
    def test_rejected(self, line_net, path_id, nodes):
        with pytest.raises(InvalidPathSpec):
            PathSpec.from_reference(line_net.graph, path_id, nodes)

    def test_judge_ok(self, line_net):
        spec = PathSpec.from_reference(line_net.graph, 3, ['fw1', 'ids1', 'px1'])
        report = PathReport('px1', 3, 'OK', (SEED, MIDDLE, LAST))
        assert judge_path_report(spec, report) == PathOk(('fw1', 'ids1', 'px1'))

    def test_judge_broken(self, line_net):
        spec = PathSpec.from_reference(line_net.graph, 3, ['fw1', 'ids1', 'px1'])
        report = PathReport('ids1', 3, 'BROKEN', (SEED, PayloadEntry('ids1', 'eth0', NONE)))
        verdict = judge_path_report(spec, report)
        assert isinstance(verdict, PathFail)
        assert (verdict.last_good, verdict.hop, verdict.failed_at) == ('fw1', 1, 'ids1')
