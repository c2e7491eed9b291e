import pytest

from topoman.manager import DOWN, UP, PathFail, PathOk, PathSpec, run_path_verification
from topoman.simulator import (
    DiscoveryMode,
    NotEdgeAttached,
    SdnControllerModel,
    Simulation,
    TrafficObservation,
    run_discovery,
)
from topoman.topogen import generate_topology
from topoman.topology import Endpoint, Link, diff_graphs

RESIDUAL = frozenset({Endpoint('fw1', 'lan0'), Endpoint('px1', 'lan0')})


@pytest.mark.parametrize('append, up_calls', [(False, 3), (True, 1)])
def test_line_discovery(line_net, append, up_calls):
    graph, metrics, report = run_discovery(line_net, DiscoveryMode(append=append))
    assert metrics.selections == 1
    assert metrics.probe_triggers == 1
    assert metrics.up_calls == up_calls
    assert metrics.sim_ticks == 4
    assert graph.links >= {
        Link(Endpoint('fw1', 'eth0'), Endpoint('ids1', 'eth0')),
        Link(Endpoint('ids1', 'eth1'), Endpoint('px1', 'eth0')),
    }
    assert report.is_clean
    assert report.late_discovery_pending == RESIDUAL


def test_mode_labels():
    assert DiscoveryMode().label == 'edge/no-append'
    assert DiscoveryMode(append=True, header_sec=True, payload_sec=True).label == 'edge/append+hdrsec+paysec'


def test_secure_modes_find_the_same_links(line_net):
    plain = run_discovery(line_net, DiscoveryMode())
    secure = run_discovery(line_net, DiscoveryMode(append=True, header_sec=True, payload_sec=True))
    assert secure.graph.links == plain.graph.links
    assert secure.metrics.resolve_requests > 0
    assert secure.metrics.rejected == 0
    assert 'PROBE-UPDATE' in secure.transcript.text


def test_tokens_do_not_outlive_their_round():
    sim = Simulation(generate_topology('cisco', 12, seed=2), DiscoveryMode(header_sec=True), seed=2,
                     transcript=False)
    result = sim.run_discovery()
    assert result.metrics.selections > 1
    assert result.metrics.rejected == 0
    assert len(sim.manager.tokens) == 0


def test_tree_misses_exactly_the_late_discovery_links():
    net = generate_topology('tree', 20, seed=0)
    result = run_discovery(net, DiscoveryMode())
    diff = diff_graphs(result.graph, net.graph)
    assert not diff.extra_links
    assert {end for link in diff.missing_links for end in link.endpoints if end.node in net.graph.middleboxes} \
        == result.residual
    assert all(net.graph.middleboxes[end.node].interface(end.port).edge_facing for end in result.residual)


def test_late_discovery_closes_edge_links(line_net):
    sim = Simulation(line_net)
    result = sim.run_discovery()
    assert result.residual == RESIDUAL
    report = sim.close_late_discovery(result.residual)
    assert sim.metrics.late_discoveries == 2
    assert not report.missing_links and report.is_clean
    sim.close_late_discovery(result.residual)
    assert sim.metrics.late_discoveries == 2


def test_traffic_needs_an_edge_interface(line_net):
    sim = Simulation(line_net)
    assert sim.inject_data_traffic(Endpoint('fw1', 'lan0')) == TrafficObservation('edge0s0', 'p0', 'fw1', 'lan0')
    with pytest.raises(NotEdgeAttached):
        sim.inject_data_traffic(Endpoint('ids1', 'eth0'))
    with pytest.raises(NotEdgeAttached):
        SdnControllerModel(line_net.graph).observe_traffic('ghost', 'eth0')


def test_island_crossing_is_split():
    net = generate_topology('inline_offline', 3)
    sim = Simulation(net)
    result = sim.run_discovery()
    assert Link(Endpoint('mb2', 'eth0'), Endpoint('acc0s1', 'p0')) in result.graph.links
    assert Link(Endpoint('mb1', 'eth1'), Endpoint('acc0s0', 'p0')) in result.graph.links
    assert not result.report.extra_links
    assert sim.close_late_discovery(result.residual).is_clean


def test_transcript_is_deterministic():
    net = generate_topology('cisco', 20, seed=1)
    first = run_discovery(net, seed=3)
    second = run_discovery(net, seed=3)
    assert first.transcript.text == second.transcript.text
    assert first.metrics.to_dict() == second.metrics.to_dict()
    assert 'wall_clock' not in first.metrics.to_dict()
    assert 'wall_clock' in first.metrics.to_dict(timing=True)


def test_transcript_can_be_disabled(line_net):
    result = run_discovery(line_net, transcript=False)
    assert len(result.transcript) == 0
    assert result.transcript.text == ''


def test_silent_device_goes_down(line_net):
    history = Simulation(line_net).run_heartbeats(5, silent={'ids1'})
    assert [tick for tick, _ in history] == [1, 2, 3, 4, 5]
    assert history[0][1]['ids1'] == UP
    assert history[-1][1]['ids1'] == DOWN
    assert all(statuses['fw1'] == UP and statuses['px1'] == UP for _, statuses in history)


def test_device_falls_silent_later(line_net):
    history = Simulation(line_net).run_heartbeats(8, silent={'px1': 3})
    statuses = dict(history)
    assert statuses[4]['px1'] == UP
    assert statuses[8]['px1'] == DOWN


class TestPathVerification:

    def test_ok(self, line_net):
        spec = PathSpec.from_reference(line_net.graph, 3, ['fw1', 'ids1', 'px1'])
        assert run_path_verification(line_net.graph, spec, Simulation(line_net)) == PathOk(('fw1', 'ids1', 'px1'))

    @pytest.mark.parametrize('device, last_good, hop', [('ids1', 'fw1', 1), ('fw1', None, 0)])
    def test_missing_rule(self, line_net, device, last_good, hop):
        spec = PathSpec.from_reference(line_net.graph, 3, ['fw1', 'ids1', 'px1']).without_rule(device)
        verdict = run_path_verification(line_net.graph, spec, Simulation(line_net))
        assert isinstance(verdict, PathFail)
        assert (verdict.last_good, verdict.hop, verdict.status) == (last_good, hop, 'BROKEN')

    def test_rules_are_reinstalled(self, line_net):
        sim = Simulation(line_net)
        spec = PathSpec.from_reference(line_net.graph, 3, ['fw1', 'ids1', 'px1'])
        assert isinstance(run_path_verification(line_net.graph, spec.without_rule('ids1'), sim), PathFail)
        assert isinstance(run_path_verification(line_net.graph, spec, sim), PathOk)
