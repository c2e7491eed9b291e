import networkx as nx
import pytest

from topoman.error.error import TopoManError
from topoman.manager import PolicyRule
from topoman.topogen import (
    FAMILIES,
    ConfigError,
    InconsistentRoute,
    ParseError,
    SubnetMismatch,
    dumps_policy_config,
    generate_topology,
    loads_network_config,
    loads_policy_config,
    parse_network_config,
    parse_policy_config,
    serialize_network_config,
    write_network_config,
    write_policy_config,
)
from topoman.topology import Endpoint


def _same_network(a, b):
    assert a.links == b.links
    assert a.middleboxes == b.middleboxes
    assert a.islands.keys() == b.islands.keys()
    assert a.policies == b.policies


class TestConfig:

    def test_line_config(self, line_net):
        assert sorted(line_net.middleboxes) == ['fw1', 'ids1', 'px1']
        assert sorted(line_net.islands) == ['edge0', 'edge1']
        assert len(line_net.links) == 4
        assert line_net.edge_interfaces == {Endpoint('fw1', 'lan0'), Endpoint('px1', 'lan0')}
        assert line_net.policies == (PolicyRule('192.168.0.0/24', '192.168.1.0/24'),)

    def test_serialized_text_parses_back(self, line_net):
        _same_network(loads_network_config(serialize_network_config(line_net)), line_net)

    def test_file_round_trip(self, line_net, tmp_path):
        write_network_config(line_net, tmp_path / 'net.conf')
        _same_network(parse_network_config(tmp_path / 'net.conf'), line_net)

    @pytest.mark.parametrize('family', FAMILIES)
    def test_generated_text_parses_back(self, family):
        net = generate_topology(family, 12, seed=4)
        _same_network(loads_network_config(serialize_network_config(net)), net)

    def test_route_next_hop_must_be_adjacent(self, line_config):
        text = line_config.replace('fw1 0.0.0.0/0 eth0 10.0.0.2', 'fw1 0.0.0.0/0 eth0 10.0.0.6')
        with pytest.raises(InconsistentRoute):
            loads_network_config(text)

    def test_linked_subnets_must_match(self, line_config):
        text = line_config.replace('eth0 10.0.0.2/30', 'eth0 10.0.1.2/30')
        with pytest.raises(SubnetMismatch):
            loads_network_config(text)

    @pytest.mark.parametrize('bad, line', [
        ('[nodes]', 1),
        ('fw1 firewall', 1),
        ('[middlebox]\nfw1 firewall\n  eth0 10.0.0.1', 3),
        ('[middlebox]\nfw1 firewall\n  eth0 10.0.0.1/33', 3),
        ('[middlebox]\nfw1 firewall fast', 2),
        ('[middlebox]\nfw1 firewall\n  eth0 10.0.0.1/30\nfw1 proxy', 4),
        ('[middlebox]\nfw1 firewall\n  eth0 10.0.0.1/30\n[link]\nfw1:eth0 fw2:eth0', 5),
        ('[middlebox]\nfw1 firewall\n  eth0 10.0.0.1/30\n[route]\nfw1 0.0.0.0/0 eth5 10.0.0.2', 5),
    ])
    def test_parse_errors_name_the_line(self, bad, line):
        with pytest.raises(ParseError, match=f'line {line}'):
            loads_network_config(bad)

    def test_errors_share_a_base(self):
        with pytest.raises(ConfigError) as info:
            loads_network_config('[nodes]')
        assert info.value.errid == 'CONF-SECTION'


class TestPolicyConfig:

    def test_parse(self):
        rules = loads_policy_config('[policy]\n10.1.0.0/16 -> 10.2.0.0/16 deny  # comment\n'
                                    '10.2.0.0/16->10.3.0.0/16\n')
        assert rules == [PolicyRule('10.1.0.0/16', '10.2.0.0/16', 'deny'), PolicyRule('10.2.0.0/16', '10.3.0.0/16')]

    def test_empty(self):
        assert loads_policy_config('') == []
        assert loads_policy_config('# nothing\n[policy]\n') == []

    @pytest.mark.parametrize('bad', ['10.0.0.0/40 -> 10.1.0.0/16', '10.0.0.0/8', '[link]', '10.0.0.1/8 -> 10.1.0.0/16'])
    def test_rejected(self, bad):
        with pytest.raises(ParseError):
            loads_policy_config(bad)

    def test_file_round_trip(self, tmp_path):
        rules = [PolicyRule('10.1.0.0/16', '10.2.0.0/16', 'deny'), PolicyRule('10.2.0.0/16', '10.3.0.0/16')]
        write_policy_config(rules, tmp_path / 'policy.conf')
        assert parse_policy_config(tmp_path / 'policy.conf') == rules
        assert loads_policy_config(dumps_policy_config(rules)) == rules


class TestGenerator:

    def test_full_mesh(self):
        net = generate_topology('full_mesh', 20)
        assert len(net.links) == 190
        assert all(len(mb.interfaces) == 19 for mb in net.middleboxes.values())
        assert not net.islands

    def test_tree(self):
        net = generate_topology('tree', 20)
        mb_links = [link for link in net.links
                    if all(ep.node in net.middleboxes for ep in link.endpoints)]
        assert len(mb_links) == 19
        graph = nx.Graph((link.endpoint_a.node, link.endpoint_b.node) for link in mb_links)
        assert nx.is_tree(graph)
        leaves = [mb for mb in net.middleboxes.values() if any(iface.edge_facing for iface in mb.interfaces)]
        assert len(leaves) == 13

    def test_cisco_interface_density(self):
        net = generate_topology('cisco', 100)
        assert 2.1 <= net.interface_density <= 2.7
        assert any(mb.dynamic_egress for mb in net.middleboxes.values())
        assert any(island_id.startswith('acc') for island_id in net.islands)

    def test_inline_offline_has_offline_devices(self):
        net = generate_topology('inline_offline', 9)
        offline = [mb for mb in net.middleboxes.values() if len(mb.interfaces) == 1]
        assert {mb.id for mb in offline} == {'mb2', 'mb5', 'mb8'}

    @pytest.mark.parametrize('family', FAMILIES)
    def test_deterministic(self, family):
        a, b = generate_topology(family, 15, seed=2), generate_topology(family, 15, seed=2)
        assert serialize_network_config(a) == serialize_network_config(b)

    @pytest.mark.parametrize('family', FAMILIES)
    def test_policies_cover_the_lans(self, family):
        net = generate_topology(family, 15)
        lans = {iface.network for mb in net.middleboxes.values() for iface in mb.interfaces if iface.edge_facing}
        assert {rule.src_network for rule in net.policies} | {rule.dst_network for rule in net.policies} <= lans

    def test_island_links_reach_border_ports(self):
        net = generate_topology('inline_offline', 6)
        for island in net.islands.values():
            for port in island.border_ports:
                assert net.graph.links_at(port)

    @pytest.mark.parametrize('family, n', [('mesh', 10), ('tree', 1), ('tree', 0)])
    def test_rejected_arguments(self, family, n):
        with pytest.raises(TopoManError):
            generate_topology(family, n)

    def test_lans_live_behind_edge_islands(self):
        net = generate_topology('tree', 5)
        for endpoint in net.edge_interfaces:
            link, = net.graph.links_at(endpoint)
            assert net.graph.island_of(link.other(endpoint).node).id.startswith('edge')

