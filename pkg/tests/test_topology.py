import ipaddress
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topoman.topogen import generate_topology
from topoman.topology import (
    DIRECT,
    Endpoint,
    Interface,
    InvalidTopology,
    Link,
    Middlebox,
    NoRoute,
    RouteEntry,
    SdnIsland,
    TopologyGraph,
    UnknownEndpoint,
    device_adjacency,
    diff_graphs,
    insert_link,
    lookup_entry,
    lookup_route,
)


def _mb(routes=(), interfaces=None):
    interfaces = interfaces or (Interface('eth0', '10.0.0.1', 30), Interface('eth1', '10.0.0.5', 30),
                                Interface('lan0', '192.168.0.1', 24, edge_facing=True))
    return Middlebox('fw1', 'firewall', interfaces, routes)


class TestRouteLookup:

    def test_longest_prefix_wins(self):
        mb = _mb([RouteEntry('0.0.0.0', 0, 'eth0', '10.0.0.2'),
                  RouteEntry('172.16.0.0', 12, 'eth1', '10.0.0.6'),
                  RouteEntry('172.16.5.0', 24, 'eth0', '10.0.0.2')])
        assert lookup_route(mb, '172.16.5.9') == 'eth0'
        assert lookup_route(mb, '172.16.6.9') == 'eth1'
        assert lookup_route(mb, '8.8.8.8') == 'eth0'

    def test_connected_subnets_are_implicit(self):
        mb = _mb()
        assert lookup_route(mb, '10.0.0.6') == 'eth1'
        assert lookup_entry(mb, '192.168.0.77').next_hop == DIRECT

    def test_first_declared_wins_at_equal_length(self):
        mb = _mb([RouteEntry('172.16.0.0', 16, 'eth1', '10.0.0.6'),
                  RouteEntry('172.16.0.0', 16, 'eth0', '10.0.0.2')])
        assert lookup_route(mb, '172.16.1.1') == 'eth1'

    def test_no_route(self):
        with pytest.raises(NoRoute):
            lookup_route(_mb(), '8.8.8.8')

    @settings(max_examples=200)
    @given(st.lists(st.tuples(st.integers(0, 2 ** 32 - 1), st.integers(0, 32), st.sampled_from(['eth0', 'eth1'])),
                    max_size=12),
           st.integers(0, 2 ** 32 - 1))
    def test_agrees_with_linear_scan(self, prefixes, address):
        routes = []
        for value, length, out in prefixes:
            network = ipaddress.IPv4Network((value, length), strict=False)
            routes.append(RouteEntry(str(network.network_address), length, out, '10.0.0.2'))
        mb = _mb(routes)
        dest = ipaddress.IPv4Address(address)
        candidates = [entry for entry in mb.route_table.entries if dest in entry.network]
        if not candidates:
            with pytest.raises(NoRoute):
                lookup_route(mb, str(dest))
            return
        best = max(entry.network.prefixlen for entry in candidates)
        expected = next(entry for entry in candidates if entry.network.prefixlen == best)
        assert lookup_entry(mb, str(dest)) == expected

    def test_agrees_with_linear_scan_over_ten_thousand_lookups(self):
        rng = random.Random(20261018)
        checked = 0
        while checked < 10000:
            routes = []
            for _ in range(rng.randint(0, 16)):
                length = rng.randint(0, 32)
                network = ipaddress.IPv4Network((rng.getrandbits(32), length), strict=False)
                routes.append(RouteEntry(str(network.network_address), length, rng.choice(['eth0', 'eth1']), '10.0.0.2'))
            mb = _mb(routes)
            entries = mb.route_table.entries
            for _ in range(10):
                if entries and rng.random() < 0.7:
                    network = rng.choice(entries).network
                    dest = network.network_address + rng.randrange(network.num_addresses)
                else:
                    dest = ipaddress.IPv4Address(rng.getrandbits(32))
                candidates = [entry for entry in entries if dest in entry.network]
                if candidates:
                    best = max(entry.network.prefixlen for entry in candidates)
                    expected = next(entry for entry in candidates if entry.network.prefixlen == best)
                    assert lookup_entry(mb, str(dest)) == expected
                else:
                    with pytest.raises(NoRoute):
                        lookup_route(mb, str(dest))
                checked += 1


class TestModel:

    def test_link_is_undirected(self):
        a, b = Endpoint('fw1', 'eth0'), Endpoint('ids1', 'eth0')
        assert Link(a, b) == Link(b, a)
        assert Link(b, a).endpoint_a == a
        assert Link(a, b).other(a) == b

    def test_self_link(self):
        with pytest.raises(InvalidTopology):
            Link(Endpoint('fw1', 'eth0'), Endpoint('fw1', 'eth0'))

    @pytest.mark.parametrize('kwargs', [
        dict(id='x', kind='router', interfaces=(Interface('eth0', '10.0.0.1', 30),)),
        dict(id='x', kind='firewall', interfaces=()),
        dict(id='x', kind='firewall', interfaces=(Interface('eth0', '10.0.0.1', 30),) * 2),
        dict(id='x', kind='firewall', interfaces=(Interface('eth0', '10.0.0.1', 30),), dynamic_egress=True),
        dict(id='x', kind='firewall', interfaces=(Interface('eth0', '10.0.0.1', 30),),
             routes=(RouteEntry('0.0.0.0', 0, 'eth9'),)),
    ])
    def test_invalid_middlebox(self, kwargs):
        with pytest.raises(InvalidTopology):
            Middlebox(**kwargs)

    def test_network_is_computed_once(self):
        iface = Interface('eth0', '10.0.0.1', 30)
        assert iface.network is iface.network
        assert iface.network == ipaddress.IPv4Network('10.0.0.0/30')
        assert Interface('eth0', '10.0.0.1', 30).network is iface.network
        assert iface == Interface('eth0', '10.0.0.1', 30)
        assert 'network' not in repr(iface)
        route = RouteEntry('172.16.0.0', 12, 'eth0')
        assert route.network is RouteEntry('172.16.0.0', 12, 'eth1').network

    def test_bad_address(self):
        with pytest.raises(InvalidTopology):
            Interface('eth0', '10.0.0.300', 30)

    def test_insert_link_requires_known_endpoints(self, line_net):
        graph = TopologyGraph([line_net.middleboxes['fw1']])
        with pytest.raises(UnknownEndpoint):
            insert_link(graph, Link(Endpoint('fw1', 'eth0'), Endpoint('ids1', 'eth0')))
        with pytest.raises(UnknownEndpoint):
            insert_link(graph, Link(Endpoint('fw1', 'eth7'), Endpoint('fw1', 'eth0')))

    def test_insert_is_idempotent(self, line_net):
        graph = TopologyGraph(line_net.middleboxes)
        link = Link(Endpoint('fw1', 'eth0'), Endpoint('ids1', 'eth0'))
        insert_link(graph, link)
        insert_link(graph, link)
        assert graph.links == {link}
        assert graph.links_at(Endpoint('ids1', 'eth0')) == {link}

    def test_island_internal_links_come_with_the_island(self):
        island = SdnIsland('acc0', ('s0', 's1'), (Link(Endpoint('s0', 'x1'), Endpoint('s1', 'x0')),),
                           (Endpoint('s0', 'p0'),))
        graph = TopologyGraph(islands=[island])
        assert len(graph.links) == 1
        assert graph.island_of('s1') is island
        assert graph.has_endpoint(Endpoint('s0', 'p0'))
        assert not graph.has_endpoint(Endpoint('s0', 'p9'))

    def test_diff(self, line_net):
        discovered = TopologyGraph(line_net.middleboxes)
        link = Link(Endpoint('fw1', 'eth0'), Endpoint('ids1', 'eth0'))
        insert_link(discovered, link)
        diff = diff_graphs(discovered, line_net.graph)
        assert link not in diff.missing_links
        assert len(diff.missing_links) == len(line_net.links) - 1
        assert not diff.extra_links
        assert diff.missing_nodes == {'edge0s0', 'edge1s0'}
        assert diff_graphs(line_net.graph, line_net.graph).is_empty

    def test_diff_is_antisymmetric(self, line_net):
        partial = TopologyGraph(line_net.middleboxes)
        insert_link(partial, Link(Endpoint('fw1', 'eth0'), Endpoint('ids1', 'eth0')))
        partial.add_middlebox(Middlebox('ghost', 'ids', (Interface('eth0', '172.31.0.1', 24),)))
        forward = diff_graphs(partial, line_net.graph)
        backward = diff_graphs(line_net.graph, partial)
        assert forward.missing_links == backward.extra_links
        assert forward.extra_links == backward.missing_links
        assert forward.missing_nodes == backward.extra_nodes == {'edge0s0', 'edge1s0'}
        assert forward.extra_nodes == backward.missing_nodes == {'ghost'}

    def test_diff_of_tree_without_edge_links(self):
        net = generate_topology('tree', 20, seed=0)
        reference = net.graph
        edge_links = {link for link in reference.links
                      if any(end.node in reference.middleboxes
                             and reference.middleboxes[end.node].interface(end.port).edge_facing
                             for end in link.endpoints)}
        assert edge_links
        partial = TopologyGraph(reference.middleboxes, reference.islands, reference.links - edge_links)
        diff = diff_graphs(partial, reference)
        assert diff.missing_links == edge_links
        assert not diff.extra_links
        assert not diff.missing_nodes and not diff.extra_nodes

    def test_device_adjacency_looks_through_islands(self):
        mbs = [Middlebox(name, 'ids', (Interface('eth0', f'172.16.0.{k + 1}', 24),))
               for k, name in enumerate(['a', 'b', 'c'])]
        island = SdnIsland('acc0', ('s0',), (), tuple(Endpoint('s0', f'p{k}') for k in range(3)))
        links = {Link(Endpoint(mb.id, 'eth0'), Endpoint('s0', f'p{k}')) for k, mb in enumerate(mbs)}
        adjacency = device_adjacency(TopologyGraph(mbs, [island], links))
        assert adjacency['a'] == [('eth0', 'b', 'eth0'), ('eth0', 'c', 'eth0')]

    def test_owner_of(self, line_net):
        assert line_net.graph.owner_of('10.0.0.5') == ('ids1', 'eth1')
        assert line_net.graph.owner_of('1.2.3.4') is None

    def test_to_networkx(self, line_net):
        graph = line_net.graph.to_networkx()
        assert graph.number_of_edges() == len(line_net.links)
        assert graph.nodes['edge0s0']['kind'] == 'switch'
