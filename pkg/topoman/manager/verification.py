"""
Module: Verification

Offline verification of a discovered topology against a reference, and probe-based
path verification with path-checker probes.
"""

import logging
from dataclasses import dataclass, field

import docflow as doc

from ..agent import PathRule
from ..topology import Endpoint, diff_graphs
from ._error import error_stack

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VerificationReport:
    """
    Attributes:
        missing_links (frozenset): Reference links absent from the discovered graph.
        extra_links (frozenset): Discovered links absent from the reference.
        late_discovery_pending (frozenset): Residual interfaces expected to resolve through data traffic.
        missing_nodes (frozenset): Reference nodes never registered.
    """
    missing_links: frozenset = frozenset()
    extra_links: frozenset = frozenset()
    late_discovery_pending: frozenset = frozenset()
    missing_nodes: frozenset = frozenset()

    @property
    def pending_links(self):
        """Missing links incident to a late-discovery interface."""
        return frozenset(link for link in self.missing_links
                         if any(ep in self.late_discovery_pending for ep in link.endpoints))

    @property
    def genuine_missing(self):
        return self.missing_links - self.pending_links

    @property
    def is_clean(self):
        return not self.genuine_missing and not self.extra_links and not self.missing_nodes

    @property
    def verdict(self):
        return 'CLEAN' if self.is_clean else 'DIRTY'

    def __repr__(self):
        return self.markdown

    def _repr_markdown_(self):
        return self.markdown

    @property
    def markdown(self):
        return doc.Document(
            doc.Title(f'Verification: {self.verdict}', level=3),
            doc.Sequence({
                'Missing links': str(len(self.missing_links)),
                'Pending late discovery': str(len(self.pending_links)),
                'Extra links': str(len(self.extra_links)),
                'Missing nodes': str(len(self.missing_nodes)),
            }),
            doc.Title('Genuine discrepancies', level=4),
            doc.Sequence(sorted(str(link) for link in self.genuine_missing | self.extra_links) or ['none']),
        ).markdown


def verify_offline(discovered, reference, residual=frozenset()):
    """
    Compares the discovered graph with the reference.

    Missing links incident to a residual interface count as pending late discovery; any
    other missing link, extra link or missing node makes the report not CLEAN.
    """
    diff = diff_graphs(discovered, reference)
    report = VerificationReport(
        missing_links=diff.missing_links,
        extra_links=diff.extra_links,
        late_discovery_pending=frozenset(Endpoint(*ep) for ep in residual),
        missing_nodes=diff.missing_nodes,
    )
    if not report.is_clean:
        logger.warning('verification not clean: %d genuine missing, %d extra',
                       len(report.genuine_missing), len(report.extra_links))
    return report


@dataclass(frozen=True)
class PathSpec:
    """
    A configured path.

    Attributes:
        path_id (int): Path identifier, never 0.
        nodes (tuple): Device ids in path order.
        rules (dict): Device id -> `PathRule` for every device but the last.
        dest_ip (str): IP of the last device's interface facing the path.
    """
    path_id: int
    nodes: tuple
    rules: dict = field(default_factory=dict)
    dest_ip: str = None

    @classmethod
    def from_reference(cls, reference, path_id, nodes):
        """
        Derives port-routing rules from the reference graph.

        Raises:
            InvalidPathSpec: path_id 0, fewer than two nodes, unknown or repeated
                devices, or non-adjacent consecutive devices.
        """
        if path_id <= 0:
            error_stack('MGR-PATH-ID', str(path_id))
        nodes = tuple(nodes)
        if len(nodes) < 2:
            error_stack('MGR-PATH-SHORT', str(nodes))
        for node in nodes:
            if node not in reference.middleboxes:
                error_stack('MGR-PATH-NODE', node)
        if len(set(nodes)) != len(nodes):
            error_stack('MGR-PATH-NODE', f'repeated in {nodes}')
        rules = {}
        dest_ip = None
        for here, there in zip(nodes, nodes[1:]):
            hop = _adjacency(reference, here, there)
            if hop is None:
                error_stack('MGR-PATH-ADJACENT', f'{here} -> {there}')
            out_interface, next_hop = hop
            rules[here] = PathRule(out_interface, next_hop)
            dest_ip = next_hop
        return cls(path_id, nodes, rules, dest_ip)

    def without_rule(self, device_id):
        """The same path with one device's rule removed."""
        rules = {node: rule for node, rule in self.rules.items() if node != device_id}
        return PathSpec(self.path_id, self.nodes, rules, self.dest_ip)


def _attached_islands(reference, endpoint):
    islands = set()
    for link in reference.links_at(endpoint):
        island = reference.island_of(link.other(endpoint).node)
        if island is not None:
            islands.add(island.id)
    return islands


def _adjacency(reference, here, there):
    """``(out_interface, next_hop_ip)`` from `here` toward `there`, or None."""
    source, target = reference.middleboxes[here], reference.middleboxes[there]
    for iface in source.interfaces:
        endpoint = Endpoint(here, iface.name)
        for link in sorted(reference.links_at(endpoint), key=str):
            other = link.other(endpoint)
            if other.node == there:
                return iface.name, target.interface(other.port).ip
        islands = _attached_islands(reference, endpoint)
        if not islands:
            continue
        for candidate in target.interfaces:
            if islands & _attached_islands(reference, Endpoint(there, candidate.name)):
                return iface.name, candidate.ip
    return None


@dataclass(frozen=True)
class PathOk:
    trace: tuple


@dataclass(frozen=True)
class PathFail:
    """
    Attributes:
        last_good (str): Last device that forwarded the probe correctly, or None.
        hop (int): 1-based position of `last_good` in the path, 0 when None.
        failed_at (str): Device that reported the failure.
        status (str): Report status (BROKEN, DISCARD, or OK with a diverging trace).
        trace (tuple): Device ids the probe visited.
    """
    last_good: str
    hop: int
    failed_at: str
    status: str
    trace: tuple = ()


def judge_path_report(spec, report):
    """Compares a path-checker report with the configured node order."""
    trace = tuple(entry.device_id for entry in report.trace)
    if report.status == 'OK' and trace == spec.nodes:
        return PathOk(trace)
    matched = 0
    for seen, expected in zip(trace, spec.nodes):
        if seen != expected:
            break
        matched += 1
    if report.status == 'OK':
        good = max(matched - 1, 0)
    else:
        good = max(min(matched, len(trace) - 1), 0)
    last_good = spec.nodes[good - 1] if good else None
    return PathFail(last_good, good, report.device_id, report.status, trace)


def run_path_verification(reference, spec, sim):
    """
    Installs the path's rules, triggers its source and judges the outcome.

    Args:
        reference (TopologyGraph): Graph the rules were derived from.
        spec (PathSpec): The configured path.
        sim (Simulation): Simulator hosting the agents.

    Returns:
        PathOk or PathFail.
    """
    if spec.path_id <= 0:
        error_stack('MGR-PATH-ID', str(spec.path_id))
    for node in spec.nodes:
        if node not in reference.middleboxes:
            error_stack('MGR-PATH-NODE', node)
    sim.install_path_rules(spec)
    report = sim.run_path_check(spec)
    verdict = judge_path_report(spec, report)
    logger.info('path %d: %s', spec.path_id, type(verdict).__name__)
    return verdict
