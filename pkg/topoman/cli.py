"""
Module: Command Line

Entry point of the ``topoman`` command.

    topoman gen --family cisco --nodes 20 --seed 3 --out net.conf --policy-out net.policy
    topoman discover --config net.conf --append --late
    topoman verify-path --family tree --nodes 20 --path mb0,mb1,mb4 --drop-rule mb1
    topoman suite --family cisco,tree --nodes 20 --seeds 0-29 --out table.csv

Every random draw of a command derives from its ``--seed`` (``--seeds`` for suites).
Exit codes: 0 success, 1 a run or path is not clean, 2 invalid input.
"""

import argparse
import logging
import sys
from dataclasses import replace

from . import __version__
from .error.error import TopoManError
from .experiment import ExperimentSpec, run_suite
from .manager import PathOk, PathSpec, run_path_verification
from .protocol.message import DEFAULT_TTL_MAX
from .simulator import Simulation
from .topogen import (
    CISCO,
    FAMILIES,
    dumps_policy_config,
    generate_topology,
    parse_network_config,
    parse_policy_config,
    serialize_network_config,
    write_network_config,
    write_policy_config,
)
from .topogen.generator import DEFAULT_FANOUT

logger = logging.getLogger('topoman')

EXIT_OK = 0
EXIT_DIRTY = 1
EXIT_INVALID = 2


def _network_arguments(parser):
    group = parser.add_argument_group('network')
    group.add_argument('--config', help='Network configuration file; overrides the generator.')
    group.add_argument('--policy', help='Policy configuration file.')
    group.add_argument('--family', default=CISCO, choices=FAMILIES, help='Generated topology family.')
    group.add_argument('--nodes', type=int, default=20, help='Middleboxes in the generated network.')
    group.add_argument('--seed', type=int, default=0, help='Seed of generation and simulation.')
    group.add_argument('--fanout', type=int, default=DEFAULT_FANOUT, help='Tree fanout.')


def _mode_arguments(parser, sweep=False):
    group = parser.add_argument_group('discovery mode')
    if sweep:
        group.add_argument('--heuristic', dest='heuristics', help='Comma separated: edge, random, policy.')
    else:
        group.add_argument('--heuristic', default='edge', choices=('edge', 'random', 'policy'))
    append = group.add_mutually_exclusive_group()
    append.add_argument('--append', dest='append', action='store_const', const=True,
                        help='Payload-append probes.')
    append.add_argument('--no-append', dest='append', action='store_const', const=False,
                        help='One up-call per hop.')
    group.add_argument('--header-sec', action='store_const', const=True, help='Token probe-pair identities.')
    group.add_argument('--payload-sec', action='store_const', const=True, help='Sealed payload entries.')
    group.add_argument('--ttl-max', type=int, help=f'TTL threshold (default {DEFAULT_TTL_MAX}).')
    group.add_argument('--egress', choices=('predict', 'steer'), help='Output interface approach.')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='topoman',
        description='Probe-based topology discovery of middlebox networks with SDN islands.',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--log-level', default='WARNING',
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'), help='Logging level.')
    commands = parser.add_subparsers(dest='command', required=True)

    gen = commands.add_parser('gen', help='Generate a network configuration.')
    gen.add_argument('--family', default=CISCO, choices=FAMILIES)
    gen.add_argument('--nodes', type=int, default=20)
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--fanout', type=int, default=DEFAULT_FANOUT)
    gen.add_argument('--out', help='Network configuration path; stdout when omitted.')
    gen.add_argument('--policy-out', help='Policy configuration path.')
    gen.set_defaults(handler=cmd_gen)

    discover = commands.add_parser('discover', help='Run one discovery and print its transcript.')
    _network_arguments(discover)
    _mode_arguments(discover)
    discover.add_argument('--late', action='store_true', help='Inject data traffic on residual interfaces.')
    discover.add_argument('--no-transcript', dest='transcript', action='store_false',
                          help='Print only metrics and the report.')
    discover.add_argument('--timing', action='store_true', help='Add wall-clock seconds to the metrics.')
    discover.set_defaults(handler=cmd_discover)

    verify = commands.add_parser('verify-path', help='Check a configured path with a path-checker probe.')
    _network_arguments(verify)
    verify.add_argument('--path', required=True, help='Comma separated device ids in path order.')
    verify.add_argument('--path-id', type=int, default=1)
    verify.add_argument('--drop-rule', help='Remove this device\'s port-routing rule before checking.')
    verify.set_defaults(handler=cmd_verify_path)

    suite = commands.add_parser('suite', help='Sweep families and modes into a metrics table.')
    suite.add_argument('--spec', help='JSON experiment file; flags override its keys.')
    suite.add_argument('--family', dest='families', help='Comma separated families.')
    suite.add_argument('--nodes', help='Comma separated middlebox counts.')
    suite.add_argument('--seeds', help='Seed list such as 0-29 or 1,4,9.')
    _mode_arguments(suite, sweep=True)
    suite.add_argument('--workers', type=int)
    suite.add_argument('--timing', action='store_const', const=True, help='Add wall-clock seconds.')
    suite.add_argument('--out', help='CSV path; stdout when omitted.')
    suite.add_argument('--quiet', action='store_true', help='No progress line.')
    suite.set_defaults(handler=cmd_suite)
    return parser


def load_network(args):
    """The configured or generated network of a command, with its policy override."""
    if args.config:
        net = parse_network_config(args.config)
    else:
        net = generate_topology(args.family, args.nodes, args.seed, args.fanout)
    if args.policy:
        net = replace(net, policies=tuple(parse_policy_config(args.policy)))
    return net


def discovery_mode(args):
    """A validated `DiscoveryMode` from the mode flags."""
    spec = ExperimentSpec.from_options(
        seeds=[args.seed],
        heuristics=args.heuristic,
        appends=bool(args.append),
        header_sec=args.header_sec,
        payload_sec=args.payload_sec,
        ttl_max=args.ttl_max,
        egress=args.egress,
    )
    return spec.modes()[0]


def cmd_gen(args):
    net = generate_topology(args.family, args.nodes, args.seed, args.fanout)
    if args.out:
        write_network_config(net, args.out)
        logger.info('wrote %s n=%d seed=%d to %s', args.family, args.nodes, args.seed, args.out)
    else:
        sys.stdout.write(serialize_network_config(net))
    if args.policy_out:
        write_policy_config(net.policies, args.policy_out)
    elif not args.out:
        sys.stdout.write('\n' + dumps_policy_config(net.policies))
    return EXIT_OK


def cmd_discover(args):
    net = load_network(args)
    sim = Simulation(net, discovery_mode(args), args.seed, transcript=args.transcript)
    result = sim.run_discovery()
    report = result.report
    if args.late:
        report = sim.close_late_discovery(result.residual)
    if args.transcript:
        sys.stdout.write(result.transcript.text)
    print(result.metrics.to_markdown(args.timing))
    print(report.markdown)
    return EXIT_OK if report.is_clean else EXIT_DIRTY


def cmd_verify_path(args):
    net = load_network(args)
    nodes = [node.strip() for node in args.path.split(',') if node.strip()]
    spec = PathSpec.from_reference(net.graph, args.path_id, nodes)
    if args.drop_rule:
        spec = spec.without_rule(args.drop_rule)
    verdict = run_path_verification(net.graph, spec, Simulation(net, seed=args.seed, transcript=False))
    if isinstance(verdict, PathOk):
        print(f'PathOk {" ".join(verdict.trace)}')
        return EXIT_OK
    print(f'PathFail {verdict.status} at {verdict.failed_at}, last good {verdict.last_good} '
          f'(hop {verdict.hop}), trace {" ".join(verdict.trace) or "-"}')
    return EXIT_DIRTY


def cmd_suite(args):
    options = dict(
        families=args.families,
        nodes=args.nodes,
        seeds=args.seeds,
        heuristics=args.heuristics,
        appends=None if args.append is None else (args.append,),
        header_sec=args.header_sec,
        payload_sec=args.payload_sec,
        ttl_max=args.ttl_max,
        egress=args.egress,
        workers=args.workers,
        timing=args.timing,
        out=args.out,
    )
    if args.spec:
        spec = ExperimentSpec.from_json(args.spec, **options)
    else:
        spec = ExperimentSpec.from_options(**options)
    result = run_suite(spec, quiet=args.quiet)
    if not spec.out:
        sys.stdout.write(result.to_csv())
    return EXIT_OK if result.clean else EXIT_DIRTY


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format='%(levelname)s %(name)s: %(message)s')
    try:
        return args.handler(args)
    except TopoManError as e:
        print(f'topoman: {e}', file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f'topoman: {e}', file=sys.stderr)
        return EXIT_INVALID


if __name__ == '__main__':
    sys.exit(main())
