"""Command-line interface.

This module exports the program's entry point: `main`.
"""

import argparse
import colorlog
import itertools
import logging
import math
import sys
import time

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import modelfile
from .constraint import (
    distribution_transversality_check, project_onto_A, rank_check,
    transversality_check
)
from .control import solve_control
from .errors import FatalError, UsageError
from .geometry import State, input_rank_check
from .models import FIXTURE_CURRENTS, FIXTURES, build_fixture
from .sim import integrate
from .utils import parse_vector
from .version import version
from .writers import find_writer, write_record

logger = logging.getLogger(__name__)


class SplitAppend(argparse.Action):
    """Argument parsing action for repeatable csv strings."""
    def __call__(self, parser, namespace, values, option_string=None):
        old_value = getattr(namespace, self.dest) or []
        new_value = old_value + values.split(',')

        setattr(
            namespace, self.dest, new_value
        )


def add_model_arguments(ap):
    ap.add_argument('model_path', metavar='MODEL_PATH',
                    help='model file (JSON)')

    ap.add_argument('-p', '--param', type=str, action=SplitAppend,
                    dest='params', metavar='NAME=VALUE',
                    help='override a model parameter')


def cli_setup():
    """CLI arguments parser setup."""
    ap = argparse.ArgumentParser(
        prog='vaffine',
        description='Virtual affine nonholonomic constraints: feedback '
                    'synthesis, checks and closed-loop simulation'
    )

    ap.add_argument('--version', action='version',
                    version='%(prog)s ' + version)

    ap.add_argument('-v', '--verbose', action='store_true',
                    help='run in verbose mode')

    commands = ap.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    sp = commands.add_parser(
        'check', help='check constraint rank and transversality'
    )
    add_model_arguments(sp)

    group = sp.add_argument_group('points')

    group.add_argument('--points', type=str,
                       help='semicolon-separated configurations, e.g. '
                            '`0,0,0;1,0,0`')

    group.add_argument('--grid', type=str, action='append',
                       metavar='COORDINATE=LO:HI:COUNT',
                       help='grid along a coordinate (repeatable)')

    sp.add_argument('-j', '--jobs', type=int, default=1,
                    help='number of parallel point checks')

    sp = commands.add_parser(
        'simulate', help='integrate the closed-loop system'
    )
    add_model_arguments(sp)

    group = sp.add_argument_group('initial state')

    group.add_argument('--q0', type=str, help='initial configuration')
    group.add_argument('--qdot0', type=str, help='initial velocity')

    group.add_argument('--project', action='store_true',
                       help='project the initial velocity onto the '
                            'constraint first')

    group = sp.add_argument_group('integration')

    group.add_argument('--t-end', type=float, default=10.0,
                       help='final time (default: 10)')
    group.add_argument('--dt', type=float, default=1e-3,
                       help='step size (default: 1e-3)')
    group.add_argument('--sample-every', type=int, default=1,
                       help='steps between samples (default: 1)')

    group.add_argument('--open-loop', action='store_true',
                       help='integrate with zero input')

    group = sp.add_argument_group('output control')

    group.add_argument('-o', '--out', type=str,
                       help='trajectory file (`.csv`, `.json`, or `-` for '
                            'CSV on stdout)')

    group.add_argument('--wrap', type=str, action=SplitAppend,
                       metavar='COORDINATE',
                       help='wrap angle coordinates to (-pi, pi] in the '
                            'output')

    sp = commands.add_parser(
        'control-at', help='evaluate the feedback law at a state'
    )
    add_model_arguments(sp)

    sp.add_argument('--q', type=str, help='configuration')
    sp.add_argument('--qdot', type=str, help='velocity')

    sp.add_argument('--verify', action='store_true',
                    help='cross-check the solve by least squares')

    sp = commands.add_parser(
        'export', help='write a bundled fixture as a model file'
    )

    sp.add_argument('fixture', metavar='FIXTURE', choices=FIXTURES,
                    help='one of: {}'.format(', '.join(FIXTURES)))

    sp.add_argument('--current', type=str, default='still',
                    choices=sorted(FIXTURE_CURRENTS),
                    help='sea current of the boat fixture')

    sp.add_argument('-p', '--param', type=str, action=SplitAppend,
                    dest='params', metavar='NAME=VALUE',
                    help='fixture parameter')

    sp.add_argument('-o', '--out', type=str, default='-',
                    help='output file (default: stdout)')

    return ap


def logging_setup(verbose):
    format = '%(log_color)s%(message)s%(reset)s'

    if verbose:
        format = '%(log_color)s%(levelname)s%(reset)s %(name)s %(message)s'

    handler = colorlog.StreamHandler()
    handler.setFormatter(
        colorlog.ColoredFormatter(
            format
        )
    )
    handler.vaffine = True

    logger = colorlog.getLogger()

    # Repeated calls to `main` in one process replace the handler.
    for old in list(logger.handlers):
        if getattr(old, 'vaffine', False):
            logger.removeHandler(old)

    logger.addHandler(handler)

    logging.getLogger().setLevel(
        logging.DEBUG if verbose else logging.INFO
    )


def parse_params(items):
    """`name=value` strings into a dict of floats."""
    params = {}

    for item in items or []:
        name, sep, value = item.partition('=')

        if not sep or not name.strip():
            raise UsageError(
                'parameters must look like `name=value`, got `{}`'.format(
                    item
                )
            )

        try:
            params[name.strip()] = float(value)
        except ValueError:
            raise UsageError(
                'value of parameter `{}` is not a number: `{}`'.format(
                    name.strip(), value
                )
            )

        if not math.isfinite(params[name.strip()]):
            raise UsageError(
                'value of parameter `{}` is not finite: `{}`'.format(
                    name.strip(), value
                )
            )

    return params


def vector_argument(text, length, name):
    if text is None:
        return [0.0] * length

    try:
        values = parse_vector(text, length, name)
    except ValueError as err:
        raise UsageError(str(err))

    if not all(math.isfinite(value) for value in values):
        raise UsageError(
            '{} must have finite components, got `{}`'.format(name, text)
        )

    return values


def load_model(args):
    model, con = modelfile.load(args.model_path, parse_params(args.params))

    if con.model_rank <= 1:
        logger.warning(
            'model distribution has rank {}: it is integrable and the '
            'constraint is effectively holonomic'.format(con.model_rank)
        )

    return model, con


def parse_grid(items, coordinates):
    """Cartesian product of `coordinate=lo:hi:count` axes."""
    axes = [np.zeros(1) for c in coordinates]

    for item in items:
        name, sep, axis = item.partition('=')

        if name not in coordinates:
            raise UsageError('unknown grid coordinate `{}`'.format(name))

        try:
            lo, hi, count = axis.split(':')
            lo, hi, count = float(lo), float(hi), int(count)
        except ValueError:
            raise UsageError(
                'grid must look like `coordinate=lo:hi:count`, got `{}`'
                .format(item)
            )

        if count < 1:
            raise UsageError('grid count must be positive: `{}`'.format(item))

        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise UsageError('grid bounds must be finite: `{}`'.format(item))

        axes[coordinates.index(name)] = np.linspace(lo, hi, count)

    return [list(point) for point in itertools.product(*axes)]


def check_points(args, coordinates):
    n = len(coordinates)
    points = []

    if args.points:
        for i, text in enumerate(args.points.split(';')):
            points.append(
                vector_argument(text, n, 'point {}'.format(i + 1))
            )

    if args.grid:
        points.extend(parse_grid(args.grid, list(coordinates)))

    return points or [[0.0] * n]


def check_point(model, con, q):
    """Verdict record for one configuration."""
    record = {'q': list(q)}

    try:
        ranks = rank_check(con, q)
        inputs = input_rank_check(model, q)
        transversal = transversality_check(con, model, q)
        brute = distribution_transversality_check(con, model, q)
    except FatalError as err:
        record.update(ok=False, error=err.message)

        return record

    if transversal.ok != brute.ok:
        logger.error(
            'transversality checks disagree at q = {}: P says {}, '
            'distribution basis says {}'.format(
                list(q), transversal.ok, brute.ok
            )
        )

    record.update(
        ok=ranks.ok and inputs.ok and transversal.ok and brute.ok,
        rank=ranks.as_dict(),
        input_rank=inputs.as_dict(),
        transversality=transversal.as_dict(),
        distribution_transversality={
            'ok': brute.ok,
            'condition': brute.condition,
            'reason': brute.reason
        }
    )

    return record


def cmd_check(args):
    model, con = load_model(args)
    points = check_points(args, model.coordinates)

    if args.jobs < 1:
        raise UsageError('--jobs must be positive')

    def check(q):
        return check_point(model, con, q)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as executor:
            records = list(executor.map(check, points))
    else:
        records = [check(q) for q in points]

    failures = 0

    for record in records:
        write_record(sys.stdout, record)

        if not record['ok']:
            failures += 1
            logger.error('check failed at q = {}: {}'.format(
                record['q'], record.get('error') or (
                    record['transversality']['reason']
                    or record['distribution_transversality']['reason']
                    or 'rank defect'
                )
            ))

    logger.info('{} of {} points ok'.format(
        len(records) - failures, len(records)
    ))

    return 1 if failures else 0


def cmd_simulate(args):
    if not 0 < args.dt < math.inf:
        raise UsageError(
            '--dt must be positive and finite, got {}'.format(args.dt)
        )

    if not 0 < args.t_end < math.inf:
        raise UsageError(
            '--t-end must be positive and finite, got {}'.format(args.t_end)
        )

    if args.sample_every < 1:
        raise UsageError('--sample-every must be at least 1')

    writer = find_writer(args.out) if args.out else None

    model, con = load_model(args)
    n = model.n

    wrap = []
    for name in args.wrap or []:
        if name not in model.coordinates:
            raise UsageError('cannot wrap unknown coordinate `{}`'.format(
                name
            ))

        wrap.append(model.coordinates.index(name))

    state = State(
        vector_argument(args.q0, n, '--q0'),
        vector_argument(args.qdot0, n, '--qdot0')
    )

    if args.project:
        state = project_onto_A(con, model, state)
        logger.info('projected initial velocity: {}'.format(
            state.qdot.tolist()
        ))

    started = time.perf_counter()

    trajectory = integrate(
        model, con, state, args.t_end, args.dt,
        sample_every=args.sample_every,
        feedback='none' if args.open_loop else 'virtual'
    )

    runtime = time.perf_counter() - started

    summary = {
        'model': model.name,
        'feedback': 'none' if args.open_loop else 'virtual',
        'projected': args.project,
        't_end': args.t_end,
        'dt': args.dt,
        'samples': len(trajectory),
        'phi0': trajectory.phis[0].tolist(),
        'drift_report': trajectory.drift_report.tolist(),
        'max_phi': trajectory.max_phi.tolist(),
        'energy_range': float(np.ptp(trajectory.energy)),
        'final_q': trajectory.final_state.q.tolist(),
        'final_qdot': trajectory.final_state.qdot.tolist(),
        'runtime': runtime
    }

    if args.out == '-':
        writer(sys.stdout, trajectory, wrap)
        logger.info('summary: {}'.format(summary))

        return 0

    if writer:
        with open(args.out, 'w', newline='') as fh:
            writer(fh, trajectory, wrap)

        logger.info('written {}'.format(args.out))

    write_record(sys.stdout, summary)

    return 0


def cmd_control_at(args):
    model, con = load_model(args)
    n = model.n

    state = State(
        vector_argument(args.q, n, '--q'),
        vector_argument(args.qdot, n, '--qdot')
    )

    solve = solve_control(model, con, state, verify=args.verify)

    write_record(sys.stdout, solve.as_dict())

    return 0


def cmd_export(args):
    model, con = build_fixture(
        args.fixture, args.current, parse_params(args.params)
    )

    text = modelfile.dumps(model, con)

    if args.out == '-':
        sys.stdout.write(text)
        return 0

    with open(args.out, 'w') as fh:
        fh.write(text)

    logger.info('written {}'.format(args.out))

    return 0


COMMANDS = {
    'check': cmd_check,
    'simulate': cmd_simulate,
    'control-at': cmd_control_at,
    'export': cmd_export
}


def main(args=None):
    """Program entry point.

    Returns the exit status: 0 when everything is fine, 1 for a mathematical
    failure (singular P, metric problems, aborted integration), 2 for usage
    and model file errors.
    """
    ap = cli_setup()
    args = ap.parse_args(args or sys.argv[1:])

    logging_setup(args.verbose)

    try:
        return COMMANDS[args.command](args)
    except FatalError as err:
        return err.log()
