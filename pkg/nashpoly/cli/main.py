"""
Command-line interface.

    python manage.py solve ball_duel --seed 7
    python manage.py enumerate problems/my_game.json --json
    python manage.py check ball_duel --point 0,0,0,0
    python manage.py export-sdpa ball_duel --order 2 --output master.dat-s
    python manage.py repro
    python manage.py list

Exit codes: 0 when the requested answer was obtained, 2 when the search was
inconclusive (or a golden failed), 1 for usage and input errors.
"""

import argparse
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from config import settings
from nashpoly.conic import export_sdpa
from nashpoly.equilibria import (
    NeStatus,
    SolverOptions,
    check_candidate,
    enumerate_nes,
    find_one_ne,
)
from nashpoly.exceptions import NashpolyError
from nashpoly.games import ALIASES, available_games, build_game, kkt_sets
from nashpoly.relaxations import RelaxationSpec, assemble_relaxation, gen_theta, theta_polynomial

from .problem_files import ProblemFileError, parse_problem_file
from .reports import format_check, format_json, format_text, write_csv, write_pdf
from .repro import run_repro

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2

# Statuses that answer each command
ANSWERED = {
    'solve': (NeStatus.FOUND_SOME, NeStatus.FOUND_ALL, NeStatus.NONE_EXISTS),
    'enumerate': (NeStatus.FOUND_ALL, NeStatus.NONE_EXISTS),
}

# CLI flag -> SolverOptions field
OPTION_FLAGS = {
    'seed': 'seed',
    'k_max': 'k_max',
    'delta_init': 'delta_init',
    'omega_tol': 'omega_tol',
    'rank_tol': 'rank_tol',
    'max_loops': 'max_outer_loops',
    'workers': 'workers',
}


class UsageError(NashpolyError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def load_problem(ref):
    """
    Load a game from a problem file path, a bundled problem file or the catalog.

    Returns:
        (NepProblem, option overrides from the file)
    """
    path = Path(ref)
    if path.is_file():
        parsed = parse_problem_file(path.read_text(encoding='utf-8'))
        return parsed.nep, parsed.options
    bundled = Path(settings.PROBLEMS_DIR) / f"{ALIASES.get(ref, ref)}.json"
    if bundled.is_file():
        parsed = parse_problem_file(bundled.read_text(encoding='utf-8'))
        return parsed.nep, parsed.options
    try:
        return build_game(ref), {}
    except KeyError:
        raise UsageError(f"'{ref}' is neither a problem file nor a bundled game") from None


def build_options(args, overrides):
    options = SolverOptions(**overrides)
    changes = {}
    for flag, name in OPTION_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    if getattr(args, 'convex', False):
        changes['convex'] = True
    return replace(options, **changes) if changes else options


def parse_point(text, n):
    try:
        values = [float(v) for v in text.replace(' ', '').split(',') if v]
    except ValueError:
        raise UsageError(f"--point must be comma-separated numbers, got '{text}'") from None
    if len(values) != n:
        raise UsageError(f"--point needs {n} values, got {len(values)}")
    return np.array(values)


def _emit(text, output=None):
    if output:
        Path(output).write_text(text, encoding='utf-8')
    else:
        sys.stdout.write(text)


def _run_search(args, search):
    nep, overrides = load_problem(args.problem)
    options = build_options(args, overrides)
    started = time.perf_counter()
    report = search(nep, options)
    if args.timing:
        report.elapsed = time.perf_counter() - started
    text = format_json(report, args.timing) if args.json else format_text(report, args.timing)
    _emit(text, args.output)
    if args.csv:
        write_csv(report, args.csv)
    if args.pdf:
        write_pdf(report, args.pdf)
    return EXIT_OK if report.status in ANSWERED[args.command] else EXIT_INCONCLUSIVE


def cmd_solve(args):
    return _run_search(args, find_one_ne)


def cmd_enumerate(args):
    return _run_search(args, enumerate_nes)


def cmd_check(args):
    nep, overrides = load_problem(args.problem)
    options = build_options(args, overrides)
    point = parse_point(args.point, nep.n)
    check = check_candidate(nep, point, options)
    if args.json:
        text = json.dumps({
            'point': point.tolist(),
            'omegas': [float(w) for w in check.omegas],
            'omega_star': float(check.omega_star),
            'players': [
                {
                    'player': c.player + 1,
                    'status': c.status.value,
                    'omega': float(c.omega),
                    'minimizers': [np.asarray(v).tolist() for v in c.minimizers],
                }
                for c in check.checks
            ],
        }, indent=2) + '\n'
    else:
        text = format_check(check, nep.layout, point)
    _emit(text, args.output)
    return EXIT_INCONCLUSIVE if check.inconclusive else EXIT_OK


def cmd_export_sdpa(args):
    nep, overrides = load_problem(args.problem)
    options = build_options(args, overrides)
    system = kkt_sets(nep)
    theta = gen_theta(options.seed, nep.n)
    spec = RelaxationSpec(
        objective=theta_polynomial(theta, nep.layout),
        phi=system.phi,
        psi=system.psi,
        order=args.order,
    )
    _emit(export_sdpa(assemble_relaxation(spec)), args.output)
    return EXIT_OK


def cmd_repro(args):
    options = build_options(args, {})
    results = run_repro(args.games or None, options)
    lines = [f"{'PASS' if r.passed else 'FAIL'} {r.golden.game}: {r.message}" for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} goldens passed")
    _emit('\n'.join(lines) + '\n', args.output)
    return EXIT_OK if passed == len(results) else EXIT_INCONCLUSIVE


def cmd_list(args):
    lines = ['Bundled games:'] + [f"  {name}" for name in available_games()]
    lines += ['Aliases:'] + [f"  {alias} -> {name}" for alias, name in sorted(ALIASES.items())]
    problems = sorted(Path(settings.PROBLEMS_DIR).glob('*.json'))
    if problems:
        lines += ['Bundled problem files:'] + [f"  {p.stem}" for p in problems]
    _emit('\n'.join(lines) + '\n')
    return EXIT_OK


def _add_solver_flags(parser):
    parser.add_argument('--seed', type=int, help=f'Seed for Theta (default {settings.SEED})')
    parser.add_argument('--k-max', dest='k_max', type=int, help=f'Relaxation order cap (default {settings.K_MAX})')
    parser.add_argument('--delta-init', dest='delta_init', type=float,
                        help=f'Initial delta of the next-equilibrium gate (default {settings.DELTA_INIT})')
    parser.add_argument('--omega-tol', dest='omega_tol', type=float,
                        help=f'Acceptance tolerance on omega* (default {settings.OMEGA_TOL})')
    parser.add_argument('--rank-tol', dest='rank_tol', type=float,
                        help=f'Relative rank tolerance (default {settings.RANK_TOL})')
    parser.add_argument('--max-loops', dest='max_loops', type=int,
                        help=f'Outer loop budget (default {settings.MAX_OUTER_LOOPS})')
    parser.add_argument('--workers', type=int, help=f'Threads for per-player checks (default {settings.WORKERS})')
    parser.add_argument('--output', help='Write the report to a file instead of stdout')
    parser.add_argument('--log-level', dest='log_level', help='Level of the nashpoly logger')


def build_parser():
    parser = _Parser(prog='nashpoly', description='Nash equilibria of polynomial games')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    for name, help_text in (('solve', 'Find one equilibrium'), ('enumerate', 'Find all equilibria')):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument('problem', help='Problem file or bundled game name')
        _add_solver_flags(sub)
        sub.add_argument('--convex', action='store_true', help='Declare the game convex')
        sub.add_argument('--json', action='store_true', help='Full precision JSON report')
        sub.add_argument('--csv', help='Also write a CSV summary to this path')
        sub.add_argument('--pdf', help='Also write a PDF summary to this path')
        sub.add_argument('--timing', action='store_true', help='Report wall time')

    sub = commands.add_parser('check', help='Check a point for profitable deviations')
    sub.add_argument('problem')
    sub.add_argument('--point', required=True, help='Comma-separated coordinates of the full point')
    sub.add_argument('--json', action='store_true')
    _add_solver_flags(sub)

    sub = commands.add_parser('export-sdpa', help='Write the master relaxation in SDPA format')
    sub.add_argument('problem')
    sub.add_argument('--order', type=int, required=True, help='Relaxation order k')
    _add_solver_flags(sub)

    sub = commands.add_parser('repro', help='Run the regression goldens')
    sub.add_argument('games', nargs='*', help='Restrict to these games')
    _add_solver_flags(sub)

    commands.add_parser('list', help='List bundled games')
    return parser


COMMANDS = {
    'solve': cmd_solve,
    'enumerate': cmd_enumerate,
    'check': cmd_check,
    'export-sdpa': cmd_export_sdpa,
    'repro': cmd_repro,
    'list': cmd_list,
}


def main(argv=None):
    """Entry point; returns the exit code."""
    args = build_parser().parse_args(argv)
    settings.configure_logging(getattr(args, 'log_level', None))
    try:
        return COMMANDS[args.command](args)
    except ProblemFileError as exc:
        print(f"Problem file error: {exc}", file=sys.stderr)
    except (NashpolyError, OSError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
