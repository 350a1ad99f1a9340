"""
Tests for problem files, report rendering and the command-line interface.
"""

import io
import json
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest import TestCase, mock

import numpy as np
import pytest

from nashpoly.cli import ProblemFileError, parse_problem, parse_problem_file, serialize_problem
from nashpoly.cli.main import EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK, main
from nashpoly.cli.reports import format_csv, format_json, format_text, write_pdf
from nashpoly.cli.repro import GOLDENS, match_points
from nashpoly.conic import read_sdpa
from nashpoly.equilibria import Equilibrium, LoopRecord, NeReport, NeStatus
from nashpoly.games import FamilyError, LocalityError, MultiplierError, available_games, build_game

R5 = 1 / np.sqrt(5)

TWO_INTERVALS = """{
  "version": 1,
  "name": "two_intervals",
  "players": [
    {
      "n": 1,
      "objective": [[1.0, [2, 0]], [-1.0, [1, 1]]],
      "family": {"kind": "box", "lower": [-1.0], "upper": [1.0]}
    },
    {
      "n": 1,
      "objective": [[1.0, [0, 2]], [1.0, [1, 1]]],
      "family": {"kind": "ball"}
    }
  ],
  "options": {"seed": 3, "k_max": 3}
}
"""


def _report(status=NeStatus.FOUND_SOME):
    point = np.array([1.0, 0.0, -R5, -2 * R5])
    equilibrium = Equilibrium(
        point=point,
        omega_star=0.0,
        omegas=(0.0, -1e-9),
        multipliers=(np.array([9 * np.sqrt(5) / 10 - 1]), np.array([np.sqrt(5) / 2 - 1])),
        theta=1.2345678901,
        loop=2,
    )
    return NeReport(
        game='ball_duel',
        layout=(2, 2),
        status=status,
        equilibria=[equilibrium] if status != NeStatus.NONE_EXISTS else [],
        trace=[LoopRecord(loop=1, phase='master', cut_sizes=(0, 0), statuses=('optimal',))],
        seed=0,
    )


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


class ProblemFileTest(TestCase):
    """Tests for parsing and writing problem files."""

    def test_parse_with_canonical_constraints(self):
        """Built-in families may omit their constraints."""
        parsed = parse_problem_file(TWO_INTERVALS)

        assert parsed.nep.name == 'two_intervals'
        assert tuple(parsed.nep.layout) == (1, 1)
        assert parsed.nep.players[0].m == 2
        assert parsed.nep.players[1].m == 1
        assert parsed.options == {'seed': 3, 'k_max': 3}

    def test_roundtrip_catalog(self):
        """Every catalog game survives serialize then parse."""
        for name in available_games():
            nep = build_game(name)
            assert parse_problem_file(serialize_problem(nep), check_multipliers=False).nep == nep

    def test_serialization_is_stable(self):
        """Serializing twice gives the same text."""
        nep = build_game('pollution_control')

        assert serialize_problem(nep) == serialize_problem(parse_problem(serialize_problem(nep)))

    def test_syntax_error_position(self):
        """JSON errors carry line and column."""
        text = '{\n  "version": 1,\n  "players": [\n}\n'

        with pytest.raises(ProblemFileError) as excinfo:
            parse_problem_file(text)

        assert excinfo.value.line == 4
        assert 'line 4' in str(excinfo.value)

    def test_rival_variable_in_constraint(self):
        """Constraints on a rival's block are rejected."""
        data = json.loads(TWO_INTERVALS)
        data['players'][0]['family'] = {'kind': 'custom', 'multipliers': [[]]}
        data['players'][0]['constraints'] = [
            {'kind': 'inequality', 'terms': [[1.0, [0, 0]], [-1.0, [1, 1]]]},
        ]

        with pytest.raises(LocalityError) as excinfo:
            parse_problem_file(json.dumps(data))

        assert 'rival block' in str(excinfo.value)

    def test_unknown_family(self):
        """Unknown family kinds are reported."""
        data = json.loads(TWO_INTERVALS)
        data['players'][1]['family'] = {'kind': 'torus'}

        with pytest.raises(FamilyError):
            parse_problem_file(json.dumps(data))

    def test_constraints_must_match_family(self):
        """Explicit constraints of a built-in family are checked at parse time."""
        data = json.loads(TWO_INTERVALS)
        data['players'][1]['constraints'] = [
            {'kind': 'inequality', 'terms': [[2.0, [0, 0]], [-1.0, [0, 2]]]},
        ]

        with pytest.raises(FamilyError) as excinfo:
            parse_problem_file(json.dumps(data))

        assert "differs from the 'ball' family" in str(excinfo.value)

    def test_constraint_count_must_match_family(self):
        """A ball family with two constraints is rejected."""
        data = json.loads(TWO_INTERVALS)
        data['players'][1]['constraints'] = [
            {'kind': 'inequality', 'terms': [[1.0, [0, 0]], [-1.0, [0, 2]]]},
            {'kind': 'inequality', 'terms': [[1.0, [0, 1]]]},
        ]

        with pytest.raises(FamilyError):
            parse_problem_file(json.dumps(data))

    def test_custom_multipliers_checked_on_parse(self):
        """lambda = 1 contradicts every KKT point of the first player."""
        data = json.loads(TWO_INTERVALS)
        data['players'][0]['family'] = {'kind': 'custom', 'multipliers': [[[1.0, [0, 0]]]]}
        data['players'][0]['constraints'] = [
            {'kind': 'inequality', 'terms': [[1.0, [0, 0]], [-1.0, [2, 0]]]},
        ]
        text = json.dumps(data)

        with pytest.raises(MultiplierError):
            parse_problem_file(text)
        assert parse_problem_file(text, check_multipliers=False).nep.player(0).m == 1

    def test_rank_diagnostic_runs_on_parse(self):
        """Every parsed player gets the G_i rank diagnostic."""
        with mock.patch('nashpoly.games.services.nonsingularity_diagnostic') as diagnostic:
            parse_problem_file(TWO_INTERVALS)

        assert diagnostic.call_count == 2

    def test_wrong_version(self):
        """Only version 1 is understood."""
        data = json.loads(TWO_INTERVALS)
        data['version'] = 2

        with pytest.raises(ProblemFileError):
            parse_problem_file(json.dumps(data))

    def test_bad_options(self):
        """Unknown options and wrong types are rejected."""
        data = json.loads(TWO_INTERVALS)
        data['options'] = {'colour': 'blue'}
        with pytest.raises(ProblemFileError):
            parse_problem_file(json.dumps(data))

        data['options'] = {'convex': 1}
        with pytest.raises(ProblemFileError):
            parse_problem_file(json.dumps(data))

    def test_exponent_length(self):
        """Exponent vectors must cover every variable."""
        data = json.loads(TWO_INTERVALS)
        data['players'][0]['objective'] = [[1.0, [2]]]

        with pytest.raises(ProblemFileError):
            parse_problem_file(json.dumps(data))

    def test_bundled_file_matches_catalog(self):
        """The shipped ball_duel file describes the catalog game."""
        path = Path(__file__).resolve().parent.parent / 'nashpoly' / 'cli' / 'problems' / 'ball_duel.json'

        assert parse_problem(path.read_text(encoding='utf-8')) == build_game('ball_duel')


class ReportTest(TestCase):
    """Tests for report rendering."""

    def test_text_report(self):
        """The text report lists blocks with six significant digits."""
        text = format_text(_report())

        assert 'Status: found_some' in text
        assert 'x_2 = (-0.447214, -0.894427)' in text
        assert 'theta = 1.23457' in text
        assert 'Wall time' not in text

    def test_timing_is_opt_in(self):
        """Wall time only appears when requested."""
        report = _report()
        report.elapsed = 1.5

        assert 'Wall time: 1.500 s' in format_text(report, timing=True)
        assert 'elapsed' not in json.loads(format_json(report))
        assert json.loads(format_json(report, timing=True))['elapsed'] == 1.5

    def test_json_full_precision(self):
        """JSON keeps every digit."""
        data = json.loads(format_json(_report()))

        assert data['equilibria'][0]['point'][2] == -R5
        assert data['status'] == 'found_some'

    def test_csv(self):
        """One header and one row per equilibrium."""
        lines = format_csv(_report()).strip().splitlines()

        assert lines[0].startswith('equilibrium,loop,theta,omega_star,omega_1,omega_2,x1_1')
        assert len(lines) == 2

    def test_pdf(self):
        """A PDF summary is written."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'report.pdf'
            write_pdf(_report(), path)

            assert path.read_bytes().startswith(b'%PDF')


class ReproHelpersTest(TestCase):
    """Tests for golden matching."""

    def test_match_points(self):
        """Points match in any order within tolerance."""
        found = [np.array([1.0, 0.0, -R5, -2 * R5]), np.zeros(4)]
        expected = (((0, 0), (0, 0)), ((1, 0), (-R5, -2 * R5)))

        assert match_points(found, expected) == [1, 0]
        assert match_points(found[:1], expected) is None

    def test_every_golden_names_a_game(self):
        """Goldens refer to catalog games."""
        names = set(available_games())

        assert all(golden.game in names for golden in GOLDENS)


class CommandLineTest(TestCase):
    """Tests for exit codes and command output."""

    def test_list(self):
        """list prints the catalog."""
        code, out, _ = _run(['list'])

        assert code == EXIT_OK
        assert 'ball_duel' in out
        assert 'electricity_market' in out

    def test_list_shows_aliases(self):
        """list prints each alias with its game."""
        code, out, _ = _run(['list'])

        assert code == EXIT_OK
        assert 'example_1_1 -> ball_duel' in out

    @pytest.mark.integration
    def test_check_by_alias(self):
        """check accepts an alias and verifies the origin of the ball duel."""
        code, out, _ = _run(['check', 'example_1_1', '--point', '0,0,0,0', '--json'])

        data = json.loads(out)
        assert code == EXIT_OK
        assert all(abs(w) <= 1e-6 for w in data['omegas'])

    def test_unknown_problem(self):
        """Unknown problems are input errors."""
        code, _, err = _run(['solve', 'no_such_game'])

        assert code == EXIT_ERROR
        assert 'no_such_game' in err

    def test_missing_argument(self):
        """argparse errors exit with status 1."""
        with redirect_stderr(io.StringIO()), pytest.raises(SystemExit) as excinfo:
            main(['solve'])

        assert excinfo.value.code == EXIT_ERROR

    def test_bad_problem_file(self):
        """Malformed problem files exit with status 1 and a position."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'broken.json'
            path.write_text('{\n  "version": 1,\n', encoding='utf-8')
            code, _, err = _run(['solve', str(path)])

        assert code == EXIT_ERROR
        assert 'line' in err

    def test_point_length(self):
        """check needs one coordinate per variable."""
        code, _, err = _run(['check', 'ball_duel', '--point', '1,2'])

        assert code == EXIT_ERROR
        assert '4 values' in err

    def test_solve_exit_codes(self):
        """solve succeeds on found or none, and returns 2 when inconclusive."""
        for status, expected in (
            (NeStatus.FOUND_SOME, EXIT_OK),
            (NeStatus.NONE_EXISTS, EXIT_OK),
            (NeStatus.INCONCLUSIVE, EXIT_INCONCLUSIVE),
        ):
            with mock.patch('nashpoly.cli.main.find_one_ne', return_value=_report(status)):
                code, out, _ = _run(['solve', 'ball_duel'])
            assert code == expected
            assert f'Status: {status.value}' in out

    def test_enumerate_needs_completeness(self):
        """enumerate returns 2 when only some equilibria were found."""
        with mock.patch('nashpoly.cli.main.enumerate_nes', return_value=_report(NeStatus.FOUND_SOME)):
            code, _, _ = _run(['enumerate', 'ball_duel'])
        assert code == EXIT_INCONCLUSIVE

        with mock.patch('nashpoly.cli.main.enumerate_nes', return_value=_report(NeStatus.FOUND_ALL)):
            code, _, _ = _run(['enumerate', 'ball_duel', '--json'])
        assert code == EXIT_OK

    def test_flags_reach_options(self):
        """Solver flags override file options."""
        with mock.patch('nashpoly.cli.main.find_one_ne', return_value=_report()) as search:
            _run(['solve', 'ball_duel', '--seed', '9', '--k-max', '3', '--convex'])

        options = search.call_args[0][1]
        assert options.seed == 9
        assert options.k_max == 3
        assert options.convex

    def test_file_options_apply(self):
        """Options stored in a problem file are used."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'game.json'
            path.write_text(TWO_INTERVALS, encoding='utf-8')
            with mock.patch('nashpoly.cli.main.find_one_ne', return_value=_report()) as search:
                _run(['solve', str(path)])

        options = search.call_args[0][1]
        assert options.seed == 3
        assert options.k_max == 3

    def test_report_files(self):
        """--output, --csv and --pdf write their files."""
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            with mock.patch('nashpoly.cli.main.find_one_ne', return_value=_report()):
                code, out, _ = _run([
                    'solve', 'ball_duel',
                    '--output', str(tmp / 'out.txt'),
                    '--csv', str(tmp / 'out.csv'),
                    '--pdf', str(tmp / 'out.pdf'),
                ])

            assert code == EXIT_OK
            assert out == ''
            assert 'Equilibrium 1' in (tmp / 'out.txt').read_text(encoding='utf-8')
            assert (tmp / 'out.csv').exists()
            assert (tmp / 'out.pdf').exists()

    def test_export_sdpa(self):
        """export-sdpa writes a readable SDPA file."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'master.dat-s'
            code, _, _ = _run(['export-sdpa', 'ball_duel', '--order', '2', '--output', str(path)])
            imported = read_sdpa(path.read_text(encoding='utf-8'))

        assert code == EXIT_OK
        assert imported.mdim == 69

    def test_export_sdpa_low_order(self):
        """Orders below the minimum are input errors."""
        code, _, _ = _run(['export-sdpa', 'ball_duel', '--order', '1'])

        assert code == EXIT_ERROR

    @pytest.mark.integration
    def test_check_equilibrium(self):
        """check reports omega* = 0 at a known equilibrium."""
        point = ','.join(str(float(v)) for v in (1.0, 0.0, -R5, -2 * R5))
        code, out, _ = _run(['check', 'ball_duel', '--point', point, '--json'])

        data = json.loads(out)
        assert code == EXIT_OK
        assert data['omega_star'] >= -1e-6
        assert [p['status'] for p in data['players']] == ['verified', 'verified']
