"""
Tests for the command-line front end and config files
"""

import csv
import json
import math
import sys
import os

import pytest

# Add project root to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from backend.models.config import SCHEMA_VERSION, RunConfig
from backend.models.errors import ConfigError
from backend.pricer_cli import build_parser, cmd_paths, cmd_price, cmd_sweep_dim, load_config, main
from backend.utils.config_loader import ConfigLoader

# Keeps the slow parts of the pipeline small
FAST = ['--mc-samples', '2000', '--grid-points', '5000']


def read_csv(path):
    with open(path, newline='') as f:
        return list(csv.DictReader(f))


class TestConfigLoader:
    """Test the key = value grammar"""

    def test_parse(self):
        values = ConfigLoader.parse_text("# comment\ns0 = 3.0\n\nscale-c = 0.1  # inline\ndims = 2, 3,4\n")
        assert values == {'s0': '3.0', 'scale_c': '0.1', 'dims': ['2', '3', '4']}

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            ConfigLoader.parse_text("s0 = 1\ncolour = blue\n", source='run.cfg')
        assert 'run.cfg:2' in str(info.value)

    def test_malformed_and_repeated(self):
        with pytest.raises(ConfigError):
            ConfigLoader.parse_text("s0 3.0\n")
        with pytest.raises(ConfigError):
            ConfigLoader.parse_text("s0 = 1\ns0 = 2\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ConfigLoader.load_file(str(tmp_path / "missing.cfg"))

    def test_presets(self):
        """The baseline preset matches the built-in defaults"""
        assert ConfigLoader.build_config(ConfigLoader.load_preset('baseline')) == RunConfig()
        wide = ConfigLoader.build_config(ConfigLoader.load_preset('wide'))
        assert (wide.s0, wide.sigma, wide.strike) == (3.0, 0.5, 2.2)
        assert wide.sweep_dims() == list(range(2, 11))

    def test_invalid_values(self):
        with pytest.raises(ConfigError) as info:
            ConfigLoader.build_config({'sigma': '-1'})
        assert 'sigma' in str(info.value)

    def test_dump_round_trip(self):
        config = RunConfig(s0=3.0, dims=[2, 4], seed=9)
        text = ConfigLoader.dump_text(config)
        assert ConfigLoader.build_config(ConfigLoader.parse_text(text)) == config


class TestPrecedence:
    """Test defaults < subcommand defaults < config file < flags"""

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("dim = 4\nshots = 50\n")
        args = build_parser().parse_args(['price', '--config', str(path), '--dim', '5'])
        config = load_config(args)
        assert config.dim == 5
        assert config.shots == 50
        assert config.s0 == 2.0

    def test_paths_defaults(self):
        config = load_config(build_parser().parse_args(['paths']))
        assert (config.drift, config.sigma, config.format) == (0.05, 0.2, 'csv')
        config = load_config(build_parser().parse_args(['paths', '--sigma', '0.4']))
        assert config.sigma == 0.4


class TestExitCodes:
    """Test exit statuses"""

    def test_invalid_flag_value(self, capsys):
        assert main(['price', '--sigma', '-1']) == 2
        assert 'sigma' in capsys.readouterr().err

    def test_unknown_config_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("volatility = 0.3\n")
        assert main(['price', '--config', str(path)]) == 2

    def test_missing_config_file(self, tmp_path):
        assert main(['price', '--config', str(tmp_path / "nope.cfg")]) == 2

    def test_strike_above_grid(self):
        """Preflight catches a degenerate payoff encoding before running"""
        assert main(['price', '--strike', '10', '--seed', '1']) == 2

    def test_register_too_large(self):
        assert main(['price', '--dim', '10', '--qudits', '3']) == 2

    def test_runtime_error(self, tmp_path):
        """Writing the report onto a directory fails at run time"""
        assert main(['price', '--seed', '1', '--levels', '1', '--out', str(tmp_path)] + FAST) == 1


class TestPrice:
    """Test the price command"""

    def test_baseline_report(self, tmp_path):
        out = tmp_path / "report.json"
        assert main(['price', '--config', ConfigLoader.preset_path('baseline'), '--seed', '7',
                     '--out', str(out)] + FAST) == 0
        report = json.loads(out.read_text())
        assert report['schema'] == SCHEMA_VERSION
        assert report['oracle_calls'] == 26200
        assert report['seed'] == 7
        assert len(report['quantum']['records']) == 8
        assert report['estimates']['analytic'] == pytest.approx(0.5165, abs=1e-3)

    def test_byte_identical(self, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for out in (first, second):
            assert main(['price', '--seed', '11', '--levels', '3', '--out', str(out)] + FAST) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_auto_seed_recorded(self):
        report = cmd_price(RunConfig(levels=2, mc_samples=500, grid_points=2000))
        assert isinstance(report['seed'], int)

    def test_zero_volatility_limit(self):
        """All estimators agree with max(0, S0 e^{alpha T} - K)"""
        report = cmd_price(RunConfig(sigma=1e-6, seed=3, mc_samples=5000))
        target = 2.0 * math.exp(0.07) - 1.7
        est = report['estimates']
        for key in ('analytic', 'truncated_quadrature', 'classical_discretized',
                    'monte_carlo', 'exact_statevector'):
            assert est[key] == pytest.approx(target, abs=1e-3), key
        assert est['quantum_mlae'] == pytest.approx(target, abs=7.5e-3)

    def test_extra_outputs(self, tmp_path, capsys):
        records, amps = tmp_path / "records.csv", tmp_path / "amps.csv"
        assert main(['price', '--seed', '2', '--levels', '2', '--dim', '4', '--records-out', str(records),
                     '--dump-amplitudes', str(amps), '--show-circuit'] + FAST) == 0
        assert [row['m'] for row in read_csv(records)] == ['0', '1', '2']
        assert len(read_csv(amps)) == 4 * 2 * 2
        assert 'RY(' in capsys.readouterr().out

    def test_csv_report(self, tmp_path):
        out = tmp_path / "report.csv"
        assert main(['price', '--seed', '5', '--levels', '1', '--format', 'csv', '--out', str(out)] + FAST) == 0
        fields = {row['field']: row['value'] for row in read_csv(out)}
        assert fields['oracle_calls'] == str(100 * (1 + 3))


class TestSweep:
    """Test the dimension sweep"""

    def test_single_dimension_matches_price(self):
        config = RunConfig(seed=13, levels=4, mc_samples=500, grid_points=5000)
        report = cmd_price(config)
        [row] = cmd_sweep_dim(config, [8])
        assert row['quantum_mlae'] == report['estimates']['quantum_mlae']
        assert row['classical_discretized'] == report['estimates']['classical_discretized']
        assert row['M'] == report['oracle_calls']

    def test_parallel_rows_match_serial(self):
        config = RunConfig(seed=4, levels=3, repeats=2, grid_points=5000, dims=[2, 3, 4])
        serial = cmd_sweep_dim(config)
        parallel = cmd_sweep_dim(config.copy(update={'workers': 3}))
        assert serial == parallel
        assert [row['d'] for row in serial] == [2, 3, 4]

    def test_baseline_error_budget(self):
        """Quantum estimates stay within the encoding bound, the rounding bias and 3x their spread"""
        config = RunConfig(seed=2024, repeats=20, grid_points=20_000, dims=list(range(2, 9)))
        rows = cmd_sweep_dim(config)
        for row in rows:
            budget = row['encoding_bound'] + row['strike_rounding_bias'] + 3 * row['quantum_spread']
            assert row['abs_gap_quantum_classical'] <= budget, row['d']
            assert row['M'] == 26200
        gaps = {row['d']: abs(row['classical_discretized'] - row['analytic']) for row in rows}
        assert all(gaps[8] < gaps[d] for d in (2, 3, 4))

    def test_wide_error_budget(self):
        """The wide preset sweep over d = 2..10 meets the same budget"""
        wide = ConfigLoader.build_config(ConfigLoader.load_preset('wide'))
        config = wide.copy(update={'seed': 2025, 'repeats': 20, 'grid_points': 20_000})
        rows = cmd_sweep_dim(config)
        assert [row['d'] for row in rows] == list(range(2, 11))
        for row in rows:
            budget = row['encoding_bound'] + row['strike_rounding_bias'] + 3 * row['quantum_spread']
            assert row['abs_gap_quantum_classical'] <= budget, row['d']

    def test_csv_output(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert main(['sweep-dim', '--dims', '2,3', '--seed', '1', '--levels', '2',
                     '--out', str(out)] + FAST) == 0
        rows = read_csv(out)
        assert [row['d'] for row in rows] == ['2', '3']
        assert set(rows[0]) == {'d', 'analytic', 'classical_discretized', 'quantum_mlae', 'quantum_spread',
                                'abs_gap_quantum_classical', 'encoding_bound', 'strike_rounding_bias', 'M'}


class TestPathsAndDensity:
    """Test the paths and pdf commands"""

    def test_paths_start_at_spot(self):
        config = load_config(build_parser().parse_args(['paths', '--seed', '3', '--n-paths', '4',
                                                         '--steps', '20', '--s0', '1.5']))
        rows = cmd_paths(config)
        assert len(rows) == 4 * 21
        assert all(s == 1.5 for path_id, t, s in rows if t == 0.0)

    def test_paths_deterministic(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (first, second):
            assert main(['paths', '--seed', '8', '--n-paths', '3', '--steps', '10', '--out', str(out)]) == 0
        assert first.read_bytes() == second.read_bytes()
        assert list(read_csv(first)[0]) == ['path_id', 't', 'S_t']

    def test_pdf_files(self, tmp_path):
        out = tmp_path / "baseline.csv"
        assert main(['pdf', '--out', str(out)]) == 0
        grid = read_csv(tmp_path / "baseline_grid.csv")
        curve = read_csv(tmp_path / "baseline_curve.csv")
        assert len(grid) == 8
        assert sum(float(row['p_i']) for row in grid) == pytest.approx(1.0, abs=1e-12)
        prices = [float(row['s']) for row in curve]
        assert all(a < b for a, b in zip(prices, prices[1:]))
