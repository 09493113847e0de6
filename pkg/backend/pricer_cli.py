"""
Qudit Pricer CLI
Command-line front end for the European call pricing pipeline

Usage:
    python -m backend.pricer_cli price --config backend/data/baseline.cfg --seed 7
    python -m backend.pricer_cli sweep-dim --dims 2,3,4,5,6,7,8 --repeats 20 --out sweep.csv
    python -m backend.pricer_cli paths --n-paths 10 --out paths.csv
    python -m backend.pricer_cli pdf --out baseline.csv
"""

import argparse
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from backend.algorithms.discretization import (
    build_grid, discretized_expected_payoff, density_curve, grid_rows, truncated_quadrature_payoff,
)
from backend.algorithms.market_models import (
    analytic_expected_payoff, discount, mc_expected_payoff, sample_gbm_path,
)
from backend.algorithms.mlae import AmplitudeEstimator, records_rows
from backend.algorithms.pricing_circuits import (
    PayoffEncoding, build_comparator, build_oracle_A, build_payoff_loader,
    encoding_error_bound, expected_payoff_from_p1, format_circuit, pricing_layout,
    strike_rounding_bias,
)
from backend.algorithms.qudit_engine import amplitude_rows
from backend.models.config import SCHEMA_VERSION
from backend.models.errors import ConfigError, PricingError
from backend.models.estimation import Schedule, ShotRecord
from backend.utils.config_loader import ConfigLoader
from backend.utils.exporters import csv_text, format_table, write_csv, write_json
from backend.utils.random_streams import fresh_seed, keyed_stream

logger = logging.getLogger(__name__)

# Seed-tree branches
STREAM_MONTE_CARLO = 0
STREAM_MLAE = 1
STREAM_PATHS = 2

SWEEP_COLUMNS = ['d', 'analytic', 'classical_discretized', 'quantum_mlae', 'quantum_spread',
                 'abs_gap_quantum_classical', 'encoding_bound', 'strike_rounding_bias', 'M']
PATH_COLUMNS = ['path_id', 't', 'S_t']
CURVE_COLUMNS = ['s', 'density']
GRID_COLUMNS = ['index', 's_i', 'p_i']
RECORD_COLUMNS = ['ell', 'm', 'N', 'hits']
AMPLITUDE_COLUMNS = ['index', 're', 'im']

# Subcommand defaults sit between RunConfig defaults and the config file
COMMAND_DEFAULTS = {
    'price': {},
    'sweep-dim': {'format': 'csv'},
    'paths': {'format': 'csv', 'drift': 0.05, 'sigma': 0.2},
    'pdf': {'format': 'csv'},
}


def with_seed(config):
    """Return config with a concrete seed, drawing and logging one if unset."""
    if config.seed is not None:
        return config
    seed = fresh_seed()
    logger.info("No seed given; using %d", seed)
    return config.copy(update={'seed': seed})


def report_config(config):
    """Config fields stored in data outputs; the output location is not data."""
    return config.dict(exclude={'out'})


def preflight(config, dims=None, encode=True):
    """
    Check every module precondition a command will hit before any work starts.

    Args:
        config (RunConfig): Validated configuration
        dims (list): Qudit dimensions the command will build (default: config.dim)
        encode (bool): Also check the payoff encoding and register layout

    Raises:
        ConfigError: With the failing module's message
    """
    try:
        params = config.gbm_params()
        for d in dims or [config.dim]:
            grid = build_grid(params, d, config.qudits, config.trunc_sigmas)
            if encode:
                PayoffEncoding(grid, config.strike, config.scale_c)
                pricing_layout(grid, config.comparator_variant())
    except PricingError as e:
        raise ConfigError(str(e)) from e


def _quantum_estimate(estimator, grid, config, stream):
    sched = Schedule(config.levels, config.shots)
    mle, records = estimator.estimate(sched, stream, config.grid_points)
    value = expected_payoff_from_p1(mle.p1_hat, grid, config.strike, config.scale_c)
    return value, mle, records


def cmd_price(config):
    """
    Full pipeline for one configuration.

    Returns:
        dict: JSON-ready report (deterministic for a fixed seed)
    """
    config = with_seed(config)
    params = config.gbm_params()
    d, n, strike, c = config.dim, config.qudits, config.strike, config.scale_c

    grid = build_grid(params, d, n, config.trunc_sigmas)
    analytic = analytic_expected_payoff(params, strike)
    truncated = truncated_quadrature_payoff(grid, params, strike)
    classical = discretized_expected_payoff(grid, strike)
    mc_mean, mc_stderr = mc_expected_payoff(params, strike, config.mc_samples,
                                            keyed_stream(config.seed, STREAM_MONTE_CARLO, d))

    layout, oracle = build_oracle_A(grid, strike, c, config.comparator_variant())
    estimator = AmplitudeEstimator(oracle, layout)
    p1_exact = estimator.payoff_probability(0)
    exact_quantum = expected_payoff_from_p1(p1_exact, grid, strike, c)
    quantum, mle, records = _quantum_estimate(
        estimator, grid, config, keyed_stream(config.seed, STREAM_MLAE, d, 0))

    scale = (grid.top_point - strike) / (2.0 * c)
    enc = PayoffEncoding(grid, strike, c)
    report = {
        'schema': SCHEMA_VERSION,
        'seed': config.seed,
        'config': report_config(config),
        'grid': {**grid.to_dict(), 'k': enc.k, 'denominator': enc.denominator},
        'layout': layout.to_dict(),
        'estimates': {
            'analytic': analytic,
            'truncated_quadrature': truncated,
            'classical_discretized': classical,
            'monte_carlo': mc_mean,
            'monte_carlo_stderr': mc_stderr,
            'exact_statevector': exact_quantum,
            'quantum_mlae': quantum,
        },
        'quantum': {
            'p1_exact': p1_exact,
            'theta_exact': math.asin(math.sqrt(min(max(p1_exact, 0.0), 1.0))),
            **mle.to_dict(),
            'records': [r.to_dict() for r in records],
        },
        'error_budget': {
            'encoding_bound': encoding_error_bound(grid, strike, c) * scale,
            'strike_rounding_bias': strike_rounding_bias(grid, strike),
        },
        'fair_value': {
            'analytic': discount(analytic, params.risk_free_rate, params.maturity),
            'quantum_mlae': discount(quantum, params.risk_free_rate, params.maturity),
        },
        'oracle_calls': mle.oracle_calls,
    }
    logger.info("Priced d=%d n=%d: analytic %.6f, quantum %.6f (M=%d)",
                d, n, analytic, quantum, mle.oracle_calls)
    return report


def _sweep_row(config, d):
    params = config.gbm_params()
    strike, c = config.strike, config.scale_c
    grid = build_grid(params, d, config.qudits, config.trunc_sigmas)
    analytic = analytic_expected_payoff(params, strike)
    classical = discretized_expected_payoff(grid, strike)

    layout, oracle = build_oracle_A(grid, strike, c, config.comparator_variant())
    estimator = AmplitudeEstimator(oracle, layout)
    values = []
    for repeat in range(config.repeats):
        value, mle, _ = _quantum_estimate(estimator, grid, config,
                                          keyed_stream(config.seed, STREAM_MLAE, d, repeat))
        values.append(value)
    quantum = float(np.mean(values))
    spread = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0

    scale = (grid.top_point - strike) / (2.0 * c)
    row = {
        'd': d,
        'analytic': analytic,
        'classical_discretized': classical,
        'quantum_mlae': quantum,
        'quantum_spread': spread,
        'abs_gap_quantum_classical': abs(quantum - classical),
        'encoding_bound': encoding_error_bound(grid, strike, c) * scale,
        'strike_rounding_bias': strike_rounding_bias(grid, strike),
        'M': mle.oracle_calls,
    }
    logger.info("Sweep d=%d: classical %.6f quantum %.6f +- %.6f", d, classical, quantum, spread)
    return row


def cmd_sweep_dim(config, d_list=None):
    """
    One row per qudit dimension, in the order given.

    Rows run on `config.workers` threads; each row draws only from its own keyed
    streams, so results do not depend on scheduling.

    Returns:
        list: Row dicts keyed by SWEEP_COLUMNS
    """
    config = with_seed(config)
    dims = list(d_list) if d_list is not None else config.sweep_dims()
    if config.workers > 1 and len(dims) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(lambda d: _sweep_row(config, d), dims))
    return [_sweep_row(config, d) for d in dims]


def cmd_paths(config):
    """
    Sample GBM paths on a uniform grid.

    Returns:
        list: (path_id, t, S_t) rows, path by path
    """
    config = with_seed(config)
    params = config.gbm_params()
    rows = []
    for path_id in range(config.n_paths):
        path = sample_gbm_path(params, config.steps, keyed_stream(config.seed, STREAM_PATHS, path_id))
        rows.extend(path.to_rows(path_id))
    return rows


def cmd_pdf(config):
    """
    Terminal density curve and the sampled grid.

    Returns:
        dict: 'curve' -> (s, density) rows, 'grid' -> (i, s_i, p_i) rows
    """
    params = config.gbm_params()
    grid = build_grid(params, config.dim, config.qudits, config.trunc_sigmas)
    return {
        'curve': density_curve(params, grid.s_min, grid.s_max, config.curve_samples),
        'grid': grid_rows(grid),
    }


def price_text(report, wall_time=None):
    """Human-readable summary of a price report."""
    est = report['estimates']
    q = report['quantum']
    lines = [
        f"✅ European call, K={report['config']['strike']}, d={report['grid']['d']}, "
        f"n={report['grid']['n']}, seed={report['seed']}",
        f"   analytic E[f]              {est['analytic']:.6f}",
        f"   truncated quadrature E[f]  {est['truncated_quadrature']:.6f}",
        f"   discretized E[f]           {est['classical_discretized']:.6f}",
        f"   Monte Carlo E[f]           {est['monte_carlo']:.6f} +- {est['monte_carlo_stderr']:.6f}",
        f"   exact statevector E[f]     {est['exact_statevector']:.6f}  (P1 = {q['p1_exact']:.8f})",
        f"   MLAE E[f]                  {est['quantum_mlae']:.6f}  (P1 = {q['p1_hat']:.8f})",
        f"   fair value (MLAE)          {report['fair_value']['quantum_mlae']:.6f}",
        f"   oracle calls M             {report['oracle_calls']}",
    ]
    if wall_time is not None:
        lines.append(f"   wall time                  {wall_time:.2f} s")
    return "\n".join(lines)


def _flatten(payload, prefix=''):
    rows = []
    for key in sorted(payload):
        value = payload[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(_flatten(value, name + '.'))
        elif not isinstance(value, list):
            rows.append((name, value))
    return rows


def _split_out(path, suffix):
    stem, ext = os.path.splitext(path)
    return f"{stem}_{suffix}{ext or '.csv'}"


def _run_price(config, args):
    started = time.perf_counter()
    report = cmd_price(config)
    print(price_text(report, time.perf_counter() - started))

    if config.out:
        if config.format == 'json':
            write_json(config.out, report)
        else:
            write_csv(config.out, ['field', 'value'], _flatten(report))
        print(f"✅ Report written to {config.out}")
    if args.records_out:
        records = [ShotRecord.from_dict(r) for r in report['quantum']['records']]
        write_csv(args.records_out, RECORD_COLUMNS, records_rows(records))
    if args.dump_amplitudes or args.show_circuit:
        grid = build_grid(config.gbm_params(), config.dim, config.qudits, config.trunc_sigmas)
        variant = config.comparator_variant()
        if args.show_circuit:
            enc = PayoffEncoding(grid, config.strike, config.scale_c)
            layout = pricing_layout(grid, variant)
            gates = build_comparator(enc.k, grid, layout, variant) + build_payoff_loader(enc, layout)
            print(f"Loader: Householder on {', '.join(layout.names('asset'))}")
            print(format_circuit(gates))
        if args.dump_amplitudes:
            layout, oracle = build_oracle_A(grid, config.strike, config.scale_c, variant)
            state = AmplitudeEstimator(oracle, layout).prepared_state(0)
            write_csv(args.dump_amplitudes, AMPLITUDE_COLUMNS, amplitude_rows(state))


def _run_sweep(config, args):
    config = with_seed(config)
    rows = cmd_sweep_dim(config)
    table = [[row[col] for col in SWEEP_COLUMNS] for row in rows]
    print(format_table(SWEEP_COLUMNS, table))
    if not config.out:
        return
    if config.format == 'json':
        write_json(config.out, {'schema': SCHEMA_VERSION, 'seed': config.seed,
                               'config': report_config(config), 'rows': rows})
    else:
        write_csv(config.out, SWEEP_COLUMNS, table)
    print(f"✅ Sweep written to {config.out}")


def _run_paths(config, args):
    config = with_seed(config)
    rows = cmd_paths(config)
    print(f"✅ {config.n_paths} paths of {config.steps + 1} points (seed={config.seed})")
    if not config.out:
        sys.stdout.write(csv_text(PATH_COLUMNS, rows))
        return
    if config.format == 'json':
        write_json(config.out, {'schema': SCHEMA_VERSION, 'seed': config.seed,
                               'columns': PATH_COLUMNS, 'rows': rows})
    else:
        write_csv(config.out, PATH_COLUMNS, rows)
    print(f"✅ Paths written to {config.out}")


def _run_pdf(config, args):
    data = cmd_pdf(config)
    print(f"✅ Density curve of {len(data['curve'])} samples, grid of {len(data['grid'])} points")
    if not config.out:
        sys.stdout.write(csv_text(GRID_COLUMNS, data['grid']))
        return
    if config.format == 'json':
        write_json(config.out, {'schema': SCHEMA_VERSION, 'config': report_config(config),
                               'curve': data['curve'], 'grid': data['grid']})
        print(f"✅ Density data written to {config.out}")
    else:
        curve_path = write_csv(_split_out(config.out, 'curve'), CURVE_COLUMNS, data['curve'])
        grid_path = write_csv(_split_out(config.out, 'grid'), GRID_COLUMNS, data['grid'])
        print(f"✅ Density data written to {curve_path} and {grid_path}")


RUNNERS = {
    'price': (_run_price, True),
    'sweep-dim': (_run_sweep, True),
    'paths': (_run_paths, False),
    'pdf': (_run_pdf, False),
}


def _int_list(text):
    try:
        return [int(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def build_parser():
    """Argument parser with the four subcommands sharing one flag set."""
    common = argparse.ArgumentParser(add_help=False)
    market = common.add_argument_group('market')
    market.add_argument('--s0', type=float, help='spot price S0')
    market.add_argument('--drift', type=float, help='drift alpha')
    market.add_argument('--rate', type=float, help='risk-free rate r')
    market.add_argument('--sigma', type=float, help='volatility')
    market.add_argument('--maturity', type=float, help='maturity T in years')
    market.add_argument('--strike', type=float, help='strike K')

    register = common.add_argument_group('register and estimation')
    register.add_argument('--dim', type=int, help='qudit dimension d')
    register.add_argument('--qudits', type=int, help='asset qudit count n')
    register.add_argument('--scale-c', type=float, dest='scale_c', help='payoff scaling constant c')
    register.add_argument('--trunc-sigmas', type=float, dest='trunc_sigmas', help='truncation width')
    register.add_argument('--shots', type=int, help='shots per schedule level N')
    register.add_argument('--levels', type=int, help='schedule cutoff T')
    register.add_argument('--variant', choices=['linear', 'single'], help='comparator carry budget')
    register.add_argument('--grid-points', type=int, dest='grid_points', help='likelihood grid size')
    register.add_argument('--mc-samples', type=int, dest='mc_samples', help='Monte Carlo sample count')

    run = common.add_argument_group('run')
    run.add_argument('--seed', type=int, help='root seed (drawn and reported when omitted)')
    run.add_argument('--config', help='key = value config file')
    run.add_argument('--out', help='output path')
    run.add_argument('--format', choices=['csv', 'json'], help='output format')
    run.add_argument('--repeats', type=int, help='seed repeats per sweep row')
    run.add_argument('--dims', type=_int_list, help='comma-separated sweep dimensions')
    run.add_argument('--workers', type=int, help='parallel sweep rows')
    run.add_argument('--n-paths', type=int, dest='n_paths', help='number of sample paths')
    run.add_argument('--steps', type=int, help='time steps per path')
    run.add_argument('--curve-samples', type=int, dest='curve_samples', help='density curve samples')
    run.add_argument('--verbose', '-v', action='store_true', help='debug logging')

    parser = argparse.ArgumentParser(
        prog='qudit-pricer',
        description='European call pricing with qudit amplitude estimation')
    sub = parser.add_subparsers(dest='command', required=True)
    price = sub.add_parser('price', parents=[common], help='price one configuration')
    price.add_argument('--dump-amplitudes', dest='dump_amplitudes', help='CSV of A|0> amplitudes')
    price.add_argument('--records-out', dest='records_out', help='CSV of per-level shot records')
    price.add_argument('--show-circuit', dest='show_circuit', action='store_true',
                       help='print the comparator and payoff gates')
    sub.add_parser('sweep-dim', parents=[common], help='expected payoff against qudit dimension')
    sub.add_parser('paths', parents=[common], help='sample GBM price paths')
    sub.add_parser('pdf', parents=[common], help='terminal density and grid points')
    return parser


_NOT_CONFIG = {'command', 'config', 'verbose', 'dump_amplitudes', 'records_out', 'show_circuit'}


def load_config(args):
    """
    Merge defaults, subcommand defaults, the config file and flags.

    Raises:
        ConfigError: On unreadable files or invalid values
    """
    file_values = {}
    if args.config:
        try:
            file_values = ConfigLoader.load_file(args.config)
        except FileNotFoundError as e:
            raise ConfigError(str(e)) from e
    flags = {key: value for key, value in vars(args).items() if key not in _NOT_CONFIG}
    return ConfigLoader.build_config(COMMAND_DEFAULTS[args.command], file_values, flags)


def main(argv=None):
    """
    Entry point.

    Returns:
        int: 0 on success, 2 on configuration errors, 1 on runtime errors
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    runner, encode = RUNNERS[args.command]
    try:
        config = load_config(args)
        dims = config.sweep_dims() if args.command == 'sweep-dim' else None
        preflight(config, dims, encode=encode)
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2

    try:
        runner(config, args)
    except Exception as e:
        logger.debug("Run failed", exc_info=True)
        print(f"❌ Error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
