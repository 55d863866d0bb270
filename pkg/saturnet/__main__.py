"""
Run specified tasks.
"""


import argparse
import dataclasses
import importlib.resources
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, NoReturn, Optional

import yaml

from . import __version__
from .artifacts import (
    RunManifest,
    load_dataset,
    load_network,
    load_spec,
    load_sweep,
    save_build_info,
    save_dataclass,
    save_dataset,
    save_network,
    save_spec,
    save_sweep,
    write_json,
)
from .construction import ScalingPolicy, build_network
from .domain import SeparabilitySpecND, one_hot_encoding
from .errors import (
    AxesExceedDimension,
    DimensionMismatch,
    InvalidGrid,
    InvalidSamplerConfig,
    LabelOutOfRange,
    SaturnetError,
)
from .evaluation import evaluate, format_report, oracle_agreement
from .experiments import (
    find_zero_threshold,
    parse_grid,
    run_bound_suite,
    run_lemma_suite,
    sweep_scaling,
)
from .sampling import SamplerConfig, random_spec_1d, random_spec_nd, sample_1d, sample_nd


logger = logging.getLogger(__name__)

EXIT_SUITE_FAILED = 1
EXIT_USAGE = 2
EXIT_INCONSISTENT = 3


class CliError(Exception):
    """Error that stops CLI with a particular exit code."""

    def __init__(self, message: str, exit_code: int = EXIT_USAGE):
        super().__init__(message)
        self.exit_code = exit_code


@dataclass
class RunOutputs:
    """Paths touched by a command and its exit code."""
    outputs: list[str]
    inputs: list[str] = field(default_factory=list)
    seed: Optional[int] = None
    exit_code: int = 0


def fail(flag: str, message: Any) -> NoReturn:
    """Stop with usage error that names a flag."""
    raise CliError(f"argument {flag}: {message}")


def positive_int(value: str) -> int:
    """Parse positive integer."""
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return number


def non_negative_int(value: str) -> int:
    """Parse non-negative integer."""
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f"must be a non-negative integer, got {value}")
    return number


def positive_float(value: str) -> float:
    """Parse positive real number."""
    number = float(value)
    if not (number > 0 and math.isfinite(number)):
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {value}")
    return number


def non_negative_float(value: str) -> float:
    """Parse non-negative real number."""
    number = float(value)
    if not (number >= 0 and math.isfinite(number)):
        raise argparse.ArgumentTypeError(f"must be non-negative and finite, got {value}")
    return number


def axis_sizes(value: str) -> tuple[int, ...]:
    """Parse comma-separated numbers of intervals."""
    try:
        return tuple(positive_int(x) for x in value.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"must be comma-separated positive integers, got {value}"
        ) from None


def parse_cli_args(args: Optional[list[str]] = None) -> argparse.Namespace:
    """
    Parse arguments passed via Command Line Interface (CLI).

    :param args:
        arguments (by default, they are taken from `sys.argv`)
    :return:
        namespace with arguments
    """
    parser = argparse.ArgumentParser(
        prog='saturnet',
        description='Construction of sigmoid networks for margin-separable data.'
    )
    parser.add_argument(
        '-c', '--config_path', type=str, default=None, help='path to configuration file'
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    gen_parser = subparsers.add_parser('gen', help='generate random spec and dataset')
    gen_parser.add_argument('--mode', choices=['1d', 'nd'], required=True)
    gen_parser.add_argument('--dim', type=positive_int, required=True)
    gen_parser.add_argument('--k', type=positive_int, help='number of intervals (1d mode)')
    gen_parser.add_argument('--ks', type=axis_sizes, help='numbers of intervals per axis (nd mode)')
    gen_parser.add_argument('--classes', type=positive_int, required=True)
    gen_parser.add_argument('--delta', type=positive_float, required=True, help='margin')
    gen_parser.add_argument('--n', type=positive_int, required=True, help='number of points')
    gen_parser.add_argument('--seed', type=non_negative_int, required=True)
    gen_parser.add_argument('--radius', type=non_negative_float, default=None)
    gen_parser.add_argument('--out-spec', required=True)
    gen_parser.add_argument('--out-data', required=True)

    build_parser = subparsers.add_parser('build', help='construct network for a spec')
    build_parser.add_argument('--spec', required=True)
    scaling_group = build_parser.add_mutually_exclusive_group(required=True)
    scaling_group.add_argument('--epsilon', type=positive_float, help='allowed output error')
    scaling_group.add_argument('--cs', type=non_negative_float, help='explicit scaling factor')
    build_parser.add_argument('--out-model', required=True)
    build_parser.add_argument('--out-meta', default=None)

    eval_parser = subparsers.add_parser('eval', help='evaluate network on a dataset')
    eval_parser.add_argument('--model', required=True)
    eval_parser.add_argument('--data', required=True)
    eval_parser.add_argument('--spec', default=None)
    eval_parser.add_argument('--epsilon', type=positive_float, default=None)
    eval_parser.add_argument('--out-report', required=True)
    eval_parser.add_argument('--n-processes', type=positive_int, default=None)

    sweep_parser = subparsers.add_parser('sweep', help='count errors for a grid of scaling factors')
    sweep_parser.add_argument('--spec', required=True)
    sweep_parser.add_argument('--data', required=True)
    sweep_parser.add_argument('--grid', default=None, help='grid in lo:hi:step notation')
    sweep_parser.add_argument('--out-csv', required=True)
    sweep_parser.add_argument('--n-processes', type=positive_int, default=None)

    suite_parser = subparsers.add_parser('suite', help='check guarantees on random specs')
    suite_parser.add_argument('--kind', choices=['1d', 'nd'], required=True)
    suite_parser.add_argument('--n-configs', type=positive_int, default=None)
    suite_parser.add_argument('--n-samples', type=positive_int, default=None)
    suite_parser.add_argument('--seed', type=non_negative_int, required=True)
    suite_parser.add_argument('--out-report', required=True)
    suite_parser.add_argument('--n-processes', type=positive_int, default=None)

    plot_parser = subparsers.add_parser('plot', help='draw sweep curve or 2D dataset')
    source_group = plot_parser.add_mutually_exclusive_group(required=True)
    source_group.add_argument('--sweep-csv')
    source_group.add_argument('--data')
    plot_parser.add_argument('--out', required=True)

    cli_args = parser.parse_args(args)
    return cli_args


def load_input(loader: Callable[[str], Any], path: str, flag: str) -> Any:
    """Load input file and convert its problems to usage errors naming the flag."""
    try:
        return loader(path)
    except (OSError, ValueError, KeyError, TypeError) as e:
        fail(flag, f"cannot load {path}: {e}")


def cmd_gen(cli_args: argparse.Namespace, settings: dict[str, Any]) -> RunOutputs:
    """Generate random spec and draw dataset from it."""
    sampling_settings = settings['sampling']
    gap_factors = {
        'min_gap_factor': sampling_settings['min_gap_factor'],
        'max_gap_factor': sampling_settings['max_gap_factor'],
    }
    radius = cli_args.radius
    if radius is None:
        radius = sampling_settings['radius']
    try:
        config = SamplerConfig(cli_args.seed, cli_args.n, radius)
    except InvalidSamplerConfig as e:
        fail('--radius', e)
    try:
        if cli_args.mode == '1d':
            if cli_args.k is None:
                fail('--k', "is required when --mode is 1d")
            spec = random_spec_1d(
                cli_args.dim, cli_args.k, cli_args.classes, cli_args.delta, cli_args.seed,
                **gap_factors
            )
            dataset = sample_1d(spec, config)
        else:
            if cli_args.ks is None:
                fail('--ks', "is required when --mode is nd")
            spec = random_spec_nd(
                cli_args.dim, cli_args.ks, cli_args.classes, cli_args.delta, cli_args.seed,
                **gap_factors
            )
            dataset = sample_nd(spec, config)
    except AxesExceedDimension as e:
        fail('--ks', e)
    except InvalidSamplerConfig as e:
        fail('--config_path', e)
    save_spec(spec, cli_args.out_spec)
    save_dataset(dataset, cli_args.out_data)
    return RunOutputs([cli_args.out_spec, cli_args.out_data], seed=cli_args.seed)


def get_meta_path(model_path: str) -> str:
    """Get default path to metadata of a model."""
    return model_path.removesuffix('.json') + '.meta.json'


def cmd_build(cli_args: argparse.Namespace, settings: dict[str, Any]) -> RunOutputs:
    """Construct network for a spec."""
    spec = load_input(load_spec, cli_args.spec, '--spec')
    encoding = one_hot_encoding(spec.num_classes)
    if cli_args.cs is not None:
        policy = ScalingPolicy.explicit(cli_args.cs)
    else:
        policy = ScalingPolicy.sufficient_for_epsilon(cli_args.epsilon)
    network = build_network(spec, encoding, policy)
    meta_path = cli_args.out_meta or get_meta_path(cli_args.out_model)
    save_network(network, cli_args.out_model)
    save_build_info(network.info, meta_path)
    info = network.info
    print(f"{'kind':>40}: {info.kind}")
    print(f"{'scaling factor':>40}: {info.c_s_used}")
    print(f"{'parameters by formula':>40}: {info.formula_param_count}")
    print(f"{'stored parameters':>40}: {info.dense_param_count}")
    return RunOutputs([cli_args.out_model, meta_path], inputs=[cli_args.spec])


def cmd_eval(cli_args: argparse.Namespace, settings: dict[str, Any]) -> RunOutputs:
    """Evaluate network on a dataset."""
    evaluation_settings = settings['evaluation']
    network = load_input(load_network, cli_args.model, '--model')
    dataset = load_input(load_dataset, cli_args.data, '--data')
    inputs = [cli_args.model, cli_args.data]
    spec = None
    if cli_args.spec is not None:
        spec = load_input(load_spec, cli_args.spec, '--spec')
        inputs.append(cli_args.spec)
    epsilon = cli_args.epsilon or evaluation_settings['epsilon']
    n_processes = cli_args.n_processes or evaluation_settings['n_processes']
    num_classes = spec.num_classes if spec is not None else network.output_dim
    try:
        encoding = one_hot_encoding(num_classes)
        report = evaluate(
            network, encoding, spec, dataset, epsilon,
            evaluation_settings['bound_slack'], n_processes
        )
        agreement = oracle_agreement(network, encoding, spec, dataset) if spec else None
    except (DimensionMismatch, LabelOutOfRange) as e:
        raise CliError(str(e), EXIT_INCONSISTENT) from None
    save_dataclass(report, cli_args.out_report)
    print(format_report(report))
    if agreement is not None:
        print(f"{'oracle agreement':>40}: {agreement.fraction}")
    return RunOutputs([cli_args.out_report], inputs=inputs)


def cmd_sweep(cli_args: argparse.Namespace, settings: dict[str, Any]) -> RunOutputs:
    """Count misclassified points for each scaling factor from a grid."""
    spec = load_input(load_spec, cli_args.spec, '--spec')
    if isinstance(spec, SeparabilitySpecND):
        fail('--spec', "sweeps are defined for single-projection specs only")
    dataset = load_input(load_dataset, cli_args.data, '--data')
    try:
        grid = parse_grid(cli_args.grid or settings['sweep']['grid'])
    except InvalidGrid as e:
        fail('--grid', e)
    n_processes = cli_args.n_processes or settings['evaluation']['n_processes']
    try:
        result = sweep_scaling(
            spec, one_hot_encoding(spec.num_classes), dataset, grid,
            settings['evaluation']['epsilon'], n_processes
        )
    except (DimensionMismatch, LabelOutOfRange) as e:
        raise CliError(str(e), EXIT_INCONSISTENT) from None
    save_sweep(result, cli_args.out_csv)
    for point in result.points:
        print(f'{point.c_s:>40}: {point.n_misclassified}')
    print(f"{'sufficient scaling factor':>40}: {result.sufficient_c_s}")
    print(f"{'errors vanish from':>40}: {find_zero_threshold(result.points)}")
    return RunOutputs([cli_args.out_csv], inputs=[cli_args.spec, cli_args.data])


def cmd_suite(cli_args: argparse.Namespace, settings: dict[str, Any]) -> RunOutputs:
    """Check guarantees on random specs."""
    suite_settings = settings['suite']
    n_samples = cli_args.n_samples or suite_settings['n_samples']
    n_processes = cli_args.n_processes or settings['evaluation']['n_processes']
    epsilon = settings['evaluation']['epsilon']
    if cli_args.kind == '1d':
        n_configs = cli_args.n_configs or suite_settings['n_configs_1d']
        rows = run_bound_suite(n_configs, n_samples, cli_args.seed, epsilon, n_processes)
    else:
        n_configs = cli_args.n_configs or suite_settings['n_configs_nd']
        rows = run_lemma_suite(n_configs, n_samples, cli_args.seed, epsilon, n_processes)
    n_passed = sum(row.passed for row in rows)
    summary = {
        'kind': cli_args.kind,
        'seed': cli_args.seed,
        'n_configs': len(rows),
        'n_passed': n_passed,
        'rows': [{**dataclasses.asdict(row), 'passed': row.passed} for row in rows],
    }
    write_json(summary, cli_args.out_report)
    print(f"{'passed configurations':>40}: {n_passed} of {len(rows)}")
    exit_code = 0 if n_passed == len(rows) else EXIT_SUITE_FAILED
    return RunOutputs([cli_args.out_report], seed=cli_args.seed, exit_code=exit_code)


def cmd_plot(cli_args: argparse.Namespace, settings: dict[str, Any]) -> RunOutputs:
    """Draw sweep curve or 2D dataset."""
    try:
        from . import plotting
    except ImportError as e:
        fail('--out', f"plotting requires matplotlib (install 'saturnet[plot]'): {e}")
    if cli_args.sweep_csv is not None:
        result = load_input(load_sweep, cli_args.sweep_csv, '--sweep-csv')
        plotting.plot_sweep(result, cli_args.out)
        return RunOutputs([cli_args.out], inputs=[cli_args.sweep_csv])
    dataset = load_input(load_dataset, cli_args.data, '--data')
    try:
        plotting.plot_dataset(dataset, cli_args.out)
    except DimensionMismatch as e:
        fail('--data', e)
    return RunOutputs([cli_args.out], inputs=[cli_args.data])


COMMANDS = {
    'gen': cmd_gen,
    'build': cmd_build,
    'eval': cmd_eval,
    'sweep': cmd_sweep,
    'suite': cmd_suite,
    'plot': cmd_plot,
}


def write_manifest(
        cli_args: argparse.Namespace, run_outputs: RunOutputs, duration_in_seconds: float
) -> str:
    """Save description of a run next to its primary output."""
    flags = {k: v for k, v in vars(cli_args).items() if k != 'command'}
    manifest = RunManifest(
        command=cli_args.command,
        flags=json.loads(json.dumps(flags)),
        seed=run_outputs.seed,
        inputs=run_outputs.inputs,
        outputs=run_outputs.outputs,
        version=__version__,
        duration_in_seconds=duration_in_seconds,
    )
    manifest_path = run_outputs.outputs[0] + '.manifest.json'
    save_dataclass(manifest, manifest_path)
    return manifest_path


def main(args: Optional[list[str]] = None) -> None:
    """Parse CLI arguments and run requested tasks."""
    cli_args = parse_cli_args(args)

    default_config_path = importlib.resources.files("saturnet") / 'configs/default_config.yml'
    config_path = cli_args.config_path or default_config_path
    with open(config_path) as config_file:
        settings = yaml.load(config_file, Loader=yaml.FullLoader)
    logging.basicConfig(**settings['logging'])

    start_time = time.perf_counter()
    try:
        run_outputs = COMMANDS[cli_args.command](cli_args, settings)
    except CliError as e:
        print(f"saturnet {cli_args.command}: error: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
    except SaturnetError as e:
        print(f"saturnet {cli_args.command}: error: {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    write_manifest(cli_args, run_outputs, time.perf_counter() - start_time)
    if run_outputs.exit_code:
        sys.exit(run_outputs.exit_code)


if __name__ == '__main__':
    main()
