from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Any

import cappa

from cappa.output import error_format
from rich.table import Table
from rich.text import Text

from snm import __version__
from snm.app.estimators.service.estimator_service import estimator_service
from snm.app.experiment.schema.experiment import ExperimentConfig
from snm.app.experiment.service.experiment_service import experiment_service
from snm.app.experiment.service.validate_service import SUITES, validate_service
from snm.common.dataclasses import SampleData
from snm.common.enums import (
    EstimatorMethod,
    ExitCode,
    ExperimentCommand,
    OutputFormat,
    PopulationStatistic,
    TransformType,
)
from snm.common.exception.errors import BaseExceptionError
from snm.common.log import log, set_custom_logfile, setup_logging
from snm.utils.console import console
from snm.utils.serializers import to_json

output_help = '\nFor more information, try "[cyan]--help[/]"'


def _exit(e: BaseExceptionError) -> cappa.Exit:
    return cappa.Exit(f'{type(e).__name__}: {e.msg}', code=int(e.code))


def _report_paths(paths: list[Path]) -> None:
    for path in paths:
        console.print(Text('Wrote ', style='ok'), Text(str(path), style='path'))


@dataclass
class ExperimentArgs:
    dist: Annotated[
        str | None,
        cappa.Arg(long=True, help='Distribution, e.g. "pareto(shape=2,scale=1)"'),
    ] = None
    stat: Annotated[
        PopulationStatistic | None,
        cappa.Arg(long=True, help='Statistic: gini, scv or theil'),
    ] = None
    n: Annotated[
        str | None,
        cappa.Arg(short='-n', long=True, help='Comma separated sample sizes, e.g. 3,5,10,20'),
    ] = None
    grid: Annotated[
        str | None,
        cappa.Arg(long=True, help='Parameter grid A:B:STEP'),
    ] = None
    grid_param: Annotated[
        str | None,
        cappa.Arg(long=True, help='Parameter swept by --grid, the family primary parameter by default'),
    ] = None
    r: Annotated[
        float | None,
        cappa.Arg(short='-r', long=True, help='Value of the statistic on the all-zero sample'),
    ] = None
    reps: Annotated[
        int | None,
        cappa.Arg(long=True, help='Monte Carlo replications'),
    ] = None
    seed: Annotated[
        int | None,
        cappa.Arg(long=True, help='Seed of every random stream'),
    ] = None
    rel_tol: Annotated[
        float | None,
        cappa.Arg(long=True, help='Relative quadrature tolerance'),
    ] = None
    abs_tol: Annotated[
        float | None,
        cappa.Arg(long=True, help='Absolute quadrature tolerance'),
    ] = None
    transform: Annotated[
        TransformType | None,
        cappa.Arg(long=True, help='Change of variable: rational_map, log_map or none_with_truncation'),
    ] = None
    out: Annotated[
        Path | None,
        cappa.Arg(long=True, help='Output directory, or file for single-output commands'),
    ] = None
    format: Annotated[
        OutputFormat | None,
        cappa.Arg(long=True, help='Output format: csv, json or svg+csv'),
    ] = None
    workers: Annotated[
        int | None,
        cappa.Arg(long=True, help='Worker processes'),
    ] = None
    config: Annotated[
        Path | None,
        cappa.Arg(long=True, value_name='PATH', help='TOML or JSON config, overridden by flags'),
    ] = None
    verbose: Annotated[
        bool,
        cappa.Arg(short='-v', long=True, help='Debug logging'),
    ] = False
    log_file: Annotated[
        bool,
        cappa.Arg(long=True, help='Also write rotating log files'),
    ] = False

    def flags(self) -> dict[str, Any]:
        return {
            'dist': self.dist,
            'stat': self.stat,
            'n_list': self.n,
            'param_grid': self.grid,
            'grid_param': self.grid_param,
            'r': self.r,
            'replications': self.reps,
            'seed': self.seed,
            'out': self.out,
            'format': self.format,
            'workers': self.workers,
            'quadrature': {'rel_tol': self.rel_tol, 'abs_tol': self.abs_tol, 'transform': self.transform},
        }

    def build(self, command: ExperimentCommand, **extra: Any) -> ExperimentConfig:
        setup_logging('DEBUG' if self.verbose else None)
        if self.log_file:
            set_custom_logfile()
        return ExperimentConfig.build({**self.flags(), **extra, 'command': command}, self.config)


def run_files(args: ExperimentArgs, command: ExperimentCommand, **extra: Any) -> None:
    try:
        config = args.build(command, **extra)
        runner = {
            ExperimentCommand.bias_curve: experiment_service.run_bias_curve,
            ExperimentCommand.variance_curve: experiment_service.run_variance_curve,
            ExperimentCommand.scv_curve: experiment_service.run_scv_curve,
            ExperimentCommand.debias_experiment: experiment_service.run_debias_experiment,
        }[command]
        with log.contextualize(run=f'{command.value}:{config.seed}'):
            paths = runner(config)
    except BaseExceptionError as e:
        raise _exit(e)
    _report_paths(paths)


def run_validate(args: ExperimentArgs, quick: bool, suite: str | None, scale: float) -> None:  # noqa: FBT001
    try:
        config = args.build(ExperimentCommand.validate, quick=quick, suite=suite, scale=scale)
        with log.contextualize(run=f'validate:{config.seed}'):
            report = validate_service.run_validate(config)
    except BaseExceptionError as e:
        raise _exit(e)

    table = Table(show_header=True, header_style='bold magenta')
    table.add_column('Suite', style='suite', no_wrap=True)
    table.add_column('Check')
    table.add_column('Engine', justify='right')
    table.add_column('Oracle', justify='right')
    table.add_column('Band', justify='right')
    table.add_column('Verdict', justify='center')
    table.add_column('Detail', style='blue')
    for check in report.checks:
        table.add_row(
            check.suite,
            check.name,
            f'{check.engine:.12g}',
            f'{check.oracle:.12g}',
            f'{check.band:.3g}',
            '[ok]pass[/]' if check.passed else '[fail]FAIL[/]',
            check.detail,
        )
    console.print(table)
    failed = len(report.failures)
    if failed:
        raise cappa.Exit(f'{failed} of {len(report.checks)} checks failed', code=int(ExitCode.validation_failure))
    console.print(Text(f'All {len(report.checks)} checks passed', style='ok'))


def run_moment(args: ExperimentArgs) -> None:
    try:
        config = args.build(ExperimentCommand.moment)
        report = experiment_service.run_moment(config)
    except BaseExceptionError as e:
        raise _exit(e)
    console.print_json(to_json(report).decode())


def run_estimate(
    data: str | None,
    file: Path | None,
    method: EstimatorMethod,
    stat: PopulationStatistic,
    r: float,
) -> None:
    if (data is None) == (file is None):
        raise cappa.Exit('Give exactly one of --data and --file', code=int(ExitCode.config_error))
    setup_logging()
    try:
        sample = SampleData.from_text(data) if data is not None else SampleData.from_csv(file)
        match PopulationStatistic(stat):
            case PopulationStatistic.gini:
                result = estimator_service.debiased_gini(sample, method, r=r).as_dict()
            case PopulationStatistic.scv:
                result = {'method': 'plain', 'value': estimator_service.sample_scv(sample, r)}
            case PopulationStatistic.theil:
                result = {'method': 'plain', 'value': estimator_service.sample_theil(sample, r)}
    except BaseExceptionError as e:
        raise _exit(e)
    console.print_json(to_json({'n': sample.n, 'stat': PopulationStatistic(stat).value, **result}).decode())


@cappa.command(name='bias-curve', help='E V, population value and bias ratio R over a parameter grid')
@dataclass
class BiasCurve(ExperimentArgs):
    def __call__(self) -> None:
        run_files(self, ExperimentCommand.bias_curve)


@cappa.command(name='variance-curve', help='E Ĝ, E Ĝ² and Var Ĝ over a parameter grid')
@dataclass
class VarianceCurve(ExperimentArgs):
    def __call__(self) -> None:
        run_files(self, ExperimentCommand.variance_curve)


@cappa.command(name='scv-curve', help='Bias curve of the squared coefficient of variation')
@dataclass
class ScvCurve(ExperimentArgs):
    def __call__(self) -> None:
        run_files(self, ExperimentCommand.scv_curve)


@cappa.command(name='debias-experiment', help='Bias of the five Gini estimators on Pareto samples')
@dataclass
class DebiasExperiment(ExperimentArgs):
    def __call__(self) -> None:
        run_files(self, ExperimentCommand.debias_experiment)


@cappa.command(help='Check the engine against closed forms, enumeration and Monte Carlo')
@dataclass
class Validate(ExperimentArgs):
    quick: Annotated[
        bool,
        cappa.Arg(long=True, help='Enumeration checks only'),
    ] = False
    suite: Annotated[
        str | None,
        cappa.Arg(long=True, help=f'Run one suite: {", ".join(SUITES)}'),
    ] = None
    scale: Annotated[
        float,
        cappa.Arg(long=True, help='Multiplier of Monte Carlo replication counts'),
    ] = 1.0

    def __call__(self) -> None:
        run_validate(self, self.quick, self.suite, self.scale)


@cappa.command(help='One engine evaluation printed as JSON')
@dataclass
class Moment(ExperimentArgs):
    def __call__(self) -> None:
        run_moment(self)


@cappa.command(help='Regenerate SVG charts from an experiment CSV')
@dataclass
class Plot:
    csv: Annotated[
        Path,
        cappa.Arg(help='CSV written by a curve or debias command'),
    ]

    def __call__(self) -> None:
        try:
            paths = experiment_service.plot(self.csv)
        except BaseExceptionError as e:
            raise _exit(e)
        _report_paths(paths)


@cappa.command(help='Estimate a statistic from data', default_long=True)
@dataclass
class Estimate:
    data: Annotated[
        str | None,
        cappa.Arg(help='Inline values, e.g. "1.5,2,3"'),
    ] = None
    file: Annotated[
        Path | None,
        cappa.Arg(help='CSV file with one value per line'),
    ] = None
    method: Annotated[
        EstimatorMethod,
        cappa.Arg(default='plain', help='Gini estimator'),
    ] = EstimatorMethod.plain
    stat: Annotated[
        PopulationStatistic,
        cappa.Arg(default='gini', help='Statistic: gini, scv or theil'),
    ] = PopulationStatistic.gini
    r: Annotated[
        float,
        cappa.Arg(default=0.0, help='Value on the all-zero sample'),
    ] = 0.0

    def __call__(self) -> None:
        run_estimate(self.data, self.file, self.method, self.stat, self.r)


@cappa.command(help='Exact moments of self-normalized statistics')
@dataclass
class SnmCli:
    subcmd: cappa.Subcommands[
        BiasCurve | VarianceCurve | ScvCurve | DebiasExperiment | Validate | Moment | Plot | Estimate
    ]


def main() -> None:
    output = cappa.Output(error_format=f'{error_format}\n{output_help}')
    cappa.invoke(SnmCli, version=__version__, output=output)
