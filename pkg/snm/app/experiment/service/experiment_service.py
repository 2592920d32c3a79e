import dataclasses

from pathlib import Path
from typing import Any

import numpy as np

from snm.app.distributions.model import get_family_model
from snm.app.distributions.schema.distribution import DistributionSpec, parameter_definition, primary_parameter
from snm.app.distributions.service.distribution_service import distribution_service
from snm.app.engine.service.engine_service import engine_service
from snm.app.estimators.service.estimator_service import estimator_service, get_bias_grid
from snm.app.estimators.utils.bias_grid import BiasGrid
from snm.app.experiment.schema.experiment import (
    BIAS_CURVE_COLUMNS,
    DEBIAS_COLUMNS,
    DEFAULT_CURVE_GRID,
    DEFAULT_CURVE_N,
    DEFAULT_DEBIAS_N,
    VARIANCE_CURVE_COLUMNS,
    ExperimentConfig,
)
from snm.app.oracle.utils.streams import RunningMoments, chunk_sizes, merge_all, philox
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.app.statistics.model.named_statistic import get_named_statistic
from snm.app.statistics.service.statistics_service import statistics_service
from snm.common.enums import DistributionFamily, EstimatorMethod, OutputFormat, PopulationStatistic
from snm.common.exception import errors
from snm.common.log import log
from snm.core.conf import settings
from snm.utils.parallel import ordered_map
from snm.utils.serializers import read_csv, write_csv, write_json
from snm.utils.svg import Series, render_line_chart


@dataclasses.dataclass(frozen=True)
class CurvePoint:
    dist: DistributionSpec
    param: float
    n: int
    stat: PopulationStatistic
    r: float
    config: QuadratureConfig


@dataclasses.dataclass(frozen=True)
class DebiasChunk:
    alpha: float
    n: int
    size: int
    stream: np.random.SeedSequence
    grid: BiasGrid


def _failure(e: errors.BaseExceptionError) -> str:
    return f'{type(e).__name__}: {e.msg}'


def _bias_point(point: CurvePoint) -> dict[str, Any]:
    row = {
        'family': point.dist.family.value,
        'param': point.param,
        'n': point.n,
        'stat': PopulationStatistic(point.stat).value,
        'r': point.r,
    }
    try:
        match PopulationStatistic(point.stat):
            case PopulationStatistic.gini:
                result = statistics_service.gini_expectation(point.dist, point.n, point.r, point.config)
                population, ratio = result.population_G, result.ratio_R
            case PopulationStatistic.scv:
                result = statistics_service.scv_expectation(point.dist, point.n, point.r, point.config)
                population, ratio = result.population_cv2, result.ratio_RV
            case PopulationStatistic.theil:
                result = statistics_service.theil_expectation(point.dist, point.n, point.r, point.config)
                population = result.population_T
                ratio = result.expected / population if population > 0 else None
    except errors.BaseExceptionError as e:
        log.warning('{} at n={} failed: {}', point.dist.text(), point.n, e.msg)
        return {**row, 'converged': False, 'error': _failure(e)}
    return {
        **row,
        'population_value': population,
        'expected_value': result.expected,
        'ratio_R': ratio,
        'quad_error': result.moment.quadrature_error,
        'converged': result.moment.converged,
    }


def _variance_point(point: CurvePoint) -> dict[str, Any]:
    row = {'family': point.dist.family.value, 'param': point.param, 'n': point.n, 'r': point.r}
    try:
        result = statistics_service.gini_second_moment(point.dist, point.n, point.r, point.config)
        population = distribution_service.population_stat(point.dist, PopulationStatistic.gini)
    except errors.BaseExceptionError as e:
        log.warning('{} at n={} failed: {}', point.dist.text(), point.n, e.msg)
        return {**row, 'converged': False, 'error': _failure(e)}
    return {
        **row,
        'population_value': population,
        'expected_value': result.expected,
        'second_moment': result.second_moment,
        'variance': result.variance,
        'inner_std_error': result.moment.inner_std_error,
        'quad_error': result.moment.quadrature_error,
        'converged': result.moment.converged,
    }


def _debias_chunk(chunk: DebiasChunk) -> dict[EstimatorMethod, RunningMoments]:
    model = get_family_model(DistributionSpec.create(DistributionFamily.pareto, shape=chunk.alpha))
    x = model.sample((chunk.size, chunk.n), philox(chunk.stream))
    population = estimator_service.plugin_gini(DistributionFamily.pareto, chunk.alpha)
    plain = estimator_service.sample_gini_batch(x)
    mle, _ = estimator_service.pareto_fit_mle_batch(x)
    mom, _ = estimator_service.pareto_fit_mom_batch(x)
    estimates = {
        EstimatorMethod.plain: plain,
        EstimatorMethod.mle_debiased: plain - chunk.grid(mle),
        EstimatorMethod.mom_debiased: plain - chunk.grid(mom),
        EstimatorMethod.mle_plugin: 1.0 / (2.0 * mle - 1.0),
        EstimatorMethod.mom_plugin: 1.0 / (2.0 * mom - 1.0),
    }
    return {method: RunningMoments.of(values - population) for method, values in estimates.items()}


def _sweep(config: ExperimentConfig, default_grid: str | None, default_n: tuple[int, ...]) -> list[CurvePoint]:
    dist = config.distribution()
    name = config.grid_param or primary_parameter(dist.family)
    definition, reciprocal = parameter_definition(dist.family, name)
    grid = config.grid(default_grid)
    if grid is None:
        current = dist.param(definition.name)
        params = [1.0 / current if reciprocal else current]
    else:
        params = [float(v) for v in grid]
    return [
        CurvePoint(
            DistributionSpec.parse(dist.text(), {name: value}), value, n, config.stat, config.r, config.quadrature
        )
        for n in config.counts(default_n)
        for value in params
    ]


def output_path(config: ExperimentConfig, stem: str, suffix: str) -> Path:
    """``out`` itself when it names a file, else ``out/stem.suffix``"""
    out = Path(config.out)
    if out.suffix:
        return out.with_suffix(suffix)
    return out / f'{stem}{suffix}'


def _write(config: ExperimentConfig, stem: str, rows: list[dict], columns: tuple[str, ...]) -> list[Path]:
    if OutputFormat(config.format) == OutputFormat.json:
        return [write_json(output_path(config, stem, '.json'), rows)]
    path = write_csv(output_path(config, stem, '.csv'), rows, columns)
    log.info('Wrote {} rows to {}', len(rows), path)
    if OutputFormat(config.format) == OutputFormat.svg_csv:
        return [path, *experiment_service.plot(path)]
    return [path]


def _number(text: str | None) -> float | None:
    return float(text) if text not in (None, '') else None


def _series(rows: list[dict[str, str]], key: str, y: str, x: str = 'param') -> list[Series]:
    groups: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        value = _number(row.get(y))
        if value is None:
            continue
        groups.setdefault(row[key], []).append((float(row[x]), value))
    return [Series(f'{key}={label}', tuple(sorted(points))) for label, points in groups.items()]


class ExperimentService:
    """Curve sweeps, the debiasing replication experiment and single moment evaluations"""

    @staticmethod
    def run_bias_curve(config: ExperimentConfig) -> list[Path]:
        """
        E V, the population value and R = E V / population over a parameter grid for each n

        Failed points are written with ``converged`` false and the error text, the sweep continues.

        :param config: Experiment config
        :return: Written files
        """
        points = _sweep(config, None, DEFAULT_CURVE_N)
        log.info('Bias curve: {} points of {}', len(points), config.stat)
        rows = ordered_map(_bias_point, points, config.workers)
        family = points[0].dist.family.value
        return _write(config, f'bias_curve_{family}_{config.stat}', rows, BIAS_CURVE_COLUMNS)

    @staticmethod
    def run_variance_curve(config: ExperimentConfig) -> list[Path]:
        """
        E Ĝ, E Ĝ² and Var Ĝ over a parameter grid for each n

        :param config: Experiment config
        :return: Written files
        """
        points = _sweep(config, None, DEFAULT_CURVE_N)
        rows = ordered_map(_variance_point, points, config.workers)
        return _write(config, f'variance_curve_{points[0].dist.family.value}', rows, VARIANCE_CURVE_COLUMNS)

    @staticmethod
    def run_scv_curve(config: ExperimentConfig) -> list[Path]:
        return ExperimentService.run_bias_curve(config.model_copy(update={'stat': PopulationStatistic.scv}))

    @staticmethod
    def debias_table(config: ExperimentConfig) -> list[dict[str, Any]]:
        """
        Bias of the five Gini estimators on Pareto(α, 1) samples, one row per (α, n, method)

        Bias grids are tabulated before the replications are spread over workers. Every (α, n) point owns a
        child seed sequence split per chunk, so results do not depend on the worker count.

        :param config: Experiment config
        :return:
        """
        dist = config.distribution('pareto(shape=2)')
        if dist.family != DistributionFamily.pareto:
            raise errors.ConfigError(msg=f'Debiasing is implemented for Pareto samples, got {dist.family.value}')
        alphas = [float(a) for a in config.grid(DEFAULT_CURVE_GRID)]
        if min(alphas) <= 1:
            raise errors.ConfigError(msg='Pareto shapes must exceed 1 for a finite Gini coefficient')
        counts = config.counts(DEFAULT_DEBIAS_N)
        grids = {n: get_bias_grid(DistributionFamily.pareto, n, config.quadrature, config.workers) for n in counts}
        points = [(alpha, n) for n in counts for alpha in alphas]
        streams = np.random.SeedSequence(config.seed).spawn(len(points))
        sizes = chunk_sizes(config.replications, settings.ORACLE_BATCH_SIZE)
        chunks = [
            DebiasChunk(alpha, n, size, stream, grids[n])
            for (alpha, n), point_stream in zip(points, streams)
            for size, stream in zip(sizes, point_stream.spawn(len(sizes)))
        ]
        log.info('Debias experiment: {} points x {} replications', len(points), config.replications)
        results = ordered_map(_debias_chunk, chunks, config.workers)
        rows = []
        for k, (alpha, n) in enumerate(points):
            parts = results[k * len(sizes) : (k + 1) * len(sizes)]
            for method in EstimatorMethod:
                moments = merge_all([part[method] for part in parts])
                rows.append(
                    {
                        'alpha': alpha,
                        'n': n,
                        'method': method.value,
                        'bias': moments.mean,
                        'abs_bias': abs(moments.mean),
                        'std_error': moments.std_error,
                        'replications': moments.count,
                        'seed': config.seed,
                    }
                )
        return rows

    @staticmethod
    def run_debias_experiment(config: ExperimentConfig) -> list[Path]:
        """
        Debias table written as CSV, with bias and absolute bias charts per n

        :param config: Experiment config
        :return: Written files
        """
        return _write(config, 'debias_pareto', ExperimentService.debias_table(config), DEBIAS_COLUMNS)

    @staticmethod
    def run_moment(config: ExperimentConfig) -> dict[str, Any]:
        """
        One engine evaluation with its diagnostics

        :param config: Experiment config with a single n
        :return:
        """
        dist = config.distribution()
        counts = config.counts(())
        if len(counts) != 1:
            raise errors.ConfigError(msg='moment needs exactly one sample size')
        n = counts[0]
        stat = get_named_statistic(config.stat, config.r)
        result = engine_service.expected_ratio_iid(dist, n, stat, config.quadrature)
        try:
            population = distribution_service.population_stat(dist, config.stat)
        except errors.CapabilityError:
            population = None
        report = {
            'distribution': dist.text(),
            'stat': PopulationStatistic(config.stat).value,
            'n': n,
            'r': config.r,
            'population_value': population,
            'ratio': result.value / population if population else None,
            **result.as_dict(),
        }
        if OutputFormat(config.format) == OutputFormat.json and Path(config.out).suffix == '.json':
            write_json(config.out, report)
        return report

    @staticmethod
    def plot(csv_path: str | Path) -> list[Path]:
        """
        Render the SVG charts of an experiment CSV, a pure function of its content

        :param csv_path: CSV written by a curve or debias command
        :return: Written SVG files
        """
        csv_path = Path(csv_path)
        rows = read_csv(csv_path)
        if not rows:
            raise errors.ConfigError(msg=f'{csv_path} has no rows to plot')
        columns = rows[0].keys()
        charts: list[tuple[Path, str]] = []
        if 'method' in columns:
            for n in dict.fromkeys(row['n'] for row in rows):
                subset = [row for row in rows if row['n'] == n]
                for metric in ('bias', 'abs_bias'):
                    svg = render_line_chart(
                        _series(subset, 'method', metric, x='alpha'),
                        title=f'{metric} of Gini estimators, Pareto(α, 1), n={n}',
                        x_label='α',
                        y_label=metric,
                        reference=0.0,
                    )
                    charts.append((csv_path.with_name(f'{csv_path.stem}_{metric}_n{n}.svg'), svg))
        elif 'variance' in columns:
            family = rows[0]['family']
            svg = render_line_chart(
                _series(rows, 'n', 'variance'), title=f'Var Ĝ, {family}', x_label='parameter', y_label='Var Ĝ'
            )
            charts.append((csv_path.with_suffix('.svg'), svg))
        elif 'ratio_R' in columns:
            family, stat = rows[0]['family'], rows[0]['stat']
            svg = render_line_chart(
                _series(rows, 'n', 'ratio_R'),
                title=f'R = E {stat} / population {stat}, {family}',
                x_label='parameter',
                y_label='R',
                reference=1.0,
            )
            charts.append((csv_path.with_suffix('.svg'), svg))
        else:
            raise errors.ConfigError(msg=f'{csv_path} is not an experiment CSV')
        for path, svg in charts:
            try:
                path.write_text(svg, encoding='utf-8')
            except OSError as e:
                raise errors.ConfigError(msg=f'Cannot write {path}: {e}') from e
        return [path for path, _ in charts]


experiment_service: ExperimentService = ExperimentService()
