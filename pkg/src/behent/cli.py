"""``behent`` command line interface.

Exit codes: 0 success, 2 validation error, 3 numeric/degenerate-data error,
4 I/O error. Errors print as ``error[category/module]: detail`` on stderr.
"""

from __future__ import annotations

import sys
from functools import wraps
from typing import Optional, Sequence

import click
import numpy as np

from . import coverage as cov
from . import entropy as ent
from . import io
from . import rewards as rw
from . import synth
from .density import BACKENDS, NeighborIndex, log_density_from_radii
from .errors import BehentError, ValidationError
from .weighting import Identity, Prelec, WeightingParams, condition_beta

DEFAULT_K = rw.DEFAULT_K
DEFAULT_M = rw.DEFAULT_M
DEFAULT_ALPHAS = rw.DEFAULT_ALPHAS
DEFAULT_QS = (0.2, 0.5, 0.7, 0.9, 1.1, 2.0, 3.0, 5.0)


def _float_list(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma separated list of numbers, got {text!r}") from None


def _fmt_list(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def weighting_params(alpha: float, beta: Optional[float], m: Optional[int]) -> WeightingParams:
    if beta is not None and m is not None:
        raise ValidationError("give either --beta or --m, not both", "cli")
    if beta is not None:
        return WeightingParams(alpha, beta)
    m = DEFAULT_M if m is None else m
    return WeightingParams(alpha, condition_beta(alpha, m), m)


def _weighting(params: WeightingParams):
    return Prelec(params)


def reports_errors(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BehentError as exc:
            click.echo(exc.structured(), err=True)
            sys.exit(exc.exit_code)
    return wrapper


k_option = click.option("--k", "k", type=int, default=DEFAULT_K, show_default=True,
                        help="Neighbour depth (APT setting 'k in NN approximator').")
m_option = click.option("--m", "m", type=int, default=None,
                        help=f"Representation dimension used to condition beta = (log M)^(1-alpha); "
                             f"default {DEFAULT_M} (APT representation dimension) when --beta is absent.")
beta_option = click.option("--beta", type=float, default=None,
                           help="Prelec scale; overrides conditioning on --m.")
backend_option = click.option("--backend", type=click.Choice(BACKENDS), default="tree", show_default=True,
                              help="Neighbour search backend.")
format_option = click.option("--format", "fmt", type=click.Choice(io.FORMATS), default=None,
                             help="File format; inferred from the extension when omitted.")


@click.group()
@click.option("--workers", type=int, default=1, show_default=True,
              help="Worker threads for neighbour queries and study repetitions.")
@click.pass_context
def main(ctx, workers):
    """Entropy estimation, reward relabeling and coverage for continuous samples."""
    if workers < 1:
        raise click.BadParameter("must be >= 1", param_hint="--workers")
    ctx.obj = {"workers": workers}


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False))
@format_option
@click.option("--estimator", "estimators", multiple=True,
              type=click.Choice(["shannon", "renyi", "be", "be-naive"]), default=("shannon",),
              show_default=True, help="Estimator family; repeat for several.")
@click.option("--alpha", "alphas", multiple=True, type=float,
              help=f"Prelec shape for be/be-naive; repeatable. Default grid {_fmt_list(DEFAULT_ALPHAS)} "
                   "(alpha values of the BE dataset experiments).")
@beta_option
@m_option
@click.option("--q", "qs", multiple=True, type=float,
              help=f"Renyi order; repeatable. Default grid {_fmt_list(DEFAULT_QS)} "
                   "(q values of the Renyi dataset experiments).")
@k_option
@backend_option
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="CSV file; stdout if omitted.")
@click.pass_context
@reports_errors
def estimate(ctx, input_path, fmt, estimators, alphas, beta, m, qs, k, backend, output):
    """Estimate differential entropies (nats) of a dataset."""
    data = io.load_dataset(input_path, fmt)
    index = NeighborIndex(data, backend, ctx.obj["workers"])
    log_f = log_density_from_radii(index.kth_self_distance(k), k, data.n, data.d)
    rows = []
    for name in estimators:
        if name == "shannon":
            specs = [(ent.EstimatorSpec.shannon(), {})]
        elif name == "renyi":
            specs = [(ent.EstimatorSpec.renyi(q), {"q": q}) for q in (qs or DEFAULT_QS)]
        else:
            specs = []
            for a in alphas or DEFAULT_ALPHAS:
                p = weighting_params(a, beta, m)
                specs.append((ent.EstimatorSpec.behavioral(_weighting(p), corrected=name == "be"),
                              {"alpha": p.alpha, "beta": p.beta, "m": p.conditioned_m}))
        for spec, par in specs:
            value = ent.EntropyEstimate(ent.estimates_from_log_density(log_f, spec), spec, k, data.n, data.d).value
            rows.append((name, par.get("alpha"), par.get("beta"), par.get("m"), par.get("q"),
                         k, data.n, data.d, value))
    io.write_table(output, ("estimator", "alpha", "beta", "m", "q", "k", "n", "d", "value"), rows)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False))
@format_option
@click.option("--output", required=True, type=click.Path(dir_okay=False))
@click.option("--output-format", type=click.Choice(io.FORMATS), default=None,
              help="Output format; inferred from the extension when omitted.")
@click.option("--objective", type=click.Choice(["be", "shannon", "renyi"]), default="be", show_default=True,
              help="Reward objective; renyi is not supported and is rejected.")
@click.option("--alpha", type=float, default=1.0, show_default=True, help="Prelec shape.")
@beta_option
@m_option
@click.option("--c", "c", type=float, default=rw.DEFAULT_C, show_default=True,
              help="Log stabilizer, must be >= 1.")
@k_option
@click.option("--avg-top-k/--no-avg-top-k", default=True, show_default=True,
              help="Average the k nearest distances (APT setting 'average top k in NN').")
@backend_option
@click.pass_context
@reports_errors
def reward(ctx, input_path, fmt, output, output_format, objective, alpha, beta, m, c, k, avg_top_k, backend):
    """Relabel a dataset with intrinsic rewards."""
    if objective == "renyi":
        raise ValidationError("Renyi-objective rewards are not implemented; use --objective be or shannon",
                              "rewards")
    data = io.load_dataset(input_path, fmt)
    cfg = rw.RewardConfig(weighting_params(alpha, beta, m), k=k, c=c,
                          objective="behavioral" if objective == "be" else "shannon",
                          average_top_k=avg_top_k)
    records = rw.relabel(data, cfg, backend, ctx.obj["workers"])
    io.write_records(output, records, output_format)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False))
@format_option
@click.option("--inc", "increment", type=int, default=50_000, show_default=True,
              help="Training-step increment between checkpoints.")
@click.option("--per-inc", "per_increment", type=int, default=10_000, show_default=True,
              help="Points sampled uniformly from each increment.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--normalize-by", type=float, default=None,
              help="Radius used for normalization; the curve's own maximum if omitted.")
@click.option("--strict/--no-strict", default=False, show_default=True,
              help="Fail instead of flagging increments with too few rows.")
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="CSV file; stdout if omitted.")
@reports_errors
def coverage(input_path, fmt, increment, per_increment, seed, normalize_by, strict, output):
    """Volumetric coverage curve from minimal enclosing balls."""
    data = io.load_dataset(input_path, fmt)
    if data.step is None:
        raise ValidationError("coverage needs a 'step' column", "coverage")
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        curve = cov.coverage_curve(data.points, data.step, per_increment, increment, seed,
                                   normalize_by, strict)
    io.write_table(output, cov.CoverageCurve.CSV_HEADER, curve.csv_rows())


def _distribution(dist, dim, lo, hi, mean, sigma, seed):
    if dist == "uniform":
        return synth.UniformBox(np.full(dim, lo), np.full(dim, hi), seed)
    if dist == "gaussian":
        return synth.Gaussian(np.full(dim, mean), sigma, seed)
    return synth.TruncatedGaussian(np.full(dim, lo), np.full(dim, hi), np.full(dim, mean), sigma, seed)


dist_options = [
    click.option("--dist", type=click.Choice(["uniform", "gaussian", "truncated-gaussian"]), default="gaussian",
                 show_default=True),
    click.option("--dim", type=int, default=1, show_default=True),
    click.option("--lo", type=float, default=0.0, show_default=True, help="Box lower bound (uniform, truncated)."),
    click.option("--hi", type=float, default=1.0, show_default=True, help="Box upper bound (uniform, truncated)."),
    click.option("--mean", type=float, default=0.0, show_default=True, help="Gaussian mean, every coordinate."),
    click.option("--sigma", type=float, default=1.0, show_default=True, help="Gaussian standard deviation."),
    click.option("--seed", type=int, default=0, show_default=True),
]


def with_dist_options(fn):
    for opt in reversed(dist_options):
        fn = opt(fn)
    return fn


@main.command()
@with_dist_options
@click.option("--n", "n", type=int, required=True)
@click.option("--with-steps/--no-steps", default=False, show_default=True,
              help="Add a step column numbering rows from 1.")
@click.option("--output", required=True, type=click.Path(dir_okay=False))
@format_option
@reports_errors
def sample(dist, dim, lo, hi, mean, sigma, seed, n, with_steps, output, fmt):
    """Draw a seeded synthetic dataset."""
    data = synth.sample(_distribution(dist, dim, lo, hi, mean, sigma, seed), n)
    if with_steps:
        data = type(data)(data.points, step=np.arange(1, n + 1))
    io.write_dataset(output, data, fmt)


@main.command()
@with_dist_options
@click.option("--estimator", type=click.Choice(["shannon", "renyi", "be"]), default="shannon", show_default=True)
@click.option("--alpha", type=float, default=1.0, show_default=True)
@beta_option
@m_option
@click.option("--q", type=float, default=2.0, show_default=True)
@click.option("--n-grid", default="1e3,1e4,1e5", show_default=True, help="Comma separated sample sizes.")
@click.option("--reps", type=int, default=10, show_default=True, help="Repetitions per sample size.")
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="CSV file; stdout if omitted.")
@click.pass_context
@reports_errors
def study(ctx, dist, dim, lo, hi, mean, sigma, seed, estimator, alpha, beta, m, q, n_grid, reps, output):
    """Monte-Carlo error/variance study against a closed-form oracle (k = ceil(sqrt n))."""
    if dist == "truncated-gaussian":
        raise ValidationError("no analytic oracle for the truncated Gaussian", "entropy")
    family = _distribution(dist, dim, lo, hi, mean, sigma, seed)
    if estimator == "shannon":
        spec = ent.EstimatorSpec.shannon()
    elif estimator == "renyi":
        spec = ent.EstimatorSpec.renyi(q)
    else:
        spec = ent.EstimatorSpec.behavioral(_weighting(weighting_params(alpha, beta, m)))
    grid = [int(round(v)) for v in _float_list(n_grid)]
    report = ent.convergence_study(family, spec, grid, repetitions=reps, seed=seed, workers=ctx.obj["workers"])
    io.write_table(output, ent.StudyReport.CSV_HEADER, report.csv_rows())


@main.command()
@click.option("--m", "m", type=int, default=DEFAULT_M, show_default=True,
              help="Representation dimension for beta conditioning (APT representation dimension).")
@click.option("--alphas", default=_fmt_list(DEFAULT_ALPHAS), show_default=True,
              help="Comma separated alpha values (alpha values of the BE dataset experiments).")
@click.option("--c", "c", type=float, default=rw.DEFAULT_C, show_default=True)
@click.option("--r-max", type=float, default=5.0, show_default=True, help="Largest distance on the grid.")
@click.option("--r-points", type=int, default=51, show_default=True, help="Grid points from 0 to --r-max.")
@click.option("--r-grid", default=None, help="Explicit comma separated distances; overrides --r-max/--r-points.")
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="CSV file; stdout if omitted.")
@reports_errors
def curve(m, alphas, c, r_max, r_points, r_grid, output):
    """Reward as a function of k-NN distance for each alpha, with the Shannon baseline."""
    grid = _float_list(r_grid) if r_grid else np.linspace(0.0, r_max, r_points).tolist()
    rows = rw.reward_curve(rw.curve_configs(_float_list(alphas), m, c), grid)
    io.write_table(output, rw.CURVE_HEADER, ((r.alpha, r.R, r.reward, r.shannon) for r in rows))


if __name__ == "__main__":
    main()
