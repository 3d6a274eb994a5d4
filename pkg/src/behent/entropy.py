"""k-NN plug-in estimators of differential Shannon, Renyi and behavioral entropy.

All values are in nats. No digamma bias corrections are applied, so the
three families stay directly comparable.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .density import Backend, NeighborIndex, as_dataset, log_density_from_radii
from .errors import UnknownFamilyError, ValidationError
from .synth import (
    Behavioral,
    DistributionSpec,
    Renyi,
    Shannon,
    analytic_entropy,
    be_analytic_uniform,
    sample,
)
from .weighting import Identity, Prelec, WeightingFunction, WeightingParams

__all__ = [
    "EntropyEstimate", "EstimatorSpec", "StudyReport",
    "shannon_knn", "renyi_knn", "be_naive", "be_corrected", "be_analytic_uniform",
    "estimate", "estimates_from_log_density", "convergence_study", "sqrt_schedule",
]

Kind = Literal["shannon", "renyi", "be_naive", "be"]


@dataclass(frozen=True)
class EstimatorSpec:
    kind: Kind
    q: Optional[float] = None
    weighting: Optional[WeightingFunction] = None

    def __post_init__(self):
        if self.kind not in ("shannon", "renyi", "be_naive", "be"):
            raise ValidationError(f"unknown estimator {self.kind!r}", "entropy")
        if self.kind == "renyi":
            if self.q is None or not self.q > 0:
                raise ValidationError(f"Renyi order q must be > 0, got {self.q!r}", "entropy")
            if self.q == 1:
                raise ValidationError("Renyi order q = 1 is the Shannon limit; use shannon_knn", "entropy")
        if self.kind in ("be_naive", "be") and self.weighting is None:
            raise ValidationError(f"estimator {self.kind!r} needs a weighting function", "entropy")

    @classmethod
    def shannon(cls):
        return cls("shannon")

    @classmethod
    def renyi(cls, q: float):
        return cls("renyi", q=q)

    @classmethod
    def behavioral(cls, w: WeightingFunction, corrected: bool = True):
        return cls("be" if corrected else "be_naive", weighting=w)

    @property
    def label(self) -> str:
        if self.kind == "renyi":
            return f"renyi(q={self.q!r})"
        if self.kind in ("be", "be_naive"):
            return f"{self.kind}({self.weighting!r})"
        return "shannon"

    def params(self) -> dict:
        if self.kind == "renyi":
            return {"q": self.q}
        if isinstance(self.weighting, Prelec):
            return {"alpha": self.weighting.alpha, "beta": self.weighting.beta,
                    "m": self.weighting.params.conditioned_m}
        if isinstance(self.weighting, Identity):
            return {"weighting": "identity"}
        return {}


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    estimator: EstimatorSpec
    k: int
    n: int
    d: int

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValidationError(f"{self.estimator.label} estimate is not finite", "entropy")


def estimates_from_log_density(log_f: np.ndarray, spec: EstimatorSpec) -> float:
    """Reduce per-sample log densities to a single entropy value."""
    log_f = np.asarray(log_f, dtype=float)
    n = log_f.shape[0]
    if spec.kind == "shannon":
        return float(-np.mean(log_f))
    if spec.kind == "renyi":
        q = spec.q
        log_mean = logsumexp((q - 1.0) * log_f) - math.log(n)
        return float(log_mean / (1.0 - q))
    wlw = spec.weighting.weight_log_weight_of_log(log_f)
    if spec.kind == "be_naive":
        return float(np.mean(wlw))
    # importance-weighted: each term divided by f_hat
    return float(np.mean(np.exp(-log_f) * wlw))


def estimate(data, k: int, spec: EstimatorSpec, backend: Backend = "tree",
             index: NeighborIndex | None = None, workers: int = 1) -> EntropyEstimate:
    data = as_dataset(data)
    index = index if index is not None else NeighborIndex(data, backend, workers)
    log_f = log_density_from_radii(index.kth_self_distance(k), k, data.n, data.d)
    return EntropyEstimate(estimates_from_log_density(log_f, spec), spec, int(k), data.n, data.d)


def shannon_knn(data, k: int, **kw) -> EntropyEstimate:
    return estimate(data, k, EstimatorSpec.shannon(), **kw)


def renyi_knn(data, k: int, q: float, **kw) -> EntropyEstimate:
    return estimate(data, k, EstimatorSpec.renyi(q), **kw)


def be_naive(data, k: int, w: WeightingFunction, **kw) -> EntropyEstimate:
    """Unweighted plug-in ``-(1/n) sum w(f) log w(f)``; biased, the samples already follow f."""
    return estimate(data, k, EstimatorSpec.behavioral(w, corrected=False), **kw)


def be_corrected(data, k: int, w: WeightingFunction, **kw) -> EntropyEstimate:
    return estimate(data, k, EstimatorSpec.behavioral(w, corrected=True), **kw)


# -- convergence studies ------------------------------------------------------

def sqrt_schedule(n: int) -> int:
    """``k_n = ceil(sqrt n)``: grows without bound, ``k/n -> 0``, ``k/log n -> inf``."""
    return int(math.ceil(math.sqrt(n)))


@dataclass
class StudyRow:
    n: int
    k: int
    mean: float
    mae: float
    variance: float
    estimates: np.ndarray = field(repr=False)


@dataclass
class StudyReport:
    rows: list
    truth: float
    variance_slope: float
    estimator: str
    repetitions: int

    @property
    def grid(self) -> list:
        return [(r.n, r.k) for r in self.rows]

    @property
    def mae(self) -> list:
        return [r.mae for r in self.rows]

    @property
    def variance(self) -> list:
        return [r.variance for r in self.rows]

    CSV_HEADER = ("n", "k", "mean", "mae", "variance")

    def csv_rows(self):
        for r in self.rows:
            yield (r.n, r.k, r.mean, r.mae, r.variance)


def _oracle_kind(spec: EstimatorSpec):
    if spec.kind == "shannon":
        return Shannon()
    if spec.kind == "renyi":
        return Renyi(spec.q)
    w = spec.weighting
    if isinstance(w, Identity):
        return Behavioral(WeightingParams(1.0, 1.0))
    if isinstance(w, Prelec) and w.continuation == "odd":
        return Behavioral(w.params)
    return None


def loglog_slope(n: Sequence[float], y: Sequence[float]) -> float:
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        return float("nan")
    slope, _ = np.polyfit(np.log(np.asarray(n, dtype=float)), np.log(y), 1)
    return float(slope)


def study_estimates(family: DistributionSpec, specs: Sequence[EstimatorSpec], n: int, k: int,
                    repetitions: int, workers: int = 1) -> np.ndarray:
    """``(repetitions, len(specs))`` estimates; repetition ``r`` draws substream ``(n, r)``."""

    def one(r: int) -> list:
        data = sample(family, n, substream=(n, r))
        index = NeighborIndex(data, "tree")
        log_f = log_density_from_radii(index.kth_self_distance(k), k, data.n, data.d)
        return [estimates_from_log_density(log_f, s) for s in specs]

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, range(repetitions)))
    else:
        results = [one(r) for r in range(repetitions)]
    return np.asarray(results, dtype=float)


def convergence_study(family: DistributionSpec, estimator: EstimatorSpec, n_grid: Sequence[int],
                      k_schedule: Callable[[int], int] = sqrt_schedule, repetitions: int = 10,
                      seed: int = 0, workers: int = 1) -> StudyReport:
    """Monte-Carlo error and variance of an estimator over a grid of sample sizes."""
    return convergence_studies(family, [estimator], n_grid, k_schedule, repetitions, seed, workers)[0]


def convergence_studies(family: DistributionSpec, estimators: Sequence[EstimatorSpec],
                        n_grid: Sequence[int], k_schedule: Callable[[int], int] = sqrt_schedule,
                        repetitions: int = 10, seed: int = 0, workers: int = 1) -> list:
    """Several estimators evaluated on shared samples; one report per estimator."""
    n_grid = [int(n) for n in n_grid]
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValidationError("n_grid must be nonempty and strictly increasing", "entropy")
    if repetitions < 5:
        raise ValidationError(f"need at least 5 repetitions, got {repetitions}", "entropy")
    truths = []
    for spec in estimators:
        kind = _oracle_kind(spec)
        truth = analytic_entropy(family, kind) if kind is not None else None
        if truth is None:
            raise UnknownFamilyError(
                f"no analytic oracle for {type(family).__name__} with {spec.label}", "entropy")
        truths.append(truth)

    family = replace(family, seed=seed)
    rows = [[] for _ in estimators]
    for n in n_grid:
        k = int(k_schedule(n))
        if not 1 <= k < n:
            raise ValidationError(f"k schedule gave k={k} for n={n}", "entropy")
        est = study_estimates(family, estimators, n, k, repetitions, workers)
        for j, truth in enumerate(truths):
            col = est[:, j]
            rows[j].append(StudyRow(n, k, float(col.mean()), float(np.mean(np.abs(col - truth))),
                                    float(col.var(ddof=1)), col))
    return [
        StudyReport(r, t, loglog_slope([x.n for x in r], [x.variance for x in r]), s.label, repetitions)
        for r, t, s in zip(rows, truths, estimators)
    ]
