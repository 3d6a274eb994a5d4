"""Intrinsic rewards whose long-run average tracks the behavioral entropy of the
state occupancy measure, plus a Shannon baseline and dataset relabeling.

The exposed reward is the stabilized particle form

    r(R) = R * exp(-beta * L**alpha) * L**alpha,   L = log(R + c),

with ``R`` the k-NN distance of a state. Requiring ``c >= 1`` keeps ``L >= 0``
so the reward is real and nonnegative for any ``alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .density import Backend, NeighborIndex, as_dataset
from .errors import ValidationError
from .weighting import WeightingParams, condition_beta

Objective = Literal["behavioral", "shannon"]

DEFAULT_K = 12
DEFAULT_C = 1.0
DEFAULT_M = 512
DEFAULT_ALPHAS = (0.2, 0.5, 0.7, 0.9, 1.5, 2.0, 3.0, 5.0)


@dataclass(frozen=True)
class RewardConfig:
    weighting: WeightingParams = WeightingParams(1.0, 1.0)
    k: int = DEFAULT_K
    c: float = DEFAULT_C
    objective: Objective = "behavioral"
    average_top_k: bool = True

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValidationError(f"k must be a positive integer, got {self.k!r}", "rewards")
        if not (math.isfinite(self.c) and self.c >= 1.0):
            raise ValidationError(f"c must be >= 1 so that log(R + c) >= 0, got {self.c!r}", "rewards")
        if self.objective == "renyi":
            raise ValidationError(
                "objective 'renyi' is not supported: only behavioral and shannon rewards are defined",
                "rewards")
        if self.objective not in ("behavioral", "shannon"):
            raise ValidationError(f"unknown objective {self.objective!r}", "rewards")


@dataclass
class TransitionRecord:
    state: np.ndarray
    action: Optional[np.ndarray]
    reward: float
    episode: Optional[int] = None
    step: Optional[int] = None


def _distances(distance) -> np.ndarray:
    r = np.asarray(distance, dtype=float)
    if np.any(np.isnan(r)) or np.any(r < 0):
        raise ValidationError("distances must be nonnegative", "rewards")
    return r


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def be_reward(distance, cfg: RewardConfig):
    """Behavioral-entropy reward for one or many k-NN distances."""
    r = _distances(distance)
    alpha, beta = cfg.weighting.alpha, cfg.weighting.beta
    la = np.power(np.log(r + cfg.c), alpha)
    with np.errstate(invalid="ignore"):
        out = r * np.exp(-beta * la) * la
    # R -> inf: the exp factor wins for every beta > 0
    out = np.where(np.isinf(r), 0.0, out)
    return _scalar_or_array(out)


def shannon_baseline_reward(distance, c: float = DEFAULT_C):
    if not c >= 1.0:
        raise ValidationError(f"c must be >= 1, got {c!r}", "rewards")
    return _scalar_or_array(np.log(_distances(distance) + c))


def neighbor_radius(index: NeighborIndex, k: int, average_top_k: bool) -> np.ndarray:
    dist = index.self_distances(k)
    return dist.mean(axis=1) if average_top_k else dist[:, k - 1]


def reward_values(data, cfg: RewardConfig, backend: Backend = "tree",
                  index: NeighborIndex | None = None, workers: int = 1) -> np.ndarray:
    data = as_dataset(data)
    index = index if index is not None else NeighborIndex(data, backend, workers)
    radius = neighbor_radius(index, cfg.k, cfg.average_top_k)
    if cfg.objective == "shannon":
        return np.asarray(shannon_baseline_reward(radius, cfg.c), dtype=float).reshape(-1)
    return np.asarray(be_reward(radius, cfg), dtype=float).reshape(-1)


def relabel(data, cfg: RewardConfig, backend: Backend = "tree", workers: int = 1) -> list:
    """One :class:`TransitionRecord` per row, in input order, with fresh rewards."""
    data = as_dataset(data)
    rewards = reward_values(data, cfg, backend, workers=workers)
    records = []
    for i in range(data.n):
        records.append(TransitionRecord(
            state=data.points[i],
            action=None if data.actions is None else data.actions[i],
            reward=float(rewards[i]),
            episode=None if data.episode is None else int(data.episode[i]),
            step=None if data.step is None else int(data.step[i]),
        ))
    return records


def offset_constant(k: int, n: int, d: int) -> float:
    """``log(n pi^{d/2} / (k Gamma(d/2 + 1)))``, the additive term dropped from the reward."""
    return math.log(n) + 0.5 * d * math.log(math.pi) - math.log(k) - float(gammaln(0.5 * d + 1.0))


def exact_reward(distance, params: WeightingParams, k: int, n: int, d: int) -> np.ndarray:
    """Per-sample reward before dropping the offset and fixing ``d = 1``.

    Keeps the data dimension, the additive offset and the full volume
    coefficient, so that the sample mean equals the importance-corrected
    behavioral entropy estimate. Only used to check that link.
    """
    r = _distances(distance)
    if np.any(r == 0):
        raise ValidationError("exact-mode rewards need strictly positive distances", "rewards")
    coef = n * math.pi ** (0.5 * d) / (k * math.exp(gammaln(0.5 * d + 1.0)))
    u = d * np.log(r) + offset_constant(k, n, d)
    s = np.sign(u) * np.abs(u) ** params.alpha
    return params.beta * coef * r ** d * np.exp(-params.beta * s) * s


@dataclass(frozen=True)
class CurveRow:
    alpha: float
    R: float
    reward: float
    shannon: float


CURVE_HEADER = ("alpha", "R", "reward", "shannon")


def reward_curve(cfg_list: Sequence[RewardConfig], r_grid: Sequence[float]) -> list:
    """Reward as a function of distance for each config, with the Shannon baseline alongside."""
    if not cfg_list or len(r_grid) == 0:
        raise ValidationError("reward_curve needs at least one config and one distance", "rewards")
    r = _distances(np.asarray(r_grid, dtype=float).reshape(-1))
    rows = []
    for cfg in cfg_list:
        be = np.asarray(be_reward(r, cfg)).reshape(-1)
        se = np.asarray(shannon_baseline_reward(r, cfg.c)).reshape(-1)
        rows.extend(CurveRow(cfg.weighting.alpha, float(ri), float(b), float(s))
                    for ri, b, s in zip(r, be, se))
    return rows


def curve_configs(alphas: Sequence[float] = DEFAULT_ALPHAS, m: int = DEFAULT_M,
                  c: float = DEFAULT_C) -> list:
    return [RewardConfig(WeightingParams(float(a), condition_beta(a, m), m), c=c) for a in alphas]
