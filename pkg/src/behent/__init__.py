"""k-NN entropy estimators under probability weighting, intrinsic rewards
and volumetric coverage."""

from behent.coverage import Ball, CoverageCurve, coverage_curve, min_enclosing_ball
from behent.density import Dataset, NeighborIndex, knn_density
from behent.entropy import (
    EstimatorSpec,
    be_corrected,
    be_naive,
    convergence_study,
    estimate,
    renyi_knn,
    shannon_knn,
)
from behent.errors import BehentError
from behent.rewards import RewardConfig, be_reward, relabel, reward_curve
from behent.weighting import Identity, Prelec, WeightingParams, condition_beta

__version__ = "0.1.0"

__all__ = [
    "Ball", "BehentError", "CoverageCurve", "Dataset", "EstimatorSpec", "Identity",
    "NeighborIndex", "Prelec", "RewardConfig", "WeightingParams", "be_corrected",
    "be_naive", "be_reward", "condition_beta", "convergence_study", "coverage_curve",
    "estimate", "knn_density", "min_enclosing_ball", "relabel", "renyi_knn",
    "reward_curve", "shannon_knn",
]
