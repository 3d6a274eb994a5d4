"""Sample containers, Euclidean k-NN search and the k-NN density estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import gammaln

from .errors import DegenerateSampleError, ValidationError

Backend = Literal["tree", "brute"]
BACKENDS = ("tree", "brute")

# rows per block in the brute-force pass; bounds memory at block * n * d floats
_BRUTE_BLOCK = 256


def _optional_column(values, n: int, name: str, dtype) -> Optional[np.ndarray]:
    if values is None:
        return None
    arr = np.asarray(values, dtype=dtype)
    if arr.shape[0] != n:
        raise ValidationError(f"{name} has {arr.shape[0]} rows, expected {n}", "density")
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ``n x d`` matrix of finite sample points plus optional per-row metadata."""

    points: np.ndarray
    actions: Optional[np.ndarray] = None
    episode: Optional[np.ndarray] = None
    step: Optional[np.ndarray] = None
    reward: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise ValidationError(f"points must be an n x d matrix, got shape {pts.shape}", "density")
        if pts.shape[0] < 2:
            raise ValidationError(f"a dataset needs at least 2 points, got {pts.shape[0]}", "density")
        bad = ~np.isfinite(pts).all(axis=1)
        if bad.any():
            rows = np.flatnonzero(bad)
            raise ValidationError(f"non-finite values in rows {rows[:10].tolist()}", "density")
        pts = pts.copy()
        pts.setflags(write=False)
        n = pts.shape[0]
        object.__setattr__(self, "points", pts)
        actions = _optional_column(self.actions, n, "actions", float)
        if actions is not None and actions.ndim == 1:
            actions = actions[:, None]
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "episode", _optional_column(self.episode, n, "episode", np.int64))
        object.__setattr__(self, "step", _optional_column(self.step, n, "step", np.int64))
        object.__setattr__(self, "reward", _optional_column(self.reward, n, "reward", float))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n


def as_dataset(data) -> Dataset:
    return data if isinstance(data, Dataset) else Dataset(np.asarray(data, dtype=float))


class NeighborIndex:
    """Read-only Euclidean k-NN index over a :class:`Dataset`.

    ``tree`` wraps a bulk-built k-d tree; ``brute`` computes exact pairwise
    distances block by block. Both return the same distances.
    """

    def __init__(self, data: Dataset, backend: Backend = "tree", workers: int = 1):
        if backend not in BACKENDS:
            raise ValidationError(f"unknown backend {backend!r}; choose from {BACKENDS}", "density")
        self.source = data
        self.backend = backend
        self.workers = workers
        self._tree = cKDTree(data.points, leafsize=16, balanced_tree=True, compact_nodes=True) \
            if backend == "tree" else None

    @property
    def n(self) -> int:
        return self.source.n

    def _check_k(self, k: int, limit: int) -> None:
        if int(k) != k or k < 1 or k > limit:
            raise ValidationError(f"k must be an integer in [1, {limit}], got {k!r}", "density")

    def knn_distance(self, query, k: int, exclude_self: bool = False) -> float:
        """Distance from ``query`` to its k-th nearest dataset point.

        With ``exclude_self`` the query must coincide with a dataset member,
        and exactly one coincident copy is skipped.
        """
        q = np.asarray(query, dtype=float).reshape(-1)
        if q.shape[0] != self.source.d:
            raise ValidationError(f"query has dimension {q.shape[0]}, index has {self.source.d}", "density")
        self._check_k(k, self.n - 1 if exclude_self else self.n)
        kk = k + 1 if exclude_self else k
        dist = self._query_points(q[None, :], kk)[0]
        if exclude_self:
            if dist[0] != 0.0:
                raise ValidationError("exclude_self requires the query to be a dataset member", "density")
            dist = dist[1:]
        return float(dist[k - 1])

    def self_distances(self, k: int) -> np.ndarray:
        """``(n, k)`` sorted distances from every member to its k nearest others."""
        self._check_k(k, self.n - 1)
        if self._tree is not None:
            dist, _ = self._tree.query(self.source.points, k=k + 1, workers=self.workers)
            # column 0 is the point itself (or a coincident copy, also at distance 0)
            return np.ascontiguousarray(dist[:, 1:])
        return self._brute(self.source.points, k, exclude_rows=True)

    def kth_self_distance(self, k: int) -> np.ndarray:
        return self.self_distances(k)[:, k - 1]

    def _query_points(self, queries: np.ndarray, k: int) -> np.ndarray:
        if self._tree is not None:
            dist, _ = self._tree.query(queries, k=k, workers=self.workers)
            return np.asarray(dist).reshape(len(queries), k)
        return self._brute(queries, k, exclude_rows=False)

    def _brute(self, queries: np.ndarray, k: int, exclude_rows: bool) -> np.ndarray:
        pts = self.source.points
        out = np.empty((len(queries), k))
        for start in range(0, len(queries), _BRUTE_BLOCK):
            block = queries[start:start + _BRUTE_BLOCK]
            diff = block[:, None, :] - pts[None, :, :]
            dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
            if exclude_rows:
                rows = np.arange(len(block))
                dist[rows, start + rows] = np.inf
            part = np.partition(dist, k - 1, axis=1)[:, :k]
            out[start:start + len(block)] = np.sort(part, axis=1)
        return out


def build_index(data, backend: Backend = "tree", workers: int = 1) -> NeighborIndex:
    return NeighborIndex(as_dataset(data), backend, workers)


def knn_distance(index: NeighborIndex, query, k: int, exclude_self: bool = False) -> float:
    return index.knn_distance(query, k, exclude_self)


def log_unit_ball_volume(d: int) -> float:
    return 0.5 * d * math.log(math.pi) - float(gammaln(0.5 * d + 1.0))


@dataclass(frozen=True)
class DensityEstimate:
    values: np.ndarray
    log_values: np.ndarray = field(repr=False)
    k: int
    n: int
    d: int


def log_density_from_radii(radii: np.ndarray, k: int, n: int, d: int) -> np.ndarray:
    """``log f_hat = log k - log n - log V_d - d log R`` for each radius."""
    radii = np.asarray(radii, dtype=float)
    zero = np.flatnonzero(radii <= 0.0)
    if zero.size:
        raise DegenerateSampleError(
            f"{zero.size} point(s) have zero distance to their {k}-th neighbour "
            f"(coincident samples), e.g. indices {zero[:10].tolist()}",
            indices=zero,
        )
    log_coef = math.log(k) - math.log(n) - log_unit_ball_volume(d)
    return log_coef - d * np.log(radii)


def knn_density(data, k: int, backend: Backend = "tree", index: NeighborIndex | None = None,
                workers: int = 1) -> DensityEstimate:
    """k-NN density at every sample point, self excluded from its neighbours."""
    data = as_dataset(data)
    index = index if index is not None else NeighborIndex(data, backend, workers)
    radii = index.kth_self_distance(k)
    log_f = log_density_from_radii(radii, k, data.n, data.d)
    return DensityEstimate(np.exp(log_f), log_f, int(k), data.n, data.d)
