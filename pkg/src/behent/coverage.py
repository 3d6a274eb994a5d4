"""Volumetric coverage: radius of the minimal enclosing ball of cumulatively
subsampled dataset points.

The ball is computed with Welzl's move-to-front algorithm. Recursion only
descends when the support set grows, so its depth is at most ``d + 1``; the
scan over points is a vectorized loop and handles pools of ~1e5 points.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError
from .synth import generator

MAX_DIM = 32
# pool points closer than this (relative to the squared data scale) count as inside
_REL_TOL = 1e-13


def circumball(support: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest ball having every support point on its boundary.

    The centre lies in the affine hull of the support, ``p0 + lam @ V`` with
    ``V`` the edge vectors from ``p0``; ``lam`` solves ``2 V V^T lam = |V|^2``.
    Returns ``(centre, squared radius)``.
    """
    p0 = support[0]
    if len(support) == 1:
        return p0.copy(), 0.0
    v = support[1:] - p0
    gram = 2.0 * v @ v.T
    rhs = np.einsum("ij,ij->i", v, v)
    try:
        lam = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    centre = p0 + lam @ v
    r2 = float(np.max(np.einsum("ij,ij->i", support - centre, support - centre)))
    return centre, r2


def _mtf(points: np.ndarray, order: np.ndarray, end: int, support: list, tol: float):
    if support:
        centre, r2 = circumball(points[support])
    else:
        # empty ball: the first scanned point is always outside
        centre, r2 = np.zeros(points.shape[1]), -math.inf
    if len(support) == points.shape[1] + 1:
        return centre, r2
    i = 0
    while i < end:
        idx = order[i:end]
        diff = points[idx] - centre
        outside = np.flatnonzero(np.einsum("ij,ij->i", diff, diff) > r2 + tol)
        if outside.size == 0:
            break
        j = i + int(outside[0])
        p = int(order[j])
        centre, r2 = _mtf(points, order, j, support + [p], tol)
        order[1:j + 1] = order[:j].copy()
        order[0] = p
        i = j + 1
    return centre, r2


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float
    support: tuple = field(default=())

    def __iter__(self):
        yield self.center
        yield self.radius


def min_enclosing_ball(points, seed: int = 0) -> Ball:
    """Exact minimal enclosing ball of an ``m x d`` point set."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
        raise ValidationError(f"points must be an m x d matrix with m, d >= 1, got {pts.shape}", "coverage")
    if pts.shape[1] > MAX_DIM:
        raise ValidationError(f"dimension {pts.shape[1]} exceeds the supported maximum {MAX_DIM}", "coverage")
    if not np.isfinite(pts).all():
        raise ValidationError("points must be finite", "coverage")
    m = pts.shape[0]
    if m == 1:
        return Ball(pts[0].copy(), 0.0, (0,))
    # expected linear time needs a random insertion order
    order = generator(seed, (0xBA11,)).permutation(m)
    span = pts.max(axis=0) - pts.min(axis=0)
    tol = _REL_TOL * max(float(span @ span), 1e-300)
    centre, r2 = _mtf(pts, order, m, [], tol)
    diff = pts - centre
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    radius = float(dist.max())
    support = tuple(int(i) for i in np.flatnonzero(dist >= radius - 1e-9 * max(1.0, radius)))
    return Ball(centre, radius, support)


@dataclass(frozen=True)
class Checkpoint:
    step: int
    radius: float
    normalized_radius: float
    truncated: bool


@dataclass(frozen=True)
class CoverageCurve:
    checkpoints: tuple
    samples_per_increment: int
    increment: int
    seed: int
    normalization: float

    CSV_HEADER = ("step", "radius", "normalized_radius", "truncated_flag")

    @property
    def radii(self) -> np.ndarray:
        return np.array([c.radius for c in self.checkpoints])

    @property
    def max_radius(self) -> float:
        return float(self.radii.max()) if self.checkpoints else 0.0

    def normalized(self, base: float) -> "CoverageCurve":
        if not base > 0:
            raise ValidationError("normalization base must be positive", "coverage")
        cps = tuple(Checkpoint(c.step, c.radius, c.radius / base, c.truncated) for c in self.checkpoints)
        return CoverageCurve(cps, self.samples_per_increment, self.increment, self.seed, float(base))

    def csv_rows(self):
        for c in self.checkpoints:
            yield (c.step, c.radius, c.normalized_radius, int(c.truncated))


def coverage_curve(points, steps, samples_per_increment: int = 10_000, increment: int = 50_000,
                   seed: int = 0, normalize_by: Optional[float] = None,
                   strict: bool = False) -> CoverageCurve:
    """Minimal-enclosing-ball radius of a pool grown one step increment at a time.

    For each boundary ``T`` (multiples of ``increment``) the rows with step in
    ``(T - increment, T]`` are subsampled without replacement and appended to
    the pool; the first window also takes every step ``<= 0``. Windows with
    too few rows contribute all of them and set the checkpoint's truncated
    flag (or raise when ``strict``).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    steps = np.asarray(steps)
    if steps.shape[0] != pts.shape[0]:
        raise ValidationError("steps and points have different lengths", "coverage")
    if samples_per_increment < 1 or increment < 1:
        raise ValidationError("samples_per_increment and increment must be positive", "coverage")
    if pts.shape[0] == 0:
        raise ValidationError("coverage needs a nonempty dataset", "coverage")
    last = max(1, int(math.ceil(steps.max() / increment)))
    pool: list = []
    checkpoints = []
    radius = 0.0
    short = []
    for j in range(1, last + 1):
        hi = j * increment
        in_window = steps <= hi if j == 1 else (steps > hi - increment) & (steps <= hi)
        rows = np.flatnonzero(in_window)
        truncated = rows.size < samples_per_increment
        if truncated:
            if strict:
                raise ValidationError(
                    f"increment ending at step {hi} has {rows.size} rows, "
                    f"fewer than {samples_per_increment}", "coverage")
            short.append(hi)
            chosen = rows
        else:
            chosen = np.sort(generator(seed, (j,)).choice(rows, samples_per_increment, replace=False))
        pool.append(chosen)
        picked = np.concatenate(pool)
        if picked.size:
            radius = max(radius, min_enclosing_ball(pts[picked], seed=seed).radius)
        checkpoints.append(Checkpoint(hi, radius, float("nan"), bool(truncated)))
    if short:
        warnings.warn(f"{len(short)} increment(s) had fewer than {samples_per_increment} rows; "
                      "all of their rows were used", RuntimeWarning, stacklevel=2)
    curve = CoverageCurve(tuple(checkpoints), samples_per_increment, increment, seed, float("nan"))
    base = normalize_by if normalize_by is not None else curve.max_radius
    return curve.normalized(base) if base > 0 else \
        CoverageCurve(tuple(Checkpoint(c.step, c.radius, 0.0, c.truncated) for c in checkpoints),
                      samples_per_increment, increment, seed, 0.0)


def normalize_curves(curves: Sequence[CoverageCurve]) -> list:
    """Normalize several curves by the largest radius reached by any of them."""
    base = max(c.max_radius for c in curves)
    return [c.normalized(base) for c in curves]
