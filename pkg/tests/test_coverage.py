import itertools
import math
import warnings

import numpy as np
import pytest

from behent.coverage import CoverageCurve, coverage_curve, min_enclosing_ball, normalize_curves
from behent.errors import ValidationError


def brute_meb(points):
    """Enumerate every subset of at most d+1 points, take the smallest
    circumscribing ball (centre in the subset's affine hull) containing all."""
    m, d = points.shape
    best = (None, math.inf)
    for size in range(1, min(m, d + 1) + 1):
        for sub in itertools.combinations(range(m), size):
            s = points[list(sub)]
            base = s[0]
            edges = s[1:] - base
            if size == 1:
                centre = base
            else:
                # |c - s_i|^2 equal for all i, c = base + edges^T lam
                a = edges @ edges.T
                if abs(np.linalg.det(a)) < 1e-12:
                    continue
                lam = np.linalg.solve(2 * a, np.sum(edges ** 2, axis=1))
                centre = base + edges.T @ lam
            r = np.linalg.norm(s - centre, axis=1).max()
            if r < best[1] and np.all(np.linalg.norm(points - centre, axis=1) <= r + 1e-10):
                best = (centre, r)
    return best


class TestMinEnclosingBall:
    def test_two_points(self):
        ball = min_enclosing_ball([[0, 0], [2, 0]])
        np.testing.assert_allclose(ball.center, [1, 0])
        assert ball.radius == pytest.approx(1.0, abs=1e-15)

    def test_right_triangle(self):
        centre, radius = min_enclosing_ball([[0, 0], [2, 0], [0, 2]])
        np.testing.assert_allclose(centre, [1, 1], atol=1e-15)
        assert abs(radius - math.sqrt(2)) <= 1e-12

    def test_single_point(self):
        assert min_enclosing_ball([[3.0, 4.0, 5.0]]).radius == 0.0

    def test_obtuse_triangle_uses_diameter(self):
        ball = min_enclosing_ball([[0, 0], [4, 0], [2, 0.5]])
        np.testing.assert_allclose(ball.center, [2, 0], atol=1e-12)
        assert ball.radius == pytest.approx(2.0)

    def test_duplicates_and_collinear(self):
        pts = np.array([[0, 0], [0, 0], [1, 1], [2, 2], [2, 2], [1, 1]], dtype=float)
        ball = min_enclosing_ball(pts)
        assert ball.radius == pytest.approx(math.sqrt(2), abs=1e-12)

    @pytest.mark.parametrize("bad", [np.zeros((0, 2)), np.zeros((3, 33)), [[np.nan, 0.0]]])
    def test_invalid(self, bad):
        with pytest.raises(ValidationError):
            min_enclosing_ball(bad)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(31)
        for _ in range(60):
            m, d = int(rng.integers(1, 13)), int(rng.integers(1, 4))
            pts = rng.normal(size=(m, d))
            ball = min_enclosing_ball(pts)
            _, r = brute_meb(pts)
            assert abs(ball.radius - r) <= 1e-9

    def test_certificate(self):
        rng = np.random.default_rng(32)
        for d in (1, 2, 3, 5, 8):
            pts = rng.uniform(-1, 1, size=(2000, d))
            ball = min_enclosing_ball(pts)
            dist = np.linalg.norm(pts - ball.center, axis=1)
            assert np.all(dist <= ball.radius + 1e-9)
            assert 1 <= len(ball.support) <= d + 1 or d == 1
            assert np.all(np.abs(dist[list(ball.support)] - ball.radius) <= 1e-9)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(33)
        pts = rng.normal(size=(500, 4))
        base = min_enclosing_ball(pts)
        for _ in range(5):
            shuffled = pts[rng.permutation(len(pts))]
            ball = min_enclosing_ball(shuffled, seed=int(rng.integers(1 << 30)))
            assert abs(ball.radius - base.radius) <= 1e-9
            np.testing.assert_allclose(ball.center, base.center, atol=1e-7)

    def test_large_pool(self):
        pts = np.random.default_rng(34).normal(size=(100_000, 3))
        ball = min_enclosing_ball(pts)
        assert np.linalg.norm(pts - ball.center, axis=1).max() <= ball.radius + 1e-9


class TestCoverageCurve:
    def test_fixed_ball_constant(self):
        rng = np.random.default_rng(40)
        pts = rng.uniform(-1, 1, size=(400, 2))
        pts[:4] = [[-1, -1], [1, 1], [-1, 1], [1, -1]]
        steps = np.concatenate([np.arange(1, 5), rng.integers(1, 401, size=396)])
        curve = coverage_curve(pts, steps, samples_per_increment=50, increment=100, seed=0)
        # the corner points are forced into the first window and the first sample
        first = coverage_curve(pts[:4], steps[:4], samples_per_increment=4, increment=100)
        assert first.radii[0] == pytest.approx(math.sqrt(2))
        assert np.all(curve.radii <= math.sqrt(2) + 1e-12)
        assert np.all(np.diff(curve.radii) >= 0)

    def test_constant_when_all_points_identical_scale(self):
        pts = np.tile([[0.0, 0.0], [2.0, 0.0]], (100, 1))
        steps = np.arange(1, 201)
        curve = coverage_curve(pts, steps, samples_per_increment=20, increment=50)
        np.testing.assert_allclose(curve.radii, 1.0)
        np.testing.assert_allclose([c.normalized_radius for c in curve.checkpoints], 1.0)

    def test_jump(self):
        pts = np.array([[0.0, 0.0], [0.1, 0.0], [10.0, 0.0], [10.0, 0.1]])
        steps = np.array([1, 2, 3, 4])
        curve = coverage_curve(pts, steps, samples_per_increment=2, increment=2)
        assert curve.radii[0] == pytest.approx(0.05)
        assert curve.radii[1] >= 5.0

    def test_monotone_and_normalized(self):
        rng = np.random.default_rng(41)
        steps = np.arange(1, 5001)
        pts = rng.normal(size=(5000, 3)) * (1 + steps[:, None] / 2000)
        curve = coverage_curve(pts, steps, samples_per_increment=100, increment=500, seed=3)
        assert [c.step for c in curve.checkpoints] == list(range(500, 5001, 500))
        assert np.all(np.diff(curve.radii) >= 0)
        norm = np.array([c.normalized_radius for c in curve.checkpoints])
        assert norm.max() == 1.0 and norm.min() >= 0
        assert not any(c.truncated for c in curve.checkpoints)

    def test_short_increment_flagged(self):
        steps = np.array([1, 2, 3, 60, 61])
        pts = np.arange(10, dtype=float).reshape(5, 2)
        with pytest.warns(RuntimeWarning):
            curve = coverage_curve(pts, steps, samples_per_increment=3, increment=50)
        assert [c.truncated for c in curve.checkpoints] == [False, True]
        with pytest.raises(ValidationError):
            coverage_curve(pts, steps, samples_per_increment=3, increment=50, strict=True)

    def test_seeded(self):
        rng = np.random.default_rng(42)
        pts, steps = rng.normal(size=(3000, 2)), rng.integers(1, 3001, size=3000)
        a = coverage_curve(pts, steps, 100, 1000, seed=5)
        b = coverage_curve(pts, steps, 100, 1000, seed=5)
        assert list(a.csv_rows()) == list(b.csv_rows())

    def test_external_normalization(self):
        pts = np.array([[0.0], [1.0], [0.0], [4.0]])
        a = coverage_curve(pts[:2], np.array([1, 2]), 2, 10)
        b = coverage_curve(pts[2:], np.array([1, 2]), 2, 10)
        na, nb = normalize_curves([a, b])
        assert na.checkpoints[0].normalized_radius == pytest.approx(0.25)
        assert nb.checkpoints[0].normalized_radius == 1.0
        assert coverage_curve(pts[:2], np.array([1, 2]), 2, 10, normalize_by=2.0).checkpoints[0].normalized_radius == 0.25
        assert CoverageCurve.CSV_HEADER == ("step", "radius", "normalized_radius", "truncated_flag")
