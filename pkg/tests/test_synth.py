import math

import numpy as np
import pytest
from scipy import stats

from behent.errors import ValidationError
from behent.synth import (
    Behavioral,
    Gaussian,
    GaussianMixture,
    Renyi,
    Shannon,
    TruncatedGaussian,
    UniformBox,
    analytic_entropy,
    gaussian_be_quadrature,
    sample,
)
from behent.weighting import WeightingParams


class TestSample:
    def test_uniform_mean(self):
        x = sample(UniformBox([0.0], [1.0], seed=3), 10_000).points
        assert abs(x.mean() - 0.5) < 0.02

    def test_gaussian_variance(self):
        x = sample(Gaussian.standard(1, seed=3), 10_000).points
        assert abs(x.var(ddof=1) - 1.0) < 0.06

    def test_deterministic(self):
        spec = Gaussian.standard(3, seed=17)
        np.testing.assert_array_equal(sample(spec, 500).points, sample(spec, 500).points)

    def test_substreams_differ(self):
        spec = UniformBox.unit(2, seed=1)
        a, b = sample(spec, 100, (0,)).points, sample(spec, 100, (1,)).points
        assert not np.allclose(a, b)
        np.testing.assert_array_equal(a, sample(spec, 100, (0,)).points)

    @pytest.mark.parametrize("seed", range(4))
    def test_uniform_ks(self, seed):
        x = sample(UniformBox([0.0], [1.0], seed=seed), 10_000).points[:, 0]
        # 1% critical value of the one-sample KS statistic
        assert stats.kstest(x, "uniform").statistic < 1.628 / math.sqrt(len(x))

    def test_truncated_within_box(self):
        spec = TruncatedGaussian([0, 0], [1, 1], [0.5, 0.5], 0.1, seed=2)
        x = sample(spec, 5000).points
        assert x.min() >= 0 and x.max() <= 1
        assert abs(x.std() - 0.1) < 0.01

    def test_mixture(self):
        spec = GaussianMixture(((0.25, [-5.0], 1.0), (0.75, [5.0], 1.0)), seed=4)
        x = sample(spec, 20_000).points[:, 0]
        assert abs((x > 0).mean() - 0.75) < 0.02

    @pytest.mark.parametrize("bad", [
        lambda: UniformBox([1.0], [0.0]),
        lambda: Gaussian([0.0], -1.0),
        lambda: GaussianMixture(((0.5, [0.0], 1.0), (0.4, [1.0], 1.0))),
        lambda: sample(UniformBox.unit(1), 1),
    ])
    def test_invalid(self, bad):
        with pytest.raises(ValidationError):
            bad()


class TestAnalytic:
    def test_gaussian_shannon(self):
        assert analytic_entropy(Gaussian.standard(1), Shannon()) == pytest.approx(1.4189385332046727, rel=1e-15)

    def test_gaussian_renyi(self):
        assert analytic_entropy(Gaussian.standard(1), Renyi(2.0)) == pytest.approx(1.2655121234846454, rel=1e-15)
        assert analytic_entropy(Gaussian.standard(1), Renyi(0.5)) == pytest.approx(1.612085713764618, rel=1e-15)

    def test_multivariate_gaussian_scales_with_dim(self):
        g3 = analytic_entropy(Gaussian(np.zeros(3), 2.0), Shannon())
        assert g3 == pytest.approx(1.5 * math.log(2 * math.pi * math.e * 4.0))

    def test_uniform(self):
        spec = UniformBox([0, 0], [2, 3])
        assert analytic_entropy(spec, Shannon()) == pytest.approx(math.log(6))
        assert analytic_entropy(spec, Renyi(3.0)) == pytest.approx(math.log(6))
        assert analytic_entropy(UniformBox.unit(3), Behavioral(WeightingParams(0.4, 2.0))) == 0.0

    def test_unavailable(self):
        mix = GaussianMixture(((1.0, [0.0], 1.0),))
        assert analytic_entropy(mix, Shannon()) is None
        assert analytic_entropy(Gaussian.standard(2), Behavioral(WeightingParams(0.5, 1.0))) is None

    def test_quadrature_narrow_gaussian(self):
        # sigma small enough that f > 1 near the mean: signed continuation
        p = WeightingParams(1.0, 1.0)
        value = gaussian_be_quadrature(p, sigma=0.05)
        assert value == pytest.approx(0.5 * math.log(2 * math.pi * math.e * 0.05 ** 2), abs=1e-6)

    def test_quadrature_identity_is_shannon(self):
        value = analytic_entropy(Gaussian.standard(1), Behavioral(WeightingParams(1.0, 1.0)))
        assert value == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-6)

    # 30-digit mpmath quadrature over the whole line
    @pytest.mark.parametrize("alpha,expected", [
        (0.2, 0.276710837509636), (0.5, 0.687592013636713), (2.0, 1.36675000995255), (5.0, 0.643898064878055),
    ])
    def test_quadrature_matches_mpmath(self, alpha, expected):
        value = gaussian_be_quadrature(WeightingParams.conditioned(alpha, 512))
        assert value == pytest.approx(expected, abs=1e-8)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 2.0, 5.0])
    def test_quadrature_converged(self, alpha):
        p = WeightingParams.conditioned(alpha, 512)
        assert abs(gaussian_be_quadrature(p, epsabs=1e-9) - gaussian_be_quadrature(p, epsabs=5e-10)) < 1e-6
