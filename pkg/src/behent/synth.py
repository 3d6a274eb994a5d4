"""Seeded samplers for distributions whose entropies are known in closed form.

Random streams come from the counter-based Philox generator keyed by
``(seed, *substream)``, so repetition ``r`` of a study always sees the same
draws no matter how work is scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate, stats

from .density import Dataset
from .errors import ValidationError
from .weighting import WeightingParams


def generator(seed: int, substream: Sequence[int] = ()) -> np.random.Generator:
    key = np.random.SeedSequence([int(seed), *[int(s) for s in substream]])
    return np.random.Generator(np.random.Philox(key))


def _vector(x, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or not np.isfinite(arr).all():
        raise ValidationError(f"{name} must be a finite vector", "synth")
    return arr


@dataclass(frozen=True, eq=False)
class UniformBox:
    lo: np.ndarray
    hi: np.ndarray
    seed: int = 0

    def __post_init__(self):
        lo, hi = _vector(self.lo, "lo"), _vector(self.hi, "hi")
        if lo.shape != hi.shape or not np.all(lo < hi):
            raise ValidationError("UniformBox needs lo < hi componentwise", "synth")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def unit(cls, dim: int = 1, side: float = 1.0, seed: int = 0) -> "UniformBox":
        return cls(np.zeros(dim), np.full(dim, float(side)), seed)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * rng.random((n, self.dim))


@dataclass(frozen=True, eq=False)
class Gaussian:
    """Isotropic normal ``N(mean, sigma^2 I)``."""

    mean: np.ndarray
    sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mean", _vector(self.mean, "mean"))
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValidationError("sigma must be positive", "synth")

    @classmethod
    def standard(cls, dim: int = 1, seed: int = 0) -> "Gaussian":
        return cls(np.zeros(dim), 1.0, seed)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def draw(self, rng, n):
        return self.mean + self.sigma * rng.standard_normal((n, self.dim))


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    components: tuple  # of (weight, mean, sigma)
    seed: int = 0

    def __post_init__(self):
        comps = []
        for weight, mean, sigma in self.components:
            if not weight > 0 or not sigma > 0:
                raise ValidationError("mixture weights and sigmas must be positive", "synth")
            comps.append((float(weight), _vector(mean, "mean"), float(sigma)))
        if not comps:
            raise ValidationError("mixture needs at least one component", "synth")
        if abs(sum(c[0] for c in comps) - 1.0) > 1e-12:
            raise ValidationError("mixture weights must sum to 1", "synth")
        if len({c[1].shape for c in comps}) != 1:
            raise ValidationError("mixture component means differ in dimension", "synth")
        object.__setattr__(self, "components", tuple(comps))

    @property
    def dim(self) -> int:
        return self.components[0][1].shape[0]

    def draw(self, rng, n):
        weights = np.array([c[0] for c in self.components])
        labels = rng.choice(len(weights), size=n, p=weights / weights.sum())
        noise = rng.standard_normal((n, self.dim))
        means = np.stack([c[1] for c in self.components])[labels]
        sigmas = np.array([c[2] for c in self.components])[labels]
        return means + sigmas[:, None] * noise


@dataclass(frozen=True, eq=False)
class TruncatedGaussian:
    """Isotropic normal restricted to the box ``[lo, hi]``."""

    lo: np.ndarray
    hi: np.ndarray
    mean: np.ndarray
    sigma: float
    seed: int = 0

    def __post_init__(self):
        lo, hi, mean = _vector(self.lo, "lo"), _vector(self.hi, "hi"), _vector(self.mean, "mean")
        if not (lo.shape == hi.shape == mean.shape) or not np.all(lo < hi):
            raise ValidationError("TruncatedGaussian needs matching shapes and lo < hi", "synth")
        if not self.sigma > 0:
            raise ValidationError("sigma must be positive", "synth")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "mean", mean)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    def draw(self, rng, n):
        a = (self.lo - self.mean) / self.sigma
        b = (self.hi - self.mean) / self.sigma
        u = rng.random((n, self.dim))
        z = stats.truncnorm.ppf(u, a, b)
        return self.mean + self.sigma * z


DistributionSpec = Union[UniformBox, Gaussian, GaussianMixture, TruncatedGaussian]


def sample(spec: DistributionSpec, n: int, substream: Sequence[int] = ()) -> Dataset:
    """Draw ``n`` i.i.d. points; deterministic in ``(spec.seed, substream)``."""
    if int(n) != n or n < 2:
        raise ValidationError(f"n must be an integer >= 2, got {n!r}", "synth")
    rng = generator(spec.seed, substream)
    return Dataset(spec.draw(rng, int(n)))


# -- analytic entropies -------------------------------------------------------

@dataclass(frozen=True)
class Shannon:
    pass


@dataclass(frozen=True)
class Renyi:
    q: float

    def __post_init__(self):
        if not (self.q > 0) or self.q == 1:
            raise ValidationError(f"Renyi order q must be > 0 and != 1, got {self.q!r}", "synth")


@dataclass(frozen=True)
class Behavioral:
    params: WeightingParams


EntropyKind = Union[Shannon, Renyi, Behavioral]

# the tail beyond this many sigma is integrated as a separate infinite piece;
# for small alpha the integrand only decays like exp(-c |x|), so it cannot be dropped
GAUSS_QUAD_SPLIT = 10.0
GAUSS_QUAD_EPSABS = 1e-9


def be_analytic_uniform(volume: float, params: WeightingParams) -> float:
    """Behavioral entropy of the uniform density on a set of measure ``volume``.

    ``V * beta * s * exp(-beta * s)`` with ``s = sign(log V) |log V|^alpha``;
    for ``V < 1`` the density exceeds one and the signed continuation applies.
    """
    if not (volume > 0 and math.isfinite(volume)):
        raise ValidationError(f"volume must be positive, got {volume!r}", "synth")
    log_v = math.log(volume)
    if log_v == 0.0:
        return 0.0
    s = math.copysign(abs(log_v) ** params.alpha, log_v)
    return volume * params.beta * s * math.exp(-params.beta * s)


def gaussian_be_quadrature(params: WeightingParams, sigma: float = 1.0,
                           epsabs: float = GAUSS_QUAD_EPSABS) -> float:
    """Behavioral entropy of ``N(0, sigma^2)`` on the line by adaptive quadrature."""
    alpha, beta = params.alpha, params.beta
    log_norm = 0.5 * math.log(2.0 * math.pi * sigma * sigma)

    def integrand(x):
        t = 0.5 * (x / sigma) ** 2 + log_norm  # -log f(x)
        s = math.copysign(abs(t) ** alpha, t)
        return beta * s * math.exp(-beta * s)

    # symmetric about the mean; the cusp of |t|^alpha (sigma small enough that
    # f exceeds one) is handled by the adaptive subdivision
    split = GAUSS_QUAD_SPLIT * sigma
    core, _ = integrate.quad(integrand, 0.0, split, epsabs=epsabs / 4, epsrel=0.0, limit=500)
    tail, _ = integrate.quad(integrand, split, math.inf, epsabs=epsabs / 4, epsrel=0.0, limit=500)
    return 2.0 * (core + tail)


def analytic_entropy(spec: DistributionSpec, which: EntropyKind) -> Optional[float]:
    """Closed-form (or quadrature) entropy in nats, ``None`` when unavailable."""
    if isinstance(spec, UniformBox):
        log_v = math.log(spec.volume)
        if isinstance(which, (Shannon, Renyi)):
            return log_v
        if isinstance(which, Behavioral):
            return be_analytic_uniform(spec.volume, which.params)
    elif isinstance(spec, Gaussian):
        d, s2 = spec.dim, spec.sigma ** 2
        if isinstance(which, Shannon):
            return 0.5 * d * math.log(2.0 * math.pi * math.e * s2)
        if isinstance(which, Renyi):
            q = which.q
            return 0.5 * d * math.log(2.0 * math.pi * s2) + d * math.log(q) / (2.0 * (q - 1.0))
        if isinstance(which, Behavioral) and d == 1:
            return gaussian_be_quadrature(which.params, spec.sigma)
    return None

