"""Probability weighting functions.

Prelec's family ``w(x) = exp(-beta * (-log x) ** alpha)`` and the identity
weighting. Densities may exceed one, so both are defined on ``[0, inf)``.
Above one, Prelec uses the odd-signed continuation
``exp(beta * (log x) ** alpha)``, which stays real and strictly increasing
for every ``alpha > 0``. ``continuation="strict"`` refuses such inputs
instead whenever the power would be complex.

Everything is evaluated from ``log x`` so that tiny densities do not
underflow before the final exponentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .errors import DomainError, ValidationError

Continuation = Literal["odd", "strict"]


def condition_beta(alpha: float, m: int) -> float:
    """Return ``(log m) ** (1 - alpha)``, the admissibility-preserving scale."""
    if alpha <= 0 or not math.isfinite(alpha):
        raise DomainError(f"alpha must be positive, got {alpha!r}", "weighting")
    if int(m) != m or m < 3:
        raise DomainError(f"conditioning dimension m must be an integer >= 3, got {m!r}", "weighting")
    return math.exp((1.0 - alpha) * math.log(math.log(int(m))))


@dataclass(frozen=True)
class WeightingParams:
    alpha: float
    beta: float
    conditioned_m: Optional[int] = None

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be a positive finite real, got {v!r}", "weighting")
        if self.conditioned_m is not None:
            expected = condition_beta(self.alpha, self.conditioned_m)
            if abs(expected - self.beta) > 1e-12 * max(1.0, abs(expected)):
                raise ValidationError(
                    f"beta={self.beta!r} inconsistent with conditioning at m={self.conditioned_m} "
                    f"(expected {expected!r})",
                    "weighting",
                )

    @classmethod
    def conditioned(cls, alpha: float, m: int) -> "WeightingParams":
        return cls(float(alpha), condition_beta(alpha, m), int(m))

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "m": self.conditioned_m}


def _check_nonnegative(x: np.ndarray) -> None:
    if np.any(np.isnan(x)):
        raise DomainError("weighting argument is NaN", "weighting")
    if np.any(x < 0):
        raise DomainError("weighting argument must be nonnegative", "weighting")


def _as_float_array(x):
    return np.asarray(x, dtype=float)


class WeightingFunction:
    """Interface: continuous, strictly increasing, ``w(0) = 0`` and ``w(1) = 1``.

    Subclasses implement :meth:`log_weight_of_log`; everything else derives
    from it.
    """

    def log_weight_of_log(self, log_x):
        raise NotImplementedError

    def log_weight(self, x):
        x = _as_float_array(x)
        _check_nonnegative(x)
        with np.errstate(divide="ignore"):
            log_x = np.log(x)
        return self.log_weight_of_log(log_x)

    def __call__(self, x):
        return np.exp(self.log_weight(x))

    def weight_log_weight(self, x):
        """``-w(x) log w(x)``, with value 0 where ``w(x) = 0``."""
        x = _as_float_array(x)
        _check_nonnegative(x)
        with np.errstate(divide="ignore"):
            return self.weight_log_weight_of_log(np.log(x))

    def weight_log_weight_of_log(self, log_x):
        lw = np.asarray(self.log_weight_of_log(log_x), dtype=float)
        w = np.exp(lw)
        with np.errstate(invalid="ignore"):
            out = -w * lw
        return np.where(np.isneginf(lw), 0.0, out)


class Identity(WeightingFunction):
    def log_weight_of_log(self, log_x):
        return np.asarray(log_x, dtype=float)

    def __repr__(self):
        return "Identity()"

    def __eq__(self, other):
        return isinstance(other, Identity)

    def __hash__(self):
        return hash("Identity")


class Prelec(WeightingFunction):
    def __init__(self, params: WeightingParams, continuation: Continuation = "odd"):
        if continuation not in ("odd", "strict"):
            raise ValidationError(f"unknown continuation rule {continuation!r}", "weighting")
        self.params = params
        self.continuation = continuation

    @classmethod
    def from_alpha_beta(cls, alpha: float, beta: float, **kw) -> "Prelec":
        return cls(WeightingParams(alpha, beta), **kw)

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def beta(self) -> float:
        return self.params.beta

    def _signed_power(self, t):
        # t = -log x; odd continuation: sign(t) |t|^alpha
        t = np.asarray(t, dtype=float)
        alpha = self.alpha
        if self.continuation == "strict" and np.any(t < 0) and float(alpha) != int(alpha):
            raise DomainError(
                f"Prelec weighting of x > 1 with non-integer alpha={alpha} is complex "
                "under the strict continuation rule",
                "weighting",
            )
        if self.continuation == "strict":
            with np.errstate(over="ignore"):
                return np.power(t, alpha) if float(alpha) != int(alpha) else t ** int(alpha)
        with np.errstate(over="ignore"):
            return np.sign(t) * np.power(np.abs(t), alpha)

    def log_weight_of_log(self, log_x):
        t = -np.asarray(log_x, dtype=float)
        with np.errstate(invalid="ignore"):
            out = -self.beta * self._signed_power(t)
        return out

    def weight_log_weight_of_log(self, log_x):
        # beta * p * exp(-beta * p) with p the signed power; 0 in the limit p -> inf
        p = self._signed_power(-np.asarray(log_x, dtype=float))
        bp = self.beta * p
        with np.errstate(over="ignore", invalid="ignore"):
            out = bp * np.exp(-bp)
        return np.where(np.isposinf(bp), 0.0, out)

    def __repr__(self):
        return f"Prelec(alpha={self.alpha!r}, beta={self.beta!r})"

    def __eq__(self, other):
        return (
            isinstance(other, Prelec)
            and self.params == other.params
            and self.continuation == other.continuation
        )

    def __hash__(self):
        return hash((self.params, self.continuation))


def prelec_eval(params: WeightingParams, x, continuation: Continuation = "odd"):
    """Evaluate Prelec's weighting at ``x >= 0`` (scalar or array)."""
    out = Prelec(params, continuation)(x)
    return float(out) if np.ndim(out) == 0 else out


def weight_log_weight(w: WeightingFunction, x):
    out = w.weight_log_weight(x)
    return float(out) if np.ndim(out) == 0 else out
