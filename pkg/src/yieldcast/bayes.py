"""Bayesian correlated t-test with a region of practical equivalence.

Per-fold error differences between two models share training data, so
their sampling correlation is not zero; the posterior over the mean
difference is a Student-t with scale inflated by rho/(1-rho), rho being
the held-out fraction (1/n for leave-one-year-out). Integrating that
posterior over (-inf, -delta), (-delta, delta) and (delta, inf) gives
the probabilities that one model is practically smaller, equivalent or
larger in error than the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import t as student_t

from .defaults import defaults
from .errors import MisalignedFolds

_CFG = defaults()["bayes"]
ROPE_DELTA = float(_CFG["rope_delta"])
CONFIDENCE = float(_CFG["confidence"])

VERDICTS = ("Smaller", "Equivalent", "Larger", "Inconclusive")


@dataclass(frozen=True)
class PairedDiffs:
    """Per-fold differences of a statistic (model A minus model B)."""

    values: tuple[float, ...]
    rho: float

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("need at least 2 paired differences")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("differences must be finite")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Posterior:
    """Student-t posterior over the mean difference; a zero scale marks
    the degenerate point-mass case (all differences identical)."""

    location: float
    scale: float
    dof: int


@dataclass(frozen=True)
class PosteriorDecision:
    model_a: str
    model_b: str
    p_smaller: float
    p_equivalent: float
    p_larger: float
    verdict: str
    delta: float
    confidence: float


def paired_diffs(series_a: dict[int, float], series_b: dict[int, float],
                 rho: float | None = None) -> PairedDiffs:
    """Fold-aligned differences A - B keyed by year."""
    if set(series_a) != set(series_b):
        only_a = sorted(set(series_a) - set(series_b))
        only_b = sorted(set(series_b) - set(series_a))
        raise MisalignedFolds(
            f"fold years differ between models (only in A: {only_a}, "
            f"only in B: {only_b})"
        )
    years = sorted(series_a)
    values = tuple(series_a[y] - series_b[y] for y in years)
    if rho is None:
        rho = 1.0 / len(years)
    return PairedDiffs(values=values, rho=rho)


def correlated_t_posterior(d: PairedDiffs) -> Posterior:
    """Posterior over the mean difference: location mean(d), dof n-1,
    scale sd(d) * sqrt(1/n + rho/(1-rho)) with the n-1 sd denominator.
    Identical differences give a point mass at their value."""
    values = np.asarray(d.values)
    n = d.n
    location = float(values.mean())
    sd = float(values.std(ddof=1))
    if sd <= 0.0:
        return Posterior(location=location, scale=0.0, dof=n - 1)
    scale = sd * math.sqrt(1.0 / n + d.rho / (1.0 - d.rho))
    return Posterior(location=location, scale=scale, dof=n - 1)


def rope_probabilities(posterior: Posterior, delta: float = ROPE_DELTA
                       ) -> tuple[float, float, float]:
    """(P(< -delta), P(in [-delta, delta]), P(> delta)) under the posterior."""
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if posterior.scale == 0.0:
        if posterior.location < -delta:
            return 1.0, 0.0, 0.0
        if posterior.location > delta:
            return 0.0, 0.0, 1.0
        return 0.0, 1.0, 0.0
    lo = (-delta - posterior.location) / posterior.scale
    hi = (delta - posterior.location) / posterior.scale
    f_lo = float(student_t.cdf(lo, posterior.dof))
    f_hi = float(student_t.cdf(hi, posterior.dof))
    return f_lo, f_hi - f_lo, 1.0 - f_hi


def verdict(probs: tuple[float, float, float],
            confidence: float = CONFIDENCE) -> str:
    """The region holding at least ``confidence`` probability, else
    Inconclusive."""
    p_smaller, p_equivalent, p_larger = probs
    if p_smaller >= confidence:
        return "Smaller"
    if p_equivalent >= confidence:
        return "Equivalent"
    if p_larger >= confidence:
        return "Larger"
    return "Inconclusive"


def compare_pair(model_a: str, series_a: dict[int, float],
                 model_b: str, series_b: dict[int, float],
                 delta: float = ROPE_DELTA,
                 confidence: float = CONFIDENCE,
                 rho: float | None = None) -> PosteriorDecision:
    d = paired_diffs(series_a, series_b, rho)
    probs = rope_probabilities(correlated_t_posterior(d), delta)
    return PosteriorDecision(
        model_a=model_a,
        model_b=model_b,
        p_smaller=probs[0],
        p_equivalent=probs[1],
        p_larger=probs[2],
        verdict=verdict(probs, confidence),
        delta=delta,
        confidence=confidence,
    )


def comparison_matrix(best_id: str, best_series: dict[int, float],
                      rivals: list[tuple[str, dict[int, float]]],
                      delta: float = ROPE_DELTA,
                      confidence: float = CONFIDENCE,
                      rho: float | None = None) -> list[PosteriorDecision]:
    """One decision per rival: differences are rival minus best, so
    'Larger' means the rival's error is practically larger."""
    return [
        compare_pair(rid, rseries, best_id, best_series, delta, confidence, rho)
        for rid, rseries in rivals
    ]
