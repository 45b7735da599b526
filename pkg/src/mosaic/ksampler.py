"""Sampling the per-sample member count k.

Continuous families draw an offset x (x - m for pareto), resample while the
offset exceeds k_max, then set k = clamp(k_max - floor(offset), 1, k_max).
Negative logistic offsets therefore land on k = k_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

from .errors import ConfigError
from .rng import SeededRng

if TYPE_CHECKING:  # pragma: no cover
    from .engine import MosaicSample

FAMILIES = ("fix", "uniform", "exponential", "lognormal", "logistic", "pareto")


@dataclass(frozen=True)
class KDistribution:
    """Distribution of the member count, with the k_max resample/clamp policy.

    The lognormal sigma default (1.25) keeps the small-k share (Mix<=5) in
    the 5-20% regime; sigma=1 would put it below 5%.
    """

    family: str = "uniform"
    k_max: int = 10
    lam: float = 1.0       # exponential rate
    mu: float = 0.0        # lognormal / logistic location
    sigma: float = 1.25    # lognormal shape
    s: float = 2.0         # logistic scale
    m: float = 1.0         # pareto minimum
    alpha: float = 1.0     # pareto shape

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown k family {self.family!r}; expected one of {FAMILIES}")
        if self.k_max < 1:
            raise ConfigError(f"k_max must be >= 1, got {self.k_max}")
        for name in ("lam", "sigma", "s", "m", "alpha"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"k_distribution parameter {name} must be > 0")


def _draw_offset(dist: KDistribution, rng: SeededRng) -> float:
    family = dist.family
    if family == "exponential":
        return -math.log(1.0 - rng.random()) / dist.lam
    if family == "lognormal":
        return math.exp(dist.mu + dist.sigma * rng.gauss01())
    if family == "logistic":
        u = rng.random()
        while u <= 0.0:
            u = rng.random()
        return dist.mu + dist.s * math.log(u / (1.0 - u))
    if family == "pareto":
        x = dist.m * (1.0 - rng.random()) ** (-1.0 / dist.alpha)
        return x - dist.m
    raise ConfigError(f"family {family!r} has no continuous offset")


def draw_k(dist: KDistribution, rng: SeededRng) -> int:
    """One member count in [1, k_max]."""
    if dist.family == "fix":
        return dist.k_max
    if dist.family == "uniform":
        return rng.randint(1, dist.k_max)
    while True:
        offset = _draw_offset(dist, rng)
        if offset <= dist.k_max:
            break
    return max(1, min(dist.k_max, dist.k_max - math.floor(offset)))


@dataclass
class KSummary:
    histogram: dict[int, int]
    total: int
    fraction_k_le_5: float


def summarize_ks(ks: Iterable[int]) -> KSummary:
    histogram: dict[int, int] = {}
    total = 0
    le5 = 0
    for k in ks:
        histogram[k] = histogram.get(k, 0) + 1
        total += 1
        if k <= 5:
            le5 += 1
    if total == 0:
        raise ConfigError("cannot summarize an empty k sequence")
    return KSummary(histogram=dict(sorted(histogram.items())), total=total,
                    fraction_k_le_5=le5 / total)


def summarize_k(samples: list["MosaicSample"]) -> KSummary:
    """Exact k histogram and the Mix<=5 fraction of a sample list."""
    return summarize_ks(s.k for s in samples)
