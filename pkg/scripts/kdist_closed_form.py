"""Closed-form reference values for the k-sampling distributions.

Independent of the package: everything here is computed straight from the
scipy CDFs, so the numbers can be frozen into tests as oracles for the
sampler implementation.

Conventions checked (k_max = 10):
  * continuous families draw x, resample while offset > k_max
    (offset = x, except pareto where offset = x - m),
    then k = clamp(k_max - floor(offset), 1, k_max)
  * Mix<=5 = P(k <= 5) = P(floor(offset) >= 5 | offset <= k_max)
  * negative logistic offsets are kept (clamp sends them to k = k_max)

Run: python scripts/kdist_closed_form.py
"""

from __future__ import annotations

import math

from scipy import stats

K_MAX = 10


def conditional_mix_le5(cdf, lower_support: float = -math.inf) -> float:
    """P(k <= 5) given resampling to offset <= K_MAX; k<=5 iff offset >= 5."""
    accept = cdf(K_MAX) - cdf(lower_support) if lower_support > -math.inf else cdf(K_MAX)
    return (cdf(K_MAX) - cdf(5.0)) / accept


def conditional_mean_k(cdf) -> float:
    """E[k] with k = clamp(K_MAX - floor(offset), 1, K_MAX), offset <= K_MAX."""
    accept = cdf(K_MAX)
    # floor(offset) = sum_{t>=1} 1{offset >= t}; negative offsets contribute 0
    # to the clamped k only through k = K_MAX, handled by clamping below.
    e_floor = sum((cdf(K_MAX) - cdf(float(t))) / accept for t in range(1, K_MAX))
    # clamp: k in {1..K_MAX}; floor can be K_MAX only at offset == K_MAX (measure 0)
    mean = K_MAX - e_floor
    # negative offsets give floor <= -1 -> k > K_MAX -> clamped to K_MAX;
    # correct the overshoot: E[extra] = sum_{t<=-1} P(offset < t+1)
    # (only logistic has negative support here; handled by caller flag)
    return mean


def mean_k_with_negatives(cdf) -> float:
    accept = cdf(K_MAX)
    # E[clamp(10 - floor(x), 1, 10)] over x <= 10
    # = sum over integer bins
    total = 0.0
    # bins for floor(x) = j, j from very negative to 9; clamp(10 - j) = min(10, 10 - j)
    for j in range(-60, K_MAX):
        p = (cdf(float(j + 1)) - cdf(float(j))) / accept
        total += min(K_MAX, K_MAX - j) * p
    return total


def main() -> None:
    rows = []

    # exponential(lambda=1): cdf(x) = 1 - exp(-x)
    exp_cdf = stats.expon(scale=1.0).cdf
    rows.append(("exponential lam=1", conditional_mix_le5(exp_cdf), conditional_mean_k(exp_cdf)))

    # lognormal mu=0: scipy lognorm(s=sigma)
    for sigma in (1.0, 1.1, 1.25):
        cdf = stats.lognorm(s=sigma).cdf
        rows.append((f"lognormal mu=0 sigma={sigma}", conditional_mix_le5(cdf), conditional_mean_k(cdf)))

    # logistic mu=0 s=2
    logi_cdf = stats.logistic(loc=0.0, scale=2.0).cdf
    rows.append(("logistic mu=0 s=2", conditional_mix_le5(logi_cdf), mean_k_with_negatives(logi_cdf)))

    # pareto m=1 alpha=1: offset = x - 1 ~ Lomax(alpha=1); cdf(t) = 1 - 1/(1+t)
    par_cdf = stats.lomax(c=1.0).cdf
    rows.append(("pareto m=1 alpha=1", conditional_mix_le5(par_cdf), conditional_mean_k(par_cdf)))

    # uniform over {1..10}
    rows.append(("uniform k_max=10", 5.0 / 10.0, 5.5))
    rows.append(("fix k_max=10", 0.0, 10.0))

    print(f"{'family':<28} {'Mix<=5':>10} {'E[k]':>8}")
    for name, mix, mean in rows:
        print(f"{name:<28} {mix:>10.6f} {mean:>8.4f}")

    print()
    print("exact pareto Mix<=5 as fraction: 1/12 =", 1.0 / 12.0)
    e5, e10 = math.exp(-5.0), math.exp(-10.0)
    print("exact exponential Mix<=5: (e^-5 - e^-10)/(1 - e^-10) =", (e5 - e10) / (1.0 - e10))


if __name__ == "__main__":
    main()
