"""Wilson intervals and z-scores for empirical-vs-predicted comparisons."""

from __future__ import annotations

import math

WILSON_Z = 1.96


def wilson_interval(count: int, total: int, z: float = WILSON_Z) -> tuple[float, float]:
    if total <= 0:
        raise ValueError("total must be positive")
    phat = count / total
    z2 = z * z
    denom = 1 + z2 / total
    center = (phat + z2 / (2 * total)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / total + z2 / (4 * total * total))
    return max(0.0, center - half), min(1.0, center + half)


def proportion_z(count: int, total: int, p0: float) -> float | None:
    """Normal-approximation z of an observed proportion against the null p0."""
    if not 0 < p0 < 1:
        return None
    sd = math.sqrt(p0 * (1 - p0) / total)
    return (count / total - p0) / sd


def ratio_z(n_triv: int, n_class: int, total: int, expected: float) -> tuple[float | None, float | None]:
    """Observed trivial/class ratio and its z against the expected ratio.

    Multinomial delta method: var(R) ~ R^2 [(1-pt)/nt + (1-pc)/nc + 2/T].
    """
    if n_class <= 0:
        return None, None
    r = n_triv / n_class
    pt = n_triv / total
    pc = n_class / total
    var = r * r * ((1 - pt) / n_triv + (1 - pc) / n_class + 2 / total)
    if var <= 0:
        return r, None
    return r, (r - expected) / math.sqrt(var)


def two_sample_z(c1: int, t1: int, c2: int, t2: int) -> float | None:
    """Pooled two-proportion z."""
    if t1 <= 0 or t2 <= 0:
        return None
    pool = (c1 + c2) / (t1 + t2)
    if pool <= 0 or pool >= 1:
        return 0.0 if c1 * t2 == c2 * t1 else None
    sd = math.sqrt(pool * (1 - pool) * (1 / t1 + 1 / t2))
    return (c1 / t1 - c2 / t2) / sd


def mean_z(mean: float, sample_sd: float, n: int, target: float) -> float | None:
    if n <= 1 or sample_sd <= 0:
        return None
    return (mean - target) / (sample_sd / math.sqrt(n))
