"""Agresti-Coull estimates of binomial population shares."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from statistics import NormalDist

_STANDARD_NORMAL = NormalDist()


def normal_quantile(p: float) -> float:
    """Inverse standard-normal CDF.

    ``statistics.NormalDist.inv_cdf`` implements Wichura's AS241 rational
    approximation, accurate to about 1e-16 relative.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p!r}")
    return _STANDARD_NORMAL.inv_cdf(p)


@dataclass(frozen=True)
class ProportionEstimate:
    estimate: float
    half_width: float
    lower: float
    upper: float
    x: int
    n: int
    alpha: float
    z: float

    def as_dict(self):
        return asdict(self)


def agresti_coull(x: int, n: int, alpha: float = 0.05, variance: str = "adjusted") -> ProportionEstimate:
    """Shrunken share ``(x + z^2/2) / (n + z^2)`` with a symmetric interval.

    ``variance`` selects the share plugged into the half-width
    ``z sqrt(p (1 - p) / (n + z^2))``: ``"adjusted"`` uses the shrunken
    estimate, ``"raw"`` the sample share ``x / n``.
    """
    if int(n) != n or int(x) != x:
        raise ValueError("x and n must be whole numbers")
    x, n = int(x), int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= x <= n:
        raise ValueError(f"x = {x} outside 0..n = {n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    z = normal_quantile(1.0 - alpha / 2.0)
    z2 = z * z
    estimate = (x + z2 / 2.0) / (n + z2)
    if variance == "adjusted":
        p = estimate
    elif variance == "raw":
        p = x / n
    else:
        raise ValueError("variance must be 'adjusted' or 'raw'")
    half = z * math.sqrt(p * (1.0 - p) / (n + z2))
    return ProportionEstimate(
        estimate=estimate,
        half_width=half,
        lower=max(0.0, estimate - half),
        upper=min(1.0, estimate + half),
        x=x,
        n=n,
        alpha=alpha,
        z=z,
    )


def intervals_disjoint(a: ProportionEstimate, b: ProportionEstimate) -> bool:
    """True when the two confidence intervals do not overlap."""
    return a.upper < b.lower or b.upper < a.lower
