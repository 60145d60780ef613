"""Confidence intervals for the ratio and the overlap coefficients.

R_hat / R follows F(2 n1, 2 n2) exactly, which pivots into an exact interval
for R:

    L = r_hat / F_quantile(1 - alpha/2),   U = r_hat / F_quantile(alpha/2).

Each overlap coefficient is increasing in R on (0, 1] and decreasing on
[1, inf), so the transformed interval is (OVL(L), OVL(U)) when U <= 1, the
endpoints swap roles when L >= 1, and an interval straddling 1 maps to the
conservative (min(OVL(L), OVL(U)), 1] with the upper limit pinned at 1.

Note the KL overlap transform uses Lambda(x) = x / (x^2 - x + 1), matching
its closed form (and keeping the endpoints inside [0, 1] for every x > 0).
"""

from __future__ import annotations

from dataclasses import dataclass

from .distributions import f_quantile
from .estimation import RatioEstimates
from .measures import COEFFICIENTS, MEASURES

#: Valid CI targets: the ratio itself plus the four coefficients.
RATIO_TARGET = "ratio"


class InvalidInterval(ValueError):
    """The input interval cannot be transformed (wrong target or endpoints)."""


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    target: str
    contains_one: bool = False

    def __post_init__(self) -> None:
        if not (0.0 < self.level < 1.0):
            raise ValueError(f"level must lie in (0, 1), got {self.level!r}")
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "level": self.level,
            "lower": self.lower,
            "upper": self.upper,
            "contains_one": self.contains_one,
        }


def ratio_ci(estimates: RatioEstimates, level: float = 0.95) -> ConfidenceInterval:
    """Exact confidence interval for R from the F pivot.

    Uses the uncorrected r_hat: the pivot r_hat / R ~ F(2 n1, 2 n2) is exact
    as stated, so coverage is exactly the nominal level.
    """
    if not (0.0 < level < 1.0):
        raise ValueError(f"level must lie in (0, 1), got {level!r}")
    alpha = 1.0 - level
    d1, d2 = 2 * estimates.n1, 2 * estimates.n2
    lower = estimates.r_hat / f_quantile(d1, d2, 1.0 - alpha / 2.0)
    upper = estimates.r_hat / f_quantile(d1, d2, alpha / 2.0)
    return ConfidenceInterval(lower=lower, upper=upper, level=level,
                              target=RATIO_TARGET,
                              contains_one=lower < 1.0 < upper)


def ovl_ci(ratio_interval: ConfidenceInterval, which: str) -> ConfidenceInterval:
    """Transform a ratio interval into an interval for one coefficient."""
    if which not in COEFFICIENTS:
        raise InvalidInterval(f"unknown coefficient {which!r}")
    if ratio_interval.target != RATIO_TARGET:
        raise InvalidInterval(f"expected a ratio interval, got target {ratio_interval.target!r}")
    lo, hi = ratio_interval.lower, ratio_interval.upper
    if not (0.0 < lo <= hi):
        raise InvalidInterval(f"need 0 < lower <= upper, got ({lo}, {hi})")

    ovl = MEASURES[which]
    if hi <= 1.0:
        lower, upper, straddles = ovl(lo), ovl(hi), False
    elif lo >= 1.0:
        lower, upper, straddles = ovl(hi), ovl(lo), False
    else:
        lower, upper, straddles = min(ovl(lo), ovl(hi)), 1.0, True
    return ConfidenceInterval(lower=lower, upper=upper,
                              level=ratio_interval.level, target=which,
                              contains_one=straddles)


def all_ovl_cis(ratio_interval: ConfidenceInterval) -> dict[str, ConfidenceInterval]:
    return {key: ovl_ci(ratio_interval, key) for key in COEFFICIENTS}
