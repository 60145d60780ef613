"""Sampling and distribution functions backing estimation and simulation.

Contents: a counter-based seeded stream abstraction (Philox), the exponential
inverse-CDF sampler, the regularized incomplete beta function by continued
fraction, the F distribution CDF/quantile built on it, the gamma (Erlang) CDF
of the exponential sample mean, and small Kolmogorov-Smirnov helpers used by
the distribution-law self checks.

Everything here is deterministic: a (seed, stream_id) pair always produces
the same variates, on any platform, under any execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_UINT64_MASK = 0xFFFFFFFFFFFFFFFF


class NonConvergence(RuntimeError):
    """An iterative evaluation exhausted its budget before converging."""


@dataclass(frozen=True)
class SeededStream:
    """A reproducible, independent random substream.

    Keyed by (seed, stream_id) into a Philox counter-based generator, so
    distinct stream_ids give statistically independent streams and the same
    pair always reproduces the same sequence.  A stream is a value, not a
    mutable generator: every call to ``uniforms`` restarts from the key.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not (0 <= int(v) < 2 ** 64):
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def uniforms(self, n: int) -> np.ndarray:
        """n uniform variates on the open interval (0, 1).

        Raw 64-bit Philox output is mapped through (raw >> 11 + 0.5) * 2^-53,
        which can produce neither 0.0 nor 1.0.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        key = (int(self.stream_id) << 64) | int(self.seed)
        raw = np.random.Philox(key=key).random_raw(int(n))
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def sample_exponential(stream: SeededStream, mean_theta: float, n: int) -> np.ndarray:
    """n i.i.d. draws from the exponential density (1/theta) exp(-x/theta).

    Inverse-CDF method x = -theta * log(U); with U in the open unit interval
    the output is always finite and strictly positive, and scaling in theta
    is exact: the theta=2 sample is bitwise twice the theta=1 sample.
    """
    if not (math.isfinite(mean_theta) and mean_theta > 0):
        raise ValueError(f"mean_theta must be strictly positive, got {mean_theta!r}")
    return mean_theta * (-np.log(stream.uniforms(n)))


# ---------------------------------------------------------------------------
# Regularized incomplete beta and the F distribution
# ---------------------------------------------------------------------------

_BETA_MAX_ITER = 500
_BETA_EPS = 1e-15


def _beta_cf(a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Continued fraction for the incomplete beta (modified Lentz).

    Vectorized over x; a and b are scalars.  Iterates until every element's
    multiplicative update is within _BETA_EPS of 1.
    """
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < tiny, tiny, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        h = h * d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < _BETA_EPS):
            return h
    raise NonConvergence(
        f"incomplete beta continued fraction: no convergence in {_BETA_MAX_ITER} "
        f"iterations for a={a}, b={b}")


def regularized_incomplete_beta(a: float, b: float, x):
    """I_x(a, b) to absolute accuracy ~1e-12.

    Evaluated by continued fraction, switching through the symmetry
    I_x(a, b) = 1 - I_{1-x}(b, a) for x above a/(a+b) where the direct
    fraction converges slowly.  Vectorized over x; a, b are scalars.
    """
    if not (a > 0 and b > 0):
        raise ValueError(f"a and b must be positive, got a={a}, b={b}")
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("x must lie in [0, 1]")

    out = np.empty_like(arr)
    ln_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)

    at_zero = arr == 0.0
    at_one = arr == 1.0
    out[at_zero] = 0.0
    out[at_one] = 1.0

    interior = ~(at_zero | at_one)
    xi = arr[interior]
    if xi.size:
        front = np.exp(a * np.log(xi) + b * np.log1p(-xi) - ln_beta)
        res = np.empty_like(xi)
        direct = xi < a / (a + b)
        if np.any(direct):
            res[direct] = front[direct] * _beta_cf(a, b, xi[direct]) / a
        if np.any(~direct):
            res[~direct] = 1.0 - front[~direct] * _beta_cf(b, a, 1.0 - xi[~direct]) / b
        out[interior] = res

    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def _check_df(d1: int, d2: int) -> None:
    if not (isinstance(d1, (int, np.integer)) and isinstance(d2, (int, np.integer))):
        raise ValueError("degrees of freedom must be integers")
    if d1 < 1 or d2 < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got ({d1}, {d2})")


def f_cdf(d1: int, d2: int, x):
    """CDF of the F(d1, d2) distribution: I_y(d1/2, d2/2), y = d1 x/(d1 x + d2)."""
    _check_df(d1, d2)
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr < 0):
        raise ValueError("x must be nonnegative")
    y = d1 * arr / (d1 * arr + d2)
    out = regularized_incomplete_beta(d1 / 2.0, d2 / 2.0, y)
    out = np.atleast_1d(out)
    return float(out[0]) if scalar else out


def f_pdf(d1: int, d2: int, x: float) -> float:
    """Density of the F(d1, d2) distribution (used for quantile refinement)."""
    _check_df(d1, d2)
    if x <= 0:
        return 0.0
    a, b = d1 / 2.0, d2 / 2.0
    y = d1 * x / (d1 * x + d2)
    ln_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    log_pdf = ((a - 1.0) * math.log(y) + (b - 1.0) * math.log1p(-y) - ln_beta
               + math.log(d1) + math.log(d2) - 2.0 * math.log(d1 * x + d2))
    return math.exp(log_pdf)


_QUANTILE_BRACKET = (1e-12, 1e12)


def f_quantile(d1: int, d2: int, prob: float) -> float:
    """Quantile of F(d1, d2): x with |f_cdf(x) - prob| <= 1e-10.

    A logarithmic bisection narrows the bracket [1e-12, 1e12], then Newton
    steps on the CDF (with the analytic density) finish the job; any Newton
    step leaving the bracket falls back to bisection.
    """
    _check_df(d1, d2)
    if not (0.0 < prob < 1.0):
        raise ValueError(f"prob must lie strictly between 0 and 1, got {prob!r}")

    lo, hi = _QUANTILE_BRACKET
    if f_cdf(d1, d2, lo) > prob or f_cdf(d1, d2, hi) < prob:
        raise NonConvergence(f"quantile outside bracket {_QUANTILE_BRACKET}")

    while hi / lo > 1.001:
        mid = math.sqrt(lo * hi)
        if f_cdf(d1, d2, mid) < prob:
            lo = mid
        else:
            hi = mid

    x = 0.5 * (lo + hi)
    for _ in range(100):
        err = f_cdf(d1, d2, x) - prob
        if abs(err) <= 1e-12:
            return x
        if err > 0:
            hi = min(hi, x)
        else:
            lo = max(lo, x)
        dens = f_pdf(d1, d2, x)
        nxt = x - err / dens if dens > 0 else math.nan
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if nxt == x:
            break
        x = nxt
    if abs(f_cdf(d1, d2, x) - prob) <= 1e-10:
        return x
    raise NonConvergence(f"F quantile did not reach 1e-10 for df=({d1},{d2}), prob={prob}")


def reciprocal_f_identity_check(d1: int, d2: int, prob: float,
                                rel_tol: float = 1e-9) -> bool:
    """Verify F_q(d1, d2; p) == 1 / F_q(d2, d1; 1-p) to relative tolerance."""
    q = f_quantile(d1, d2, prob)
    q_swapped = f_quantile(d2, d1, 1.0 - prob)
    return abs(q * q_swapped - 1.0) <= rel_tol * max(1.0, abs(q * q_swapped))


# ---------------------------------------------------------------------------
# Gamma (Erlang) law of the exponential sample mean, KS helpers
# ---------------------------------------------------------------------------


def erlang_cdf(shape: int, scale: float, x):
    """CDF of Gamma(shape, scale) for integer shape.

    The sample mean of n exponential observations with mean theta follows
    Gamma(n, theta/n), so an integer-shape (Erlang) CDF is all the sampling
    law checks need.  Computed from the stable recurrence
    P(k, y) = 1 - exp(-y) * sum_{j<k} y^j / j!; valid for y below ~700.
    """
    if not isinstance(shape, (int, np.integer)) or shape < 1:
        raise ValueError(f"shape must be a positive integer, got {shape!r}")
    if not (math.isfinite(scale) and scale > 0):
        raise ValueError(f"scale must be strictly positive, got {scale!r}")
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    y = np.atleast_1d(arr) / scale
    y = np.maximum(y, 0.0)
    term = np.exp(-y)
    total = term.copy()
    for j in range(1, int(shape)):
        term = term * y / j
        total += term
    out = np.clip(1.0 - total, 0.0, 1.0)
    return float(out[0]) if scalar else out


def ks_statistic(sample: np.ndarray, cdf) -> float:
    """One-sample Kolmogorov-Smirnov distance between a sample and a CDF."""
    xs = np.sort(np.asarray(sample, dtype=float))
    m = xs.size
    if m == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(xs), dtype=float)
    i = np.arange(1, m + 1, dtype=float)
    return float(np.maximum(f - (i - 1.0) / m, i / m - f).max())


def ks_critical_value(m: int, alpha: float) -> float:
    """Asymptotic two-sided KS critical value sqrt(log(2/alpha) / (2m))."""
    if m < 1 or not (0.0 < alpha < 1.0):
        raise ValueError("need m >= 1 and 0 < alpha < 1")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * m))
