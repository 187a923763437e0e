"""Real-valued special functions used by the fading laws and capacity formulas.

Everything here accepts plain floats; ``bessel_i0``, ``bessel_i0e`` and
``marcum_q1`` also broadcast over numpy arrays because the distribution code
evaluates them on quadrature nodes and on sorted Monte Carlo samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sc

__all__ = [
    "DomainError",
    "MarcumFitError",
    "MarcumFit",
    "bessel_i0",
    "bessel_i0e",
    "marcum_q1",
    "fit_marcum_exponential",
    "dense_grid",
    "gamma_fn",
    "upper_incomplete_gamma",
    "beta_fn",
    "DEFAULT_B_RANGE",
    "DEFAULT_GRID_POINTS",
]

DEFAULT_B_RANGE = (0.05, 8.0)
DEFAULT_GRID_POINTS = 256

# switch-over between the power series and the large-argument expansion of I0
_I0_SERIES_LIMIT = 30.0
_I0_ASYMPTOTIC_TERMS = 24
# largest x with I0(x) < DBL_MAX
_I0_OVERFLOW = 713.98

_MARCUM_TAIL = 1e-16


class DomainError(ValueError):
    """Argument outside the domain of a special function (pole, negative input)."""


class MarcumFitError(ArithmeticError):
    """The exponential Marcum-Q fit could not be formed."""


def _as_array(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr < 0):
        raise DomainError(f"{name} must be non-negative")
    return arr


def _unwrap(arr, scalar):
    return float(arr) if scalar else arr


def _i0_series(x):
    # sum (x/2)^{2k} / (k!)^2, all terms positive
    q = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    k = 0
    while True:
        k += 1
        term = term * q / (k * k)
        total = total + term
        if np.all(term <= 1e-17 * total):
            return total


def _i0e_asymptotic(x):
    # e^{-x} I0(x) ~ (2 pi x)^{-1/2} sum ((2k-1)!!)^2 / (k! (8x)^k)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, _I0_ASYMPTOTIC_TERMS):
        term = term * (2 * k - 1) ** 2 / (k * 8.0 * x)
        total = total + term
    return total / np.sqrt(2.0 * np.pi * x)


def bessel_i0e(x):
    """Exponentially scaled modified Bessel function ``exp(-x) * I0(x)``."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(_as_array(x, "x"))
    out = np.empty_like(x)
    small = x <= _I0_SERIES_LIMIT
    if np.any(small):
        out[small] = _i0_series(x[small]) * np.exp(-x[small])
    if np.any(~small):
        out[~small] = _i0e_asymptotic(x[~small])
    return _unwrap(out[0] if scalar else out, scalar)


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero.

    Power series below x = 30, the large-argument expansion above it.

    Raises:
        OverflowError: if I0(x) is not representable as a double.
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(_as_array(x, "x"))
    if np.any(x > _I0_OVERFLOW):
        raise OverflowError(f"I0(x) overflows for x = {float(np.max(x))}")
    out = np.empty_like(x)
    small = x <= _I0_SERIES_LIMIT
    if np.any(small):
        out[small] = _i0_series(x[small])
    if np.any(~small):
        big = x[~small]
        out[~small] = _i0e_asymptotic(big) * np.exp(big)
    return _unwrap(out[0] if scalar else out, scalar)


def _log_safe(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


def marcum_q1(a, b):
    """First-order Marcum Q function Q1(a, b).

    Poisson mixture of regularized upper incomplete gammas::

        Q1(a, b) = sum_k exp(-a^2/2) (a^2/2)^k / k! * Q(k + 1, b^2/2)

    where ``Q(k + 1, x) = exp(-x) sum_{r<=k} x^r / r!``. The sum is cut once a
    geometric bound on the remaining Poisson weight drops below 1e-16, so the
    absolute truncation error is below that since every Q(k + 1, x) <= 1.
    """
    scalar = np.ndim(a) == 0 and np.ndim(b) == 0
    a_arr = _as_array(a, "a")
    b_arr = _as_array(b, "b")
    a_arr, b_arr = np.broadcast_arrays(a_arr, b_arr)
    lam = 0.5 * a_arr * a_arr
    x = 0.5 * b_arr * b_arr
    log_lam = _log_safe(lam)
    log_x = _log_safe(x)
    lam_max = float(np.max(lam)) if lam.size else 0.0

    # k = 0 terms
    log_w = -lam
    poisson_term = np.exp(-x)  # e^{-x} x^k / k!
    q_k = poisson_term.copy()  # Q(k + 1, x)
    total = np.exp(log_w) * q_k
    k = 0
    while True:
        k += 1
        log_fact = math.lgamma(k + 1)
        with np.errstate(invalid="ignore"):
            log_w = np.where(lam > 0, -lam + k * log_lam - log_fact, -np.inf)
            poisson_term = np.where(x > 0, np.exp(-x + k * log_x - log_fact), 0.0)
        q_k = np.minimum(q_k + poisson_term, 1.0)
        w = np.exp(log_w)
        total = total + w * q_k
        if k + 2 > lam_max:
            ratio = lam_max / (k + 2)
            tail = float(np.max(w)) * (lam_max / (k + 1)) / (1.0 - ratio)
            if tail < _MARCUM_TAIL:
                break
    total = np.where(x == 0.0, 1.0, np.clip(total, 0.0, 1.0))
    return float(total) if scalar else total


def dense_grid(b_range, points):
    """Uniform grid on ``b_range`` with ``points`` nodes, endpoints included.

    Nodes are formed as ``lo + (hi - lo) * (i / (points - 1))``; the integer
    ratio makes a grid with ``2 * points - 1`` nodes contain this one exactly.
    """
    lo, hi = float(b_range[0]), float(b_range[1])
    n = int(points) - 1
    idx = np.arange(n + 1, dtype=float)
    return lo + (hi - lo) * (idx / n)


@dataclass(frozen=True)
class MarcumFit:
    """Exponential approximation ``Q1(a, b) ~= exp(-exp(nu) * b**mu)``."""

    a: float
    mu: float
    nu: float
    max_abs_error: float
    b_range: tuple[float, float]

    def approx(self, b):
        b = np.asarray(b, dtype=float)
        out = np.exp(-math.exp(self.nu) * np.power(b, self.mu))
        return float(out) if out.ndim == 0 else out

    @property
    def scale(self) -> float:
        return math.exp(self.nu)


# the verification grid refines the fitting grid by this factor, so any grid
# at most this many times denser is contained in it node for node
_VERIFY_REFINEMENT = 8


def fit_marcum_exponential(a, b_range=DEFAULT_B_RANGE, grid_points=DEFAULT_GRID_POINTS):
    """Fit ``mu`` and ``nu`` so that ``exp(-exp(nu) b^mu)`` tracks Q1(a, b).

    The model is linear after a double log: ``log(-log Q1) = nu + mu log b``.
    The fit is weighted least squares in that plane with weights
    ``(Q log Q)^2``, the squared sensitivity of Q to the linearized residual,
    so the solution approximately minimizes the error in Q itself rather than
    over-serving the nearly-flat head and vanishing tail. At a = 0 the data
    are exactly linear and the fit returns mu = 2, exp(nu) = 1/2.

    ``max_abs_error`` is measured afterwards against ``marcum_q1`` on a grid
    eight times denser than the fitting grid.
    """
    a = float(a)
    if not math.isfinite(a) or a < 0:
        raise DomainError("a must be finite and non-negative")
    lo, hi = float(b_range[0]), float(b_range[1])
    if not (0 < lo < hi < math.inf):
        raise DomainError(f"b_range must satisfy 0 < lo < hi < inf, got {b_range!r}")
    grid_points = int(grid_points)
    if grid_points < 32:
        raise DomainError(f"grid_points must be >= 32, got {grid_points}")

    b = dense_grid((lo, hi), grid_points)
    q = marcum_q1(a, b)
    usable = (q > 0.0) & (q < 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_q = np.log(q)
        y = np.log(-log_q)
    usable &= np.isfinite(y)
    if np.count_nonzero(usable) < 2:
        raise MarcumFitError(
            f"only {np.count_nonzero(usable)} grid points with 0 < Q1 < 1 for a={a}, "
            f"b_range={b_range}; widen the range"
        )
    xs = np.log(b[usable])
    ys = y[usable]
    wt = np.abs(q[usable] * log_q[usable])
    if a == 0.0:
        wt = np.ones_like(wt)
    design = np.column_stack([np.ones_like(xs), xs]) * wt[:, None]
    normal = design.T @ design
    cond = np.linalg.cond(normal)
    if not np.isfinite(cond) or cond > 1e14:
        raise MarcumFitError(
            f"singular normal equations for a={a}: cond={cond:.3e}, "
            f"{xs.size} usable points, log b spread {np.ptp(xs):.3e}"
        )
    nu, mu = np.linalg.solve(normal, design.T @ (ys * wt))
    if not mu > 0:
        raise MarcumFitError(f"fitted exponent mu={mu} is not positive for a={a}")

    fit = MarcumFit(a=a, mu=float(mu), nu=float(nu), max_abs_error=0.0, b_range=(lo, hi))
    verify = dense_grid((lo, hi), (grid_points - 1) * _VERIFY_REFINEMENT + 1)
    err = float(np.max(np.abs(fit.approx(verify) - marcum_q1(a, verify))))
    return MarcumFit(a=a, mu=fit.mu, nu=fit.nu, max_abs_error=err, b_range=(lo, hi))


def _is_pole(x):
    return x <= 0 and float(x).is_integer()


def gamma_fn(x):
    """Real gamma function; negative non-integers go through reflection."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma argument must be finite, got {x}")
    if _is_pole(x):
        raise DomainError(f"gamma has a pole at {x:g}")
    return math.gamma(x)


def upper_incomplete_gamma(s, x):
    """Non-regularized upper incomplete gamma Gamma(s, x).

    Integer ``s`` uses the finite sum ``(s-1)! e^{-x} sum_{r<s} x^r / r!``;
    other orders defer to the regularized complement from scipy.
    """
    s = float(s)
    x = float(x)
    if not (s > 0 and math.isfinite(s)):
        raise DomainError(f"s must be positive, got {s}")
    if not (x >= 0 and math.isfinite(x)):
        raise DomainError(f"x must be finite and non-negative, got {x}")
    if s.is_integer() and s <= 170:
        n = int(s)
        term = 1.0
        acc = 1.0
        for r in range(1, n):
            term *= x / r
            acc += term
        return math.factorial(n - 1) * math.exp(-x) * acc
    return float(_sc.gammaincc(s, x)) * math.gamma(s)


def beta_fn(p, q):
    """Beta function B(p, q) = Gamma(p) Gamma(q) / Gamma(p + q).

    Arguments may be negative as long as none of p, q, p + q is a
    non-positive integer. The pair (p, 1 - p) returns pi / sin(pi p).
    """
    p = float(p)
    q = float(q)
    for name, val in (("p", p), ("q", q), ("p+q", p + q)):
        if _is_pole(val):
            raise DomainError(f"beta pole: {name} = {val:g} is a non-positive integer")
    if p + q == 1.0:
        return math.pi / math.sin(math.pi * p)
    return gamma_fn(p) * gamma_fn(q) / gamma_fn(p + q)
