r"""Special functions used throughout the package.

Bessel functions :math:`J_0`, :math:`J_1`, :math:`I_0`, associated Laguerre
polynomials, :math:`\Gamma(m + 1/2)` and the Gauss hypergeometric function
:math:`{}_2F_1` for the parameter families that appear in the photon-number
formulas. Everything here is written from scratch; SciPy is only used by the
test-suite as an independent reference.

The Bessel and Laguerre routines accept scalars or NumPy arrays and return a
``float`` for scalar input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HypergeometricDivergence, NonConvergence, OverflowSignal

BOUNDARY_EPS = 1e-10

_J0_SEAM = 12.0
_I0_SEAM = 15.0
_SERIES_TERMS = 80
# log(DBL_MAX); beyond this e^x is not representable
_EXP_LIMIT = 709.78


@dataclass(frozen=True)
class AccuracyBudget:
    """Termination control for the series evaluations."""

    rel_tol: float = 1e-12
    max_terms: int = 5000

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-3):
            raise ValueError("rel_tol must lie in (0, 1e-3]")
        if self.max_terms < 50:
            raise ValueError("max_terms must be at least 50")


DEFAULT_BUDGET = AccuracyBudget()


def _prepare(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("argument must be finite")
    return arr


def _finish(out, x):
    if np.ndim(x) == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Bessel functions of the first kind


def _bessel_series(x, order):
    # sum_k (-1)^k (x/2)^(2k+order) / (k! (k+order)!)
    half = 0.5 * x
    y = -half * half
    term = np.ones_like(x) if order == 0 else half.copy()
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * y / (k * (k + order))
        total = total + term
    return total


def _hankel_coefficients(order, count):
    # a_k(nu) = prod_{j<=k} (4 nu^2 - (2j-1)^2) / (k! 8^k)
    mu = 4.0 * order * order
    coeffs = [1.0]
    for k in range(1, count):
        coeffs.append(coeffs[-1] * (mu - (2 * k - 1) ** 2) / (8.0 * k))
    return coeffs


_HANKEL = {nu: _hankel_coefficients(nu, 64) for nu in (0, 1)}


def _bessel_asymptotic(x, order):
    """Hankel expansion, truncated at the smallest term (at least 4 corrections)."""
    a = _HANKEL[order]
    inv = 1.0 / x
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    last = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(0, 31):
        sign = -1.0 if k % 2 else 1.0
        tp = sign * a[2 * k] * inv ** (2 * k)
        tq = sign * a[2 * k + 1] * inv ** (2 * k + 1)
        size = np.maximum(np.abs(tp), np.abs(tq))
        if k >= 5:
            active &= size < last
        p = np.where(active, p + tp, p)
        q = np.where(active, q + tq, q)
        last = np.where(active, size, last)
        if not active.any():
            break
    chi = x - (0.25 + 0.5 * order) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _bessel_j(x, order):
    arr = _prepare(x)
    ax = np.abs(arr)
    out = np.empty_like(ax)
    small = ax <= _J0_SEAM
    if small.any():
        out[small] = _bessel_series(ax[small], order)
    if (~small).any():
        out[~small] = _bessel_asymptotic(ax[~small], order)
    if order == 1:
        out = np.where(arr < 0, -out, out)
    return _finish(out, x)


def bessel_j0(x):
    """Bessel function :math:`J_0(x)` for real ``x``."""
    return _bessel_j(x, 0)


def bessel_j1(x):
    """Bessel function :math:`J_1(x)`; odd in ``x``. Used for zeros and derivatives."""
    return _bessel_j(x, 1)


def bessel_j0_zeros(count):
    """The first ``count`` positive zeros of :math:`J_0`.

    McMahon's expansion seeds a Newton iteration using :math:`J_0' = -J_1`.
    """
    zeros = np.empty(count)
    for k in range(1, count + 1):
        b = (k - 0.25) * math.pi
        guess = b + 1.0 / (8 * b) - 124.0 / (3 * (8 * b) ** 3)
        for _ in range(20):
            step = bessel_j0(guess) / bessel_j1(guess)
            guess += step
            if abs(step) < 1e-15 * guess:
                break
        zeros[k - 1] = guess
    return zeros


# ---------------------------------------------------------------------------
# Modified Bessel function I0


def _i0_series(ax):
    y = 0.25 * ax * ax
    term = np.ones_like(ax)
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * y / (k * k)
        total = total + term
    return total


def _i0e_asymptotic(ax):
    # e^{-x} I0(x) ~ (2 pi x)^{-1/2} sum_k ((2k-1)!!)^2 / (k! 8^k x^k)
    term = np.ones_like(ax)
    total = term.copy()
    for k in range(1, 40):
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * ax)
        keep = nxt < term
        term = np.where(keep, nxt, 0.0)
        total = total + term
    return total / np.sqrt(2.0 * math.pi * ax)


def bessel_i0e(x):
    r"""Exponentially scaled :math:`e^{-|x|} I_0(x)`; never overflows."""
    arr = _prepare(x)
    ax = np.abs(arr)
    out = np.empty_like(ax)
    small = ax <= _I0_SEAM
    if small.any():
        out[small] = _i0_series(ax[small]) * np.exp(-ax[small])
    if (~small).any():
        out[~small] = _i0e_asymptotic(ax[~small])
    return _finish(out, x)


def log_bessel_i0(x):
    r""":math:`\log I_0(x)`, computed as :math:`|x| + \log(e^{-|x|} I_0(x))`."""
    arr = _prepare(x)
    out = np.abs(arr) + np.log(np.asarray(bessel_i0e(arr)))
    return _finish(out, x)


def bessel_i0(x):
    """Modified Bessel function :math:`I_0(x)`.

    Raises:
        OverflowSignal: if :math:`e^{|x|}` is not representable.
    """
    arr = _prepare(x)
    if np.any(np.abs(arr) > _EXP_LIMIT):
        raise OverflowSignal("I0 overflows for |x| > %.2f; use bessel_i0e" % _EXP_LIMIT)
    out = np.asarray(bessel_i0e(arr)) * np.exp(np.abs(arr))
    return _finish(out, x)


# ---------------------------------------------------------------------------
# Laguerre polynomials


def laguerre_all(n_max, k, x):
    r"""All associated Laguerre polynomials :math:`L_j^{(k)}(x)`, ``j = 0..n_max``.

    Returns an array of shape ``(n_max + 1,) + shape(x)``.
    """
    if n_max < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    if n_max > 500:
        raise ValueError("degree above 500 is not supported")
    arr = _prepare(x)
    out = np.empty((n_max + 1,) + arr.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + k - arr
    for j in range(1, n_max):
        out[j + 1] = ((2 * j + 1 + k - arr) * out[j] - (j + k) * out[j - 1]) / (j + 1)
    return out


def laguerre(n, k, x):
    r"""Associated Laguerre polynomial :math:`L_n^{(k)}(x)` by three-term recurrence."""
    out = laguerre_all(n, k, x)[n]
    return _finish(out, x)


def laguerre_scaled_all(n_max, x):
    r"""Laguerre functions :math:`e^{-x/2} L_j(x)` for ``j = 0..n_max``, ``x >= 0``.

    These are bounded by one in magnitude. The recurrence runs on rescaled
    values so that neither :math:`L_j(x)` nor :math:`e^{-x/2}` over- or
    underflows on its own.
    """
    arr = _prepare(x)
    if np.any(arr < 0):
        raise ValueError("x must be nonnegative")
    out = np.empty((n_max + 1,) + arr.shape)
    log_scale = -0.5 * arr
    prev = np.ones_like(arr)
    cur = 1.0 - arr
    out[0] = np.exp(log_scale)
    if n_max >= 1:
        out[1] = cur * np.exp(log_scale)
    for j in range(1, n_max):
        nxt = ((2 * j + 1 - arr) * cur - j * prev) / (j + 1)
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e200
        if big.any():
            shrink = np.where(big, 1e-200, 1.0)
            prev = prev * shrink
            cur = cur * shrink
            log_scale = log_scale + np.where(big, 200 * math.log(10.0), 0.0)
        with np.errstate(over="ignore", under="ignore"):
            out[j + 1] = cur * np.exp(np.minimum(log_scale, _EXP_LIMIT))
    return out


# ---------------------------------------------------------------------------
# Gamma at half-integers


def gamma_half(m):
    r""":math:`\Gamma(m + 1/2)` by upward recurrence from :math:`\sqrt{\pi}`."""
    if m < 0 or int(m) != m:
        raise ValueError("m must be a nonnegative integer")
    if m > 200:
        raise ValueError("m above 200 is not supported")
    value = math.sqrt(math.pi)
    for j in range(int(m)):
        value *= j + 0.5
        if math.isinf(value):
            raise OverflowSignal("Gamma(%d + 1/2) overflows" % m)
    return value


def log_gamma_half(m):
    return math.lgamma(m + 0.5)


# ---------------------------------------------------------------------------
# Gauss hypergeometric function


def _is_nonpositive_int(v):
    return v <= 0 and float(v).is_integer()


def _scaled_sum(a, b, c, z, n_terms=None, budget=DEFAULT_BUDGET):
    """Sum the 2F1 power series; return (log|sum|, sign).

    ``n_terms`` forces a terminating sum of that many terms. Running values are
    rescaled to stay inside the floating-point range.
    """
    term = 1.0
    total = 1.0
    log_offset = 0.0
    limit = n_terms if n_terms is not None else budget.max_terms
    converged = n_terms is not None
    for k in range(limit - 1 if n_terms is not None else limit):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        term *= ratio
        total += term
        if abs(total) > 1e250:
            term *= 1e-250
            total *= 1e-250
            log_offset += 250 * math.log(10.0)
        if n_terms is None:
            bound = max(abs(ratio), abs(z))
            if bound < 1.0 and k > 2 and abs(term) / (1.0 - bound) <= budget.rel_tol * abs(total):
                converged = True
                break
    if not converged:
        raise NonConvergence("2F1 series did not converge within %d terms" % budget.max_terms)
    if total == 0.0:
        return -math.inf, 0.0
    return log_offset + math.log(abs(total)), math.copysign(1.0, total)


def hyp2f1_series(a, b, c, z, budget=DEFAULT_BUDGET):
    """Plain power series of 2F1, |z| < 1. Exposed for testing the transformations."""
    log_abs, sign = _scaled_sum(a, b, c, z, budget=budget)
    return sign * math.exp(log_abs)


def _terminating_length(a, b):
    lengths = [int(-v) + 1 for v in (a, b) if _is_nonpositive_int(v)]
    return min(lengths) if lengths else None


def _log_2f1(a, b, c, z, one_minus_z, budget):
    """Return (log|F|, sign)."""
    if _is_nonpositive_int(c):
        raise ValueError("c must not be a nonpositive integer")
    if z == 0.0:
        return 0.0, 1.0
    if z >= 1.0 or one_minus_z <= 0.0:
        raise ValueError("z must be below 1")

    length = _terminating_length(a, b)
    if length is not None:
        return _scaled_sum(a, b, c, z, n_terms=length, budget=budget)

    if one_minus_z < BOUNDARY_EPS and a + b - c >= 0:
        raise HypergeometricDivergence(
            "2F1(%g, %g; %g; z) diverges as z -> 1 (1 - z = %.3g)" % (a, b, c, one_minus_z)
        )

    if z < -0.5:
        # Pfaff: F(a,b;c;z) = (1-z)^(-a) F(a, c-b; c; z/(z-1))
        log_abs, sign = _log_2f1(a, c - b, c, z / (z - 1.0), 1.0 / one_minus_z, budget)
        return log_abs - a * math.log(one_minus_z), sign

    # Euler: F(a,b;c;z) = (1-z)^(c-a-b) F(c-a, c-b; c; z); exact when it terminates
    euler = _terminating_length(c - a, c - b)
    if euler is not None and (z > 0.5 or euler < 64):
        log_abs, sign = _scaled_sum(c - a, c - b, c, z, n_terms=euler, budget=budget)
        return log_abs + (c - a - b) * math.log(one_minus_z), sign

    if z <= 0.9:
        return _scaled_sum(a, b, c, z, budget=budget)

    s = c - a - b
    if float(s).is_integer():
        return _scaled_sum(a, b, c, z, budget=budget)
    # connection formula around z = 1
    w = one_minus_z
    first = _rgamma_ratio(c, s, c - a, c - b) * _plain(a, b, 1.0 - s, w, budget)
    second = _rgamma_ratio(c, -s, a, b) * w**s * _plain(c - a, c - b, 1.0 + s, w, budget)
    value = first + second
    if value == 0.0:
        return -math.inf, 0.0
    return math.log(abs(value)), math.copysign(1.0, value)


def _plain(a, b, c, z, budget):
    log_abs, sign = _scaled_sum(a, b, c, z, budget=budget)
    return sign * math.exp(log_abs)


def _rgamma(x):
    if _is_nonpositive_int(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _rgamma_ratio(num1, num2, den1, den2):
    # Gamma(num1) Gamma(num2) / (Gamma(den1) Gamma(den2))
    return math.gamma(num1) * math.gamma(num2) * _rgamma(den1) * _rgamma(den2)


def log_gauss_2f1(a, b, c, z, one_minus_z=None, budget=DEFAULT_BUDGET):
    """Natural logarithm of a positive 2F1 value.

    ``one_minus_z`` may be supplied when the caller can compute ``1 - z``
    without cancellation; it is then used in place of the subtraction.
    """
    if one_minus_z is None:
        one_minus_z = 1.0 - z
    log_abs, sign = _log_2f1(a, b, c, z, one_minus_z, budget)
    if sign <= 0:
        raise ValueError("2F1 value is not positive; use gauss_2f1")
    return log_abs


def gauss_2f1(a, b, c, z, one_minus_z=None, budget=DEFAULT_BUDGET):
    r"""Gauss hypergeometric function :math:`F(a, b; c; z)` for real ``z < 1``.

    Uses the terminating sum when ``a`` or ``b`` is a nonpositive integer, the
    Euler transformation when that makes the series terminate, the Pfaff
    transformation for ``z < -1/2``, the power series up to ``z = 0.9`` and the
    connection formula around ``z = 1`` otherwise.

    Raises:
        HypergeometricDivergence: if ``1 - z`` is below the boundary tolerance
            and ``a + b - c >= 0``, where the function is singular.
    """
    if one_minus_z is None:
        one_minus_z = 1.0 - z
    log_abs, sign = _log_2f1(a, b, c, z, one_minus_z, budget)
    if sign == 0.0:
        return 0.0
    if log_abs > _EXP_LIMIT:
        raise OverflowSignal("2F1 value overflows")
    return sign * math.exp(log_abs)
