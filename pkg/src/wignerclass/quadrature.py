r"""Brute-force integral routes used to cross-check the closed forms.

* :func:`radial_pnd` -- photon-number probabilities from the radial
  Laguerre-Bessel phase-space integral, valid for every physical state.
* :func:`fourier_bessel` -- the order-zero Fourier-Bessel transform
  :math:`g(K) = \int_0^\infty f(I) J_0(2\sqrt{IK})\,dI`.
* :func:`p_of_I_kintegral` -- the intensity density :math:`P(I)` as a
  Fourier-Bessel integral, with detection of the exponential growth that makes
  it a distribution for squeezed states.
* :func:`verify_laplace_bessel_i0`, :func:`verify_hypergeom_moment` -- numeric
  checks of the two definite-integral identities the closed forms rest on.

All integrals go through :func:`integrate`, an adaptive 15-point
Gauss-Kronrod rule that evaluates every panel of a refinement pass in one
vectorised call and handles vector-valued integrands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import specfun
from .errors import Inconclusive, NonConvergence
from .gaussian_state import BOUNDARY_EPS, PhysicalGaussianState

_EPS = np.finfo(float).eps

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[[9, 11, 13]] = _WG[2::-1]
_GAUSS_W[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 60
    truncation_margin: float = 5.0

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol"):
            value = getattr(self, name)
            if not (0.0 < value <= 1e-4):
                raise ValueError("%s must lie in (0, 1e-4]" % name)
        if self.max_subdivisions < 20:
            raise ValueError("max_subdivisions must be at least 20")
        if self.truncation_margin < 5:
            raise ValueError("truncation_margin must be at least 5")

    def halved(self) -> "QuadratureConfig":
        return QuadratureConfig(self.abs_tol / 2, self.rel_tol / 2, self.max_subdivisions, self.truncation_margin)


DEFAULT_CONFIG = QuadratureConfig()
# used when quadrature stands in for a closed form
TIGHT_CONFIG = QuadratureConfig(abs_tol=1e-15, rel_tol=1e-13, max_subdivisions=80)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    converged: bool
    diverged: bool = False

    def __post_init__(self):
        if self.converged and self.diverged:
            raise ValueError("a result cannot be both converged and diverged")
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be nonnegative")


@dataclass
class _Quadrature:
    """Outcome of :func:`integrate`; ``panels`` holds (a, b, value) sorted by ``a``."""

    value: np.ndarray
    error: np.ndarray
    converged: bool
    abs_integral: np.ndarray
    panels: list = field(default_factory=list)


def _apply_rule(f, lo, hi):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    values = np.asarray(f(x.ravel()), dtype=float)
    values = values.reshape(x.shape + values.shape[1:])
    # contract the node axis; trailing axes are integrand components
    kron = np.tensordot(_KRONROD_W, values, axes=([0], [1])) * _expand(half, values.ndim - 2)
    gauss = np.tensordot(_GAUSS_W, values, axes=([0], [1])) * _expand(half, values.ndim - 2)
    resabs = np.tensordot(_KRONROD_W, np.abs(values), axes=([0], [1])) * _expand(half, values.ndim - 2)
    return kron, np.abs(kron - gauss), resabs


def _expand(arr, extra_dims):
    return arr.reshape(arr.shape + (1,) * extra_dims)


def integrate(f: Callable, breakpoints: Sequence[float], abs_tol: float, rel_tol: float,
              max_rounds: int = 60, max_panels: int = 200_000) -> _Quadrature:
    """Adaptive Gauss-Kronrod quadrature over ``[breakpoints[0], breakpoints[-1]]``.

    ``f`` maps a 1-D array of abscissae to an array whose first axis matches;
    further axes are treated as independent integrand components. Each round
    bisects every panel whose error exceeds its share of the tolerance.
    Convergence is judged per component against
    ``max(abs_tol, rel_tol * |value|, roundoff floor)`` where the floor is
    ``50 eps * integral of |f|``.
    """
    edges = np.asarray(breakpoints, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    kron, err, resabs = _apply_rule(f, lo, hi)
    for _ in range(max_rounds):
        total = kron.sum(axis=0)
        total_err = err.sum(axis=0)
        floor = 50 * _EPS * resabs.sum(axis=0)
        tol = np.maximum(np.maximum(abs_tol, rel_tol * np.abs(total)), floor)
        if np.all(total_err <= tol):
            return _finish(lo, hi, kron, err, resabs, True)
        # score each panel by its worst component relative to the tolerance
        score = (err / tol).reshape(len(lo), -1).max(axis=1)
        worst = score.max()
        split = score * len(lo) > 1.0
        split |= score >= 0.5 * worst
        # panels already at roundoff cannot improve
        at_floor = (err <= 50 * _EPS * resabs).reshape(len(lo), -1).all(axis=1)
        split &= ~at_floor
        if not split.any() or len(lo) + split.sum() > max_panels:
            break
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        nk, ne, nr = _apply_rule(f, new_lo, new_hi)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        kron = np.concatenate([kron[keep], nk])
        err = np.concatenate([err[keep], ne])
        resabs = np.concatenate([resabs[keep], nr])
    total = kron.sum(axis=0)
    tol = np.maximum(np.maximum(abs_tol, rel_tol * np.abs(total)), 50 * _EPS * resabs.sum(axis=0))
    return _finish(lo, hi, kron, err, resabs, bool(np.all(err.sum(axis=0) <= tol)))


def _finish(lo, hi, kron, err, resabs, converged):
    order = np.argsort(lo, kind="stable")
    panels = [(lo[i], hi[i], kron[i]) for i in order]
    return _Quadrature(
        value=kron.sum(axis=0),
        error=err.sum(axis=0),
        converged=converged,
        abs_integral=resabs.sum(axis=0),
        panels=panels,
    )


def _solve_decay(log_envelope: Callable[[float], float], start: float, target: float) -> float:
    """Smallest ``L >= start`` with ``log_envelope(L) <= target`` (envelope decreasing there)."""
    lo = start
    hi = max(2.0 * start, start + 1.0)
    while log_envelope(hi) > target:
        lo, hi = hi, 2.0 * hi
        if hi > 1e8:
            raise NonConvergence("integrand envelope does not decay")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if log_envelope(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-6 * hi:
            break
    return hi


def _exponential_truncation(rate: float, cfg: QuadratureConfig) -> float:
    # e^{-rate T} reaches abs_tol * 1e-3 at T0; the margin multiplies T0
    return cfg.truncation_margin * math.log(1e3 / cfg.abs_tol) / rate


def _breakpoints(width: float, dense_end: float, end: float) -> np.ndarray:
    """Uniform panels of ``width`` up to ``dense_end``, geometric growth to ``end``."""
    dense = np.arange(0.0, dense_end, width)
    points = list(dense) + [dense_end]
    x = dense_end
    while x < end:
        x = min(end, max(1.5 * x, x + width))
        points.append(x)
    return np.asarray(points)


# ---------------------------------------------------------------------------
# photon-number probabilities from the radial phase-space integral


def radial_truncation(s: PhysicalGaussianState, n: int, cfg: QuadratureConfig) -> float:
    r"""Upper limit of the radial integral.

    From the large-``L`` envelope :math:`C L^n e^{-2L(1 + 1/\alpha^2)}` with
    ``C = 4^{n+1} / (n! alpha beta)`` (the Bessel factor is bounded by one), the
    point where it falls below ``abs_tol * 1e-3`` is located and multiplied by
    ``truncation_margin``.
    """
    alpha, beta = s.alpha, s.beta
    rate = 2.0 * (1.0 + alpha**-2)
    log_c = math.log(4.0 / (alpha * beta)) + n * math.log(4.0) - math.lgamma(n + 1)

    def log_env(L):
        return log_c + n * math.log(L) - rate * L

    peak = max(n / rate, 0.5)
    root = _solve_decay(log_env, peak, math.log(cfg.abs_tol * 1e-3))
    return cfg.truncation_margin * root


def _radial_integrand(s: PhysicalGaussianState, n_max: int):
    alpha, beta = s.alpha, s.beta
    a = alpha**-2 + beta**-2
    c = abs(alpha**-2 - beta**-2)
    signs = np.where(np.arange(n_max + 1) % 2 == 0, 1.0, -1.0)
    pref = 4.0 / (alpha * beta)

    def f(L):
        # exp(-2L) L_n(4L) is the scaled Laguerre function of 4L
        lag = specfun.laguerre_scaled_all(n_max, 4.0 * L)
        radial = pref * np.exp(-L * (a - c)) * np.asarray(specfun.bessel_i0e(L * c))
        return (lag * radial[None, :] * signs[:, None]).T

    return f


def radial_pnd_all(s: PhysicalGaussianState, n_max: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> List[IntegralResult]:
    r"""Radial-integral probabilities :math:`p(0), \dots, p(n_{max})` in one adaptive pass.

    .. math::

        p(n) = (-1)^n \frac{4}{\alpha\beta} \int_0^\infty
               e^{-2L - L(1/\alpha^2 + 1/\beta^2)} L_n(4L)\,
               I_0\bigl(L\,|1/\beta^2 - 1/\alpha^2|\bigr)\,dL

    The integral converges absolutely for every physical state, including the
    marginal lines where the closed forms are singular.
    """
    if n_max < 0 or n_max > 200:
        raise ValueError("n must lie in 0..200")
    end = radial_truncation(s, n_max, cfg)
    dense_end = max(2.0, min(end, 1.5 * n_max + 4.0))
    points = _breakpoints(0.5, dense_end, end)
    quad = integrate(_radial_integrand(s, n_max), points, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)
    tol = np.maximum(np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(quad.value)), 50 * _EPS * quad.abs_integral)
    results = []
    for n in range(n_max + 1):
        ok = bool(quad.error[n] <= tol[n])
        results.append(IntegralResult(float(quad.value[n]), float(quad.error[n]), ok))
    return results


def radial_pnd(s: PhysicalGaussianState, n: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IntegralResult:
    """Single probability from the radial integral; see :func:`radial_pnd_all`."""
    return radial_pnd_all(s, n, cfg)[n]


# ---------------------------------------------------------------------------
# Fourier-Bessel transform


_KERNEL_ZEROS = specfun.bessel_j0_zeros(2000)
_DIRECT_PANELS = 8


def _iterated_average(partial: Sequence[float]) -> float:
    sums = list(partial)
    while len(sums) > 1:
        sums = [0.5 * (a + b) for a, b in zip(sums[:-1], sums[1:])]
    return sums[0]


def fourier_bessel(f: Callable, K: float, truncation: float,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> IntegralResult:
    r"""Order-zero Fourier-Bessel transform :math:`\int_0^T f(I) J_0(2\sqrt{IK})\,dI`.

    Args:
        f: vectorised integrand on ``[0, inf)``.
        K: transform variable, ``K >= 0``.
        truncation: ``T``, beyond which ``|f|`` is below ``cfg.abs_tol``.

    The half-line is cut at the zeros of the kernel. The first eight lobes are
    integrated directly; the remaining lobes form an alternating sequence of
    partial sums that is accelerated by iterated averaging.
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    if truncation <= 0:
        raise ValueError("truncation must be positive")

    def integrand(x):
        return f(x) * np.asarray(specfun.bessel_j0(2.0 * np.sqrt(K * x)))

    if K == 0.0:
        edges = np.linspace(0.0, truncation, 9)
        quad = integrate(integrand, edges, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)
        return IntegralResult(float(quad.value), float(quad.error), quad.converged)

    zeros = _KERNEL_ZEROS**2 / (4.0 * K)
    inside = zeros[zeros < truncation]
    if len(inside) == len(_KERNEL_ZEROS):
        raise NonConvergence("too many kernel oscillations below the truncation point")
    edges = np.concatenate([[0.0], inside, [truncation]])
    # subdivide the first lobe, which carries the 1/sqrt(x) steepness of the kernel
    first = np.linspace(0.0, edges[1], 5)
    edges = np.concatenate([first, edges[2:]])
    quad = integrate(integrand, edges, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)

    lobe_values = np.zeros(len(inside) + 1)
    lobe_index = np.searchsorted(inside, [p[0] for p in quad.panels], side="right")
    for idx, (_, _, value) in zip(lobe_index, quad.panels):
        lobe_values[idx] += value
    partial = np.cumsum(lobe_values)
    direct = float(partial[-1])
    tail = partial[_DIRECT_PANELS:]
    if len(tail) >= 4:
        window = tail[-12:]
        accelerated = _iterated_average(window)
        extrapolation_error = abs(accelerated - direct)
        value = accelerated
    else:
        extrapolation_error = 0.0
        value = direct
    error = float(quad.error) + extrapolation_error
    tol = max(cfg.abs_tol, cfg.rel_tol * abs(value))
    return IntegralResult(value, error, bool(quad.converged and error <= tol))


# ---------------------------------------------------------------------------
# P(I) as a Fourier-Bessel integral over K


def k_integrand_log_envelope(s: PhysicalGaussianState, K):
    r"""Log of the non-oscillatory part :math:`e^{K/2} e^{-K(\alpha^2+\beta^2)/4} I_0(K(\alpha^2-\beta^2)/4)`."""
    alpha, beta = s.alpha, s.beta
    K = np.asarray(K, dtype=float)
    arg = 0.25 * K * (alpha**2 - beta**2)
    return 0.5 * K - 0.25 * K * (alpha**2 + beta**2) + np.asarray(specfun.log_bessel_i0(arg))


def detect_k_divergence(s: PhysicalGaussianState, start: float = 50.0, decades: int = 2) -> bool:
    """True when the K-integrand grows exponentially.

    The log-envelope is sampled on a geometric grid starting at ``start`` and
    smoothed by fitting a straight line in ``K`` over each decade; growth is
    declared when the fitted slope is positive on every one of ``decades``
    consecutive decades.
    """
    for d in range(decades):
        K = start * 10.0 ** (d + np.linspace(0.0, 1.0, 21))
        slope = np.polyfit(K, k_integrand_log_envelope(s, K), 1)[0]
        if slope <= 0:
            return False
    return True


def p_of_I_kintegral(s: PhysicalGaussianState, I: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IntegralResult:
    r""":math:`P(I) = \int_0^\infty e^{K/2} J_0(2\sqrt{IK}) e^{-K(\alpha^2+\beta^2)/4} I_0(K(\alpha^2-\beta^2)/4)\,dK`.

    Returns a result with ``diverged=True`` when the integrand grows, which is
    the case exactly for squeezed states.

    Raises:
        Inconclusive: ``beta`` is within ``BOUNDARY_EPS`` of one.
    """
    if I < 0:
        raise ValueError("I must be nonnegative")
    alpha, beta = s.alpha, s.beta
    if abs(beta - 1.0) <= BOUNDARY_EPS:
        raise Inconclusive("K-integral is marginal at β = 1; neither convergence nor growth can be decided")
    if detect_k_divergence(s):
        return IntegralResult(float("nan"), 0.0, converged=False, diverged=True)
    decay = 0.5 * (beta**2 - 1.0)
    if decay <= 0:
        # growth too slow to show by K = 5000; treat as not convergent
        return IntegralResult(float("nan"), 0.0, converged=False)
    arg_scale = 0.25 * (alpha**2 - beta**2)

    def h(K):
        return np.exp(-decay * K) * np.asarray(specfun.bessel_i0e(arg_scale * K))

    return fourier_bessel(h, I, _exponential_truncation(decay, cfg), cfg)


# ---------------------------------------------------------------------------
# identity checks


def verify_laplace_bessel_i0(a: float, b: float, c: float, cfg: QuadratureConfig = DEFAULT_CONFIG):
    r"""Both sides of :math:`\int_0^\infty e^{-ax} J_0(2\sqrt{bx}) I_0(cx)\,dx
    = (a^2-c^2)^{-1/2} \exp(-ab/(a^2-c^2))\, I_0(cb/(a^2-c^2))`.

    Returns ``(lhs, rhs)`` as :class:`IntegralResult` values; the right-hand
    side is exact up to rounding.
    """
    if not (a > abs(c) and b > 0):
        raise ValueError("requires a > |c| >= 0 and b > 0")
    rate = a - abs(c)

    def f(x):
        return np.exp(-rate * x) * np.asarray(specfun.bessel_i0e(c * x))

    lhs = fourier_bessel(f, b, _exponential_truncation(rate, cfg), cfg)
    d = a * a - c * c
    arg = c * b / d
    rhs = d**-0.5 * math.exp(-a * b / d + abs(arg)) * specfun.bessel_i0e(arg)
    return lhs, IntegralResult(rhs, 0.0, True)


def verify_hypergeom_moment(a: float, b: float, n: int, cfg: QuadratureConfig = DEFAULT_CONFIG):
    r"""Both sides of :math:`\int_0^\infty e^{-ax} x^n I_0(bx)\,dx
    = \frac{n!}{a^{n+1}} F\bigl(\tfrac{n+1}{2}, \tfrac{n}{2}+1; 1; b^2/a^2\bigr)`.

    The integral is computed relative to ``n!/a^(n+1)`` so that the
    tolerances apply to an O(1) quantity, then scaled back.
    """
    if not (a > abs(b) >= 0):
        raise ValueError("requires a > |b| >= 0")
    if n < 0 or n > 50:
        raise ValueError("n must lie in 0..50")
    rate = a - abs(b)
    log_scale = math.lgamma(n + 1) - (n + 1) * math.log(a)

    def f(x):
        log_term = -rate * x - log_scale
        if n > 0:
            with np.errstate(divide="ignore"):
                log_term = log_term + n * np.log(x)
        return np.exp(log_term) * np.asarray(specfun.bessel_i0e(b * x))

    peak = max(n / rate, 1.0)

    def log_env(x):
        return -rate * x + n * math.log(x) - log_scale

    end = cfg.truncation_margin * _solve_decay(log_env, peak, math.log(cfg.abs_tol * 1e-3))
    points = _breakpoints(max(peak / 8.0, 0.05), min(4.0 * peak + 10.0 / rate, end), end)
    quad = integrate(f, points, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)
    scale = math.exp(log_scale)
    lhs = IntegralResult(float(quad.value) * scale, float(quad.error) * scale, quad.converged)
    rhs_value = scale * specfun.gauss_2f1(0.5 * (n + 1), 0.5 * n + 1.0, 1.0, (b / a) ** 2)
    return lhs, IntegralResult(rhs_value, 0.0, True)
