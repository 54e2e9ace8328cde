r"""Photon statistics of centered Gaussian states.

The photon-number probabilities have two closed forms. For a nonsqueezed
state (``alpha, beta > 1``)

.. math::

    p(n) = \frac{2}{\sqrt{uv}} \Bigl[\frac{uv}{w}\Bigr]^{n+1}
           F\bigl(\tfrac{n+1}{2}, \tfrac{n}{2}+1; 1; z\bigr),\qquad
    z = \Bigl(\frac{\alpha^2-\beta^2}{w}\Bigr)^2,

with ``u = alpha^2 - 1``, ``v = beta^2 - 1``, ``w = alpha^2 beta^2 - 1``. For a
squeezed state the analytic continuation to ``z > 1`` splits into separate
even-``n`` and odd-``n`` expressions in ``1/z``. On the two lines where these
are singular (``beta = 1`` and ``alpha beta = 1``) the probabilities come
from a finite series read off the factorised generating function; the radial
integral of :mod:`wignerclass.quadrature` is kept as an independent oracle.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import quadrature, specfun
from .errors import (
    DistributionValued,
    HypergeometricDivergence,
    Marginal,
    NonConvergence,
    NumericalError,
    VacuumDegenerate,
)
from .gaussian_state import BOUNDARY_EPS, PhysicalGaussianState, mean_photon

NEGATIVE_ZERO = 1e-14
_NOISE_FLOOR = 1e-15


class Regime(enum.Enum):
    NONSQUEEZED = "Nonsqueezed"
    SQUEEZED = "Squeezed"
    MARGINAL_BETA1 = "MarginalBeta1"
    SQUEEZED_VACUUM = "SqueezedVacuum"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RegimeTag:
    regime: Regime
    # "closed" or "series" (generating-function fallback on the marginal lines)
    route: str = "closed"


def regime(s: PhysicalGaussianState) -> Regime:
    beta, alpha = s.beta, s.alpha
    if abs(beta - 1.0) <= BOUNDARY_EPS:
        return Regime.MARGINAL_BETA1
    if beta > 1.0:
        return Regime.NONSQUEEZED
    if abs(alpha * beta - 1.0) <= BOUNDARY_EPS:
        return Regime.SQUEEZED_VACUUM
    return Regime.SQUEEZED


def _clamp(value: float, what: str) -> float:
    if value < 0.0:
        if value > -NEGATIVE_ZERO:
            return 0.0
        raise NumericalError("%s came out negative (%.3e)" % (what, value))
    return value


# ---------------------------------------------------------------------------
# closed forms


def _log_pnd_nonsqueezed(alpha: float, beta: float, n: int, budget) -> float:
    a2, b2 = alpha * alpha, beta * beta
    u, v, w = a2 - 1.0, b2 - 1.0, a2 * b2 - 1.0
    z = ((a2 - b2) / w) ** 2
    # 1 - z = (alpha^4 - 1)(beta^4 - 1) / w^2, computed without cancellation
    one_minus_z = u * v * (a2 + 1.0) * (b2 + 1.0) / (w * w)
    log_uv = math.log(u) + math.log(v)
    log_f = specfun.log_gauss_2f1(0.5 * (n + 1), 0.5 * n + 1.0, 1.0, z, one_minus_z, budget)
    return math.log(2.0) - 0.5 * log_uv + (n + 1) * (log_uv - math.log(w)) + log_f


def _log_gamma_ratio(m: int, shift: float) -> float:
    # log(Gamma(m + shift) / m!) with shift 1/2 or 3/2
    k = m if shift == 0.5 else m + 1
    if k <= 150:
        return math.log(specfun.gamma_half(k)) - math.lgamma(m + 1)
    return specfun.log_gamma_half(k) - math.lgamma(m + 1)


def _log_pnd_squeezed(alpha: float, beta: float, n: int, budget) -> float:
    a2, b2 = alpha * alpha, beta * beta
    u, v, w = a2 - 1.0, 1.0 - b2, a2 * b2 - 1.0
    d = a2 - b2
    log_z = 2.0 * (math.log(d) - math.log(w))
    x = (w / d) ** 2
    # 1 - 1/z = u v (alpha^2 + 1)(beta^2 + 1) / (alpha^2 - beta^2)^2
    one_minus_x = u * v * (a2 + 1.0) * (b2 + 1.0) / (d * d)
    log_pref = (
        math.log(2.0 / math.sqrt(math.pi))
        + (n + 0.5) * (math.log(u) + math.log(v))
        - (n + 1) * math.log(w)
        - 0.5 * (n + 1) * log_z
    )
    m = n // 2
    if n % 2 == 0:
        c = m + 0.5
        log_f = specfun.log_gauss_2f1(c, c, 0.5, x, one_minus_x, budget)
        return log_pref + _log_gamma_ratio(m, 0.5) + log_f
    c = m + 1.5
    log_f = specfun.log_gauss_2f1(c, c, 1.5, x, one_minus_x, budget)
    return log_pref + math.log(2.0) - 0.5 * log_z + _log_gamma_ratio(m, 1.5) + log_f


def _half_binomials(n_max: int) -> np.ndarray:
    # (1/2)_k / k!
    c = np.ones(n_max + 1)
    for k in range(1, n_max + 1):
        c[k] = c[k - 1] * (k - 0.5) / k
    return c


def _marginal_series(s: PhysicalGaussianState, n_max: int) -> np.ndarray:
    r"""``p(0..n_max)`` from the factorised generating function.

    .. math::

        \sum_n p(n) t^n = 2\,(A - t u)^{-1/2} (B - t v)^{-1/2},
        \quad A, B = \alpha^2 + 1, \beta^2 + 1,\ u, v = \alpha^2 - 1, \beta^2 - 1

    so ``p(n)`` is a finite Cauchy product of two binomial series. Near
    ``beta = 1`` the ``v`` factor is a tiny perturbation and the sum has no
    cancellation. On ``alpha beta = 1`` the product of the two factors is even
    in ``t``; odd terms are then exactly zero and the even ones a single series
    in ``r^2 = -(u/A)(v/B)``.
    """
    a2, b2 = s.alpha**2, s.beta**2
    A, B = a2 + 1.0, b2 + 1.0
    x, y = (a2 - 1.0) / A, (b2 - 1.0) / B
    pref = 2.0 / math.sqrt(A * B)
    c = _half_binomials(n_max)
    if regime(s) is Regime.SQUEEZED_VACUUM:
        r2 = -x * y
        out = np.zeros(n_max + 1)
        m = np.arange(n_max // 2 + 1)
        out[0::2] = pref * c[m] * r2**m
        return out
    k = np.arange(n_max + 1)
    return pref * np.convolve(c * x**k, c * y**k)[: n_max + 1]


def pnd_closed_tagged(s: PhysicalGaussianState, n: int, budget=specfun.DEFAULT_BUDGET):
    """Like :func:`pnd_closed` but also returns the :class:`RegimeTag` used."""
    if n < 0 or n > 200:
        raise ValueError("n must lie in 0..200")
    reg = regime(s)
    try:
        if reg is Regime.NONSQUEEZED:
            log_p = _log_pnd_nonsqueezed(s.alpha, s.beta, n, budget)
        elif reg is Regime.SQUEEZED:
            log_p = _log_pnd_squeezed(s.alpha, s.beta, n, budget)
        else:
            log_p = None
    except HypergeometricDivergence:
        log_p = None
    if log_p is not None:
        return math.exp(log_p), RegimeTag(reg, "closed")
    value = _marginal_series(s, n)[n]
    return _clamp(value, "p(%d)" % n), RegimeTag(reg, "series")


def pnd_closed(s: PhysicalGaussianState, n: int, budget=specfun.DEFAULT_BUDGET) -> float:
    """Probability of ``n`` photons from the hypergeometric closed forms.

    The closed forms are singular on the marginal lines ``beta = 1`` and
    ``alpha beta = 1``. States there, and nonsqueezed states so close to
    ``beta = 1`` that the hypergeometric series signals divergence, are
    evaluated from the factorised generating function instead; the radial
    integral in :mod:`wignerclass.quadrature` stays an independent check.
    """
    return pnd_closed_tagged(s, n, budget)[0]


def pnd_batch(s: PhysicalGaussianState, n_max: int, budget=specfun.DEFAULT_BUDGET) -> np.ndarray:
    """``p(0..n_max)`` as an array; marginal states use a single series pass."""
    reg = regime(s)
    if reg in (Regime.MARGINAL_BETA1, Regime.SQUEEZED_VACUUM):
        values = _marginal_series(s, n_max)
        return np.array([_clamp(v, "p(%d)" % n) for n, v in enumerate(values)])
    return np.array([pnd_closed(s, n, budget) for n in range(n_max + 1)])


def pnd_low_order(s: PhysicalGaussianState, n: int) -> float:
    """Explicit polynomial forms of ``p(0)`` to ``p(5)``."""
    a2, b2 = s.alpha**2, s.beta**2
    S = (a2 + 1.0) * (b2 + 1.0)
    d = (a2 - b2) ** 2
    w = a2 * b2 - 1.0
    if n == 0:
        return 2.0 * S**-0.5
    if n == 1:
        return 2.0 * w * S**-1.5
    if n == 2:
        return (d + 2.0 * w**2) * S**-2.5
    if n == 3:
        return w * (3.0 * d + 2.0 * w**2) * S**-3.5
    if n == 4:
        return 0.25 * (3.0 * d**2 + 24.0 * d * w**2 + 8.0 * w**4) * S**-4.5
    if n == 5:
        return 0.25 * w * (15.0 * d**2 + 40.0 * d * w**2 + 8.0 * w**4) * S**-5.5
    raise ValueError("explicit forms exist for n = 0..5 only")


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class PhotonDistribution:
    """Probabilities ``p(0..n_max)`` with a bound on the mass beyond ``n_max``."""

    probs: np.ndarray
    n_max: int
    tail_bound: float

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or len(probs) != self.n_max + 1:
            raise ValueError("probs must hold n_max + 1 entries")
        if np.any(probs < -NEGATIVE_ZERO):
            raise ValueError("negative probability below rounding level")
        probs = np.maximum(probs, 0.0)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        total = math.fsum(probs) + self.tail_bound
        if not (self.tail_bound >= 0 and abs(total - 1.0) <= 1e-8):
            raise ValueError("probabilities plus tail bound must sum to 1 (got %.12g)" % total)

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, n):
        return self.probs[n]

    def mean(self) -> float:
        return math.fsum(np.arange(len(self.probs)) * self.probs)


def _envelope_tail(probs: np.ndarray) -> Optional[float]:
    """Geometric tail bound from two-step ratios of the last terms, or None."""
    N = len(probs) - 1
    if N < 7:
        return None
    ratios = []
    for k in range(N - 5, N - 1):
        # entries at quadrature noise level (e.g. odd n of a squeezed vacuum) carry no ratio
        if probs[k + 2] <= _NOISE_FLOOR:
            continue
        if probs[k] <= _NOISE_FLOOR:
            return None
        ratios.append(probs[k + 2] / probs[k])
    if not ratios:
        return 2.0 * _NOISE_FLOOR
    r2 = max(ratios)
    if r2 >= 1.0:
        return None
    return (probs[N - 1] + probs[N]) * r2 / (1.0 - r2)


def _is_vacuum(s: PhysicalGaussianState) -> bool:
    return abs(s.alpha - 1.0) <= BOUNDARY_EPS and abs(s.beta - 1.0) <= BOUNDARY_EPS


def full_distribution(s: PhysicalGaussianState, target_tail: float = 1e-12,
                      budget=specfun.DEFAULT_BUDGET) -> PhotonDistribution:
    """Photon distribution truncated where the tail is certified below ``target_tail``.

    The tail is bounded by a geometric envelope through the last computed
    probabilities, with the ratio taken from consecutive two-step ratios so
    that parity-alternating distributions are handled. Independently the
    exact mean photon number bounds the tail through
    ``sum_{n>N} p(n) <= (mean - sum_{n<=N} n p(n)) / (N + 1)``; both must be
    below the target.

    Raises:
        NonConvergence: the tail cannot be certified by ``n = 200``.
    """
    if not (1e-14 <= target_tail <= 1e-4):
        raise ValueError("target_tail must lie in [1e-14, 1e-4]")
    if _is_vacuum(s):
        return PhotonDistribution(np.array([1.0]), 0, 0.0)
    mean = mean_photon(s)
    probs = pnd_batch(s, 15, budget)
    N = 7
    while True:
        head = probs[: N + 1]
        envelope = _envelope_tail(head)
        if envelope is not None:
            mean_tail = max(0.0, mean - math.fsum(np.arange(N + 1) * head)) / (N + 1)
            exact_tail = max(0.0, 1.0 - math.fsum(head))
            bound = max(envelope, exact_tail)
            if bound <= target_tail and mean_tail <= target_tail:
                return PhotonDistribution(head.copy(), N, bound)
        N += 1
        if N > 200:
            raise NonConvergence("could not certify a tail below %.1e by n = 200" % target_tail)
        if N >= len(probs):
            probs = pnd_batch(s, min(200, len(probs) + 32), budget)


# ---------------------------------------------------------------------------
# intensity distribution P(I)


def _require_classical(s: PhysicalGaussianState) -> None:
    alpha, beta = s.alpha, s.beta
    if beta < 1.0 - BOUNDARY_EPS:
        raise DistributionValued(
            "P(I) is a distribution for squeezed states (β = %.6g < 1): it is no longer the "
            "Fourier-Bessel transform of a square-integrable function" % beta
        )
    if beta <= 1.0 + BOUNDARY_EPS or alpha <= 1.0 + BOUNDARY_EPS:
        raise Marginal("P(I) contains a delta-function component at α = 1 or β = 1")


def p_of_I(s: PhysicalGaussianState, I):
    r"""Intensity density :math:`P(I)` of a classical state (``alpha, beta > 1``).

    .. math::

        P(I) = \frac{2}{\sqrt{uv}} \exp\bigl[-I(1/u + 1/v)\bigr]
               I_0\bigl[I(1/u - 1/v)\bigr]

    evaluated with the exponentially scaled Bessel function.

    Raises:
        DistributionValued: for squeezed states.
        Marginal: for ``alpha = 1`` or ``beta = 1``.
    """
    _require_classical(s)
    I = np.asarray(I, dtype=float)
    if np.any(I < 0):
        raise ValueError("I must be nonnegative")
    u, v = s.alpha**2 - 1.0, s.beta**2 - 1.0
    plus = 1.0 / u + 1.0 / v
    minus = abs(1.0 / u - 1.0 / v)
    out = 2.0 / math.sqrt(u * v) * np.exp(-I * (plus - minus)) * np.asarray(specfun.bessel_i0e(I * minus))
    return float(out) if out.ndim == 0 else out


def p_of_I_decay_rate(s: PhysicalGaussianState) -> float:
    """Exponential decay rate of ``P(I)``: ``2 / max(u, v)``."""
    return 2.0 / (s.alpha**2 - 1.0)


def pnd_from_p_of_I(s: PhysicalGaussianState, n: int,
                    cfg: quadrature.QuadratureConfig = quadrature.TIGHT_CONFIG) -> float:
    r"""``p(n)`` as the quadrature :math:`\int_0^\infty P(I) e^{-I} I^n / n!\,dI`."""
    _require_classical(s)
    rate = 1.0 + p_of_I_decay_rate(s)
    log_norm = -math.lgamma(n + 1)

    def f(I):
        log_term = -I + log_norm
        if n > 0:
            with np.errstate(divide="ignore"):
                log_term = log_term + n * np.log(I)
        return np.asarray(p_of_I(s, I)) * np.exp(log_term)

    peak = max(n / rate, 1.0)

    def log_env(I):
        return math.log(2.0 / math.sqrt((s.alpha**2 - 1) * (s.beta**2 - 1))) + n * math.log(I) + log_norm - rate * I

    end = cfg.truncation_margin * quadrature._solve_decay(log_env, peak, math.log(cfg.abs_tol * 1e-3))
    points = quadrature._breakpoints(max(peak / 8.0, 0.05), min(4.0 * peak + 10.0 / rate, end), end)
    quad = quadrature.integrate(f, points, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)
    if not quad.converged:
        raise NonConvergence("p(n) from P(I) did not converge")
    return float(quad.value)


# ---------------------------------------------------------------------------
# generating function and its inversion


def _q_precision(K: float) -> int:
    # terms reach about e^K before cancelling; carry that many extra digits
    return 25 + int(K / math.log(10.0)) + 1


def q_generating(d: PhotonDistribution, K: float) -> float:
    r"""Generating function :math:`q(K) = \sum_n (-1)^n K^n p(n) / n!`.

    The alternating sum is accumulated in extended precision (mpmath) so that
    the only error left is the one carried by the stored probabilities. The
    omitted tail is bounded by ``tail_bound * K^(N+1)/(N+1)!``.

    Warns when ``K > 4 n_max``: the terms are then still growing at the
    truncation point and the value cannot be trusted.
    """
    import mpmath

    if K < 0:
        raise ValueError("K must be nonnegative")
    if d.tail_bound > 1e-10:
        raise ValueError("q_generating needs a distribution with tail_bound <= 1e-10")
    if K > 4 * max(d.n_max, 1):
        warnings.warn("K = %g exceeds 4 n_max = %d; cancellation makes q(K) unreliable" % (K, 4 * d.n_max),
                      RuntimeWarning, stacklevel=2)
    with mpmath.workdps(_q_precision(K)):
        Kmp = mpmath.mpf(K)
        weight = mpmath.mpf(1)
        total = mpmath.mpf(0)
        for n, p in enumerate(d.probs):
            if n:
                weight = weight * Kmp / n
            term = weight * mpmath.mpf(float(p))
            total = total - term if n % 2 else total + term
        return float(total)


def q_generating_tail_bound(d: PhotonDistribution, K: float) -> float:
    """Bound on the contribution of the photon numbers beyond ``n_max``."""
    N = d.n_max
    if K == 0:
        return 0.0
    log_w = (N + 1) * math.log(K) - math.lgamma(N + 2)
    return d.tail_bound * math.exp(min(log_w, 700.0)) if N + 1 >= K else math.inf


def p_of_I_inversion(d: PhotonDistribution, I: float,
                     cfg: quadrature.QuadratureConfig = quadrature.DEFAULT_CONFIG) -> float:
    r"""Recover :math:`P(I) = e^{I} \int_0^\infty q(K) J_0(2\sqrt{IK})\,dK` from ``d``.

    Only meaningful for classical states whose ``q(K)`` decays; it is a
    demonstration of the inversion formula rather than a general-purpose
    evaluator. The truncation point is where ``|q|`` first drops below
    ``cfg.abs_tol``, searched on a doubling grid.

    Raises:
        NonConvergence: ``|q(K)|`` stops decaying before it reaches the
            tolerance (cancellation noise, or a distribution that is not
            classical).
    """
    if I < 0:
        raise ValueError("I must be nonnegative")
    K = 1.0
    smallest = abs(q_generating(d, 0.0))
    limit = 4.0 * max(d.n_max, 1)
    while True:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            current = abs(q_generating(d, K))
        if current < cfg.abs_tol and q_generating_tail_bound(d, K) < cfg.abs_tol:
            break
        # q may oscillate, but growth well above its running minimum is cancellation noise
        if current > 10.0 * smallest or K >= limit:
            raise NonConvergence(
                "q(K) amplitude fails to decay (|q(%g)| = %.3e); the inversion integral "
                "cannot be truncated" % (K, current)
            )
        smallest = min(smallest, current)
        K *= 2.0
    truncation = K

    def q_values(x):
        return np.array([q_generating(d, float(k)) for k in x])

    res = quadrature.fourier_bessel(q_values, I, truncation, cfg)
    if not res.converged:
        raise NonConvergence("inversion integral did not converge (error %.3e)" % res.error_estimate)
    return math.exp(I) * res.value


# ---------------------------------------------------------------------------
# Mandel-type Q and the local criteria l(n)


def mandel_q(s: PhysicalGaussianState) -> float:
    r"""Closed form :math:`2\{(\alpha^2-1)^2 + (\beta^2-1)^2\} / (\alpha^2+\beta^2-2)^2`.

    This equals :math:`(\langle a^{\dagger 2} a^2\rangle - \langle n\rangle^2)/\langle n\rangle^2`
    (see :func:`moment_ratio_oracle`); it is nonnegative for every state.

    Raises:
        VacuumDegenerate: for the vacuum, where it is 0/0.
    """
    a2, b2 = s.alpha**2, s.beta**2
    denom = a2 + b2 - 2.0
    if denom <= BOUNDARY_EPS:
        raise VacuumDegenerate("Q is 0/0 for the vacuum (α² + β² - 2 = %.3g)" % denom)
    return 2.0 * ((a2 - 1.0) ** 2 + (b2 - 1.0) ** 2) / denom**2


def moment_ratio_oracle(s: PhysicalGaussianState, n_max: Optional[int] = None) -> float:
    r""":math:`(\langle n(n-1)\rangle - \langle n\rangle^2) / \langle n\rangle^2` summed from ``p(n)``.

    With ``n_max`` omitted the distribution is taken to a certified tail of
    1e-12 and then extended to twice that cutoff; otherwise ``p(0..n_max)`` is used and its tail must be below 1e-10.
    """
    if n_max is None:
        # the factorial moment weights the tail by n^2, so run well past the certified cutoff
        d = full_distribution(s, 1e-12)
        probs = pnd_batch(s, min(200, 2 * d.n_max + 20))
    else:
        probs = pnd_batch(s, n_max)
        tail = max(_envelope_tail(probs) or 0.0, 1.0 - math.fsum(probs))
        if tail > 1e-10:
            raise NonConvergence("n_max = %d leaves a tail of %.2e" % (n_max, tail))
    n = np.arange(len(probs), dtype=float)
    mean = math.fsum(n * probs)
    if mean <= BOUNDARY_EPS:
        raise VacuumDegenerate("moment ratio is 0/0 for the vacuum")
    factorial2 = math.fsum(n * (n - 1.0) * probs)
    return (factorial2 - mean**2) / mean**2


def l_criterion(d: PhotonDistribution, n: int) -> float:
    """Local criterion ``l(n) = (n+1) p(n-1) p(n+1) - n p(n)^2``; negative values witness nonclassicality."""
    if n < 1:
        raise ValueError("n must be positive")
    if n + 1 > d.n_max:
        raise ValueError("l(%d) needs p(%d) but the distribution stops at %d" % (n, n + 1, d.n_max))
    p = d.probs
    return (n + 1) * p[n - 1] * p[n + 1] - n * p[n] ** 2


def l_scan(alpha: float, betas, l_max: int = 6) -> np.ndarray:
    """Rows ``(beta, l(1), ..., l(l_max))`` for states ``(alpha, beta)``."""
    rows = []
    for beta in betas:
        s = PhysicalGaussianState.from_alpha_beta(alpha, float(beta))
        probs = pnd_batch(s, l_max + 1)
        tail = max(0.0, 1.0 - math.fsum(probs))
        d = PhotonDistribution(probs, l_max + 1, tail)
        rows.append([float(beta)] + [l_criterion(d, n) for n in range(1, l_max + 1)])
    return np.array(rows)
