"""Identity checks shared by the ``verify`` command and the test-suite.

Each check returns a :class:`CheckResult` carrying the worst observed error
and the tolerance it was held to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from . import photon_stats, quadrature
from .gaussian_state import PhysicalGaussianState


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = "%s %s worst=%.3e tol=%.1e" % (status, self.name, self.worst, self.tolerance)
        return text + (" " + self.detail if self.detail else "")


def _relative(lhs, rhs) -> float:
    """Relative difference of two :class:`IntegralResult` values; inf if either failed."""
    if not (lhs.converged and rhs.converged):
        return math.inf
    return abs(lhs.value - rhs.value) / max(abs(rhs.value), 1e-300)


def check_laplace_bessel_i0(points: int = 25, seed: int = 7, tol: float = 1e-7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        a = rng.uniform(0.5, 3.0)
        c = rng.uniform(-0.9, 0.9) * a
        b = rng.uniform(0.1, 3.0)
        lhs, rhs = quadrature.verify_laplace_bessel_i0(a, b, c)
        worst = max(worst, _relative(lhs, rhs))
    return CheckResult("laplace_bessel_i0", worst <= tol, worst, tol, "(%d points)" % points)


def check_hypergeom_moment(points: int = 25, seed: int = 11, tol: float = 1e-7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        a = rng.uniform(0.5, 3.0)
        b = rng.uniform(-0.9, 0.9) * a
        n = int(rng.integers(0, 11))
        lhs, rhs = quadrature.verify_hypergeom_moment(a, b, n)
        worst = max(worst, _relative(lhs, rhs))
    return CheckResult("hypergeom_moment", worst <= tol, worst, tol, "(%d points)" % points)


def check_fourier_bessel_round_trip(samples=tuple(0.5 * k for k in range(10)), tol: float = 1e-6) -> CheckResult:
    """Transform ``exp(-I)`` twice numerically; the transform is its own inverse."""
    cfg = quadrature.DEFAULT_CONFIG
    truncation = 60.0

    def forward(K):
        return np.array([quadrature.fourier_bessel(lambda x: np.exp(-x), float(k), truncation, cfg).value
                         for k in np.atleast_1d(K)])

    worst = 0.0
    for I in samples:
        back = quadrature.fourier_bessel(forward, I, truncation, cfg)
        worst = max(worst, _relative(back, quadrature.IntegralResult(math.exp(-I), 0.0, True)))
    return CheckResult("fourier_bessel_round_trip", worst <= tol, worst, tol, "(I = %s)" % list(samples))


def oracle_grid(size: int = 20, alpha_max: float = 4.0):
    """Grid of valid ``(alpha, beta)`` pairs including the lines ``beta = 1`` and ``alpha beta = 1``.

    ``alpha`` runs over ``size`` values in ``[1.05, alpha_max]``; for each the
    ``beta`` values run from ``1/alpha`` to ``alpha`` with the node nearest one
    moved onto ``beta = 1``.
    """
    pairs = []
    for alpha in np.linspace(1.05, alpha_max, size):
        betas = np.linspace(1.0 / alpha, alpha, size)
        betas[np.argmin(np.abs(betas - 1.0))] = 1.0
        pairs.extend((float(alpha), float(b)) for b in betas)
    return pairs


def check_closed_vs_oracle(size: int = 6, n_max: int = 30) -> CheckResult:
    """``|pnd_closed - radial_pnd| <= max(1e-12, 1e-8 p)`` over :func:`oracle_grid`."""
    worst = 0.0
    for alpha, beta in oracle_grid(size):
        s = PhysicalGaussianState.from_alpha_beta(alpha, beta)
        radial = quadrature.radial_pnd_all(s, n_max, quadrature.TIGHT_CONFIG)
        for n in range(n_max + 1):
            p = photon_stats.pnd_closed(s, n)
            worst = max(worst, abs(p - radial[n].value) / max(1e-12, 1e-8 * abs(p)))
    return CheckResult("closed_vs_radial_oracle", worst <= 1.0, worst, 1.0,
                       "(%dx%d grid, n <= %d; error in units of max(1e-12, 1e-8 p))" % (size, size, n_max))


def run_identity_suite() -> List[CheckResult]:
    return [
        check_laplace_bessel_i0(),
        check_hypergeom_moment(),
        check_fourier_bessel_round_trip(),
        check_closed_vs_oracle(),
    ]
