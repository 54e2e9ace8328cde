import math

import numpy as np
import pytest

from wignerclass.gaussian_state import PhysicalGaussianState
from wignerclass.photon_stats import PhotonDistribution

SQRT3 = math.sqrt(3.0)


def state(alpha, beta, theta=0.0):
    return PhysicalGaussianState.from_alpha_beta(alpha, beta, theta)


def geometric_distribution(nbar, n_max=200):
    """Exact thermal law nbar^n / (nbar + 1)^(n + 1) with its exact tail."""
    ratio = nbar / (nbar + 1.0)
    probs = np.array([ratio**n / (nbar + 1.0) for n in range(n_max + 1)])
    return PhotonDistribution(probs, n_max, ratio ** (n_max + 1))


def poisson_distribution(lam, n_max=80):
    probs = np.array([math.exp(-lam + n * math.log(lam) - math.lgamma(n + 1)) for n in range(n_max + 1)])
    return PhotonDistribution(probs, n_max, max(0.0, 1.0 - math.fsum(probs)))


def random_valid_alpha_beta(rng, alpha_max=3.0):
    """(alpha, beta) with alpha >= beta and alpha beta >= 1, both regimes represented."""
    alpha = rng.uniform(1.0, alpha_max)
    beta = rng.uniform(1.0 / alpha, alpha)
    return alpha, beta


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
