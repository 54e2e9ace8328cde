r"""Centered Gaussian Wigner states of a single mode.

A state is fixed by a real symmetric matrix ``G = [[A, B], [B, C]]`` through

.. math::

    W_G(q, p) = \frac{\sqrt{\det G}}{\pi} \exp\bigl(-(q, p)\, G\, (q, p)^T\bigr),

with the quadratures normalised so that ``a = (q + i p) / sqrt(2)``. A
rotation brings ``G`` to ``diag(1/alpha**2, 1/beta**2)``; here the normal form
is ordered so that ``alpha >= beta``, which makes ``beta < 1`` the signature of
squeezing.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import DistributionValued, Marginal, NotPositive, UncertaintyViolated

BOUNDARY_EPS = specfun.BOUNDARY_EPS


@dataclass(frozen=True)
class GMatrix:
    A: float
    B: float
    C: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.A, self.B, self.C)):
            raise ValueError("G matrix entries must be finite")

    @property
    def det(self) -> float:
        return self.A * self.C - self.B * self.B

    def as_array(self) -> np.ndarray:
        return np.array([[self.A, self.B], [self.B, self.C]])

    @classmethod
    def from_array(cls, g) -> "GMatrix":
        g = np.asarray(g, dtype=float)
        if g.shape != (2, 2) or g[0, 1] != g[1, 0]:
            raise ValueError("G must be a symmetric 2x2 matrix")
        return cls(float(g[0, 0]), float(g[0, 1]), float(g[1, 1]))

    @classmethod
    def parse(cls, text: str) -> "GMatrix":
        """Parse the ``A,B,C`` form used on the command line."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError("expected three comma-separated numbers A,B,C")
        return cls(*(float(p) for p in parts))


@dataclass(frozen=True)
class NormalForm:
    """Rotation-reduced parameters: ``R(theta)^T G R(theta) = diag(1/alpha^2, 1/beta^2)``."""

    alpha: float
    beta: float
    theta: float

    def rotation(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class NoiseMatrix:
    var_q: float
    cov_qp: float
    var_p: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.var_q, self.cov_qp], [self.cov_qp, self.var_p]])

    @property
    def det(self) -> float:
        return self.var_q * self.var_p - self.cov_qp**2


class StateKind(enum.Enum):
    CLASSICAL = "Classical"
    WEAKLY_NONCLASSICAL = "WeaklyNonclassical"
    STRONGLY_NONCLASSICAL = "StronglyNonclassical"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class StateClass:
    kind: StateKind
    marginal: bool
    note: str = ""

    def describe(self) -> str:
        text = str(self.kind)
        if self.marginal:
            text += ", marginal: " + self.note
        return text


@dataclass(frozen=True)
class PhysicalGaussianState:
    """A validated state. Build it with :func:`validate` or :meth:`from_alpha_beta`."""

    g: GMatrix
    delta: float
    normal: NormalForm = field(repr=False)

    @property
    def alpha(self) -> float:
        return self.normal.alpha

    @property
    def beta(self) -> float:
        return self.normal.beta

    @classmethod
    def from_alpha_beta(cls, alpha: float, beta: float, theta: float = 0.0) -> "PhysicalGaussianState":
        """State with ``G = R diag(1/alpha^2, 1/beta^2) R^T``; ``alpha`` and ``beta`` in any order."""
        if not (alpha > 0 and beta > 0):
            raise NotPositive("normalisability: alpha and beta must be > 0")
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        g = rot @ np.diag([alpha**-2, beta**-2]) @ rot.T
        # symmetrise explicitly; the product can differ in the last bit
        b = 0.5 * (g[0, 1] + g[1, 0])
        return validate(GMatrix(float(g[0, 0]), float(b), float(g[1, 1])))

    def rotated(self, theta: float) -> "PhysicalGaussianState":
        """The state with Wigner function rotated by ``theta``: ``G -> R G R^T``."""
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        g = rot @ self.g.as_array() @ rot.T
        b = 0.5 * (g[0, 1] + g[1, 0])
        return validate(GMatrix(float(g[0, 0]), float(b), float(g[1, 1])))


def validate(g: GMatrix) -> PhysicalGaussianState:
    """Check the physicality conditions ``A + C > 0`` and ``0 < det G <= 1``.

    The upper bound on ``det G`` is the uncertainty principle; it is accepted
    up to a relative slack of ``BOUNDARY_EPS`` so that pure states built in
    floating point are not rejected.

    Raises:
        NotPositive: ``G`` is not positive definite.
        UncertaintyViolated: ``det G > 1``.
    """
    delta = g.det
    if not (g.A + g.C > 0) or not (delta > 0):
        raise NotPositive("normalisability: A + C must be > 0 and det G must be > 0")
    if delta > 1.0 + BOUNDARY_EPS:
        raise UncertaintyViolated("uncertainty: det G must be ≤ 1 (got det G = %.12g)" % delta)
    return PhysicalGaussianState(g=g, delta=delta, normal=normal_form(g))


def normal_form(g: GMatrix) -> NormalForm:
    r"""Diagonalise ``G`` by a rotation.

    ``theta`` is the angle of the eigenvector belonging to the smaller
    eigenvalue ``1/alpha**2``, reduced to ``[0, pi)``; it is 0 for an
    isotropic ``G``.
    """
    mean = 0.5 * (g.A + g.C)
    half_gap = math.hypot(0.5 * (g.A - g.C), g.B)
    lam_max = mean + half_gap
    lam_min = g.det / lam_max
    alpha = 1.0 / math.sqrt(lam_min)
    beta = 1.0 / math.sqrt(lam_max)
    if half_gap <= BOUNDARY_EPS * mean:
        return NormalForm(alpha=alpha, beta=beta, theta=0.0)
    # the eigenvector of lam_max sits at angle phi; the alpha axis is orthogonal to it
    phi = 0.5 * math.atan2(2.0 * g.B, g.A - g.C)
    theta = math.fmod(phi + 0.5 * math.pi, math.pi)
    if theta < 0:
        theta += math.pi
    if theta >= math.pi:
        theta -= math.pi
    return NormalForm(alpha=alpha, beta=beta, theta=theta)


def _near_one(value: float) -> bool:
    return abs(value - 1.0) <= BOUNDARY_EPS


def classify(s: PhysicalGaussianState) -> StateClass:
    """Place the state in the classical / weakly / strongly nonclassical hierarchy.

    For centered Gaussian states the answer depends only on ``beta``: the state
    is classical when it is not squeezed and strongly nonclassical otherwise.
    The weakly nonclassical class never occurs.
    """
    alpha, beta = s.alpha, s.beta
    notes = []
    if _near_one(alpha) and _near_one(beta):
        notes.append("vacuum (α=β=1)")
    elif _near_one(beta):
        notes.append("unsqueezed quadrature at vacuum level (β=1)")
    if beta < 1.0 - BOUNDARY_EPS and _near_one(alpha * beta):
        notes.append("squeezed vacuum (αβ=1)")
    if beta >= 1.0 - BOUNDARY_EPS:
        kind = StateKind.CLASSICAL
    else:
        kind = StateKind.STRONGLY_NONCLASSICAL
    return StateClass(kind=kind, marginal=bool(notes), note="; ".join(notes))


def wigner_eval(s: PhysicalGaussianState, q, p):
    """Wigner function at ``(q, p)``; broadcasts over arrays."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    g = s.g
    quad = g.A * q * q + 2.0 * g.B * q * p + g.C * p * p
    out = math.sqrt(s.delta) / math.pi * np.exp(-quad)
    return float(out) if out.ndim == 0 else out


def variance_matrix(s: PhysicalGaussianState) -> NoiseMatrix:
    """``V = G^{-1} / 2``."""
    g = s.g
    scale = 0.5 / s.delta
    return NoiseMatrix(var_q=scale * g.C, cov_qp=-scale * g.B, var_p=scale * g.A)


def wigner_ft(s: PhysicalGaussianState, sigma, tau):
    r"""Characteristic function :math:`\iint W e^{i(\tau p - \sigma q)}\,dq\,dp`.

    Equals ``exp(-alpha^2 sigma^2/4 - beta^2 tau^2/4)`` in the normal frame.
    """
    sigma = np.asarray(sigma, dtype=float)
    tau = np.asarray(tau, dtype=float)
    v = variance_matrix(s)
    quad = v.var_q * sigma**2 - 2.0 * v.cov_qp * sigma * tau + v.var_p * tau**2
    out = np.exp(-0.5 * quad)
    return float(out) if out.ndim == 0 else out


def angular_average(s: PhysicalGaussianState, L):
    r"""Angle integral :math:`\int_0^{2\pi} W(\sqrt{2L}\cos\chi, \sqrt{2L}\sin\chi)\,d\chi`.

    Evaluated as ``2/(alpha beta) exp(-L(a - |c|)) i0e(L |c|)`` with
    ``a = 1/alpha^2 + 1/beta^2``, ``c = 1/alpha^2 - 1/beta^2``.
    """
    L = np.asarray(L, dtype=float)
    if np.any(L < 0):
        raise ValueError("L must be nonnegative")
    alpha, beta = s.alpha, s.beta
    a = alpha**-2 + beta**-2
    c = abs(alpha**-2 - beta**-2)
    out = 2.0 / (alpha * beta) * np.exp(-L * (a - c)) * np.asarray(specfun.bessel_i0e(L * c))
    return float(out) if out.ndim == 0 else out


def phi_density(s: PhysicalGaussianState, x, y):
    r"""Diagonal coherent-state weight :math:`\phi` where it is an ordinary function.

    ``x`` and ``y`` are the phase-space coordinates of ``z = (x + i y)/sqrt(2)``
    in the frame of the original ``G``. Normalised to one under
    ``dx dy / (2 pi)``.

    Raises:
        DistributionValued: the state is squeezed (``beta < 1``).
        Marginal: ``alpha`` or ``beta`` equals one and phi contains a delta function.
    """
    alpha, beta, theta = s.alpha, s.beta, s.normal.theta
    if beta < 1.0 - BOUNDARY_EPS:
        raise DistributionValued(
            "phi is distribution-valued for squeezed states (β = %.6g < 1): its Fourier "
            "transform grows like a Gaussian" % beta
        )
    if _near_one(beta):
        if _near_one(alpha):
            raise Marginal("phi = 2π δ(x) δ(y) for the vacuum (α = β = 1)")
        raise Marginal(
            "phi ∝ δ(y') with y' the coordinate along angle %.6g rad (β = 1): "
            "phi = sqrt(2π) δ(y') sqrt(2) (α²-1)^(-1/2) exp(-x'²/(α²-1))" % (theta + 0.5 * math.pi)
        )
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c, sn = math.cos(theta), math.sin(theta)
    xr = c * x + sn * y
    yr = -sn * x + c * y
    u = alpha**2 - 1.0
    v = beta**2 - 1.0
    out = 2.0 / math.sqrt(u * v) * np.exp(-xr**2 / u - yr**2 / v)
    return float(out) if out.ndim == 0 else out


def mean_photon(s: PhysicalGaussianState) -> float:
    r"""Mean photon number :math:`\langle a^\dagger a\rangle = (V_{qq} + V_{pp} - 1)/2`."""
    v = variance_matrix(s)
    return 0.5 * (v.var_q + v.var_p - 1.0)
