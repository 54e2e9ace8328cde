r"""Coherent-amplitude Fock superpositions with a photon-number-dependent phase.

.. math::

    |\psi\rangle = e^{-|a|^2/2} \sum_n \frac{a^n}{\sqrt{n!}} e^{i\beta(n)} |n\rangle

For every phase law the photon statistics are those of the coherent state
``|a>`` (Poissonian); for a phase that is nonlinear in ``n`` the state is not
Gaussian and its Wigner function must take negative values. The Wigner
function is evaluated in displaced-parity form,

.. math::

    W(q, p) = \frac{1}{\pi} \sum_m (-1)^m \bigl|\langle m| D(-\gamma) |\psi\rangle\bigr|^2,
    \qquad \gamma = (q + i p)/\sqrt{2},

normalised to one under ``dq dp``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import specfun

MAX_CUTOFF = 400
TAIL_WARNING = 1e-8


class PhaseKind(enum.Enum):
    ZERO = "Zero"
    LINEAR = "Linear"
    QUADRATIC = "Quadratic"


@dataclass(frozen=True)
class PhaseSpec:
    """Phase law ``beta(n)``: 0, ``slope * n`` or ``gamma * n**2`` (radians)."""

    kind: PhaseKind = PhaseKind.ZERO
    parameter: float = 0.0

    def __post_init__(self):
        if self.kind is PhaseKind.QUADRATIC and self.parameter == 0:
            raise ValueError("a quadratic phase needs gamma != 0")
        if not math.isfinite(self.parameter):
            raise ValueError("phase parameter must be finite")

    @classmethod
    def zero(cls) -> "PhaseSpec":
        return cls(PhaseKind.ZERO, 0.0)

    @classmethod
    def linear(cls, slope: float) -> "PhaseSpec":
        return cls(PhaseKind.LINEAR, float(slope))

    @classmethod
    def quadratic(cls, gamma: float) -> "PhaseSpec":
        return cls(PhaseKind.QUADRATIC, float(gamma))

    @classmethod
    def parse(cls, text: str) -> "PhaseSpec":
        """Parse ``zero``, ``linear:SLOPE`` or ``quadratic:GAMMA``; ``pi`` is allowed in the number."""
        name, _, value = text.partition(":")
        name = name.strip().lower()
        if name == "zero":
            return cls.zero()
        number = _parse_angle(value)
        if name == "linear":
            return cls.linear(number)
        if name == "quadratic":
            return cls.quadratic(number)
        raise ValueError("unknown phase law %r (expected zero, linear:x or quadratic:x)" % text)

    def phases(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        if self.kind is PhaseKind.LINEAR:
            return self.parameter * n
        if self.kind is PhaseKind.QUADRATIC:
            return self.parameter * n * n
        return np.zeros_like(n)


def _parse_angle(text: str) -> float:
    # accepts plain numbers and the forms pi, pi/2, 0.5pi, 0.5*pi
    text = text.strip().lower().replace("*", "")
    if "pi" not in text:
        return float(text)
    head, _, tail = text.partition("pi")
    factor = float(head) if head else 1.0
    if tail:
        if not tail.startswith("/"):
            raise ValueError("cannot parse angle %r" % text)
        factor /= float(tail[1:])
    return factor * math.pi


@dataclass(frozen=True)
class FockVector:
    """Truncated Fock-basis amplitudes ``c_0 .. c_cutoff``."""

    coeffs: np.ndarray
    cutoff: int

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or len(c) != self.cutoff + 1:
            raise ValueError("coeffs must hold cutoff + 1 entries")
        norm = float(np.sum(np.abs(c) ** 2))
        if not (1.0 - 1e-10 <= norm <= 1.0 + 1e-12):
            raise ValueError("truncated norm %.15g outside [1 - 1e-10, 1]" % norm)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def number_state(cls, n: int) -> "FockVector":
        c = np.zeros(n + 1, dtype=complex)
        c[n] = 1.0
        return cls(c, n)

    def mean_photon(self) -> float:
        return float(np.sum(np.arange(self.cutoff + 1) * np.abs(self.coeffs) ** 2))


def _poisson_cutoff(lam: float, tail_tol: float) -> int:
    n = np.arange(MAX_CUTOFF + 2)
    with np.errstate(divide="ignore"):
        log_p = -lam + n * math.log(lam) - np.array([math.lgamma(k + 1) for k in n])
    p = np.exp(log_p)
    # tail[N] = sum_{n > N} p(n), summed from the small end
    tail = np.concatenate([np.cumsum(p[::-1])[::-1][1:], [0.0]])
    below = np.nonzero(tail < tail_tol)[0]
    return int(below[0])


def make_state(amplitude: complex, phase: PhaseSpec = PhaseSpec(), tail_tol: float = 1e-12) -> FockVector:
    """Build the superposition for coherent amplitude ``amplitude`` and phase law ``phase``.

    ``tail_tol`` bounds the norm of the discarded part of the state vector,
    so the cutoff is the smallest ``N`` whose Poisson tail beyond ``N`` is
    below ``tail_tol**2``. Bounding the amplitude rather than the mass keeps
    truncation artefacts in the Wigner function (the truncated state is not
    Gaussian) far below rounding level.

    Raises:
        ValueError: ``|amplitude|^2 > 25``, ``tail_tol < 1e-14``, or a cutoff above 400.
    """
    amplitude = complex(amplitude)
    lam = abs(amplitude) ** 2
    if lam > 25.0:
        raise ValueError("|amplitude|^2 must be <= 25")
    if not (1e-14 <= tail_tol < 1):
        raise ValueError("tail_tol must lie in [1e-14, 1)")
    if lam == 0:
        return FockVector(np.array([1.0 + 0j]), 0)
    cutoff = _poisson_cutoff(lam, tail_tol**2)
    if cutoff > MAX_CUTOFF:
        raise ValueError("cutoff %d exceeds %d" % (cutoff, MAX_CUTOFF))
    n = np.arange(cutoff + 1)
    log_mag = -0.5 * lam + n * math.log(abs(amplitude)) - 0.5 * np.array([math.lgamma(k + 1) for k in n])
    angle = n * math.atan2(amplitude.imag, amplitude.real) + phase.phases(n)
    coeffs = np.exp(log_mag) * np.exp(1j * angle)
    return FockVector(coeffs, cutoff)


def pnd(f: FockVector, n: int) -> float:
    """``|c_n|^2``; zero beyond the cutoff, where the truncated state has no amplitude."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > f.cutoff:
        return 0.0
    return float(abs(f.coeffs[n]) ** 2)


def _displaced_amplitudes(f: FockVector, delta: np.ndarray, m_max: int) -> np.ndarray:
    r"""``b[m, i] = <m| D(delta_i) |psi>`` for ``m = 0..m_max``.

    Uses :math:`\langle m|D(\delta)|n\rangle = \sqrt{n!/m!}\,\delta^{m-n} e^{-|\delta|^2/2} L_n^{(m-n)}(|\delta|^2)`
    for ``m >= n`` and the conjugate-symmetric form for ``m < n``; the
    factorial and power prefactors are combined in log space.
    """
    N = f.cutoff
    c = f.coeffs
    x = np.abs(delta) ** 2
    phase = np.exp(1j * np.angle(delta))
    with np.errstate(divide="ignore"):
        log_r = np.log(np.abs(delta))
    out = np.zeros((m_max + 1, delta.size), dtype=complex)
    lg = np.array([math.lgamma(k + 1) for k in range(m_max + N + 2)])
    for k in range(0, m_max + 1):
        # m = j + k, n = j (on or below the diagonal)
        jmax = min(N, m_max - k)
        if jmax >= 0:
            lag = specfun.laguerre_all(jmax, k, x)
            j = np.arange(jmax + 1)
            log_pref = 0.5 * (lg[j] - lg[j + k])[:, None] - 0.5 * x[None, :]
            if k:
                log_pref = log_pref + k * log_r[None, :]
            elems = np.exp(log_pref) * lag * (phase**k)[None, :]
            out[k: k + jmax + 1] += elems * c[: jmax + 1, None]
        # m = j, n = j + k (above the diagonal)
        if k == 0:
            continue
        jmax = min(m_max, N - k)
        if jmax < 0:
            continue
        lag = specfun.laguerre_all(jmax, k, x)
        j = np.arange(jmax + 1)
        log_pref = 0.5 * (lg[j] - lg[j + k])[:, None] - 0.5 * x[None, :] + k * log_r[None, :]
        elems = np.exp(log_pref) * lag * ((-np.conj(phase)) ** k)[None, :]
        out[: jmax + 1] += elems * c[k: k + jmax + 1, None]
    return out


def wigner_eval(f: FockVector, q, p):
    """Wigner function of ``f`` at ``(q, p)``; broadcasts over arrays.

    Warns (RuntimeWarning) when the displaced state is not captured by the
    Fock range used, i.e. its missing norm exceeds 1e-8.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    q, p = np.broadcast_arrays(q, p)
    gamma = ((q + 1j * p) / math.sqrt(2.0)).ravel()
    if gamma.size and np.max(np.abs(gamma)) > 10.0:
        raise ValueError("|q + ip| / sqrt(2) must be <= 10")
    r = (float(np.max(np.abs(gamma))) if gamma.size else 0.0) + math.sqrt(f.mean_photon())
    norm = float(np.sum(np.abs(f.coeffs) ** 2))
    m_max = min(500, int(math.ceil((r + 4.0) ** 2)))
    while True:
        b = _displaced_amplitudes(f, -gamma, m_max)
        weight = np.abs(b) ** 2
        missing = norm - weight.sum(axis=0)
        if not np.any(missing > 1e-2 * TAIL_WARNING) or m_max == 500:
            break
        m_max = min(500, 2 * m_max + f.cutoff)
    if np.any(missing > TAIL_WARNING):
        warnings.warn(
            "Fock range 0..%d misses displaced norm %.2e; Wigner values may be inaccurate"
            % (m_max, float(np.max(missing))),
            RuntimeWarning,
            stacklevel=2,
        )
    sign = np.where(np.arange(m_max + 1) % 2 == 0, 1.0, -1.0)
    out = (sign @ weight / math.pi).reshape(q.shape)
    return float(out) if out.ndim == 0 else out


def min_wigner(f: FockVector, half_width: float = 6.0, grid_points: int = 101):
    """Minimum of the Wigner function over ``[-half_width, half_width]^2``.

    A grid search is refined by 20 rounds of coordinate descent whose step
    starts at the grid spacing and halves whenever no move improves.

    Returns:
        ``(value, (q, p))``.
    """
    if grid_points < 51:
        raise ValueError("grid_points must be >= 51")
    if half_width <= 0 or half_width > 10.0:
        raise ValueError("half_width must lie in (0, 10]")
    axis = np.linspace(-half_width, half_width, grid_points)
    qq, pp = np.meshgrid(axis, axis, indexing="ij")
    values = wigner_eval(f, qq, pp)
    i, j = np.unravel_index(int(np.argmin(values)), values.shape)
    best = float(values[i, j])
    point = np.array([axis[i], axis[j]])
    step = axis[1] - axis[0]
    for _ in range(20):
        moved = False
        for dim in range(2):
            for direction in (-1.0, 1.0):
                trial = point.copy()
                trial[dim] = np.clip(trial[dim] + direction * step, -half_width, half_width)
                value = wigner_eval(f, trial[0], trial[1])
                if value < best:
                    best, point, moved = value, trial, True
                    break
        if not moved:
            step *= 0.5
    return best, (float(point[0]), float(point[1]))
