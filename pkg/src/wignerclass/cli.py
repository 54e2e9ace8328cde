"""Command-line front end.

Exit codes: 0 on success, 2 for an invalid or unphysical state or a regime
error, 3 for a numerical failure. Tabular output is CSV with a header row,
``\\n`` line endings and 17 significant digits.
"""
from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import fock, photon_stats, quadrature, specfun, suite
from .errors import InvalidState, NumericalError, RegimeError
from .gaussian_state import GMatrix, PhysicalGaussianState, classify, mean_photon, validate

EXIT_OK = 0
EXIT_STATE = 2
EXIT_NUMERICAL = 3


@dataclass(frozen=True)
class RunManifest:
    """Everything that determines a run; identical manifests give identical output."""

    subcommand: str
    parameters: Tuple[Tuple[str, object], ...]
    output_path: Optional[str] = None
    budget: specfun.AccuracyBudget = field(default_factory=lambda: specfun.AccuracyBudget(rel_tol=1e-10))
    quadrature: quadrature.QuadratureConfig = quadrature.DEFAULT_CONFIG

    def get(self, key, default=None):
        return dict(self.parameters).get(key, default)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if not math.isfinite(value):
        raise NumericalError("non-finite value in output")
    return "%.16e" % value


def _csv(header: Sequence[str], rows) -> str:
    # rows are fully formatted before anything is written, so a failure leaves no partial output
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _state(m: RunManifest) -> PhysicalGaussianState:
    g = m.get("gmatrix")
    if g is not None:
        return validate(GMatrix.parse(g))
    alpha, beta = m.get("alpha"), m.get("beta")
    if alpha is None or beta is None:
        raise InvalidState("state: give --alpha and --beta, or --gmatrix A,B,C")
    return PhysicalGaussianState.from_alpha_beta(alpha, beta)


def _cmd_classify(m: RunManifest) -> str:
    s = _state(m)
    cls = classify(s)
    lines = [
        cls.describe(),
        "regime: %s" % photon_stats.regime(s),
        "class: %s" % cls.kind,
        "marginal: %s" % ("yes (%s)" % cls.note if cls.marginal else "no"),
        "alpha: %.16e" % s.alpha,
        "beta: %.16e" % s.beta,
        "theta: %.16e" % s.normal.theta,
        "mean_photon_number: %.16e" % mean_photon(s),
    ]
    return "\n".join(lines) + "\n"


def _cmd_pnd(m: RunManifest) -> str:
    s = _state(m)
    n_max = m.get("nmax")
    if not 0 <= n_max <= 200:
        raise ValueError("nmax must lie in 0..200")
    probs = [photon_stats.pnd_closed(s, n, m.budget) for n in range(n_max + 1)]
    if not m.get("oracle"):
        return _csv(["n", "p_closed"], [(n, p) for n, p in enumerate(probs)])
    radial = quadrature.radial_pnd_all(s, n_max, m.quadrature)
    bad = [n for n, r in enumerate(radial) if not r.converged]
    if bad:
        raise photon_stats.NonConvergence("radial quadrature did not converge for n = %s" % bad[:5])
    rows = [(n, p, r.value, abs(p - r.value)) for n, (p, r) in enumerate(zip(probs, radial))]
    return _csv(["n", "p_closed", "p_quadrature", "abs_diff"], rows)


def _cmd_pofi(m: RunManifest) -> str:
    s = _state(m)
    imax, points = m.get("imax"), m.get("points")
    if not (imax > 0 and points >= 2):
        raise ValueError("need imax > 0 and points >= 2")
    grid = np.linspace(0.0, imax, points)
    values = photon_stats.p_of_I(s, grid)
    return _csv(["I", "P"], zip(grid, values))


def _cmd_qparam(m: RunManifest) -> str:
    s = _state(m)
    closed = photon_stats.mandel_q(s)
    oracle = photon_stats.moment_ratio_oracle(s)
    return "Q_closed: %.16e\nQ_moment_oracle: %.16e\nabs_diff: %.3e\n" % (closed, oracle, abs(closed - oracle))


def _cmd_lscan(m: RunManifest) -> str:
    steps, lmax = m.get("steps"), m.get("lmax")
    if steps < 2 or not 1 <= lmax <= 30:
        raise ValueError("need steps >= 2 and 1 <= lmax <= 30")
    betas = np.linspace(m.get("beta_min"), m.get("beta_max"), steps)
    table = photon_stats.l_scan(m.get("alpha"), betas, lmax)
    header = ["beta"] + ["l%d" % k for k in range(1, lmax + 1)]
    return _csv(header, table)


def _cmd_fock_demo(m: RunManifest) -> str:
    amplitude, gamma = m.get("amplitude"), m.get("gamma")
    phase = fock.PhaseSpec.quadratic(gamma) if gamma != 0 else fock.PhaseSpec.zero()
    f = fock.make_state(amplitude, phase)
    lam = abs(amplitude) ** 2
    residual = 0.0
    for n in range(f.cutoff + 1):
        poisson = math.exp(-lam + (n * math.log(lam) if lam else 0.0) - math.lgamma(n + 1)) if (lam or n == 0) else 0.0
        residual = max(residual, abs(fock.pnd(f, n) - poisson))
    value, (q, p) = fock.min_wigner(f, m.get("half_width"), m.get("grid"))
    lines = [
        "phase: %s" % ("Quadratic(%.16e)" % gamma if gamma != 0 else "Zero"),
        "cutoff: %d" % f.cutoff,
        "poisson_max_abs_residual: %.3e" % residual,
        "min_wigner: %.16e" % value,
        "min_wigner_location: %.16e,%.16e" % (q, p),
    ]
    return "\n".join(lines) + "\n"


def _cmd_verify(m: RunManifest) -> str:
    results = suite.run_identity_suite()
    text = "\n".join(r.line() for r in results) + "\n"
    if not all(r.passed for r in results):
        raise _VerifyFailed(text)
    return text


class _VerifyFailed(NumericalError):
    def __init__(self, report):
        super().__init__("identity suite failed")
        self.report = report


_COMMANDS = {
    "classify": _cmd_classify,
    "pnd": _cmd_pnd,
    "pofi": _cmd_pofi,
    "qparam": _cmd_qparam,
    "lscan": _cmd_lscan,
    "fock-demo": _cmd_fock_demo,
    "verify": _cmd_verify,
}


def _add_state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, help="normal-form semi-axis alpha")
    p.add_argument("--beta", type=float, help="normal-form semi-axis beta")
    p.add_argument("--gmatrix", metavar="A,B,C", help="G matrix entries instead of alpha and beta")


def _add_tolerance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rel-tol", type=float, default=1e-10, help="special-function relative tolerance")
    p.add_argument("--quad-abs-tol", type=float, default=1e-10, help="quadrature absolute tolerance")
    p.add_argument("--quad-rel-tol", type=float, default=1e-8, help="quadrature relative tolerance")
    p.add_argument("--output", "-o", metavar="PATH", help="write output to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wignerclass", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("classify", help="classify a Gaussian state")
    _add_state_args(p)

    p = sub.add_parser("pnd", help="photon-number distribution as CSV")
    _add_state_args(p)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="add the radial-quadrature oracle column")

    p = sub.add_parser("pofi", help="intensity density P(I) as CSV (classical states)")
    _add_state_args(p)
    p.add_argument("--imax", type=float, required=True)
    p.add_argument("--points", type=int, required=True)

    p = sub.add_parser("qparam", help="Mandel-type Q, closed form and moment oracle")
    _add_state_args(p)

    p = sub.add_parser("lscan", help="local criteria l(1..lmax) over a beta grid as CSV")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta-min", type=float, default=0.5)
    p.add_argument("--beta-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=51, help="number of beta values, endpoints included")
    p.add_argument("--lmax", type=int, default=6)

    p = sub.add_parser("fock-demo", help="Poisson check and Wigner minimum of a nonlinear-phase state")
    p.add_argument("--amplitude", type=float, required=True)
    p.add_argument("--gamma", type=fock._parse_angle, required=True,
                   help="quadratic phase coefficient; 0 gives the coherent control (pi/2 accepted)")
    p.add_argument("--grid", type=int, default=101, help="grid points per axis (>= 51)")
    p.add_argument("--half-width", type=float, default=6.0)

    sub.add_parser("verify", help="run the identity suite")

    for name in _COMMANDS:
        _add_tolerance_args(sub.choices[name])
    return parser


def parse_manifest(argv: Sequence[str]) -> RunManifest:
    args = build_parser().parse_args(list(argv))
    values = vars(args).copy()
    command = values.pop("subcommand")
    output = values.pop("output")
    budget = specfun.AccuracyBudget(rel_tol=values.pop("rel_tol"))
    cfg = quadrature.QuadratureConfig(abs_tol=values.pop("quad_abs_tol"), rel_tol=values.pop("quad_rel_tol"))
    for key, value in values.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError("--%s must be finite" % key.replace("_", "-"))
    return RunManifest(command, tuple(sorted(values.items())), output, budget, cfg)


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        manifest = parse_manifest(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_STATE
    except ValueError as exc:
        print("error: %s" % exc, file=stderr)
        return EXIT_STATE
    try:
        text = _COMMANDS[manifest.subcommand](manifest)
    except (InvalidState, RegimeError) as exc:
        print("error: %s" % exc, file=stderr)
        return EXIT_STATE
    except _VerifyFailed as exc:
        stdout.write(exc.report)
        return EXIT_NUMERICAL
    except NumericalError as exc:
        print("numerical error: %s" % exc, file=stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print("error: %s" % exc, file=stderr)
        return EXIT_STATE
    if manifest.output_path:
        with io.open(manifest.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
