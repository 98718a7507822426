"""The uniform bound ``M``, the tail inequalities and the identity checks.

For a pair whose ``tau`` decreases through its zero ``alpha``::

    M = max(int_0^alpha g, int_alpha^inf g) / (s(alpha) g(alpha))

and every canonical solution satisfies ``sup |f_h| <= M sup |h - E h(W)|``.
The argument rests on::

    int_0^x g   <=  s(x) g(x) / tau(x)    for x < alpha
    int_x^inf g <= -s(x) g(x) / tau(x)    for x > alpha

and on ``l(x) = int_0^x g / (s g)`` increasing on ``(0, alpha)`` and
``u(x) = int_x^inf g / (s g)`` decreasing on ``(alpha, inf)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..distributions import SteinPair, tau_zero
from ..errors import ConvergenceError, PreconditionError
from ..numerics import integrate
from ._pieces import log_cumulative, piece_integrals

RATIO_TOL = 1e-12
LEMMA_SLACK = 1e-9
ALPHA_WINDOW = 1e-6
MONOTONE_SLACK = 1e-10
IDENTITY_REL_STEP = 1e-5
# Near the zero of tau a relative error is meaningless, so the error is taken
# relative to max(|tau(x)|, IDENTITY_FLOOR * (|t0| + |t1| x + |t2| x^2)).
IDENTITY_FLOOR = 1e-3


@dataclass(frozen=True)
class BoundReport:
    alpha: float
    left_ratio: float
    right_ratio: float
    M: float
    converged: bool = True

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "left_ratio": self.left_ratio,
            "right_ratio": self.right_ratio,
            "M": self.M,
            "converged": self.converged,
        }


def boundary_decay(pair: SteinPair, near: float = 1e-150, far: float = 1e150) -> dict:
    """Check numerically that ``s g -> 0`` at both ends of ``(0, inf)``.

    Looks at the log-log slope of ``s g`` between ``near`` and ``1e10 near``
    (must be positive) and between ``1e-10 far`` and ``far`` (must be
    negative), and at the values at the extreme points.
    """
    xs = np.array([near, near * 1e10, far * 1e-10, far])
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        L = np.asarray(pair.log_sg(xs), dtype=float)
    lx = np.log(xs)
    slope0 = (L[1] - L[0]) / (lx[1] - lx[0])
    slope1 = (L[3] - L[2]) / (lx[3] - lx[2])
    ok0 = bool(np.isfinite(slope0) and slope0 > 0) or L[0] == -np.inf
    ok1 = bool(np.isfinite(slope1) and slope1 < 0) or L[3] == -np.inf
    return {
        "at_zero": ok0,
        "at_infinity": ok1,
        "log_sg_near": float(L[0]),
        "log_sg_far": float(L[3]),
        "ok": ok0 and ok1,
    }


def _scaled_mass(pair: SteinPair, lo: float, hi: float, log_ref: float) -> tuple:
    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        ok = (t > 0) & np.isfinite(t)
        with np.errstate(over="ignore", under="ignore"):
            out[ok] = np.exp(pair.log_density(t[ok]) - log_ref)
        return np.where(np.isfinite(out), out, 0.0)

    bps = [c for c in pair.density_critical_points() if lo < c < hi]
    r = integrate(f, lo, hi, tol=1e-300, rel_tol=RATIO_TOL, breakpoints=bps, max_subdivisions=20000)
    return r.value, r.converged


def bound_m(pair: SteinPair) -> BoundReport:
    """Compute ``alpha``, both tail ratios and ``M``.

    Raises
    ------
    PreconditionError
        If ``tau`` is not decreasing (the bound's hypothesis) or ``s g`` does
        not vanish at both ends of the support.
    """
    if not pair.monotone_tau:
        raise PreconditionError(f"the bound M requires {pair.hypothesis}")
    decay = boundary_decay(pair)
    if not decay["ok"]:
        raise PreconditionError("s(x) g(x) must vanish as x -> 0 and x -> inf")
    alpha = tau_zero(pair)
    log_ref = float(pair.log_sg(alpha))
    left, ok_l = _scaled_mass(pair, 0.0, alpha, log_ref)
    right, ok_r = _scaled_mass(pair, alpha, math.inf, log_ref)
    if not (ok_l and ok_r):
        raise ConvergenceError("tail-ratio quadrature did not converge")
    return BoundReport(alpha, left, right, max(left, right), True)


# ---------------------------------------------------------------- identity


@dataclass(frozen=True)
class IdentityReport:
    grid: np.ndarray = field(repr=False)
    errors: np.ndarray = field(repr=False)
    max_error: float
    worst_x: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {"max_error": self.max_error, "worst_x": self.worst_x, "tol": self.tol, "passed": self.passed}


def check_structural_identity(pair: SteinPair, grid, tol: float = 1e-6) -> IdentityReport:
    """Check ``(s g)' = tau g`` on ``grid`` with a central difference.

    The derivative is taken relative to ``g(x)`` (so nothing underflows)
    with the seven-point stencil at step ``1e-5 x``::

        D(x) = [(s g)'(x)] / g(x)

    and compared with ``tau(x)``. The error at each point is
    ``|D - tau| / max(|tau|, 1e-3 * (|t0| + |t1| x + |t2| x**2))``.
    """
    x = np.asarray(grid, dtype=float)
    hstep = IDENTITY_REL_STEP * x
    lg0 = np.asarray(pair.log_density(x), dtype=float)

    def q(k):
        xk = x + k * hstep
        return pair.s_at(xk) * np.exp(np.asarray(pair.log_density(xk), dtype=float) - lg0)

    with np.errstate(over="ignore", invalid="ignore"):
        d = (45.0 * (q(1) - q(-1)) - 9.0 * (q(2) - q(-2)) + (q(3) - q(-3))) / (60.0 * hstep)
        tau = pair.tau_at(x)
        scale = np.abs(pair.tau[0]) + np.abs(pair.tau[1]) * x + np.abs(pair.tau[2]) * x * x
        err = np.abs(d - tau) / np.maximum(np.abs(tau), IDENTITY_FLOOR * scale)
    err = np.where(np.isfinite(err), err, np.inf)
    k = int(np.argmax(err))
    m = float(err[k])
    return IdentityReport(x, err, m, float(x[k]), float(tol), bool(m < tol))


# ---------------------------------------------------------------- lemma


@dataclass(frozen=True)
class LemmaReport:
    alpha: float
    left_points: int
    right_points: int
    excluded_points: int
    left_max_ratio: float  # max over x < alpha of tau * int_0^x g / (s g); must be <= 1
    right_max_ratio: float  # max over x > alpha of -tau * int_x^inf g / (s g)
    left_monotone: bool  # l(x) nondecreasing on (0, alpha)
    right_monotone: bool  # u(x) nonincreasing on (alpha, inf)
    slack: float
    passed: bool
    l_values: np.ndarray = field(repr=False, default=None)
    u_values: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "left_points": self.left_points,
            "right_points": self.right_points,
            "excluded_points": self.excluded_points,
            "left_max_ratio": self.left_max_ratio,
            "right_max_ratio": self.right_max_ratio,
            "left_monotone": self.left_monotone,
            "right_monotone": self.right_monotone,
            "slack": self.slack,
            "passed": self.passed,
        }


def tail_ratios(pair: SteinPair, grid) -> tuple:
    """``l(x) = int_0^x g / (s g)`` and ``u(x) = int_x^inf g / (s g)`` on ``grid``."""
    x = np.asarray(grid, dtype=float)
    pieces = piece_integrals(pair, x)
    left, right = log_cumulative(pieces)
    L = np.asarray(pair.log_sg(x), dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        return np.exp(left - L), np.exp(right - L)


def check_lemma_inequalities(
    pair: SteinPair, grid, *, slack: float = LEMMA_SLACK, window: float = ALPHA_WINDOW
) -> LemmaReport:
    """Verify the two tail inequalities and the monotonicity of ``l`` and ``u``.

    Points within ``window`` of ``alpha`` are excluded. Each inequality is
    checked in the ratio form ``tau * l <= 1 + slack`` (left) and
    ``-tau * u <= 1 + slack`` (right). Monotonicity allows a relative
    wobble of ``1e-10`` for quadrature noise.
    """
    if not pair.monotone_tau:
        raise PreconditionError(f"the tail inequalities require {pair.hypothesis}")
    alpha = tau_zero(pair)
    x = np.asarray(grid, dtype=float)
    l, u = tail_ratios(pair, x)
    tau = pair.tau_at(x)
    lm = x < alpha - window
    rm = x > alpha + window
    lr = tau[lm] * l[lm]
    rr = -tau[rm] * u[rm]
    left_max = float(lr.max()) if lr.size else 0.0
    right_max = float(rr.max()) if rr.size else 0.0
    ll = l[lm]
    uu = u[rm]
    left_mono = bool(np.all(ll[1:] >= ll[:-1] * (1.0 - MONOTONE_SLACK)))
    right_mono = bool(np.all(uu[1:] <= uu[:-1] * (1.0 + MONOTONE_SLACK)))
    passed = left_max <= 1.0 + slack and right_max <= 1.0 + slack and left_mono and right_mono
    return LemmaReport(
        alpha, int(lm.sum()), int(rm.sum()), int(x.size - lm.sum() - rm.sum()),
        left_max, right_max, left_mono, right_mono, slack, bool(passed), l, u,
    )
