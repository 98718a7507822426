"""Solutions of the Stein equation ``s f' + tau f = h - E h(W)``.

The canonical solution has two equivalent integral forms::

    f(x) =  1/(s g)(x) * int_0^x   g (h - E h)      (forward)
    f(x) = -1/(s g)(x) * int_x^inf g (h - E h)      (backward)

Both are evaluated on the grid by accumulating log-scaled panel integrals.
The forward form is reported for ``x <= alpha`` and the backward form beyond,
so the accumulated mass is always the small side and nothing cancels. The
other form is kept for the agreement diagnostic.

``E h(W)`` is the ratio ``int g h / int g`` over the same panels, which makes
the two forms consistent to rounding. ``f'`` comes from the equation itself,
and the residual is measured with an independent central difference of ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..distributions import SteinPair
from ..errors import DomainError
from ._pieces import piece_integrals
from .operator import expectation
from .testfunctions import TestFunction

FD_REL_STEP = 1e-5
DEFAULT_GRID = (1e-3, 50.0, 400)
NORM_REFINEMENT = 10
# The forms are compared only where their expected rounding mismatch,
# 64 eps * int g (|h| + |E h|) / (s g), is below this.
AGREEMENT_NOISE_CAP = 1e-10
_EPS = np.finfo(float).eps
_LOG_TINY = math.log(np.finfo(float).tiny)


def default_grid(lo: float = DEFAULT_GRID[0], hi: float = DEFAULT_GRID[1], n: int = DEFAULT_GRID[2]) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def refined_grid(grid, factor: int = NORM_REFINEMENT) -> np.ndarray:
    """Insert ``factor - 1`` geometrically spaced points in every grid gap."""
    g = np.asarray(grid, dtype=float)
    if g.size < 2:
        return g.copy()
    t = np.arange(factor) / factor
    inner = g[:-1, None] * (g[1:, None] / g[:-1, None]) ** t[None, :]
    return np.concatenate([inner.ravel(), g[-1:]])


@dataclass(frozen=True)
class SteinSolution:
    """The solution ``f`` on a grid, with diagnostics.

    ``masked`` marks grid points where ``s g`` underflows double precision or
    the value is not finite; they are excluded from ``max_residual``. Values
    there are still reported (they are computed in log space) and
    ``log_abs_f`` is always finite where ``f != 0``.
    ``agreement_used`` marks the points entering ``forms_agreement``.
    """

    grid: np.ndarray = field(repr=False)
    f_values: np.ndarray = field(repr=False)
    f_prime_values: np.ndarray = field(repr=False)
    e_h: float
    constant_c: float
    max_residual: float
    forms_agreement: float
    residuals: np.ndarray = field(repr=False)
    masked: np.ndarray = field(repr=False)
    log_abs_f: np.ndarray = field(repr=False)
    forward_values: np.ndarray = field(repr=False)
    backward_values: np.ndarray = field(repr=False)
    agreement_used: np.ndarray = field(repr=False)
    centered_sup_norm: float
    e_h_quadrature: float
    h_name: str = ""
    converged: bool = True

    @property
    def n_masked(self) -> int:
        return int(np.count_nonzero(self.masked))

    @property
    def sup_abs_f(self) -> float:
        ok = ~self.masked
        return float(np.max(np.abs(self.f_values[ok]))) if np.any(ok) else math.nan

    def summary(self) -> dict:
        return {
            "e_h": self.e_h,
            "e_h_quadrature": self.e_h_quadrature,
            "constant_c": self.constant_c,
            "max_residual": self.max_residual,
            "forms_agreement": self.forms_agreement,
            "agreement_points": int(np.count_nonzero(self.agreement_used)),
            "masked_points": self.n_masked,
            "centered_sup_norm": self.centered_sup_norm,
            "sup_abs_f": self.sup_abs_f,
            "h": self.h_name,
            "converged": self.converged,
        }


def _validate_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 1:
        raise DomainError("grid must be a non-empty 1-d array")
    if not np.all(np.isfinite(g)) or np.any(g <= 0):
        raise DomainError("grid points must be finite and positive")
    if np.any(np.diff(g) <= 0):
        raise DomainError("grid must be strictly increasing")
    return g


def _scaled_forms(pair: SteinPair, pts: np.ndarray, h: TestFunction):
    """Forward and backward ``f * s g`` pieces, log-scaled; see module docstring."""
    pieces = piece_integrals(pair, pts, h)
    lam = pieces.lam
    top = lam.max()
    w = np.exp(lam - top)
    e_h = float(np.sum(pieces.gh * w) / np.sum(pieces.g * w))
    p = pieces.gh - e_h * pieces.g  # scaled integral of g (h - e_h) per piece

    L = np.asarray(pair.log_sg(pts), dtype=float)
    n = pts.size
    fwd = np.empty(n)
    bwd = np.empty(n)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        fwd[0] = p[0] * np.exp(lam[0] - L[0])
        for i in range(n - 1):
            fwd[i + 1] = fwd[i] * np.exp(L[i] - L[i + 1]) + p[i + 1] * np.exp(lam[i + 1] - L[i + 1])
        bwd[-1] = -p[n] * np.exp(lam[n] - L[-1])
        for i in range(n - 2, -1, -1):
            bwd[i] = bwd[i + 1] * np.exp(L[i + 1] - L[i]) - p[i + 1] * np.exp(lam[i + 1] - L[i])

    with np.errstate(divide="ignore"):
        # log of int g (|h| + |e_h|) over everything: the rounding scale of
        # the two cumulative sums, whose difference is the form mismatch
        log_abs_mass = top + math.log(np.sum((np.abs(pieces.gh) + abs(e_h) * pieces.g) * w))
        lg = np.log(pieces.g) + lam
    left = np.logaddexp.accumulate(lg[:-1])
    right = np.logaddexp.accumulate(lg[::-1][:-1])[::-1]
    return e_h, fwd, bwd, L, left, right, log_abs_mass, pieces.converged


def _preferred_forward(pair: SteinPair, x: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    if pair.alpha is not None:
        return x <= pair.alpha
    return left <= right


def _solve(pair: SteinPair, h: TestFunction, grid, c: float) -> SteinSolution:
    x = _validate_grid(grid)
    c = float(c)
    d = FD_REL_STEP
    pts = np.concatenate([x * (1.0 - d), x, x * (1.0 + d)])
    order = np.argsort(pts, kind="stable")
    pts_sorted = pts[order]
    if np.any(np.diff(pts_sorted) <= 0):
        raise DomainError(f"grid points closer than a relative {2 * d:g} are not supported")

    e_h_quad = expectation(pair, h)
    hx = h(x)
    if h.constant is not None:
        e_h = float(h.constant)
        n3 = pts.size
        fwd = bwd = np.zeros(n3)
        L = np.asarray(pair.log_sg(pts_sorted), dtype=float)
        left = right = np.full(n3, -np.inf)
        log_abs_mass = -np.inf
        converged = True
    else:
        e_h, fwd, bwd, L, left, right, log_abs_mass, converged = _scaled_forms(pair, pts_sorted, h)

    # back to the caller's (minus, centre, plus) layout
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    n = x.size
    sl = [inv[k * n:(k + 1) * n] for k in range(3)]
    use_fwd = _preferred_forward(pair, x, left[sl[1]], right[sl[1]])

    def canonical(idx):
        return np.where(use_fwd, fwd[idx], bwd[idx])

    def full(idx):
        # f * s g = canonical * s g + c, then f = that / (s g); keeps log |f| exact
        Li = L[idx]
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            if c == 0.0:
                return canonical(idx), np.log(np.abs(canonical(idx)))
            t = canonical(idx) * np.exp(Li) + c
            return t * np.exp(-Li), np.log(np.abs(t)) - Li

    f_minus, _ = full(sl[0])
    f_mid, log_abs_f = full(sl[1])
    f_plus, _ = full(sl[2])

    s = pair.s_at(x)
    tau = pair.tau_at(x)
    centred = hx - e_h
    with np.errstate(over="ignore", invalid="ignore"):
        f_prime = (centred - tau * f_mid) / s
        f_prime_fd = (f_plus - f_minus) / (2.0 * d * x)
        residuals = np.abs(s * f_prime_fd + tau * f_mid - centred)

    L_mid = L[sl[1]]
    masked = (L_mid < _LOG_TINY) | ~np.isfinite(f_mid) | ~np.isfinite(f_prime) | ~np.isfinite(residuals)
    ok = ~masked
    max_residual = float(np.max(residuals[ok])) if np.any(ok) else math.nan

    f_fwd = fwd[sl[1]]
    f_bwd = bwd[sl[1]]
    with np.errstate(over="ignore", invalid="ignore"):
        noise = 64.0 * _EPS * np.exp(log_abs_mass - L_mid)
    used = ok & (noise <= AGREEMENT_NOISE_CAP) & np.isfinite(f_fwd) & np.isfinite(f_bwd)
    agreement = float(np.max(np.abs(f_fwd[used] - f_bwd[used]))) if np.any(used) else 0.0

    xr = refined_grid(x)
    sup_norm = float(np.max(np.abs(h(xr) - e_h)))

    return SteinSolution(
        grid=x,
        f_values=f_mid,
        f_prime_values=f_prime,
        e_h=e_h,
        constant_c=c,
        max_residual=max_residual,
        forms_agreement=agreement,
        residuals=residuals,
        masked=masked,
        log_abs_f=log_abs_f,
        forward_values=f_fwd,
        backward_values=f_bwd,
        agreement_used=used,
        centered_sup_norm=sup_norm,
        e_h_quadrature=e_h_quad,
        h_name=h.name,
        converged=converged,
    )


def solve_stein_equation(pair: SteinPair, h: TestFunction, grid=None) -> SteinSolution:
    """Canonical (bounded) solution ``f_h`` on ``grid`` (default: 400 log-spaced points on [1e-3, 50])."""
    return _solve(pair, h, default_grid() if grid is None else grid, 0.0)


def solve_with_constant(pair: SteinPair, h: TestFunction, c: float, grid=None) -> SteinSolution:
    """General solution ``f_h + c / (s g)``.

    For ``c != 0`` the added term solves the homogeneous equation and blows up
    wherever ``s g -> 0``, e.g. as ``x -> 0``. ``f_values`` may overflow to
    infinity there; ``log_abs_f`` stays finite.
    """
    return _solve(pair, h, default_grid() if grid is None else grid, c)
