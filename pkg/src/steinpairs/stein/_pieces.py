"""Log-scaled integrals of ``g`` (and ``g h``) between consecutive points.

The half-line is cut into a head ``[0, p_0]``, interior panels
``[p_{i-1}, p_i]`` and a tail ``[p_{n-1}, inf)``. Piece ``k`` is integrated
after dividing the integrand by ``exp(lam[k])``, where ``lam[k]`` is the
largest value of ``log g`` on the piece (taken over its finite endpoints and
any interior critical point of ``g``). Nothing overflows or underflows
however far into the tails the points reach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..distributions import SteinPair
from ..errors import ConvergenceError
from ..numerics import integrate, integrate_pieces

PIECE_REL_TOL = 1e-13


@dataclass(frozen=True)
class Pieces:
    points: np.ndarray
    lam: np.ndarray  # n + 1 log-scales: head, interior..., tail
    g: np.ndarray  # scaled integral of g over each piece
    gh: Optional[np.ndarray]  # scaled integral of g*h, if h was given
    converged: bool

    def log_total_g(self) -> float:
        m = self.lam.max()
        return m + math.log(np.sum(self.g * np.exp(self.lam - m)))


def _safe_log_g(pair: SteinPair):
    def lg(t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, -np.inf)
        ok = (t > 0) & np.isfinite(t)
        if np.any(ok):
            with np.errstate(over="ignore", under="ignore", divide="ignore"):
                out[ok] = pair.log_density(t[ok])
        return out

    return lg


def piece_integrals(
    pair: SteinPair,
    points,
    h: Optional[Callable] = None,
    *,
    rel_tol: float = PIECE_REL_TOL,
    strict: bool = True,
) -> Pieces:
    pts = np.asarray(points, dtype=float)
    n = pts.size
    lg = _safe_log_g(pair)
    crit = np.array(pair.density_critical_points(), dtype=float)

    lg_pts = lg(pts)
    lam = np.empty(n + 1)
    lam[0] = lg_pts[0]
    lam[1:n] = np.maximum(lg_pts[:-1], lg_pts[1:])
    lam[n] = lg_pts[-1]
    if crit.size:
        lg_crit = lg(crit)
        idx = np.searchsorted(pts, crit)  # piece index holding each critical point
        np.maximum.at(lam, idx, lg_crit)
    # a non-finite scale (log g = -inf on a whole piece) means an empty piece
    lam = np.where(np.isfinite(lam), lam, 0.0)

    def scaled(weight):
        def f_piece(t, k):
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                v = np.exp(lg(t) - lam[k + 1])
                if weight is not None:
                    v = v * weight(t)
            return np.where(np.isfinite(v), v, 0.0)

        out = np.zeros(n + 1)
        ok = True
        if n > 1:
            res = integrate_pieces(f_piece, pts, abs_tol=1e-300, rel_tol=rel_tol)
            out[1:n] = res.values
            ok = res.all_converged

        def head(t):
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                v = np.exp(lg(t) - lam[0])
                if weight is not None:
                    v = v * weight(np.maximum(t, np.finfo(float).tiny))
            return np.where(np.isfinite(v), v, 0.0)

        def tail(t):
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                v = np.exp(lg(t) - lam[n])
                if weight is not None:
                    v = v * weight(t)
            return np.where(np.isfinite(v), v, 0.0)

        bh = [c for c in crit if c < pts[0]]
        r0 = integrate(head, 0.0, pts[0], tol=1e-300, rel_tol=rel_tol, breakpoints=bh, max_subdivisions=20000)
        bt = [c for c in crit if c > pts[-1]] + [pts[-1] + 1.0]
        r1 = integrate(tail, pts[-1], math.inf, tol=1e-300, rel_tol=rel_tol, breakpoints=bt, max_subdivisions=20000)
        out[0] = r0.value
        out[n] = r1.value
        ok = ok and r0.converged and r1.converged
        return out, ok

    g_vals, ok_g = scaled(None)
    gh_vals, ok_h = (None, True) if h is None else scaled(h)
    converged = ok_g and ok_h
    if strict and not converged:
        raise ConvergenceError("piecewise quadrature did not reach its tolerance")
    return Pieces(pts, lam, g_vals, gh_vals, converged)


def log_cumulative(pieces: Pieces):
    """``ln int_0^{p_i} g`` and ``ln int_{p_i}^inf g`` for every point."""
    lam = pieces.lam
    with np.errstate(divide="ignore"):
        lw = np.log(pieces.g) + lam  # log mass of each piece
    left = np.logaddexp.accumulate(lw[:-1])
    right = np.logaddexp.accumulate(lw[::-1][:-1])[::-1]
    return left, right
