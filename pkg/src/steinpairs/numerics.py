"""Shared numerical kernels.

Adaptive Gauss-Kronrod quadrature on finite and semi-infinite ranges,
central-difference differentiation, bracketing root finding and the
counter-based random stream used by the samplers.

All integrands are expected to be vectorised: they receive a 1-D float array
and must return an array of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .errors import DomainError, RootBracketError

__all__ = [
    "QuadratureResult",
    "PieceIntegrals",
    "integrate",
    "integrate_pieces",
    "differentiate",
    "find_root",
    "rng_stream",
]

# 21-point Kronrod rule and the embedded 10-point Gauss rule (QUADPACK qk21).
# Nodes are the non-negative half, ordered from the right endpoint inwards.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600067062315,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# full symmetric rule on [-1, 1]
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(21)
_GW[1:10:2] = _WG
_GW[11:20:2] = _WG[::-1]

_EPMACH = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of :func:`integrate`.

    ``converged`` implies ``abs_error_estimate`` is within the requested
    tolerance. On failure ``value`` still holds the best estimate.
    """

    value: float
    abs_error_estimate: float
    subdivisions: int
    converged: bool


@dataclass(frozen=True)
class PieceIntegrals:
    """Per-piece results of :func:`integrate_pieces`."""

    values: np.ndarray
    abs_errors: np.ndarray
    converged: np.ndarray
    subdivisions: int

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


def _gk21(F, lo, hi, owner):
    """Apply the 21-point rule to many intervals at once.

    Returns Kronrod estimate, QUADPACK-style error estimate and the integral of
    ``|F|`` for every interval.
    """
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    t = centre[:, None] + half[:, None] * _NODES[None, :]
    own = np.broadcast_to(owner[:, None], t.shape)
    fv = np.asarray(F(t.ravel(), own.ravel()), dtype=float).reshape(t.shape)
    resk = fv @ _KW
    resg = fv @ _GW
    resabs = np.abs(fv) @ _KW
    reskh = 0.5 * resk
    resasc = np.abs(fv - reskh[:, None]) @ _KW
    habs = np.abs(half)
    resk *= half
    resabs *= habs
    resasc *= habs
    err = np.abs((resk - resg * half))
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(
            (resasc != 0.0) & (err != 0.0),
            resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5),
            err,
        )
    floor = np.where(resabs > _UFLOW / (50.0 * _EPMACH), 50.0 * _EPMACH * resabs, 0.0)
    err = np.maximum(scaled, floor)
    return resk, err, resabs


def _adaptive(F, lo, hi, owner, n_owners, abs_tol, rel_tol, max_subdivisions, min_width):
    """Globally adaptive bisection shared by :func:`integrate` and
    :func:`integrate_pieces`.

    Each owner is an independent integral whose panels stay in the pool until
    the owner's summed error estimate meets ``max(abs_tol, rel_tol * |I|)``.
    Every sweep bisects, for each unfinished owner, its largest-error panels
    until the untouched ones hold at most half of the budget.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    owner = np.asarray(owner, dtype=np.intp)
    res, err, resabs = _gk21(F, lo, hi, owner)
    subdivisions = 0
    failed = np.zeros(n_owners, dtype=bool)

    while True:
        bad = ~(np.isfinite(res) & np.isfinite(err))
        if bad.any():
            failed[np.unique(owner[bad])] = True
            res = np.where(bad, 0.0, res)
            err = np.where(bad, 0.0, err)
        values = np.bincount(owner, weights=res, minlength=n_owners)
        errors = np.bincount(owner, weights=err, minlength=n_owners)
        absints = np.bincount(owner, weights=resabs, minlength=n_owners)
        tol = np.maximum(abs_tol, rel_tol * np.maximum(np.abs(values), 1e-3 * absints))
        todo = (errors > tol) & ~failed
        if not todo.any():
            break
        width = hi - lo
        mid = 0.5 * (lo + hi)
        splittable = (np.abs(width) > min_width) & (mid > lo) & (mid < hi)
        # per owner, bisect the largest-error panels; the panels left alone
        # must carry at most half of the tolerance
        # errors are measured in units of their owner's tolerance (clipped,
        # which cannot change a "> 1/2" decision) so one global cumsum serves
        # owners of wildly different magnitudes without cancellation
        order = np.lexsort((err, owner))
        o_sorted = owner[order]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(tol[o_sorted] > 0, err[order] / tol[o_sorted], np.inf)
        csum = np.cumsum(np.minimum(ratio, 1e6))
        start = np.searchsorted(o_sorted, np.arange(n_owners), side="left")
        offset = np.where(start > 0, csum[np.maximum(start - 1, 0)], 0.0)
        below = csum - offset[o_sorted]
        big = np.zeros(lo.size, dtype=bool)
        big[order] = below > 0.5
        pick = todo[owner] & big & splittable
        stuck = todo & (np.bincount(owner[pick], minlength=n_owners) == 0)
        failed |= stuck
        budget = max_subdivisions - subdivisions
        idx = np.flatnonzero(pick)
        if idx.size == 0:
            break
        if idx.size > budget:
            idx = idx[np.argsort(err[idx])[::-1][:max(budget, 0)]]
            failed |= todo & (np.bincount(owner[idx], minlength=n_owners) == 0)
            if idx.size == 0:
                failed |= todo
                break
        mid = 0.5 * (lo[idx] + hi[idx])
        new_lo = np.concatenate([lo[idx], mid])
        new_hi = np.concatenate([mid, hi[idx]])
        new_owner = np.concatenate([owner[idx], owner[idx]])
        r2, e2, a2 = _gk21(F, new_lo, new_hi, new_owner)
        keep = np.ones(lo.size, dtype=bool)
        keep[idx] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        owner = np.concatenate([owner[keep], new_owner])
        res = np.concatenate([res[keep], r2])
        err = np.concatenate([err[keep], e2])
        resabs = np.concatenate([resabs[keep], a2])
        subdivisions += idx.size
        if subdivisions >= max_subdivisions:
            values = np.bincount(owner, weights=res, minlength=n_owners)
            errors = np.bincount(owner, weights=err, minlength=n_owners)
            absints = np.bincount(owner, weights=resabs, minlength=n_owners)
            tol = np.maximum(abs_tol, rel_tol * np.maximum(np.abs(values), 1e-3 * absints))
            failed |= errors > tol
            break

    converged = ~failed & (errors <= tol * (1.0 + 1e-12))
    return values, errors, converged, subdivisions


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    *,
    rel_tol: float = 0.0,
    breakpoints: Sequence[float] = (),
    initial_splits: int = 4,
    max_subdivisions: int = 4000,
    min_width: float = 1e-300,
) -> QuadratureResult:
    """Integrate a vectorised function over ``[lo, hi]``, ``hi`` possibly ``inf``.

    Parameters
    ----------
    f : callable
        Vectorised integrand.
    lo, hi : float
        Limits with ``0 <= lo < hi``; ``hi`` may be ``numpy.inf``.
    tol : float
        Absolute tolerance.
    rel_tol : float
        Optional relative tolerance; the effective target is
        ``max(tol, rel_tol * |value|)``.
    breakpoints : sequence of float
        Interior points where the integrand has structure (peaks, kinks).
        Each initial panel is further split into ``initial_splits`` parts.
    min_width : float
        Panels narrower than this (in the mapped variable) are never bisected.
        Integrable endpoint singularities such as ``x**(a-1)`` with ``a < 1``
        are resolved by repeated bisection of the first panel, so the default
        is tiny; bisection also stops at floating-point resolution.

    Returns
    -------
    QuadratureResult

    Notes
    -----
    An infinite upper limit is handled with ``t = lo + u / (1 - u)`` on
    ``u in [0, 1)``, so the integrand must return 0 (not NaN) for very large
    arguments.
    """
    lo = float(lo)
    hi = float(hi)
    if not math.isfinite(lo):
        raise DomainError("lower limit must be finite")
    if not hi > lo:
        raise DomainError(f"need lo < hi, got lo={lo}, hi={hi}")
    if tol <= 0 and rel_tol <= 0:
        raise DomainError("tolerance must be positive")

    pts = sorted(float(b) for b in breakpoints if lo < b < hi)
    if math.isinf(hi):
        def F(u, _owner):
            w = 1.0 - u
            t = lo + u / w
            return np.asarray(f(t), dtype=float) / (w * w)

        edges = [0.0] + [(b - lo) / (1.0 + b - lo) for b in pts] + [1.0]
    else:
        def F(t, _owner):
            return np.asarray(f(t), dtype=float)

        edges = [lo] + pts + [hi]

    edges = np.asarray(edges)
    parts = max(1, int(initial_splits))
    fr = np.linspace(0.0, 1.0, parts + 1)
    a = (edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * fr[None, :-1]).ravel()
    b = (edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * fr[None, 1:]).ravel()
    owner = np.zeros(a.size, dtype=np.intp)
    values, errors, converged, nsub = _adaptive(
        F, a, b, owner, 1, tol, rel_tol, max_subdivisions, min_width
    )
    return QuadratureResult(float(values[0]), float(errors[0]), int(nsub), bool(converged[0]))


def integrate_pieces(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    edges: np.ndarray,
    *,
    abs_tol: float = 0.0,
    rel_tol: float = 1e-13,
    max_subdivisions: int = 200000,
    min_width: float = 1e-300,
) -> PieceIntegrals:
    """Integrate over every consecutive panel ``[edges[i], edges[i+1]]`` at once.

    ``f(t, k)`` receives the node array and the matching panel indices, which
    lets the caller rescale each panel differently. Each panel is its own
    integral with its own tolerance ``max(abs_tol, rel_tol * |value_k|)``.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or not np.all(np.diff(edges) > 0):
        raise DomainError("edges must be strictly increasing")
    if not np.all(np.isfinite(edges)):
        raise DomainError("edges must be finite")
    n = edges.size - 1
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    owner = np.arange(n, dtype=np.intp)
    values, errors, converged, nsub = _adaptive(
        f, lo, hi, owner, n, abs_tol, rel_tol, max_subdivisions, min_width
    )
    return PieceIntegrals(values, errors, converged, nsub)


def differentiate(
    f: Callable[[np.ndarray], np.ndarray],
    x,
    rel_step: float = 1e-5,
    *,
    order: int = 2,
):
    """Central-difference derivative with step ``h = rel_step * x``.

    ``order=2`` is the plain three-point difference (error O(h^2));
    ``order=4`` is its Richardson extrapolation over steps h and 2h, i.e. the
    five-point central stencil (error O(h^4)).
    """
    xa = np.asarray(x, dtype=float)
    h = rel_step * np.abs(xa)
    h = np.where(h == 0.0, rel_step, h)
    if order == 2:
        d = (np.asarray(f(xa + h)) - np.asarray(f(xa - h))) / (2.0 * h)
    elif order == 4:
        d1 = np.asarray(f(xa + h)) - np.asarray(f(xa - h))
        d2 = np.asarray(f(xa + 2 * h)) - np.asarray(f(xa - 2 * h))
        d = (8.0 * d1 - d2) / (12.0 * h)
    else:
        raise ValueError("order must be 2 or 4")
    return float(d) if np.ndim(d) == 0 else d


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-14) -> float:
    """Brent's method on a sign-changing bracket ``[lo, hi]``.

    Raises
    ------
    RootBracketError
        If ``f(lo)`` and ``f(hi)`` do not have opposite signs.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if not (np.sign(flo) * np.sign(fhi) < 0):
        raise RootBracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    return float(optimize.brentq(f, lo, hi, xtol=tol, rtol=4 * _EPMACH, maxiter=500))


def rng_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Counter-based (Philox4x64) generator for stream ``stream_id`` of ``seed``.

    Distinct stream ids give statistically independent streams, and a given
    ``(seed, stream_id)`` reproduces the same sequence on every platform.
    """
    if seed < 0 or stream_id < 0:
        raise DomainError("seed and stream_id must be non-negative")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.Philox(ss))
