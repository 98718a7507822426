"""The Stein operator ``f -> s f' + tau f`` and expectations under ``g``."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..distributions import SteinPair
from ..errors import ConvergenceError, DomainError
from ..numerics import integrate
from .testfunctions import TestFunction

EXPECTATION_TOL = 1e-10


def apply_operator(pair: SteinPair, f: Callable, f_prime: Callable, x):
    """``s(x) f'(x) + tau(x) f(x)``; vectorised in ``x``."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise DomainError("the operator is defined on (0, inf)")
    r = pair.s_at(xa) * np.asarray(f_prime(xa), dtype=float) + pair.tau_at(xa) * np.asarray(f(xa), dtype=float)
    return float(r) if np.ndim(r) == 0 else r


def expectation(pair: SteinPair, h: TestFunction, tol: float = EXPECTATION_TOL) -> float:
    """``E h(W) = int_0^inf h g`` by adaptive quadrature (absolute tolerance ``tol``).

    Raises :class:`ConvergenceError` if the tolerance is not reached.
    """
    if getattr(h, "constant", None) is not None:
        return float(h.constant)

    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        ok = t > 0
        if np.any(ok):
            with np.errstate(under="ignore", over="ignore"):
                v = np.exp(pair.log_density(t[ok])) * h(t[ok])
            out[ok] = np.where(np.isfinite(v), v, 0.0)
        return out

    bps = list(pair.density_critical_points())
    if pair.alpha is not None:
        bps.append(pair.alpha)
    res = integrate(f, 0.0, math.inf, tol=tol, rel_tol=1e-13, breakpoints=bps, max_subdivisions=20000)
    if not res.converged:
        raise ConvergenceError(
            f"expectation did not converge (estimate {res.value}, error {res.abs_error_estimate})"
        )
    return res.value
