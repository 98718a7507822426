"""Bounded test functions ``h`` for the Stein equation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from ..distributions import SteinPair
from ..errors import DomainError


@dataclass(frozen=True)
class TestFunction:
    """A vectorised bounded function ``h`` on ``(0, inf)``.

    ``constant`` is set for functions known to be constant, which lets the
    solver return the exact zero solution. ``sup_norm_of_centered`` is
    ``max |h - E h(W)|`` over a refined grid, filled in by the solver.
    """

    __test__ = False  # not a pytest class

    name: str
    h: Callable = field(compare=False, repr=False)
    smoothness_tag: str = "smooth"
    sup_norm_of_centered: Optional[float] = None
    constant: Optional[float] = None

    def __call__(self, x):
        return np.asarray(self.h(np.asarray(x, dtype=float)), dtype=float) + 0.0

    def with_sup_norm(self, value: float) -> "TestFunction":
        return replace(self, sup_norm_of_centered=float(value))


def constant(value: float = 1.0) -> TestFunction:
    v = float(value)
    return TestFunction("const", lambda x: np.full(np.shape(x), v), "constant", constant=v)


def exp_decay() -> TestFunction:
    return TestFunction("exp-decay", lambda x: np.exp(-x), "smooth")


def logistic_step(center: float, width: Optional[float] = None) -> TestFunction:
    """Smoothed indicator of ``(0, center]``: ``1 / (1 + exp((x - center)/width))``.

    ``width`` defaults to ``center / 10``.
    """
    c = float(center)
    if not (c > 0 and math.isfinite(c)):
        raise DomainError("logistic-step needs a positive centre")
    w = c / 10.0 if width is None else float(width)
    if not w > 0:
        raise DomainError("logistic-step needs a positive width")

    def h(x):
        z = (x - c) / w
        # written with exp(-|z|) so it never overflows
        e = np.exp(-np.abs(z))
        return np.where(z > 0, e / (1.0 + e), 1.0 / (1.0 + e))

    return TestFunction("logistic-step", h, "smooth-step")


def oscillating() -> TestFunction:
    return TestFunction("osc", lambda x: np.sin(x) / (1.0 + x * x) + 2.0, "oscillating")


BUILTIN_NAMES = ("const", "exp-decay", "logistic-step", "osc")


def builtin(name: str, pair: Optional[SteinPair] = None, *, const_value: float = 1.0) -> TestFunction:
    """Look up a built-in test function by name.

    ``logistic-step`` is centred at ``pair.alpha`` (the zero of ``tau``), so a
    pair with a positive zero is required for it.
    """
    if name == "const":
        return constant(const_value)
    if name == "exp-decay":
        return exp_decay()
    if name == "osc":
        return oscillating()
    if name == "logistic-step":
        if pair is None or pair.alpha is None:
            raise DomainError("logistic-step needs a pair whose tau has a positive zero")
        return logistic_step(pair.alpha)
    raise DomainError(f"unknown test function {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


def builtin_family(pair: SteinPair, *, const_value: float = 1.0) -> list:
    names = [n for n in BUILTIN_NAMES if n != "logistic-step" or pair.alpha is not None]
    return [builtin(n, pair, const_value=const_value) for n in names]
