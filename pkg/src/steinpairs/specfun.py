"""Real special functions for the GIG and Kummer normalising constants.

Evaluation regimes
------------------
``bessel_k``
    Reduce the order to ``mu = |p| - round(|p|)`` in ``[-1/2, 1/2)`` and get
    ``K_mu, K_{mu+1}`` from Temme's series for ``x <= 2`` or Steed's
    continued fraction for ``x > 2``; then recur upwards in the order. The
    recurrence is run with periodic rescaling, so large orders at small
    arguments never overflow.
``tricomi_u``
    For ``b < 1`` apply Kummer's transformation
    ``U(a, b, z) = z**(1-b) U(a-b+1, 2-b, z)`` so that ``b >= 1``. Start from
    the asymptotic expansion at a point ``z0`` large enough for it to converge
    without cancellation, then integrate Kummer's equation back to ``z`` with
    local Taylor series. ``U`` is the dominant solution in that direction,
    so the integration is stable. Steps are capped at ``min(x/2, 2)``.

All results are returned as ``value * exp(log_scale)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

__all__ = [
    "SpecfunResult",
    "bessel_k",
    "tricomi_u",
    "log_gamma",
    "log_bessel_k",
    "log_tricomi_u",
]

# Taylor coefficients of 1/Gamma(1 + z) about z = 0
_RGAM = (
    1.0,
    0.5772156649015328606065,
    -0.655878071520253881077,
    -0.042002635034095235529,
    0.1665386113822914895017,
    -0.04219773455554433674821,
    -0.009621971527876973562115,
    0.007218943246663099542395,
    -0.001165167591859065112114,
    -0.0002152416741149509728157,
    0.0001280502823881161861532,
    -0.00002013485478078823865569,
    -0.000001250493482142670657345,
    0.000001133027231981695882374,
    -2.05633841697760710345e-7,
    6.116095104481415817862e-9,
    5.002007644469222930056e-9,
    -1.181274570487020144588e-9,
    1.043426711691100510492e-10,
    7.78226343990507125405e-12,
    -3.696805618642205708188e-12,
)

BESSEL_SERIES_MAX_X = 2.0
_RESCALE = 1e200
_LOG_RESCALE = math.log(_RESCALE)


@dataclass(frozen=True)
class SpecfunResult:
    """A special-function value stored as ``value * exp(log_scale)``."""

    value: float
    log_scale: float
    converged: bool
    terms_used: int

    @property
    def log_value(self) -> float:
        """Natural log of the (positive) represented number."""
        return math.log(self.value) + self.log_scale

    def __float__(self) -> float:
        try:
            return self.value * math.exp(self.log_scale)
        except OverflowError:
            return math.copysign(math.inf, self.value)


def _temme_gammas(mu):
    # Gamma1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), Gamma2 = (1/G(1-mu) + 1/G(1+mu)) / 2
    m2 = mu * mu
    g1 = 0.0
    for k in range(19, 0, -2):
        g1 = g1 * m2 + _RGAM[k]
    g2 = 0.0
    for k in range(20, -1, -2):
        g2 = g2 * m2 + _RGAM[k]
    return -g1, g2


def _k_series(mu, x, rtol, max_terms):
    """K_mu(x), K_{mu+1}(x) for x <= 2 by Temme's series."""
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < 1e-300 else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if abs(e) < 1e-300 else math.sinh(e) / e
    gam1, gam2 = _temme_gammas(mu)
    gampl = gam2 - mu * gam1  # 1/Gamma(1+mu)
    gammi = gam2 + mu * gam1  # 1/Gamma(1-mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    e = math.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = 1.0
    d = x2 * x2
    total1 = p
    for i in range(1, max_terms):
        ff = (i * ff + p + q) / (i * i - mu * mu)
        c *= d / i
        p /= i - mu
        q /= i + mu
        delta = c * ff
        total += delta
        total1 += c * (p - i * ff)
        if abs(delta) < abs(total) * rtol:
            return total, total1 * 2.0 / x, 0.0, i, True
    return total, total1 * 2.0 / x, 0.0, max_terms, False


def _k_steed(mu, x, rtol, max_terms):
    """K_mu(x), K_{mu+1}(x) for x > 2 by Steed's continued fraction.

    The factor exp(-x) is returned separately as a log scale.
    """
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu * mu
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    ok = False
    i = 1
    for i in range(2, max_terms):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < rtol:
            ok = True
            break
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) / s
    kmu1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, kmu1, -x, i, ok


def bessel_k(order: float, x: float, *, rtol: float = 1e-16, max_terms: int = 20000) -> SpecfunResult:
    """Modified Bessel function of the third kind ``K_order(x)``.

    Parameters
    ----------
    order : float
        Any real order; ``K`` is even in the order.
    x : float
        Positive argument.
    rtol : float
        Stopping tolerance of the series / continued fraction.
    max_terms : int
        Iteration budget; exhausting it yields ``converged=False``.

    Raises
    ------
    DomainError
        If ``x <= 0`` or an input is not finite.
    """
    order = float(order)
    x = float(x)
    if not (math.isfinite(order) and math.isfinite(x)):
        raise DomainError("bessel_k needs finite order and argument")
    if x <= 0.0:
        raise DomainError(f"bessel_k needs x > 0, got {x}")
    nu = abs(order)
    n = int(nu + 0.5)
    mu = nu - n
    if x <= BESSEL_SERIES_MAX_X:
        kmu, kmu1, log_scale, terms, ok = _k_series(mu, x, rtol, max_terms)
    else:
        kmu, kmu1, log_scale, terms, ok = _k_steed(mu, x, rtol, max_terms)
    if n == 0:
        cur = kmu
    else:
        prev, cur = kmu, kmu1
        for i in range(1, n):
            prev, cur = cur, (2.0 * (mu + i) / x) * cur + prev
            if cur > _RESCALE:
                prev /= _RESCALE
                cur /= _RESCALE
                log_scale += _LOG_RESCALE
    ok = ok and math.isfinite(cur) and cur > 0.0
    return SpecfunResult(cur, log_scale, ok, terms + n)


def _asymptotic_pair(a, b, z, rtol, max_terms):
    """``z**a U(a,b,z)`` and ``z**a U'(a,b,z)`` from the asymptotic series.

    Returns ``None`` when the series does not settle, or when its largest
    term is more than ten times the sum (cancellation).
    """

    def series(a, b):
        t = 1.0
        s = 1.0
        big = 1.0
        c = a - b + 1.0
        for k in range(max_terms):
            ratio = (a + k) * (c + k) / ((k + 1) * z)
            t *= -ratio
            s += t
            big = max(big, abs(t))
            if abs(t) < rtol * abs(s):
                return (s, k + 1) if big <= 10.0 * abs(s) else None
            if abs(ratio) > 1.0 and k > abs(a) + abs(c):
                return None
        return None

    r0 = series(a, b)
    if r0 is None:
        return None
    # U'(a, b, z) = -a U(a+1, b+1, z)
    r1 = series(a + 1.0, b + 1.0)
    if r1 is None:
        return None
    return r0[0], -a * r1[0] / z, r0[1] + r1[1]


def _taylor_step(a, b, x, h, w, dw, rtol, max_terms):
    """Advance ``(w, w')`` of Kummer's equation from ``x`` to ``x + h``.

    Works with scaled coefficients ``d_k = c_k h**k`` to stay in range.
    """
    t = h / x
    d0 = w
    d1 = dw * h
    total = d0 + d1
    dtotal = d1
    for k in range(max_terms):
        d2 = ((x - b - k) * (k + 1) * t * d1 + (k + a) * h * t * d0) / ((k + 2) * (k + 1))
        total += d2
        dtotal += (k + 2) * d2
        d0, d1 = d1, d2
        if k > 4 and abs(d2) <= rtol * abs(total) and abs((k + 2) * d2) <= rtol * abs(dtotal):
            return total, dtotal / h, k + 2, True
    return total, dtotal / h, max_terms, False


def tricomi_u(
    a: float,
    b: float,
    z: float,
    *,
    rtol: float = 1e-17,
    max_terms: int = 5000,
    max_step: float = 2.0,
    max_steps: int = 100000,
) -> SpecfunResult:
    """Confluent hypergeometric function of the second kind ``U(a, b, z)``.

    Defined for ``a > 0`` and ``z > 0`` through
    ``U(a,b,z) = 1/Gamma(a) * int_0^inf exp(-z t) t**(a-1) (1+t)**(b-a-1) dt``.
    Accuracy target is 1e-10 relative for ``a <= 50``, ``|b| <= 50`` and
    ``z`` in ``[1e-4, 500]``.
    """
    a = float(a)
    b = float(b)
    z = float(z)
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(z)):
        raise DomainError("tricomi_u needs finite arguments")
    if a <= 0.0:
        raise DomainError(f"tricomi_u needs a > 0, got {a}")
    if z <= 0.0:
        raise DomainError(f"tricomi_u needs z > 0, got {z}")

    log_scale = 0.0
    if b < 1.0:
        log_scale = (1.0 - b) * math.log(z)
        a, b = a - b + 1.0, 2.0 - b

    z0 = max(z, 20.0, 2.0 * (math.sqrt(a) + math.sqrt(abs(a - b + 1.0))) ** 2)
    start = None
    for _ in range(200):
        start = _asymptotic_pair(a, b, z0, rtol, max_terms)
        if start is not None:
            break
        z0 *= 1.5
    if start is None:
        return SpecfunResult(math.nan, 0.0, False, 0)
    w, dw, terms = start
    log_scale -= a * math.log(z0)

    x = z0
    ok = True
    steps = 0
    while x > z:
        if steps >= max_steps:
            ok = False
            break
        h = max(z - x, -0.5 * x, -max_step)
        w, dw, used, step_ok = _taylor_step(a, b, x, h, w, dw, rtol, max_terms)
        ok = ok and step_ok
        terms += used
        steps += 1
        x = z if h == z - x else x + h
        m = max(abs(w), abs(dw))
        if not (m > 0.0 and math.isfinite(m)):
            ok = False
            break
        w /= m
        dw /= m
        log_scale += math.log(m)
    ok = ok and math.isfinite(w) and w > 0.0
    return SpecfunResult(w, log_scale, ok, terms)


def log_gamma(x: float) -> float:
    """``ln Gamma(x)`` for ``x > 0``."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"log_gamma needs finite x > 0, got {x}")
    return math.lgamma(x)


def log_bessel_k(order: float, x: float) -> float:
    """``ln K_order(x)``; raises :class:`ConvergenceError` instead of flagging."""
    r = bessel_k(order, x)
    if not r.converged:
        raise ConvergenceError(f"bessel_k({order}, {x}) did not converge")
    return r.log_value


def log_tricomi_u(a: float, b: float, z: float) -> float:
    """``ln U(a, b, z)``; raises :class:`ConvergenceError` instead of flagging."""
    r = tricomi_u(a, b, z)
    if not r.converged:
        raise ConvergenceError(f"tricomi_u({a}, {b}, {z}) did not converge")
    return r.log_value
