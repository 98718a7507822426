"""GIG and Kummer distributions: parameters, densities, Stein pairs, samplers.

Densities on ``(0, inf)``::

    GIG(p, a, b):     g(x) = (a/b)**(p/2) / (2 K_p(sqrt(ab))) x**(p-1) exp(-(a x + b/x)/2)
    Kummer(a, b, c):  k(x) = x**(a-1) (1+x)**(-a-b) exp(-c x) / N(a, b, c)

Both satisfy ``(s g)' = tau g`` with quadratic ``s`` and ``tau``::

    GIG:     s = x**2,      tau = b/2 + (p+1) x - (a/2) x**2
    Kummer:  s = x (1+x),   tau = a + (1-b-c) x - c x**2

``N(a, b, c)`` is computed by adaptive quadrature and cross-checked against
``Gamma(a) U(a, 1-b, c)`` (see :func:`kummer_normalizer_diagnostics`).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache, partial
from typing import Callable, Optional, Union

import numpy as np

from .errors import ConvergenceError, DomainError, ParameterError, PreconditionError
from .numerics import find_root, integrate, integrate_pieces, rng_stream
from .specfun import bessel_k, log_gamma, tricomi_u

__all__ = [
    "GigParams",
    "KummerParams",
    "SteinPair",
    "SampleBatch",
    "make_stein_pair",
    "gig_log_density",
    "kummer_log_density",
    "log_density",
    "gig_log_normalizer",
    "kummer_log_normalizer",
    "kummer_normalizer_diagnostics",
    "gig_stein_pair",
    "kummer_stein_pair",
    "stein_pair",
    "tau_zero",
    "gig_alpha_closed_form",
    "kummer_alpha_closed_form",
    "params_from_dict",
    "cdf",
    "sample",
]


def _finite(code: str, **values: float) -> None:
    for name, v in values.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise ParameterError(f"{code}.{name}_not_finite", f"{name} must be a finite number, got {v!r}")


@dataclass(frozen=True)
class GigParams:
    """Generalized inverse Gaussian parameters ``p`` real, ``a > 0``, ``b > 0``."""

    p: float
    a: float
    b: float

    family = "gig"

    def __post_init__(self):
        _finite("gig", p=self.p, a=self.a, b=self.b)
        if self.a <= 0:
            raise ParameterError("gig.a_nonpositive", f"GIG needs a > 0, got a={self.a}")
        if self.b <= 0:
            raise ParameterError("gig.b_nonpositive", f"GIG needs b > 0, got b={self.b}")

    @property
    def monotone_tau(self) -> bool:
        return self.p <= -1.0

    def to_dict(self) -> dict:
        return {"family": "gig", "p": float(self.p), "a": float(self.a), "b": float(self.b)}


@dataclass(frozen=True)
class KummerParams:
    """Kummer parameters ``a > 0``, ``b`` real, ``c > 0``."""

    a: float
    b: float
    c: float

    family = "kummer"

    def __post_init__(self):
        _finite("kummer", a=self.a, b=self.b, c=self.c)
        if self.a <= 0:
            raise ParameterError("kummer.a_nonpositive", f"Kummer needs a > 0, got a={self.a}")
        if self.c <= 0:
            raise ParameterError("kummer.c_nonpositive", f"Kummer needs c > 0, got c={self.c}")

    @property
    def monotone_tau(self) -> bool:
        return 1.0 - self.b - self.c <= 0.0

    def to_dict(self) -> dict:
        return {"family": "kummer", "a": float(self.a), "b": float(self.b), "c": float(self.c)}


Params = Union[GigParams, KummerParams]


def params_from_dict(d: dict) -> Params:
    """Inverse of ``to_dict``; raises :class:`ParameterError` on bad input."""
    if not isinstance(d, dict):
        raise ParameterError("params.not_object", "parameters must be a JSON object")
    fam = d.get("family")
    keys = {"gig": ("p", "a", "b"), "kummer": ("a", "b", "c")}.get(fam)
    if keys is None:
        raise ParameterError("params.unknown_family", f"family must be 'gig' or 'kummer', got {fam!r}")
    missing = [k for k in keys if k not in d]
    if missing:
        raise ParameterError(f"{fam}.missing", f"missing parameter(s) {', '.join(missing)}")
    extra = sorted(set(d) - set(keys) - {"family"})
    if extra:
        raise ParameterError(f"{fam}.unexpected", f"unexpected parameter(s) {', '.join(extra)}")
    vals = []
    for k in keys:
        v = d[k]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParameterError(f"{fam}.{k}_not_number", f"{k} must be a number, got {v!r}")
        vals.append(float(v))
    return GigParams(*vals) if fam == "gig" else KummerParams(*vals)


def _positive_x(x):
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)) or np.any(~np.isfinite(xa)):
        raise DomainError("density arguments must be finite and > 0")
    return xa


def _out(xa, r):
    return float(r) if xa.ndim == 0 else r


# ---------------------------------------------------------------- densities


@lru_cache(maxsize=256)
def gig_log_normalizer(params: GigParams) -> float:
    """``ln(2 K_p(sqrt(ab))) - (p/2) ln(a/b)``, so ``ln g = -this + ...``."""
    r = bessel_k(params.p, math.sqrt(params.a * params.b))
    if not r.converged:
        raise ConvergenceError(f"Bessel K did not converge for {params}")
    return math.log(2.0) + r.log_value - 0.5 * params.p * math.log(params.a / params.b)


def gig_log_density(params: GigParams, x):
    """Log-density of GIG(p, a, b); scalar in, scalar out."""
    xa = _positive_x(x)
    p, a, b = params.p, params.a, params.b
    r = -gig_log_normalizer(params) + (p - 1.0) * np.log(xa) - 0.5 * (a * xa + b / xa)
    return _out(xa, r)


def _kummer_unnorm(params: KummerParams, x):
    a, b, c = params.a, params.b, params.c
    return (a - 1.0) * np.log(x) - (a + b) * np.log1p(x) - c * x


def _kummer_reference_point(params: KummerParams) -> float:
    # maximiser of the unnormalised log-density: root of (a-1) - (1+b+c) x - c x^2
    a, b, c = params.a, params.b, params.c
    roots = _positive_quadratic_roots(a - 1.0, -(1.0 + b + c), -c)
    if roots:
        return roots[-1]
    return 1.0 / (1.0 + c)


@lru_cache(maxsize=256)
def kummer_log_normalizer(params: KummerParams) -> float:
    """``ln N(a,b,c)`` with ``N = int_0^inf x**(a-1) (1+x)**(-a-b) exp(-c x) dx``.

    Computed by adaptive quadrature of the integrand scaled by its value at
    the mode, so large parameters neither overflow nor underflow.
    """
    x0 = _kummer_reference_point(params)
    ref = float(_kummer_unnorm(params, np.float64(x0)))

    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        ok = t > 0
        with np.errstate(over="ignore", under="ignore"):
            out[ok] = np.exp(_kummer_unnorm(params, t[ok]) - ref)
        return out

    scale = max(params.a, 1.0) / params.c
    lo, head = 0.0, 0.0
    if params.a < 1.0:
        # x**(a-1) keeps mass at every scale down to 0 when a is small; with
        # u = x**a the head integrand is bounded: (1/a)(1+x)**(-a-b) e^{-cx}.
        lo = min(1.0, 1.0 / params.c)

        def fh(u):
            u = np.asarray(u, dtype=float)
            x = u ** (1.0 / params.a)
            with np.errstate(over="ignore", under="ignore"):
                return np.exp(-(params.a + params.b) * np.log1p(x) - params.c * x - ref) / params.a

        hr = integrate(fh, 0.0, lo**params.a, tol=1e-300, rel_tol=1e-14, max_subdivisions=20000)
        if not hr.converged and hr.abs_error_estimate > 1e-12 * abs(hr.value):
            raise ConvergenceError(f"Kummer normaliser quadrature did not converge for {params}")
        head = hr.value
    bps = sorted({x0, 0.1 * scale, scale, 10.0 * scale} - {0.0})
    bps = [b for b in bps if b > lo]
    res = integrate(f, lo, math.inf, tol=1e-300, rel_tol=1e-13, breakpoints=bps, max_subdivisions=20000)
    if not res.converged and res.abs_error_estimate > 1e-11 * abs(res.value):
        raise ConvergenceError(f"Kummer normaliser quadrature did not converge for {params}")
    return ref + math.log(head + res.value)


def kummer_normalizer_diagnostics(params: KummerParams) -> dict:
    """Compare the quadrature normaliser with two closed-form candidates.

    ``consistent`` is ``Gamma(a) U(a, 1-b, c)``, which matches the density's
    ``(1+x)**(-a-b)`` factor. ``alternative`` is ``Gamma(a) U(a, a-b+1, c)``,
    which is the normaliser of ``x**(a-1) (1+x)**(-b) exp(-c x)`` instead.
    Values are natural logs.
    """
    a, b, c = params.a, params.b, params.c
    quad = kummer_log_normalizer(params)
    out = {"log_normalizer_quadrature": quad}
    for key, second in (("consistent", 1.0 - b), ("alternative", a - b + 1.0)):
        r = tricomi_u(a, second, c)
        val = log_gamma(a) + r.log_value if r.converged else math.nan
        out[f"log_normalizer_{key}"] = val
        out[f"rel_diff_{key}"] = abs(math.expm1(val - quad)) if math.isfinite(val) else math.nan
    return out


def kummer_log_density(params: KummerParams, x):
    """Log-density of Kummer(a, b, c)."""
    xa = _positive_x(x)
    return _out(xa, _kummer_unnorm(params, xa) - kummer_log_normalizer(params))


def log_density(params: Params, x):
    if isinstance(params, GigParams):
        return gig_log_density(params, x)
    if isinstance(params, KummerParams):
        return kummer_log_density(params, x)
    raise DomainError(f"unsupported parameter record {params!r}")


# ---------------------------------------------------------------- Stein pairs


def _poly(coef, x):
    return coef[0] + x * (coef[1] + x * coef[2])


def _positive_quadratic_roots(c0: float, c1: float, c2: float) -> list:
    """Sorted positive real roots of ``c0 + c1 x + c2 x**2`` (cancellation-free)."""
    if c2 == 0.0:
        if c1 == 0.0:
            return []
        r = -c0 / c1
        return [r] if r > 0 else []
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    q = -0.5 * (c1 + math.copysign(sq, c1))
    roots = []
    if q != 0.0:
        roots += [q / c2, c0 / q]
    else:
        roots += [0.0]
    return sorted({r for r in roots if r > 0})


def _downcrossing(tau) -> Optional[float]:
    """Smallest positive zero where ``tau`` goes from positive to negative."""
    for r in _positive_quadratic_roots(*tau):
        if tau[1] + 2.0 * tau[2] * r < 0:
            return r
    return None


@dataclass(frozen=True)
class SteinPair:
    """A density ``g`` on ``(0, inf)`` with polynomials ``s``, ``tau`` and ``(s g)' = tau g``.

    ``s`` and ``tau`` are coefficient triples ``(c0, c1, c2)``. ``alpha`` is the
    positive zero where ``tau`` changes sign from + to -, if there is one.
    ``monotone_tau`` says whether ``tau`` is strictly decreasing on
    ``(0, inf)``, which is what the uniform solution bound needs.
    """

    s: tuple
    tau: tuple
    log_density: Callable = field(compare=False, repr=False)
    log_normalizer: float
    alpha: Optional[float]
    monotone_tau: bool
    family: str = "custom"
    params: Optional[Params] = None
    hypothesis: str = "tau decreasing on (0, inf)"

    def s_at(self, x):
        return _poly(self.s, np.asarray(x, dtype=float))

    def s_prime_at(self, x):
        return self.s[1] + 2.0 * self.s[2] * np.asarray(x, dtype=float)

    def tau_at(self, x):
        return _poly(self.tau, np.asarray(x, dtype=float))

    def tau_prime_at(self, x):
        return self.tau[1] + 2.0 * self.tau[2] * np.asarray(x, dtype=float)

    def log_g(self, x):
        return self.log_density(x)

    def g(self, x):
        return np.exp(self.log_density(x))

    def log_sg(self, x):
        """``ln(s(x) g(x))``."""
        x = np.asarray(x, dtype=float)
        return np.log(self.s_at(x)) + self.log_density(x)

    def density_critical_points(self) -> list:
        """Positive zeros of ``tau - s'``, where ``g' = 0``."""
        return _positive_quadratic_roots(
            self.tau[0] - self.s[1], self.tau[1] - 2.0 * self.s[2], self.tau[2]
        )

    def with_tau(self, tau) -> "SteinPair":
        """Same density and ``s`` with a different ``tau`` (for sensitivity checks)."""
        tau = tuple(float(t) for t in tau)
        return SteinPair(
            self.s, tau, self.log_density, self.log_normalizer, _downcrossing(tau),
            _is_decreasing(tau), self.family, self.params, self.hypothesis,
        )

    def describe(self) -> dict:
        return {
            "family": self.family,
            "params": self.params.to_dict() if self.params is not None else None,
            "s": list(self.s),
            "tau": list(self.tau),
            "alpha": self.alpha,
            "monotone_tau": self.monotone_tau,
            "log_normalizer": self.log_normalizer,
        }


def _is_decreasing(tau) -> bool:
    return tau[1] <= 0.0 and tau[2] <= 0.0 and (tau[1] < 0.0 or tau[2] < 0.0)


def make_stein_pair(s, tau, log_density: Callable, log_normalizer: float = 0.0, **kw) -> SteinPair:
    """Build a :class:`SteinPair` for a user-supplied density.

    ``alpha`` and ``monotone_tau`` are derived from ``tau``. ``s`` must be
    positive on ``(0, inf)``; it is checked coefficient-wise.
    """
    s = tuple(float(v) for v in s)
    tau = tuple(float(v) for v in tau)
    if len(s) != 3 or len(tau) != 3:
        raise DomainError("s and tau must be coefficient triples (c0, c1, c2)")
    if min(s) < 0 or max(s) == 0:
        raise DomainError("s needs non-negative coefficients, not all zero")
    return SteinPair(s, tau, log_density, float(log_normalizer), _downcrossing(tau), _is_decreasing(tau), **kw)


def gig_alpha_closed_form(params: GigParams) -> float:
    """``(p+1 + sqrt((p+1)**2 + ab)) / a`` evaluated without cancellation."""
    q = params.p + 1.0
    r = math.hypot(q, math.sqrt(params.a * params.b))
    if q <= 0:
        return params.b / (r - q)
    return (q + r) / params.a


def kummer_alpha_closed_form(params: KummerParams) -> float:
    """``(1-b-c + sqrt((1-b-c)**2 + 4ac)) / (2c)`` evaluated without cancellation."""
    q = 1.0 - params.b - params.c
    r = math.hypot(q, 2.0 * math.sqrt(params.a * params.c))
    if q <= 0:
        return 2.0 * params.a / (r - q)
    return (q + r) / (2.0 * params.c)


@lru_cache(maxsize=256)
def gig_stein_pair(params: GigParams) -> SteinPair:
    p, a, b = params.p, params.a, params.b
    return SteinPair(
        s=(0.0, 0.0, 1.0),
        tau=(0.5 * b, p + 1.0, -0.5 * a),
        log_density=partial(gig_log_density, params),
        log_normalizer=gig_log_normalizer(params),
        alpha=gig_alpha_closed_form(params),
        monotone_tau=params.monotone_tau,
        family="gig",
        params=params,
        hypothesis=f"p ≤ −1 (got p = {p:g})",
    )


@lru_cache(maxsize=256)
def kummer_stein_pair(params: KummerParams) -> SteinPair:
    a, b, c = params.a, params.b, params.c
    return SteinPair(
        s=(0.0, 1.0, 1.0),
        tau=(a, 1.0 - b - c, -c),
        log_density=partial(kummer_log_density, params),
        log_normalizer=kummer_log_normalizer(params),
        alpha=kummer_alpha_closed_form(params),
        monotone_tau=params.monotone_tau,
        family="kummer",
        params=params,
        hypothesis=f"1−b−c ≤ 0 (got 1−b−c = {1.0 - b - c:g})",
    )


def stein_pair(params: Params) -> SteinPair:
    if isinstance(params, GigParams):
        return gig_stein_pair(params)
    if isinstance(params, KummerParams):
        return kummer_stein_pair(params)
    raise DomainError(f"unsupported parameter record {params!r}")


def tau_zero(pair: SteinPair) -> float:
    """The unique positive zero of a decreasing ``tau``.

    Raises :class:`PreconditionError` when ``tau`` is not decreasing.
    """
    if not pair.monotone_tau:
        raise PreconditionError(f"tau is not decreasing on (0, inf); the bound needs {pair.hypothesis}")
    if pair.tau[0] <= 0:
        raise PreconditionError("tau(0) must be positive for a positive zero to exist")
    alpha = _downcrossing(pair.tau)
    if alpha is None:
        raise PreconditionError("tau has no positive zero")
    # one Newton polish step; the closed form is already within a few ulps
    d = float(pair.tau_prime_at(alpha))
    if d != 0.0:
        alpha -= float(pair.tau_at(alpha)) / d
    return alpha


def cdf(params: Params, x) -> np.ndarray:
    """Distribution function at the points ``x`` by piecewise quadrature."""
    xa = _positive_x(np.atleast_1d(x))
    order = np.argsort(xa)
    xs = xa[order]
    pair = stein_pair(params)
    edges = np.unique(np.concatenate([[0.0], xs]))
    crit = pair.density_critical_points()

    def f(t, _k):
        out = np.zeros_like(t)
        ok = t > 0
        with np.errstate(under="ignore"):
            out[ok] = np.exp(pair.log_density(t[ok]))
        return out

    # resolve the head [0, x_min] separately in case it contains the peak
    head_edges = np.unique(np.concatenate([[0.0], [c for c in crit if c < edges[1]], [edges[1]]]))
    head = integrate_pieces(f, head_edges, abs_tol=1e-15, rel_tol=1e-12).values.sum()
    rest = integrate_pieces(f, edges[1:], abs_tol=1e-15, rel_tol=1e-12).values if edges.size > 2 else np.zeros(0)
    cum = head + np.concatenate([[0.0], np.cumsum(rest)])
    vals = np.interp(xs, edges[1:], cum)
    out = np.empty_like(vals)
    out[order] = np.minimum(vals, 1.0)
    return out


# ---------------------------------------------------------------- sampling


@dataclass(frozen=True)
class SampleBatch:
    """Draws from a distribution together with what is needed to reproduce them."""

    values: np.ndarray = field(repr=False)
    seed: int
    method: str
    acceptance_rate: float
    params: Optional[Params] = None
    block_size: int = 0

    @property
    def n(self) -> int:
        return int(self.values.size)


DEFAULT_BLOCK_SIZE = 1 << 16
MAX_TRIALS_PER_DRAW = 10000


class _GigRou:
    """Ratio-of-uniforms with mode shift for ``x**(lam-1) exp(-w/2 (x + 1/x))``, ``lam >= 0``."""

    method = "gig-rou-mode-shift"

    def __init__(self, params: GigParams):
        self.lam = lam = abs(params.p)
        self.w = w = math.sqrt(params.a * params.b)
        self.invert = params.p < 0
        self.scale = math.sqrt(params.b / params.a)
        lm1 = lam - 1.0
        self.m = m = ((lm1 + math.hypot(lm1, w)) / w) if lm1 >= 0 else w / (math.hypot(lm1, w) - lm1)
        self.logf_m = self._logf_raw(m)

        # extremes of (x - m) sqrt(f(x)) are the positive roots of this cubic
        def cubic(x):
            return (-w * x**3 + (2.0 * lm1 + w * m + 4.0) * x**2 + (w - 2.0 * m * lm1) * x - w * m)

        x_lo = find_root(cubic, 0.0, m)
        hi = 2.0 * m + 1.0
        while cubic(hi) > 0:
            hi *= 2.0
        x_hi = find_root(cubic, m, hi)
        self.v_minus = (x_lo - m) * math.exp(0.5 * self.logf(x_lo))
        self.v_plus = (x_hi - m) * math.exp(0.5 * self.logf(x_hi))

    def _logf_raw(self, x):
        return (self.lam - 1.0) * np.log(x) - 0.5 * self.w * (x + 1.0 / x)

    def logf(self, x):
        return self._logf_raw(x) - self.logf_m

    def draw(self, rng: np.random.Generator, n: int):
        out = np.empty(n)
        filled = 0
        trials = 0
        while filled < n:
            k = max(64, int(1.3 * (n - filled)) + 16)
            u = 1.0 - rng.random(k)  # (0, 1]
            v = self.v_minus + (self.v_plus - self.v_minus) * rng.random(k)
            x = v / u + self.m
            ok = x > 0
            acc = np.zeros(k, dtype=bool)
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                acc[ok] = 2.0 * np.log(u[ok]) <= self.logf(x[ok])
            got = x[acc][: n - filled]
            out[filled:filled + got.size] = got
            filled += got.size
            trials += k if filled < n else int(np.flatnonzero(acc)[got.size - 1]) + 1
            if trials > MAX_TRIALS_PER_DRAW * n:
                raise ConvergenceError("GIG sampler acceptance rate is too low")
        if self.invert:
            out = 1.0 / out
        return out * self.scale, trials


class _KummerLogRou:
    """Ratio-of-uniforms with mode shift for ``Y = ln X`` when ``a + b >= 0``.

    ``Y`` has log-density ``a y - (a+b) ln(1 + e**y) - c e**y`` (up to a
    constant), which is concave, so the rejection constant is bounded
    whatever the parameters. Used when the plain gamma envelope would accept
    less than :data:`GAMMA_ENVELOPE_MIN_ACCEPTANCE` of its proposals.
    """

    method = "kummer-log-rou-mode-shift"

    def __init__(self, params: KummerParams):
        self.a, self.e, self.c = params.a, params.a + params.b, params.c
        x_mode = _positive_quadratic_roots(self.a, self.a - self.e - self.c, -self.c)[0]
        self.m = m = math.log(x_mode)
        self.logf_m = 0.0
        self.logf_m = float(self.logf(np.float64(m)))

        def side(y):
            return 1.0 / (y - m) + 0.5 * self.dlogf(y)

        ext = []
        for sgn in (-1.0, 1.0):
            step = 1.0
            while side(m + sgn * step) * sgn > 0:
                step *= 2.0
                if step > 1e4:
                    raise ConvergenceError("could not bracket the ratio-of-uniforms extremes")
            near = 1e-12 * max(1.0, abs(m))
            lo, hi = sorted((m + sgn * near, m + sgn * step))
            y = find_root(side, lo, hi)
            ext.append((y - m) * math.exp(0.5 * float(self.logf(np.float64(y)))))
        self.v_minus, self.v_plus = ext

    def logf(self, y):
        x = np.exp(y)
        return self.a * y - self.e * np.log1p(x) - self.c * x - self.logf_m

    def dlogf(self, y):
        x = math.exp(y)
        return self.a - self.e * x / (1.0 + x) - self.c * x

    def draw(self, rng: np.random.Generator, n: int):
        out = np.empty(n)
        filled = 0
        trials = 0
        while filled < n:
            k = max(64, int(1.5 * (n - filled)) + 16)
            u = 1.0 - rng.random(k)
            v = self.v_minus + (self.v_plus - self.v_minus) * rng.random(k)
            y = v / u + self.m
            with np.errstate(over="ignore", invalid="ignore"):
                acc = 2.0 * np.log(u) <= self.logf(y)
            got = y[acc][: n - filled]
            out[filled:filled + got.size] = got
            filled += got.size
            trials += k if filled < n else int(np.flatnonzero(acc)[got.size - 1]) + 1
            if trials > MAX_TRIALS_PER_DRAW * n:
                raise ConvergenceError("Kummer sampler acceptance rate is too low")
        return np.exp(out), trials


GAMMA_ENVELOPE_MIN_ACCEPTANCE = 0.25


class _KummerRejection:
    """Rejection from gamma envelopes.

    ``a + b >= 0``: propose Gamma(a, rate c), accept with ``(1+x)**(-(a+b))``.

    ``a + b < 0``: write ``d = -(a+b) = m + e`` with integer ``m`` and
    ``0 <= e < 1``. Since ``(1+x)**e <= 1 + x**e``, the target is dominated by
    ``x**(a-1) (1+x)**m (1 + x**e) exp(-c x)``, which expands binomially into
    a finite mixture of Gamma(a+j, c) and Gamma(a+j+e, c) laws. The
    acceptance ratio ``(1+x)**e / (1 + x**e)`` is at least 1/2.
    """

    def __init__(self, params: KummerParams):
        self.a, self.b, self.c = params.a, params.b, params.c
        d = -(self.a + self.b)
        self.d = d
        if d <= 0:
            self.method = "kummer-gamma-rejection"
            # exact acceptance probability of this envelope
            self.expected_acceptance = math.exp(
                kummer_log_normalizer(params) + self.a * math.log(self.c) - log_gamma(self.a)
            )
            return
        self.method = "kummer-gamma-mixture-rejection"
        m = int(math.floor(d))
        self.e = e = d - m
        shapes = [self.a + j for j in range(m + 1)]
        if e > 0:
            shapes += [self.a + j + e for j in range(m + 1)]
        log_c = math.log(self.c)
        logw = np.array([
            math.lgamma(m + 1) - math.lgamma(j % (m + 1) + 1) - math.lgamma(m - j % (m + 1) + 1)
            + log_gamma(k) - k * log_c
            for j, k in enumerate(shapes)
        ])
        w = np.exp(logw - logw.max())
        self.shapes = np.array(shapes)
        self.cum = np.cumsum(w / w.sum())
        self.cum[-1] = 1.0

    def draw(self, rng: np.random.Generator, n: int):
        out = np.empty(n)
        filled = 0
        trials = 0
        while filled < n:
            k = max(64, int(1.3 * (n - filled)) + 16)
            if self.d <= 0:
                x = rng.gamma(self.a, 1.0 / self.c, k)
                log_acc = self.d * np.log1p(x)
            else:
                comp = np.searchsorted(self.cum, rng.random(k), side="right")
                x = rng.gamma(self.shapes[np.minimum(comp, self.shapes.size - 1)], 1.0 / self.c)
                if self.e > 0:
                    with np.errstate(divide="ignore"):
                        log_acc = self.e * np.log1p(x) - np.logaddexp(0.0, self.e * np.log(x))
                else:
                    log_acc = np.zeros(k)
            u = 1.0 - rng.random(k)
            acc = (np.log(u) <= log_acc) & (x > 0)
            got = x[acc][: n - filled]
            out[filled:filled + got.size] = got
            filled += got.size
            trials += k if filled < n else int(np.flatnonzero(acc)[got.size - 1]) + 1
            if trials > MAX_TRIALS_PER_DRAW * n:
                raise ConvergenceError("Kummer sampler acceptance rate is too low")
        return out, trials


def sample(
    params: Params,
    n: int,
    seed: int,
    *,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> SampleBatch:
    """Draw ``n`` independent variates.

    The output is split into blocks of ``block_size`` draws; block ``j`` uses
    the counter-based stream ``(seed, j)``. The result therefore depends only
    on ``(params, n, seed, block_size)``, never on ``workers``.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed!r}")
    if block_size < 1:
        raise DomainError("block_size must be positive")
    if isinstance(params, GigParams):
        gen = _GigRou(params)
    elif isinstance(params, KummerParams):
        gen = _KummerRejection(params)
        if gen.d <= 0 and gen.expected_acceptance < GAMMA_ENVELOPE_MIN_ACCEPTANCE:
            gen = _KummerLogRou(params)
    else:
        raise DomainError(f"unsupported parameter record {params!r}")

    n = int(n)
    sizes = [min(block_size, n - j) for j in range(0, n, block_size)]

    def run(j):
        return gen.draw(rng_stream(int(seed), j), sizes[j])

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=int(workers)) as ex:
            parts = list(ex.map(run, range(len(sizes))))
    else:
        parts = [run(j) for j in range(len(sizes))]
    values = np.concatenate([p[0] for p in parts])
    trials = sum(p[1] for p in parts)
    return SampleBatch(values, int(seed), gen.method, n / trials, params, int(block_size))
