"""Evaluation of Omega_s(x,t) = U_s + V_s + W_s (x > 0) and its conjugate extension.

U_s   contour integral over z = 1/2 + rho*u.
V_s   rho x^{s-1/2} sum_k e^{-i pi (k-tau)^2/x} ((k-tau)^{-s} - k^{-s}).
W_s   rho x^s int e^{-pi x u^2} sum_k e^{-i pi (k-tau)^2/x}
      ((rho x u + k - tau)^{-s} - (k - tau)^{-s}) du,
      evaluated term by term: w(kappa) by quadrature for small kappa and by
      its Gaussian-moment series for large kappa.

tau = {t}; rho = e^{i pi/4}.  All phases e^{-i pi (k-tau)^2/x} come from the
exact fixed-point kernel with y = -1/x and t' = tau/x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

import mpmath
import numpy as np

from . import kernels, quad
from .errors import InputError, SingularityError
from .numbers import RHO, QuadSurd, as_real, exact_value, frac, mod2

Exact = Union[Fraction, QuadSurd]

X_MIN = 1e-6
X_MAX = 2


@dataclass(frozen=True)
class QuadConfig:
    tol: float = 1e-10
    max_nodes: int = 400_000
    u_cut: Optional[float] = None  # None: per-side cuts from the tail bounds
    series_tail_tol: float = 1e-10
    n_max: int = 1 << 22

    def __post_init__(self):
        if not self.tol > 0 or not self.series_tail_tol > 0:
            raise InputError("tolerances must be > 0")


@dataclass
class PartResult:
    value: complex
    est_error: float
    info: dict = field(default_factory=dict)


@dataclass
class OmegaValue:
    value: complex
    est_error: float
    parts: tuple[complex, complex, complex]
    diagnostics: dict = field(default_factory=dict)


# -- helpers -----------------------------------------------------------------

def _exact(x) -> Exact:
    return exact_value(as_real(x))


def _cis_pi(v: Exact) -> complex:
    """e^{i pi v} with v reduced exactly mod 2 first."""
    r = mod2(v)
    with mpmath.workprec(80):
        m = r.to_mpf(80) if isinstance(r, QuadSurd) else mpmath.mpf(r.numerator) / r.denominator
        return complex(mpmath.expjpi(m))


def _dual_words(xe: Exact, tau: Exact) -> tuple[int, int]:
    """Phase words for e^{i pi k^2 (-1/x) + 2 i pi k tau/x}."""
    return kernels.fixed_phase(-1 / xe, tau / xe)


def _dual_units(xe: Exact, tau: Exact, a: int, b: int) -> np.ndarray:
    """e^{-i pi (k - tau)^2 / x} for k = a..b."""
    Y, T = _dual_words(xe, tau)
    return _cis_pi(-tau * tau / xe) * kernels.phase_units(Y, T, a, b)


def _gauss_cut(x: float, log_target: float) -> float:
    return math.sqrt(max(log_target, 1.0) / (math.pi * x))


# -- U_s -----------------------------------------------------------------------

def _u_cuts(s: float, x: float, tau: float, tol: float) -> tuple[float, float]:
    L = math.log(8.0 / tol) + s * math.log(2.0) + math.log1p(1.0 / math.sqrt(math.pi * x))
    up = _gauss_cut(x, L) + 0.5
    c = math.sqrt(2.0) * math.pi * (1.0 - tau) - math.pi * x / math.sqrt(2.0)
    a = math.pi * x
    down = (-c + math.sqrt(c * c + 4.0 * a * L)) / (2.0 * a) + 0.5
    return up, down


def _u_integrand(s: float, x: float, tau: float):
    def f(u: np.ndarray) -> np.ndarray:
        z = 0.5 + RHO * u
        E = 1j * math.pi * x * z * z + 2j * math.pi * z * tau
        w = 2j * math.pi * z
        zs = np.power(z, s) if s != 0 else 1.0
        pos = u >= 0
        out = np.empty(u.shape, dtype=complex)
        out[pos] = np.exp(E[pos]) / (1.0 - np.exp(w[pos]))
        neg = ~pos
        out[neg] = -np.exp(E[neg] - w[neg]) / (1.0 - np.exp(-w[neg]))
        return RHO * out / zs
    return f


def _u_part(s: float, x: float, tau: float, cfg: QuadConfig) -> PartResult:
    up, down = _u_cuts(s, x, tau, cfg.tol)
    if cfg.u_cut is not None:
        up = down = cfg.u_cut
    res = quad.integrate(_u_integrand(s, x, tau), [-down, 0.0, up], cfg.tol / 4, cfg.max_nodes)
    err = res.error + cfg.tol / 4  # discarded tails are below tol/8 each
    return PartResult(res.value, err, {"u_nodes": res.nodes, "u_cut": (down, up),
                                       "u_converged": res.converged})


def u_s_integral(s: float, x, t=Fraction(0), cfg: QuadConfig = QuadConfig()) -> complex:
    """U_s(x,t) for 0 < x <= 2."""
    xf = float(_exact(x))
    if not 0 < xf <= X_MAX:
        raise InputError("u_s_integral expects 0 < x <= 2")
    if s < 0:
        raise InputError("s must be >= 0")
    tau = float(frac(_exact(t)))
    return _u_part(s, xf, tau, cfg).value


def u_s_at_zero(s: float, cfg: QuadConfig = QuadConfig()) -> complex:
    """lim_{x->0+} U_s(x) for s > 1 (the contour integral without the Gaussian)."""
    if s <= 1:
        raise InputError("U_s(0) is finite only for s > 1")

    def f(u):
        z = 0.5 + RHO * u
        w = 2j * math.pi * z
        out = np.empty(u.shape, dtype=complex)
        pos = u >= 0
        out[pos] = 1.0 / (1.0 - np.exp(w[pos]))
        out[~pos] = -np.exp(-w[~pos]) / (1.0 - np.exp(-w[~pos]))
        return RHO * out / np.power(z, s)

    L = math.log(8.0 / cfg.tol)
    down = L / (math.sqrt(2.0) * math.pi) + 1.0
    up = 40.0
    res = quad.integrate(f, [-down, 0.0, up], cfg.tol / 4, cfg.max_nodes)
    # tail beyond u = up: 1/(1 - e^w) = 1 + O(e^{-sqrt2 pi u}), integral of z^{-s} dz is exact
    zu = 0.5 + RHO * up
    return res.value + complex(zu ** (1.0 - s) / (s - 1.0))


# -- V_s -----------------------------------------------------------------------

def _v_part(s: float, xe: Exact, tau: Exact, tail_tol: float, n_max: int) -> PartResult:
    if s == 0 or tau == 0:
        return PartResult(0j, 0.0, {"v_terms": 0})
    x = float(xe)
    tf = float(tau)
    # tail bound x^{s-1/2} / (N + 1 - tau)^s < tail_tol
    need = (x ** (s - 0.5) / tail_tol) ** (1.0 / s) + tf - 1.0
    N = int(min(max(math.ceil(need), 1), n_max))
    capped = need > n_max
    Y, T = _dual_words(xe, tau)
    a, _ = kernels.phase_sum(Y, T, 1, N, s, -tf)
    b, _ = kernels.phase_sum(Y, T, 1, N, s, 0.0)
    val = RHO * x ** (s - 0.5) * _cis_pi(-tau * tau / xe) * (a - b)
    bound = x ** (s - 0.5) / (N + 1 - tf) ** s
    return PartResult(val, bound, {"v_terms": N, "v_capped": capped})


def v_s_series(s: float, x, t=Fraction(0), tail_tol: float = 1e-10, n_max: int = 1 << 22) -> complex:
    xe = _exact(x)
    if not xe > 0:
        raise InputError("v_s_series expects x > 0")
    if s < 0:
        raise InputError("s must be >= 0")
    return _v_part(s, xe, frac(_exact(t)), tail_tol, n_max).value


# -- W_s -----------------------------------------------------------------------

def _binom_neg(s: float, n: int) -> float:
    """C(-s, n)."""
    c = 1.0
    for j in range(n):
        c *= (-s - j) / (j + 1)
    return c


def _asym_coeffs(s: float, M: int) -> np.ndarray:
    out = np.empty(M, dtype=complex)
    dfact = 1.0
    for m in range(1, M + 1):
        dfact *= 2 * m - 1
        out[m - 1] = _binom_neg(s, 2 * m) * dfact * (1j ** m)
    return out


def w_asymptotic(s: float, x: float, kappa: np.ndarray, M: int = 14) -> tuple[np.ndarray, np.ndarray]:
    """w(kappa) from the Gaussian moments of the binomial series; returns (value, error)."""
    r = x / (2.0 * math.pi * kappa * kappa)
    c = _asym_coeffs(s, M + 1)
    acc = np.zeros(kappa.shape, dtype=complex)
    for m in range(M, 0, -1):
        acc = (acc + c[m - 1]) * r
    err = np.abs(c[M]) * r ** (M + 1)
    pref = RHO * x ** (s - 0.5) * np.power(kappa, -s)
    return pref * acc, np.abs(pref) * err


def _w_small_integrand(s: float, x: float, kappas: np.ndarray, ph: np.ndarray):
    pref = RHO * x ** s
    ks = np.power(kappas, -s)

    def f(u: np.ndarray) -> np.ndarray:
        g = np.exp(-math.pi * x * u * u)
        b = np.power(RHO * x * u[:, None] + kappas[None, :], -s) - ks[None, :]
        return pref * g * (b @ ph)
    return f


def _w_part(s: float, xe: Exact, tau: Exact, cfg: QuadConfig) -> PartResult:
    if s == 0:
        return PartResult(0j, 0.0, {"w_terms": 0})
    x = float(xe)
    tf = float(tau)
    K0 = max(4, math.ceil(6.0 * math.sqrt(x)))
    # tail of the absolutely convergent series: x^{s+1/2} s/(4 pi) K1^{-(s+1)}
    coef = x ** (s + 0.5) * s / (4.0 * math.pi)
    K1 = math.ceil((coef / cfg.series_tail_tol) ** (1.0 / (s + 1.0))) + 1
    K1 = max(K1, K0)
    capped = K1 > cfg.n_max
    K1 = min(K1, cfg.n_max)
    # small kappa: one vector-valued integral
    ks = np.arange(1, K0, dtype=float) - tf
    ph = _dual_units(xe, tau, 1, K0 - 1)
    L = math.log(8.0 * 3.0 * max(1.0, float(np.max(ks ** -s))) * (K0 - 1) / cfg.tol)
    uc = _gauss_cut(x, L) + 0.5
    res = quad.integrate(_w_small_integrand(s, x, ks, ph), [-uc, 0.0, uc], cfg.tol / 4,
                         cfg.max_nodes)
    total = res.value
    err = res.error + cfg.tol / 8
    if K1 >= K0:
        kap = np.arange(K0, K1 + 1, dtype=float) - tf
        wv, we = w_asymptotic(s, x, kap)
        ph2 = _dual_units(xe, tau, K0, K1)
        terms = wv * ph2
        total += complex(math.fsum(terms.real), math.fsum(terms.imag))
        err += float(np.sum(we))
    err += coef * K1 ** (-(s + 1.0))
    return PartResult(total, err, {"w_terms": K1, "w_small": K0 - 1, "w_nodes": res.nodes,
                                   "w_capped": capped, "w_converged": res.converged})


def w_s_integral(s: float, x, t=Fraction(0), cfg: QuadConfig = QuadConfig()) -> complex:
    xe = _exact(x)
    if not xe > 0:
        raise InputError("w_s_integral expects x > 0")
    if s < 0:
        raise InputError("s must be >= 0")
    return _w_part(s, xe, frac(_exact(t)), cfg).value


# -- Omega -----------------------------------------------------------------------

def _omega_pos(s: float, xe: Exact, tau: Exact, cfg: QuadConfig) -> OmegaValue:
    x = float(xe)
    U = _u_part(s, x, float(tau), cfg)
    V = _v_part(s, xe, tau, cfg.series_tail_tol, cfg.n_max)
    W = _w_part(s, xe, tau, cfg)
    diag = {**U.info, **V.info, **W.info}
    return OmegaValue(U.value + V.value + W.value, U.est_error + V.est_error + W.est_error,
                      (U.value, V.value, W.value), diag)


@lru_cache(maxsize=4096)
def _omega_cached(s: float, xe: Exact, te: Exact, cfg: QuadConfig) -> OmegaValue:
    if xe > 0:
        return _omega_pos(s, xe, frac(te), cfg)
    r = _omega_pos(s, -xe, frac(-te), cfg)
    U, V, W = r.parts
    return OmegaValue(r.value.conjugate(), r.est_error,
                      (U.conjugate(), V.conjugate(), W.conjugate()), dict(r.diagnostics))


def clear_cache() -> None:
    """Drop memoised Omega values (they are keyed on exact x, t and the config)."""
    _omega_cached.cache_clear()


def omega(s: float, x, t=Fraction(0), cfg: QuadConfig = QuadConfig()) -> OmegaValue:
    """Omega_s(x,t): U+V+W for x > 0, conj(Omega_s(-x,-t)) for x < 0."""
    if not (math.isfinite(s) and s >= 0):
        raise InputError("s must be finite and >= 0")
    xe = _exact(x)
    te = _exact(t)
    xf = float(xe)
    if abs(xf) > X_MAX:
        raise InputError("|x| must be <= 2")
    if abs(xf) < X_MIN:
        raise SingularityError(f"|x| < {X_MIN}: use omega_regularized near 0")
    return _omega_cached(float(s), xe, te, cfg)


def singular_constant(s: float) -> complex:
    """c(s) = rho^{1-s} Gamma((1-s)/2) / (2 pi^{(1-s)/2}) for 0 <= s < 1."""
    if not 0 <= s < 1:
        raise InputError("c(s) is defined for 0 <= s < 1")
    return complex(mpmath.expjpi((1 - s) / 4) * mpmath.gamma((1 - s) / 2)
                   / (2 * mpmath.pi ** ((1 - s) / 2)))


def omega_regularized(s: float, x, cfg: QuadConfig = QuadConfig()) -> complex:
    """Delta_s(x): Omega_s(x) minus its singular part at 0.

    For x < 0 the subtracted constant is conj(c(s)), matching
    Omega_s(x) = conj(Omega_s(-x)).
    """
    if not 0 <= s <= 1:
        raise InputError("omega_regularized expects 0 <= s <= 1")
    xe = _exact(x)
    xf = float(xe)
    if xf == 0:
        raise InputError("x must be nonzero")
    om = omega(s, x, Fraction(0), cfg).value
    if s == 1:
        return om - math.log(1.0 / math.sqrt(abs(xf)))
    c = singular_constant(s)
    if xf < 0:
        c = c.conjugate()
    return om - c * abs(xf) ** ((s - 1) / 2)
