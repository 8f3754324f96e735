"""Approximate functional equation, its independent oracle, and the iterated expansions.

For x in [-1,1] minus {0}:

    F_{s,n}(x,t) - r(x) e^{-i pi {sig t}^2/x} |x|^{s-1/2} F_{s,[n|x|]}(-1/x, {sig t}/x)
        = Omega_s(x,t) + E_s(n,x),

with r(x) = e^{i pi sig(x)/4}, sig = sign(x).  Iterating along the T-orbit
gives F_s(x,t) as a sum of Omega_s(T^j x, T~_j) weighted by orbit products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels, quad
from .cf import orbit_products, t_ops, t_orbit
from .diagnostics import orbit_sums
from .errors import InputError
from .numbers import EIGHTH_ROOTS, RHO, QuadSurd, RealInput, as_real, exact_value, frac
from .omega import QuadConfig, _cis_pi, omega
from .theta import SeriesParams, partial_sum

Exact = Union[Fraction, QuadSurd]

def _sig(v) -> int:
    return (v > 0) - (v < 0)


def _floor_abs_mul(n: int, xe: Exact) -> int:
    return math.floor(n * abs(xe))


# -- residual of the approximate functional equation ------------------------

@dataclass
class ResidualReport:
    n: int
    residual: complex
    bound: float
    shape: float
    parts: dict = field(default_factory=dict)


def envelope_shape(s: float, n: int, x: float, t: float = 0.0) -> float:
    """Un-normalised error envelope; the constant is fitted separately."""
    ax = abs(x)
    sg = 1 if x > 0 else -1
    m = math.floor(n * ax + sg * t)
    first = ax ** (s - 0.5) / (m + 1 - sg * t) ** s
    if s == 1:
        second = min(1.0 / ((n + 1) * math.sqrt(ax)), 1.0 + abs(math.log((n + 1) * math.sqrt(ax))))
    else:
        second = min(1.0 / ((n + 1) ** s * math.sqrt(ax)), ax ** (-(1 - s) / 2))
    return first + second


def dual_term(s: float, xe: Exact, te: Exact, n: int) -> complex:
    """r(x) e^{-i pi {sig t}^2/x} |x|^{s-1/2} F_{s,[n|x|]}(-1/x, {sig t}/x)."""
    sg = _sig(xe)
    st = frac(sg * te)
    m = _floor_abs_mul(n, xe)
    if m == 0:
        return 0j
    Y, T = kernels.fixed_phase(-1 / xe, st / xe)
    F, _ = kernels.phase_sum(Y, T, 1, m, s)
    return EIGHTH_ROOTS[sg % 8] * _cis_pi(-st * st / xe) * abs(float(xe)) ** (s - 0.5) * F


def funceq_residual(s: float, x, t=Fraction(0), n: int = 1000, cfg: QuadConfig = QuadConfig(),
                    C: Optional[float] = None) -> ResidualReport:
    xe = exact_value(as_real(x))
    te = exact_value(as_real(t))
    xf = float(xe)
    if xf == 0 or abs(xf) > 1:
        raise InputError("funceq_residual expects x in [-1, 1] without 0")
    if n < 0:
        raise InputError("n must be >= 0")
    F = partial_sum(SeriesParams(s, t), x, n).value if n else 0j
    D = dual_term(s, xe, te, n)
    om = omega(s, xe, te, cfg)
    res = F - D - om.value
    shape = envelope_shape(s, n, xf, float(frac(te)))
    bound = (C if C is not None else 1.0) * shape
    return ResidualReport(n, res, bound, shape, {"F": F, "dual": D, "omega": om.value,
                                                  "omega_err": om.est_error})


def calibrate_envelope(s: float, xs: Sequence, ns: Sequence[int], t=Fraction(0),
                       cfg: QuadConfig = QuadConfig()) -> float:
    """Smallest C with |residual| <= C * shape over the calibration grid."""
    C = 0.0
    for x in xs:
        for n in ns:
            r = funceq_residual(s, x, t, n, cfg)
            C = max(C, abs(r.residual) / r.shape)
    return C


# -- independent oracle --------------------------------------------------------

@dataclass
class OracleResult:
    value: complex
    spread: float
    values: list[complex]
    n_list: list[int]
    converged: bool


def _endpoint_integral(s: float, x: float, Np: float, f: float, tol: float) -> complex:
    """rho int (N' + rho v)^{-s} e^{2 i pi rho f v - pi x v^2} / (1 + e^{2 i pi rho v}) dv."""

    def g(v):
        z = Np + RHO * v
        w = 2j * math.pi * RHO * v
        E = 2j * math.pi * RHO * f * v - math.pi * x * v * v
        out = np.empty(v.shape, dtype=complex)
        pos = v >= 0
        out[pos] = np.exp(E[pos]) / (1.0 + np.exp(w[pos]))
        neg = ~pos
        out[neg] = np.exp(E[neg] - w[neg]) / (1.0 + np.exp(-w[neg]))
        return RHO * out * np.power(z, -s)

    L = math.log(8.0 / tol) + 2.0
    up = math.sqrt(L / (math.pi * x)) + 1.0
    c = math.sqrt(2.0) * math.pi * (1.0 - f)
    down = (-c + math.sqrt(c * c + 4.0 * math.pi * x * L)) / (2.0 * math.pi * x) + 1.0
    return quad.integrate(g, [-down, 0.0, up], tol, 400_000).value


def _oracle_pos(s: float, xe: Exact, tau: Exact, n: int, tol: float, v_terms: int) -> complex:
    """F_{s,n-1} minus the dual sum plus the endpoint integral at N' = n - 1/2.

    The exact finite identity carries the dual weights (k - tau)^{-s}; swapping
    them for k^{-s} on k <= lam moves the rest of the V-series, the directly
    summed tail over lam < k <= v_terms, onto the right-hand side.
    """
    Np = Fraction(2 * n - 1, 2)
    top = Np * xe + tau
    lam = math.floor(top)
    f = top - lam
    xi = tau - lam
    x = float(xe)
    Y, T = kernels.fixed_phase(xe, tau)
    F = kernels.phase_sum(Y, T, 1, n - 1, s)[0] if n > 1 else 0j
    Yd, Td = kernels.fixed_phase(-1 / xe, tau / xe)
    w = RHO * x ** (s - 0.5) * _cis_pi(-tau * tau / xe)
    D = kernels.phase_sum(Yd, Td, 1, lam, s)[0] if lam >= 1 else 0j
    if tau != 0 and v_terms > lam:
        a = max(lam, 0) + 1
        D -= (kernels.phase_sum(Yd, Td, a, v_terms, s, -float(tau))[0]
              - kernels.phase_sum(Yd, Td, a, v_terms, s)[0])
    C = _cis_pi(xe * Np * Np + 2 * Np * xi)
    E = C * _endpoint_integral(s, x, float(Np), float(f), tol)
    return F - w * D + E


def omega_oracle(s: float, x, t=Fraction(0), n_list: Sequence[int] = (1000, 2000, 4000),
                 tol: float = 1e-5, v_terms: int = 1 << 20) -> OracleResult:
    """Independent estimate of Omega_s(x,t) from truncated sums.

    Uses the exact finite-n identity behind the functional equation: the
    partial sum cut at the half-integer N' = n - 1/2 plus a smooth endpoint
    integral; the leftover decays like n^{-s-1}.  For non-integer t the
    V-series tail is summed directly up to ``v_terms``.  ``spread`` is the
    range over ``n_list``.
    """
    if s <= 0.5:
        raise InputError("omega_oracle expects s > 1/2")
    xe = exact_value(as_real(x))
    te = exact_value(as_real(t))
    if xe == 0:
        raise InputError("x must be nonzero")
    ns = sorted(int(n) for n in n_list)
    if not ns or ns[0] < 1:
        raise InputError("n_list must contain integers >= 1")
    vals = []
    for n in ns:
        if xe > 0:
            vals.append(_oracle_pos(s, xe, frac(te), n, 1e-12, v_terms))
        else:
            vals.append(_oracle_pos(s, -xe, frac(-te), n, 1e-12, v_terms).conjugate())
    spread = max(abs(a - b) for a in vals for b in vals)
    return OracleResult(vals[-1], spread, vals, ns, spread < tol)


# -- iterated expansions -------------------------------------------------------

@dataclass
class ExpansionTerm:
    j: int
    phase: complex
    phase_index: int  # sum of signs mod 8 (phase = rho^index times the t-phase)
    product: float
    omega: complex
    term: complex


@dataclass
class ExpansionReport:
    terms: list[ExpansionTerm]
    partials: list[complex]
    reference: complex
    reference_error: float
    residuals: list[float]
    status: str = "ok"
    depth: int = 0
    hypothesis: list[float] = field(default_factory=list)  # absolute orbit-sum partials, 1/2 < s <= 1


def _reference(s: float, x: RealInput, t: RealInput, n_ref: Optional[int]) -> tuple[complex, float]:
    """Direct-summation estimate of F_s(x,t).

    s > 1: plain partial sum at n_ref (tail <= n^{1-s}/(s-1)).
    1/2 < s <= 1: F_{s,n} - F_s decays only like n^{1/2-s} with a
    log-periodic factor.  Means of F_{s,n} over dyadic windows [M/2, M] are
    Richardson-combined in pairs (M, M/4) with that exponent, and the
    estimates from the top scales are averaged.  The reported error is
    their standard deviation.
    """
    params = SeriesParams(s, t)
    if s > 1:
        n = n_ref or 100_000
        v = partial_sum(params, x, n).value
        return v, n ** (1.0 - s) / (s - 1.0)
    if s <= 0.5:
        return complex(math.nan, math.nan), math.inf
    K = max(6, int(math.log2(n_ref or 1 << 22)))
    N = 1 << K
    Y, T = kernels.fixed_phase(exact_value(as_real(x)), exact_value(as_real(t)))
    u = kernels.phase_units(Y, T, 1, N) * np.power(np.arange(1, N + 1, dtype=float), -s)
    c = np.cumsum(u)
    scales = range(max(2, K - 10), K + 1)
    means = {k: complex(np.mean(c[(1 << k) // 2 - 1:1 << k])) for k in scales}
    a = 4.0 ** (0.5 - s)
    est = np.array([(means[k] - a * means[k - 2]) / (1.0 - a) for k in scales if k - 2 in means])
    return complex(np.mean(est)), float(np.sqrt(np.mean(np.abs(est - np.mean(est)) ** 2)))


def _expand(s: float, x: RealInput, t: RealInput, J: int, cfg: QuadConfig,
            n_ref: Optional[int], with_t: bool) -> ExpansionReport:
    x = as_real(x)
    t = as_real(t)
    if J < 0:
        raise InputError("J must be >= 0")
    orb = t_orbit(x, J)
    depth = orb.depth
    status = orb.status
    prods = orbit_products(x, depth).exact if depth > 0 else []
    ops = t_ops(x, t, depth) if with_t else None
    terms: list[ExpansionTerm] = []
    m = 0
    hat_sum: Exact = Fraction(0)
    for j in range(depth + 1):
        if j > 0:
            m = (m + orb.signs[j - 1]) % 8
        pj = float(prods[j - 1]) if j > 0 else 1.0
        pt = orb.exact[j]
        if pt == 0:
            status = "terminated-zero"
            break
        tj = exact_value(ops[j].ttilde) if (with_t and j > 0) else (exact_value(t) if with_t else Fraction(0))
        if with_t and j > 0:
            hat_sum = hat_sum + exact_value(ops[j].that)
        phase = EIGHTH_ROOTS[m] * (_cis_pi(-hat_sum) if with_t else 1.0)
        om = omega(s, pt, tj, cfg).value
        weight = pj ** (s - 0.5)
        terms.append(ExpansionTerm(j, phase, m, pj, om, phase * weight * om))
    partials = list(np.cumsum([tr.term for tr in terms])) if terms else []
    partials = [complex(p) for p in partials]
    ref, ref_err = _reference(s, x, t if with_t else Fraction(0), n_ref)
    residuals = [abs(p - ref) for p in partials]
    hyp = []
    if 0.5 < s <= 1 and terms:
        hyp = orbit_sums(x, s - 0.5, (1 - s) / 2, len(terms) - 1, "absolute").partials
    return ExpansionReport(terms, partials, ref, ref_err, residuals, status, len(terms) - 1, hyp)


def expand_series(s: float, x, J: int, cfg: QuadConfig = QuadConfig(),
                  n_ref: Optional[int] = None) -> ExpansionReport:
    """Partial sums of sum_j rho^{sum sig(T^l x)} Pi_j^{s-1/2} Omega_s(T^j x) (t = 0)."""
    return _expand(s, x, Fraction(0), J, cfg, n_ref, with_t=False)


def expand_series_t(s: float, x, t, J: int, cfg: QuadConfig = QuadConfig(),
                    n_ref: Optional[int] = None) -> ExpansionReport:
    """t-carrying expansion with phases e^{i pi sum (sig/4 - T^_{l+1})} and Omega_s(T^j x, T~_j)."""
    return _expand(s, x, t, J, cfg, n_ref, with_t=True)
