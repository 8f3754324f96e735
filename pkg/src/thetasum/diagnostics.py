"""Convergence diagnostics driven by continued-fraction data.

Everything here is a finite-N witness: partial sums, a trend label fitted on
the last quartile of terms, and per-x certificates.  Nothing claims to decide
convergence of an infinite series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cf import RcfExpansion, from_digits, orbit_products, rcf_expand, t_orbit
from .errors import InputError, PrecisionExhausted
from .numbers import EIGHTH_ROOTS, RealInput, as_real, exact_value, to_float

CONVERGING = "converging-trend"
DIVERGING = "diverging-trend"
INCONCLUSIVE = "inconclusive"

RATIO_CONVERGING = 0.95
RATIO_DIVERGING = 1.02

ORBIT_MODES = ("absolute", "phase_weighted", "log_absolute", "log_phase")


@dataclass
class CriteriaReport:
    name: str
    partials: list[float]
    last_term: float
    ratio_estimate: float
    verdict: str
    terms: list[float] = field(default_factory=list)
    values: list[complex] = field(default_factory=list)  # complex partials in phase modes
    status: str = "ok"


@dataclass(frozen=True)
class BetaAlpha:
    alpha: float
    beta: float
    beta_critical: float
    regime: str  # below | above | critical


def beta_critical(alpha: float) -> float:
    return (math.sqrt(alpha * alpha + 4.0) - 1.0) / 2.0


def classify(alpha: float, beta: float, rtol: float = 1e-12) -> BetaAlpha:
    if not alpha > 0:
        raise InputError("alpha must be > 0")
    if beta < 0:
        raise InputError("beta must be >= 0")
    bc = beta_critical(alpha)
    if abs(beta - bc) <= rtol * max(1.0, bc):
        regime = "critical"
    else:
        regime = "below" if beta < bc else "above"
    return BetaAlpha(alpha, beta, bc, regime)


def trend(terms: Sequence[float]) -> tuple[float, str]:
    """Geometric ratio fitted on the last quartile of nonzero terms and its label."""
    mags = [abs(t) for t in terms]
    m = len(mags)
    if m < 4:
        return math.nan, INCONCLUSIVE
    tail = mags[m - max(2, m // 4) - 1:]
    if tail[0] == 0 or tail[-1] == 0:
        return math.nan, INCONCLUSIVE
    ratio = (tail[-1] / tail[0]) ** (1.0 / (len(tail) - 1))
    if ratio < RATIO_CONVERGING:
        return ratio, CONVERGING
    if ratio > RATIO_DIVERGING:
        return ratio, DIVERGING
    return ratio, INCONCLUSIVE


def _report(name: str, terms: Sequence[float], status: str = "ok") -> CriteriaReport:
    partials = np.cumsum(np.asarray(terms, dtype=float)).tolist() if len(terms) else []
    ratio, verdict = trend(terms)
    last = float(terms[-1]) if len(terms) else 0.0
    return CriteriaReport(name, partials, last, ratio, verdict, list(map(float, terms)), status=status)


def _rcf(x: RealInput, need: int) -> RcfExpansion:
    """RCF with at least ``need`` digits, else the appropriate error."""
    rcf = rcf_expand(x, need)
    if rcf.depth < need:
        if rcf.terminated:
            raise InputError(f"x is rational with only {rcf.depth} partial quotients; {need} needed")
        raise PrecisionExhausted(f"only {rcf.depth} certified partial quotients; {need} needed")
    return rcf


def _pos_unit(x: RealInput) -> RealInput:
    x = as_real(x)
    v = exact_value(x)
    if not 0 < v < 1:
        raise InputError("x must lie in (0, 1)")
    return x


# -- criteria on the regular convergents ------------------------------------

def criteria_thm4(s: float, x: RealInput, N: int) -> CriteriaReport:
    """Absolute-convergence series on the denominators Q_k, summed over k = 0..N-1."""
    if not 0.5 < s <= 1:
        raise InputError("s must lie in (1/2, 1]")
    if N < 1:
        raise InputError("N must be >= 1")
    rcf = _rcf(_pos_unit(x), N + 1)
    Q = rcf.Q
    if s < 1:
        terms = [Q[k + 1] ** ((1 - s) / 2) / Q[k] ** (s / 2) for k in range(N)]
        name = "qsum-s"
    else:
        terms = [math.log(Q[k + 1]) / math.sqrt(Q[k]) for k in range(N)]
        name = "qsum-log"
    return _report(name, terms)


def _cond_bis(Q, alpha, beta, N):
    return [Q[n + 1] ** (beta + 1) / Q[n] ** (alpha + beta + 1) for n in range(1, N + 1)]


def _cond_bisbis(Q, alpha, beta, N):
    return [Q[n + 2] ** beta / Q[n] ** (alpha + beta) for n in range(1, N + 1)]


def _cond_log(Q, alpha, N):
    out = []
    for n in range(1, N + 1):
        lq = math.log(Q[n + 1])
        out.append(lq / Q[n - 1] ** alpha + Q[n + 1] * lq * lq / Q[n] ** (1 + alpha))
    return out


def criteria_thm3(x: RealInput, alpha: float, beta: float, N: int,
                  with_log: bool = False) -> tuple[BetaAlpha, list[CriteriaReport]]:
    """Regime against beta_alpha plus the matching denominator series over n = 1..N."""
    ba = classify(alpha, beta)
    if N < 1:
        raise InputError("N must be >= 1")
    rcf = _rcf(_pos_unit(x), N + 2)
    Q = rcf.Q
    reports = []
    if ba.regime in ("below", "critical"):
        reports.append(_report("bis", _cond_bis(Q, alpha, beta, N)))
    if ba.regime in ("above", "critical"):
        reports.append(_report("bisbis", _cond_bisbis(Q, alpha, beta, N)))
    if with_log:
        reports.append(_report("log", _cond_log(Q, alpha, N)))
    return ba, reports


def criteria_thm5(x: RealInput, alpha: float, beta: float, N: int,
                  condition: str = "power") -> CriteriaReport:
    """Series Q_{n+1}^beta / Q_n^{alpha+beta} ("power") or log Q_{n+1} / Q_n^alpha ("log")."""
    if not alpha > 0:
        raise InputError("alpha must be > 0")
    if N < 1:
        raise InputError("N must be >= 1")
    rcf = _rcf(_pos_unit(x), N + 1)
    Q = rcf.Q
    if condition == "power":
        terms = [Q[n + 1] ** beta / Q[n] ** (alpha + beta) for n in range(1, N + 1)]
    elif condition == "log":
        terms = [math.log(Q[n + 1]) / Q[n] ** alpha for n in range(1, N + 1)]
    else:
        raise InputError("condition must be 'power' or 'log'")
    return _report(condition, terms)


def criteria_cor4(s: float, x: RealInput, N: int) -> CriteriaReport:
    """Sufficient conditions for the iterated expansion at s in (1/2, 1] over n = 1..N."""
    if not 0.5 < s <= 1:
        raise InputError("s must lie in (1/2, 1]")
    if N < 1:
        raise InputError("N must be >= 1")
    rcf = _rcf(_pos_unit(x), N + 1)
    Q = rcf.Q
    if s < 1:
        terms = [Q[n + 1] ** ((3 - s) / 2) / Q[n] ** (1 + s / 2) for n in range(1, N + 1)]
        return _report("expansion-s", terms)
    return _report("expansion-log", _cond_log(Q, 0.5, N))


# -- orbit sums --------------------------------------------------------------

def orbit_sums(x: RealInput, alpha: float, beta: float, J: int, mode: str = "absolute") -> CriteriaReport:
    """Partial sums over j = 0..J of Pi_j^alpha |T^j x|^{-beta} (or times log(1/|T^j x|)).

    Phase modes multiply term j by e^{i pi/4 sum_{l<j} sig(T^l x)} (the Omega = 1
    case of the expansion); ``partials`` then holds moduli and ``values`` the
    complex partial sums.  ``beta`` is ignored in the log modes.
    """
    if mode not in ORBIT_MODES:
        raise InputError(f"mode must be one of {', '.join(ORBIT_MODES)}")
    if J < 0:
        raise InputError("J must be >= 0")
    x = as_real(x)
    orb = t_orbit(x, J)
    status = orb.status
    prods = orbit_products(x, orb.depth).exact if orb.depth > 0 else []
    use_log = mode.startswith("log")
    phased = mode in ("phase_weighted", "log_phase")
    terms, vals = [], []
    m = 0
    acc = 0j
    for j in range(orb.depth + 1):
        if j > 0:
            m = (m + orb.signs[j - 1]) % 8
        pt = orb.exact[j]
        if pt == 0:
            status = "terminated-zero"
            break
        pj = float(prods[j - 1]) if j > 0 else 1.0
        a = abs(float(pt))
        w = pj ** alpha * (math.log(1.0 / a) if use_log else a ** (-beta))
        terms.append(w)
        if phased:
            acc += EIGHTH_ROOTS[m] * w
            vals.append(acc)
    if not phased:
        return _report(mode, terms, status)
    rep = _report(mode, terms, status)
    rep.partials = [abs(v) for v in vals]
    rep.values = vals
    rep.last_term = float(abs(vals[-1] - vals[-2])) if len(vals) > 1 else abs(vals[0]) if vals else 0.0
    return rep


def oscillation_range(values: Sequence[complex], lo: int, hi: int) -> float:
    """Diameter of the partial sums with index in [lo, hi]."""
    pts = np.asarray(values[lo:hi + 1], dtype=complex)
    if len(pts) == 0:
        return 0.0
    return float(np.max(np.abs(pts[:, None] - pts[None, :])))


# -- irrationality exponent, density, lemma witness --------------------------

def irrationality_profile(x: RealInput, N: int) -> list[tuple[int, float]]:
    """(n, 1 + log Q_{n+1} / log Q_n) for n <= N with Q_n > 1."""
    if N < 1:
        raise InputError("N must be >= 1")
    rcf = _rcf(x, N + 1)
    Q = rcf.Q
    return [(n, 1.0 + math.log(Q[n + 1]) / math.log(Q[n])) for n in range(1, N + 1) if Q[n] > 1]


def irrationality_lb(x: RealInput, N: int) -> float:
    """Witness for mu(x): largest 1 + log Q_{n+1}/log Q_n over the tail window N//2 <= n <= N."""
    prof = [v for n, v in irrationality_profile(x, N) if n >= N // 2]
    if not prof:
        raise InputError("no admissible n in the window; increase N")
    return max(prof)


def u_density(x: RealInput) -> float:
    """Density 1/(1+x) + 1/(1-x) of the invariant measure of U."""
    v = to_float(as_real(x)) if not isinstance(x, float) else x
    if not -1 < v < 1:
        raise InputError("u_density needs |x| < 1")
    return 1.0 / (1.0 + v) + 1.0 / (1.0 - v)


def u_mass(eps: float) -> float:
    """Integral of the density over [-1+eps, 1-eps] (closed form 2 log((2-eps)/eps))."""
    if not 0 < eps < 1:
        raise InputError("eps must lie in (0, 1)")
    return 2.0 * math.log((2.0 - eps) / eps)


@dataclass
class LemmaReport:
    small: list[int]  # j with |T^j x| <= 1/2
    witness: dict[int, int]  # j -> n
    literal: dict[int, bool]  # whether |T^j x| >= 1/A_n holds without slack
    missing: list[int]
    injective: bool
    slack: int

    @property
    def ok(self) -> bool:
        return not self.missing and self.injective


def lemmafinal_check(x: RealInput, J: int, slack: int = 2) -> LemmaReport:
    """Match each small iterate T^j x to an RCF index n.

    Requires Pi_j <= 1/Q_{n-1} and |T^j x| >= 1/(A_n + slack); slack = 0 is the
    literal inequality.  Indices are assigned greedily (smallest unused n).
    """
    if J < 0:
        raise InputError("J must be >= 0")
    if slack < 0:
        raise InputError("slack must be >= 0")
    x = _pos_unit(x)
    orb = t_orbit(x, J)
    prods = orbit_products(x, orb.depth).exact if orb.depth > 0 else []
    # Pi_j >= 1/(2 q_j) and q_j grows at least like Q, so 2J + 4 digits suffice
    rcf = rcf_expand(x, 2 * J + 4)
    A, Q = rcf.digits, rcf.Q
    half = (1, 2)
    small, witness, literal, missing = [], {}, {}, []
    used: set[int] = set()
    for j in range(orb.depth + 1):
        pt = abs(orb.exact[j])
        if pt == 0 or pt * half[1] > half[0]:
            continue
        small.append(j)
        pj = prods[j - 1] if j > 0 else 1
        found = None
        for n in range(1, len(A) + 1):
            if n in used:
                continue
            if pj * Q[n - 1] <= 1 and pt * (A[n - 1] + slack) >= 1:
                found = n
                break
        if found is None:
            missing.append(j)
            continue
        used.add(found)
        witness[j] = found
        literal[j] = bool(pt * A[found - 1] >= 1)
    injective = len(set(witness.values())) == len(witness)
    return LemmaReport(small, witness, literal, missing, injective, slack)


def planted(digits: Sequence[int], prec: Optional[int] = 192) -> RealInput:
    """x with prescribed leading partial quotients (golden tail), for adversarial fixtures."""
    return from_digits(digits, "golden", prec)
