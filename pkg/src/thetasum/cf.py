"""Regular and even continued fractions and the maps G, T, U.

Exact inputs (Fraction, QuadSurd) are handled in exact arithmetic
throughout.  A BigFloat stands for every real in its half-ulp interval; its
stored dyadic value is a rational, so digits and orbits of that value are
computed exactly and the interval endpoints decide how far the result is
certified.

ECF convention: x = e1/(a1 + e2/(a2 + ...)) with a_j even, and convergents
p_n = a_n p_{n-1} + e_n p_{n-2}, q_n = a_n q_{n-1} + e_n q_{n-2} starting
from p_{-1} = 1, q_{-1} = 0, p_0 = 0, q_0 = 1.  With r_j the signed tail
(r_0 = x, r_{j-1} = e_j/(a_j + r_j)) one has
T^j(x) = (-1)^j e_1...e_j r_j and |x T(x)...T^{j-1}(x)| = 1/|q_j + r_j q_{j-1}|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import InputError, PrecisionExhausted
from .numbers import (BigFloat, QuadSurd, RealInput, as_real, exact_value, is_exact, rewrap,
                      sign)

Exact = Union[Fraction, QuadSurd]

FLOOR_GUARD = Fraction(1, 1 << 30)


# -- small exact helpers ---------------------------------------------------

def _recip(v: Exact) -> Exact:
    if v == 0:
        raise InputError("division by zero")
    return 1 / v


def _abs(v: Exact) -> Exact:
    return abs(v)


def _sgn(v: Exact) -> int:
    if isinstance(v, QuadSurd):
        return v.sign()
    return (v > 0) - (v < 0)


def _mod2_centered(v: Exact) -> Exact:
    """Reduce into (-1, 1]."""
    return v - 2 * (-math.floor((1 - v) / 2))


# -- maps ------------------------------------------------------------------

def t_map(x: RealInput) -> RealInput:
    """T(x) = -1/x mod 2, valued in (-1, 1]."""
    v = _mod2_centered(exact_value(as_real(x)))
    if v == 0:
        raise InputError("T is undefined at 0")
    return rewrap(_mod2_centered(-_recip(v)), x)


def g_map(x: RealInput) -> RealInput:
    """Gauss map {1/x} on (0, 1]."""
    v = exact_value(as_real(x))
    if v == 0:
        raise InputError("G is undefined at 0")
    if v < 0 or v > 1:
        raise InputError("G expects x in (0, 1]")
    y = _recip(v)
    return rewrap(y - math.floor(y), x)


@dataclass(frozen=True)
class UStep:
    value: RealInput
    sign_tag: int
    k: int


def u_map(x: RealInput) -> UStep:
    """Folded map on (0, 1]; stores |1/x - 2k| and the branch sign e."""
    v = exact_value(as_real(x))
    if v == 0:
        raise InputError("U is undefined at 0 (U(0) = 0 by convention)")
    if v < 0 or v > 1:
        raise InputError("U expects x in (0, 1]")
    y = _recip(v)
    k = math.floor((y + 1) / 2)
    d = y - 2 * k
    e = 1 if d < 0 else -1
    return UStep(rewrap(_abs(d), x), e, k)


def sigma(x) -> int:
    return sign(as_real(x))


# -- regular continued fractions -------------------------------------------

def _rcf_digits(v: Exact, depth: int) -> tuple[int, list[int], bool]:
    ip = math.floor(v)
    y = v - ip
    digits: list[int] = []
    while len(digits) < depth:
        if y == 0:
            return ip, digits, True
        z = _recip(y)
        a = math.floor(z)
        digits.append(a)
        y = z - a
    return ip, digits, y == 0


def _convergents(digits: Sequence[int]) -> tuple[list[int], list[int]]:
    P, Q = [0], [1]
    pm, qm = 1, 0
    for a in digits:
        pn, qn = a * P[-1] + pm, a * Q[-1] + qm
        pm, qm = P[-1], Q[-1]
        P.append(pn)
        Q.append(qn)
    return P, Q


@dataclass
class RcfExpansion:
    integer_part: int
    digits: list[int]
    P: list[int]  # P_0 .. P_depth
    Q: list[int]
    terminated: bool = False  # rational expansion ended
    certified_depth: int = 0
    precision_exhausted: bool = False

    @property
    def convergents(self) -> list[tuple[int, int]]:
        return list(zip(self.P[1:], self.Q[1:]))

    @property
    def depth(self) -> int:
        return len(self.digits)


def _common_prefix(a: Sequence, b: Sequence) -> int:
    n = 0
    for u, v in zip(a, b):
        if u != v:
            break
        n += 1
    return n


def rcf_expand(x: RealInput, depth: int) -> RcfExpansion:
    """Regular continued fraction of x to ``depth`` digits."""
    x = as_real(x)
    if depth < 0:
        raise InputError("depth must be >= 0")
    if is_exact(x):
        ip, digits, term = _rcf_digits(exact_value(x), depth)
        P, Q = _convergents(digits)
        return RcfExpansion(ip, digits, P, Q, term, len(digits), False)
    lo, hi = x.interval()
    ip, digits, term = _rcf_digits(x.to_fraction(), depth)
    ilo, dlo, _ = _rcf_digits(lo, depth + 1)
    ihi, dhi, _ = _rcf_digits(hi, depth + 1)
    cert = _common_prefix(dlo, dhi) if ilo == ihi == ip else 0
    cert = min(cert, len(digits))
    exhausted = cert < depth
    digits = digits[:cert]
    P, Q = _convergents(digits)
    return RcfExpansion(ip, digits, P, Q, False, cert, exhausted)


def from_digits(digits: Sequence[int], tail: str = "golden", prec: Optional[int] = None,
                integer_part: int = 0) -> RealInput:
    """Number with RCF ``[integer_part; digits..., tail]``.

    ``tail='golden'`` appends the expansion [1, 1, 1, ...] (an exact surd),
    ``tail='none'`` ends the expansion.  With ``prec`` the result is rounded
    to a BigFloat.
    """
    if any(a < 1 for a in digits):
        raise InputError("partial quotients must be >= 1")
    if tail == "golden":
        y: Exact = QuadSurd(Fraction(-1, 2), Fraction(1, 2), 5)
    elif tail == "none":
        y = Fraction(0)
    else:
        raise InputError(f"unknown tail {tail!r}")
    for a in reversed(digits):
        y = _recip(a + y)
    v = integer_part + y
    if prec is not None:
        if isinstance(v, QuadSurd):
            return BigFloat.from_mpf(v.to_mpf(prec + 32), prec)
        return BigFloat.from_fraction(v, prec)
    if isinstance(v, QuadSurd) and v.is_rational:
        return v.a
    return v


# -- even continued fractions ----------------------------------------------

def singularize(digits: Sequence[int], terminated: bool,
                limit: Optional[int] = None) -> tuple[list[tuple[int, int]], int, bool]:
    """Apply the singularization rewrite to RCF digits of a number in (0, 1).

    Returns (pairs, stable, cusp) where ``pairs[:stable]`` are final ECF
    pairs.  ``cusp`` is set when a terminating expansion ends on an odd digit
    a: that pair becomes (e, a + 1) followed by the tail -1, i.e. the orbit
    lands on the parabolic point 1.  With ``limit`` the work stops once
    ``limit`` pairs are final; a long (-1, 2) run is then cut at ``limit + 1``
    pairs so huge partial quotients cost nothing.
    """
    cap = math.inf if limit is None else limit
    pairs = [(1, a) for a in digits]
    i = 0
    while i < len(pairs) and i < cap:
        e, a = pairs[i]
        if a % 2 == 0:
            i += 1
            continue
        last = len(pairs) - 1
        if i == last:
            if terminated:
                pairs[i] = (e, a + 1)
                return pairs, len(pairs), True
            break
        if i + 1 == last and not terminated:
            break
        a1 = pairs[i + 1][1]
        if i + a1 > cap:
            pairs[i:] = [(e, a + 1)] + [(-1, 2)] * int(cap - i)
            return pairs, int(cap), False
        if i + 1 == last:
            pairs[i:] = [(e, a + 1)] + [(-1, 2)] * (a1 - 1)
        else:
            pairs[i:i + 3] = [(e, a + 1)] + [(-1, 2)] * (a1 - 1) + [(-1, pairs[i + 2][1] + 1)]
        i += 1
    return pairs, min(i, len(pairs)), False


def _ecf_convergents(pairs: Sequence[tuple[int, int]]) -> tuple[list[int], list[int]]:
    p, q = [0], [1]
    pm, qm = 1, 0
    for e, a in pairs:
        pn, qn = a * p[-1] + e * pm, a * q[-1] + e * qm
        pm, qm = p[-1], q[-1]
        p.append(pn)
        q.append(qn)
    return p, q


@dataclass
class EcfExpansion:
    digits: list[tuple[int, int]]
    p: list[int]  # p_0 .. p_depth
    q: list[int]
    tails: list[Exact]  # signed tails r_0 .. r_depth (exact values)
    terminated: bool = False
    cusp: bool = False
    precision_exhausted: bool = False

    @property
    def depth(self) -> int:
        return len(self.digits)

    @property
    def convergents(self) -> list[tuple[int, int]]:
        return list(zip(self.p[1:], self.q[1:]))


def _ecf_pairs_exact(v: Exact, depth: int) -> tuple[list[tuple[int, int]], bool, bool]:
    """First ``depth`` ECF pairs of v in (0, 1) by singularizing an RCF prefix.

    Returns (pairs, terminated, cusp); the flags describe the end of the
    expansion and are only set when it ends within ``depth`` pairs.
    """
    want = 2 * depth + 4
    while True:
        _, digits, term = _rcf_digits(v, want)
        pairs, stable, cusp = singularize(digits, term, depth)
        if term:
            n = min(depth, len(pairs))
            done = n == len(pairs)
            return pairs[:n], done, cusp and done
        if stable >= depth:
            return pairs[:depth], False, False
        want *= 2


def _fold(v: Exact) -> Exact:
    v = _mod2_centered(v)
    if v == 0:
        raise InputError("expansion of 0 is empty")
    return v


def ecf_expand(x: RealInput, depth: int) -> EcfExpansion:
    """Even continued fraction of x (reduced mod 2 into (-1, 1])."""
    x = as_real(x)
    if depth < 0:
        raise InputError("depth must be >= 0")
    v = _fold(exact_value(x))
    s0 = _sgn(v)
    av = _abs(v)
    if av == 1:
        return EcfExpansion([], [0], [1], [v], True, True, False)
    exhausted = False
    if is_exact(x):
        pairs, term, cusp = _ecf_pairs_exact(av, depth)
    else:
        # digits certified by the whole half-ulp interval
        lo, hi = x.interval()
        full, fterm, fcusp = _ecf_pairs_exact(av, depth + 1)
        plo = _ecf_pairs_exact(_abs(_fold(lo)), depth + 1)[0]
        phi = _ecf_pairs_exact(_abs(_fold(hi)), depth + 1)[0]
        cert = min(_common_prefix(plo, phi), _common_prefix(plo, full))
        n = min(depth, cert)
        exhausted = n < depth
        pairs = full[:n]
        term = fterm and n == len(full)
        cusp = fcusp and term
    if s0 < 0 and pairs:
        pairs = [(-pairs[0][0], pairs[0][1])] + list(pairs[1:])
    tails = _tails(v, pairs)
    p, q = _ecf_convergents(pairs)
    return EcfExpansion(list(pairs), p, q, tails, term, cusp, exhausted)


def _tails(v: Exact, pairs: Sequence[tuple[int, int]]) -> list[Exact]:
    """Signed tails r_0 = v, r_j = 1/|r_{j-1}| - a_j in exact arithmetic.

    For a BigFloat this runs on the stored dyadic, so the values coincide with
    backward evaluation over its full (finite) expansion.
    """
    tails = [v]
    for e, a in pairs:
        tails.append(_recip(_abs(tails[-1])) - a)
    return tails


# -- orbits ----------------------------------------------------------------

@dataclass
class Orbit:
    points: list[RealInput]
    exact: list[Exact]
    errors: list[float]
    signs: list[int]
    requested: int
    status: str = "ok"  # ok | terminated-zero | cusp | precision-exhausted

    @property
    def depth(self) -> int:
        return len(self.points) - 1


def _exact_orbit(v: Exact, J: int) -> tuple[list[Exact], str]:
    pts = [v]
    for _ in range(J):
        cur = pts[-1]
        if cur == 0:
            return pts, "terminated-zero"
        if _abs(cur) == 1:
            return pts, "cusp"
        pts.append(_mod2_centered(-_recip(cur)))
    return pts, "ok"


def t_orbit(x: RealInput, J: int) -> Orbit:
    """[x, T x, ..., T^J x] with per-iterate error estimates."""
    x = as_real(x)
    if J < 0:
        raise InputError("J must be >= 0")
    v = _mod2_centered(exact_value(x))
    if is_exact(x):
        pts, status = _exact_orbit(v, J)
        return Orbit(list(pts), list(pts), [0.0] * len(pts), [_sgn(p) for p in pts], J, status)
    lo, hi = x.interval()
    # exact orbit of the stored dyadic; certified while both interval ends agree in sign
    pts, vstatus = _exact_orbit(v, J)
    olo, _ = _exact_orbit(_mod2_centered(lo), J)
    ohi, _ = _exact_orbit(_mod2_centered(hi), J)
    errors, keep = [], []
    status = "ok"
    for j, pt in enumerate(pts):
        if j >= len(olo) or j >= len(ohi) or _sgn(olo[j]) != _sgn(ohi[j]) or _sgn(olo[j]) != _sgn(pt):
            status = "precision-exhausted"
            break
        err = max(abs(olo[j] - pt), abs(ohi[j] - pt)) + abs(pt) * Fraction(1, 1 << x.prec)
        errors.append(float(err))
        keep.append(pt)
    if status == "ok" and len(keep) < J + 1:
        status = vstatus
    return Orbit([BigFloat.from_fraction(p, x.prec) for p in keep], keep, errors,
                 [_sgn(p) for p in keep], J, status)


def u_orbit(x: RealInput, J: int) -> list[UStep]:
    """Iterates of U starting from |x| (values nonnegative)."""
    x = as_real(x)
    cur: RealInput = rewrap(_abs(exact_value(x)), x)
    out = []
    for _ in range(J):
        if exact_value(cur) == 0:
            break
        st = u_map(cur)
        out.append(st)
        cur = st.value
    return out


@dataclass
class ProductsReport:
    products: list[float]  # Pi_j, j = 1..J
    exact: list[Exact]
    lower: list[float]  # 1/(2 q_j)
    upper: list[float]  # 1/(q_j - q_{j-1})
    identity: list[float]  # 1/|q_j + r_j q_{j-1}|
    sandwich_ok: list[bool]
    identity_ok: list[bool]
    errors: list[float]
    status: str


def orbit_products(x: RealInput, J: int) -> ProductsReport:
    """Pi_j = |x T(x) ... T^{j-1}(x)| for j = 1..J with the ECF checks."""
    x = as_real(x)
    orb = t_orbit(x, J)
    ecf = ecf_expand(x, J)
    n = min(J, orb.depth + 1, ecf.depth)
    prods, exact, lo, up, ident, sok, iok, errs = [], [], [], [], [], [], [], []
    run: Exact = Fraction(1)
    rel = 0.0
    for j in range(1, n + 1):
        pt = orb.exact[j - 1]
        run = run * _abs(pt)
        if orb.errors[j - 1] and float(abs(pt)):
            rel += orb.errors[j - 1] / float(abs(pt))
        q1, q0 = ecf.q[j], ecf.q[j - 1]
        idv = _recip(_abs(q1 + ecf.tails[j] * q0))
        pv = float(run)
        lower = Fraction(1, 2 * q1)
        upper = Fraction(1, q1 - q0) if q1 > q0 else Fraction(10 ** 30)
        prods.append(pv)
        exact.append(run)
        lo.append(float(lower))
        up.append(float(upper))
        ident.append(float(idv))
        sok.append(bool(lower <= run <= upper))
        iok.append(bool(run == idv))
        errs.append(pv * rel)
    status = orb.status if n == J else (orb.status if orb.status != "ok" else "precision-exhausted")
    return ProductsReport(prods, exact, lo, up, ident, sok, iok, errs, status)


# -- floor chains ----------------------------------------------------------

@dataclass
class FloorChain:
    x: RealInput
    n: int
    values: list[int]  # K(-1,n), K(0,n), ..., K(L,n)
    stop: int  # L(n)


def floor_chain(x: RealInput, n: int) -> FloorChain:
    """K(-1,n) = n, K(l,n) = floor(K(l-1,n) |T^l x|) down to the first zero."""
    x = as_real(x)
    if n < 0:
        raise InputError("n must be >= 0")
    values = [n]
    J = 8
    while True:
        orb = t_orbit(x, J)
        values = [n]
        for l, pt in enumerate(orb.exact):
            if values[-1] == 0:
                break
            prod = values[-1] * _abs(pt)
            k = math.floor(prod)
            if not is_exact(x):
                err = Fraction(orb.errors[l]) * values[-1]
                frac_part = prod - k
                if min(frac_part, 1 - frac_part) <= max(FLOOR_GUARD, err):
                    raise PrecisionExhausted(f"floor at level {l} is not certified")
            values.append(k)
        if values[-1] == 0:
            return FloorChain(x, n, values, len(values) - 2)
        if orb.status in ("cusp",):
            raise InputError("floor chain does not terminate: the orbit reaches the cusp 1")
        if orb.status == "precision-exhausted":
            raise PrecisionExhausted(f"orbit exhausted at depth {orb.depth} before K reached 0")
        if orb.status == "terminated-zero":
            raise AssertionError("unreachable: zero iterate gives K = 0")
        J *= 2


# -- t-carrying operators ----------------------------------------------------

@dataclass(frozen=True)
class TOpPair:
    j: int
    ttilde: RealInput
    that: RealInput


def _frac(v: Exact) -> Exact:
    return v - math.floor(v)


def t_ops(x: RealInput, t: RealInput, J: int) -> list[TOpPair]:
    """T~_j(x,t) and T^_j(x,t) for j = 0..J.

    T~_0 = t (the recursion T~_{j+1} = T~_1(T^j x, T~_j) needs t there) and
    T^_0 = t.  T^_j keeps its sign: T^_1 = {sigma(x) t}^2 / x is negative
    for x < 0.
    """
    x = as_real(x)
    t = as_real(t)
    orb = t_orbit(x, J)
    tv = exact_value(t)
    out = [TOpPair(0, t, t)]
    cur = tv
    for j in range(J):
        if j >= len(orb.exact):
            break
        y = orb.exact[j]
        if y == 0:
            break
        st = _frac(_sgn(y) * cur)
        nxt = _frac(st / y)
        hat = st * st / y
        like = t if not is_exact(t) else x
        out.append(TOpPair(j + 1, rewrap(nxt, like), rewrap(hat, like)))
        cur = nxt
    return out
