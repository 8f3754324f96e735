import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import euclid_digits, fib, mp_rcf, mp_sqrt2m1, mp_t_orbit, pell, rand_bits_real
from thetasum.cf import (ecf_expand, floor_chain, from_digits, g_map, orbit_products, rcf_expand,
                         singularize, t_map, t_ops, t_orbit, u_map, u_orbit)
from thetasum.errors import InputError, PrecisionExhausted
from thetasum.numbers import BigFloat, QuadSurd, exact_value, parse_real

SQ3 = QuadSurd(-1, 1, 3)
LONG_DEC = ("0.70710678118654752440084436210484903928483593768847403658833986899536623923105351942519"
            "37671638207864")


def random_bigfloats(n, seed, prec=192):
    rng = np.random.default_rng(seed)
    return [BigFloat.from_fraction(rand_bits_real(rng, prec), prec) for _ in range(n)]


# -- regular continued fractions ---------------------------------------------

def test_rcf_sqrt2(sqrt2m1):
    r = rcf_expand(sqrt2m1, 4)
    assert r.digits == [2, 2, 2, 2]
    assert r.convergents == [(1, 2), (2, 5), (5, 12), (12, 29)]


def test_rcf_golden(golden):
    r = rcf_expand(golden, 5)
    assert r.digits == [1] * 5
    assert r.Q[1:] == fib(6)[1:]


def test_rcf_rational():
    r = rcf_expand(Fraction(5, 12), 10)
    assert r.digits == [2, 2, 2] == euclid_digits(5, 12)
    assert r.terminated


@pytest.mark.parametrize("x", ["(-1+1*sqrt(2))/1", "(-1+1*sqrt(5))/2", "(-1+1*sqrt(3))/1", "(2+1*sqrt(7))/5"])
def test_rcf_matches_highprec(x):
    v = parse_real(x)
    assert rcf_expand(v, 30).digits == mp_rcf(v.to_mpf(800), 30)


def test_rcf_recurrences_and_coprime():
    for x in [QuadSurd(-1, 1, 2), SQ3] + random_bigfloats(5, 1):
        r = rcf_expand(x, 25)
        for n in range(1, r.depth):
            assert r.P[n + 1] == r.digits[n] * r.P[n] + r.P[n - 1]
            assert r.Q[n + 1] == r.digits[n] * r.Q[n] + r.Q[n - 1]
            assert r.Q[n + 1] > r.Q[n]
            assert math.gcd(r.P[n], r.Q[n]) == 1


def test_rcf_bigfloat_certification_flag():
    x = parse_real("0.7@64")
    r = rcf_expand(x, 40)
    assert r.precision_exhausted and r.certified_depth < 40
    assert r.digits == [1, 2]


# -- even continued fractions -------------------------------------------------

def test_ecf_sqrt2(sqrt2m1):
    e = ecf_expand(sqrt2m1, 8)
    assert e.digits == [(1, 2)] * 8
    assert e.q[1:] == pell(9)[1:]


def test_ecf_golden_by_hand(golden):
    # [1,1,1,1,...] -> (1,2) then (-1, 1+1) with zero (-1,2) insertions, repeating
    e = ecf_expand(golden, 8)
    assert e.digits == [(1, 2), (-1, 2)] * 4
    assert e.q[1:] == [2, 3, 8, 13, 34, 55, 144, 233]


def test_singularize_rules():
    pairs, stable, cusp = singularize([1, 3, 2, 4], False)
    assert pairs[:2] == [(1, 2), (-1, 2)] and pairs[2] == (-1, 3) or stable >= 1
    pairs, _, cusp = singularize([3], True)
    assert pairs == [(1, 4)] and cusp


def test_ecf_rational_cusp():
    e = ecf_expand(Fraction(1, 3), 5)
    assert e.digits == [(1, 4)] and e.cusp


def _even_digits_ok(e):
    return all(a % 2 == 0 and a > 0 and s in (1, -1) for s, a in e.digits)


def _interleaving(x, depth):
    r = rcf_expand(x, 2 * depth + 6)
    e = ecf_expand(x, depth)
    P = [1] + r.P  # P[i] = P_{i-1}
    Q = [0] + r.Q
    A = r.digits
    regular = set(zip(r.P[1:], r.Q[1:]))
    even = set(e.convergents)
    for p, q in e.convergents:
        found = (p, q) in regular
        n = -1
        while not found and n + 2 <= len(A):
            for m in range(1, A[n + 1] + 1):  # A[n+1] = A_{n+2}
                if (m * P[n + 2] + P[n + 1], m * Q[n + 2] + Q[n + 1]) == (p, q):
                    found = True
                    break
            n += 1
        assert found, (p, q)
    qmax = e.q[-1]
    conv = [c for c in zip(r.P[1:], r.Q[1:]) if c[1] <= qmax]
    for c1, c2 in zip(conv, conv[1:]):
        assert c1 in even or c2 in even


def test_interleaving_fixtures(sqrt2m1, golden):
    for x in (sqrt2m1, golden, SQ3, Fraction(5, 12)):
        _interleaving(x, 12)
    e = ecf_expand(sqrt2m1, 12)
    regular = set(rcf_expand(sqrt2m1, 12).convergents)
    assert all(c in regular for c in e.convergents)


def test_interleaving_random_bigfloats():
    for x in random_bigfloats(50, 7):
        _interleaving(x, 25)


def test_ecf_invariants_random():
    for x in random_bigfloats(10, 3):
        e = ecf_expand(x, 25)
        assert e.depth == 25 and _even_digits_ok(e)
        for j in range(1, e.depth):
            assert e.q[j + 1] > e.q[j]
            s_, a = e.digits[j]
            assert e.q[j + 1] == a * e.q[j] + s_ * e.q[j - 1]


def test_singularization_reconstruction():
    for x in [QuadSurd(-1, 1, 2), SQ3] + random_bigfloats(5, 11):
        e = ecf_expand(x, 20)
        xv = exact_value(x)
        for J in (5, 10, 20):
            y = Fraction(0)
            for s_, a in reversed(e.digits[:J]):
                y = Fraction(s_) / (a + y)
            err = abs(xv - y)
            assert err <= Fraction(1, e.q[J] * (e.q[J] - e.q[J - 1]))
            if 2 * (e.q[J] - e.q[J - 1]) >= e.q[J]:
                assert err < Fraction(2, e.q[J] ** 2)


# -- maps -------------------------------------------------------------------

def test_t_map_examples(sqrt2m1):
    assert t_map(sqrt2m1) == 1 - QuadSurd(0, 1, 2)
    assert t_map(QuadSurd(1, -1, 2)) == sqrt2m1
    assert t_map(Fraction(1, 2)) == 0
    with pytest.raises(InputError):
        t_map(Fraction(0))


def test_g_map_examples(sqrt2m1, golden):
    assert g_map(sqrt2m1) == sqrt2m1
    assert g_map(Fraction(2, 5)) == Fraction(1, 2)
    assert g_map(golden) == golden


def test_u_map_examples(sqrt2m1):
    st_ = u_map(Fraction(45, 100))
    assert st_.k == 1 and st_.value == Fraction(2, 9)
    assert abs(t_map(Fraction(45, 100))) == st_.value
    assert u_map(sqrt2m1).value == sqrt2m1
    assert u_map(Fraction(1, 2)).value == 0


def test_u_iterates_match_t_iterates(sqrt2m1, golden):
    for x in (sqrt2m1, golden, SQ3, Fraction(355, 1133)):
        us = u_orbit(x, 30)
        ts = t_orbit(x, 30).exact
        assert len(us) >= len(ts) - 1
        for j, stp in enumerate(us[:len(ts) - 1], start=1):
            assert stp.value == abs(ts[j])


@given(st.fractions(min_value=Fraction(1, 10 ** 6), max_value=1))
def test_u_map_abs_identity(x):
    if x == 0:
        return
    assert u_map(x).value == abs(t_map(x))


# -- orbits and products -------------------------------------------------------

def test_orbit_sqrt2(sqrt2m1):
    o = t_orbit(sqrt2m1, 3)
    neg = QuadSurd(1, -1, 2)
    assert o.exact == [sqrt2m1, neg, sqrt2m1, neg]
    assert o.signs == [1, -1, 1, -1]


def test_orbit_bigfloat_vs_doubled_precision():
    x192 = parse_real(LONG_DEC + "@192")
    x384 = parse_real(LONG_DEC + "@384")
    o1 = t_orbit(x192, 20)
    o2 = t_orbit(x384, 20)
    assert o1.depth == 20 and o2.depth == 20
    for a, b in zip(o1.exact, o2.exact):
        assert abs(float(a - b)) < 2.0 ** -40
    ref = mp_t_orbit(x384.to_mpf(384), 20, dps=300)
    for a, b in zip(o1.exact, ref):
        assert abs(float(a) - float(b)) < 2.0 ** -40


def test_orbit_decimal_rational_prefix():
    # 0.7 is the rational 7/10: its orbit hits 0 after five steps, so only a prefix
    # of the requested depth is certifiable at any precision
    o1 = t_orbit(parse_real("0.7@192"), 20)
    o2 = t_orbit(parse_real("0.7@384"), 20)
    assert o1.status == "precision-exhausted"
    n = min(o1.depth, o2.depth)
    assert n >= 2
    for a, b in zip(o1.exact[:n + 1], o2.exact[:n + 1]):
        assert abs(float(a - b)) < 2.0 ** -40
    assert t_orbit(Fraction(7, 10), 20).status == "terminated-zero"


def test_orbit_error_estimates_honest():
    for x in random_bigfloats(5, 5):
        o = t_orbit(x, 25)
        ref = mp_t_orbit(exact_value(x), o.depth, dps=400)
        for a, b, err in zip(o.exact, ref, o.errors):
            assert abs(float(a) - float(b)) <= err + 1e-300


def test_products_sqrt2(sqrt2m1):
    r = orbit_products(sqrt2m1, 6)
    for j, pv in enumerate(r.products, start=1):
        assert abs(pv - float(mp_sqrt2m1()) ** j) < 1e-15
    assert 0.1 <= r.products[1] <= 1 / 3
    assert all(r.sandwich_ok) and all(r.identity_ok)


def test_products_golden_identity(golden):
    r = orbit_products(golden, 5)
    assert r.identity_ok[3]
    assert abs(r.products[3] - r.identity[3]) < 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_sandwich_and_multiplicativity(seed):
    xs = random_bigfloats(4, 100 + seed) + [SQ3, QuadSurd(-1, 1, 2)]
    for x in xs:
        r = orbit_products(x, 25)
        o = t_orbit(x, 25)
        assert all(r.sandwich_ok)
        assert all(r.identity_ok)
        for j in range(1, len(r.products)):
            lhs = r.products[j]
            rhs = r.products[j - 1] * abs(float(o.exact[j]))
            assert abs(lhs - rhs) <= r.errors[j] + 4e-16 * lhs


def test_products_first_term_bound():
    for x in random_bigfloats(5, 9):
        r = orbit_products(x, 1)
        e = ecf_expand(x, 1)
        assert r.products[0] <= 1 / (e.q[1] - e.q[0])


# -- floor chains -------------------------------------------------------------

def test_floor_chain_examples(sqrt2m1):
    f = floor_chain(sqrt2m1, 10)
    assert f.values == [10, 4, 1, 0] and f.stop == 2
    f = floor_chain(sqrt2m1, 1)
    assert f.values == [1, 0] and f.stop == 0
    assert floor_chain(sqrt2m1, 10).stop <= floor_chain(sqrt2m1, 100).stop


@given(st.integers(0, 10 ** 6))
def test_floor_chain_invariants(n):
    x = SQ3
    f = floor_chain(x, n)
    o = t_orbit(x, len(f.values))
    assert f.values[0] == n and f.values[-1] == 0
    for l in range(1, len(f.values)):
        assert f.values[l] == math.floor(f.values[l - 1] * abs(o.exact[l - 1]))
    if len(f.values) > 1:
        assert all(v >= 1 for v in f.values[:-1]) or n == 0


def test_floor_chain_uncertifiable():
    # n * x lands within 2^-30 of an integer at 64 bits
    x = BigFloat.from_fraction(Fraction(1, 3) + Fraction(1, 1 << 50), 64)
    with pytest.raises(PrecisionExhausted):
        floor_chain(x, 3)


def test_floor_chain_cusp():
    with pytest.raises(InputError):
        floor_chain(Fraction(1, 3), 10 ** 6)


# -- t operators -----------------------------------------------------------------

def test_t_ops_zero_t(sqrt2m1):
    ops = t_ops(sqrt2m1, Fraction(0), 10)
    assert all(exact_value(o.ttilde) == 0 and exact_value(o.that) == 0 for o in ops[1:])


def test_t_ops_base_and_first(sqrt2m1):
    ops = t_ops(sqrt2m1, Fraction(1, 3), 3)
    assert ops[0].ttilde == Fraction(1, 3) and ops[0].that == Fraction(1, 3)
    expect = (QuadSurd(1, 1, 2)) / 3  # (1/3)/(sqrt2 - 1) = (sqrt2 + 1)/3 in [0, 1)
    assert ops[1].ttilde == expect
    assert ops[1].that == Fraction(1, 9) / sqrt2m1


@given(st.fractions(min_value=0, max_value=1, max_denominator=1000))
def test_t_ops_ranges(t):
    x = SQ3
    for o in t_ops(x, t, 8)[1:]:
        assert 0 <= exact_value(o.ttilde) < 1


def test_from_digits_planted():
    x = from_digits([1] * 9 + [10 ** 6], "golden", 192)
    assert rcf_expand(x, 12).digits[:11] == [1] * 9 + [10 ** 6, 1]
