"""Exact and high-precision scalars.

Three kinds of real input are accepted everywhere a real number is expected:

* :class:`fractions.Fraction` -- exact rationals;
* :class:`QuadSurd` -- exact numbers ``a + b*sqrt(d)`` with rational ``a, b``;
* :class:`BigFloat` -- a dyadic value ``man * 2**exp`` carrying a declared
  precision; the true input is only known to lie within half an ulp.

Complex values are plain Python ``complex``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import singledispatch
from typing import Iterable, Union

import mpmath

from .errors import InputError

DEFAULT_PREC = 192
MIN_PREC = 64
FIXED_BITS = 128
RHO = complex(math.sqrt(0.5), math.sqrt(0.5))  # e^{i pi/4}
EIGHTH_ROOTS = (1 + 0j, RHO, 1j, 1j * RHO, -1 + 0j, -RHO, -1j, -1j * RHO)


def _is_squarefree(d: int) -> bool:
    if d < 2:
        return False
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class QuadSurd:
    """Exact ``a + b*sqrt(d)`` with ``d`` square-free and ``d > 1``."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if not _is_squarefree(self.d):
            raise InputError(f"sqrt({self.d}): radicand must be square-free and > 1")

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "QuadSurd":
        if isinstance(other, QuadSurd):
            if other.d != self.d:
                raise InputError("cannot mix surds with different radicands")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadSurd(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadSurd(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadSurd(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadSurd(self.a * o.a + self.b * o.b * self.d,
                        self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def reciprocal(self) -> "QuadSurd":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero surd")
        return QuadSurd(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    # -- order -------------------------------------------------------------
    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 d
        return sa if self.a * self.a > self.b * self.b * self.d else sb

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadSurd):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d) or (
                self.b == other.b == 0 and self.a == other.a)
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __floor__(self) -> int:
        # (A + B sqrt d) / C with integers, C > 0
        c = math.lcm(self.a.denominator, self.b.denominator)
        A = self.a.numerator * (c // self.a.denominator)
        B = self.b.numerator * (c // self.b.denominator)
        if B == 0:
            return A // c
        r = math.isqrt(B * B * self.d)
        S = r if B > 0 else -r - 1
        # A + B sqrt d lies strictly inside (A+S, A+S+1)
        return (A + S) // c

    def __float__(self):
        return float(self.to_mpf(80))

    def to_mpf(self, prec: int = DEFAULT_PREC) -> mpmath.mpf:
        with mpmath.workprec(prec + 20):
            a = mpmath.mpf(self.a.numerator) / self.a.denominator
            bs = (mpmath.mpf(self.b.numerator) / self.b.denominator) * mpmath.sqrt(self.d)
            if (self.a > 0) != (self.b > 0) and self.a != 0:
                # opposite signs cancel: use the conjugate, whose terms add
                n = self.norm()
                v = (mpmath.mpf(n.numerator) / n.denominator) / (a - bs)
            else:
                v = a + bs
        with mpmath.workprec(prec):
            return +v

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __repr__(self):
        return f"QuadSurd({self.a}, {self.b}, {self.d})"

    def __str__(self):
        c = math.lcm(self.a.denominator, self.b.denominator)
        A = self.a * c
        B = self.b * c
        return f"({A}{'+' if B >= 0 else '-'}{abs(B)}*sqrt({self.d}))/{c}"


@dataclass(frozen=True)
class BigFloat:
    """Dyadic value ``man * 2**exp`` with a declared precision in bits.

    Arithmetic on the stored value is exact where the package needs it
    (continued-fraction digits, phase reduction); the declared precision
    only drives certification of digits and the working precision of
    transcendental evaluations.
    """

    man: int
    exp: int
    prec: int = DEFAULT_PREC

    def __post_init__(self):
        if self.prec < MIN_PREC:
            raise InputError(f"precision must be >= {MIN_PREC} bits")

    @classmethod
    def from_fraction(cls, value: Fraction, prec: int = DEFAULT_PREC) -> "BigFloat":
        """Round ``value`` to ``prec`` significant bits (nearest, ties to even)."""
        value = Fraction(value)
        if value == 0:
            return cls(0, 0, prec)
        e = math.floor(math.log2(abs(value)))
        # make sure 2**e <= |value| < 2**(e+1)
        while Fraction(2) ** e > abs(value):
            e -= 1
        while Fraction(2) ** (e + 1) <= abs(value):
            e += 1
        shift = prec - 1 - e
        scaled = value * Fraction(2) ** shift
        man = round(scaled)  # round-half-even
        return cls(man, -shift, prec)

    @classmethod
    def from_mpf(cls, v: mpmath.mpf, prec: int) -> "BigFloat":
        if not isinstance(v, mpmath.mpf):
            with mpmath.workprec(prec + 64):
                v = mpmath.mpf(v)
        man, exp = v.man_exp  # mpmath.mpf(v) would re-round to the context precision
        return cls.from_fraction(Fraction(int(man)) * Fraction(2) ** int(exp), prec)

    def to_fraction(self) -> Fraction:
        return Fraction(self.man) * Fraction(2) ** self.exp

    def ulp(self) -> Fraction:
        if self.man == 0:
            return Fraction(2) ** (-self.prec)
        e = self.exp + self.man.bit_length() - self.prec
        return Fraction(2) ** e

    def interval(self) -> tuple[Fraction, Fraction]:
        """Half-ulp uncertainty interval around the stored value."""
        v = self.to_fraction()
        h = self.ulp() / 2
        return v - h, v + h

    def to_mpf(self, prec: int | None = None) -> mpmath.mpf:
        with mpmath.workprec(prec or self.prec):
            return mpmath.ldexp(mpmath.mpf(self.man), self.exp)

    def __float__(self):
        return float(self.to_fraction())

    def __neg__(self):
        return BigFloat(-self.man, self.exp, self.prec)

    def __repr__(self):
        return f"BigFloat({mpmath.nstr(self.to_mpf(), 20)}@{self.prec})"


RealInput = Union[Fraction, QuadSurd, BigFloat]


# -- parsing ---------------------------------------------------------------

_RAT = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")
_SURD = re.compile(
    r"^\s*\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\s*\(\s*(\d+)\s*\)\s*\)\s*/\s*(\d+)\s*$")
_DEC = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(?:@\s*(\d+))?\s*$")


def parse_real(text: str) -> RealInput:
    """Parse ``"p/q"``, ``"(a+b*sqrt(d))/c"`` or ``"<decimal>[@bits]"``.

    >>> parse_real("1/2")
    Fraction(1, 2)
    >>> parse_real("(-1+1*sqrt(2))/1")
    QuadSurd(-1, 1, 2)
    """
    m = _RAT.match(text)
    if m:
        den = int(m.group(2) or 1)
        if den == 0:
            raise InputError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), den)
    m = _SURD.match(text)
    if m:
        a = int(m.group(1))
        b = int(m.group(3)) * (1 if m.group(2) == "+" else -1)
        d = int(m.group(4))
        c = int(m.group(5))
        if c == 0:
            raise InputError(f"zero denominator in {text!r}")
        if not _is_squarefree(d):
            raise InputError(f"radicand {d} is not square-free (or is < 2)")
        return QuadSurd(Fraction(a, c), Fraction(b, c), d)
    m = _DEC.match(text)
    if m:
        prec = int(m.group(2)) if m.group(2) else DEFAULT_PREC
        return BigFloat.from_fraction(Fraction(m.group(1)), prec)
    raise InputError(f"cannot parse real number {text!r}")


def as_real(value) -> RealInput:
    """Coerce ints, strings and floats to a :data:`RealInput`."""
    if isinstance(value, (Fraction, QuadSurd, BigFloat)):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_real(value)
    if isinstance(value, float):
        return BigFloat.from_fraction(Fraction(value), 64)
    raise InputError(f"unsupported real input {value!r}")


def format_real(x: RealInput) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, QuadSurd):
        return str(x)
    return f"{mpmath.nstr(x.to_mpf(), max(17, int(x.prec * 0.30103)))}@{x.prec}"


# -- generic operations ----------------------------------------------------

@singledispatch
def exact_value(x) -> Union[Fraction, QuadSurd]:
    """The exact number stored in ``x`` (dyadic value for BigFloat)."""
    raise InputError(f"unsupported real input {x!r}")


@exact_value.register
def _(x: Fraction):
    return x


@exact_value.register
def _(x: QuadSurd):
    return x


@exact_value.register
def _(x: BigFloat):
    return x.to_fraction()


def precision_of(x: RealInput, default: int = DEFAULT_PREC) -> int:
    return x.prec if isinstance(x, BigFloat) else default


def rewrap(value: Union[Fraction, QuadSurd], like: RealInput) -> RealInput:
    """Return ``value`` in the same variant as ``like`` (rounding BigFloats)."""
    if isinstance(like, BigFloat):
        if isinstance(value, QuadSurd):
            return BigFloat.from_mpf(value.to_mpf(like.prec + 16), like.prec)
        return BigFloat.from_fraction(value, like.prec)
    if isinstance(value, QuadSurd) and value.is_rational:
        return value.a
    return value


def sign(x: RealInput) -> int:
    v = exact_value(x)
    if isinstance(v, QuadSurd):
        return v.sign()
    return (v > 0) - (v < 0)


def is_exact(x: RealInput) -> bool:
    return not isinstance(x, BigFloat)


def is_rational(x: RealInput) -> bool:
    """True for rational inputs (BigFloats count as irrational stand-ins)."""
    return isinstance(x, Fraction) or (isinstance(x, QuadSurd) and x.is_rational)


def to_mpf(x: RealInput, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    v = exact_value(x)
    if isinstance(v, QuadSurd):
        return v.to_mpf(prec)
    with mpmath.workprec(prec):
        return mpmath.mpf(v.numerator) / v.denominator


def to_float(x) -> float:
    if isinstance(x, (Fraction, QuadSurd, BigFloat)):
        return float(exact_value(x)) if isinstance(x, BigFloat) else float(x)
    return float(x)


def frac(v: Union[Fraction, QuadSurd]) -> Union[Fraction, QuadSurd]:
    return v - math.floor(v)


def mod2(v: Union[Fraction, QuadSurd]) -> Union[Fraction, QuadSurd]:
    """Reduce to [0, 2)."""
    return v - 2 * (math.floor(v) // 2)


def fixed_point(v: Union[Fraction, QuadSurd], bits: int = FIXED_BITS) -> int:
    """``round(frac(v) * 2**bits)`` reduced mod ``2**bits``, computed exactly."""
    f = frac(v)
    scaled = f * (1 << bits) + Fraction(1, 2)
    return math.floor(scaled) % (1 << bits)


def phase_mod2(k: int, x: RealInput, prec: int | None = None) -> mpmath.mpf:
    """``k**2 * x`` reduced mod 2, reduced exactly before the final rounding."""
    if k < 1:
        raise InputError("k must be >= 1")
    p = prec or precision_of(x)
    r = mod2(k * k * exact_value(x))
    if isinstance(r, QuadSurd):
        return r.to_mpf(p)
    with mpmath.workprec(p):
        return mpmath.mpf(r.numerator) / r.denominator


def comp_sum(terms: Iterable[complex]) -> complex:
    """Correctly rounded sum of complex terms (componentwise ``math.fsum``)."""
    re_parts = []
    im_parts = []
    for z in terms:
        z = complex(z)
        re_parts.append(z.real)
        im_parts.append(z.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def cplx_arg(z: complex) -> float:
    """Argument in (-pi, pi]."""
    a = math.atan2(z.imag, z.real)
    return math.pi if a == -math.pi else a
