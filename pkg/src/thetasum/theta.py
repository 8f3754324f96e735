"""Direct evaluation of F_{s,n}(x,t) = sum_{k<=n} e^{i pi k^2 x + 2 i pi k t} / k^s."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import kernels
from .cf import rcf_expand
from .errors import InputError
from .numbers import DEFAULT_PREC, MIN_PREC, RealInput, as_real, exact_value

_TURN_ERR = 2.0 * math.pi * 2.0 ** -55 + 2.0 ** -51  # angle truncation + cos/sin rounding


@dataclass(frozen=True)
class SeriesParams:
    s: float
    t: RealInput = Fraction(0)
    prec: int = DEFAULT_PREC
    threads: Optional[int] = None

    def __post_init__(self):
        if not math.isfinite(self.s) or self.s < 0:
            raise InputError("s must be finite and >= 0")
        if self.prec < MIN_PREC:
            raise InputError(f"precision must be >= {MIN_PREC} bits")
        object.__setattr__(self, "t", as_real(self.t))


@dataclass(frozen=True)
class PartialSum:
    n: int
    value: complex
    phase_error_bound: float
    abs_sum: float = 0.0


def phase_words(x: RealInput, t: RealInput = Fraction(0)) -> tuple[int, int]:
    return kernels.fixed_phase(exact_value(as_real(x)), exact_value(as_real(t)))


def _error_bound(n: int, abs_sum: float) -> float:
    # fixed-point rounding of x/2 and t contributes at most (k^2 + k) 2^-129 turns per term
    fixed = 2.0 * math.pi * (n * n + n) * 2.0 ** -129
    return abs_sum * (_TURN_ERR + fixed)


def partial_sum(params: SeriesParams, x: RealInput, n: int) -> PartialSum:
    """F_{s,n}(x,t) with exact per-term phase reduction and compensated summation."""
    if n < 0:
        raise InputError("n must be >= 0")
    if n == 0:
        return PartialSum(0, 0j, 0.0, 0.0)
    Y, T = phase_words(x, params.t)
    val, asum = kernels.phase_sum(Y, T, 1, n, params.s, 0.0, params.threads)
    return PartialSum(n, val, _error_bound(n, asum), asum)


def slice_sum(params: SeriesParams, x: RealInput, n1: int, n2: int) -> complex:
    """sum over n1 < k <= n2."""
    if n2 <= n1:
        return 0j
    Y, T = phase_words(x, params.t)
    return kernels.phase_sum(Y, T, n1 + 1, n2, params.s, 0.0, params.threads)[0]


def hl_witness(x: RealInput, N: int) -> tuple[float, int]:
    """S_N / min_r (N/sqrt(Q_r) + sqrt(Q_r)) and the minimising r."""
    if N < 1:
        raise InputError("N must be >= 1")
    x = as_real(x)
    depth = 8
    while True:
        rcf = rcf_expand(x, depth)
        if rcf.Q[-1] > N or rcf.terminated:
            break
        if rcf.precision_exhausted:
            raise InputError(f"RCF depth {rcf.depth} does not reach Q_r > N = {N}")
        depth *= 2
    best, r_star = math.inf, 0
    for r, q in enumerate(rcf.Q):
        v = N / math.sqrt(q) + math.sqrt(q)
        if v < best:
            best, r_star = v, r
    S = abs(partial_sum(SeriesParams(0.0), x, N).value)
    return S / best, r_star
