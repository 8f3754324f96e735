"""Backend selection and deterministic parallel driver for the phase kernels.

The compiled extension is used when importable; ``THETASUM_BACKEND=python``
forces the numpy fallback.  Work is cut into fixed 4096-term chunks anchored
at the first index, so the set of chunk partial sums (and their final
correctly rounded reduction) does not depend on the thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Union

import numpy as np

from . import _pykernels
from .errors import InputError
from .numbers import QuadSurd, fixed_point

CHUNK = 4096

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - exercised when the extension is absent
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels


def _select() -> str:
    want = os.environ.get("THETASUM_BACKEND", "auto").lower()
    if want in _BACKENDS:
        return want
    return "compiled" if "compiled" in _BACKENDS else "python"


_active = _select()
_threads = max(1, int(os.environ.get("THETASUM_THREADS", "1")))


def backend_name() -> str:
    return _active


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise InputError(f"unknown or unavailable backend {name!r}")
    _active = name


def set_threads(n: int) -> None:
    global _threads
    _threads = max(1, int(n))


def get_threads() -> int:
    return _threads


Exact = Union[Fraction, QuadSurd]


def fixed_phase(x: Exact, t: Exact = Fraction(0)) -> tuple[int, int]:
    """Fixed-point words (Y, T) so that theta_k = k^2 x/2 + k t in turns."""
    return fixed_point(x / 2), fixed_point(t)


def _split(a: int, b: int, parts: int) -> list[tuple[int, int]]:
    nchunks = (b - a) // CHUNK + 1
    per = -(-nchunks // parts)
    out = []
    for i in range(0, nchunks, per):
        lo = a + i * CHUNK
        hi = min(b, a + (i + per) * CHUNK - 1)
        out.append((lo, hi))
    return out


def chunk_partials(Y: int, T: int, a: int, b: int, s: float, shift: float = 0.0,
                   threads: int | None = None, backend: str | None = None) -> np.ndarray:
    """(nchunks, 3) array of per-chunk compensated sums."""
    mod = _BACKENDS[backend or _active]
    if b < a:
        return np.zeros((0, 3))
    nt = threads or _threads
    if nt <= 1 or b - a < 4 * CHUNK:
        return mod.chunk_sums(Y, T, a, b, float(s), float(shift), CHUNK)
    ranges = _split(a, b, nt)
    with ThreadPoolExecutor(max_workers=nt) as ex:
        parts = list(ex.map(lambda r: mod.chunk_sums(Y, T, r[0], r[1], float(s), float(shift), CHUNK),
                            ranges))
    return np.concatenate(parts, axis=0)


def phase_sum(Y: int, T: int, a: int, b: int, s: float, shift: float = 0.0,
              threads: int | None = None, backend: str | None = None) -> tuple[complex, float]:
    """sum_{k=a}^{b} e^{2 pi i theta_k} (k+shift)^{-s}; also returns sum of moduli."""
    p = chunk_partials(Y, T, a, b, s, shift, threads, backend)
    return complex(math.fsum(p[:, 0]), math.fsum(p[:, 1])), math.fsum(p[:, 2])


def phase_units(Y: int, T: int, a: int, b: int, threads: int | None = None,
                backend: str | None = None) -> np.ndarray:
    """Complex unit phases e^{2 pi i theta_k} for k = a..b."""
    mod = _BACKENDS[backend or _active]
    if b < a:
        return np.zeros(0, dtype=complex)
    nt = threads or _threads
    if nt <= 1 or b - a < 4 * CHUNK:
        c, s = mod.units(Y, T, a, b)
    else:
        ranges = _split(a, b, nt)
        with ThreadPoolExecutor(max_workers=nt) as ex:
            parts = list(ex.map(lambda r: mod.units(Y, T, r[0], r[1]), ranges))
        c = np.concatenate([p[0] for p in parts])
        s = np.concatenate([p[1] for p in parts])
    return c + 1j * s
