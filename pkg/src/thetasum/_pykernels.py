"""Pure numpy implementation of the phase kernels.

Phases are the same exact integers as in the compiled core:
theta_k = (k^2 Y + k T) mod 2^128.  Inside a chunk starting at ``a`` we use
theta_{a+j} = theta_a + j D + j^2 Y with D = 2 a Y + T, evaluated in 32-bit
limbs held in uint64 lanes, which is exact for j < 2^12.
"""

from __future__ import annotations

import numpy as np

_M128 = (1 << 128) - 1
_M32 = np.uint64(0xFFFFFFFF)
_HALF_PI = np.pi / 2
_BLOCK_CHUNKS = 64


def _limbs(values: list[int]) -> np.ndarray:
    """(len(values), 4) uint64 array of little-endian 32-bit limbs."""
    out = np.empty((len(values), 4), dtype=np.uint64)
    for i, v in enumerate(values):
        for l in range(4):
            out[i, l] = (v >> (32 * l)) & 0xFFFFFFFF
    return out


def _theta_hi(Y: int, T: int, starts: list[int], width: int) -> np.ndarray:
    """Top 64 bits of theta for k = start + j, j < width, one row per start."""
    if width > 4096:
        raise ValueError("chunk width must be <= 4096")
    th0 = _limbs([(a * a * Y + a * T) & _M128 for a in starts])
    dd = _limbs([(2 * a * Y + T) & _M128 for a in starts])
    yl = _limbs([Y & _M128])[0]
    j = np.arange(width, dtype=np.uint64)[None, :]
    jj = j * j
    carry = np.zeros((len(starts), width), dtype=np.uint64)
    limbs = []
    for l in range(4):
        c = j * dd[:, l:l + 1] + jj * yl[l] + th0[:, l:l + 1] + carry
        limbs.append(c & _M32)
        carry = c >> np.uint64(32)
    return (limbs[3] << np.uint64(32)) | limbs[2]


def _unit(hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = (hi >> np.uint64(62)).astype(np.int64)
    m = (hi & np.uint64(0x3FFFFFFFFFFFFFFF)) >> np.uint64(9)
    phi = _HALF_PI * (m.astype(np.float64) * 2.0 ** -53)
    cc, ss = np.cos(phi), np.sin(phi)
    c = np.select([q == 0, q == 1, q == 2], [cc, -ss, -cc], ss)
    s = np.select([q == 0, q == 1, q == 2], [ss, cc, -ss], -cc)
    return c, s


def _row_sums(arr: np.ndarray) -> np.ndarray:
    """Row sums by a pairwise cascade of error-free two-sums."""
    s = arr
    err = np.zeros(arr.shape[0])
    while s.shape[1] > 1:
        if s.shape[1] % 2:
            s = np.concatenate([s, np.zeros((s.shape[0], 1))], axis=1)
        a, b = s[:, 0::2], s[:, 1::2]
        t = a + b
        bp = t - a
        err += ((a - (t - bp)) + (b - bp)).sum(axis=1)
        s = t
    return s[:, 0] + err


def chunk_sums(Y: int, T: int, a: int, b: int, s: float, shift: float, chunk: int) -> np.ndarray:
    if b < a:
        return np.zeros((0, 3))
    starts = list(range(a, b + 1, chunk))
    out = np.empty((len(starts), 3))
    for i0 in range(0, len(starts), _BLOCK_CHUNKS):
        blk = starts[i0:i0 + _BLOCK_CHUNKS]
        c, sn = _unit(_theta_hi(Y, T, blk, chunk))
        k = np.asarray(blk, dtype=np.float64)[:, None] + np.arange(chunk)[None, :]
        valid = k <= b
        if s == 0.0:
            w = np.where(valid, 1.0, 0.0)
        else:
            w = np.where(valid, np.power(np.where(valid, k, 1.0) + shift, -s), 0.0)
        out[i0:i0 + len(blk), 0] = _row_sums(c * w)
        out[i0:i0 + len(blk), 1] = _row_sums(sn * w)
        out[i0:i0 + len(blk), 2] = _row_sums(w)
    return out


def units(Y: int, T: int, a: int, b: int) -> tuple[np.ndarray, np.ndarray]:
    n = b - a + 1
    if n <= 0:
        return np.zeros(0), np.zeros(0)
    width = min(4096, n)
    starts = list(range(a, b + 1, width))
    cs, sn = [], []
    for i0 in range(0, len(starts), _BLOCK_CHUNKS):
        c, s = _unit(_theta_hi(Y, T, starts[i0:i0 + _BLOCK_CHUNKS], width))
        cs.append(c.ravel())
        sn.append(s.ravel())
    return np.concatenate(cs)[:n], np.concatenate(sn)[:n]
