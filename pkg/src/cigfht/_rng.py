"""Counter-based Gaussian variates: Philox4x32-10 words fed to a ziggurat.

Stream ``(seed, stream)`` is the sequence of Philox blocks at counters
0, 1, 2, ... with the 64-bit seed as key and the stream id in the upper
counter words. A trajectory's noise is therefore a pure function of the seed
and its index, independent of scheduling.

A stream state is a ``uint64`` array holding a buffer of generated words,
the read position and the next block counter (see :func:`new_state`).
"""
import math

import numpy as np
from numba import njit

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_SHIFT11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO_M53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def philox4x32(c0, c1, c2, c3, k0, k1):
    """Ten-round Philox4x32 block; all arguments are 32-bit values held in uint64."""
    for r in range(10):
        if r > 0:
            k0 = (k0 + _W0) & _MASK32
            k1 = (k1 + _W1) & _MASK32
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0 = p0 >> _SHIFT32
        lo0 = p0 & _MASK32
        hi1 = p1 >> _SHIFT32
        lo1 = p1 & _MASK32
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
    return c0, c1, c2, c3


_BUF = 64  # words per refill; 32 independent Philox blocks pipeline well
STATE_SIZE = _BUF + 2


def new_state():
    state = np.zeros(_BUF + 2, dtype=np.uint64)
    state[_BUF] = _BUF
    return state


@njit(cache=True, nogil=True)
def reset_state(state):
    state[_BUF] = _BUF
    state[_BUF + 1] = 0


@njit(cache=True, nogil=True)
def _refill(seed, stream, state):
    c = state[_BUF + 1]
    s_lo = stream & _MASK32
    s_hi = stream >> _SHIFT32
    k0 = seed & _MASK32
    k1 = seed >> _SHIFT32
    for j in range(_BUF // 2):
        cj = c + np.uint64(j)
        r0, r1, r2, r3 = philox4x32(cj & _MASK32, cj >> _SHIFT32, s_lo, s_hi, k0, k1)
        state[2 * j] = (r0 << _SHIFT32) | r1
        state[2 * j + 1] = (r2 << _SHIFT32) | r3
    state[_BUF + 1] = c + np.uint64(_BUF // 2)
    state[_BUF] = 0


@njit(cache=True, nogil=True, inline="always")
def next_u64(seed, stream, state):
    pos = np.int64(state[_BUF])
    if pos >= _BUF:
        _refill(seed, stream, state)
        pos = 0
    state[_BUF] = pos + 1
    return state[pos]


@njit(cache=True, nogil=True, inline="always")
def next_uniform(seed, stream, state):
    """Uniform on the open interval (0, 1)."""
    return (np.int64(next_u64(seed, stream, state) >> _SHIFT11) + 0.5) * _TWO_M53


# 128-layer ziggurat for the standard normal (Marsaglia & Tsang layout,
# Doornik's floating-point acceptance test)
_ZIG_C = 128
_ZIG_R = 3.442619855899
_ZIG_V = 9.91256303526217e-3


def _ziggurat_tables():
    f = lambda x: math.exp(-0.5 * x * x)  # noqa: E731
    x = np.empty(_ZIG_C + 1)
    x[0] = _ZIG_V / f(_ZIG_R)
    x[1] = _ZIG_R
    for i in range(2, _ZIG_C):
        x[i] = math.sqrt(-2.0 * math.log(_ZIG_V / x[i - 1] + f(x[i - 1])))
    x[_ZIG_C] = 0.0
    ratio = x[1:] / x[:-1]
    return x, ratio


_ZX, _ZRATIO = _ziggurat_tables()
ZIG_X, ZIG_RATIO = _ZX, _ZRATIO
_MASK7 = np.uint64(127)


@njit(cache=True, nogil=True)
def normal_slow_path(seed, stream, state, i, u):
    """Wedge and tail handling, redrawing until a variate is accepted."""
    while True:
        if i == 0:
            # tail beyond R
            while True:
                xt = math.log(next_uniform(seed, stream, state)) / _ZIG_R
                yt = math.log(next_uniform(seed, stream, state))
                if -2.0 * yt >= xt * xt:
                    break
            return xt - _ZIG_R if u < 0 else _ZIG_R - xt
        x = u * _ZX[i]
        f0 = math.exp(-0.5 * (_ZX[i] * _ZX[i] - x * x))
        f1 = math.exp(-0.5 * (_ZX[i + 1] * _ZX[i + 1] - x * x))
        if f1 + next_uniform(seed, stream, state) * (f0 - f1) < 1.0:
            return x
        bits = next_u64(seed, stream, state)
        i = np.int64(bits & _MASK7)
        u = 2.0 * (np.int64(bits >> _SHIFT11) * _TWO_M53) - 1.0
        if abs(u) < _ZRATIO[i]:
            return u * _ZX[i]


@njit(cache=True, nogil=True, inline="always")
def next_normal(seed, stream, state):
    # hot loops repeat this body inline instead of calling it: the IR inliner
    # adds refcount traffic on ``state`` that triples the cost per variate
    bits = next_u64(seed, stream, state)
    i = np.int64(bits & _MASK7)
    u = 2.0 * (np.int64(bits >> _SHIFT11) * _TWO_M53) - 1.0
    if abs(u) < _ZRATIO[i]:
        z = u * _ZX[i]
    else:
        z = normal_slow_path(seed, stream, state, i, u)
    return z


@njit(cache=True)
def _normals(seed, stream, n):
    state = np.zeros(_BUF + 2, dtype=np.uint64)
    reset_state(state)
    out = np.empty(n)
    for j in range(n):
        out[j] = next_normal(seed, stream, state)
    return out


def standard_normals(seed, stream, n):
    """First ``n`` variates of one stream, mainly for inspection and tests."""
    return _normals(np.uint64(seed), np.uint64(stream), int(n))
