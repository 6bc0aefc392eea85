"""Unitary fast transforms acting along axis 0.

All kernels accept a vector of shape ``(n,)`` or a batch of column vectors of
shape ``(n, k)`` and return a complex array of the same shape.  They are
normalised so that each transform is unitary.
"""

from functools import lru_cache

import numpy as np

_SQRT1_2 = np.sqrt(0.5)


def is_pow2(n):
    return n > 0 and (n & (n - 1)) == 0


def require_pow2(n, what):
    if not is_pow2(n):
        raise ValueError(f"{what} requires a power-of-two length, got n={n}")


def _frozen(a):
    a.setflags(write=False)
    return a


@lru_cache(maxsize=64)
def _bit_reversal(n):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return _frozen(rev)


@lru_cache(maxsize=128)
def _twiddles(n, inverse):
    sign = 1.0 if inverse else -1.0
    out = []
    size = 2
    while size <= n:
        half = size // 2
        out.append(_frozen(np.exp(sign * 2j * np.pi * np.arange(half) / size)))
        size *= 2
    return tuple(out)


def _as_columns(x):
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 0:
        raise ValueError("expected a vector, got a scalar")
    return x, x.reshape(x.shape[0], -1)


def fft(x, inverse=False):
    """Unitary DFT along axis 0 (iterative radix-2 decimation in time).

    Forward: ``X[j] = n**-0.5 * sum_k x[k] exp(-2j*pi*j*k/n)``; ``inverse``
    flips the exponent sign, giving the adjoint.
    """
    x, cols = _as_columns(x)
    n = cols.shape[0]
    require_pow2(n, "FFT")
    k = cols.shape[1]
    X = cols[_bit_reversal(n)]
    size = 2
    for tw in _twiddles(n, bool(inverse)):
        half = size // 2
        X = X.reshape(n // size, size, k)
        even = X[:, :half]
        odd = X[:, half:] * tw[None, :, None]
        X = np.concatenate((even + odd, even - odd), axis=1)
        size *= 2
    return X.reshape(x.shape) / np.sqrt(n)


def fwht(x):
    """Orthonormal Walsh-Hadamard transform in natural (Sylvester) order."""
    x, cols = _as_columns(x)
    n = cols.shape[0]
    require_pow2(n, "Hadamard transform")
    k = cols.shape[1]
    X = cols
    h = 1
    while h < n:
        X = X.reshape(n // (2 * h), 2, h, k)
        a = X[:, 0]
        b = X[:, 1]
        X = np.stack((a + b, a - b), axis=1)
        h *= 2
    return X.reshape(x.shape) / np.sqrt(n)


@lru_cache(maxsize=64)
def _dct_tables(n):
    k = np.arange(n)
    shift = np.exp(-1j * np.pi * k / (2 * n))
    weight = np.full(n, np.sqrt(2.0 / n))
    weight[0] = np.sqrt(1.0 / n)
    # even samples ascending, then odd samples descending
    order = np.concatenate((np.arange(0, n, 2), np.arange(n - 1, 0, -2)))
    return _frozen(shift), _frozen(weight), _frozen(order)


def _dct_real(cols):
    n = cols.shape[0]
    shift, weight, order = _dct_tables(n)
    V = fft(cols[order]) * np.sqrt(n)
    return (shift[:, None] * V).real * weight[:, None]


def _idct_real(cols):
    n = cols.shape[0]
    shift, weight, order = _dct_tables(n)
    Y = cols / weight[:, None]
    Yrev = np.zeros_like(Y)
    Yrev[1:] = Y[:0:-1]
    V = np.conj(shift)[:, None] * (Y - 1j * Yrev)
    v = fft(V, inverse=True).real * np.sqrt(n) / n
    out = np.empty_like(v)
    out[order] = v
    return out


def dct2(x):
    """Orthonormal type-II DCT along axis 0, computed with one FFT."""
    x, cols = _as_columns(x)
    require_pow2(cols.shape[0], "DCT-II")
    out = _dct_real(cols.real) + 1j * _dct_real(cols.imag)
    return out.reshape(x.shape)


def idct2(x):
    """Inverse (= adjoint = transpose) of :func:`dct2`."""
    x, cols = _as_columns(x)
    require_pow2(cols.shape[0], "DCT-II")
    out = _idct_real(cols.real) + 1j * _idct_real(cols.imag)
    return out.reshape(x.shape)


def _check_blocks(n, block):
    if block < 1 or n % block:
        raise ValueError(f"block DCT needs n divisible by the block size, got n={n}, block={block}")
    require_pow2(block, "block DCT block")


def block_dct2(x, block=8, inverse=False):
    x, cols = _as_columns(x)
    n, k = cols.shape
    _check_blocks(n, block)
    nb = n // block
    # (nb, block, k) -> (block, nb*k) so every block is one column
    stacked = cols.reshape(nb, block, k).transpose(1, 0, 2).reshape(block, nb * k)
    out = idct2(stacked) if inverse else dct2(stacked)
    out = out.reshape(block, nb, k).transpose(1, 0, 2).reshape(n, k)
    return out.reshape(x.shape)


def haar(x):
    """Orthonormal Haar analysis: coarsest average first, finest details last."""
    x, cols = _as_columns(x)
    n = cols.shape[0]
    require_pow2(n, "Haar transform")
    out = np.empty_like(cols)
    cur = cols
    while cur.shape[0] > 1:
        half = cur.shape[0] // 2
        even, odd = cur[0::2], cur[1::2]
        out[half : 2 * half] = (even - odd) * _SQRT1_2
        cur = (even + odd) * _SQRT1_2
    out[0] = cur[0]
    return out.reshape(x.shape)


def ihaar(x):
    """Haar synthesis, the transpose of :func:`haar`.

    Doubling step: ``W*_{2h} = [W*_h kron [1,1]^T | I_h kron [1,-1]^T] / sqrt 2``.
    """
    x, cols = _as_columns(x)
    n = cols.shape[0]
    require_pow2(n, "Haar transform")
    cur = cols[:1]
    h = 1
    while h < n:
        detail = cols[h : 2 * h]
        nxt = np.empty((2 * h, cols.shape[1]), dtype=np.complex128)
        nxt[0::2] = (cur + detail) * _SQRT1_2
        nxt[1::2] = (cur - detail) * _SQRT1_2
        cur = nxt
        h *= 2
    return cur.reshape(x.shape)
