"""Matrix-free linear operators and the algebra the sensing models are built from.

A :class:`LinearOperator` maps ``C^cols -> C^rows`` and knows its adjoint.
Inputs are a single vector ``(cols,)`` or a batch of columns ``(cols, k)``;
batching lets diagnostics materialise matrices with one vectorised apply
instead of ``cols`` Python-level calls.

Operators are immutable: every constructor captures read-only copies of its
data, so instances can be shared freely between threads.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from modframe import transforms
from modframe.transforms import is_pow2, require_pow2

DEFAULT_MAX_ENTRIES = 2**22

ORTHOBASIS_KINDS = ("identity", "fourier", "permuted_fourier", "hadamard", "dct2", "block_dct", "haar")


def _readonly(a, dtype=np.complex128):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


class LinearOperator:
    """A lazily evaluated ``rows x cols`` complex matrix.

    ``forward`` and ``adjoint`` receive a complex array whose first axis has
    the right length and must return an array whose first axis is ``rows``
    (resp. ``cols``), preserving any trailing batch axis.
    """

    def __init__(self, rows, cols, forward, adjoint, name="op"):
        if rows < 1 or cols < 1:
            raise ValueError(f"operator dimensions must be positive, got {rows}x{cols}")
        self.rows = int(rows)
        self.cols = int(cols)
        self._forward = forward
        self._adjoint = adjoint
        self.name = name

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __repr__(self):
        return f"LinearOperator({self.name}, {self.rows}x{self.cols})"

    @staticmethod
    def _check(v, n, what):
        v = np.asarray(v, dtype=np.complex128)
        if v.ndim not in (1, 2) or v.shape[0] != n:
            raise ValueError(f"{what} expects an input of length {n}, got shape {v.shape}")
        return v

    def apply(self, v):
        return self._forward(self._check(v, self.cols, self.name))

    def apply_adjoint(self, v):
        return self._adjoint(self._check(v, self.rows, self.name + "*"))

    @property
    def H(self):
        return LinearOperator(self.cols, self.rows, self._adjoint, self._forward, _adjoint_name(self.name))

    def __matmul__(self, other):
        if isinstance(other, LinearOperator):
            return compose(self, other)
        return self.apply(other)

    def __mul__(self, c):
        return scaled(self, c)

    __rmul__ = __mul__


def _adjoint_name(name):
    return name[:-1] if name.endswith("*") else name + "*"


@dataclass(frozen=True)
class SubsampleSet:
    """Strictly increasing index set ``Omega`` inside ``[0, n)``."""

    indices: tuple
    n: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if self.n < 1:
            raise ValueError(f"ambient dimension must be positive, got {self.n}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("subsample indices must be strictly increasing (no duplicates)")
        if idx and (idx[0] < 0 or idx[-1] >= self.n):
            raise ValueError(f"subsample indices must lie in [0, {self.n})")

    @classmethod
    def from_indices(cls, indices, n):
        """Build from an unordered collection; duplicates are still an error."""
        idx = sorted(int(i) for i in indices)
        return cls(tuple(idx), n)

    @property
    def m(self):
        return len(self.indices)

    @property
    def array(self):
        return np.array(self.indices, dtype=np.int64)

    def __len__(self):
        return len(self.indices)


# --- plain function forms -------------------------------------------------


def fft_unitary(v, inverse=False):
    return transforms.fft(v, inverse=inverse)


def orthobasis_apply(kind, v, adjoint=False, block=8):
    op = orthobasis(kind, np.shape(v)[0], block=block)
    return op.apply_adjoint(v) if adjoint else op.apply(v)


def circulant_apply(r, v):
    r = np.asarray(r)
    v = np.asarray(v)
    if r.shape[0] != v.shape[0]:
        raise ValueError(f"circulant generator has length {r.shape[0]} but input has length {v.shape[0]}")
    return circulant(r).apply(v)


def subsample_apply(omega, v, adjoint=False):
    op = subsample(omega)
    return op.apply_adjoint(v) if adjoint else op.apply(v)


# --- constructors ---------------------------------------------------------


def identity(n):
    return LinearOperator(n, n, lambda v: v.copy(), lambda v: v.copy(), "I")


def dense(M, name="M"):
    M = _readonly(M)
    if M.ndim != 2:
        raise ValueError("dense operator needs a 2-D matrix")
    MH = _readonly(M.conj().T)
    return LinearOperator(M.shape[0], M.shape[1], lambda v: M @ v, lambda v: MH @ v, name)


def diagonal(d, name="diag"):
    d = _readonly(d)
    if d.ndim != 1 or d.size == 0:
        raise ValueError("diagonal needs a non-empty 1-D vector")
    dc = _readonly(d.conj())

    def fwd(v):
        return d * v if v.ndim == 1 else d[:, None] * v

    def adj(v):
        return dc * v if v.ndim == 1 else dc[:, None] * v

    return LinearOperator(d.size, d.size, fwd, adj, name)


def subsample(omega):
    """``R_Omega``: keep entries in ``omega`` (forward) or zero-fill (adjoint)."""
    idx = omega.array
    n, m = omega.n, omega.m
    if m == 0:
        raise ValueError("subsample set is empty")

    def adj(v):
        out = np.zeros((n,) + v.shape[1:], dtype=np.complex128)
        out[idx] = v
        return out

    return LinearOperator(m, n, lambda v: v[idx], adj, "R")


def fourier(n):
    return LinearOperator(n, n, transforms.fft, lambda v: transforms.fft(v, inverse=True), "F")


def interleaved_frequencies(n):
    """Frequency labels ``0, +1, -1, +2, -2, ..., n/2`` reduced mod ``n``."""
    require_pow2(n, "permuted DFT")
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    labels = [0]
    for k in range(1, n // 2):
        labels += [k, -k]
    labels.append(n // 2)
    return np.mod(np.array(labels, dtype=np.int64), n)


def permuted_fourier(n):
    """DFT with columns reordered by interleaved frequency label.

    Column ``c`` is ``exp(-2j*pi*j*k_c/n)/sqrt(n)`` with ``k_c`` from
    :func:`interleaved_frequencies`.  Since ``F`` is symmetric this is
    ``F @ P`` with ``P`` scattering entry ``c`` to position ``k_c``.
    """
    perm = _readonly(interleaved_frequencies(n), np.int64)

    def fwd(v):
        w = np.empty_like(v)
        w[perm] = v
        return transforms.fft(w)

    def adj(u):
        return transforms.fft(u, inverse=True)[perm]

    return LinearOperator(n, n, fwd, adj, "F~")


def dft(n, permuted=False):
    """Unitary DFT of any length.

    Power-of-two lengths use the radix-2 kernel; other lengths fall back to
    an explicit ``O(n^2)`` matrix (only small diagnostic sizes need this).
    """
    if is_pow2(n):
        return permuted_fourier(n) if permuted else fourier(n)
    j = np.arange(n)
    if permuted:
        labels = [0]
        for k in range(1, (n + 1) // 2):
            labels += [k, -k]
        if n % 2 == 0:
            labels.append(n // 2)
        k = np.array(labels)
    else:
        k = j
    M = np.exp(-2j * np.pi * np.outer(j, k) / n) / np.sqrt(n)
    return dense(M, "F~" if permuted else "F")


def hadamard(n):
    return LinearOperator(n, n, transforms.fwht, transforms.fwht, "H")


def dct(n):
    require_pow2(n, "DCT-II")
    return LinearOperator(n, n, transforms.dct2, transforms.idct2, "C")


def block_dct(n, block=8):
    transforms._check_blocks(n, block)
    return LinearOperator(
        n,
        n,
        lambda v: transforms.block_dct2(v, block),
        lambda v: transforms.block_dct2(v, block, inverse=True),
        "C^",
    )


def haar(n):
    require_pow2(n, "Haar transform")
    return LinearOperator(n, n, transforms.haar, transforms.ihaar, "W")


def orthobasis(kind, n, block=8):
    """Analysis operator of a named orthonormal basis; ``.H`` is its synthesis."""
    if kind == "identity":
        return identity(n)
    if kind == "fourier":
        require_pow2(n, "fourier basis")
        return fourier(n)
    if kind == "permuted_fourier":
        return permuted_fourier(n)
    if kind == "hadamard":
        require_pow2(n, "hadamard basis")
        return hadamard(n)
    if kind == "dct2":
        return dct(n)
    if kind == "block_dct":
        return block_dct(n, block)
    if kind == "haar":
        return haar(n)
    raise ValueError(f"unknown basis kind {kind!r}; choose from {ORTHOBASIS_KINDS}")


def circulant(r):
    """``H_r`` (first column ``r``) applied as ``sqrt(n) F* diag(F r) F``."""
    r = np.asarray(r, dtype=np.complex128)
    n = r.shape[0]
    require_pow2(n, "circulant")
    spec = _readonly(transforms.fft(r) * np.sqrt(n))
    spec_c = _readonly(spec.conj())

    def _mul(s, v):
        V = transforms.fft(v)
        V = s * V if V.ndim == 1 else s[:, None] * V
        return transforms.fft(V, inverse=True)

    return LinearOperator(n, n, lambda v: _mul(spec, v), lambda v: _mul(spec_c, v), "H_r")


def scaled(op, c, name=None):
    c = complex(c)
    cc = c.conjugate()
    if c.imag == 0:
        c = cc = c.real
    return LinearOperator(
        op.rows, op.cols, lambda v: c * op._forward(v), lambda v: cc * op._adjoint(v), name or f"{c}*{op.name}"
    )


def compose(*ops, name=None):
    """Lazy product ``ops[0] @ ops[1] @ ... @ ops[-1]`` (rightmost applied first)."""
    if len(ops) == 1 and not isinstance(ops[0], LinearOperator):
        ops = tuple(ops[0])
    if not ops:
        raise ValueError("compose needs at least one operator")
    for i, (left, right) in enumerate(zip(ops, ops[1:])):
        if left.cols != right.rows:
            raise ValueError(
                f"cannot compose {left.name} ({left.rows}x{left.cols}) with "
                f"{right.name} ({right.rows}x{right.cols}) at position {i}"
            )
    ops = tuple(ops)

    def fwd(v):
        return reduce(lambda acc, op: op._forward(acc), reversed(ops), v)

    def adj(v):
        return reduce(lambda acc, op: op._adjoint(acc), ops, v)

    name = name or "".join(op.name if len(op.name) < 3 else f"({op.name})" for op in ops)
    return LinearOperator(ops[0].rows, ops[-1].cols, fwd, adj, name)


def op_compose(ops):
    return compose(*ops)


def kron_identity(L, op, name=None):
    """``I_L kron op``: apply ``op`` independently to ``L`` consecutive blocks."""
    p, q = op.rows, op.cols

    def _blocks(v, size_in, f):
        k = v.shape[1] if v.ndim == 2 else 1
        stacked = v.reshape(L, size_in, k).transpose(1, 0, 2).reshape(size_in, L * k)
        out = f(stacked)
        size_out = out.shape[0]
        out = out.reshape(size_out, L, k).transpose(1, 0, 2).reshape(L * size_out, k)
        return out if v.ndim == 2 else out[:, 0]

    return LinearOperator(
        L * p,
        L * q,
        lambda v: _blocks(v, q, op._forward),
        lambda v: _blocks(v, p, op._adjoint),
        name or f"I{L}x{op.name}",
    )


def repeat_row(L, op, name=None):
    """``1_L^T kron op`` = ``[op op ... op]``; forward sums blocks before one apply."""
    p, q = op.rows, op.cols

    def fwd(v):
        return op._forward(v.reshape((L, q) + v.shape[1:]).sum(axis=0))

    def adj(u):
        w = op._adjoint(u)
        return np.concatenate([w] * L, axis=0)

    return LinearOperator(p, L * q, fwd, adj, name or f"1{L}x{op.name}")


def materialize(op, max_entries=DEFAULT_MAX_ENTRIES, chunk=4096):
    """Dense ``rows x cols`` matrix whose column ``j`` is ``op.apply(e_j)``."""
    if op.rows * op.cols > max_entries:
        raise ValueError(
            f"materialising {op.rows}x{op.cols} exceeds the soft limit of {max_entries} entries; "
            "pass a larger max_entries to override"
        )
    out = np.empty((op.rows, op.cols), dtype=np.complex128)
    for start in range(0, op.cols, chunk):
        stop = min(start + chunk, op.cols)
        E = np.zeros((op.cols, stop - start), dtype=np.complex128)
        E[np.arange(start, stop), np.arange(stop - start)] = 1.0
        out[:, start:stop] = op.apply(E)
    return out


op_materialize = materialize


def columns(op, idx):
    """Columns ``op.apply(e_j)`` for ``j`` in ``idx`` as an ``rows x len(idx)`` array."""
    idx = np.asarray(idx, dtype=np.int64)
    E = np.zeros((op.cols, idx.size), dtype=np.complex128)
    E[idx, np.arange(idx.size)] = 1.0
    return op.apply(E)
