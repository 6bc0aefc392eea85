"""Unit-norm tight frames (UTFs) used as the left factor of ``A = U D B``.

A ``m x N`` matrix is a UTF when its columns have unit norm and the rows of
``sqrt(m/N) U`` are orthonormal, i.e. ``U U* = (N/m) I``.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from modframe import operators as ops
from modframe.operators import LinearOperator, SubsampleSet

UTF_KINDS = ("p1", "p2", "p3", "p4", "partial_unitary")


@dataclass(frozen=True)
class UtfOperator:
    op: LinearOperator
    frame_bound: Fraction
    kind: str

    @property
    def shape(self):
        return self.op.shape


class UtfCheck(NamedTuple):
    is_utf: bool
    max_column_norm_dev: float
    max_row_gram_dev: float


def _base(kind, n):
    if kind == "fourier":
        return ops.fourier(n)
    if kind == "inverse_fourier":
        return ops.fourier(n).H
    if kind == "hadamard":
        return ops.hadamard(n)
    raise ValueError(f"base must be 'fourier', 'inverse_fourier' or 'hadamard', got {kind!r}")


def integrator(m, q):
    """``P1 = I_m kron 1_q^T``: sums each run of ``q`` consecutive samples."""
    if m < 1 or q < 1:
        raise ValueError(f"integrator needs m, q >= 1, got m={m}, q={q}")

    def fwd(v):
        return v.reshape((m, q) + v.shape[1:]).sum(axis=1)

    def adj(u):
        return np.repeat(u, q, axis=0)

    return LinearOperator(m, m * q, fwd, adj, "P1")


def p1(m, q):
    return UtfOperator(integrator(m, q), Fraction(q), "p1")


def p2(m, L):
    """``P2 = 1_L^T kron F*`` with an ``m``-point DFT."""
    op = ops.repeat_row(L, ops.fourier(m).H, name="P2")
    return UtfOperator(op, Fraction(L), "p2")


def p3(m, L):
    op = ops.repeat_row(L, ops.identity(m), name="P3")
    return UtfOperator(op, Fraction(L), "p3")


def p4(p, q, L, omega, base="fourier"):
    """``P4 = sqrt(q/p) I_L kron (R_Omega E)`` with ``|Omega| = p`` inside ``[q]``."""
    _check_omega(omega, q, p)
    block = ops.compose(ops.subsample(omega), _base(base, q))
    op = ops.scaled(ops.kron_identity(L, block), np.sqrt(q / p), name="P4")
    return UtfOperator(op, Fraction(q, p), "p4")


def partial_unitary(omega, base="fourier"):
    """``sqrt(n/m) R_Omega E``: any row subset of a unitary matrix, rescaled."""
    if not isinstance(omega, SubsampleSet):
        raise TypeError("omega must be a SubsampleSet")
    n, m = omega.n, omega.m
    _check_omega(omega, n, m)
    op = ops.scaled(ops.compose(ops.subsample(omega), _base(base, n)), np.sqrt(n / m), name="U")
    return UtfOperator(op, Fraction(n, m), "partial_unitary")


def _check_omega(omega, n, m):
    if not isinstance(omega, SubsampleSet):
        raise TypeError("omega must be a SubsampleSet")
    if omega.n != n:
        raise ValueError(f"omega lives in [0, {omega.n}) but the transform has size {n}")
    if omega.m != m or m < 1:
        raise ValueError(f"omega must have {m} indices, got {omega.m}")


def build_utf(kind, *, m=None, q=None, L=None, p=None, omega=None, base="fourier"):
    if kind == "p1":
        return p1(m, q)
    if kind == "p2":
        return p2(m, L)
    if kind == "p3":
        return p3(m, L)
    if kind == "p4":
        return p4(p, q, L, omega, base)
    if kind == "partial_unitary":
        return partial_unitary(omega, base)
    raise ValueError(f"unknown UTF kind {kind!r}; choose from {UTF_KINDS}")


def verify_utf(op, tol=1e-10):
    """Check unit columns and ``(m/N) U U* = I`` using ``m`` adjoint applies."""
    if isinstance(op, UtfOperator):
        op = op.op
    m, N = op.shape
    UH = op.apply_adjoint(np.eye(m, dtype=np.complex128))  # N x m, equals U*
    col_norms = np.linalg.norm(UH, axis=1)
    col_dev = float(np.max(np.abs(col_norms - 1.0)))
    gram = (m / N) * (UH.conj().T @ UH)
    gram_dev = float(np.max(np.abs(gram - np.eye(m))))
    return UtfCheck(col_dev <= tol and gram_dev <= tol, col_dev, gram_dev)
