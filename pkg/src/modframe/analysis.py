"""Coherence and restricted-isometry diagnostics."""

from dataclasses import dataclass
from itertools import combinations, islice
from math import comb
from typing import Optional

import numpy as np

from modframe import _rng
from modframe import operators as ops
from modframe.models import synthesis
from modframe.sequences import ModulationSeq, rudin_shapiro_pair

COHERENCE_BASES = ("identity", "fourier", "dct2", "block_dct", "haar")
MAX_EXACT_SUPPORTS = 10**6


@dataclass(frozen=True)
class CoherenceReport:
    mu: float
    bound: Optional[float]
    n: int
    basis_kind: str
    passes: Optional[bool]


@dataclass(frozen=True)
class RicReport:
    s: int
    delta_s: float
    method: str
    supports_evaluated: int
    worst_support: tuple


def coherence(M):
    """Largest entry magnitude of a dense matrix."""
    return float(np.max(np.abs(np.asarray(M))))


def operator_coherence(op, max_n=4096, chunk=256):
    """Coherence of an implicit operator, scanning columns in fast-apply batches."""
    if max(op.shape) > max_n:
        raise ValueError(f"operator of shape {op.shape} exceeds max_n={max_n}")
    mu = 0.0
    for start in range(0, op.cols, chunk):
        idx = np.arange(start, min(start + chunk, op.cols))
        mu = max(mu, float(np.max(np.abs(ops.columns(op, idx)))))
    return mu


def _is_rudin_shapiro(v):
    n = v.size
    d = n.bit_length() - 1
    if n != 2**d:
        return False
    pair = rudin_shapiro_pair(d)
    return any(
        np.array_equal(v, sign * ref.values) for ref in (pair.a, pair.b) for sign in (1, -1)
    )


def lemma_bound(psi_kind, n, rudin_shapiro=True):
    if psi_kind == "identity":
        return 1.0 / np.sqrt(n)
    if psi_kind == "fourier":
        return np.sqrt(2.0 / n)
    if psi_kind in ("dct2", "block_dct"):
        return 2.0 / np.sqrt(n)
    if psi_kind == "haar":
        return np.sqrt(2.0 / n) if rudin_shapiro else None
    raise ValueError(f"no coherence bound for basis {psi_kind!r}; choose from {COHERENCE_BASES}")


def modulated_coherence(lam, psi_kind, block=8, max_n=4096):
    """``mu(F Lambda T*)`` for the analysis transform ``T`` named ``psi_kind``.

    The attached bound is the Golay coherence bound for that basis; the Haar
    bound only holds for Rudin-Shapiro sequences and is ``None`` otherwise.
    """
    v = lam.values if isinstance(lam, ModulationSeq) else np.asarray(lam, dtype=np.complex128)
    n = v.size
    B = ops.compose(ops.fourier(n), ops.diagonal(v, "Lambda"), synthesis(psi_kind, n, block))
    mu = operator_coherence(B, max_n=max_n)
    bound = lemma_bound(psi_kind, n, rudin_shapiro=_is_rudin_shapiro(v))
    passes = None if bound is None else bool(mu <= bound + 1e-12)
    return CoherenceReport(mu, None if bound is None else float(bound), n, psi_kind, passes)


# --- Hermitian eigenvalues --------------------------------------------------


def jacobi_eigvalsh(G, tol=1e-12, max_sweeps=60):
    """Eigenvalues of a batch of Hermitian matrices by cyclic Jacobi rotations.

    ``G`` has shape ``(..., s, s)``; returns ascending eigenvalues ``(..., s)``.
    Each ``(p, q)`` step first rotates the phase of ``G[p, q]`` away, then
    applies the real symmetric Jacobi rotation that zeroes it.
    """
    G = np.array(G, dtype=np.complex128)
    shape = G.shape
    s = shape[-1]
    A = G.reshape(-1, s, s).copy()
    scale = np.maximum(np.linalg.norm(A, axis=(1, 2)), 1e-300)
    pairs = [(p, q) for p in range(s - 1) for q in range(p + 1, s)]
    for _ in range(max_sweeps):
        diag_sq = np.sum(np.abs(np.diagonal(A, axis1=1, axis2=2)) ** 2, axis=1)
        off = np.sqrt(np.maximum(np.sum(np.abs(A) ** 2, axis=(1, 2)) - diag_sq, 0.0))
        if np.all(off <= tol * scale):
            break
        for p, q in pairs:
            apq = A[:, p, q]
            b = np.abs(apq)
            active = b > 1e-300
            phase = np.where(active, apq / np.where(active, b, 1.0), 1.0)
            app = A[:, p, p].real
            aqq = A[:, q, q].real
            theta = np.where(active, (aqq - app) / (2.0 * np.where(active, b, 1.0)), 0.0)
            t = np.where(active, np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
            t = np.where(active & (theta == 0.0), 1.0, t)
            c = 1.0 / np.sqrt(t**2 + 1.0)
            sn = t * c
            # J acts on columns (p, q): [c, s; -s e^{-i phi}, c e^{-i phi}]
            ph = np.conj(phase)
            Jpp, Jpq, Jqp, Jqq = c, sn, -sn * ph, c * ph
            colp = A[:, :, p].copy()
            colq = A[:, :, q].copy()
            A[:, :, p] = colp * Jpp[:, None] + colq * Jqp[:, None]
            A[:, :, q] = colp * Jpq[:, None] + colq * Jqq[:, None]
            rowp = A[:, p, :].copy()
            rowq = A[:, q, :].copy()
            A[:, p, :] = np.conj(Jpp)[:, None] * rowp + np.conj(Jqp)[:, None] * rowq
            A[:, q, :] = np.conj(Jpq)[:, None] * rowp + np.conj(Jqq)[:, None] * rowq
    w = np.sort(np.diagonal(A, axis1=1, axis2=2).real, axis=1)
    return w.reshape(shape[:-1])


def _support_deltas(cols, supports):
    """``max |eig(M_S* M_S) - 1|`` for each row of ``supports`` (indices into ``cols``)."""
    sub = cols[:, supports]  # m x B x s
    gram = np.einsum("mbi,mbj->bij", sub.conj(), sub)
    w = jacobi_eigvalsh(gram)
    return np.maximum(np.abs(w[:, 0] - 1.0), np.abs(w[:, -1] - 1.0))


def _scan(cols, support_iter, batch=20000):
    best = -1.0
    worst = ()
    count = 0
    while True:
        block = np.array(list(islice(support_iter, batch)), dtype=np.int64)
        if block.size == 0:
            break
        deltas = _support_deltas(cols, block)
        count += len(block)
        i = int(np.argmax(deltas))
        if deltas[i] > best:
            best = float(deltas[i])
            worst = tuple(int(j) for j in block[i])
    return best, worst, count


def exact_ric(M, s, max_supports=MAX_EXACT_SUPPORTS):
    """Exact ``delta_s`` by enumerating every size-``s`` support of a dense matrix."""
    M = np.asarray(M, dtype=np.complex128)
    n = M.shape[1]
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    total = comb(n, s)
    if total > max_supports:
        raise ValueError(
            f"C({n},{s}) = {total} supports exceeds the enumeration guard {max_supports}; "
            "use empirical_ric to sample supports instead"
        )
    delta, worst, count = _scan(M, combinations(range(n), s))
    return RicReport(s, delta, "exact", count, worst)


def empirical_ric(A, s, num_supports, seed):
    """Lower bound on ``delta_s`` over uniformly sampled supports of an operator.

    When ``num_supports`` covers every support, all supports are enumerated
    and the result equals :func:`exact_ric`.
    """
    n = A.cols
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    if num_supports >= comb(n, s):
        cols = ops.materialize(A)
        delta, worst, count = _scan(cols, combinations(range(n), s))
        return RicReport(s, delta, "sampled", count, worst)
    rng = _rng.generator(seed, "supports")
    supports = np.sort(
        np.array([rng.choice(n, size=s, replace=False) for _ in range(num_supports)]), axis=1
    )
    used, local = np.unique(supports, return_inverse=True)
    cols = ops.columns(A, used)
    local = local.reshape(supports.shape)
    delta, worst_local, count = _scan(cols, iter(local))
    worst = tuple(int(used[j]) for j in worst_local)
    return RicReport(s, delta, "sampled", count, worst)
