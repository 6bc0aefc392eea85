"""Greedy sparse recovery on implicit operators: OMP and subspace pursuit."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from modframe import operators as ops
from modframe.operators import SubsampleSet

NMSE_FLOOR_DB = -300.0


class RankDeficientError(np.linalg.LinAlgError):
    def __init__(self, rank, size):
        super().__init__(f"support columns are rank deficient: numerical rank {rank} < {size}")
        self.rank = rank
        self.size = size


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    xhat: np.ndarray
    support: SubsampleSet
    residual_norm: float
    iterations: int
    converged: bool


class _ColumnCache:
    """Columns ``A e_j`` extracted on demand, one batched forward apply per miss set."""

    def __init__(self, A):
        self.A = A
        self._cols = {}

    def get(self, idx):
        idx = [int(j) for j in idx]
        missing = [j for j in idx if j not in self._cols]
        if missing:
            block = ops.columns(self.A, missing)
            for k, j in enumerate(missing):
                self._cols[j] = block[:, k]
        if not idx:
            return np.zeros((self.A.rows, 0), dtype=np.complex128)
        return np.stack([self._cols[j] for j in idx], axis=1)


def _lstsq_columns(AS, y):
    """Least squares through a column-pivoted QR; raises on rank deficiency."""
    k = AS.shape[1]
    if k == 0:
        return np.zeros(0, dtype=np.complex128)
    if k > AS.shape[0]:
        raise RankDeficientError(AS.shape[0], k)
    Q, R, piv = scipy.linalg.qr(AS, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = max(AS.shape) * np.finfo(float).eps * diag[0]
    rank = int(np.sum(diag > tol))
    if rank < k:
        raise RankDeficientError(rank, k)
    z = np.empty(k, dtype=np.complex128)
    z[piv] = scipy.linalg.solve_triangular(R, Q.conj().T @ y)
    return z


def lsq_on_support(A, y, S):
    """``argmin_z ||y - A_S z||`` with the ``|S|`` columns pulled out by forward applies."""
    idx = S.indices if isinstance(S, SubsampleSet) else tuple(S)
    y = np.asarray(y, dtype=np.complex128)
    return _lstsq_columns(ops.columns(A, idx), y)


def _top(values, s):
    # stable sort on -|v|: ties go to the lowest index
    return np.sort(np.argsort(-np.abs(values), kind="stable")[:s])


def _result(A, y, n, support, coef, iterations, converged):
    xhat = np.zeros(n, dtype=np.complex128)
    xhat[list(support)] = coef
    res = float(np.linalg.norm(y - A.apply(xhat)))
    xhat.setflags(write=False)
    return RecoveryResult(xhat, SubsampleSet(tuple(sorted(support)), n), res, iterations, converged)


def omp(A, y, s, max_iter=None):
    """Orthogonal matching pursuit with at most ``s`` atoms."""
    y = np.asarray(y, dtype=np.complex128)
    m, n = A.shape
    if not 1 <= s <= m:
        raise ValueError(f"need 1 <= s <= m, got s={s}, m={m}")
    max_iter = s if max_iter is None else min(max_iter, s)
    cache = _ColumnCache(A)
    stop = 1e-10 * np.linalg.norm(y)
    support = []
    coef = np.zeros(0, dtype=np.complex128)
    r = y.copy()
    it = 0
    converged = np.linalg.norm(r) <= stop
    while it < max_iter and not converged:
        corr = np.abs(A.apply_adjoint(r))
        corr[support] = -1.0
        j = int(np.argmax(corr))
        support.append(j)
        AS = cache.get(support)
        coef = _lstsq_columns(AS, y)
        r = y - AS @ coef
        it += 1
        converged = np.linalg.norm(r) <= stop
    order = np.argsort(support)
    return _result(A, y, n, [support[i] for i in order], coef[order], it, bool(converged or it == s))


def subspace_pursuit(A, y, s, max_iter=50):
    """Subspace pursuit: expand by ``s`` correlated atoms, refit, prune back to ``s``.

    A round is accepted only when it lowers the residual norm, so the
    residual sequence is non-increasing.
    """
    y = np.asarray(y, dtype=np.complex128)
    m, n = A.shape
    if not 1 <= s <= m:
        raise ValueError(f"need 1 <= s <= m, got s={s}, m={m}")
    cache = _ColumnCache(A)
    stop = 1e-10 * np.linalg.norm(y)

    def fit(T):
        AS = cache.get(T)
        z = _lstsq_columns(AS, y)
        return z, y - AS @ z

    T = _top(A.apply_adjoint(y), s)
    coef, r = fit(T)
    rnorm = np.linalg.norm(r)
    it = 0
    converged = rnorm <= stop
    while it < max_iter and not converged:
        it += 1
        ranked = np.argsort(-np.abs(A.apply_adjoint(r)), kind="stable")
        # at most m columns can be fitted, so cap the expansion at m - s
        fresh = ranked[~np.isin(ranked, T)][: min(s, m - s)]
        grown = np.union1d(T, fresh)
        b, _ = fit(grown)
        T_new = grown[_top(b, s)]
        coef_new, r_new = fit(T_new)
        rnorm_new = np.linalg.norm(r_new)
        if rnorm_new >= rnorm:
            converged = True
            break
        T, coef, r, rnorm = T_new, coef_new, r_new, rnorm_new
        converged = rnorm <= stop
    return _result(A, y, n, list(T), coef, it, bool(converged))


def nmse(x, xhat):
    """``10 log10(||x - xhat||^2 / ||x||^2)`` in dB, floored at -300 dB."""
    x = np.asarray(x, dtype=np.complex128)
    xhat = np.asarray(xhat, dtype=np.complex128)
    if x.shape != xhat.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {xhat.shape}")
    ref = np.linalg.norm(x) ** 2
    if ref == 0:
        raise ValueError("NMSE is undefined for a zero reference signal")
    err = np.linalg.norm(x - xhat) ** 2 / ref
    if err == 0:
        return NMSE_FLOOR_DB
    return max(NMSE_FLOOR_DB, float(10.0 * np.log10(err)))
