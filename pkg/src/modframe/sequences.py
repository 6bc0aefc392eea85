"""Modulation sequences: seeded random diagonals and Rudin-Shapiro Golay pairs."""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from modframe import _rng, transforms

RANDOM_KINDS = ("rademacher", "steinhaus", "gaussian")
SEQ_KINDS = RANDOM_KINDS + ("golay_a", "golay_b", "ones", "custom")


@dataclass(frozen=True, eq=False)
class ModulationSeq:
    values: np.ndarray
    kind: str
    seed: Optional[int] = None

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("a modulation sequence is a non-empty 1-D vector")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, ModulationSeq):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.seed == other.seed
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True)
class GolayPair:
    a: ModulationSeq
    b: ModulationSeq

    @property
    def n(self):
        return len(self.a)


class GolayCheck(NamedTuple):
    ok: bool
    worst_k: int
    worst_sum: int


def random_diagonal(kind, n, seed):
    """i.i.d. zero-mean unit-variance entries, a pure function of ``(kind, n, seed)``."""
    if n < 1:
        raise ValueError(f"sequence length must be >= 1, got {n}")
    rng = _rng.generator(seed, "diag:" + kind)
    if kind == "rademacher":
        v = rng.integers(0, 2, size=n) * 2.0 - 1.0
    elif kind == "steinhaus":
        v = np.exp(2j * np.pi * rng.random(n))
    elif kind == "gaussian":
        v = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    else:
        raise ValueError(f"unknown random sequence kind {kind!r}; choose from {RANDOM_KINDS}")
    return ModulationSeq(v, kind, int(seed))


def ones(n):
    return ModulationSeq(np.ones(n), "ones")


def rudin_shapiro_pair(d):
    """Golay pair of length ``2**d`` from ``a, b = [1], [1]``; ``a, b <- [a|b], [a|-b]``."""
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    a = np.ones(1, dtype=np.int64)
    b = np.ones(1, dtype=np.int64)
    for _ in range(d):
        a, b = np.concatenate((a, b)), np.concatenate((a, -b))
    return GolayPair(ModulationSeq(a, "golay_a"), ModulationSeq(b, "golay_b"))


def _as_exact(x):
    """Integer copy when every entry is a real integer, float copy otherwise."""
    if isinstance(x, ModulationSeq):
        x = x.values
    x = np.asarray(x)
    if np.iscomplexobj(x):
        if np.any(x.imag != 0):
            raise ValueError("Golay checks need real (bipolar) sequences")
        x = x.real
    if np.all(np.mod(x, 1) == 0):
        return x.astype(np.int64)
    return x.astype(np.float64)


def aperiodic_autocorrelation(x):
    """``rho[k] = sum_j x[j] x[j+k]`` for ``k = 0..n-1`` (exact for integer input)."""
    x = _as_exact(x)
    n = x.size
    return np.correlate(x, x, mode="full")[n - 1 :]


def verify_golay_pair(a, b):
    a = _as_exact(a)
    b = _as_exact(b)
    if a.size != b.size:
        raise ValueError(f"Golay pair members must have equal length, got {a.size} and {b.size}")
    n = a.size
    total = aperiodic_autocorrelation(a) + aperiodic_autocorrelation(b)
    side = np.abs(total[1:])
    if side.size and side.max() > 0:
        k = int(np.argmax(side)) + 1
        return GolayCheck(False, k, total[k].item())
    if total[0] != 2 * n:
        return GolayCheck(False, 0, total[0].item())
    return GolayCheck(True, 0, 0)


def poly_on_grid(a, oversample=8):
    """``A(z) = sum_k a_k z^k`` at ``z_j = exp(-2j*pi*j/(oversample*n))``."""
    a = np.asarray(a.values if isinstance(a, ModulationSeq) else a, dtype=np.complex128)
    n = a.size
    size = oversample * n
    transforms.require_pow2(size, "polynomial grid")
    padded = np.zeros(size, dtype=np.complex128)
    padded[:n] = a
    return transforms.fft(padded) * np.sqrt(size)


def golay_poly_max(a, oversample=8):
    return float(np.max(np.abs(poly_on_grid(a, oversample))))


def papr(lam, tol=1e-9):
    """Peak-to-average power of the time-domain pilot ``F* lam``."""
    lam = np.asarray(lam.values if isinstance(lam, ModulationSeq) else lam, dtype=np.complex128)
    if np.max(np.abs(np.abs(lam) - 1.0)) > tol:
        raise ValueError("PAPR is defined for unimodular (phase-only) pilot sequences")
    p = transforms.fft(lam, inverse=True)
    power = np.abs(p) ** 2
    return float(power.max() / power.mean())
