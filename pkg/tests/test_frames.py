from fractions import Fraction

import numpy as np
import pytest

from modframe import frames
from modframe import operators as ops
from modframe.operators import SubsampleSet

GRID = [2, 4, 8]


def omega_in(q, p, seed):
    rng = np.random.default_rng(seed)
    return SubsampleSet.from_indices(rng.choice(q, p, replace=False), q)


def all_utfs():
    out = []
    for m in GRID:
        for q in GRID:
            out.append(frames.p1(m, q))
        for L in GRID:
            out.append(frames.p2(m, L))
            out.append(frames.p3(m, L))
    for q in GRID:
        for p in (1, q // 2, q):
            for L in GRID:
                for base in ("fourier", "hadamard"):
                    out.append(frames.p4(p, q, L, omega_in(q, p, q * p + L), base))
    for n in (4, 16, 64):
        for m in (1, n // 4, n // 2):
            for base in ("fourier", "hadamard"):
                out.append(frames.partial_unitary(omega_in(n, m, n + m), base))
    return out


def test_every_construction_is_a_utf():
    utfs = all_utfs()
    assert len(utfs) == 99
    for utf in utfs:
        chk = frames.verify_utf(utf)
        assert chk.is_utf, (utf.kind, utf.shape, chk)
        assert chk.max_column_norm_dev < 1e-10 and chk.max_row_gram_dev < 1e-10
        m, N = utf.shape
        assert utf.frame_bound == Fraction(N, m)


def test_tight_frame_identity():
    rng = np.random.default_rng(0)
    for utf in all_utfs():
        m, N = utf.shape
        x = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        # the frame vectors are the columns of U, so sum_i |<v_i, x>|^2 = ||U* x||^2
        energy = np.linalg.norm(utf.op.apply_adjoint(x)) ** 2
        assert abs(energy - N / m * np.linalg.norm(x) ** 2) < 1e-9 * max(1.0, energy)


def test_p1_materialized():
    M = ops.materialize(frames.p1(2, 2).op)
    np.testing.assert_array_equal(M, [[1, 1, 0, 0], [0, 0, 1, 1]])


def test_p3_singular_values():
    s = np.linalg.svd(ops.materialize(frames.p3(2, 3).op), compute_uv=False)
    np.testing.assert_allclose(s, [np.sqrt(3), np.sqrt(3)], atol=1e-12)


def test_partial_fourier_rows_orthonormal():
    om = SubsampleSet((0, 3, 5, 6), 8)
    U = ops.materialize(frames.partial_unitary(om).op)
    rows = np.sqrt(4 / 8) * U
    np.testing.assert_allclose(rows @ rows.conj().T, np.eye(4), atol=1e-12)
    F = np.exp(-2j * np.pi * np.outer(np.arange(8), np.arange(8)) / 8) / np.sqrt(8)
    np.testing.assert_allclose(rows, F[list(om.indices)], atol=1e-12)


@pytest.mark.parametrize("m,L", [(2, 2), (4, 8), (8, 4)])
def test_fast_p2_p4_match_dense(m, L):
    F = np.exp(-2j * np.pi * np.outer(np.arange(m), np.arange(m)) / m) / np.sqrt(m)
    P2 = ops.materialize(frames.p2(m, L).op)
    np.testing.assert_allclose(P2, np.kron(np.ones((1, L)), F.conj().T), atol=1e-12)
    q, p = m, max(1, m // 2)
    om = omega_in(q, p, 7)
    Fq = np.exp(-2j * np.pi * np.outer(np.arange(q), np.arange(q)) / q) / np.sqrt(q)
    expect = np.sqrt(q / p) * np.kron(np.eye(L), Fq[list(om.indices)])
    np.testing.assert_allclose(ops.materialize(frames.p4(p, q, L, om).op), expect, atol=1e-12)


def test_verify_utf_negative_cases():
    assert frames.verify_utf(ops.identity(8)).is_utf
    M = np.eye(4)
    M[:, 2] = 0
    chk = frames.verify_utf(ops.dense(M))
    assert not chk.is_utf and abs(chk.max_column_norm_dev - 1.0) < 1e-15
    G = np.random.default_rng(1).standard_normal((4, 16))
    chk = frames.verify_utf(ops.dense(G))
    assert not chk.is_utf
    # row Gram of a Gaussian matrix is far from a scaled identity: eigen oracle
    w = np.linalg.eigvalsh(G @ G.T)
    assert w[-1] / w[0] > 1.5


def test_bad_parameters():
    with pytest.raises(ValueError):
        frames.p4(3, 4, 2, omega_in(4, 2, 0))
    with pytest.raises(ValueError):
        frames.partial_unitary(SubsampleSet((0, 1), 8), base="dct")
    with pytest.raises(TypeError):
        frames.partial_unitary((0, 1))
    with pytest.raises(ValueError, match="unknown UTF kind"):
        frames.build_utf("p9")
    assert frames.build_utf("p1", m=2, q=3).shape == (2, 6)
