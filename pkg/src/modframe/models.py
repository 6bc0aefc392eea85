"""Sensing models of the form ``A = U D B``.

``U`` is a unit-norm tight frame, ``D = diag(xi)`` a random modulation and
``B`` a column-orthonormal (usually unitary) matrix.  Every builder returns
a :class:`SensingModel` whose ``A`` is a lazy composition of fast operators,
together with the three factors so diagnostics can inspect them separately.

Sparsifying bases are named by their analysis transform (``"fourier"``,
``"dct2"``, ``"haar"``, ...); the model uses the synthesis operator
``Psi = T*`` so that a signal ``alpha = Psi x`` is sparse in ``x``.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from modframe import _rng
from modframe import frames
from modframe import operators as ops
from modframe.frames import UtfOperator
from modframe.operators import LinearOperator, SubsampleSet
from modframe.sequences import ModulationSeq, random_diagonal, rudin_shapiro_pair
from modframe.transforms import is_pow2, require_pow2

MODEL_IDS = ("rd", "rp", "cmux", "asub", "bdiag", "golay-conv", "ofdm")
PSI_KINDS = ("identity", "fourier", "dct2", "block_dct", "haar", "hadamard")


@dataclass(frozen=True)
class SensingModel:
    A: LinearOperator
    utf: UtfOperator
    diag: ModulationSeq
    basis: LinearOperator
    basis_desc: str
    name: str

    @property
    def dims(self):
        """``(m, N, n)``: measurements, frame length, signal length."""
        return (self.A.rows, self.basis.rows, self.A.cols)

    @property
    def shape(self):
        return self.A.shape

    def factor_product(self, max_entries=ops.DEFAULT_MAX_ENTRIES):
        """Dense ``U @ diag(xi) @ B`` built from separately materialised factors."""
        U = ops.materialize(self.utf.op, max_entries)
        B = ops.materialize(self.basis, max_entries)
        return U @ (self.diag.values[:, None] * B)


def assemble(utf, diag, basis, basis_desc, name):
    m, N = utf.op.shape
    if len(diag) != N or basis.rows != N:
        raise ValueError(
            f"factor sizes do not chain: U is {m}x{N}, diag has {len(diag)}, B is {basis.rows}x{basis.cols}"
        )
    A = ops.compose(utf.op, ops.diagonal(diag.values, "D"), basis, name=name)
    return SensingModel(A, utf, diag, basis, basis_desc, name)


def synthesis(psi, n, block=8):
    """``Psi = T*`` for the analysis transform named ``psi``."""
    if psi not in PSI_KINDS:
        raise ValueError(f"unknown sparsifying basis {psi!r}; choose from {PSI_KINDS}")
    return ops.orthobasis(psi, n, block=block).H


def _diag(diag, kind, n, seed):
    if diag is None:
        return random_diagonal(kind, n, seed)
    if not isinstance(diag, ModulationSeq):
        diag = ModulationSeq(diag, "custom")
    if len(diag) != n:
        raise ValueError(f"diagonal must have length {n}, got {len(diag)}")
    return diag


# --- subsampling patterns -------------------------------------------------


def contiguous_omega(n, m, start=0):
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    return SubsampleSet(tuple(range(start, start + m)), n)


def stride_omega(n, m):
    if not 1 <= m <= n or n % m:
        raise ValueError(f"uniform stride needs m dividing n, got m={m}, n={n}")
    return SubsampleSet(tuple(range(0, n, n // m)), n)


def random_omega(n, m, seed):
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    rng = _rng.generator(seed, "omega")
    return SubsampleSet.from_indices(rng.choice(n, size=m, replace=False), n)


def load_omega(path, n):
    """Whitespace/comma separated integer indices from a text file."""
    text = Path(path).read_text().replace(",", " ").split()
    return SubsampleSet.from_indices([int(t) for t in text], n)


def make_omega(layout, n, m, seed=0):
    if layout == "contiguous":
        return contiguous_omega(n, m)
    if layout == "stride":
        return stride_omega(n, m)
    if layout == "random":
        return random_omega(n, m, seed)
    return load_omega(layout, n)


# --- builders -------------------------------------------------------------


def random_demodulation(m, q, seed, lam=None, psi=None, diag_kind="rademacher", diag=None):
    """``A = P1 Sigma F~`` or, given a tail, ``A = P1 Sigma F Lambda Psi``.

    ``lam`` is a unimodular ``ModulationSeq`` (or ``None`` for identity) and
    ``psi`` a basis name; passing either switches to the tailed form.
    """
    n = m * q
    utf = frames.p1(m, q)
    sigma = _diag(diag, diag_kind, n, seed)
    if lam is None and psi is None:
        basis = ops.dft(n, permuted=True)
        desc = "F~"
    else:
        require_pow2(n, "random demodulation with a basis tail")
        factors = [ops.fourier(n)]
        desc = "F"
        if lam is not None:
            factors.append(ops.diagonal(_lam_values(lam, n), "Lambda"))
            desc += "*Lambda"
        factors.append(synthesis(psi or "identity", n))
        desc += f"*Psi[{psi or 'identity'}]"
        basis = ops.compose(*factors, name=desc)
    return assemble(utf, sigma, basis, desc, "rd")


def random_probing(m, q, L, seed, diag=None):
    """``A = P2 diag(g) (I_L kron F_(1:q))`` with complex Gaussian probes."""
    require_pow2(m, "random probing")
    if not 1 <= q <= m:
        raise ValueError(f"random probing needs 1 <= q <= m, got q={q}, m={m}")
    utf = frames.p2(m, L)
    g = _diag(diag, "gaussian", m * L, seed)
    F = ops.fourier(m)

    def first_cols(v):
        pad = np.zeros((m,) + v.shape[1:], dtype=np.complex128)
        pad[:q] = v
        return F._forward(pad)

    block = LinearOperator(m, q, first_cols, lambda u: F._adjoint(u)[:q], "F(1:q)")
    Q = ops.kron_identity(L, block, name="Q")
    return assemble(utf, g, Q, "I_L kron F(1:q)", "rp")


def compressive_multiplexing(m, L, seed, channel_bases=("fourier",), diag=None):
    """``A = P3 diag(sigma) (I_L kron Psi_i)``; each channel basis applied forward.

    ``channel_bases`` holds one basis name, reused for all ``L`` channels, or
    ``L`` names.  The default reproduces ``[Sigma_0 ... Sigma_{L-1}] (I kron F)``.
    """
    require_pow2(m, "compressive multiplexing")
    names = tuple(channel_bases)
    if len(names) == 1:
        names = names * L
    if len(names) != L:
        raise ValueError(f"need 1 or {L} channel bases, got {len(names)}")
    utf = frames.p3(m, L)
    sigma = _diag(diag, "rademacher", m * L, seed)
    if len(set(names)) == 1:
        basis = ops.kron_identity(L, ops.orthobasis(names[0], m), name="B")
    else:
        basis = _block_diag([ops.orthobasis(b, m) for b in names])
    return assemble(utf, sigma, basis, "blockdiag(" + ",".join(names) + ")", "cmux")


def _block_diag(blocks):
    rows = [b.rows for b in blocks]
    cols = [b.cols for b in blocks]
    r_off = np.cumsum([0] + rows)
    c_off = np.cumsum([0] + cols)

    def fwd(v):
        return np.concatenate([b._forward(v[c_off[i] : c_off[i + 1]]) for i, b in enumerate(blocks)])

    def adj(u):
        return np.concatenate([b._adjoint(u[r_off[i] : r_off[i + 1]]) for i, b in enumerate(blocks)])

    return LinearOperator(int(r_off[-1]), int(c_off[-1]), fwd, adj, "B")


def arbitrary_subsampled(omega, base="fourier", psi="identity", seed=0, diag_kind="rademacher", diag=None):
    """``A = sqrt(n/m) R_Omega E D Psi`` for any fixed row set ``Omega``."""
    n = omega.n
    require_pow2(n, "arbitrary subsampling")
    utf = frames.partial_unitary(omega, base)
    xi = _diag(diag, diag_kind, n, seed)
    return assemble(utf, xi, synthesis(psi, n), f"Psi[{psi}]", "asub")


def block_diagonal(p, q, L, omega, seed, psi="identity", base="fourier", diag_kind="rademacher", diag=None):
    """``A = P4 diag(xi) Psi``: ``L`` independent ``p x q`` blocks ``sqrt(q/p) R E diag(xi_i)``."""
    require_pow2(q, "block diagonal")
    if not 1 <= p <= q:
        raise ValueError(f"block diagonal needs 1 <= p <= q, got p={p}, q={q}")
    utf = frames.p4(p, q, L, omega, base)
    xi = _diag(diag, diag_kind, q * L, seed)
    return assemble(utf, xi, synthesis(psi, q * L), f"Psi[{psi}]", "bdiag")


def _lam_values(lam, n):
    v = lam.values if isinstance(lam, ModulationSeq) else np.asarray(lam, dtype=np.complex128)
    if v.size != n:
        raise ValueError(f"phase modulation must have length {n}, got {v.size}")
    if np.max(np.abs(np.abs(v) - 1.0)) > 1e-9:
        raise ValueError("phase modulation must be unimodular")
    return v


def golay_lambda(d, member="a"):
    pair = rudin_shapiro_pair(d)
    return pair.a if member == "a" else pair.b


def golay_convolutional(omega, golay_d, seed, psi="identity", lam="golay", diag_kind="rademacher", diag=None):
    """``A = sqrt(n/m) R_Omega F* D F Lambda Psi``.

    ``lam="golay"`` pre-modulates with the Rudin-Shapiro ``a`` sequence;
    ``lam="none"`` gives the plain partial random circulant
    ``(1/sqrt m) R_Omega H_eps Psi`` with ``eps = F* xi``.  A ``ModulationSeq``
    is used as given.
    """
    n = 2**golay_d
    if omega.n != n:
        raise ValueError(f"omega must live in [0, {n}) for golay_d={golay_d}, got n={omega.n}")
    utf = frames.partial_unitary(omega, "inverse_fourier")
    xi = _diag(diag, diag_kind, n, seed)
    factors = [ops.fourier(n)]
    desc = "F"
    if isinstance(lam, ModulationSeq):
        factors.append(ops.diagonal(_lam_values(lam, n), "Lambda"))
        desc += "*Lambda"
    elif lam == "golay":
        factors.append(ops.diagonal(golay_lambda(golay_d).values, "Lambda"))
        desc += "*Lambda[golay]"
    elif lam != "none":
        raise ValueError(f"lam must be 'golay', 'none' or a ModulationSeq, got {lam!r}")
    factors.append(synthesis(psi, n))
    desc += f"*Psi[{psi}]"
    basis = ops.compose(*factors, name=desc)
    return assemble(utf, xi, basis, desc, "golay-conv")


def ofdm_model(n, m, golay_d, seed, pilot="golay", diag_kind="rademacher", diag=None):
    """``A = P1 Sigma F* Lambda F``: random demodulator after a pilot-modulated channel.

    ``pilot`` is ``"golay"`` (Rudin-Shapiro ``a``), ``"random"`` (seeded
    random phases, an independent stream from the chipping sequence),
    ``"none"`` or an explicit unimodular ``ModulationSeq``.
    """
    if n != 2**golay_d:
        raise ValueError(f"n must equal 2**golay_d, got n={n}, golay_d={golay_d}")
    if m < 1 or n % m:
        raise ValueError(f"m must divide n, got m={m}, n={n}")
    q = n // m
    utf = frames.p1(m, q)
    sigma = _diag(diag, diag_kind, n, seed)
    lam = pilot_sequence(pilot, golay_d, seed)
    F = ops.fourier(n)
    basis = ops.compose(F.H, ops.diagonal(lam.values, "Lambda"), F, name="F*LambdaF")
    return assemble(utf, sigma, basis, f"F* Lambda[{lam.kind}] F", "ofdm")


def pilot_sequence(pilot, d, seed=0):
    n = 2**d
    if isinstance(pilot, ModulationSeq):
        _lam_values(pilot, n)
        return pilot
    if pilot == "golay":
        return golay_lambda(d)
    if pilot == "random":
        return random_diagonal("steinhaus", n, _pilot_seed(seed))
    if pilot == "none":
        return ModulationSeq(np.ones(n), "ones")
    raise ValueError(f"unknown pilot {pilot!r}")


def _pilot_seed(seed):
    return int(_rng.generator(seed, "pilot").integers(0, 2**63))


# --- id-based factory used by the CLI and the experiments ----------------


def build_model(model_id, n, m, seed, *, psi="identity", lam=None, L=None, omega="contiguous", base="fourier"):
    """Build a model from its short id at signal length ``n`` and ``m`` measurements.

    ``lam=None`` means no modulation for ``rd`` and the Golay modulation for
    ``golay-conv`` and ``ofdm``.  ``L=None`` picks ``n // m`` probes for ``rp``
    and two blocks for ``bdiag``.
    """
    if model_id == "rd":
        if n % m:
            raise ValueError(f"rd needs m dividing n, got m={m}, n={n}")
        if psi == "identity" and lam in ("none", None):
            return random_demodulation(m, n // m, seed)
        lam_seq = golay_lambda(_log2(n)) if lam == "golay" else None
        return random_demodulation(m, n // m, seed, lam=lam_seq, psi=psi)
    if model_id == "rp":
        L = L or max(1, n // m)
        if n % L:
            raise ValueError(f"rp needs L dividing n, got L={L}, n={n}")
        return random_probing(m, n // L, L, seed)
    if model_id == "cmux":
        if n % m:
            raise ValueError(f"cmux needs m dividing n, got m={m}, n={n}")
        return compressive_multiplexing(m, n // m, seed)
    if model_id == "asub":
        return arbitrary_subsampled(make_omega(omega, n, m, seed), base, psi, seed)
    if model_id == "bdiag":
        L = L or 2
        if n % L or m % L:
            raise ValueError(f"bdiag needs L dividing n and m, got L={L}, n={n}, m={m}")
        q, p = n // L, m // L
        return block_diagonal(p, q, L, make_omega(omega, q, p, seed), seed, psi, base)
    if model_id == "golay-conv":
        return golay_convolutional(make_omega(omega, n, m, seed), _log2(n), seed, psi, lam or "golay")
    if model_id == "ofdm":
        return ofdm_model(n, m, _log2(n), seed, pilot="golay" if lam in (None, "golay") else "none")
    raise ValueError(f"unknown model id {model_id!r}; choose from {MODEL_IDS}")


def _log2(n):
    if not is_pow2(n):
        raise ValueError(f"n must be a power of two, got {n}")
    return n.bit_length() - 1
