"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import time

import numpy as np
import pytest
import scipy.linalg

from modframe import analysis, experiments, frames, models, sequences
from modframe import operators as ops
from modframe.experiments import ExperimentConfig
from modframe.operators import SubsampleSet

from oracles import random_direction_ric

pytestmark = pytest.mark.acceptance


def test_1_golay_pairs(verdict):
    t0 = time.perf_counter()
    worst_ratio = 0.0
    ok = True
    for d in range(1, 15):
        pair = sequences.rudin_shapiro_pair(d)
        chk = sequences.verify_golay_pair(pair.a, pair.b)
        peak = sequences.golay_poly_max(pair.a)
        ok &= chk.ok and peak <= np.sqrt(2 * pair.n) + 1e-9
        worst_ratio = max(worst_ratio, peak / np.sqrt(2 * pair.n))
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 10
    verdict(1, ok, f"d=1..14 complementary, max |A|/sqrt(2n)={worst_ratio:.6f}, {elapsed:.1f}s")
    assert ok


def test_2_coherence_bounds(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    ok = True
    for d in range(3, 11):
        lam = models.golay_lambda(d)
        for psi in ("fourier", "dct2", "block_dct", "haar"):
            rep = analysis.modulated_coherence(lam, psi)
            ok &= rep.mu <= rep.bound + 1e-12
            worst = max(worst, rep.mu / rep.bound)
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    verdict(2, ok, f"d=3..10 x 4 bases, max mu/bound={worst:.6f}, {elapsed:.1f}s")
    assert ok


def test_3_utf_constructions(verdict):
    worst = 0.0
    count = 0
    ok = True
    rng = np.random.default_rng(0)
    grid = (2, 4, 8)
    utfs = []
    for m in grid:
        for q in grid:
            utfs.append(frames.p1(m, q))
        for L in grid:
            utfs += [frames.p2(m, L), frames.p3(m, L)]
    for q in grid:
        for p in sorted({1, q // 2, q}):
            for L in grid:
                om = SubsampleSet.from_indices(rng.choice(q, p, replace=False), q)
                utfs += [frames.p4(p, q, L, om, "fourier"), frames.p4(p, q, L, om, "hadamard")]
    for n in (8, 64, 512):
        om = SubsampleSet.from_indices(rng.choice(n, n // 4, replace=False), n)
        utfs += [frames.partial_unitary(om, "fourier"), frames.partial_unitary(om, "hadamard")]
    for utf in utfs:
        chk = frames.verify_utf(utf)
        ok &= chk.is_utf and max(chk.max_column_norm_dev, chk.max_row_gram_dev) < 1e-10
        worst = max(worst, chk.max_column_norm_dev, chk.max_row_gram_dev)
        count += 1
    verdict(3, ok, f"{count} frames (P1-P4, partial Fourier/Hadamard), max deviation={worst:.2e}")
    assert ok


def test_4_exact_ric_vs_direction_oracle(verdict):
    worst_gap = 0.0
    worst_excess = -np.inf
    for seed in range(20):
        M = ops.materialize(models.random_demodulation(6, 2, seed).A)
        exact = analysis.exact_ric(M, 2).delta_s
        oracle = random_direction_ric(M, 2, draws=100_000, seed=seed)
        worst_gap = max(worst_gap, abs(exact - oracle))
        worst_excess = max(worst_excess, oracle - exact)
    ok = worst_gap <= 1e-9 and worst_excess <= 1e-9
    verdict(4, ok, f"n=12 m=6 s=2, 20 seeds, max |exact-oracle|={worst_gap:.1e}, max excess={worst_excess:.1e}")
    assert ok


def test_5_ric_trend(verdict):
    means = []
    for m in (8, 16, 32):
        vals = [
            analysis.exact_ric(ops.materialize(models.random_demodulation(m, 64 // m, seed).A), 2).delta_s
            for seed in range(25)
        ]
        means.append(float(np.mean(vals)))
    ok = means[0] > means[1] > means[2]
    verdict(5, ok, "mean delta_2 at m=8,16,32: " + ", ".join(f"{v:.4f}" for v in means))
    assert ok


def test_6_papr(verdict):
    golay = {n: sequences.papr(models.golay_lambda(int(np.log2(n)))) for n in (64, 256, 1024)}
    rad = np.median([sequences.papr(sequences.random_diagonal("rademacher", 1024, s)) for s in range(200)])
    ok = all(v <= 2 for v in golay.values()) and rad > 4
    detail = ", ".join(f"n={n}: {v:.4f}" for n, v in golay.items())
    verdict(6, ok, f"Golay PAPR {detail}; median Rademacher PAPR n=1024: {rad:.3f}")
    assert ok


def test_7_basis_compatibility(verdict):
    t0 = time.perf_counter()
    cfg = ExperimentConfig("basis-compat", n=256, m=64, s=4, trials=200, bases=("identity", "fourier"),
                           schemes=("D+R", "D+R+Golay-PM"), solver="sp")
    rates = {(r["basis"], r["scheme"]): r["success_rate"] for r in experiments.run(cfg)}
    elapsed = time.perf_counter() - t0
    ok = (
        rates[("fourier", "D+R")] < 0.2
        and rates[("fourier", "D+R+Golay-PM")] > 0.9
        and rates[("identity", "D+R")] > 0.9
        and rates[("identity", "D+R+Golay-PM")] > 0.9
        and elapsed < 300
    )
    detail = ", ".join(f"{b}/{s}={v:.3f}" for (b, s), v in rates.items())
    verdict(7, ok, f"{detail}, {elapsed:.1f}s")
    assert ok


def test_8_ofdm(verdict):
    t0 = time.perf_counter()
    cfg = ExperimentConfig("ofdm", model="ofdm", n=1024, m=64, s=6, snr_db=(0, 10, 20, 30), trials=100,
                           solver="sp")
    rows = experiments.run(cfg)
    elapsed = time.perf_counter() - t0
    rates = [r["success_rate"] for r in rows]
    top = rows[-1]
    monotone = all(b >= a - 0.03 for a, b in zip(rates, rates[1:]))
    ok = top["success_rate"] >= 0.9 and top["median_nmse_db"] <= -20 and monotone and elapsed < 300
    verdict(8, ok, f"success by SNR {rates}, median NMSE at 30 dB={top['median_nmse_db']:.2f} dB, {elapsed:.1f}s")
    assert ok


def test_9_operator_algebra(verdict):
    rng = np.random.default_rng(9)
    checks = 0
    failures = []

    def check(name, cond):
        nonlocal checks
        checks += 1
        if not cond:
            failures.append(name)

    def crandn(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    for n in (2, 4, 8, 16, 32, 64, 256, 1024):
        for kind in ops.ORTHOBASIS_KINDS:
            if kind == "block_dct" and n % 8:
                continue
            op = ops.orthobasis(kind, n)
            for _ in range(10):
                v = crandn(n)
                w = op.apply(v)
                check(f"unitary {kind} {n}", abs(np.linalg.norm(w) - np.linalg.norm(v)) <= 1e-11 * np.linalg.norm(v))
                check(f"round trip {kind} {n}", np.allclose(op.apply_adjoint(w), v, atol=1e-11, rtol=0))
                u = crandn(n)
                lhs, rhs = np.vdot(u, op.apply(v)), np.vdot(op.apply_adjoint(u), v)
                check(f"adjoint {kind} {n}", abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs)))
            if n <= 64:
                M = ops.materialize(op)
                v = crandn(n)
                check(f"materialize {kind} {n}", np.allclose(M @ v, op.apply(v), atol=1e-10, rtol=0))
    for n in (2, 4, 8, 16, 32):
        r, v = crandn(n), crandn(n)
        check(f"circulant {n}", np.allclose(ops.circulant_apply(r, v), scipy.linalg.circulant(r) @ v, atol=1e-10, rtol=0))
    for trial in range(50):
        n = 2 ** int(rng.integers(3, 8))
        kinds = rng.choice(["fourier", "hadamard", "dct2", "haar", "block_dct"], 2)
        om = SubsampleSet.from_indices(rng.choice(n, n // 2, replace=False), n)
        chain = [ops.subsample(om), ops.orthobasis(kinds[0], n), ops.diagonal(crandn(n)),
                 ops.circulant(crandn(n)), ops.orthobasis(kinds[1], n).H]
        op = ops.compose(*chain)
        dense = ops.materialize(chain[0])
        for f in chain[1:]:
            dense = dense @ ops.materialize(f)
        v, u = crandn(n), crandn(n // 2)
        check(f"compose {trial}", np.allclose(op.apply(v), dense @ v, atol=1e-10, rtol=0))
        lhs, rhs = np.vdot(u, op.apply(v)), np.vdot(op.apply_adjoint(u), v)
        check(f"compose adjoint {trial}", abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs)))
    ok = not failures
    verdict(9, ok, f"{checks - len(failures)}/{checks} property checks passed" + (f"; first failure {failures[0]}" if failures else ""))
    assert ok


def test_10_determinism(verdict):
    configs = [
        dict(kind="ofdm", model="ofdm", n=256, m=32, s=6, snr_db=(10, 30), trials=8,
             schemes=("golay", "random-phase")),
        dict(kind="phase-transition", model="rd", n=64, m=(16, 32), s=(2, 4), trials=10),
        dict(kind="basis-compat", n=64, m=16, s=2, trials=6),
        dict(kind="coherence", d=(3, 4, 5)),
    ]
    ok = True
    for kw in configs:
        texts = []
        for workers in (1, 1, 2):
            cfg = ExperimentConfig(base_seed=17, workers=workers, **kw)
            texts.append(experiments.to_csv(experiments.run(cfg), cfg).encode("utf-8"))
        ok &= texts[0] == texts[1] == texts[2]
    verdict(10, ok, f"{len(configs)} experiment kinds rerun serially and with 2 workers, byte-identical CSV")
    assert ok
