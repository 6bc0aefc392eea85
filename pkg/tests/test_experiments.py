import math

import numpy as np
import pytest

from modframe import experiments as ex
from modframe import models, sequences
from modframe.experiments import ExperimentConfig


def test_attc_channel():
    x = ex.attc_channel(1024)
    assert np.count_nonzero(x) == 6
    for k, v in {0: 1, 2: 0.3162, 17: 0.1995, 36: 0.1296, 75: 0.1, 137: 0.1}.items():
        assert x[k] == v
    assert ex.attc_channel(138)[137] == 0.1
    with pytest.raises(ValueError, match="138"):
        ex.attc_channel(137)


def test_awgn():
    y = np.arange(1, 9) + 1j
    np.testing.assert_array_equal(ex.add_awgn(y, math.inf, 0), y)
    ratios = [np.linalg.norm(ex.add_awgn(y, 0.0, s) - y) ** 2 / np.linalg.norm(y) ** 2 for s in range(10**4)]
    assert 0.98 <= np.mean(ratios) <= 1.02
    np.testing.assert_array_equal(ex.add_awgn(y, 10.0, 5), ex.add_awgn(y, 10.0, 5))
    with pytest.raises(ValueError, match="zero signal"):
        ex.add_awgn(np.zeros(4), 10.0, 0)


def test_config_validation():
    with pytest.raises(ValueError, match="unknown experiment"):
        ExperimentConfig("fig9")
    with pytest.raises(ValueError, match="positive integers"):
        ExperimentConfig("phase-transition", m=(0, 16))
    with pytest.raises(ValueError, match="trials"):
        ExperimentConfig("phase-transition", trials=0)
    with pytest.raises(ValueError, match="solver"):
        ExperimentConfig("phase-transition", solver="lasso")
    with pytest.raises(ValueError, match="model 'ofdm'"):
        ex.run(ExperimentConfig("ofdm", model="rd"))
    cfg = ExperimentConfig("phase-transition", n=64, m=16, s=2)
    assert cfg.n == (64,) and cfg.snr_db == (math.inf,)


def test_ofdm_sweep():
    cfg = ExperimentConfig("ofdm", model="ofdm", n=1024, m=64, s=6, snr_db=(0, 10, 20, 30), trials=100)
    rows = ex.run(cfg)
    assert len(rows) == 4
    rates = [r["success_rate"] for r in rows]
    assert all(b >= a - 0.03 for a, b in zip(rates, rates[1:]))
    assert rows[-1]["success_rate"] >= 0.9 and rows[-1]["median_nmse_db"] <= -20
    assert all(r["papr_golay"] <= 2 for r in rows)


def test_random_pilot_papr_exceeds_golay():
    golay = sequences.papr(models.golay_lambda(10))
    wins = sum(sequences.papr(models.pilot_sequence("random", 10, seed)) > golay for seed in range(100))
    assert wins >= 95


def test_ofdm_schemes_run():
    cfg = ExperimentConfig("ofdm", model="ofdm", n=256, m=32, s=6, snr_db=30, trials=3,
                           schemes=ex.OFDM_SCHEMES)
    rows = ex.run(cfg)
    assert [r["scheme"] for r in rows] == list(ex.OFDM_SCHEMES)


def test_phase_transition_full_sampling():
    for mid in ("asub", "golay-conv"):
        cfg = ExperimentConfig("phase-transition", model=mid, n=32, m=32, s=1, trials=20)
        assert ex.run(cfg)[0]["success_rate"] == 1.0


def _half_contour(rows):
    ms = [r["m"] for r in rows]
    rates = [r["success_rate"] for r in rows]
    for i in range(1, len(ms)):
        if rates[i] >= 0.5 > rates[i - 1]:
            return ms[i - 1] + (0.5 - rates[i - 1]) / (rates[i] - rates[i - 1]) * (ms[i] - ms[i - 1])
    raise AssertionError(f"no 50% crossing in {rates}")


def test_phase_transition_trend_and_gaussian_baseline():
    grid = dict(n=256, m=(8, 16, 32, 64), s=4, trials=200)
    rd = ex.run(ExperimentConfig("phase-transition", model="rd", **grid))
    gauss = ex.run(ExperimentConfig("phase-transition", model="gaussian", **grid))
    for rows in (rd, gauss):
        rates = [r["success_rate"] for r in rows]
        assert all(b >= a - 0.03 for a, b in zip(rates, rates[1:]))
    a, b = _half_contour(rd), _half_contour(gauss)
    assert abs(a - b) <= 0.25 * b


def test_custom_model_factory():
    calls = []

    def factory(n, m, seed):
        calls.append(seed)
        return ex.gaussian_model(n, m, seed)

    cfg = ExperimentConfig("phase-transition", model="custom", n=32, m=16, s=1, trials=4, base_seed=10)
    rows = ex.run_phase_transition(cfg, model_factory=factory)
    assert calls == [10, 11, 12, 13] and rows[0]["model"] == "custom"


def test_basis_compatibility_gap():
    cfg = ExperimentConfig("basis-compat", n=256, m=64, s=4, trials=200)
    rows = {(r["basis"], r["scheme"]): r["success_rate"] for r in ex.run(cfg)}
    assert rows[("identity", "D+R")] > 0.9
    assert rows[("fourier", "D+R")] < 0.2
    assert rows[("fourier", "D+R+Golay-PM")] > 0.9
    assert rows[("fourier", "R+R")] > 0.9
    assert len(rows) == 12


def test_coherence_report():
    rows = ex.run(ExperimentConfig("coherence"))
    assert len(rows) == 8 * 5
    assert all(r["pass"] for r in rows)
    for r in rows:
        if r["basis"] == "identity":
            assert abs(r["mu"] - 2 ** (-r["d"] / 2)) < 1e-8
        if r["basis"] == "fourier":
            assert r["mu"] <= math.sqrt(2) * 2 ** (-r["d"] / 2) + 1e-8


def test_csv_round_trip(tmp_path):
    cfg = ExperimentConfig("ofdm", model="ofdm", n=256, m=32, s=6, snr_db=(10, 30), trials=4)
    rows = ex.run(cfg)
    path = tmp_path / "out.csv"
    ex.write_csv(rows, path, cfg)
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").split("\n")
    assert lines[0].startswith("# ") and "sigma^2" in lines[0]
    assert lines[1].startswith("scheme,n,m,s,snr_db")
    meta, back = ex.read_csv(path)
    assert back == rows
    assert meta["base_seed"] == 0 and meta["snr_db"] == [10.0, 30.0]
    coh = ex.run(ExperimentConfig("coherence", d=(3,), bases=("identity", "haar")))
    assert ex.parse_csv(ex.to_csv(coh))[1] == coh


def test_float_format():
    assert ex._fmt(1 / 3) == "0.333333333"
    assert ex._fmt(None) == "" and ex._fmt(True) == "true" and ex._fmt(math.inf) == "inf"


def test_rerun_and_parallel_give_identical_bytes():
    base = dict(n=64, m=(16, 32), s=(2, 4), trials=12, base_seed=3)
    serial = ex.to_csv(ex.run(ExperimentConfig("phase-transition", **base)),
                       ExperimentConfig("phase-transition", **base))
    again = ex.to_csv(ex.run(ExperimentConfig("phase-transition", **base)),
                      ExperimentConfig("phase-transition", **base))
    par_cfg = ExperimentConfig("phase-transition", workers=2, **base)
    parallel = ex.to_csv(ex.run(par_cfg), par_cfg)
    assert serial == again == parallel
