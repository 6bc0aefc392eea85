"""Seeded Monte-Carlo experiments with CSV output.

Trial ``t`` of every experiment draws all of its randomness from
``base_seed + t``, so rows do not depend on how trials are scheduled.
"""

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial
from typing import Optional

import numpy as np

from modframe import _rng, analysis, models, recovery, sequences
from modframe import operators as ops

EXPERIMENT_KINDS = ("ofdm", "phase-transition", "basis-compat", "coherence")
SOLVERS = {"omp": recovery.omp, "sp": recovery.subspace_pursuit}
OFDM_SCHEMES = ("golay", "random-phase", "golay-rand")
COMPAT_SCHEMES = ("R+R", "D+R", "D+R+Golay-PM")
COMPAT_BASES = ("identity", "fourier", "dct2", "haar")
LEMMA_BASES = ("identity", "fourier", "dct2", "block_dct", "haar")

ATTC_TAPS = {0: 1.0, 2: 0.3162, 17: 0.1995, 36: 0.1296, 75: 0.1, 137: 0.1}
NOISE_LAW = "w ~ CN(0, sigma^2 I), sigma^2 = ||A x||^2 / (m * 10^(snr_db/10))"


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    model: str = "rd"
    n: tuple = (256,)
    m: tuple = (64,)
    s: tuple = (4,)
    snr_db: tuple = (math.inf,)
    trials: int = 100
    base_seed: int = 0
    solver: str = "sp"
    out: Optional[str] = None
    bases: tuple = ()
    schemes: tuple = ()
    d: tuple = tuple(range(3, 11))
    omega: str = "stride"
    workers: int = 1
    timing: bool = False

    def __post_init__(self):
        for name in ("n", "m", "s", "snr_db", "bases", "schemes", "d"):
            value = getattr(self, name)
            if np.isscalar(value) or isinstance(value, str):
                value = (value,)
            object.__setattr__(self, name, tuple(value))
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; choose from {EXPERIMENT_KINDS}")
        for name in ("n", "m", "s", "d"):
            values = getattr(self, name)
            if not values or any(int(v) != v or v < 1 for v in values):
                raise ValueError(f"{name} grid must hold positive integers, got {values}")
            object.__setattr__(self, name, tuple(int(v) for v in values))
        if any(math.isnan(float(v)) for v in self.snr_db):
            raise ValueError("snr_db grid must not contain NaN")
        object.__setattr__(self, "snr_db", tuple(float(v) for v in self.snr_db))
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials}")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; choose from {tuple(SOLVERS)}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    def echo(self):
        """JSON description of the run; execution-only fields are left out."""
        d = asdict(self)
        for key in ("out", "workers"):
            d.pop(key)
        d["snr_db"] = [_json_float(v) for v in self.snr_db]
        return d


def _json_float(v):
    return "inf" if math.isinf(v) and v > 0 else ("-inf" if math.isinf(v) else v)


def _round(v):
    """Round to the 9 significant digits used in the CSV so rows round-trip exactly."""
    return float(f"{v:.9g}")


# --- signals and noise ------------------------------------------------------


def attc_channel(n):
    """The 6-tap sparse ATTC static channel impulse response, zero-padded to ``n``."""
    if n < 138:
        raise ValueError(f"the ATTC channel has a tap at delay 137, so n must be >= 138, got {n}")
    x = np.zeros(n, dtype=np.complex128)
    for k, v in ATTC_TAPS.items():
        x[k] = v
    return x


def add_awgn(y, snr_db, seed):
    """Add circular complex Gaussian noise at ``snr_db`` relative to the mean power of ``y``."""
    y = np.asarray(y, dtype=np.complex128)
    if math.isinf(snr_db) and snr_db > 0:
        return y.copy()
    power = np.linalg.norm(y) ** 2
    if power == 0:
        raise ValueError("cannot set an SNR against a zero signal")
    sigma2 = power / (y.size * 10.0 ** (snr_db / 10.0))
    rng = _rng.generator(seed, "noise")
    w = rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
    return y + np.sqrt(sigma2 / 2.0) * w


def sparse_signal(n, s, seed):
    """Uniformly random support of size ``s`` with i.i.d. CN(0, 1) amplitudes."""
    rng = _rng.generator(seed, "signal")
    support = np.sort(rng.choice(n, size=s, replace=False))
    x = np.zeros(n, dtype=np.complex128)
    x[support] = (rng.standard_normal(s) + 1j * rng.standard_normal(s)) / np.sqrt(2.0)
    return x, tuple(int(j) for j in support)


def gaussian_model(n, m, seed):
    """Dense i.i.d. CN(0, 1/m) matrix, the unstructured baseline."""
    rng = _rng.generator(seed, "gaussian")
    G = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2.0 * m)
    return ops.dense(G)


def default_factory(model_id, n, m, seed, **kw):
    if model_id == "gaussian":
        return gaussian_model(n, m, seed)
    return models.build_model(model_id, n, m, seed, **kw).A


# --- trial bookkeeping -------------------------------------------------------


def _map(fn, items, workers):
    """Ordered map; the process pool only changes scheduling, never results."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _solve(solver, A, y, s):
    t0 = time.perf_counter()
    try:
        res = SOLVERS[solver](A, y, s)
    except recovery.RankDeficientError:
        res = None
    return res, 1e3 * (time.perf_counter() - t0)


def _aggregate(outcomes, timing):
    hits = [o[0] for o in outcomes]
    row = {"success_rate": _round(sum(hits) / len(hits))}
    nmses = sorted(o[1] for o in outcomes)
    row["median_nmse_db"] = _round(float(np.median(nmses)))
    row["mean_runtime_ms"] = _round(float(np.mean([o[2] for o in outcomes]))) if timing else None
    return row


def _recovery_trial(seed, *, factory, n, m, s, solver):
    A = factory(n, m, seed)
    x, support = sparse_signal(n, s, seed)
    res, ms = _solve(solver, A, A.apply(x), s)
    if res is None:
        return False, 0.0, ms
    return res.support.indices == support, recovery.nmse(x, res.xhat), ms


# --- experiments ------------------------------------------------------------


def ofdm_operator(scheme, n, m, seed):
    d = models._log2(n)
    if scheme == "golay":
        return models.ofdm_model(n, m, d, seed, pilot="golay").A
    if scheme == "random-phase":
        return models.ofdm_model(n, m, d, seed, pilot="random").A
    if scheme == "golay-rand":
        return models.golay_convolutional(models.random_omega(n, m, seed), d, seed).A
    raise ValueError(f"unknown OFDM scheme {scheme!r}; choose from {OFDM_SCHEMES}")


def _ofdm_trial(seed, *, scheme, n, m, s, snrs, solver):
    A = ofdm_operator(scheme, n, m, seed)
    x = attc_channel(n)
    support = tuple(sorted(ATTC_TAPS))
    clean = A.apply(x)
    out = []
    for snr in snrs:
        res, ms = _solve(solver, A, add_awgn(clean, snr, seed), s)
        if res is None:
            out.append((False, 0.0, ms))
        else:
            out.append((res.support.indices == support, recovery.nmse(x, res.xhat), ms))
    return out


def run_ofdm_experiment(cfg):
    """Pilot-based sparse channel estimation on the ATTC channel, one row per (scheme, SNR)."""
    if cfg.model != "ofdm":
        raise ValueError(f"the OFDM study needs model 'ofdm', got {cfg.model!r}")
    schemes = cfg.schemes or ("golay",)
    rows = []
    for n in cfg.n:
        d = models._log2(n)
        papr_golay = _round(sequences.papr(models.golay_lambda(d)))
        papr_random = _round(sequences.papr(models.pilot_sequence("random", d, cfg.base_seed)))
        for m in cfg.m:
            for s in cfg.s:
                for scheme in schemes:
                    fn = partial(_ofdm_trial, scheme=scheme, n=n, m=m, s=s, snrs=cfg.snr_db, solver=cfg.solver)
                    per_trial = _map(fn, [cfg.base_seed + t for t in range(cfg.trials)], cfg.workers)
                    for k, snr in enumerate(cfg.snr_db):
                        row = {"scheme": scheme, "n": n, "m": m, "s": s, "snr_db": snr}
                        row.update(_aggregate([trial[k] for trial in per_trial], cfg.timing))
                        row.update({"papr_golay": papr_golay, "papr_random": papr_random})
                        rows.append(row)
    return rows


def run_phase_transition(cfg, model_factory=None):
    """Noiseless exact-support success over an ``(n, m, s)`` grid.

    ``model_factory(n, m, seed)`` overrides the operator; by default the
    model id in ``cfg.model`` is built (``"gaussian"`` gives a dense baseline).
    """
    factory = model_factory or partial(default_factory, cfg.model)
    rows = []
    for n in cfg.n:
        for m in cfg.m:
            for s in cfg.s:
                if s > m:
                    raise ValueError(f"sparsity s={s} exceeds m={m}")
                fn = partial(_recovery_trial, factory=factory, n=n, m=m, s=s, solver=cfg.solver)
                out = _map(fn, [cfg.base_seed + t for t in range(cfg.trials)], cfg.workers)
                row = {"model": cfg.model, "n": n, "m": m, "s": s}
                row.update(_aggregate(out, cfg.timing))
                rows.append(row)
    return rows


def compat_operator(scheme, psi, n, m, seed, omega="stride"):
    """Convolutional sensing for the basis study.

    ``R+R`` subsamples at random; ``D+R`` and ``D+R+Golay-PM`` use the
    deterministic ``omega`` layout, the latter with a Rudin-Shapiro modulation.
    """
    d = models._log2(n)
    if scheme == "R+R":
        return models.golay_convolutional(models.random_omega(n, m, seed), d, seed, psi, lam="none").A
    om = models.make_omega(omega, n, m, seed)
    if scheme == "D+R":
        return models.golay_convolutional(om, d, seed, psi, lam="none").A
    if scheme == "D+R+Golay-PM":
        return models.golay_convolutional(om, d, seed, psi, lam="golay").A
    raise ValueError(f"unknown scheme {scheme!r}; choose from {COMPAT_SCHEMES}")


def run_basis_compatibility(cfg):
    """Exact-recovery rate for each (sparsity basis, sensing scheme) pair."""
    schemes = cfg.schemes or COMPAT_SCHEMES
    rows = []
    for n in cfg.n:
        models._log2(n)
        for m in cfg.m:
            for s in cfg.s:
                for psi in cfg.bases or COMPAT_BASES:
                    for scheme in schemes:
                        factory = partial(compat_operator, scheme, psi, omega=cfg.omega)
                        fn = partial(_recovery_trial, factory=factory, n=n, m=m, s=s, solver=cfg.solver)
                        out = _map(fn, [cfg.base_seed + t for t in range(cfg.trials)], cfg.workers)
                        row = {"basis": psi, "scheme": scheme, "n": n, "m": m, "s": s}
                        row.update(_aggregate(out, cfg.timing))
                        rows.append(row)
    return rows


def run_coherence_report(cfg):
    """``mu(F Lambda T*)`` against its Golay bound for every ``d`` and basis."""
    bases = cfg.bases or LEMMA_BASES
    rows = []
    for d in cfg.d:
        lam = models.golay_lambda(d)
        for psi in bases:
            rep = analysis.modulated_coherence(lam, psi)
            rows.append({
                "d": d,
                "n": rep.n,
                "basis": psi,
                "mu": _round(rep.mu),
                "bound": None if rep.bound is None else _round(rep.bound),
                "pass": rep.passes,
            })
    return rows


RUNNERS = {
    "ofdm": run_ofdm_experiment,
    "phase-transition": run_phase_transition,
    "basis-compat": run_basis_compatibility,
    "coherence": run_coherence_report,
}


def run(cfg):
    return RUNNERS[cfg.kind](cfg)


# --- CSV ------------------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.9g}"
    return str(v)


def _parse(text):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def to_csv(rows, cfg=None):
    """CSV text: a ``#`` config line (when ``cfg`` is given), a header, then rows."""
    buf = io.StringIO()
    if cfg is not None:
        meta = cfg.echo()
        if cfg.kind == "ofdm":
            meta["noise"] = NOISE_LAW
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    if rows:
        header = list(rows[0])
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in header])
    return buf.getvalue()


def write_csv(rows, path, cfg=None):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv(rows, cfg))


def parse_csv(text):
    """Inverse of :func:`to_csv`: returns ``(config_echo_or_None, rows)``."""
    lines = text.split("\n")
    meta = None
    if lines and lines[0].startswith("#"):
        meta = json.loads(lines[0][1:])
        lines = lines[1:]
    reader = csv.reader([ln for ln in lines if ln])
    header = next(reader, None)
    rows = [] if header is None else [dict(zip(header, map(_parse, rec))) for rec in reader]
    return meta, rows


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_csv(fh.read())
