"""Seeded Monte Carlo campaigns over schemes, SNR points and CSI modes.

One trial draws a channel realization, builds the effective channel of
every requested scheme, and for each SNR point runs MMSE filtering, the
SINR/capacity/diagonality metrics, and an uncoded 4-QAM packet
transmission.  The same symbol vector and noise vector are reused across
schemes within a trial so comparisons are paired; noise is redrawn per
SNR point.  Per-trial random streams are derived from
``(base_seed, trial_index, stream_tag)`` via ``numpy.random.SeedSequence``
spawn keys, so results do not depend on execution order or worker count,
and error-count/compensated-sum reductions make parallel campaigns
bit-identical to sequential ones.

The ``eig`` pseudo-scheme benchmarks transmission over the singular
vectors of the effective channel (identical for all unitary bases):
its capacity uses the squared singular values, and its error rate comes
from detecting the same symbols over the parallel eigenchannels.  It
always uses full CSI.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channel import draw_channel, sample_channel
from .grid import GridDesign, design_grid
from .modulation import (
    QAM4_ALPHABET,
    ModulationBasis,
    dft_matrix,
    ofdm_matrix,
    ostf_matrix,
    ostf_u_matrix,
    otfs_matrix,
    qam4_demap,
)
from .receiver import (
    CsiMode,
    capacity,
    diagonality_metric,
    eig_capacity_from_eigenvalues,
    mmse_filter,
    sinr_per_dimension,
)

__all__ = [
    "SCHEMES",
    "ScenarioConfig",
    "SCENARIOS",
    "SchemeMetrics",
    "TrialResult",
    "TrialError",
    "AggregateCell",
    "AggregateResult",
    "run_trial",
    "run_campaign",
    "wilson_interval",
]


class TrialError(RuntimeError):
    """Numerical failure inside a trial, tagged with trial/scheme/SNR."""

SCHEMES = ("eig", "ofdm", "ostf", "ostf_u", "otfs")

# SeedSequence stream tags; noise additionally keys on the SNR index.
_STREAM_CHANNEL = 0
_STREAM_SYMBOLS = 1
_STREAM_NOISE = 2
_STREAM_BASIS = 3


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one campaign."""

    name: str
    f_c: float                     # carrier frequency (Hz), metadata only
    bandwidth: float               # two-sided bandwidth W (Hz)
    tau_max: float                 # delay spread (s)
    nu_max: float                  # Doppler spread (Hz)
    n_paths: int
    n_t: int                       # slots per packet
    snr_points_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    trials: int = 100
    schemes: tuple[str, ...] = SCHEMES
    csi_mode: CsiMode = CsiMode.FULL
    base_seed: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.snr_points_db:
            raise ValueError("snr_points_db must be nonempty")
        if not self.schemes:
            raise ValueError("schemes must be nonempty")
        unknown = sorted(set(self.schemes) - set(SCHEMES))
        if unknown:
            raise ValueError(f"unknown schemes {unknown}; "
                             f"valid: {', '.join(SCHEMES)}")
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        object.__setattr__(self, "schemes",
                           tuple(sorted(set(self.schemes))))
        object.__setattr__(self, "snr_points_db",
                           tuple(float(s) for s in self.snr_points_db))

    def replace(self, **kw) -> "ScenarioConfig":
        return dataclasses.replace(self, **kw)

    def grid(self) -> GridDesign:
        return design_grid(self.tau_max, self.nu_max, self.bandwidth,
                           n_t_hint=self.n_t)


#: Built-in scenarios.  The two full-size ones use the published system
#: parameters (4 GHz carrier, 15 MHz bandwidth, 30 paths); the reduced
#: ones keep the same spreads and slot/tone aspect ratio on a narrower
#: band so campaigns finish in seconds.
SCENARIOS: dict[str, ScenarioConfig] = {
    "moderate": ScenarioConfig(
        name="moderate", f_c=4e9, bandwidth=15e6,
        tau_max=300e-9, nu_max=1.85e3, n_paths=30, n_t=9),
    "extreme": ScenarioConfig(
        name="extreme", f_c=4e9, bandwidth=15e6,
        tau_max=700e-9, nu_max=9.26e3, n_paths=30, n_t=13),
    "moderate-reduced": ScenarioConfig(
        name="moderate-reduced", f_c=4e9, bandwidth=3e6,
        tau_max=300e-9, nu_max=1.85e3, n_paths=30, n_t=5, trials=50),
    "extreme-reduced": ScenarioConfig(
        name="extreme-reduced", f_c=4e9, bandwidth=3.4e6,
        tau_max=700e-9, nu_max=9.26e3, n_paths=30, n_t=5, trials=50),
}


@dataclass(frozen=True)
class SchemeMetrics:
    """Per-(scheme, SNR) outcome of a single trial."""

    capacity: float
    gamma_h: float
    gamma_hc: float
    sinr_mean: float
    sinr_min: float
    sinr_max: float
    symbol_errors: int
    bit_errors: int
    symbols_sent: int

    def __post_init__(self) -> None:
        if self.symbol_errors > self.symbols_sent:
            raise ValueError("symbol errors exceed symbols sent")
        if self.bit_errors > 2 * self.symbols_sent:
            raise ValueError("bit errors exceed bits sent")


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    cells: dict[tuple[str, float], SchemeMetrics]


@dataclass(frozen=True)
class AggregateCell:
    """Averages and error rates for one (scheme, SNR) pair."""

    mean_capacity: float
    mean_gamma_h: float            # linear; convert to dB for reporting
    mean_gamma_hc: float
    ser: float
    ser_ci: tuple[float, float]    # Wilson 95% interval
    ber: float
    ber_ci: tuple[float, float]
    symbol_errors: int
    bit_errors: int
    symbols_sent: int
    trials: int


@dataclass(frozen=True)
class AggregateResult:
    config: ScenarioConfig
    cells: dict[tuple[str, float], AggregateCell]


@dataclass(frozen=True)
class _Context:
    """Grid and scheme bases shared by every trial of a campaign."""

    grid: GridDesign
    u_n_adj: np.ndarray = field(repr=False)     # U_N^H
    bases: dict[str, ModulationBasis] = field(repr=False, default=None)


def _build_context(cfg: ScenarioConfig) -> _Context:
    grid = cfg.grid()
    bases: dict[str, ModulationBasis] = {}
    for s in cfg.schemes:
        if s == "ostf":
            bases[s] = ostf_matrix(grid)
        elif s == "otfs":
            bases[s] = otfs_matrix(grid)
        elif s == "ofdm":
            bases[s] = ofdm_matrix(grid)
        # ostf_u is redrawn per trial; eig has no basis
    return _Context(grid=grid, u_n_adj=dft_matrix(grid.N).conj().T,
                    bases=bases)


def _seed(cfg: ScenarioConfig, trial_index: int,
          *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(cfg.base_seed,
                                  spawn_key=(trial_index, *key))


def wilson_interval(successes: int, n: int,
                    z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score 95% confidence interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return (lo, hi)


def _detect(received: np.ndarray, scale: np.ndarray,
            x: np.ndarray, bits: np.ndarray) -> tuple[int, int]:
    """Nearest-point decisions after gain removal; returns error counts."""
    safe = np.where(np.abs(scale) < 1e-300, 1e-300, scale)
    bits_hat, sym_hat = qam4_demap(received / safe)
    return int(np.sum(sym_hat != x)), int(np.sum(bits_hat != bits))


def run_trial(cfg: ScenarioConfig, trial_index: int,
              context: _Context | None = None,
              probe: Callable[..., None] | None = None) -> TrialResult:
    """Run one channel realization through every scheme and SNR point.

    ``probe``, if given, is called as
    ``probe(trial_index=..., scheme=..., snr_db=..., x=..., w=...)`` just
    before detection; the same ``x`` and ``w`` objects are passed for
    every scheme at a given SNR point.
    """
    ctx = context if context is not None else _build_context(cfg)
    grid = ctx.grid
    n = grid.N

    ch = draw_channel(cfg.tau_max, cfg.nu_max, cfg.n_paths,
                      _seed(cfg, trial_index, _STREAM_CHANNEL))
    sc = sample_channel(ch, grid)
    g = sc.H_tilde @ ctx.u_n_adj

    h_effs: dict[str, np.ndarray] = {}
    grams: dict[str, np.ndarray] = {}
    eig_sv: np.ndarray | None = None
    for s in cfg.schemes:
        if s == "eig":
            eig_sv = np.linalg.svd(g, compute_uv=False)
        else:
            if s == "ostf_u":
                basis = ostf_u_matrix(grid,
                                      _seed(cfg, trial_index, _STREAM_BASIS))
            else:
                basis = ctx.bases[s]
            h_effs[s] = basis.U.conj().T @ g @ basis.U
    gamma_h = {s: diagonality_metric(h) for s, h in h_effs.items()}

    sym_rng = np.random.default_rng(_seed(cfg, trial_index, _STREAM_SYMBOLS))
    x = QAM4_ALPHABET[sym_rng.integers(0, 4, n)]
    bits = qam4_demap(x)[0]

    cells: dict[tuple[str, float], SchemeMetrics] = {}
    for snr_idx, snr_db in enumerate(cfg.snr_points_db):
        snr = 10.0 ** (snr_db / 10.0)
        noise_rng = np.random.default_rng(
            _seed(cfg, trial_index, _STREAM_NOISE, snr_idx))
        w = (noise_rng.standard_normal(n)
             + 1j * noise_rng.standard_normal(n)) / np.sqrt(2.0)

        for s in cfg.schemes:
            if probe is not None:
                probe(trial_index=trial_index, scheme=s, snr_db=snr_db,
                      x=x, w=w)
            try:
                if s == "eig":
                    sinr = snr * eig_sv ** 2
                    cap = eig_capacity_from_eigenvalues(eig_sv ** 2, snr)
                    received = np.sqrt(snr) * eig_sv * x + w
                    serr, berr = _detect(received, np.sqrt(snr) * eig_sv,
                                         x, bits)
                    g_h = g_hc = 1.0   # interference-free by construction
                else:
                    h = h_effs[s]
                    if s not in grams and cfg.csi_mode is CsiMode.FULL:
                        grams[s] = h @ h.conj().T
                    rs = mmse_filter(h, snr, cfg.csi_mode, gram=grams.get(s))
                    sinr = sinr_per_dimension(rs)
                    cap = capacity(sinr)
                    y = np.sqrt(snr) * (h @ x) + w
                    z = rs.W.conj().T @ y
                    diag_c = np.diagonal(rs.H_c)
                    serr, berr = _detect(z, np.sqrt(snr) * diag_c, x, bits)
                    g_h = gamma_h[s]
                    g_hc = diagonality_metric(rs.H_c)
            except (ValueError, FloatingPointError,
                    np.linalg.LinAlgError) as exc:
                raise TrialError(f"trial {trial_index}, scheme {s}, "
                                 f"snr {snr_db:g} dB: {exc}") from exc
            cells[(s, snr_db)] = SchemeMetrics(
                capacity=cap, gamma_h=g_h, gamma_hc=g_hc,
                sinr_mean=float(np.mean(sinr)), sinr_min=float(np.min(sinr)),
                sinr_max=float(np.max(sinr)),
                symbol_errors=serr, bit_errors=berr, symbols_sent=n)
    return TrialResult(trial_index=trial_index, cells=cells)


# Worker-process state: the context is rebuilt deterministically in each
# worker instead of being pickled with every task.
_WORKER: tuple[ScenarioConfig, _Context] | None = None


def _init_worker(cfg: ScenarioConfig) -> None:
    global _WORKER
    _WORKER = (cfg, _build_context(cfg))


def _worker_trial(trial_index: int) -> TrialResult:
    cfg, ctx = _WORKER
    return run_trial(cfg, trial_index, context=ctx)


def run_campaign(cfg: ScenarioConfig, threads: int = 1,
                 probe: Callable[..., None] | None = None,
                 log: Callable[[str], None] | None = None) -> AggregateResult:
    """Aggregate ``cfg.trials`` trials into per-(scheme, SNR) statistics.

    ``threads`` > 1 distributes whole trials over worker processes; the
    per-trial seed derivation and exact summation make the result
    bit-identical to a sequential run.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if probe is not None and threads > 1:
        raise ValueError("probe is only supported with threads=1")

    if threads == 1 or cfg.trials == 1:
        ctx = _build_context(cfg)
        trials = [run_trial(cfg, i, context=ctx, probe=probe)
                  for i in range(cfg.trials)]
    else:
        with ProcessPoolExecutor(max_workers=threads,
                                 initializer=_init_worker,
                                 initargs=(cfg,)) as pool:
            trials = list(pool.map(_worker_trial, range(cfg.trials)))
    trials.sort(key=lambda t: t.trial_index)

    cells: dict[tuple[str, float], AggregateCell] = {}
    for snr_db in cfg.snr_points_db:
        for s in cfg.schemes:
            recs = [t.cells[(s, snr_db)] for t in trials]
            serr = sum(r.symbol_errors for r in recs)
            berr = sum(r.bit_errors for r in recs)
            nsym = sum(r.symbols_sent for r in recs)
            cells[(s, snr_db)] = AggregateCell(
                mean_capacity=math.fsum(r.capacity for r in recs) / len(recs),
                mean_gamma_h=math.fsum(r.gamma_h for r in recs) / len(recs),
                mean_gamma_hc=math.fsum(r.gamma_hc for r in recs) / len(recs),
                ser=serr / nsym,
                ser_ci=wilson_interval(serr, nsym),
                ber=berr / (2 * nsym),
                ber_ci=wilson_interval(berr, 2 * nsym),
                symbol_errors=serr, bit_errors=berr, symbols_sent=nsym,
                trials=len(recs))
        if log is not None:
            log(f"snr={snr_db:g} dB: {len(cfg.schemes)} schemes x "
                f"{cfg.trials} trials done")
    return AggregateResult(config=cfg, cells=cells)
