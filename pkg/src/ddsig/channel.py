"""Doubly dispersive multipath channel model and its critically sampled form.

The channel is a sum of discrete paths, each with a delay, a Doppler
shift and a complex gain.  Its time-varying frequency response

    H(t, f) = sum_l alpha_l * exp(-j 2 pi tau_l f) * exp(+j 2 pi nu_l t)

is sampled on the critical lattice ``t = n / W``, ``f = m / T`` to give an
``N x N`` matrix, from which the system matrix acting on the transmitted
time samples is formed.  The system matrix carries a ``1/sqrt(N)`` factor
so that a single gain-one path with zero delay and Doppler maps to the
identity operator, which keeps the per-dimension SNR calibration exact
under the unit total path power convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridDesign

__all__ = [
    "Path",
    "ChannelRealization",
    "SampledChannel",
    "draw_channel",
    "sample_channel",
    "spreading_function",
]


@dataclass(frozen=True)
class Path:
    """One propagation path: delay (s), Doppler shift (Hz), complex gain."""

    delay: float
    doppler: float
    gain: complex


@dataclass(frozen=True)
class ChannelRealization:
    """A fixed set of paths drawn from the scenario's spread box.

    ``power_profile`` holds the per-path gain variances, normalized to sum
    to one so that the average channel power defines the SNR reference.
    """

    paths: tuple[Path, ...]
    tau_max: float
    nu_max: float
    power_profile: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if len(self.paths) < 1:
            raise ValueError("a channel needs at least one path")
        for p in self.paths:
            if not 0.0 <= p.delay <= self.tau_max:
                raise ValueError(f"path delay {p.delay} outside [0, tau_max]")
            if abs(p.doppler) > self.nu_max:
                raise ValueError(f"path Doppler {p.doppler} outside "
                                 f"[-nu_max, nu_max]")
        total = float(np.sum(self.power_profile))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"power profile sums to {total}, expected 1")

    @property
    def n_paths(self) -> int:
        return len(self.paths)


@dataclass(frozen=True)
class SampledChannel:
    """Critically sampled channel matrices for one realization on a grid.

    Attributes
    ----------
    H : ndarray
        ``H[n, m] = H(n delta_t, m delta_f)``, the sampled time-varying
        frequency response.
    H_tilde : ndarray
        ``H[n, m] * exp(j 2 pi n m / N) / sqrt(N)``; the received time
        samples are ``H_tilde @ U_N^H @ s`` for transmitted samples ``s``.
    """

    H: np.ndarray = field(repr=False)
    H_tilde: np.ndarray = field(repr=False)
    grid: GridDesign


def draw_channel(tau_max: float, nu_max: float, n_paths: int,
                 rng_seed: int | np.random.SeedSequence) -> ChannelRealization:
    """Draw a random multipath realization.

    Delays are uniform on ``[0, tau_max]``, Doppler shifts uniform on
    ``[-nu_max, nu_max]``, and gains are circular complex Gaussian with
    exponentially decreasing variances ``exp(-l / n_paths)`` (l = 1..n_paths),
    rescaled so the variances sum to one.  Deterministic given the seed.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    if tau_max <= 0 or nu_max <= 0:
        raise ValueError("channel spreads must be positive")
    rng = np.random.default_rng(rng_seed)
    sigma2 = np.exp(-np.arange(1, n_paths + 1) / n_paths)
    sigma2 /= sigma2.sum()
    delays = rng.uniform(0.0, tau_max, n_paths)
    dopplers = rng.uniform(-nu_max, nu_max, n_paths)
    gains = np.sqrt(sigma2 / 2.0) * (rng.standard_normal(n_paths)
                                     + 1j * rng.standard_normal(n_paths))
    paths = tuple(Path(float(d), float(nu), complex(g))
                  for d, nu, g in zip(delays, dopplers, gains))
    return ChannelRealization(paths=paths, tau_max=tau_max, nu_max=nu_max,
                              power_profile=sigma2)


def sample_channel(ch: ChannelRealization, grid: GridDesign) -> SampledChannel:
    """Evaluate the channel response on the critical sampling lattice."""
    n = grid.N
    t = np.arange(n) * grid.delta_t
    f = np.arange(n) * grid.delta_f
    delays = np.array([p.delay for p in ch.paths])
    dopplers = np.array([p.doppler for p in ch.paths])
    gains = np.array([p.gain for p in ch.paths])
    # H = sum_l gain_l * outer(e^{+j2pi nu_l t}, e^{-j2pi tau_l f})
    phase_t = np.exp(2j * np.pi * np.outer(t, dopplers))
    phase_f = np.exp(-2j * np.pi * np.outer(delays, f))
    h = (phase_t * gains) @ phase_f
    idx = np.arange(n)
    twist = np.exp(2j * np.pi * np.outer(idx, idx) / n)
    h_tilde = h * twist / np.sqrt(n)
    return SampledChannel(H=h, H_tilde=h_tilde, grid=grid)


def spreading_function(sc: SampledChannel) -> np.ndarray:
    """Unitary 2-D Fourier transform of H into the delay-Doppler plane.

    Row index is the Doppler bin (transform over the time axis), column
    index the delay bin (inverse transform over the frequency axis).  A
    single path at delay ``l0 * delta_t`` and Doppler ``k0 * delta_f``
    concentrates at bin ``(k0, l0)``.  Diagnostic output only.
    """
    return np.fft.ifft(np.fft.fft(sc.H, axis=0), axis=1)
