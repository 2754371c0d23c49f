"""Effective channels, MMSE filtering, SINR, capacity and diagonality.

For a unitary modulation matrix ``U`` and sampled channel, the effective
channel between modulator input and demodulator output is

    H_eff = U^H @ H_tilde @ U_N^H @ U

with ``U_N`` the unitary DFT matrix.  The linear MMSE filter for
``y = sqrt(snr) H x + w`` with unit-power symbols and white noise is
``W = (snr H H^H + I)^{-1} H``; its output is ``z = W^H y`` with
composite channel ``H_c = W^H H`` and filtered-noise covariance
``R_v = W^H W``.  The receiver may be given full channel knowledge or
only the diagonal of ``H_eff``, in which case ``W`` is diagonal but the
composite channel (and hence the residual interference entering the
SINR) is still computed against the full ``H_eff``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .channel import SampledChannel
from .modulation import ModulationBasis, dft_matrix

__all__ = [
    "CsiMode",
    "ReceiverState",
    "time_domain_channel",
    "effective_channel",
    "mmse_filter",
    "sinr_per_dimension",
    "capacity",
    "eig_capacity",
    "eig_capacity_from_eigenvalues",
    "diagonality_metric",
]


class CsiMode(enum.Enum):
    FULL = "full"
    DIAG = "diag"


@dataclass(frozen=True)
class ReceiverState:
    """Effective channel, MMSE filter and derived composite quantities."""

    H_eff: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    H_c: np.ndarray = field(repr=False)
    snr: float
    csi_mode: CsiMode

    @cached_property
    def R_v(self) -> np.ndarray:
        """Filtered-noise covariance ``W^H W`` (Hermitian PSD)."""
        return self.W.conj().T @ self.W

    def noise_variances(self) -> np.ndarray:
        """Diagonal of ``R_v`` (squared column norms of ``W``)."""
        return np.sum(np.abs(self.W) ** 2, axis=0)


def time_domain_channel(sc: SampledChannel) -> np.ndarray:
    """Operator mapping transmitted time samples to received ones."""
    return sc.H_tilde @ dft_matrix(sc.grid.N).conj().T


def effective_channel(basis: ModulationBasis,
                      sc: SampledChannel) -> np.ndarray:
    """Channel seen between modulator input and demodulator output."""
    n = sc.grid.N
    if basis.U.shape != (n, n):
        raise ValueError(f"basis is {basis.U.shape}, channel needs ({n}, {n})")
    return basis.U.conj().T @ time_domain_channel(sc) @ basis.U


def mmse_filter(h_eff: np.ndarray, snr: float,
                csi_mode: CsiMode = CsiMode.FULL,
                gram: np.ndarray | None = None) -> ReceiverState:
    """Linear MMSE interference-suppression filter.

    With full CSI solves the Hermitian positive-definite system
    ``(snr H H^H + I) W = H`` by Cholesky factorization.  With diagonal
    CSI the filter is built entrywise from the diagonal of ``h_eff``,
    ``w_n = h_nn / (snr |h_nn|^2 + 1)``.

    Parameters
    ----------
    gram : ndarray, optional
        Precomputed ``h_eff @ h_eff^H``, reusable across SNR points.
    """
    if not np.isfinite(snr) or snr <= 0:
        raise ValueError(f"snr must be positive and finite, got {snr!r}")
    if not np.all(np.isfinite(h_eff)):
        raise ValueError("h_eff contains non-finite entries")
    n = h_eff.shape[0]
    if csi_mode is CsiMode.DIAG:
        d = np.diagonal(h_eff)
        w_diag = d / (snr * np.abs(d) ** 2 + 1.0)
        w = np.diag(w_diag)
        h_c = w_diag.conj()[:, None] * h_eff
        return ReceiverState(H_eff=h_eff, W=w, H_c=h_c, snr=snr,
                             csi_mode=csi_mode)
    if gram is None:
        gram = h_eff @ h_eff.conj().T
    r = snr * gram + np.eye(n)
    w = scipy.linalg.cho_solve(scipy.linalg.cho_factor(r), h_eff)
    h_c = w.conj().T @ h_eff
    return ReceiverState(H_eff=h_eff, W=w, H_c=h_c, snr=snr,
                         csi_mode=csi_mode)


def sinr_per_dimension(rs: ReceiverState) -> np.ndarray:
    """Post-filter SINR of every output dimension.

    ``SINR(n) = snr |H_c[n,n]|^2 /
    (sum_{i != n} snr |H_c[n,i]|^2 + R_v[n,n])``; a dimension whose
    filter column vanishes gets SINR 0.
    """
    diag_pow = np.abs(np.diagonal(rs.H_c)) ** 2
    row_pow = np.sum(np.abs(rs.H_c) ** 2, axis=1)
    noise = rs.noise_variances()
    denom = rs.snr * (row_pow - diag_pow) + noise
    out = np.zeros_like(denom)
    live = denom > 0
    out[live] = rs.snr * diag_pow[live] / denom[live]
    return out


def capacity(sinr: np.ndarray) -> float:
    """Per-dimension capacity (bps/Hz) at equal power, mean of log2(1+SINR)."""
    return float(np.mean(np.log2(1.0 + np.asarray(sinr))))


def eig_capacity_from_eigenvalues(eigvals: np.ndarray, snr: float) -> float:
    """Capacity of parallel eigenchannels with equal power allocation."""
    return float(np.mean(np.log2(1.0 + snr * np.asarray(eigvals))))


def eig_capacity(h_eff: np.ndarray, snr: float) -> float:
    """Benchmark capacity over the singular vectors of ``h_eff``.

    Uses the eigenvalues of ``h_eff^H h_eff`` (squared singular values),
    which are invariant under unitary change of modulation basis.
    """
    s = np.linalg.svd(h_eff, compute_uv=False)
    return eig_capacity_from_eigenvalues(s ** 2, snr)


def diagonality_metric(m: np.ndarray) -> float:
    """Fraction of squared Frobenius norm carried by the diagonal, in (0, 1]."""
    total = float(np.sum(np.abs(m) ** 2))
    if total == 0.0:
        raise ValueError("diagonality metric undefined for the zero matrix")
    return float(np.sum(np.abs(np.diagonal(m)) ** 2) / total)
