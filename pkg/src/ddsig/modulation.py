"""Unitary modulation matrices and 4-QAM symbol mapping.

All schemes modulate an ``N``-vector of unit-power symbols onto ``N``
time samples through a unitary ``N x N`` matrix:

* ``ostf``   -- time-frequency shifted rectangular pulses; column
  ``n + m * N_t`` holds the pulse in slot ``n`` at tone ``m``.
* ``otfs``   -- the same pulses preceded by an inverse symplectic 2-D
  DFT, so the symbols live on a delay-Doppler lattice.
* ``ofdm``   -- the single-slot special case, a plain DFT matrix.
* ``ostf_u`` -- the pulses preceded by a random unitary matrix.

Symbol vectors are plain complex ndarrays drawn from the Gray-mapped
4-QAM alphabet; bit pair ``(b0, b1)`` maps to
``((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)``, so ``00 -> (+1+j)/sqrt(2)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .grid import GridDesign

__all__ = [
    "Scheme",
    "ModulationBasis",
    "QAM4_ALPHABET",
    "dft_matrix",
    "ostf_matrix",
    "sfft_matrix",
    "otfs_matrix",
    "ofdm_matrix",
    "ostf_u_matrix",
    "qam4_map",
    "qam4_demap",
]


class Scheme(enum.Enum):
    OSTF = "ostf"
    OTFS = "otfs"
    OFDM = "ofdm"
    OSTF_U = "ostf_u"


@dataclass(frozen=True)
class ModulationBasis:
    """A unitary modulation matrix with its scheme tag and grid."""

    scheme: Scheme
    U: np.ndarray = field(repr=False)
    grid: GridDesign


# Gray-mapped 4-QAM, indexed by the 2-bit word (b0 b1).
QAM4_ALPHABET = np.array(
    [1.0 + 1.0j, 1.0 - 1.0j, -1.0 + 1.0j, -1.0 - 1.0j]) / np.sqrt(2.0)


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix with entry (a, b) = exp(j 2 pi a b / n) / sqrt(n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = np.arange(n)
    return np.exp(2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)


def ostf_matrix(grid: GridDesign) -> ModulationBasis:
    """Sampled basis of time-frequency shifted rectangular pulses.

    The pulse is constant ``1 / sqrt(N_f)`` over the ``N_f`` samples of
    its slot and zero elsewhere; tone ``m`` advances the phase by
    ``2 pi m / N_f`` per sample.  Columns are exactly orthonormal.  Tones
    are stored in the order ``m = 0 .. N_f - 1``; indices above
    ``(N_f - 1) / 2`` alias the negative half of the symmetric band, which
    leaves the sampled columns unchanged.
    """
    n_t, n_f = grid.N_t, grid.N_f
    n = grid.N
    block = dft_matrix(n_f)
    u = np.zeros((n, n), dtype=complex)
    cols = np.arange(n_f) * n_t
    for slot in range(n_t):
        u[slot * n_f:(slot + 1) * n_f, slot + cols] = block
    return ModulationBasis(scheme=Scheme.OSTF, U=u, grid=grid)


def sfft_matrix(n_t: int, n_f: int) -> np.ndarray:
    """Matrix form of the symplectic 2-D DFT on column-stacked arrays.

    For an ``n_t x n_f`` symbol array ``X`` stacked column-major (entry
    ``(n, m)`` at index ``n + m * n_t``), the product with this matrix
    equals the double sum

        (1/sqrt(n_t n_f)) sum_{n,m} X[n,m] e^{-j2pi kn/n_t} e^{+j2pi lm/n_f}

    i.e. an inverse DFT across slots and a forward DFT across tones.
    """
    return np.kron(dft_matrix(n_f).T, dft_matrix(n_t).conj().T)


def otfs_matrix(grid: GridDesign) -> ModulationBasis:
    """Delay-Doppler basis: pulse basis times the adjoint symplectic DFT."""
    u_stf = ostf_matrix(grid).U
    u_sfft = sfft_matrix(grid.N_t, grid.N_f)
    return ModulationBasis(scheme=Scheme.OTFS, U=u_stf @ u_sfft.conj().T,
                           grid=grid)


def ofdm_matrix(grid: GridDesign) -> ModulationBasis:
    """Plain DFT basis over the whole packet (single-slot pulse basis)."""
    return ModulationBasis(scheme=Scheme.OFDM, U=dft_matrix(grid.N),
                           grid=grid)


def ostf_u_matrix(grid: GridDesign,
                  rng_seed: int | np.random.SeedSequence) -> ModulationBasis:
    """Pulse basis times a random unitary matrix.

    The unitary factor comes from orthonormalizing an i.i.d. circular
    complex Gaussian matrix (QR with the R-diagonal phases absorbed into
    Q).  Deterministic given the seed; on the measure-zero event of a
    rank-deficient draw the seed is advanced and the draw repeated.
    """
    n = grid.N
    u_stf = ostf_matrix(grid).U
    seed = rng_seed
    while True:
        rng = np.random.default_rng(seed)
        z = (rng.standard_normal((n, n))
             + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
        q, r = np.linalg.qr(z)
        d = np.diagonal(r)
        if np.all(np.abs(d) > 1e-12):
            break
        if isinstance(seed, np.random.SeedSequence):
            seed = seed.spawn(1)[0]
        else:
            seed += 1
    q = q * (d / np.abs(d))
    return ModulationBasis(scheme=Scheme.OSTF_U, U=u_stf @ q, grid=grid)


def qam4_map(bits: np.ndarray) -> np.ndarray:
    """Map a bit sequence (length 2N) to N Gray-mapped 4-QAM symbols."""
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size % 2 != 0:
        raise ValueError("bit sequence length must be even")
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise ValueError("bits must be 0 or 1")
    words = 2 * bits[0::2] + bits[1::2]
    return QAM4_ALPHABET[words]


def qam4_demap(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-neighbor decisions for received 4-QAM values.

    Returns ``(bits, symbols)``: the demapped bit sequence (length 2N)
    and the decided constellation points.  Inverse of :func:`qam4_map`
    on noiseless symbols.
    """
    z = np.asarray(z)
    b0 = (z.real < 0).astype(np.int64)
    b1 = (z.imag < 0).astype(np.int64)
    bits = np.empty(2 * z.size, dtype=np.int64)
    bits[0::2] = b0
    bits[1::2] = b1
    return bits, QAM4_ALPHABET[2 * b0 + b1]
