"""Time-frequency grid design for short-time Fourier signaling.

A packet of duration ``T`` and two-sided bandwidth ``W`` carries
``N = T * W`` symbols on a lattice of ``N_t`` time slots of length ``T_o``
by ``N_f`` tones spaced ``F_o`` apart, with ``T_o * F_o = 1`` so that the
shifted rectangular pulses stay exactly orthogonal.  The slot/tone aspect
ratio is matched to the channel's delay and Doppler spreads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["GridDesign", "design_grid", "ofdm_grid", "make_grid"]

_REL_TOL = 1e-9


@dataclass(frozen=True)
class GridDesign:
    """Parameters of one time-frequency signaling packet.

    Attributes
    ----------
    T_o : float
        Pulse duration / time shift between slots (s).
    F_o : float
        Frequency shift between tones (Hz).
    N_t : int
        Number of time slots.
    N_f : int
        Number of tones per slot.
    W : float
        Two-sided bandwidth (Hz), equals ``N_f * F_o``.
    T : float
        Packet duration (s), equals ``N_t * T_o``.
    """

    T_o: float
    F_o: float
    N_t: int
    N_f: int
    W: float
    T: float

    def __post_init__(self) -> None:
        if self.N_t < 1 or self.N_f < 1:
            raise ValueError("N_t and N_f must be positive integers")
        checks = (
            (self.T_o * self.F_o, 1.0),
            (self.N_t * self.T_o, self.T),
            (self.N_f * self.F_o, self.W),
        )
        for got, want in checks:
            if not math.isclose(got, want, rel_tol=_REL_TOL):
                raise ValueError(
                    f"inconsistent grid: expected {want!r}, got {got!r}"
                )

    @property
    def N(self) -> int:
        """Total number of symbols per packet (= N_t * N_f)."""
        return self.N_t * self.N_f

    @property
    def delta_t(self) -> float:
        """Critical sampling interval in time (s), 1/W."""
        return 1.0 / self.W

    @property
    def delta_f(self) -> float:
        """Critical sampling interval in frequency (Hz), 1/T."""
        return 1.0 / self.T


def _nearest_odd(x: float) -> int:
    """Odd integer nearest to x (ties resolve upward)."""
    return 2 * round((x - 1.0) / 2.0) + 1


def make_grid(n_t: int, n_f: int, bandwidth: float) -> GridDesign:
    """Build a grid directly from slot/tone counts and a bandwidth.

    Convenience constructor for tests and reduced-size experiments; does
    not enforce odd ``n_f``.
    """
    f_o = bandwidth / n_f
    t_o = 1.0 / f_o
    return GridDesign(T_o=t_o, F_o=f_o, N_t=n_t, N_f=n_f,
                      W=bandwidth, T=n_t * t_o)


def design_grid(tau_max: float, nu_max: float, bandwidth: float,
                n_t_hint: int | None = None) -> GridDesign:
    """Design the slot/tone tiling matched to the channel spreads.

    The continuous optimum sets ``T_o / F_o = tau_max / (2 nu_max)`` with
    ``T_o F_o = 1``; the tone count is then snapped to the nearest odd
    integer dividing the bandwidth exactly, preserving ``T_o F_o = 1``.
    The number of slots is a scenario choice and must be supplied.

    Parameters
    ----------
    tau_max : float
        Delay spread (s), > 0.
    nu_max : float
        One-sided Doppler spread (Hz), > 0.
    bandwidth : float
        Two-sided system bandwidth (Hz), > 0.
    n_t_hint : int
        Number of time slots for the packet.

    Raises
    ------
    ValueError
        If the channel is overspread (``tau_max * 2 * nu_max >= 1``), if
        no slot count is given, or if the parameters produce ``N_f < 3``.
    """
    if tau_max <= 0 or nu_max <= 0 or bandwidth <= 0:
        raise ValueError("tau_max, nu_max and bandwidth must be positive")
    if tau_max * 2.0 * nu_max >= 1.0:
        raise ValueError(
            f"overspread channel: tau_max * 2 * nu_max = "
            f"{tau_max * 2.0 * nu_max:.3g} >= 1"
        )
    if n_t_hint is None:
        raise ValueError("n_t_hint is required: the packet length in slots "
                         "is a scenario parameter, not derived")
    if n_t_hint < 1:
        raise ValueError("n_t_hint must be >= 1")

    t_o = math.sqrt(tau_max / (2.0 * nu_max))
    f_o = 1.0 / t_o
    n_f = _nearest_odd(bandwidth / f_o)
    if n_f < 3:
        raise ValueError(f"bandwidth supports only N_f = {n_f} < 3 tones "
                         f"at F_o = {f_o:.6g} Hz")
    f_o = bandwidth / n_f
    t_o = 1.0 / f_o
    return GridDesign(T_o=t_o, F_o=f_o, N_t=n_t_hint, N_f=n_f,
                      W=bandwidth, T=n_t_hint * t_o)


def ofdm_grid(grid: GridDesign) -> GridDesign:
    """Collapse a grid to its single-slot (OFDM) special case.

    Keeps ``N``, ``W`` and ``T`` while setting ``N_t = 1`` (one slot of
    duration ``T``) and ``N_f = N`` (tone spacing ``W / N``).  Tone-count
    parity is irrelevant here and is not adjusted.
    """
    n = grid.N
    f_o = grid.W / n
    return GridDesign(T_o=grid.T, F_o=f_o, N_t=1, N_f=n,
                      W=grid.W, T=grid.T)
