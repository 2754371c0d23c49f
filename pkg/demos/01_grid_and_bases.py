"""Designing a time-frequency grid and looking at the modulation matrices.

The slot/tone aspect ratio comes from the channel spreads: slots of
duration T_o and tones spaced F_o = 1/T_o apart, with T_o/F_o matched to
tau_max/(2 nu_max).  The pulse basis is block-sparse (every column lives
in one slot); the delay-Doppler basis spreads every symbol across the
whole packet with constant-magnitude weights; OFDM is the single-slot
special case.

Writes magnitude images of the three matrices to demos/output/.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ddsig import design_grid, ofdm_matrix, ostf_matrix, otfs_matrix

out_dir = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(out_dir, exist_ok=True)

# The full-size system uses 15 MHz; 3 MHz keeps the pictures legible.
grid = design_grid(tau_max=300e-9, nu_max=1.85e3, bandwidth=3e6, n_t_hint=5)
print(f"designed grid: N_t={grid.N_t} slots x N_f={grid.N_f} tones "
      f"(N={grid.N})")
print(f"  T_o = {grid.T_o * 1e6:.2f} us, F_o = {grid.F_o / 1e3:.2f} kHz, "
      f"T_o*F_o = {grid.T_o * grid.F_o:.6f}")
print(f"  packet: T = {grid.T * 1e6:.1f} us over W = {grid.W / 1e6:.1f} MHz")

fig, axes = plt.subplots(1, 3, figsize=(12, 4))
for ax, basis, title in zip(
        axes,
        (ostf_matrix(grid), otfs_matrix(grid), ofdm_matrix(grid)),
        ("pulse basis (slot-local columns)",
         "delay-Doppler basis (fully spread)",
         "OFDM (single slot)")):
    ax.imshow(abs(basis.U), cmap="viridis", aspect="auto")
    ax.set_title(title, fontsize=9)
    ax.set_xlabel("column (symbol index)")
axes[0].set_ylabel("row (time sample)")
fig.tight_layout()
path = os.path.join(out_dir, "modulation_matrices.png")
fig.savefig(path, dpi=150)
print(f"wrote {path}")
