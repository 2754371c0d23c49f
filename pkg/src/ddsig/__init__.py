"""Link-level simulation of signaling over doubly dispersive channels.

Critically sampled matrix-vector models of pulse-based time-frequency
signaling (OSTF), its delay-Doppler precoded form (OTFS), OFDM and
random-unitary precoding, with MMSE receivers, SINR/capacity/diagonality
metrics, an eigenchannel benchmark, and a reproducible Monte Carlo
campaign harness.
"""

__version__ = "0.1.0"

from .channel import (
    ChannelRealization,
    Path,
    SampledChannel,
    draw_channel,
    sample_channel,
    spreading_function,
)
from .grid import GridDesign, design_grid, make_grid, ofdm_grid
from .modulation import (
    QAM4_ALPHABET,
    ModulationBasis,
    Scheme,
    dft_matrix,
    ofdm_matrix,
    ostf_matrix,
    ostf_u_matrix,
    otfs_matrix,
    qam4_demap,
    qam4_map,
    sfft_matrix,
)
from .montecarlo import (
    SCENARIOS,
    SCHEMES,
    AggregateCell,
    AggregateResult,
    ScenarioConfig,
    SchemeMetrics,
    TrialError,
    TrialResult,
    run_campaign,
    run_trial,
    wilson_interval,
)
from .receiver import (
    CsiMode,
    ReceiverState,
    capacity,
    diagonality_metric,
    effective_channel,
    eig_capacity,
    eig_capacity_from_eigenvalues,
    mmse_filter,
    sinr_per_dimension,
    time_domain_channel,
)

__all__ = [
    "__version__",
    "GridDesign", "design_grid", "ofdm_grid", "make_grid",
    "Path", "ChannelRealization", "SampledChannel",
    "draw_channel", "sample_channel", "spreading_function",
    "Scheme", "ModulationBasis", "QAM4_ALPHABET",
    "dft_matrix", "ostf_matrix", "sfft_matrix", "otfs_matrix",
    "ofdm_matrix", "ostf_u_matrix", "qam4_map", "qam4_demap",
    "CsiMode", "ReceiverState", "time_domain_channel", "effective_channel",
    "mmse_filter", "sinr_per_dimension", "capacity", "eig_capacity",
    "eig_capacity_from_eigenvalues", "diagonality_metric",
    "SCHEMES", "SCENARIOS", "ScenarioConfig", "SchemeMetrics",
    "TrialResult", "TrialError", "AggregateCell", "AggregateResult",
    "run_trial", "run_campaign", "wilson_interval",
]
