"""spdcpol: polarization-entangled pair generation in a dispersive waveguide.

End-to-end pipeline: joint spectral amplitude of a type-II pair source,
walk-off compensation and the post-selected two-qubit state, analyzer
fringes and CHSH evaluation, and gated-detector coincidence statistics
with accidental subtraction.
"""

from .counting import (
    CountTable,
    DetectorModel,
    RatePrediction,
    accidental_rate,
    chsh_from_counts,
    efficiency_budget,
    expected_count_table,
    expected_counts,
    measure_accidentals,
    simulate_count_table,
    simulate_counts,
    subtract_accidentals,
)
from .errors import ConfigurationError, DegenerateDataError
from .polarimetry import (
    ChshSettings,
    FringeResult,
    PolarizerPair,
    chsh_S,
    chsh_signed,
    coincidence_prob,
    correlation_E,
    fit_fringe,
    fringe_scan,
    s_curve,
    visibility_max_min,
)
from .spectral import (
    FilterShape,
    JointSpectralAmplitude,
    SpectralFilter,
    SpectralGrid,
    WaveguideDispersion,
    beta2_from_d,
    build_jsa,
    default_grid,
    filter_amplitude,
    gvm_delta,
    phase_mismatch,
)
from .state import (
    DelaySetting,
    OverlapResult,
    TwoQubitState,
    concurrence,
    optimal_delay,
    overlap_integral,
    post_selected_state,
    psi_plus_state,
    visibility_state,
)

__version__ = "0.1.0"
