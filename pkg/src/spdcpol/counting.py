"""Gated-detector coincidence statistics.

Detectors open only during trigger-synchronized gates (width tau_g at rate
R_t); a coincidence is two clicks within tau_c. Uncorrelated singles N1, N2
arriving uniformly within a shared gate then produce accidentals at

    R_acc = alpha * (N1 * N2 / R_t) * min(1, 2 tau_c / tau_g).

alpha is an explicit calibration multiplier: the uniform-arrival model
overpredicts the level real gating electronics pass, and the quoted singles
do not pin down dead time or converter acceptance, so the scale is left to
calibration (alpha = 1 by default; the calibrated preset uses 0.026, the
value implied by the measured raw-versus-subtracted fringe contrast gap).

Counts are Poisson per setting. Per-gate pair probabilities are far below
one at the rates of interest, so Poisson and binomial-per-gate are
indistinguishable here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import ConfigurationError, DegenerateDataError
from .polarimetry import ChshSettings, PolarizerPair, coincidence_prob
from .state import TwoQubitState
from .units import HBAR, omega_from_lambda

__all__ = [
    "DetectorModel",
    "RatePrediction",
    "CountTable",
    "derive_seed",
    "accidental_rate",
    "expected_counts",
    "simulate_counts",
    "measure_accidentals",
    "subtract_accidentals",
    "chsh_table_angles",
    "expected_count_table",
    "simulate_count_table",
    "chsh_from_counts",
    "inferred_pair_rate",
    "efficiency_budget",
]


@dataclass(frozen=True)
class DetectorModel:
    """Gated single-photon detector pair and its counting electronics."""

    trigger_rate: float  # Hz
    gate_width: float  # s
    coincidence_window: float  # s
    efficiency_1: float = 0.25
    efficiency_2: float = 0.25
    singles_rate_1: float = 0.0  # counts/s, measured or configured
    singles_rate_2: float = 0.0
    accidental_calibration: float = 1.0  # alpha

    def __post_init__(self) -> None:
        if self.trigger_rate <= 0:
            raise ValueError(f"trigger_rate must be positive, got {self.trigger_rate}")
        if self.gate_width <= 0:
            raise ValueError(f"gate_width must be positive, got {self.gate_width}")
        if self.coincidence_window <= 0:
            raise ValueError(f"coincidence_window must be positive, got {self.coincidence_window}")
        for eff in (self.efficiency_1, self.efficiency_2):
            if not 0.0 <= eff <= 1.0:
                raise ValueError(f"detector efficiency {eff} outside [0, 1]")
        if self.singles_rate_1 < 0 or self.singles_rate_2 < 0:
            raise ValueError("singles rates must be nonnegative")
        if self.accidental_calibration < 0:
            raise ValueError("accidental_calibration must be nonnegative")


@dataclass(frozen=True)
class RatePrediction:
    """True-pair and accidental rates for one analyzer setting."""

    true_rate: float  # pairs/s
    accidental_rate: float  # counts/s

    def __post_init__(self) -> None:
        if self.true_rate < 0 or self.accidental_rate < 0:
            raise ValueError("rates must be nonnegative")

    @property
    def total_rate(self) -> float:
        return self.true_rate + self.accidental_rate

    def expected(self, integration_time: float) -> float:
        """Expected total counts over the integration time."""
        return self.total_rate * integration_time


def derive_seed(seed: int, *indices: int) -> int:
    """Deterministic child seed for (seed, run/setting indices)."""
    return int(np.random.SeedSequence([int(seed), *map(int, indices)]).generate_state(1)[0])


def accidental_rate(model: DetectorModel) -> float:
    """Accidental coincidence rate under uniform arrival within the gate."""
    if model.trigger_rate <= 0:
        raise ValueError("trigger rate must be positive")
    window_factor = min(1.0, 2.0 * model.coincidence_window / model.gate_width)
    return (
        model.accidental_calibration
        * model.singles_rate_1
        * model.singles_rate_2
        / model.trigger_rate
        * window_factor
    )


def expected_counts(
    state: TwoQubitState,
    model: DetectorModel,
    pair_rate: float,
    pair: PolarizerPair,
    integration_time: float,
) -> RatePrediction:
    """Rates at one analyzer setting; multiply by T for expected counts."""
    if pair_rate < 0:
        raise ValueError(f"pair_rate must be nonnegative, got {pair_rate}")
    if integration_time < 0:
        raise ValueError(f"integration time must be nonnegative, got {integration_time}")
    return RatePrediction(
        true_rate=pair_rate * coincidence_prob(state, pair),
        accidental_rate=accidental_rate(model),
    )


def simulate_counts(
    predictions: list[RatePrediction] | tuple[RatePrediction, ...],
    integration_time: float,
    seed: int,
) -> NDArray[np.int64]:
    """Independent Poisson draws, one per setting. Same seed, same output."""
    if integration_time < 0:
        raise ValueError(f"integration time must be nonnegative, got {integration_time}")
    means = np.array([p.expected(integration_time) for p in predictions])
    rng = np.random.default_rng(seed)
    return rng.poisson(means)


def measure_accidentals(
    model: DetectorModel, integration_time: float, seed: int, n_settings: int = 1
) -> NDArray[np.int64]:
    """Accidental-only Poisson draws, one per setting.

    Simulated analogue of delaying the second detector's trigger out of the
    first detector's window: the same singles, no correlated pairs.
    """
    mean = accidental_rate(model) * integration_time
    rng = np.random.default_rng(seed)
    return rng.poisson(mean, size=n_settings)


def subtract_accidentals(raw, accidentals) -> NDArray[np.float64]:
    """Elementwise raw - accidentals; negative results are kept, not clamped."""
    raw = np.asarray(raw, dtype=float)
    accidentals = np.asarray(accidentals, dtype=float)
    if raw.shape != accidentals.shape:
        raise ConfigurationError(
            f"raw and accidental count arrays differ in shape: {raw.shape} vs {accidentals.shape}"
        )
    return raw - accidentals


# --- CHSH count tables ------------------------------------------------------

# Row/column order of a 4x4 count table: arm-1 settings (t1, t1+90, t1', t1'+90)
# by arm-2 settings (t2, t2+90, t2', t2'+90).
_BLOCKS = (
    ((0, 0), (1, 1), (1, 0), (0, 1)),  # E(t1, t2)
    ((0, 2), (1, 3), (1, 2), (0, 3)),  # E(t1, t2')
    ((2, 0), (3, 1), (3, 0), (2, 1)),  # E(t1', t2)
    ((2, 2), (3, 3), (3, 2), (2, 3)),  # E(t1', t2')
)
_BLOCK_SIGNS = (1.0, -1.0, 1.0, 1.0)


@dataclass(frozen=True)
class CountTable:
    """16 coincidence counts covering the four CHSH correlation blocks."""

    settings: ChshSettings
    counts: NDArray[np.float64]  # (4, 4), ints from simulation, floats allowed
    integration_time: float  # s

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=float)
        if counts.shape != (4, 4):
            raise ValueError(f"counts must be a 4x4 table, got shape {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        if self.integration_time <= 0:
            raise ValueError(f"integration_time must be positive, got {self.integration_time}")
        object.__setattr__(self, "counts", counts)


def chsh_table_angles(settings: ChshSettings) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Arm-1 and arm-2 analyzer angles indexing the 4x4 table (radians)."""
    q = 0.5 * np.pi
    a = np.array([settings.theta1, settings.theta1 + q, settings.theta1p, settings.theta1p + q])
    b = np.array([settings.theta2, settings.theta2 + q, settings.theta2p, settings.theta2p + q])
    return a, b


def expected_count_table(
    state: TwoQubitState,
    settings: ChshSettings,
    model: DetectorModel,
    pair_rate: float,
    integration_time: float,
) -> CountTable:
    """Noiseless table of expected counts (floats), accidentals included."""
    a_angles, b_angles = chsh_table_angles(settings)
    acc = accidental_rate(model)
    counts = np.empty((4, 4))
    for i, ta in enumerate(a_angles):
        for j, tb in enumerate(b_angles):
            prob = coincidence_prob(state, PolarizerPair(ta, tb))
            counts[i, j] = (pair_rate * prob + acc) * integration_time
    return CountTable(settings=settings, counts=counts, integration_time=integration_time)


def simulate_count_table(
    state: TwoQubitState,
    settings: ChshSettings,
    model: DetectorModel,
    pair_rate: float,
    integration_time: float,
    seed: int,
) -> CountTable:
    """Poisson-sampled 16-count table, deterministic for a given seed."""
    expected = expected_count_table(state, settings, model, pair_rate, integration_time)
    rng = np.random.default_rng(seed)
    counts = rng.poisson(expected.counts).astype(float)
    return CountTable(settings=settings, counts=counts, integration_time=integration_time)


def _e_block(counts: NDArray[np.float64], block) -> tuple[float, float]:
    """(E, var_E) for one correlation block with Poisson count variances."""
    c1, c2, c3, c4 = (counts[idx] for idx in block)
    plus = c1 + c2
    minus = c3 + c4
    denom = plus + minus
    if denom <= 0:
        raise DegenerateDataError("coincidence block has an all-zero denominator")
    e = (plus - minus) / denom
    var = ((1.0 - e) ** 2 * plus + (1.0 + e) ** 2 * minus) / denom**2
    return e, var


def chsh_from_counts(table: CountTable, signed: bool = False) -> tuple[float, float]:
    """CHSH parameter and its propagated standard deviation from raw counts.

    Each correlation fraction E comes with variance
    [(1-E)^2 (C1+C2) + (1+E)^2 (C3+C4)] / D^2 assuming independent Poisson
    counts; sigma_S adds the four block variances in quadrature.
    """
    s_signed = 0.0
    var_s = 0.0
    for sign, block in zip(_BLOCK_SIGNS, _BLOCKS):
        e, var = _e_block(table.counts, block)
        s_signed += sign * e
        var_s += var
    s = s_signed if signed else abs(s_signed)
    return float(s), float(np.sqrt(var_s))


def inferred_pair_rate(model: DetectorModel, measured_cc_rate: float) -> float:
    """Generated pair rate implied by a measured coincidence rate.

    Unfolds both detector efficiencies, both collection arms (handled by the
    caller), the gate duty cycle, and the factor 1/2 lost to coincidence
    post-selection at the splitter.
    """
    duty = model.trigger_rate * model.gate_width
    if duty <= 0:
        raise ValueError("gate duty cycle must be positive")
    if model.efficiency_1 <= 0 or model.efficiency_2 <= 0:
        raise ValueError("detector efficiencies must be positive to unfold a pair rate")
    return measured_cc_rate / (model.efficiency_1 * model.efficiency_2 * duty * 0.5)


def efficiency_budget(
    pump_power_in: float,
    objective_T: float,
    facet_T: float,
    overlap: float,
    collection_T_per_arm: float,
    model: DetectorModel,
    measured_cc_rate: float,
    pump_lambda: float = 777.95e-9,
) -> tuple[float, float]:
    """Pump power reaching the guide and the implied conversion efficiency.

    power_in_guide folds the objective and facet transmissions and the
    pump-to-guided-mode overlap. The conversion efficiency is the unfolded
    generated pair rate divided by the pump photon flux at pump_lambda.
    Returns (power_in_guide_W, efficiency).
    """
    for name, t in (
        ("objective_T", objective_T),
        ("facet_T", facet_T),
        ("overlap", overlap),
        ("collection_T_per_arm", collection_T_per_arm),
    ):
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"{name} = {t} outside [0, 1]")
    if pump_power_in < 0:
        raise ValueError("pump power must be nonnegative")
    if measured_cc_rate < 0:
        raise ValueError("measured coincidence rate must be nonnegative")
    if collection_T_per_arm <= 0:
        raise ValueError("collection transmission must be positive to unfold a pair rate")
    power_in_guide = pump_power_in * objective_T * facet_T * overlap
    if power_in_guide <= 0:
        raise ValueError("no pump power reaches the guide; budget undefined")
    pair_rate = inferred_pair_rate(model, measured_cc_rate) / collection_T_per_arm**2
    pump_flux = power_in_guide / (HBAR * omega_from_lambda(pump_lambda))
    return power_in_guide, pair_rate / pump_flux
