"""Analyzer projections, coincidence fringes, and CHSH evaluation.

Projection conventions (watch the arm asymmetry, sign slips here flip
fringes silently):

    arm 1: |p1> = cos(t1)|H> - sin(t1)|V>
    arm 2: |p2> = sin(t2)|H> + cos(t2)|V>

so the ideal (|HV> + |VH>)/sqrt(2) pair gives coincidence probability
cos^2(t1 + t2) / 2. Orthogonal settings are t + 90 degrees. The
correlation fraction for one pair of settings is

    E = [C(t1,t2) + C(t1p,t2p) - C(t1p,t2) - C(t1,t2p)] / [sum of the four]

with tp = t + 90 deg, and the CHSH sum is

    S = |E(t1,t2) - E(t1,t2') + E(t1',t2) + E(t1',t2')|.

The single-angle family t1 = 0, t2 = t, t1' = -2t, t2' = 3t satisfies
t = t2 - t1 = t2' + t1' = -t2 - t1' and turns the ideal signed sum into
3 cos(2t) - cos(6t), maximal (2 sqrt 2) at t = 22.5 degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import ConfigurationError, DegenerateDataError
from .state import TwoQubitState

__all__ = [
    "PolarizerPair",
    "ChshSettings",
    "FringeResult",
    "FringeFit",
    "analyzer_vector",
    "coincidence_prob",
    "fit_fringe",
    "visibility_max_min",
    "fringe_scan",
    "correlation_E",
    "chsh_signed",
    "chsh_S",
    "s_curve",
]

_QUARTER_TURN = 0.5 * np.pi


@dataclass(frozen=True)
class PolarizerPair:
    """Analyzer angles for arm 1 and arm 2, radians."""

    theta1: float
    theta2: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.theta1) and np.isfinite(self.theta2)):
            raise ValueError("analyzer angles must be finite")

    def orthogonal(self) -> "PolarizerPair":
        """Both analyzers rotated by 90 degrees."""
        return PolarizerPair(self.theta1 + _QUARTER_TURN, self.theta2 + _QUARTER_TURN)


@dataclass(frozen=True)
class ChshSettings:
    """The four analyzer angles of a CHSH measurement, radians."""

    theta1: float
    theta1p: float
    theta2: float
    theta2p: float

    def __post_init__(self) -> None:
        for v in (self.theta1, self.theta1p, self.theta2, self.theta2p):
            if not np.isfinite(v):
                raise ValueError("CHSH angles must be finite")

    @classmethod
    def canonical(cls, theta: float) -> "ChshSettings":
        """Single-angle family (0, -2t, t, 3t)."""
        return cls(theta1=0.0, theta1p=-2.0 * theta, theta2=theta, theta2p=3.0 * theta)


def analyzer_vector(theta1: float, theta2: float) -> NDArray[np.float64]:
    """Projector ket |p1>|p2> in the (HH, HV, VH, VV) basis."""
    c1, s1 = np.cos(theta1), np.sin(theta1)
    c2, s2 = np.cos(theta2), np.sin(theta2)
    return np.array([c1 * s2, c1 * c2, -s1 * s2, -s1 * c2])


def coincidence_prob(state: TwoQubitState, pair: PolarizerPair) -> float:
    """Probability <p1 p2| rho |p1 p2> of a coincidence at the given settings."""
    v = analyzer_vector(pair.theta1, pair.theta2)
    return float(np.real(v @ state.rho @ v))


class FringeFit(NamedTuple):
    """Least-squares fit of y = offset + amplitude * cos(2 theta + phase)."""

    offset: float
    amplitude: float
    phase: float
    visibility: float


def fit_fringe(theta: NDArray[np.float64], values: NDArray[np.float64]) -> FringeFit:
    """Fit a + b cos(2 theta + phi) by linear least squares.

    Returns visibility = b / a unclamped, so count-level noise propagates
    into the estimate without bias. Expects at least 4 samples spanning a
    full turn for a well-posed fit; callers enforce their own grid rules.
    """
    theta = np.asarray(theta, dtype=float)
    values = np.asarray(values, dtype=float)
    if theta.shape != values.shape:
        raise ConfigurationError(
            f"angle and value arrays differ in shape: {theta.shape} vs {values.shape}"
        )
    design = np.column_stack([np.ones_like(theta), np.cos(2.0 * theta), np.sin(2.0 * theta)])
    (a, p, q), *_ = np.linalg.lstsq(design, values, rcond=None)
    amplitude = float(np.hypot(p, q))
    if a <= 0.0:
        raise DegenerateDataError(f"fringe offset {a:.3e} is not positive; nothing to normalize by")
    phase = float(np.arctan2(-q, p))
    return FringeFit(offset=float(a), amplitude=amplitude, phase=phase, visibility=amplitude / float(a))


def visibility_max_min(values: Sequence[float]) -> float:
    """Literal (Max - Min) / (Max + Min) fringe contrast."""
    values = np.asarray(values, dtype=float)
    hi, lo = float(values.max()), float(values.min())
    if hi + lo == 0.0:
        raise DegenerateDataError("max + min is zero; contrast undefined")
    return (hi - lo) / (hi + lo)


@dataclass(frozen=True)
class FringeResult:
    """Model fringe over a theta2 grid with its fitted visibility."""

    angles: NDArray[np.float64]
    probabilities: NDArray[np.float64]
    visibility: float
    fit_phase: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility {self.visibility} outside [0, 1]")


def fringe_scan(
    state: TwoQubitState, theta1: float, theta2_grid: Sequence[float]
) -> FringeResult:
    """Coincidence probabilities versus theta2 at fixed theta1, with visibility.

    Visibility comes from the sinusoidal least-squares fit, not raw
    max/min; on noiseless model output the two agree. The grid must hold
    at least 4 points and span a full turn.
    """
    grid = np.asarray(theta2_grid, dtype=float)
    if grid.size < 4:
        raise ConfigurationError(f"theta2 grid needs at least 4 points, got {grid.size}")
    if grid.max() - grid.min() < 2.0 * np.pi - 1e-9:
        raise ConfigurationError("theta2 grid must span at least 360 degrees")
    c1, s1 = np.cos(theta1), np.sin(theta1)
    c2, s2 = np.cos(grid), np.sin(grid)
    vecs = np.stack([c1 * s2, c1 * c2, -s1 * s2, -s1 * c2], axis=1)
    probs = np.real(np.einsum("ki,ij,kj->k", vecs, state.rho, vecs))
    fit = fit_fringe(grid, probs)
    # model probabilities keep b <= a; clip the roundoff excursion only
    vis = float(np.clip(fit.visibility, 0.0, 1.0))
    return FringeResult(angles=grid, probabilities=probs, visibility=vis, fit_phase=fit.phase)


def correlation_E(state: TwoQubitState, pair: PolarizerPair) -> float:
    """Correlation fraction E built from the four +/-90-degree projections."""
    t1, t2 = pair.theta1, pair.theta2
    c_pp = coincidence_prob(state, PolarizerPair(t1, t2))
    c_oo = coincidence_prob(state, PolarizerPair(t1 + _QUARTER_TURN, t2 + _QUARTER_TURN))
    c_op = coincidence_prob(state, PolarizerPair(t1 + _QUARTER_TURN, t2))
    c_po = coincidence_prob(state, PolarizerPair(t1, t2 + _QUARTER_TURN))
    denom = c_pp + c_oo + c_op + c_po
    if denom <= 0.0:
        raise DegenerateDataError("all four coincidence probabilities vanish")
    return (c_pp + c_oo - c_op - c_po) / denom


def chsh_signed(state: TwoQubitState, settings: ChshSettings) -> float:
    """CHSH sum without the absolute value (negative lobes preserved)."""
    e11 = correlation_E(state, PolarizerPair(settings.theta1, settings.theta2))
    e12 = correlation_E(state, PolarizerPair(settings.theta1, settings.theta2p))
    e21 = correlation_E(state, PolarizerPair(settings.theta1p, settings.theta2))
    e22 = correlation_E(state, PolarizerPair(settings.theta1p, settings.theta2p))
    return e11 - e12 + e21 + e22


def chsh_S(state: TwoQubitState, settings: ChshSettings) -> float:
    """CHSH parameter |E(t1,t2) - E(t1,t2') + E(t1',t2) + E(t1',t2')|."""
    return abs(chsh_signed(state, settings))


def s_curve(state: TwoQubitState, theta_grid: Sequence[float]) -> NDArray[np.float64]:
    """Signed CHSH sum along the canonical settings family (0, -2t, t, 3t).

    Signed so the ideal state traces 3 cos(2t) - cos(6t), negative lobes
    included.
    """
    theta_grid = np.asarray(theta_grid, dtype=float)
    if not np.all(np.isfinite(theta_grid)):
        raise ConfigurationError("theta grid must be finite")
    return np.array([chsh_signed(state, ChshSettings.canonical(t)) for t in theta_grid])
