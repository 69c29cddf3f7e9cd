"""Measurement chain on Bob's side: loss, photomultiplier response, and the
discriminators that turn arm signals into a Macro-spin outcome."""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .macrostate import FockOccupation
from .rng import as_generator


@dataclass(frozen=True)
class DetectionParams:
    """Bob/Alice efficiencies, PM relative spread, and the filter threshold.

    ``threshold`` is the single scalar compared with the arm-signal
    difference, in detected-signal units.
    """

    eta_B: float = 1.0
    eta_A: float = 1.0
    pm_noise: float = 0.0
    threshold: float = 0.0

    def __post_init__(self):
        for name in ("eta_B", "eta_A"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if not self.pm_noise >= 0:
            raise ValueError(f"pm_noise must be >= 0, got {self.pm_noise}")
        if not self.threshold >= 0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")


@dataclass(frozen=True)
class DetectionEvent:
    detected_plus: float
    detected_minus: float

    def __post_init__(self):
        if self.detected_plus < 0 or self.detected_minus < 0:
            raise ValueError("detected signals must be nonnegative")

    def swapped(self) -> "DetectionEvent":
        return DetectionEvent(self.detected_minus, self.detected_plus)


class OFOutcome(int, Enum):
    PLUS = 1
    MINUS = -1
    INCONCLUSIVE = 0


def thin_binomial(count, eta: float, rng):
    """Each photon survives independently with probability ``eta``.

    Uses numpy's exact binomial sampler for every count, so no large-count
    approximation is involved.  Accepts scalars or arrays.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    counts = np.asarray(count, dtype=np.int64)
    if eta == 1.0:
        out = counts.copy()
    elif eta == 0.0:
        out = np.zeros_like(counts)
    else:
        out = as_generator(rng).binomial(counts, eta)
    return int(out) if out.ndim == 0 else out


def pm_response(count, params: DetectionParams, rng):
    """Photomultiplier signal: the count itself, optionally with Gaussian gain spread."""
    counts = np.asarray(count, dtype=np.float64)
    if params.pm_noise == 0:
        out = counts.copy()
    else:
        eps = as_generator(rng).normal(0.0, params.pm_noise, size=counts.shape)
        out = np.maximum(counts * (1.0 + eps), 0.0)
    return float(out) if out.ndim == 0 else out


def orthogonality_filter(event: DetectionEvent, threshold: float) -> OFOutcome:
    if not threshold >= 0:
        raise ValueError("threshold must be >= 0")
    diff = event.detected_plus - event.detected_minus
    if diff > threshold:
        return OFOutcome.PLUS
    if -diff > threshold:
        return OFOutcome.MINUS
    return OFOutcome.INCONCLUSIVE


def orthogonality_filter_array(det_plus, det_minus, threshold: float) -> np.ndarray:
    """Vectorised filter: +1, -1, or 0 (inconclusive) per event."""
    diff = np.asarray(det_plus, dtype=np.float64) - np.asarray(det_minus, dtype=np.float64)
    return np.where(diff > threshold, 1, np.where(-diff > threshold, -1, 0)).astype(np.int8)


def ideal_parity_discriminator(occ: FockOccupation) -> int:
    """+1 when the pi_phi count is odd (Phi^phi), -1 when even."""
    return 1 if occ.p % 2 == 1 else -1


def ideal_parity_array(p) -> np.ndarray:
    return np.where(np.asarray(p) % 2 == 1, 1, -1).astype(np.int8)


def ideal_difference_discriminator(occ: FockOccupation) -> OFOutcome:
    """Sign of h - v for an H/V occupation; equal arms are inconclusive."""
    if occ.p > occ.q:
        return OFOutcome.PLUS
    if occ.p < occ.q:
        return OFOutcome.MINUS
    return OFOutcome.INCONCLUSIVE


def ideal_difference_array(h, v) -> np.ndarray:
    return np.sign(np.asarray(h, dtype=np.int64) - np.asarray(v, dtype=np.int64)).astype(np.int8)


def expected_arm_signal(mean_total_photons: float, eta_B: float) -> float:
    """Mean detected signal per arm for noiseless unbiased PMs."""
    return 0.5 * eta_B * mean_total_photons

