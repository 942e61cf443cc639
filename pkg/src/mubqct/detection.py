"""Click statistics for m-copy signals on threshold detectors.

The receiver routes each arriving copy to the detector matching its
encoded bit with probability given by the interference visibility V, and
each of the n detectors additionally dark-fires with probability p_dark.
The analytic model tracks the three leading event classes per outcome:

  right click: all arrivals in the good detector and no dark count,
               or a dark count in the good detector (with or without
               signal support);
  wrong click: the mirror classes on the bad detector side.

Cross terms (signal split across detectors, signal contradicted by a
dark count) are deliberately excluded from both probabilities, and the
round-level simulation erases such rounds for consistency.  The Monte
Carlo oracle below samples raw per-copy and per-detector events and
classifies them with exactly this taxonomy, so it estimates the same
quantities without sharing any algebra with the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModeError


def transmittance(length_km: float, alpha_db_per_km: float = 0.2) -> float:
    """Fiber transmission 10^(-alpha L / 10)."""
    if length_km < 0:
        raise ValueError(f"length_km must be >= 0, got {length_km}")
    if alpha_db_per_km <= 0:
        raise ValueError(f"alpha_db_per_km must be > 0, got {alpha_db_per_km}")
    return 10.0 ** (-alpha_db_per_km * length_km / 10.0)


@dataclass(frozen=True)
class ChannelModel:
    """Attenuating fiber characterized by a dB/km loss coefficient."""

    alpha_db_per_km: float = 0.2
    length_km: float = 0.0

    def __post_init__(self):
        if self.alpha_db_per_km <= 0:
            raise ValueError(f"alpha_db_per_km must be > 0, got {self.alpha_db_per_km}")
        if self.length_km < 0:
            raise ValueError(f"length_km must be >= 0, got {self.length_km}")

    @property
    def transmittance(self) -> float:
        return transmittance(self.length_km, self.alpha_db_per_km)


@dataclass(frozen=True)
class DetectorModel:
    """Threshold detection stage: efficiency, visibility, dark counts."""

    eta: float = 1.0
    visibility: float = 1.0
    p_dark: float = 0.0
    n_detectors: int = 2

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if not 0.0 < self.visibility <= 1.0:
            raise ValueError(f"visibility must be in (0, 1], got {self.visibility}")
        if not 0.0 <= self.p_dark < 1.0:
            raise ValueError(f"p_dark must be in [0, 1), got {self.p_dark}")
        if self.n_detectors < 2:
            raise ValueError(f"n_detectors must be >= 2, got {self.n_detectors}")


DETECTOR_PRESETS = {
    # superconducting nanowire, cryostat-grade dark counts
    "snspd_lab": DetectorModel(eta=0.66, visibility=0.995, p_dark=1e-8),
    # free-running InGaAs avalanche diode, field conditions
    "ingaas_field": DetectorModel(eta=0.20, visibility=0.99, p_dark=1e-5),
}


@dataclass(frozen=True)
class DetectionStats:
    """Outcome probabilities for one signal of m copies."""

    p_signal_click: float
    p_right: float
    p_wrong: float
    p_click: float
    p_c: float
    p_e: float
    mode: str


def detection_stats(t: float, detector: DetectorModel, m, mode: str = "normalized") -> DetectionStats:
    """Closed-form click statistics at channel transmittance t.

    m may be a positive real when modelling a coherent source by its mean
    photon number.  mode selects the click normalization:

    - "normalized": P_click = P_right + P_wrong, so p_c + p_e = 1.  This is
      the default and the only mode the key-rate model uses.
    - "paper": P_click = P_signal_click * n * p_dark, a historical
      normalization kept for comparison.  Its conditional ratios are not
      probabilities (they may exceed 1), and it is undefined at p_dark = 0.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmittance must be in [0, 1], got {t}")
    if m <= 0:
        raise ValueError(f"m must be positive, got {m}")
    if mode not in ("normalized", "paper"):
        raise ValueError(f"mode must be 'normalized' or 'paper', got {mode!r}")

    s = t * detector.eta
    v = detector.visibility
    p = detector.p_dark
    n = detector.n_detectors

    no_arrival = (1.0 - s) ** m
    # binomial sums over i >= 1 arrivals weighted by V^i resp. (1-V)^i;
    # for small s the direct differences of near-1 powers cancel to zero
    # in double precision, so they are evaluated in log space instead
    if 0.0 < s < 0.5:
        log_none = m * math.log1p(-s)
        p_signal_click = -math.expm1(log_none)
        p_all_good = math.exp(log_none) * math.expm1(
            m * (math.log1p(-s * (1.0 - v)) - math.log1p(-s))
        )
        p_all_bad = math.exp(log_none) * math.expm1(
            m * (math.log1p(-s * v) - math.log1p(-s))
        )
    else:
        p_signal_click = 1.0 - no_arrival
        p_all_good = (1.0 - s + s * v) ** m - no_arrival
        p_all_bad = (1.0 - s * v) ** m - no_arrival

    no_dark = (1.0 - p) ** n
    p_right = p_all_good * no_dark + no_arrival * p + p_all_good * p
    p_wrong = p_all_bad * no_dark + no_arrival * (n - 1) * p + p_all_bad * (n - 1) * p

    if mode == "paper":
        p_click = p_signal_click * n * p
        if p_click == 0.0:
            raise DegenerateModeError(
                "paper-mode P_click = P_signal * n * p_dark vanishes (p_dark = 0 "
                "or no signal); conditional ratios are undefined"
            )
    else:
        p_click = p_right + p_wrong
        if p_click <= 0.0:
            raise DegenerateModeError(
                "no click mass: both signal and dark contributions are zero"
            )

    return DetectionStats(
        p_signal_click=p_signal_click,
        p_right=p_right,
        p_wrong=p_wrong,
        p_click=p_click,
        p_c=p_right / p_click,
        p_e=p_wrong / p_click,
        mode=mode,
    )


def physical_click_probability(t: float, detector: DetectorModel, m) -> float:
    """Probability that at least one detector fires, with no taxonomy cuts.

    Upper-bounds the simulated click rate: the round-level simulation
    erases ambiguous firing patterns on top of the no-click rounds.
    """
    s = t * detector.eta
    if s >= 1.0:
        return 1.0
    log_none = m * math.log1p(-s) + detector.n_detectors * math.log1p(-detector.p_dark)
    return -math.expm1(log_none)


@dataclass(frozen=True)
class McDetectionStats:
    """Monte Carlo estimate of the taxonomy-classified click ratios."""

    p_c: float
    p_e: float
    n_right: int
    n_wrong: int
    n_samples: int

    @property
    def se_p_c(self) -> float:
        """Binomial standard error of p_c given the classified count."""
        n = self.n_right + self.n_wrong
        return math.sqrt(max(self.p_c * (1.0 - self.p_c), 0.0) / n) if n else float("nan")


def mc_detection_stats(
    t: float, detector: DetectorModel, m: int, n_samples: int, seed: int
) -> McDetectionStats:
    """Sample raw detection events and classify them like the closed forms.

    Per sample: arrivals ~ Binomial(m, t*eta), each arrival lands in the
    good detector w.p. V, every detector dark-fires independently w.p.
    p_dark.  A sample counts as right/wrong according to the three event
    classes in the module docstring; classes outside the taxonomy are
    dropped.  For n_detectors = 2 the classification matches the analytic
    probabilities exactly; for n > 2 the wrong-side dark class uses
    "any bad detector dark", an O(p_dark^2) mismatch.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    s = t * detector.eta
    v = detector.visibility
    p = detector.p_dark
    n_det = detector.n_detectors

    rng = np.random.default_rng(seed)
    arrivals = rng.binomial(m, s, size=n_samples)
    n_good = rng.binomial(arrivals, v)
    dark_good = rng.random(n_samples) < p
    n_dark_bad = rng.binomial(n_det - 1, p, size=n_samples)

    got_signal = arrivals > 0
    all_good = got_signal & (n_good == arrivals)
    all_bad = got_signal & (n_good == 0)
    no_arrival = ~got_signal
    dark_bad = n_dark_bad > 0
    dark_none = ~dark_good & ~dark_bad

    right = (all_good & (dark_none | dark_good)) | (no_arrival & dark_good)
    wrong = (all_bad & (dark_none | dark_bad)) | (no_arrival & dark_bad)

    n_right = int(np.count_nonzero(right))
    n_wrong = int(np.count_nonzero(wrong))
    total = n_right + n_wrong
    if total == 0:
        raise DegenerateModeError("no classifiable click events sampled")
    return McDetectionStats(
        p_c=n_right / total,
        p_e=n_wrong / total,
        n_right=n_right,
        n_wrong=n_wrong,
        n_samples=n_samples,
    )


def conditional_entropy_xy(p_c: float, p_e: float, n_detectors: int = 2) -> float:
    """Bob's residual uncertainty H(X|Y) in bits.

    p_c and p_e are the conditional probabilities of the right and wrong
    detector firing given a click; with n_detectors > 2 the wrong mass is
    spread evenly over the n - 1 bad detectors.
    """
    if not 0.0 <= p_c <= 1.0 or not 0.0 <= p_e <= 1.0:
        raise ValueError(f"p_c and p_e must be in [0, 1], got {p_c}, {p_e}")
    if p_c + p_e > 1.0 + 1e-9:
        raise ValueError(f"p_c + p_e must not exceed 1, got {p_c + p_e}")
    h = 0.0
    if p_c > 0.0:
        h -= p_c * math.log2(p_c)
    if p_e > 0.0:
        h -= p_e * math.log2(p_e / (n_detectors - 1))
    return h
