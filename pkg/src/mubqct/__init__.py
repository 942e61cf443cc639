"""Key distribution from basis-hidden multi-copy quantum encodings.

The package provides the complete mutually unbiased basis construction in
power-of-two dimensions, a round-level Monte Carlo model of the protocol,
exhaustive and closed-form adversary bounds, and the detection/key-rate
model used for rate-versus-distance studies.
"""

from .detection import (
    DETECTOR_PRESETS,
    ChannelModel,
    DetectionStats,
    DetectorModel,
    McDetectionStats,
    conditional_entropy_xy,
    detection_stats,
    mc_detection_stats,
    physical_click_probability,
    transmittance,
)
from .errors import CapabilityError, ConstraintError, DegenerateModeError
from .mub import (
    Dimension,
    MubFamily,
    VerificationReport,
    basis_state,
    build_mub_family,
    export_family,
    load_family,
    verify_unbiasedness,
)
from .protocol import (
    LOCKED,
    MultipartyResult,
    ProtocolParams,
    ProtocolTranscript,
    TimelockEnvelope,
    bob_povm,
    decohere,
    encode_index,
    multiparty_run,
    prepare_state,
    privacy_amplify,
    run_protocol,
    timelock_reveal,
)
from .ratemodel import (
    MaxDistanceResult,
    RatePoint,
    SweepRow,
    coherent_mu_max,
    key_rate,
    m_scan_limit,
    max_distance,
    optimize_m,
    sweep,
    sweep_rows_to_csv,
)
from .security import (
    BoundsReport,
    EveSimResult,
    MonotonicityReport,
    alicki_fannes_iacc,
    bounds_report,
    encoding_average_state,
    f_operator,
    helstrom_multi_bound,
    helstrom_numeric,
    helstrom_paper_single,
    hmin_bits,
    iacc_bound,
    lambda_numeric,
    lambda_numeric_for_d,
    lambda_paper_bound,
    pguess_certified,
    pguess_multi_paper,
    pguess_paper,
    pguess_single_paper,
    pinsker_delta,
    security_distance_bounds,
    simulate_eve_random_basis,
    strategy_monotonicity,
    theorem1_bound,
    trace_norm,
)

__version__ = "0.1.0"
