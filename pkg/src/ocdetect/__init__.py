"""Coordinate-descent data detection for massive MU-MIMO-OFDM."""

from .channel import ChannelInstance, gen_channel, gen_noise, n0_from_ebn0, transmit
from .detect import (
    DetectorMode,
    EqualizerOutput,
    OcdPreprocessed,
    cd_reference,
    gram_and_mf,
    mmse_exact,
    multiplication_count_cd,
    multiplication_count_ocd,
    objective_value,
    ocd_detect,
    ocd_equalize,
    ocd_preprocess,
)
from .errors import (
    ConfigError,
    DegenerateError,
    OcdError,
    ParameterError,
    RangeError,
    ShapeError,
    SolverError,
    TrialError,
)
from .fxp import (
    Q16_11,
    FixedPointFormat,
    ReciprocalLut,
    inner_product_shifted,
    latency_cycles,
    latency_seconds,
    ocd_fixed,
    quantize,
    recip_lut,
)
from .modem import (
    Constellation,
    Scheme,
    build_constellation,
    llr_maxlog,
    map_bits,
    project_box,
    slice_hard,
)
from .sim import Detector, SimConfig, SimReport, emit_csv, run_sweep, run_trial

__version__ = "0.1.0"
