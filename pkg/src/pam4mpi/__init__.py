"""Monte-Carlo simulator for PAM4 links impaired by a delayed reflection.

The package models a single optical reflection interfering with a PAM4
intensity-modulated signal: the reflected copy beats against the signal
with a phase offset plus laser phase noise, dilating or contracting the
received constellation and moving the bit error rate between two extremes.
Modules: signal_model (alphabet and configuration), phase_noise (laser
phase walk and geometry), channel (interference and noise), equalizer
(adaptive FFE with bias tap), metrics (BER counting and predictors), and
sweep (end-to-end runs, grids, CSV, plots).
"""

from .channel import (
    AC_SIGNAL_POWER,
    ChannelOutput,
    add_awgn,
    apply_mpi,
    rho_to_sir,
    sir_to_rho,
)
from .equalizer import EqualizerConfig, EqualizerState, equalize, slicer
from .errors import (
    ConfigError,
    DecisionError,
    DivergenceError,
    SizeError,
    SweepError,
)
from .metrics import (
    BerRecord,
    ber_confidence,
    count_bit_errors,
    dump_waveform,
    predicted_spacing,
    reference_levels,
)
from .phase_noise import (
    DriftSpec,
    PhasePath,
    coherence_length_m,
    delay_symbols,
    delayed_difference,
    envelope_b,
    phi_from_drift,
    wiener_phase,
)
from .signal_model import (
    GRAY_CODES,
    PAM4_AMPLITUDES,
    PAM4_LEVELS,
    LinkConfig,
    Pam4Level,
    SymbolStream,
    extinction_ratio_db,
    generate_symbols,
    gray_map,
    gray_unmap,
)
from .sweep import (
    CSV_HEADER,
    SweepGrid,
    SweepPoint,
    SweepResult,
    cell_seed,
    emit_plots,
    read_csv,
    run_point,
    run_sweep,
    simulate_channel,
    write_csv,
)

__version__ = "0.1.0"
