"""Single-reflection interference channel and receiver noise.

The received sample for transmitted amplitude d[n] is

    y[n] = d[n] + V_b + 2*rho*sqrt(V_b + d[n])*sqrt(V_b + d[n - delay])*B[n]

where rho^2 is the reflected-to-signal power ratio and B[n] the phase
envelope.  One sample per symbol; no pulse shaping or receiver filtering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SizeError

# AC-coupled data power E[d^2] of the PAM4 alphabet; the noise variance is
# referenced to this, excluding the bias and the interference term.
AC_SIGNAL_POWER = 1.25


@dataclass(frozen=True)
class ChannelOutput:
    """Received samples with ground-truth alignment.

    ``samples[n]`` is the received value for measured symbol n, ``truth[n]``
    its transmitted level index.  ``mpi_term`` optionally keeps the
    interference summand for diagnostics.
    """

    samples: np.ndarray
    truth: np.ndarray
    mpi_term: np.ndarray | None = None

    def __post_init__(self):
        if self.samples.shape != self.truth.shape:
            raise SizeError(
                f"samples and truth lengths differ: {self.samples.size} vs {self.truth.size}"
            )
        if self.mpi_term is not None and self.mpi_term.shape != self.samples.shape:
            raise SizeError("mpi_term length must match samples")

    def __len__(self) -> int:
        return self.samples.size


def sir_to_rho(sir_db: float) -> float:
    """Field interference ratio rho = 10^(-SIR/20); SIR = +inf maps to rho = 0."""
    if math.isnan(sir_db):
        raise ConfigError("sir_db must not be NaN")
    if sir_db == math.inf:
        return 0.0
    rho = 10.0 ** (-sir_db / 20.0)
    if rho >= 1.0:
        raise ConfigError(f"sir_db must be positive (rho < 1), got {sir_db}")
    return rho


def rho_to_sir(rho: float) -> float:
    """SIR in dB, -20*log10(rho); rho = 0 maps to +inf."""
    if rho < 0 or rho >= 1:
        raise ConfigError(f"rho must lie in [0, 1), got {rho}")
    if rho == 0:
        return math.inf
    return -20.0 * math.log10(rho)


def apply_mpi(
    levels: np.ndarray,
    bias_vb: float,
    rho: float,
    delay_symbols: int,
    envelope: np.ndarray,
    keep_mpi_term: bool = False,
) -> ChannelOutput:
    """Build the noiseless received waveform for one reflection.

    ``levels`` must carry ``delay_symbols`` lead-in samples in front of the
    measured region so the delayed copy is defined for every measured symbol.
    ``envelope`` holds B[n] either for the measured region only or for the
    full lead-in-included length (the lead-in entries are then ignored).
    """
    if bias_vb <= 1.5:
        raise ConfigError(
            f"bias_vb must exceed 1.5 so the radicands stay positive, got {bias_vb}"
        )
    if not 0 <= rho < 1:
        raise ConfigError(f"rho must lie in [0, 1), got {rho}")
    if delay_symbols < 0:
        raise ConfigError(f"delay_symbols must be non-negative, got {delay_symbols}")
    levels = np.asarray(levels, dtype=np.float64)
    num_measured = levels.size - delay_symbols
    if num_measured < 1:
        raise SizeError(
            f"{levels.size} levels cannot supply a {delay_symbols}-symbol lead-in"
        )
    envelope = np.asarray(envelope, dtype=np.float64)
    if envelope.size == levels.size:
        envelope = envelope[delay_symbols:]
    elif envelope.size != num_measured:
        raise SizeError(
            f"envelope length {envelope.size} matches neither the measured count "
            f"{num_measured} nor the full length {levels.size}"
        )

    d_now = levels[delay_symbols:]
    d_delayed = levels[:num_measured]
    mpi = 2.0 * rho * np.sqrt(bias_vb + d_now) * np.sqrt(bias_vb + d_delayed) * envelope
    samples = d_now + bias_vb + mpi
    truth = np.rint(d_now + 1.5).astype(np.int64)
    return ChannelOutput(
        samples=samples, truth=truth, mpi_term=mpi if keep_mpi_term else None
    )


def add_awgn(output: ChannelOutput, snr_db: float, seed: int) -> ChannelOutput:
    """Add seeded white Gaussian noise at the given SNR.

    The noise variance is AC_SIGNAL_POWER / 10^(SNR/10), referenced to the
    ideal data power only; ``snr_db = inf`` returns the input unchanged.
    Truth alignment and any retained interference term are never altered.
    """
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise ConfigError(f"snr_db must be finite or +inf, got {snr_db}")
    if snr_db == math.inf:
        return output
    sigma = math.sqrt(AC_SIGNAL_POWER / 10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    noisy = output.samples + rng.normal(0.0, sigma, output.samples.size)
    return ChannelOutput(samples=noisy, truth=output.truth, mpi_term=output.mpi_term)
