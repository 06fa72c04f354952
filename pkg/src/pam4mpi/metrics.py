"""Error counting, confidence intervals, and interference-shift diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelOutput
from .errors import ConfigError, SizeError
from .signal_model import GRAY_CODES, PAM4_AMPLITUDES, SymbolStream

# norm.ppf(0.975): two-sided 95% normal quantile for the Wilson interval.
_Z95 = 1.959963984540054

_GRAY_LUT = np.array(GRAY_CODES, dtype=np.int64)
_POPCOUNT2 = np.array([0, 1, 1, 2], dtype=np.int64)


@dataclass(frozen=True)
class BerRecord:
    """One measurement: error counts, BER, 95% interval, and provenance."""

    bit_errors: int
    total_bits: int
    ber: float
    ci_low: float
    ci_high: float
    measured_symbols: int
    config_digest: object = None

    def __post_init__(self):
        if self.total_bits < 1:
            raise ConfigError(f"total_bits must be >= 1, got {self.total_bits}")
        if self.total_bits != 2 * self.measured_symbols:
            raise ConfigError("total_bits must be 2 bits per measured symbol")
        if self.ber != self.bit_errors / self.total_bits:
            raise ConfigError("ber must equal bit_errors / total_bits")
        if not 0.0 <= self.ci_low <= self.ber <= self.ci_high <= 1.0:
            raise ConfigError("confidence interval must bracket the BER within [0, 1]")


def ber_confidence(errors: int, bits: int) -> tuple[float, float]:
    """95% Wilson score interval for an error proportion."""
    if bits < 1:
        raise ConfigError(f"bits must be >= 1, got {bits}")
    if not 0 <= errors <= bits:
        raise ConfigError(f"errors must lie in 0..bits, got {errors}/{bits}")
    p = errors / bits
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / bits
    center = (p + z2 / (2.0 * bits)) / denom
    half = _Z95 * math.sqrt(p * (1.0 - p) / bits + z2 / (4.0 * bits * bits)) / denom
    # at the endpoints center and half agree algebraically; pin them so
    # rounding cannot push the bound past the observed proportion
    low = 0.0 if errors == 0 else max(0.0, center - half)
    high = 1.0 if errors == bits else min(1.0, center + half)
    return low, high


def count_bit_errors(
    tx: SymbolStream, rx_decisions: np.ndarray, skip: np.ndarray | None = None
) -> BerRecord:
    """Gray-decode both streams and count differing bits over unmasked symbols.

    ``skip`` marks training/warm-up symbols to exclude; two bits per symbol.
    """
    rx = np.asarray(rx_decisions, dtype=np.int64)
    if rx.shape != tx.indices.shape:
        raise SizeError(f"stream lengths differ: tx {len(tx)} vs rx {rx.size}")
    if rx.size and (rx.min() < 0 or rx.max() > 3):
        raise ConfigError("decision indices must lie in 0..3")
    if skip is None:
        keep = slice(None)
        measured = len(tx)
    else:
        skip = np.asarray(skip, dtype=bool)
        if skip.shape != tx.indices.shape:
            raise SizeError(f"skip mask length {skip.size} != stream length {len(tx)}")
        keep = ~skip
        measured = int(keep.sum())
    if measured < 1:
        raise SizeError("skip mask excludes every symbol")
    diff = _GRAY_LUT[tx.indices[keep]] ^ _GRAY_LUT[rx[keep]]
    bit_errors = int(_POPCOUNT2[diff].sum())
    total_bits = 2 * measured
    low, high = ber_confidence(bit_errors, total_bits)
    return BerRecord(
        bit_errors=bit_errors,
        total_bits=total_bits,
        ber=bit_errors / total_bits,
        ci_low=low,
        ci_high=high,
        measured_symbols=measured,
    )


def predicted_spacing(rho: float, bias_vb: float, extreme: str) -> float:
    """Closed-form spacing of the top two received levels at the envelope extremes.

    Returns 1 +/- 2*rho*sqrt(V_b)*(sqrt(V_b+1.5) - sqrt(V_b+0.5)):
    ``"dilate"`` for the envelope pinned at +1, ``"contract"`` at -1.
    """
    if bias_vb <= 1.5:
        raise ConfigError(f"bias_vb must exceed 1.5, got {bias_vb}")
    if not 0 <= rho < 1:
        raise ConfigError(f"rho must lie in [0, 1), got {rho}")
    delta = 2.0 * rho * math.sqrt(bias_vb) * (
        math.sqrt(bias_vb + 1.5) - math.sqrt(bias_vb + 0.5)
    )
    if extreme == "dilate":
        return 1.0 + delta
    if extreme == "contract":
        return 1.0 - delta
    raise ConfigError(f"extreme must be 'dilate' or 'contract', got {extreme!r}")


def reference_levels(rho: float, bias_vb: float, b_bar: float) -> np.ndarray:
    """Mean received level positions for a fixed envelope value.

    R_i = D_i + V_b + 2*rho*sqrt(V_b + D_i)*sqrt(V_b)*b_bar, with the
    delayed-copy amplitude replaced by its average sqrt(V_b).
    """
    if bias_vb <= 1.5:
        raise ConfigError(f"bias_vb must exceed 1.5, got {bias_vb}")
    if not 0 <= rho < 1:
        raise ConfigError(f"rho must lie in [0, 1), got {rho}")
    if not -1.0 <= b_bar <= 1.0:
        raise ConfigError(f"b_bar must lie in [-1, 1], got {b_bar}")
    return (
        PAM4_AMPLITUDES
        + bias_vb
        + 2.0 * rho * np.sqrt(bias_vb + PAM4_AMPLITUDES) * math.sqrt(bias_vb) * b_bar
    )


def dump_waveform(
    output: ChannelOutput,
    rho: float,
    bias_vb: float,
    envelope: np.ndarray,
    start: int,
    stop: int,
) -> dict[str, np.ndarray]:
    """Per-symbol diagnostic table over a window of measured symbols.

    Columns: symbol index ``n``, received sample ``y``, transmitted amplitude
    ``truth_level``, and the four reference-level curves ``r0``..``r3``
    evaluated with the instantaneous envelope.
    """
    n_total = len(output)
    if not (0 <= start < stop <= n_total):
        raise SizeError(
            f"window [{start}, {stop}) outside the measured range of {n_total} symbols"
        )
    envelope = np.asarray(envelope, dtype=np.float64)
    if envelope.size != n_total:
        raise SizeError(
            f"envelope length {envelope.size} != measured length {n_total}"
        )
    if bias_vb <= 1.5:
        raise ConfigError(f"bias_vb must exceed 1.5, got {bias_vb}")
    if not 0 <= rho < 1:
        raise ConfigError(f"rho must lie in [0, 1), got {rho}")
    win = slice(start, stop)
    b_win = envelope[win]
    table = {
        "n": np.arange(start, stop, dtype=np.int64),
        "y": output.samples[win].copy(),
        "truth_level": output.truth[win] - 1.5,
    }
    gain = 2.0 * rho * math.sqrt(bias_vb)
    for i, amp in enumerate(PAM4_AMPLITUDES):
        table[f"r{i}"] = amp + bias_vb + gain * math.sqrt(bias_vb + amp) * b_win
    return table
