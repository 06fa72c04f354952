"""PAM4 alphabet, gray labeling, symbol generation, and the link configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .phase_noise import delay_symbols as _quantize_delay

# Amplitude alphabet; level i transmits amplitude i - 1.5.
PAM4_AMPLITUDES = np.array([-1.5, -0.5, 0.5, 1.5])

# Reflected gray labels (2-bit ints, MSB first): 00, 01, 11, 10.
# Amplitude-adjacent levels differ in exactly one bit.
GRAY_CODES = (0b00, 0b01, 0b11, 0b10)
_INDEX_BY_GRAY = (0, 1, 3, 2)


@dataclass(frozen=True)
class Pam4Level:
    """One constellation point: index, amplitude, and 2-bit gray label."""

    index: int
    amplitude: float
    bits: int


PAM4_LEVELS = tuple(Pam4Level(i, i - 1.5, GRAY_CODES[i]) for i in range(4))


def gray_map(index: int) -> int:
    """Gray label of a level index (0..3 -> 00, 01, 11, 10)."""
    if index not in (0, 1, 2, 3):
        raise ConfigError(f"PAM4 level index must be in 0..3, got {index}")
    return GRAY_CODES[index]


def gray_unmap(bits: int) -> int:
    """Level index of a 2-bit gray label; inverse of gray_map."""
    if bits not in (0, 1, 2, 3):
        raise ConfigError(f"gray label must be a 2-bit value, got {bits}")
    return _INDEX_BY_GRAY[bits]


def extinction_ratio_db(bias_vb: float) -> float:
    """Extinction ratio 10*log10((V_b + 1.5) / (V_b - 1.5)) of the biased alphabet."""
    if bias_vb <= 1.5:
        raise ConfigError(
            f"bias must exceed 1.5 so all optical power levels are positive, got {bias_vb}"
        )
    return 10.0 * math.log10((bias_vb + 1.5) / (bias_vb - 1.5))


@dataclass(frozen=True)
class SymbolStream:
    """Transmitted PAM4 symbols: level indices plus their amplitudes."""

    indices: np.ndarray
    levels: np.ndarray = field(init=False)

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=np.int64)
        if indices.ndim != 1 or indices.size < 1:
            raise ConfigError("symbol stream must be a non-empty 1-D sequence")
        if indices.min() < 0 or indices.max() > 3:
            raise ConfigError("symbol indices must lie in 0..3")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "levels", indices - 1.5)

    def __len__(self) -> int:
        return self.indices.size


def generate_symbols(count: int, seed: int) -> SymbolStream:
    """Draw ``count`` i.i.d. uniform PAM4 symbols from a seeded generator.

    Identical (count, seed) pairs yield bit-identical streams.
    """
    if count < 1:
        raise ConfigError(f"cannot generate an empty symbol stream (count={count})")
    rng = np.random.default_rng(seed)
    return SymbolStream(rng.integers(0, 4, size=count, dtype=np.int64))


@dataclass(frozen=True)
class LinkConfig:
    """Full parameterization of one simulated link point.

    The reflection delay is given either as an extra path length in meters
    (``path_length_m``, quantized to whole symbols via the group index) or
    directly as ``delay_symbols``; exactly one of the two must be set.
    ``snr_db = inf`` disables receiver noise, ``mpi_enabled = False``
    disables the reflection entirely (interference ratio 0).
    """

    baud_rate: float = 106.25e9
    num_symbols: int = 900_000
    bias_vb: float = 3.5
    linewidth_hz: float = 5e6
    fiber_index: float = 1.468
    sir_db: float = 20.0
    phi_rad: float = 0.0
    path_length_m: float | None = None
    delay_symbols: int | None = None
    snr_db: float = 18.0
    train_len: int = 10_000
    master_seed: int = 0
    mpi_enabled: bool = True

    def __post_init__(self):
        if self.baud_rate <= 0:
            raise ConfigError(f"baud_rate must be positive, got {self.baud_rate}")
        if self.num_symbols < 1:
            raise ConfigError(f"num_symbols must be >= 1, got {self.num_symbols}")
        if self.bias_vb <= 1.5:
            raise ConfigError(
                f"bias_vb must exceed 1.5 so optical power stays positive, got {self.bias_vb}"
            )
        if self.linewidth_hz < 0:
            raise ConfigError(f"linewidth_hz must be non-negative, got {self.linewidth_hz}")
        if self.fiber_index < 1:
            raise ConfigError(f"fiber_index must be >= 1, got {self.fiber_index}")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ConfigError(f"snr_db must be finite or +inf, got {self.snr_db}")
        if self.train_len < 0:
            raise ConfigError(f"train_len must be non-negative, got {self.train_len}")
        if self.master_seed < 0:
            raise ConfigError(f"master_seed must be non-negative, got {self.master_seed}")
        if self.mpi_enabled and not (math.isfinite(self.sir_db) and self.sir_db > 0):
            raise ConfigError(
                f"sir_db must be positive and finite when MPI is on, got {self.sir_db}"
            )
        if (self.path_length_m is None) == (self.delay_symbols is None):
            raise ConfigError(
                "exactly one of path_length_m and delay_symbols must be specified"
            )
        if self.path_length_m is not None and self.path_length_m < 0:
            raise ConfigError(f"path_length_m must be non-negative, got {self.path_length_m}")
        if self.delay_symbols is not None and self.delay_symbols < 0:
            raise ConfigError(f"delay_symbols must be non-negative, got {self.delay_symbols}")
        delay = self.delay_symbol_count()
        if self.num_symbols <= self.train_len + delay:
            raise ConfigError(
                f"num_symbols ({self.num_symbols}) must exceed train_len + delay "
                f"({self.train_len} + {delay})"
            )

    def delay_symbol_count(self) -> int:
        """Reflection delay in whole symbols, resolving a path length if needed."""
        if self.delay_symbols is not None:
            return self.delay_symbols
        return _quantize_delay(self.path_length_m, self.fiber_index, self.baud_rate)

    @property
    def symbol_period(self) -> float:
        return 1.0 / self.baud_rate
