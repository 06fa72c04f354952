"""Laser phase random walk, delayed phase differences, and path geometry.

The laser phase is modelled as a Wiener process: independent Gaussian
increments with variance 2*pi*linewidth*T_s per symbol period T_s.  A
reflection delayed by tau sees the phase difference theta(t) - theta(t-tau),
which enters the interference term through the envelope cos(phi + dtheta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as _C_VACUUM

from .errors import ConfigError, SizeError


@dataclass(frozen=True)
class PhasePath:
    """Cumulative laser phase samples, one per symbol slot.

    ``theta[0]`` is 0 by convention; increments are i.i.d. zero-mean
    Gaussian with variance 2*pi*linewidth*symbol_period.
    """

    theta: np.ndarray
    symbol_period: float

    def __post_init__(self):
        if self.theta.ndim != 1 or self.theta.size < 1:
            raise SizeError("phase path must be a non-empty 1-D array")
        if self.theta[0] != 0.0:
            raise ConfigError("phase path must start at zero")
        if self.symbol_period <= 0:
            raise ConfigError(f"symbol_period must be positive, got {self.symbol_period}")

    def __len__(self) -> int:
        return self.theta.size


@dataclass(frozen=True)
class DriftSpec:
    """Carrier frequency, its drift over one reflection delay, and the delay.

    omega_o        carrier angular frequency (rad/s)
    delta_omega    angular-frequency drift accumulated over the delay (rad/s)
    tau            reflection round-trip delay (s)
    """

    omega_o: float
    delta_omega: float
    tau: float

    def __post_init__(self):
        if self.tau < 0:
            raise ConfigError(f"delay tau must be non-negative, got {self.tau}")


def wiener_phase(length: int, linewidth_hz: float, symbol_period: float, seed: int) -> PhasePath:
    """Generate a seeded phase random walk of ``length`` samples.

    Per-step variance is 2*pi*linewidth_hz*symbol_period; theta[0] = 0.
    Identical arguments produce bit-identical paths.
    """
    if length < 1:
        raise SizeError(f"path length must be >= 1, got {length}")
    if linewidth_hz < 0:
        raise ConfigError(f"linewidth must be non-negative, got {linewidth_hz}")
    if symbol_period <= 0:
        raise ConfigError(f"symbol_period must be positive, got {symbol_period}")
    theta = np.zeros(length)
    if linewidth_hz > 0 and length > 1:
        sigma = math.sqrt(2.0 * math.pi * linewidth_hz * symbol_period)
        rng = np.random.default_rng(seed)
        np.cumsum(rng.normal(0.0, sigma, length - 1), out=theta[1:])
    return PhasePath(theta=theta, symbol_period=symbol_period)


def delayed_difference(path: PhasePath, delay_symbols: int) -> np.ndarray:
    """Per-symbol phase difference theta[n + delay] - theta[n].

    Element ``n`` of the result is the signal-minus-reflection phase seen by
    the n-th measured symbol when the path carries ``delay_symbols`` lead-in
    samples in front of the measured region.
    """
    if delay_symbols < 0:
        raise ConfigError(f"delay_symbols must be non-negative, got {delay_symbols}")
    theta = path.theta
    if delay_symbols >= theta.size:
        raise SizeError(
            f"path of {theta.size} samples cannot supply a {delay_symbols}-symbol delay"
        )
    if delay_symbols == 0:
        return np.zeros(theta.size)
    return theta[delay_symbols:] - theta[: theta.size - delay_symbols]


def envelope_b(phi_rad, delta_theta):
    """Interference envelope cos(phi + delta_theta); accepts scalars or arrays."""
    return np.cos(phi_rad + delta_theta)


def coherence_length_m(linewidth_hz: float, fiber_index: float) -> float:
    """Laser coherence length in fiber, c / (pi * n * linewidth).

    Uses the Lorentzian-lineshape coherence time 1/(pi*linewidth) scaled by
    the group index, so the delayed phase difference has variance exactly
    2 rad^2 when the path-length difference equals one coherence length.
    """
    if linewidth_hz <= 0:
        raise ConfigError("zero linewidth gives an infinite coherence length")
    if fiber_index < 1:
        raise ConfigError(f"fiber group index must be >= 1, got {fiber_index}")
    return _C_VACUUM / (math.pi * fiber_index * linewidth_hz)


def delay_symbols(path_length_m: float, fiber_index: float, baud_rate: float) -> int:
    """Reflection delay quantized to the nearest whole symbol.

    The delay is n*L/c for extra path length L; one sample per symbol, so
    fractional delays are rounded rather than interpolated.
    """
    if path_length_m < 0:
        raise ConfigError(f"path length must be non-negative, got {path_length_m}")
    if fiber_index < 1:
        raise ConfigError(f"fiber group index must be >= 1, got {fiber_index}")
    if baud_rate <= 0:
        raise ConfigError(f"baud rate must be positive, got {baud_rate}")
    return round(fiber_index * path_length_m * baud_rate / _C_VACUUM)


def phi_from_drift(spec: DriftSpec, t: float) -> float:
    """Phase offset omega_o*tau - delta_omega*t + delta_omega*tau, mod 2*pi.

    Models the offset produced by carrier drift across the reflection delay;
    the result lies in [0, 2*pi).
    """
    phi = spec.omega_o * spec.tau - spec.delta_omega * t + spec.delta_omega * spec.tau
    return phi % (2.0 * math.pi)
