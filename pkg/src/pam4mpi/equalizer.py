"""Adaptive feedforward equalizer with a bias-tracking tap, plus the PAM4 slicer.

The equalizer is a symbol-spaced FIR filter (no decision feedback) whose
taps and additive bias adapt by stochastic gradient descent on the slicer
error.  The filter output targets the zero-mean alphabet {-1.5..+1.5}; the
bias tap absorbs the transmit bias and the slow interference-induced bias
wander, which is why it runs with a much larger step than the taps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .channel import ChannelOutput
from .errors import ConfigError, DecisionError, DivergenceError, SizeError
from .signal_model import SymbolStream

# Decision thresholds between adjacent PAM4 amplitudes.
_THRESHOLDS = np.array([-1.0, 0.0, 1.0])


@dataclass(frozen=True)
class EqualizerConfig:
    """Adaptation parameters.

    ``initial_taps = None`` starts from a center-spike filter (center tap 1,
    others 0).  ``bias_init`` is normally set to minus the transmit bias so
    the DC path starts pre-cancelled.  Any tap magnitude or filter output
    beyond ``guard`` aborts the run as divergence.
    """

    num_taps: int = 15
    step_w: float = 2e-4
    step_b: float = 1e-2
    train_len: int = 10_000
    bias_init: float = 0.0
    initial_taps: tuple[float, ...] | None = None
    guard: float = 1e6

    def __post_init__(self):
        if self.num_taps < 1 or self.num_taps % 2 == 0:
            raise ConfigError(f"num_taps must be odd and >= 1, got {self.num_taps}")
        if self.step_w <= 0 or self.step_b <= 0:
            raise ConfigError(
                f"adaptation steps must be positive, got {self.step_w}, {self.step_b}"
            )
        if self.train_len < self.num_taps:
            raise ConfigError(
                f"train_len ({self.train_len}) must be >= num_taps ({self.num_taps})"
            )
        if self.guard <= 0:
            raise ConfigError(f"guard must be positive, got {self.guard}")
        if self.initial_taps is not None and len(self.initial_taps) != self.num_taps:
            raise ConfigError(
                f"initial_taps length {len(self.initial_taps)} != num_taps {self.num_taps}"
            )

    def start_taps(self) -> np.ndarray:
        if self.initial_taps is not None:
            return np.asarray(self.initial_taps, dtype=np.float64)
        w = np.zeros(self.num_taps)
        w[self.num_taps // 2] = 1.0
        return w


@dataclass(frozen=True)
class EqualizerState:
    """Tap weights and bias tap after a run."""

    w: np.ndarray
    b: float


@njit(cache=True)
def _lms_pass(y, train_ref, train_len, w, b, step_w, step_b, guard):
    """Sequential LMS over one stream; returns (soft, decisions, w, b, bad_index).

    bad_index is -1 on success, else the symbol where the guard tripped.
    The window for symbol i spans y[i-center .. i+center] (zero-padded at
    the edges); the reference is the known level while i < train_len and the
    sliced level afterwards.
    """
    n = y.shape[0]
    num_taps = w.shape[0]
    center = num_taps // 2
    soft = np.empty(n)
    decisions = np.empty(n, dtype=np.int64)
    for i in range(n):
        acc = b
        for k in range(num_taps):
            j = i + center - k
            if 0 <= j < n:
                acc += w[k] * y[j]
        soft[i] = acc
        if not (abs(acc) < guard):
            return soft, decisions, w, b, i
        if acc < -1.0:
            idx = 0
        elif acc < 0.0:
            idx = 1
        elif acc < 1.0:
            idx = 2
        else:
            idx = 3
        decisions[i] = idx
        if i < train_len:
            ref = train_ref[i]
        else:
            ref = idx - 1.5
        err = ref - acc
        grad = step_w * err
        for k in range(num_taps):
            j = i + center - k
            if 0 <= j < n:
                w[k] += grad * y[j]
                if not (abs(w[k]) < guard):
                    return soft, decisions, w, b, i
        b += step_b * err
    return soft, decisions, w, b, -1


def equalize(
    output: ChannelOutput, config: EqualizerConfig, known: SymbolStream
) -> tuple[np.ndarray, np.ndarray, EqualizerState]:
    """Adapt the equalizer over one received stream.

    The first ``config.train_len`` symbols use the known transmitted levels
    as the error reference; the remainder runs decision-directed.  Returns
    (decisions, soft outputs, final state); decisions cover every symbol,
    training region included, and callers exclude that region from metrics.
    """
    y = np.ascontiguousarray(output.samples, dtype=np.float64)
    if y.size <= config.train_len:
        raise SizeError(
            f"stream of {y.size} symbols cannot cover train_len {config.train_len}"
        )
    if len(known) < config.train_len:
        raise SizeError(
            f"known stream of {len(known)} symbols cannot cover train_len {config.train_len}"
        )
    train_ref = np.ascontiguousarray(known.levels[: config.train_len], dtype=np.float64)
    soft, decisions, w, b, bad = _lms_pass(
        y,
        train_ref,
        config.train_len,
        config.start_taps(),
        float(config.bias_init),
        config.step_w,
        config.step_b,
        config.guard,
    )
    if bad >= 0:
        raise DivergenceError(
            f"equalizer output or taps exceeded guard {config.guard:g} at symbol {bad}",
            symbol_index=int(bad),
        )
    return decisions, soft, EqualizerState(w=w, b=float(b))


def slicer(soft_value):
    """Nearest PAM4 level index for a soft value (scalar or array).

    Midpoint ties (-1, 0, +1) break toward the higher level.
    """
    x = np.asarray(soft_value, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise DecisionError(f"slicer input must be finite, got {soft_value}")
    idx = np.searchsorted(_THRESHOLDS, x, side="right")
    if np.ndim(soft_value) == 0:
        return int(idx)
    return idx.astype(np.int64)
