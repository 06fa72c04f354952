"""End-to-end simulation points, deterministic sweeps, CSV persistence, plots."""

from __future__ import annotations

import math
import time
from concurrent.futures import FIRST_EXCEPTION, ProcessPoolExecutor, wait
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import ChannelOutput, add_awgn, apply_mpi, sir_to_rho
from .equalizer import EqualizerConfig, equalize
from .errors import ConfigError, DivergenceError, SizeError, SweepError
from .metrics import BerRecord, count_bit_errors
from .phase_noise import coherence_length_m, delayed_difference, envelope_b, wiener_phase
from .signal_model import LinkConfig, SymbolStream, generate_symbols

TOOL_VERSION = "0.1.0"

# Sub-stream seeds are derived from the point's master seed by fixed offsets
# so symbol, phase, and noise draws stay independent and reproducible.
SYMBOL_SEED_OFFSET = 1
PHASE_SEED_OFFSET = 2
NOISE_SEED_OFFSET = 3

CSV_HEADER = (
    "l_over_lc,phi_over_pi,sir_db,snr_db,num_symbols,seed,"
    "bit_errors,total_bits,ber,ci_low,ci_high"
)

_DEFAULT_PHI = tuple(np.pi * np.array([0.0, 0.25, 0.5, 0.75, 1.0]))
_DEFAULT_SIR = tuple(float(s) for s in range(14, 31, 2))


def simulate_channel(
    config: LinkConfig, keep_mpi_term: bool = False
) -> tuple[ChannelOutput, np.ndarray, float]:
    """Run the transmit/channel half of a point: symbols through noise.

    Returns the received stream, the per-measured-symbol envelope, and the
    interference ratio actually applied.
    """
    delay = config.delay_symbol_count()
    rho = sir_to_rho(config.sir_db) if config.mpi_enabled else 0.0
    total = config.num_symbols + delay
    stream = generate_symbols(total, config.master_seed + SYMBOL_SEED_OFFSET)
    if rho > 0.0:
        path = wiener_phase(
            total,
            config.linewidth_hz,
            config.symbol_period,
            config.master_seed + PHASE_SEED_OFFSET,
        )
        envelope = envelope_b(config.phi_rad, delayed_difference(path, delay))
    else:
        envelope = np.zeros(config.num_symbols)
    clean = apply_mpi(stream.levels, config.bias_vb, rho, delay, envelope, keep_mpi_term)
    noisy = add_awgn(clean, config.snr_db, config.master_seed + NOISE_SEED_OFFSET)
    return noisy, envelope, rho


def run_point(config: LinkConfig, keep_mpi_term: bool = False) -> BerRecord:
    """Simulate one link point end to end and count bit errors.

    Fully deterministic in the configuration; the first
    max(train_len, delay) measured symbols are excluded from the count so
    both the interference and the equalizer are in steady state.
    """
    try:
        output, _, _ = simulate_channel(config, keep_mpi_term)
        eq_config = EqualizerConfig(
            train_len=config.train_len, bias_init=-config.bias_vb
        )
        known = SymbolStream(output.truth)
        decisions, _, _ = equalize(output, eq_config, known)
        skip = np.zeros(config.num_symbols, dtype=bool)
        skip[: max(config.train_len, config.delay_symbol_count())] = True
        record = count_bit_errors(known, decisions, skip)
    except (ConfigError, SizeError, DivergenceError) as exc:
        exc.link_config = config
        raise
    return replace(record, config_digest=config)


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian grid of sweep coordinates around a base configuration.

    Reflection delays are specified as multiples of the laser coherence
    length; per-cell seeds are derived from ``master_seed`` and the cell's
    list indices, so results do not depend on execution order or worker
    count.
    """

    phi_list: tuple[float, ...] = _DEFAULT_PHI
    sir_list_db: tuple[float, ...] = _DEFAULT_SIR
    l_over_lc_list: tuple[float, ...] = (0.1, 1.0, 10.0)
    num_symbols_list: tuple[int, ...] = (900_000,)
    snr_db: float = 18.0
    base: LinkConfig = field(
        default_factory=lambda: LinkConfig(delay_symbols=0, mpi_enabled=False)
    )
    master_seed: int = 0

    def __post_init__(self):
        for name in ("phi_list", "sir_list_db", "l_over_lc_list", "num_symbols_list"):
            values = getattr(self, name)
            if len(values) == 0:
                raise ConfigError(f"{name} must not be empty")
        if self.master_seed < 0:
            raise ConfigError(f"master_seed must be non-negative, got {self.master_seed}")

    def size(self) -> int:
        return (
            len(self.phi_list)
            * len(self.sir_list_db)
            * len(self.l_over_lc_list)
            * len(self.num_symbols_list)
        )

    def cells(self) -> list[tuple[tuple, LinkConfig]]:
        """Expand the grid into (key, config) pairs.

        The key is (l_over_lc, phi/pi, sir_db, snr_db, num_symbols, seed).
        """
        coherence = coherence_length_m(self.base.linewidth_hz, self.base.fiber_index)
        out = []
        for li, l_over_lc in enumerate(self.l_over_lc_list):
            for pi_idx, phi in enumerate(self.phi_list):
                for si, sir in enumerate(self.sir_list_db):
                    for ni, num_symbols in enumerate(self.num_symbols_list):
                        seed = cell_seed(self.master_seed, pi_idx, si, li, ni)
                        config = replace(
                            self.base,
                            phi_rad=float(phi),
                            sir_db=float(sir),
                            path_length_m=float(l_over_lc) * coherence,
                            delay_symbols=None,
                            num_symbols=int(num_symbols),
                            snr_db=self.snr_db,
                            master_seed=seed,
                            mpi_enabled=True,
                        )
                        key = (
                            float(l_over_lc),
                            float(phi) / math.pi,
                            float(sir),
                            self.snr_db,
                            int(num_symbols),
                            seed,
                        )
                        out.append((key, config))
        return out


def cell_seed(
    master_seed: int, phi_idx: int, sir_idx: int, regime_idx: int, n_idx: int
) -> int:
    """Deterministic per-cell seed from the master seed and cell indices."""
    seq = np.random.SeedSequence([master_seed, phi_idx, sir_idx, regime_idx, n_idx])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class SweepPoint:
    """One completed grid cell: coordinates, seed, result, and timing."""

    l_over_lc: float
    phi_over_pi: float
    sir_db: float
    snr_db: float
    num_symbols: int
    seed: int
    record: BerRecord
    wall_clock_s: float = 0.0


@dataclass(frozen=True)
class SweepResult:
    """All points of one sweep plus the grid echo and tool version."""

    points: tuple[SweepPoint, ...]
    grid: SweepGrid | None = None
    tool_version: str = TOOL_VERSION


def _sort_key(point: SweepPoint):
    return (point.l_over_lc, point.phi_over_pi, point.sir_db, point.num_symbols)


def _run_cell(args) -> SweepPoint:
    key, config = args
    started = time.perf_counter()
    record = run_point(config)
    elapsed = time.perf_counter() - started
    l_over_lc, phi_over_pi, sir_db, snr_db, num_symbols, seed = key
    return SweepPoint(
        l_over_lc=l_over_lc,
        phi_over_pi=phi_over_pi,
        sir_db=sir_db,
        snr_db=snr_db,
        num_symbols=num_symbols,
        seed=seed,
        record=record,
        wall_clock_s=elapsed,
    )


def run_sweep(grid: SweepGrid, parallelism: int = 1, progress=None) -> SweepResult:
    """Run every grid cell and return canonically sorted results.

    Cells are independent jobs; any worker count yields identical records.
    The first cell failure aborts the sweep with the completed points
    attached to the raised SweepError.  ``progress`` is an optional callback
    receiving each SweepPoint as it completes.
    """
    if parallelism < 1:
        raise ConfigError(f"parallelism must be >= 1, got {parallelism}")
    cells = grid.cells()
    completed: list[SweepPoint] = []
    if parallelism == 1:
        for cell in cells:
            try:
                point = _run_cell(cell)
            except Exception as exc:
                raise SweepError(
                    f"sweep aborted at cell {cell[0]}: {exc}",
                    point_key=cell[0],
                    cause=exc,
                    completed=tuple(sorted(completed, key=_sort_key)),
                ) from exc
            completed.append(point)
            if progress is not None:
                progress(point)
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = {pool.submit(_run_cell, cell): cell for cell in cells}
            pending = set(futures)
            while pending:
                done, pending = wait(pending, return_when=FIRST_EXCEPTION)
                failure = None
                for future in done:
                    if future.exception() is not None:
                        failure = future
                    else:
                        point = future.result()
                        completed.append(point)
                        if progress is not None:
                            progress(point)
                if failure is not None:
                    for future in pending:
                        future.cancel()
                    exc = failure.exception()
                    raise SweepError(
                        f"sweep aborted at cell {futures[failure][0]}: {exc}",
                        point_key=futures[failure][0],
                        cause=exc,
                        completed=tuple(sorted(completed, key=_sort_key)),
                    ) from exc
    return SweepResult(points=tuple(sorted(completed, key=_sort_key)), grid=grid)


def _fmt(value: float) -> str:
    return repr(float(value))


def write_csv(result: SweepResult, path) -> None:
    """Write the canonical CSV; float fields round-trip losslessly."""
    lines = [CSV_HEADER]
    for p in sorted(result.points, key=_sort_key):
        r = p.record
        lines.append(
            ",".join(
                (
                    _fmt(p.l_over_lc),
                    _fmt(p.phi_over_pi),
                    _fmt(p.sir_db),
                    _fmt(p.snr_db),
                    str(p.num_symbols),
                    str(p.seed),
                    str(r.bit_errors),
                    str(r.total_bits),
                    _fmt(r.ber),
                    _fmt(r.ci_low),
                    _fmt(r.ci_high),
                )
            )
        )
    path = Path(path)
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep CSV to {path}: {exc}") from exc


def read_csv(path) -> SweepResult:
    """Parse a sweep CSV back into a SweepResult (grid echo not recoverable)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read sweep CSV from {path}: {exc}") from exc
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError(f"{path} does not start with the sweep CSV header")
    points = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 11:
            raise ConfigError(f"malformed CSV row in {path}: {line!r}")
        bit_errors, total_bits = int(parts[6]), int(parts[7])
        record = BerRecord(
            bit_errors=bit_errors,
            total_bits=total_bits,
            ber=float(parts[8]),
            ci_low=float(parts[9]),
            ci_high=float(parts[10]),
            measured_symbols=total_bits // 2,
        )
        points.append(
            SweepPoint(
                l_over_lc=float(parts[0]),
                phi_over_pi=float(parts[1]),
                sir_db=float(parts[2]),
                snr_db=float(parts[3]),
                num_symbols=int(parts[4]),
                seed=int(parts[5]),
                record=record,
            )
        )
    return SweepResult(points=tuple(sorted(points, key=_sort_key)), grid=None)


def emit_plots(result: SweepResult, out_dir) -> list[Path]:
    """Write one BER-vs-SIR plot (SVG) per delay regime.

    Log-scale BER, one series per phase offset, Wilson-interval whiskers;
    zero-error points are dropped from the log axis.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create plot directory {out_dir}: {exc}") from exc
    written = []
    regimes = sorted({p.l_over_lc for p in result.points})
    for l_over_lc in regimes:
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        in_regime = [p for p in result.points if p.l_over_lc == l_over_lc]
        snr_db = in_regime[0].snr_db
        for phi_over_pi in sorted({p.phi_over_pi for p in in_regime}):
            series = sorted(
                (p for p in in_regime if p.phi_over_pi == phi_over_pi),
                key=lambda p: p.sir_db,
            )
            sir = np.array([p.sir_db for p in series])
            ber = np.array([p.record.ber for p in series])
            low = ber - np.array([p.record.ci_low for p in series])
            high = np.array([p.record.ci_high for p in series]) - ber
            mask = ber > 0
            ax.errorbar(
                sir[mask],
                ber[mask],
                yerr=np.vstack((low[mask], high[mask])),
                marker="o",
                markersize=3.5,
                capsize=2,
                label=f"phase offset {phi_over_pi:g}π",
            )
        ax.set_yscale("log")
        ax.set_xlabel("SIR (dB)")
        ax.set_ylabel("BER")
        ax.set_title(f"L/Lc = {l_over_lc:g}, SNR = {snr_db:g} dB")
        ax.grid(True, which="both", linestyle="--", linewidth=0.4, alpha=0.5)
        ax.legend(fontsize=8)
        fig.tight_layout()
        target = out_dir / f"ber_vs_sir_l_over_lc_{l_over_lc:g}.svg"
        try:
            fig.savefig(target)
        except OSError as exc:
            raise OSError(f"cannot write plot to {target}: {exc}") from exc
        finally:
            plt.close(fig)
        written.append(target)
    return written
