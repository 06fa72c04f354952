"""Command-line front door: run, sweep, waveform, and plot subcommands.

Exit codes: 0 success, 2 configuration error, 3 numerical divergence,
4 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

from . import metrics, sweep
from .errors import ConfigError, DivergenceError, SweepError
from .phase_noise import coherence_length_m
from .signal_model import LinkConfig

# Keys accepted in a sweep configuration file; each mirrors a CLI flag and
# the CLI value wins when both are given.
CONFIG_KEYS = (
    "phi",
    "sir_db",
    "l_over_lc",
    "num_symbols",
    "snr_db",
    "seed",
    "out",
    "parallelism",
    "diagnostics",
)


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def _parse_float_list(text: str) -> list[float]:
    return [_parse_float(item) for item in str(text).split(",") if item.strip()]


def _parse_int_list(text: str) -> list[int]:
    out = []
    for item in str(text).split(","):
        if not item.strip():
            continue
        try:
            out.append(int(item))
        except ValueError as exc:
            raise ConfigError(f"not an integer: {item!r}") from exc
    return out


def _parse_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def load_config_file(path) -> dict:
    """Parse a flat key=value file; lists use comma syntax (``key = a,b,c``)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read config file {path}: {exc}") from exc
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _add_link_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--baud-rate", type=float, default=106.25e9, help="symbol rate (Baud)")
    parser.add_argument("--bias-vb", type=float, default=3.5, help="transmit bias level")
    parser.add_argument(
        "--linewidth-hz", type=float, default=5e6, help="laser FWHM linewidth (Hz)"
    )
    parser.add_argument(
        "--fiber-index", type=float, default=1.468, help="fiber group index"
    )
    parser.add_argument(
        "--train-len", type=int, default=10_000, help="equalizer training symbols"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pam4mpi",
        description=(
            "Monte-Carlo BER simulator for PAM4 links impaired by a single "
            "delayed reflection"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate one link point and print its BER")
    run_p.add_argument("--sir-db", type=float, default=20.0, help="signal-to-interference ratio (dB)")
    run_p.add_argument("--phi", type=float, default=0.0, help="phase offset in units of pi")
    run_p.add_argument("--l-over-lc", type=float, default=None, help="path length over coherence length")
    run_p.add_argument("--delay-symbols", type=int, default=None, help="reflection delay in symbols")
    run_p.add_argument("--num-symbols", type=int, default=900_000)
    run_p.add_argument("--snr-db", type=_parse_float, default=18.0, help="SNR in dB ('inf' disables noise)")
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--no-mpi", action="store_true", help="disable the reflection entirely")
    run_p.add_argument("--out", type=Path, default=None, help="optional CSV file for the result row")
    run_p.add_argument("--diagnostics", action="store_true", help="print interference-term statistics")
    _add_link_flags(run_p)
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="run a parameter grid and write CSV + plots")
    sweep_p.add_argument("--phi", type=str, default=None, help="comma list of phase offsets in units of pi")
    sweep_p.add_argument("--sir-db", type=str, default=None, help="comma list of SIR values (dB)")
    sweep_p.add_argument("--l-over-lc", type=str, default=None, help="comma list of L/Lc regimes")
    sweep_p.add_argument("--num-symbols", type=str, default=None, help="comma list of symbol counts")
    sweep_p.add_argument("--snr-db", type=str, default=None)
    sweep_p.add_argument("--seed", type=str, default=None)
    sweep_p.add_argument("--out", type=str, default=None, help="output directory (default sweep_out)")
    sweep_p.add_argument("--parallelism", type=str, default=None, help="worker process count")
    sweep_p.add_argument(
        "--diagnostics", action=argparse.BooleanOptionalAction, default=None,
        help="print each point as it completes",
    )
    sweep_p.add_argument("--config", type=Path, default=None, help="key=value config file")
    sweep_p.add_argument("--no-plots", action="store_true", help="skip plot generation")
    _add_link_flags(sweep_p)
    sweep_p.set_defaults(func=cmd_sweep)

    wave_p = sub.add_parser("waveform", help="dump a received-waveform window with reference curves")
    wave_p.add_argument("--sir-db", type=float, default=20.0)
    wave_p.add_argument("--phi", type=float, default=0.0, help="phase offset in units of pi")
    wave_p.add_argument("--l-over-lc", type=float, default=None)
    wave_p.add_argument("--delay-symbols", type=int, default=None)
    wave_p.add_argument("--num-symbols", type=int, default=20_000)
    wave_p.add_argument("--snr-db", type=_parse_float, default=math.inf, help="SNR in dB (default: noise off)")
    wave_p.add_argument("--seed", type=int, default=0)
    wave_p.add_argument("--start", type=int, default=0, help="first measured symbol of the window")
    wave_p.add_argument("--count", type=int, default=1000, help="window length in symbols")
    wave_p.add_argument("--out", type=Path, default=Path("waveform.csv"))
    _add_link_flags(wave_p)
    wave_p.set_defaults(func=cmd_waveform)

    plot_p = sub.add_parser("plot", help="regenerate plots from a sweep CSV")
    plot_p.add_argument("--csv", type=Path, required=True)
    plot_p.add_argument("--out", type=Path, default=Path("plots"))
    plot_p.set_defaults(func=cmd_plot)

    return parser


def _link_config(
    args, phi_rad: float, mpi_enabled: bool = True, train_len: int | None = None
) -> LinkConfig:
    if (args.l_over_lc is None) == (args.delay_symbols is None):
        if args.l_over_lc is None:
            args.l_over_lc = 0.1
        else:
            raise ConfigError("give either --l-over-lc or --delay-symbols, not both")
    path_length = None
    if args.l_over_lc is not None:
        coherence = coherence_length_m(args.linewidth_hz, args.fiber_index)
        path_length = args.l_over_lc * coherence
    return LinkConfig(
        baud_rate=args.baud_rate,
        num_symbols=args.num_symbols,
        bias_vb=args.bias_vb,
        linewidth_hz=args.linewidth_hz,
        fiber_index=args.fiber_index,
        sir_db=args.sir_db,
        phi_rad=phi_rad,
        path_length_m=path_length,
        delay_symbols=args.delay_symbols,
        snr_db=args.snr_db,
        train_len=args.train_len if train_len is None else train_len,
        master_seed=args.seed,
        mpi_enabled=mpi_enabled,
    )


def _l_over_lc_of(args, config: LinkConfig) -> float:
    if args.l_over_lc is not None:
        return args.l_over_lc
    if config.linewidth_hz <= 0:
        return 0.0
    from scipy.constants import c

    length = config.delay_symbol_count() * c / (config.fiber_index * config.baud_rate)
    return length / coherence_length_m(config.linewidth_hz, config.fiber_index)


def cmd_run(args) -> int:
    config = _link_config(args, phi_rad=args.phi * math.pi, mpi_enabled=not args.no_mpi)
    started = time.perf_counter()
    record = sweep.run_point(config, keep_mpi_term=args.diagnostics)
    elapsed = time.perf_counter() - started
    print(
        f"ber={record.ber:.6e} ci95=[{record.ci_low:.6e}, {record.ci_high:.6e}] "
        f"bit_errors={record.bit_errors} total_bits={record.total_bits} "
        f"measured_symbols={record.measured_symbols} wall={elapsed:.2f}s"
    )
    if args.diagnostics:
        output, _, rho = sweep.simulate_channel(config, keep_mpi_term=True)
        term = output.mpi_term
        print(
            f"rho={rho:.6g} mpi_term: mean={term.mean():+.6e} std={term.std():.6e} "
            f"peak={abs(term).max():.6e}"
        )
    if args.out is not None:
        point = sweep.SweepPoint(
            l_over_lc=_l_over_lc_of(args, config),
            phi_over_pi=args.phi,
            sir_db=args.sir_db if not args.no_mpi else math.inf,
            snr_db=args.snr_db,
            num_symbols=args.num_symbols,
            seed=args.seed,
            record=record,
            wall_clock_s=elapsed,
        )
        sweep.write_csv(sweep.SweepResult(points=(point,)), args.out)
        print(f"wrote {args.out}")
    return 0


def _merged(cli_value, file_values: dict, key: str, parse, default):
    if cli_value is not None:
        return parse(cli_value)
    if key in file_values:
        return parse(file_values[key])
    return default


def cmd_sweep(args) -> int:
    file_values = load_config_file(args.config) if args.config is not None else {}
    phi_units = _merged(args.phi, file_values, "phi", _parse_float_list, [0.0, 0.25, 0.5, 0.75, 1.0])
    sir_list = _merged(args.sir_db, file_values, "sir_db", _parse_float_list, list(sweep._DEFAULT_SIR))
    l_list = _merged(args.l_over_lc, file_values, "l_over_lc", _parse_float_list, [0.1, 1.0, 10.0])
    n_list = _merged(args.num_symbols, file_values, "num_symbols", _parse_int_list, [900_000])
    snr_db = _merged(args.snr_db, file_values, "snr_db", _parse_float, 18.0)
    seed = _merged(args.seed, file_values, "seed", int, 0)
    out_dir = Path(_merged(args.out, file_values, "out", str, "sweep_out"))
    parallelism = _merged(args.parallelism, file_values, "parallelism", int, 1)
    diagnostics = _merged(args.diagnostics, file_values, "diagnostics", _parse_bool, False)

    base = LinkConfig(
        baud_rate=args.baud_rate,
        bias_vb=args.bias_vb,
        linewidth_hz=args.linewidth_hz,
        fiber_index=args.fiber_index,
        train_len=args.train_len,
        num_symbols=max(n_list),
        delay_symbols=0,
        mpi_enabled=False,
    )
    grid = sweep.SweepGrid(
        phi_list=tuple(v * math.pi for v in phi_units),
        sir_list_db=tuple(sir_list),
        l_over_lc_list=tuple(l_list),
        num_symbols_list=tuple(n_list),
        snr_db=snr_db,
        base=base,
        master_seed=seed,
    )
    progress = None
    if diagnostics:
        def progress(point):
            print(
                f"done l_over_lc={point.l_over_lc:g} phi={point.phi_over_pi:g}pi "
                f"sir={point.sir_db:g}dB n={point.num_symbols} "
                f"ber={point.record.ber:.3e} wall={point.wall_clock_s:.2f}s"
            )

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc

    started = time.perf_counter()
    try:
        result = sweep.run_sweep(grid, parallelism=parallelism, progress=progress)
    except SweepError as exc:
        partial = out_dir / "results.partial.csv"
        sweep.write_csv(sweep.SweepResult(points=exc.completed, grid=grid), partial)
        print(f"error: {exc}", file=sys.stderr)
        print(f"wrote partial manifest with {len(exc.completed)} points to {partial}", file=sys.stderr)
        return _exit_code_for(exc.cause)
    elapsed = time.perf_counter() - started

    csv_path = out_dir / "results.csv"
    sweep.write_csv(result, csv_path)
    written = [csv_path]
    if not args.no_plots:
        written += sweep.emit_plots(result, out_dir)
    print(f"{grid.size()} points in {elapsed:.1f}s; wrote " + ", ".join(str(p) for p in written))
    return 0


def cmd_waveform(args) -> int:
    # No equalizer in this pipeline, so no training budget is required.
    config = _link_config(args, phi_rad=args.phi * math.pi, train_len=0)
    output, envelope, rho = sweep.simulate_channel(config, keep_mpi_term=True)
    table = metrics.dump_waveform(
        output, rho, config.bias_vb, envelope, args.start, args.start + args.count
    )
    columns = list(table)
    lines = [",".join(columns)]
    for i in range(table["n"].size):
        row = []
        for name in columns:
            value = table[name][i]
            row.append(str(int(value)) if name == "n" else repr(float(value)))
        lines.append(",".join(row))
    try:
        args.out.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write waveform table to {args.out}: {exc}") from exc
    print(f"wrote {table['n'].size} rows to {args.out}")
    return 0


def cmd_plot(args) -> int:
    result = sweep.read_csv(args.csv)
    written = sweep.emit_plots(result, args.out)
    print("wrote " + ", ".join(str(p) for p in written))
    return 0


def _exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, DivergenceError):
        return 3
    if isinstance(exc, OSError):
        return 4
    if isinstance(exc, ValueError):
        return 2
    return 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: divergence at symbol {exc.symbol_index}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
