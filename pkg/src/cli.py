#!/usr/bin/env python3
"""
gmcs-qkd command line.

Usage:
    gmcs-qkd skr [CONFIG] --ratio 0.5
    gmcs-qkd skr [CONFIG] --regime fs --N 3.08e6 --m 1.54e6
    gmcs-qkd simulate [CONFIG] --n-symbols 1e5 --dump-stages
    gmcs-qkd sweep [CONFIG] --atten-stop 14 --atten-step 0.25 --m 1e6 --m 1e8 --m 1e10
    gmcs-qkd worstcase [CONFIG] --m-start 1e4 --m-stop 1e14
    gmcs-qkd show-config [CONFIG]

CONFIG defaults to $GMCS_CONFIG (also read from .env), else the reference-link values.
Reports go to stdout as `key = value` lines; logs go to stderr.
"""
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, List, Optional

import typer
from rich import box
from rich.console import Console
from rich.table import Table

from src.config import dumps_config, load_config_file, with_overrides
from src.constants import TOOL_NAME, TOOL_VERSION
from src.errors import GmcsError
from src.estimation.finite_size import worst_case_curve
from src.orchestrators.pipeline import run_simulation
from src.schemas.system_params import SystemParams
from src.security.keyrate import skr_asymptotic, skr_finite
from src.security.sweep import attenuation_grid, log_m_grid, sweep_attenuation, zero_crossing
from src.transmitter.symbols import export_frame_csv
from src.utils.manifest import header_lines, new_manifest, write_manifest
from src.utils.path_utils import resolve_config_path
from src.utils.tabular import format_report, records_frame, write_csv, write_report

app = typer.Typer(
    name=TOOL_NAME,
    help="GMCS CV-QKD link simulator and security toolkit.",
    add_completion=False,
    no_args_is_help=True,
)
console = Console(stderr=True)

SWEEP_COLUMNS = ("atten_db", "regime", "m", "i_ab_bits", "chi_be_bits", "skr_bps")
WORSTCASE_COLUMNS = ("m", "xi_b_fs", "t_min", "xi_b_asym", "t_asym", "at_n_total")
DEFAULT_SWEEP_M = [1e6, 1e8, 1e10]

ConfigArg = typer.Argument(None, help="Flat TOML config file (default: $GMCS_CONFIG or the reference link).")


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Maps toolkit errors to their exit codes in one place."""
    try:
        yield
    except GmcsError as exc:
        console.print(f"error: {exc}", style="bold red", markup=False, highlight=False)
        raise typer.Exit(code=exc.exit_code)


def _count(value: Optional[float]) -> Optional[int]:
    """Flags like --N 3.08e6 arrive as floats."""
    return None if value is None else int(round(value))


def _params(config: Optional[str], **overrides: Any) -> SystemParams:
    path = resolve_config_path(config)
    params = SystemParams() if path is None else load_config_file(path)
    return with_overrides(params, **overrides)


def _flatten(values: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in values.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def _emit(values: dict, manifest) -> None:
    typer.echo("".join(f"# {line}\n" for line in header_lines(manifest)) + format_report(values), nl=False)


@app.command()
def skr(
    config: Optional[str] = ConfigArg,
    ratio: Optional[float] = typer.Option(None, "--ratio", help="Key fraction (N-m)/N. Default 1 (asym) or derived from N, m (fs)."),
    regime: str = typer.Option("asym", "--regime", help="asym or fs."),
    n_total: Optional[float] = typer.Option(None, "--N", "--n-total", help="Total exchanged symbols N."),
    m: Optional[float] = typer.Option(None, "--m", help="Parameter-estimation set size m."),
    m_calib: Optional[float] = typer.Option(None, "--m-calib", help="Shot-noise calibration set size m'."),
    epsilon: Optional[float] = typer.Option(None, "--epsilon", help="Parameter-estimation failure probability."),
    out: Optional[Path] = typer.Option(None, "--out", help="Also write the report to this file."),
):
    """Closed-form key rate at the configured operating point."""
    with _exit_codes():
        if regime not in ("asym", "fs"):
            raise typer.BadParameter(f"regime must be 'asym' or 'fs', got '{regime}'")
        params = _params(config, n_total=_count(n_total), m_pe=_count(m), m_calib=_count(m_calib),
                         epsilon_pe=epsilon)
        flags = {"ratio": ratio, "regime": regime}
        manifest = new_manifest("skr", params, flags)

        if regime == "asym":
            report = skr_asymptotic(params, 1.0 if ratio is None else ratio)
        else:
            report = skr_finite(params, ratio=ratio)

        values = report.model_dump()
        _emit(values, manifest)
        if out is not None:
            write_report(values, out, header_lines(manifest))
            manifest = manifest.model_copy(update={"outputs": [str(out)]})
            write_manifest(manifest, out.parent)


@app.command()
def simulate(
    config: Optional[str] = ConfigArg,
    n_symbols: Optional[float] = typer.Option(None, "--n-symbols", help="Quantum symbols to simulate."),
    seed: Optional[int] = typer.Option(None, "--seed"),
    level: str = typer.Option("trace", "--level", help="trace (oversampled, full DSP) or symbol."),
    no_excess_noise: bool = typer.Option(False, "--no-excess-noise", help="Channel without excess noise."),
    no_phase_noise: bool = typer.Option(False, "--no-phase-noise", help="Channel without phase drift."),
    dump_stages: bool = typer.Option(False, "--dump-stages", help="Write constellation CSVs per DSP stage."),
    export_frame: bool = typer.Option(False, "--export-frame", help="Write Alice's transmitted frame CSV."),
    out_dir: Path = typer.Option(Path("output/simulate"), "--out-dir"),
):
    """End-to-end Monte-Carlo run: transmitter, channel, receiver, DSP, estimation, key rates."""
    with _exit_codes():
        if level not in ("trace", "symbol"):
            raise typer.BadParameter(f"level must be 'trace' or 'symbol', got '{level}'")
        params = _params(config, n_symbols=_count(n_symbols), seed=seed)
        flags = {
            "level": level,
            "excess_noise": not no_excess_noise,
            "phase_noise": not no_phase_noise,
            "dump_stages": dump_stages,
        }
        manifest = new_manifest("simulate", params, flags)
        header = header_lines(manifest)

        outcome = run_simulation(
            params,
            level=level,
            excess_noise=not no_excess_noise,
            phase_noise=not no_phase_noise,
            dump_stages=dump_stages,
        )
        values = _flatten(outcome.report.model_dump())
        outputs = [write_report(values, out_dir / f"{manifest.manifest_id}-report.txt", header)]
        for stage, frame in outcome.dsp.stages.items():
            outputs.append(write_csv(frame, out_dir / f"{manifest.manifest_id}-{stage}.csv", header))
        if export_frame:
            outputs.append(export_frame_csv(outcome.frame, out_dir / f"{manifest.manifest_id}-frame.csv", header))

        _emit(values, manifest)
        write_manifest(manifest.model_copy(update={"outputs": [str(p) for p in outputs]}), out_dir)


@app.command()
def sweep(
    config: Optional[str] = ConfigArg,
    atten_start: float = typer.Option(0.0, "--atten-start", help="First attenuation, dB."),
    atten_stop: float = typer.Option(14.0, "--atten-stop", help="Last attenuation, dB (inclusive)."),
    atten_step: float = typer.Option(0.25, "--atten-step", help="Grid step, dB."),
    m: Optional[List[float]] = typer.Option(None, "--m", help="Finite-size m (repeatable). Default 1e6, 1e8, 1e10."),
    ratio: Optional[float] = typer.Option(None, "--ratio", help="Key fraction. Default (N-m_pe)/N of the config."),
    workers: Optional[int] = typer.Option(None, "--workers", help="Worker processes (1 = serial)."),
    out: Path = typer.Option(Path("output/sweep.csv"), "--out"),
):
    """Asymptotic and finite-size key rate over a channel-attenuation grid."""
    with _exit_codes():
        params = _params(config)
        m_list = list(m) if m else DEFAULT_SWEEP_M
        grid = attenuation_grid(atten_start, atten_stop, atten_step)
        flags = {"atten": [atten_start, atten_stop, atten_step], "m": m_list, "ratio": ratio}
        manifest = new_manifest("sweep", params, flags)

        rows = sweep_attenuation(params, grid, m_list, ratio=ratio, workers=workers)
        write_csv(records_frame(rows, SWEEP_COLUMNS), out, header_lines(manifest))
        write_manifest(manifest.model_copy(update={"outputs": [str(out)]}), out.parent)

        table = Table(title="SKR zero crossing", box=box.SIMPLE)
        table.add_column("regime")
        table.add_column("first dB with SKR = 0", justify="right")
        for regime, m_value in [("asym", None)] + [("fs", float(v)) for v in m_list]:
            crossing = zero_crossing(rows, regime, m_value)
            label = regime if m_value is None else f"fs m={m_value:.0e}"
            table.add_row(label, "beyond grid" if crossing is None else f"{crossing:g}")
        console.print(table)
        typer.echo(str(out))


@app.command()
def worstcase(
    config: Optional[str] = ConfigArg,
    m: Optional[List[float]] = typer.Option(None, "--m", help="Explicit m values (repeatable); replaces the log grid."),
    m_start: float = typer.Option(1e4, "--m-start"),
    m_stop: float = typer.Option(1e14, "--m-stop"),
    per_decade: int = typer.Option(1, "--per-decade"),
    out: Path = typer.Option(Path("output/worstcase.csv"), "--out"),
):
    """Worst-case xi_B and T_min against m when N = m = m'."""
    with _exit_codes():
        params = _params(config)
        if m:
            m_grid = [float(v) for v in m]
        else:
            m_grid = sorted({*log_m_grid(m_start, m_stop, per_decade).tolist(), float(params.n_total)})
        manifest = new_manifest("worstcase", params, {"m": m_grid})

        rows = worst_case_curve(params, m_grid)
        write_csv(records_frame(rows, WORSTCASE_COLUMNS), out, header_lines(manifest))
        write_manifest(manifest.model_copy(update={"outputs": [str(out)]}), out.parent)
        typer.echo(str(out))


@app.command("show-config")
def show_config(config: Optional[str] = ConfigArg):
    """Prints the resolved parameters as a flat TOML document."""
    with _exit_codes():
        typer.echo(dumps_config(_params(config)), nl=False)


@app.command()
def version():
    typer.echo(f"{TOOL_NAME} {TOOL_VERSION}")


if __name__ == "__main__":
    app()
