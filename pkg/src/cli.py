#!/usr/bin/env python3
# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Command-line interface: encodings, entropy measures and experiments as CSV.

Exit codes: 0 on success, 2 on usage or input errors, 3 on numerical failures.
Diagnostics go to standard error; standard output only carries CSV or state dumps.
"""

import csv
import functools
import io
import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import click

import experiments
import frqi
import imagegrid
import infomeasures
from config import ConfigError, Settings, load_settings
from symlinalg import LinalgError

logger = logging.getLogger(__name__)

ENTROPY_HEADER = ["purity_cp", "purity_c", "purity_p", "S_c", "S_p"]
TABLE1_HEADER = ["pattern"] + ENTROPY_HEADER
TABLE2_HEADER = ["pattern", "S_A", "S_B", "S_12", "S_AB", "S_A12", "S_B12", "I0", "IT", "ID"]
SWEEP_HEADER = ["x", "S_AB_q", "I_T", "H_AB_c"]
TRANSLATE_HEADER = [
    "shift",
    "S_A",
    "S_B",
    "S_AB",
    "I_AB",
    "I_T",
    "H_A",
    "H_B",
    "H_AB",
    "I_c",
    "NMI",
]
AMPLITUDE_CUTOFF = 1e-12

Cell = Union[str, int, float]


class InputError(click.ClickException):
    """Usage or input error (exit code 2)."""

    exit_code = 2


class NumericalError(click.ClickException):
    """Numerical failure, e.g. a non-convergent eigensolver (exit code 3)."""

    exit_code = 3


def handle_errors(func):
    """Translate domain exceptions into CLI exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except LinalgError as e:
            logger.debug("numerical failure", exc_info=True)
            raise NumericalError(str(e)) from e
        except (ValueError, OSError) as e:
            logger.debug("invalid input", exc_info=True)
            raise InputError(str(e)) from e

    return wrapper


class CsvTable:
    """Header plus rows, written with a fixed number of decimals and '\\n' terminators."""

    def __init__(self, header: Sequence[str], digits: int = 6):
        self.header = list(header)
        self.digits = digits
        self.rows: List[List[str]] = []

    def _cell(self, value: Cell) -> str:
        if isinstance(value, float):
            if not math.isfinite(value):
                raise LinalgError(f"non-finite value {value} in output")
            # Avoid "-0.000000" for rounding noise.
            if round(value, self.digits) == 0.0:
                value = 0.0
            return f"{value:.{self.digits}f}"
        return str(value)

    def add(self, row: Iterable[Cell]) -> None:
        cells = [self._cell(v) for v in row]
        if len(cells) != len(self.header):
            raise ValueError(f"row has {len(cells)} cells, header has {len(self.header)}")
        self.rows.append(cells)

    def render(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.header)
        writer.writerows(self.rows)
        return buffer.getvalue()


def _emit(ctx: click.Context, text: str) -> None:
    out: Optional[Path] = ctx.obj["out"]
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text)
        logger.info("wrote %s", out)


def _settings(ctx: click.Context) -> Settings:
    return ctx.obj["settings"]


def _measure_options(ctx: click.Context) -> dict:
    settings = _settings(ctx)
    return {"base": settings.entropy_base, "method": settings.eigensolver}


@click.group()
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write output to this file instead of standard output.",
)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["csv"]),
    default="csv",
    show_default=True,
    help="Output format.",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="YAML file overriding options declared in config.yaml.",
)
@click.option(
    "--eigensolver",
    type=click.Choice(["lapack", "jacobi"]),
    default=None,
    help="Override the configured eigensolver.",
)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"]),
    default="WARNING",
    show_default=True,
)
@click.pass_context
def main(ctx, out, fmt, config_path, eigensolver, log_level):
    """Quantum (FRQI) versus classical correlation measures for grayscale images."""
    logging.basicConfig(level=log_level, format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = load_settings(config_path)
    except ConfigError as e:
        raise InputError(str(e)) from e
    if eigensolver:
        settings = settings.copy(update={"eigensolver": eigensolver})
    ctx.obj = {"out": out, "format": fmt, "settings": settings}


@main.command()
@click.option(
    "--image", "image_arg", required=True, help="pattern:<bits>, graylist:<v,...> or PGM path."
)
@click.pass_context
@handle_errors
def entropy(ctx, image_arg):
    """Purities and color/position entropies of one image."""
    image = imagegrid.load_image(image_arg)
    row = experiments.entropy_row(image, image_arg, **_measure_options(ctx))
    table = CsvTable(ENTROPY_HEADER, _settings(ctx).float_digits)
    table.add([row.purity_cp, row.purity_c, row.purity_p, row.S_c, row.S_p])
    _emit(ctx, table.render())


@main.command()
@click.pass_context
@handle_errors
def table1(ctx):
    """Entanglement measures of all 16 binary 2x2 images."""
    table = CsvTable(TABLE1_HEADER, _settings(ctx).float_digits)
    for row in experiments.run_table1(**_measure_options(ctx)):
        table.add([row.pattern, row.purity_cp, row.purity_c, row.purity_p, row.S_c, row.S_p])
    _emit(ctx, table.render())


@main.command()
@click.option("--patron", "patron_arg", default=None, help="Binary 2x2 patron image.")
@click.pass_context
@handle_errors
def table2(ctx, patron_arg):
    """Compare a binary 2x2 patron with all 16 binary candidates."""
    patron = imagegrid.load_image(patron_arg or _settings(ctx).table2_patron)
    table = CsvTable(TABLE2_HEADER, _settings(ctx).float_digits)
    for pattern, r in experiments.run_table2(patron, **_measure_options(ctx)).items():
        table.add([pattern, r.S_A, r.S_B, r.S_12, r.S_AB, r.S_A12, r.S_B12, r.I0, r.IT, r.ID])
    _emit(ctx, table.render())


@main.command()
@click.option("--base-a", "base_a", required=True, help="Image A.")
@click.option("--base-b", "base_b", required=True, help="Image B, whose pixel is swept.")
@click.option("--pixel", type=int, default=None, help="Row-major index of the swept pixel.")
@click.pass_context
@handle_errors
def sweep(ctx, base_a, base_b, pixel):
    """Sweep one pixel of image B through gray levels 0..255."""
    pixel = _settings(ctx).sweep_pixel if pixel is None else pixel
    rows = experiments.run_sweep(
        imagegrid.load_image(base_a),
        imagegrid.load_image(base_b),
        pixel,
        **_measure_options(ctx),
    )
    table = CsvTable(SWEEP_HEADER, _settings(ctx).float_digits)
    for row in rows:
        table.add([row.x, row.S_AB_quantum, row.I_T, row.H_AB_classical])
    _emit(ctx, table.render())


@main.command()
@click.option(
    "--patron", "patron_arg", default=None, help="Binary patron image (PGM or pattern)."
)
@click.option("--low", type=int, default=None, help="Gray level replacing patron black.")
@click.option("--high", type=int, default=None, help="Gray level replacing patron white.")
@click.pass_context
@handle_errors
def translate(ctx, patron_arg, low, high):
    """Compare a patron with each of its cyclic translations."""
    settings = _settings(ctx)
    patron = imagegrid.load_image(patron_arg or str(settings.translate_patron_path))
    rows = experiments.run_translate(
        patron,
        settings.translate_low if low is None else low,
        settings.translate_high if high is None else high,
        **_measure_options(ctx),
    )
    summary = experiments.optimal_register(rows)
    table = CsvTable(TRANSLATE_HEADER, settings.float_digits)
    for r in rows:
        table.add(
            [r.shift, r.S_A, r.S_B, r.S_AB, r.I_AB, r.I_T, r.H_A, r.H_B, r.H_AB, r.I_c, r.NMI]
        )
    _emit(ctx, table.render())
    click.echo(
        f"optimal register: min I_AB at shift {summary.min_quantum_mi_shift}, "
        f"max I_c at shift {summary.max_classical_mi_shift}, "
        f"max NMI at shift {summary.max_nmi_shift}, "
        f"max I_T at shift {summary.max_total_correlation_shift}",
        err=True,
    )


def state_dump(state: frqi.StateVector, digits: int = 6) -> str:
    """Render "index bitstring amplitude" lines for every non-zero amplitude."""
    width = state.num_qubits
    lines = [
        f"{index} {index:0{width}b} {amplitude:.{digits}f}"
        for index, amplitude in enumerate(state.amplitudes)
        if abs(amplitude) > AMPLITUDE_CUTOFF
    ]
    return "\n".join(lines) + "\n"


@main.command()
@click.option(
    "--image", "image_arg", required=True, help="pattern:<bits>, graylist:<v,...> or PGM path."
)
@click.option(
    "--dump-state/--reduced-density",
    default=True,
    help="Print the FRQI amplitudes (default) or the position-reduced density matrix.",
)
@click.pass_context
@handle_errors
def encode(ctx, image_arg, dump_state):
    """Encode one image as an FRQI state."""
    digits = _settings(ctx).float_digits
    state = frqi.encode_frqi(imagegrid.load_image(image_arg))
    if dump_state:
        _emit(ctx, state_dump(state, digits))
        return

    rho_p = frqi.trace_out(frqi.density(state), [frqi.COLOR_A])
    logger.info(
        "position-reduced state: purity %.6f, entropy %.6f",
        rho_p.purity(),
        infomeasures.von_neumann_entropy(rho_p, **_measure_options(ctx)),
    )
    table = CsvTable([f"c{k}" for k in range(rho_p.dim)], digits)
    for row in rho_p.matrix:
        table.add([float(v) for v in row])
    _emit(ctx, table.render())


if __name__ == "__main__":
    main()
