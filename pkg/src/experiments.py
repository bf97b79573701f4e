#!/usr/bin/env python3
# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Experiment runners: entanglement of single binary images, exhaustive pair comparison,
single-pixel color sweeps and the cyclic translation scan.

Every runner returns its rows in ascending order of the row key; no file I/O happens here.
"""

import logging
import math
from typing import Dict, List, Sequence

from pydantic import BaseModel, root_validator

import imagegrid
import infomeasures
from imagegrid import MAX_GRAY, Image, ImageError
from infomeasures import CorrelationReport

logger = logging.getLogger(__name__)

PURE_TOLERANCE = 1e-9


class Table1Row(BaseModel):
    """Color/position entanglement of a single image."""

    pattern: str
    purity_cp: float
    purity_c: float
    purity_p: float
    S_c: float
    S_p: float

    class Config:
        """Pydantic config."""

        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def validate_pure(cls, values):  # noqa: N805  # pydantic wants 'cls' as first arg
        """The global state is pure, so both halves carry the same entropy."""
        if abs(values["purity_cp"] - 1.0) > PURE_TOLERANCE:
            raise ValueError(f"global state is not pure (purity {values['purity_cp']})")
        if abs(values["S_c"] - values["S_p"]) > PURE_TOLERANCE:
            raise ValueError(f"S_c={values['S_c']} differs from S_p={values['S_p']}")
        return values


class SweepRow(BaseModel):
    """Measures for one gray level x of the swept pixel."""

    x: int
    S_AB_quantum: float
    I_T: float
    H_AB_classical: float

    class Config:
        """Pydantic config."""

        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def validate_finite(cls, values):  # noqa: N805
        """Measures are finite and non-negative."""
        for key in ("S_AB_quantum", "I_T", "H_AB_classical"):
            if not math.isfinite(values[key]) or values[key] < -PURE_TOLERANCE:
                raise ValueError(f"{key}={values[key]} is not a finite non-negative value")
        return values


class TranslateRow(BaseModel):
    """Quantum and classical measures for one translation shift."""

    shift: int
    S_A: float
    S_B: float
    S_AB: float
    I_AB: float
    I_T: float
    H_A: float
    H_B: float
    H_AB: float
    I_c: float
    NMI: float

    class Config:
        """Pydantic config."""

        allow_mutation = False


class RegisterSummary(BaseModel):
    """Shifts at which the translation scan reaches its extrema."""

    min_quantum_mi_shift: int
    max_classical_mi_shift: int
    max_nmi_shift: int
    max_total_correlation_shift: int


def entropy_row(image: Image, label: str, base: str = "2", method: str = "lapack") -> Table1Row:
    """Return purities and entropies of the color and position halves of one image."""
    purity_cp, purity_c, purity_p, s_c, s_p = infomeasures.single_image_measures(
        image, base=base, method=method
    )
    return Table1Row(
        pattern=label,
        purity_cp=purity_cp,
        purity_c=purity_c,
        purity_p=purity_p,
        S_c=s_c,
        S_p=s_p,
    )


def run_table1(base: str = "2", method: str = "lapack") -> List[Table1Row]:
    """Evaluate every binary 2x2 image, patterns 0000 to 1111 in ascending order."""
    rows = [
        entropy_row(image, pattern, base=base, method=method)
        for pattern, image in imagegrid.binary_patterns(4).items()
    ]
    logger.info("table1: %d rows", len(rows))
    return rows


def run_table2(
    patron: Image, base: str = "2", method: str = "lapack"
) -> Dict[str, CorrelationReport]:
    """Compare a binary 2x2 patron against every binary 2x2 candidate.

    Returns:
        Reports keyed by candidate bitstring, ascending.

    Raises:
        ImageError: if the patron is not a binary 2x2 image.
    """
    if patron.side != 2 or not patron.is_binary:
        raise ImageError("the table2 patron must be a binary 2x2 image")
    reports = {
        pattern: infomeasures.correlation_report(patron, candidate, base=base, method=method)
        for pattern, candidate in imagegrid.binary_patterns(4).items()
    }
    logger.info("table2: compared patron %s against %d candidates", patron.pixels, len(reports))
    return reports


def run_sweep(
    base_a: Image,
    base_b: Image,
    pixel_index: int,
    base: str = "2",
    method: str = "lapack",
) -> List[SweepRow]:
    """Set pixel ``pixel_index`` of B to each gray level 0..255 and compare with A.

    Raises:
        ImageError: on mismatched sides or an invalid pixel index.
    """
    if base_a.side != base_b.side:
        raise ImageError(f"images differ in size: {base_a.side} vs {base_b.side}")
    rows = []
    for x in range(MAX_GRAY + 1):
        candidate = imagegrid.set_pixel(base_b, pixel_index, x)
        report = infomeasures.correlation_report(base_a, candidate, base=base, method=method)
        rows.append(
            SweepRow(x=x, S_AB_quantum=report.S_AB, I_T=report.IT, H_AB_classical=report.H_AB)
        )
    logger.info(
        "sweep of pixel %d: max I_T %.6f, max H_AB %.6f",
        pixel_index,
        max(r.I_T for r in rows),
        max(r.H_AB_classical for r in rows),
    )
    return rows


def run_translate(
    patron: Image,
    low_gray: int,
    high_gray: int,
    base: str = "2",
    method: str = "lapack",
) -> List[TranslateRow]:
    """Compare a patron with every cyclic translation of itself.

    Patron black (0) becomes ``low_gray`` and white (255) becomes ``high_gray`` before the
    comparison; row k compares the remapped patron with its translation by k.

    Raises:
        ImageError: if the patron is not binary or a gray level is out of range.
    """
    if not patron.is_binary:
        raise ImageError("the translation patron must be a binary image")
    for gray in (low_gray, high_gray):
        if not 0 <= gray <= MAX_GRAY:
            raise ImageError(f"gray value {gray} out of range [0, {MAX_GRAY}]")

    reference = imagegrid.remap(patron, {0: low_gray, MAX_GRAY: high_gray})
    rows = []
    for shift in range(reference.size):
        report = infomeasures.correlation_report(
            reference, imagegrid.translate_cyclic(reference, shift), base=base, method=method
        )
        rows.append(
            TranslateRow(
                shift=shift,
                S_A=report.S_A,
                S_B=report.S_B,
                S_AB=report.S_AB,
                I_AB=report.I_AB,
                I_T=report.IT,
                H_A=report.H_A,
                H_B=report.H_B,
                H_AB=report.H_AB,
                I_c=report.I_classical,
                NMI=report.NMI,
            )
        )
        logger.debug(
            "translate shift %d: I_AB=%.6f I_c=%.6f", shift, report.I_AB, report.I_classical
        )
    logger.info("translate: %d shifts, grays %d/%d", len(rows), low_gray, high_gray)
    return rows


def _extreme_shift(rows: Sequence[TranslateRow], field: str, maximize: bool) -> int:
    sign = -1.0 if maximize else 1.0
    return min(rows, key=lambda r: (round(sign * getattr(r, field), 12), r.shift)).shift


def optimal_register(rows: Sequence[TranslateRow]) -> RegisterSummary:
    """Locate the extrema of a translation scan; ties go to the smallest shift."""
    if not rows:
        raise ValueError("cannot summarize an empty scan")
    summary = RegisterSummary(
        min_quantum_mi_shift=_extreme_shift(rows, "I_AB", maximize=False),
        max_classical_mi_shift=_extreme_shift(rows, "I_c", maximize=True),
        max_nmi_shift=_extreme_shift(rows, "NMI", maximize=True),
        max_total_correlation_shift=_extreme_shift(rows, "I_T", maximize=True),
    )
    logger.debug(
        "optimal register: quantum I(A;B) min at shift %d, classical I max at shift %d",
        summary.min_quantum_mi_shift,
        summary.max_classical_mi_shift,
    )
    return summary
