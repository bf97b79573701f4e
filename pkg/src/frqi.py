#!/usr/bin/env python3
# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""FRQI encoding of one or two images, density matrices and partial traces.

Qubits are identified by string labels: ``p0`` ... ``p{2n-1}`` for the position qubits
(``p0`` is the most significant position bit), ``A`` for the color qubit of the first
image and ``B`` for the color qubit of the second. In every register, the qubit at
position 0 is the most significant bit of the basis index.

- Single image: register ``(A, p0, ..., p{2n-1})``; the color bit leads.
- Image pair: register ``(p0, ..., p{2n-1}, A, B)``.

A typical usage example would be:
>>> rho = density(encode_joint(parse_pattern("1000"), parse_pattern("1010")))
>>> partial_trace(rho, {COLOR_A, COLOR_B}).qubits
('A', 'B')
"""

import logging
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, validator

import symlinalg
from imagegrid import MAX_GRAY, Image

logger = logging.getLogger(__name__)

COLOR_A = "A"
COLOR_B = "B"
NORM_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-9

QubitLabel = str


class FrqiError(ValueError):
    """Base class for custom errors raised by this module."""


class RegisterError(FrqiError):
    """Raised on unknown, duplicate or missing qubit labels."""


def position(k: int) -> QubitLabel:
    """Return the label of position qubit ``k``."""
    return f"p{k}"


def position_labels(count: int) -> Tuple[QubitLabel, ...]:
    """Return the labels of ``count`` position qubits, most significant first."""
    return tuple(position(k) for k in range(count))


def is_position(label: QubitLabel) -> bool:
    """Whether ``label`` names a position qubit."""
    return label.startswith("p") and label[1:].isdigit()


def _check_register(register: Sequence[QubitLabel]) -> Tuple[QubitLabel, ...]:
    if not register:
        raise ValueError("register must hold at least one qubit")
    if len(set(register)) != len(register):
        raise ValueError(f"duplicate qubit labels in register {tuple(register)}")
    return tuple(register)


class StateVector(BaseModel):
    """Real, unit-norm, non-negative amplitude vector over a labeled register."""

    qubits: Tuple[QubitLabel, ...]
    amplitudes: np.ndarray

    class Config:
        """Pydantic config."""

        arbitrary_types_allowed = True
        allow_mutation = False

    _check_register = validator("qubits", allow_reuse=True)(_check_register)

    @validator("amplitudes")
    def validate_amplitudes(cls, amplitudes, values):  # noqa: N805
        """Validate length, norm and sign of the amplitudes."""
        amplitudes = np.asarray(amplitudes, dtype=np.float64)
        register = values.get("qubits")
        if register is not None and amplitudes.shape != (2 ** len(register),):
            raise ValueError(
                f"{len(register)} qubits need {2 ** len(register)} amplitudes, "
                f"got shape {amplitudes.shape}"
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"state is not normalized (norm={norm!r})")
        if amplitudes.min() < -NORM_TOLERANCE:
            raise ValueError("FRQI amplitudes must be non-negative")
        return amplitudes

    @property
    def num_qubits(self) -> int:
        """Return the register size."""
        return len(self.qubits)


class DensityMatrix(BaseModel):
    """Real symmetric trace-1 matrix over a labeled register.

    Positive semi-definiteness is checked lazily, when a spectrum is taken
    (see :meth:`symlinalg.Spectrum.clamped`).
    """

    qubits: Tuple[QubitLabel, ...]
    matrix: np.ndarray

    class Config:
        """Pydantic config."""

        arbitrary_types_allowed = True
        allow_mutation = False

    _check_register = validator("qubits", allow_reuse=True)(_check_register)

    @validator("matrix")
    def validate_matrix(cls, matrix, values):  # noqa: N805
        """Validate dimension, symmetry and unit trace."""
        try:
            matrix = symlinalg.as_symmetric(matrix)
        except symlinalg.LinalgError as e:
            raise ValueError(str(e)) from e
        register = values.get("qubits")
        if register is not None and matrix.shape[0] != 2 ** len(register):
            raise ValueError(
                f"{len(register)} qubits need a {2 ** len(register)}-dim matrix, "
                f"got {matrix.shape[0]}"
            )
        tr = float(np.trace(matrix))
        if abs(tr - 1.0) > TRACE_TOLERANCE:
            raise ValueError(f"density matrix must have unit trace, got {tr!r}")
        return matrix

    @property
    def dim(self) -> int:
        """Return the matrix dimension."""
        return self.matrix.shape[0]

    def purity(self) -> float:
        """Return Tr(rho^2)."""
        return symlinalg.purity(self.matrix)

    def spectrum(self, method: str = "lapack") -> symlinalg.Spectrum:
        """Return the eigenvalues, descending."""
        return symlinalg.sym_eigenvalues(self.matrix, method=method)


def color_to_angle(color: Union[int, Sequence[int], np.ndarray]):
    """Map gray levels [0, 255] linearly onto angles [0, pi/2].

    Accepts a scalar or an array-like; returns the same shape.

    Raises:
        FrqiError: if a color lies outside [0, 255].
    """
    colors = np.asarray(color, dtype=np.float64)
    if np.any((colors < 0) | (colors > MAX_GRAY)):
        raise FrqiError(f"colors must lie in [0, {MAX_GRAY}]")
    angles = colors * (np.pi / 2.0) / MAX_GRAY
    return float(angles) if angles.ndim == 0 else angles


def _color_qubits(image: Image) -> np.ndarray:
    """Return one (cos, sin) row per pixel."""
    theta = color_to_angle(image.as_array())
    return np.stack([np.cos(theta), np.sin(theta)], axis=1)


def encode_frqi(image: Image) -> StateVector:
    """Encode one image.

    Amplitude of (c, i) is cos(theta_i) / 2^n for c=0 and sin(theta_i) / 2^n for c=1.
    """
    qubits = _color_qubits(image)
    amplitudes = qubits.T.reshape(-1) / image.side
    register = (COLOR_A,) + position_labels(2 * image.qubits_per_axis)
    return StateVector(qubits=register, amplitudes=amplitudes)


def encode_joint(a: Image, b: Image) -> StateVector:
    """Encode an image pair sharing one position register.

    Amplitude of (i, cA, cB) is f(cA, theta_A_i) * f(cB, theta_B_i) / 2^n, with
    f(0, t) = cos t and f(1, t) = sin t.

    Raises:
        FrqiError: if the images differ in size.
    """
    if a.side != b.side:
        raise FrqiError(f"images differ in size: {a.side} vs {b.side}")
    qa, qb = _color_qubits(a), _color_qubits(b)
    amplitudes = (qa[:, :, None] * qb[:, None, :]).reshape(-1) / a.side
    register = position_labels(2 * a.qubits_per_axis) + (COLOR_A, COLOR_B)
    return StateVector(qubits=register, amplitudes=amplitudes)


def density(state: StateVector) -> DensityMatrix:
    """Return the pure-state density matrix |psi><psi|."""
    return DensityMatrix(qubits=state.qubits, matrix=symlinalg.outer(state.amplitudes))


def _gather_bits(indices: np.ndarray, bit_positions: List[int], num_qubits: int) -> np.ndarray:
    """Pack the listed register bits of each basis index into a compact index (first = MSB)."""
    packed = np.zeros_like(indices)
    for pos in bit_positions:
        packed = (packed << 1) | ((indices >> (num_qubits - 1 - pos)) & 1)
    return packed


def _resolve(register: Tuple[QubitLabel, ...], labels: Iterable[QubitLabel]) -> List[int]:
    """Return register positions of ``labels``, in register order."""
    wanted = set(labels)
    unknown = wanted.difference(register)
    if unknown:
        raise RegisterError(f"labels {sorted(unknown)} not in register {register}")
    return [k for k, label in enumerate(register) if label in wanted]


def partial_trace(rho: DensityMatrix, keep: Iterable[QubitLabel]) -> DensityMatrix:
    """Trace out every qubit not in ``keep``.

    The kept qubits retain their relative register order. Entry (i, j) of the result sums
    rho over all basis pairs that agree on the traced bits and carry kept bits i and j.

    Raises:
        RegisterError: if ``keep`` is empty or names a label outside the register.
    """
    kept = _resolve(rho.qubits, keep)
    if not kept:
        raise RegisterError("cannot trace out every qubit; 'keep' is empty")
    num_qubits = len(rho.qubits)
    if len(kept) == num_qubits:
        return rho

    traced = [k for k in range(num_qubits) if k not in kept]
    indices = np.arange(2**num_qubits)
    kept_index = _gather_bits(indices, kept, num_qubits)
    traced_index = _gather_bits(indices, traced, num_qubits)

    rows, cols = np.nonzero(traced_index[:, None] == traced_index[None, :])
    dim = 2 ** len(kept)
    flat = kept_index[rows] * dim + kept_index[cols]
    reduced = np.bincount(flat, weights=rho.matrix[rows, cols], minlength=dim * dim)

    register = tuple(rho.qubits[k] for k in kept)
    logger.debug("partial trace %s -> %s", rho.qubits, register)
    return DensityMatrix(qubits=register, matrix=reduced.reshape(dim, dim))


def trace_out(rho: DensityMatrix, discard: Iterable[QubitLabel]) -> DensityMatrix:
    """Trace out the ``discard`` qubits, keeping the rest."""
    dropped = set(_resolve(rho.qubits, discard))
    return partial_trace(rho, [label for k, label in enumerate(rho.qubits) if k not in dropped])


def positions(register: Sequence[QubitLabel]) -> Tuple[QubitLabel, ...]:
    """Return the position-qubit labels of ``register``, in order."""
    return tuple(label for label in register if is_position(label))
