#!/usr/bin/env python3
# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Quantum and classical entropy and correlation measures.

Quantum side: von Neumann entropy of (reduced) density matrices, conditional entropy,
mutual information and the tripartite measures (interaction information I0, total
correlation IT, dual total correlation ID). Classical side: the 256x256 joint histogram of
two images and its Shannon entropies, mutual information and normalized mutual information.

Entropies are in bits unless ``base="e"`` is requested; 0 log 0 is taken as 0.
"""

import logging
from typing import Dict, FrozenSet, Iterable, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, root_validator, validator
from scipy import stats

import frqi
from frqi import COLOR_A, COLOR_B, DensityMatrix, QubitLabel
from imagegrid import MAX_GRAY, Image

logger = logging.getLogger(__name__)

LEVELS = MAX_GRAY + 1
MI_CLAMP = 1e-9
ENTROPY_BASES = ("2", "e")


class PartitionError(ValueError):
    """Raised when subsystem parts overlap, are empty or do not cover the register."""


def _log(values: np.ndarray, base: str) -> np.ndarray:
    if base == "2":
        return np.log2(values)
    if base == "e":
        return np.log(values)
    raise ValueError(f"Base must be one of {ENTROPY_BASES}, got {base!r}")


def entropy_of_spectrum(eigenvalues: np.ndarray, base: str = "2") -> float:
    """Return -sum(l log l) over the strictly positive eigenvalues."""
    nonzero = eigenvalues[eigenvalues > 0.0]
    return max(0.0, float(-np.sum(nonzero * _log(nonzero, base))))


def von_neumann_entropy(rho: DensityMatrix, base: str = "2", method: str = "lapack") -> float:
    """Return S(rho) = -Tr(rho log rho).

    Raises:
        NegativeEigenvalueError: if rho has an eigenvalue below -1e-9.
    """
    return entropy_of_spectrum(rho.spectrum(method=method).clamped(), base)


class SubsystemEntropies:
    """Memoized entropies of reduced states of one global density matrix.

    Pass one instance as ``entropies`` to several measure functions to evaluate each
    reduced state only once.
    """

    def __init__(self, rho: DensityMatrix, base: str = "2", method: str = "lapack"):
        self.rho = rho
        self.base = base
        self.method = method
        self._cache: Dict[FrozenSet[QubitLabel], float] = {}

    def __call__(self, *parts: Iterable[QubitLabel]) -> float:
        """Return the entropy of the union of ``parts``."""
        labels = frozenset(label for part in parts for label in part)
        if labels not in self._cache:
            reduced = frqi.partial_trace(self.rho, labels)
            self._cache[labels] = von_neumann_entropy(reduced, self.base, self.method)
            logger.debug("S(%s) = %.6f", ",".join(reduced.qubits), self._cache[labels])
        return self._cache[labels]


def _entropies_for(
    rho: DensityMatrix, base: str, method: str, entropies: Optional[SubsystemEntropies]
) -> SubsystemEntropies:
    if entropies is None:
        return SubsystemEntropies(rho, base, method)
    if entropies.rho is not rho:
        raise ValueError("entropy cache was built for another density matrix")
    return entropies


def _disjoint(*parts: Iterable[QubitLabel]) -> Tuple[FrozenSet[QubitLabel], ...]:
    sets = tuple(frozenset(part) for part in parts)
    if any(not s for s in sets):
        raise PartitionError("subsystem parts must be non-empty")
    seen: set = set()
    for s in sets:
        if seen & s:
            raise PartitionError(f"subsystem parts overlap on {sorted(seen & s)}")
        seen |= s
    return sets


def conditional_entropy(
    rho: DensityMatrix,
    part_a: Iterable[QubitLabel],
    part_b: Iterable[QubitLabel],
    base: str = "2",
    method: str = "lapack",
    entropies: Optional[SubsystemEntropies] = None,
) -> float:
    """Return S(A|B) = S(A, B) - S(B); negative values signal entanglement."""
    a, b = _disjoint(part_a, part_b)
    entropy = _entropies_for(rho, base, method, entropies)
    return entropy(a, b) - entropy(b)


def quantum_mutual_information(
    rho: DensityMatrix,
    part_a: Iterable[QubitLabel],
    part_b: Iterable[QubitLabel],
    base: str = "2",
    method: str = "lapack",
    entropies: Optional[SubsystemEntropies] = None,
) -> float:
    """Return I(A;B) = S(A) + S(B) - S(A, B), with eigensolver noise above -1e-9 clamped to 0."""
    a, b = _disjoint(part_a, part_b)
    entropy = _entropies_for(rho, base, method, entropies)
    return _clamp_mi(entropy(a) + entropy(b) - entropy(a, b))


def conditional_mutual_information(
    rho: DensityMatrix,
    part_a: Iterable[QubitLabel],
    part_b: Iterable[QubitLabel],
    part_c: Iterable[QubitLabel],
    base: str = "2",
    method: str = "lapack",
    entropies: Optional[SubsystemEntropies] = None,
) -> float:
    """Return I(A;B|C) = S(A, C) + S(B, C) - S(A, B, C) - S(C).

    Together with :func:`quantum_mutual_information` this gives the chain-rule forms of the
    tripartite measures: I0 = I(A;B) - I(A;B|C), IT = I(A;B) + I(A;C) + I(B;C|A) and
    ID = I(A;B) + I(A;C|B) + I(B;C|A).
    """
    a, b, c = _disjoint(part_a, part_b, part_c)
    entropy = _entropies_for(rho, base, method, entropies)
    return _clamp_mi(entropy(a, c) + entropy(b, c) - entropy(a, b, c) - entropy(c))


def _clamp_mi(value: float) -> float:
    return 0.0 if -MI_CLAMP <= value < 0.0 else value


class Tripartite(NamedTuple):
    """Interaction information, total correlation and dual total correlation."""

    I0: float
    IT: float
    ID: float


def _partition(rho: DensityMatrix, parts: Sequence[Iterable[QubitLabel]]):
    if len(parts) != 3:
        raise PartitionError(f"expected three parts, got {len(parts)}")
    sets = _disjoint(*parts)
    if frozenset().union(*sets) != frozenset(rho.qubits):
        raise PartitionError(f"parts do not cover the register {rho.qubits}")
    return sets


def tripartite_measures(
    rho: DensityMatrix,
    parts: Sequence[Iterable[QubitLabel]],
    base: str = "2",
    method: str = "lapack",
    entropies: Optional[SubsystemEntropies] = None,
) -> Tripartite:
    """Return (I0, IT, ID) for a partition of the register into three parts.

    Expansions over the seven subsystem entropies:
        I0 = S(A) + S(B) + S(C) - S(AB) - S(AC) - S(BC) + S(ABC)
        IT = S(A) + S(B) + S(C) - S(ABC)
        ID = S(AB) + S(AC) + S(BC) - 2 S(ABC)

    Raises:
        PartitionError: if ``parts`` is not a partition of the register.
    """
    a, b, c = _partition(rho, parts)
    s = _entropies_for(rho, base, method, entropies)
    singles = s(a) + s(b) + s(c)
    pairs = s(a, b) + s(a, c) + s(b, c)
    whole = s(a, b, c)
    return Tripartite(I0=singles - pairs + whole, IT=singles - whole, ID=pairs - 2 * whole)


class JointHistogram(BaseModel):
    """Co-occurrence counts of gray-level pairs at identical positions."""

    counts: np.ndarray
    total: int

    class Config:
        """Pydantic config."""

        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("counts")
    def validate_counts(cls, counts):  # noqa: N805
        """Counts form a non-negative 256x256 integer table."""
        if counts.shape != (LEVELS, LEVELS):
            raise ValueError(f"expected a {LEVELS}x{LEVELS} table, got {counts.shape}")
        if counts.min() < 0:
            raise ValueError("counts must be non-negative")
        return counts.astype(np.int64)

    @root_validator(skip_on_failure=True)
    def validate_total(cls, values):  # noqa: N805
        """Total must be positive and equal the sum of counts."""
        total, counts = values["total"], values["counts"]
        if total <= 0 or total != int(counts.sum()):
            raise ValueError(f"total {total} does not match counts sum {int(counts.sum())}")
        return values

    def marginal_a(self) -> np.ndarray:
        """Gray-level histogram of the first image."""
        return self.counts.sum(axis=1)

    def marginal_b(self) -> np.ndarray:
        """Gray-level histogram of the second image."""
        return self.counts.sum(axis=0)


def joint_histogram(a: Image, b: Image) -> JointHistogram:
    """Count pixel positions i with (a[i], b[i]) == (va, vb) for every gray pair.

    Raises:
        ValueError: if the images differ in size.
    """
    if a.side != b.side:
        raise ValueError(f"images differ in size: {a.side} vs {b.side}")
    flat = a.as_array() * LEVELS + b.as_array()
    counts = np.bincount(flat, minlength=LEVELS * LEVELS).reshape(LEVELS, LEVELS)
    return JointHistogram(counts=counts, total=a.size)


def shannon_entropy(counts: np.ndarray, base: str = "2") -> float:
    """Return the Shannon entropy of a histogram (normalized internally).

    Only non-zero cells contribute, summed in sorted order, so equal count multisets give
    bit-identical entropies.
    """
    if base not in ENTROPY_BASES:
        raise ValueError(f"Base must be one of {ENTROPY_BASES}, got {base!r}")
    cells = np.sort(np.asarray(counts).ravel()[np.asarray(counts).ravel() > 0])
    return float(stats.entropy(cells, base=2 if base == "2" else None))


class ClassicalEntropies(NamedTuple):
    """Shannon entropies of a joint histogram."""

    H_A: float
    H_B: float
    H_AB: float
    I: float  # noqa: E741
    NMI: float


def classical_entropies(h: JointHistogram, base: str = "2") -> ClassicalEntropies:
    """Return H(A), H(B), H(A, B), I(A;B) and NMI = (H(A) + H(B)) / H(A, B).

    NMI is 2 when H(A, B) == 0 (the perfectly correlated constant pair).
    """
    h_a = shannon_entropy(h.marginal_a(), base)
    h_b = shannon_entropy(h.marginal_b(), base)
    h_ab = shannon_entropy(h.counts, base)
    mutual = h_a + h_b - h_ab
    if -1e-12 <= mutual < 0.0:
        mutual = 0.0
    nmi = 2.0 if h_ab <= 1e-15 else (h_a + h_b) / h_ab
    return ClassicalEntropies(H_A=h_a, H_B=h_b, H_AB=h_ab, I=mutual, NMI=nmi)


class CorrelationReport(BaseModel):
    """Subsystem entropies and correlation measures for one image pair.

    ``12`` denotes the position register; ``A`` and ``B`` the two color qubits.
    ``I_AB_12`` is the conditional mutual information I(A;B|12), so that
    ``I0 == I_AB - I_AB_12``.
    """

    S_A: float
    S_B: float
    S_12: float
    S_AB: float
    S_A12: float
    S_B12: float
    I0: float
    IT: float
    ID: float
    I_AB: float
    I_AB_12: float
    H_A: Optional[float] = None
    H_B: Optional[float] = None
    H_AB: Optional[float] = None
    I_classical: Optional[float] = None
    NMI: Optional[float] = None

    class Config:
        """Pydantic config."""

        allow_mutation = False

    @validator("S_A", "S_B", "S_12", "S_AB", "S_A12", "S_B12")
    def validate_entropy(cls, value):  # noqa: N805
        """Entropies are non-negative."""
        if value < 0.0:
            raise ValueError(f"negative entropy {value}")
        return value


def correlation_report(
    a: Image,
    b: Image,
    with_classical: bool = True,
    base: str = "2",
    method: str = "lapack",
) -> CorrelationReport:
    """Encode (a, b) jointly and evaluate every measure on the pure global state."""
    rho = frqi.density(frqi.encode_joint(a, b))
    pos = frozenset(frqi.positions(rho.qubits))
    color_a, color_b = frozenset([COLOR_A]), frozenset([COLOR_B])
    s = SubsystemEntropies(rho, base, method)

    tripartite = tripartite_measures(rho, [color_a, color_b, pos], entropies=s)
    fields = dict(
        S_A=s(color_a),
        S_B=s(color_b),
        S_12=s(pos),
        S_AB=s(color_a, color_b),
        S_A12=s(color_a, pos),
        S_B12=s(color_b, pos),
        I0=tripartite.I0,
        IT=tripartite.IT,
        ID=tripartite.ID,
        I_AB=quantum_mutual_information(rho, color_a, color_b, entropies=s),
        I_AB_12=conditional_mutual_information(rho, color_a, color_b, pos, entropies=s),
    )
    if with_classical:
        classical = classical_entropies(joint_histogram(a, b), base)
        fields.update(
            H_A=classical.H_A,
            H_B=classical.H_B,
            H_AB=classical.H_AB,
            I_classical=classical.I,
            NMI=classical.NMI,
        )
    return CorrelationReport(**fields)


def single_image_measures(
    image: Image, base: str = "2", method: str = "lapack"
) -> Tuple[float, float, float, float, float]:
    """Return (Tr(rho_cp^2), Tr(rho_c^2), Tr(rho_p^2), S(rho_c), S(rho_p)) for one image."""
    rho = frqi.density(frqi.encode_frqi(image))
    rho_c = frqi.partial_trace(rho, [COLOR_A])
    rho_p = frqi.trace_out(rho, [COLOR_A])
    return (
        rho.purity(),
        rho_c.purity(),
        rho_p.purity(),
        von_neumann_entropy(rho_c, base, method),
        von_neumann_entropy(rho_p, base, method),
    )
