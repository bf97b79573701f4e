#!/usr/bin/env python3
# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import math
import unittest

import numpy as np
from frqi import (
    COLOR_A,
    COLOR_B,
    DensityMatrix,
    StateVector,
    density,
    encode_frqi,
    encode_joint,
    partial_trace,
)
from imagegrid import Image, binary_patterns, parse_pattern
from infomeasures import (
    JointHistogram,
    PartitionError,
    SubsystemEntropies,
    classical_entropies,
    conditional_entropy,
    conditional_mutual_information,
    correlation_report,
    joint_histogram,
    quantum_mutual_information,
    shannon_entropy,
    single_image_measures,
    tripartite_measures,
    von_neumann_entropy,
)
from pydantic import ValidationError
from symlinalg import NegativeEigenvalueError

# Binary entropy of (3/4, 1/4), in bits.
H_QUARTER = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25))
POSITIONS_2X2 = ("p0", "p1")


def mixed(register, diagonal) -> DensityMatrix:
    return DensityMatrix(qubits=register, matrix=np.diag(diagonal))


def joint_density(a: str, b: str) -> DensityMatrix:
    return density(encode_joint(parse_pattern(a), parse_pattern(b)))


def image_from_histogram(cells) -> Image:
    return Image(side=2, pixels=tuple(cells))


class TestVonNeumannEntropy(unittest.TestCase):
    def test_pure_state(self):
        rho = density(StateVector(qubits=("q",), amplitudes=np.array([0.6, 0.8])))
        self.assertAlmostEqual(0.0, von_neumann_entropy(rho), delta=1e-9)

    def test_mixed_states(self):
        quarter = von_neumann_entropy(mixed(("q",), [0.75, 0.25]))
        self.assertAlmostEqual(H_QUARTER, quarter)
        self.assertAlmostEqual(0.811278, quarter, places=6)
        self.assertAlmostEqual(1.0, von_neumann_entropy(mixed(("q",), [0.5, 0.5])), places=12)
        self.assertAlmostEqual(
            2.0, von_neumann_entropy(mixed(("q", "r"), [0.25] * 4)), places=12
        )

    def test_checker_position_state(self):
        rho = density(encode_frqi(parse_pattern("graylist:51,204,204,51")))
        rho_p = partial_trace(rho, POSITIONS_2X2)
        c = math.cos(0.3 * math.pi)
        eigenvalues = [(1 + c) / 2, (1 - c) / 2]
        nats = -sum(x * math.log(x) for x in eigenvalues)
        self.assertAlmostEqual(nats, von_neumann_entropy(rho_p, base="e"), places=12)
        self.assertAlmostEqual(0.509, von_neumann_entropy(rho_p, base="e"), delta=5e-4)
        self.assertAlmostEqual(nats / math.log(2), von_neumann_entropy(rho_p), places=12)
        self.assertAlmostEqual(0.734, von_neumann_entropy(rho_p), delta=5e-4)

    def test_solvers_agree(self):
        rho = joint_density("1000", "0011")
        for keep in ([COLOR_A, COLOR_B], ["p0", "p1"], ["p0", COLOR_B]):
            reduced = partial_trace(rho, keep)
            self.assertAlmostEqual(
                von_neumann_entropy(reduced),
                von_neumann_entropy(reduced, method="jacobi"),
                delta=1e-9,
            )

    def test_negative_eigenvalue(self):
        with self.assertRaises(NegativeEigenvalueError):
            von_neumann_entropy(mixed(("q",), [1.1, -0.1]))

    def test_unknown_base(self):
        with self.assertRaises(ValueError):
            von_neumann_entropy(mixed(("q",), [0.5, 0.5]), base="10")


class TestBipartite(unittest.TestCase):
    def setUp(self):
        self.joint = joint_density("1000", "1010")

    def test_conditional_entropy_of_colors(self):
        value = conditional_entropy(self.joint, [COLOR_A], [COLOR_B])
        self.assertAlmostEqual(0.5, value, places=9)

    def test_conditional_entropy_of_pure_state(self):
        bell = StateVector(
            qubits=("q0", "q1"), amplitudes=np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)
        )
        self.assertAlmostEqual(-1.0, conditional_entropy(density(bell), ["q0"], ["q1"]), places=9)

        rho = density(encode_frqi(parse_pattern("graylist:51,204,204,51")))
        s_a = von_neumann_entropy(partial_trace(rho, [COLOR_A]))
        self.assertAlmostEqual(-s_a, conditional_entropy(rho, [COLOR_A], POSITIONS_2X2), places=9)

    def test_conditional_entropy_of_product_state(self):
        rho = DensityMatrix(
            qubits=("x", "y"), matrix=np.kron(np.diag([0.75, 0.25]), np.diag([0.5, 0.5]))
        )
        self.assertAlmostEqual(H_QUARTER, conditional_entropy(rho, ["x"], ["y"]), places=9)
        self.assertAlmostEqual(0.0, quantum_mutual_information(rho, ["x"], ["y"]), places=9)

    def test_mutual_information_of_colors(self):
        value = quantum_mutual_information(self.joint, [COLOR_A], [COLOR_B])
        self.assertAlmostEqual(H_QUARTER + 1.0 - 1.5, value, places=9)

    def test_mutual_information_of_pure_bipartition(self):
        value = quantum_mutual_information(self.joint, ["p0", "p1", COLOR_A], [COLOR_B])
        s_b = von_neumann_entropy(partial_trace(self.joint, [COLOR_B]))
        self.assertAlmostEqual(2 * s_b, value, places=9)

    def test_conditional_mutual_information(self):
        value = conditional_mutual_information(self.joint, [COLOR_A], [COLOR_B], POSITIONS_2X2)
        self.assertGreaterEqual(value, 0.0)
        tri = tripartite_measures(self.joint, [[COLOR_A], [COLOR_B], POSITIONS_2X2])
        self.assertAlmostEqual(
            quantum_mutual_information(self.joint, [COLOR_A], [COLOR_B]) - value, tri.I0, places=9
        )

    def test_overlapping_parts(self):
        with self.assertRaises(PartitionError):
            conditional_entropy(self.joint, [COLOR_A], [COLOR_A, COLOR_B])
        with self.assertRaises(PartitionError):
            quantum_mutual_information(self.joint, [], [COLOR_B])


class TestTripartite(unittest.TestCase):
    def test_binary_pair(self):
        rho = joint_density("1000", "1010")
        tri = tripartite_measures(rho, [[COLOR_A], [COLOR_B], POSITIONS_2X2])
        self.assertAlmostEqual(0.0, tri.I0, delta=1e-9)
        self.assertAlmostEqual(H_QUARTER + 2.5, tri.IT, delta=1e-9)
        self.assertAlmostEqual(3.311278, tri.IT, places=6)
        self.assertAlmostEqual(tri.IT, tri.ID, delta=1e-9)

    def test_patron_against_black(self):
        tri = tripartite_measures(
            joint_density("1000", "0000"), [[COLOR_A], [COLOR_B], POSITIONS_2X2]
        )
        self.assertAlmostEqual(0.0, tri.I0, delta=1e-9)
        self.assertAlmostEqual(1.622556, tri.IT, places=6)
        self.assertAlmostEqual(1.622556, tri.ID, places=6)

    def test_product_state(self):
        matrix = np.kron(np.kron(np.diag([0.75, 0.25]), np.diag([0.5, 0.5])), np.diag([0.9, 0.1]))
        rho = DensityMatrix(qubits=("x", "y", "z"), matrix=matrix)
        for value in tripartite_measures(rho, [["x"], ["y"], ["z"]]):
            self.assertAlmostEqual(0.0, value, delta=1e-9)

    def test_chain_rule_agrees(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            a = Image(side=2, pixels=tuple(int(v) for v in rng.integers(0, 256, size=4)))
            b = Image(side=2, pixels=tuple(int(v) for v in rng.integers(0, 256, size=4)))
            rho = density(encode_joint(a, b))
            s = SubsystemEntropies(rho)
            part_a, part_b, part_c = [COLOR_A], [COLOR_B], POSITIONS_2X2

            def mi(x, y):
                return quantum_mutual_information(rho, x, y, entropies=s)

            def cmi(x, y, z):
                return conditional_mutual_information(rho, x, y, z, entropies=s)

            chain = (
                mi(part_a, part_b) - cmi(part_a, part_b, part_c),
                mi(part_a, part_b) + mi(part_a, part_c) + cmi(part_b, part_c, part_a),
                mi(part_a, part_b) + cmi(part_a, part_c, part_b) + cmi(part_b, part_c, part_a),
            )
            np.testing.assert_allclose(
                tripartite_measures(rho, [part_a, part_b, part_c], entropies=s), chain, atol=1e-9
            )

    def test_shared_cache_must_match_state(self):
        rho = joint_density("1000", "1010")
        other = SubsystemEntropies(joint_density("1000", "0000"))
        with self.assertRaises(ValueError):
            quantum_mutual_information(rho, [COLOR_A], [COLOR_B], entropies=other)

    def test_not_a_partition(self):
        rho = joint_density("1000", "1010")
        with self.assertRaises(PartitionError):
            tripartite_measures(rho, [[COLOR_A], [COLOR_B], ["p0"]])
        with self.assertRaises(PartitionError):
            tripartite_measures(rho, [[COLOR_A], [COLOR_B, "p0"], POSITIONS_2X2])
        with self.assertRaises(PartitionError):
            tripartite_measures(rho, [[COLOR_A, COLOR_B], POSITIONS_2X2])


class TestClassical(unittest.TestCase):
    def test_joint_histogram(self):
        h = joint_histogram(parse_pattern("1000"), parse_pattern("1010"))
        self.assertEqual(4, h.total)
        self.assertEqual(1, h.counts[255, 255])
        self.assertEqual(1, h.counts[0, 255])
        self.assertEqual(2, h.counts[0, 0])
        self.assertEqual(4, int(h.counts.sum()))

    def test_joint_histogram_of_flat_images(self):
        h = joint_histogram(parse_pattern("0000"), parse_pattern("0000"))
        self.assertEqual(4, h.counts[0, 0])
        self.assertEqual(1, np.count_nonzero(h.counts))

    def test_size_mismatch(self):
        with self.assertRaises(ValueError):
            joint_histogram(parse_pattern("0000"), parse_pattern("0" * 16))

    def test_histogram_validation(self):
        with self.assertRaises(ValidationError):
            JointHistogram(counts=np.zeros((256, 256), dtype=np.int64), total=0)
        with self.assertRaises(ValidationError):
            JointHistogram(counts=np.ones((4, 4), dtype=np.int64), total=16)

    def test_one_constant_image(self):
        a = image_from_histogram([0, 0, 0, 0])
        b = image_from_histogram([0, 0, 0, 128])
        result = classical_entropies(joint_histogram(a, b))
        self.assertAlmostEqual(0.0, result.H_A, places=12)
        self.assertAlmostEqual(H_QUARTER, result.H_B, places=12)
        self.assertAlmostEqual(H_QUARTER, result.H_AB, places=12)
        self.assertAlmostEqual(0.0, result.I, places=12)
        self.assertAlmostEqual(1.0, result.NMI, places=12)

    def test_perfect_correlation(self):
        a = image_from_histogram([0, 0, 255, 255])
        result = classical_entropies(joint_histogram(a, a))
        self.assertEqual((1.0, 1.0, 1.0, 1.0, 2.0), tuple(round(v, 12) for v in result))

    def test_constant_pair(self):
        a = image_from_histogram([7, 7, 7, 7])
        result = classical_entropies(joint_histogram(a, a))
        self.assertEqual((0.0, 0.0, 0.0, 0.0, 2.0), tuple(result))

    def test_natural_base(self):
        self.assertAlmostEqual(math.log(2), shannon_entropy(np.array([1, 1]), base="e"))
        with self.assertRaises(ValueError):
            shannon_entropy(np.array([1, 1]), base="10")

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            a = Image(side=4, pixels=tuple(int(v) for v in rng.integers(0, 256, size=16)))
            b = Image(side=4, pixels=tuple(int(v) for v in rng.integers(0, 256, size=16)))
            perm_a, perm_b = rng.permutation(256), rng.permutation(256)
            a2 = Image(side=4, pixels=tuple(int(perm_a[v]) for v in a.pixels))
            b2 = Image(side=4, pixels=tuple(int(perm_b[v]) for v in b.pixels))
            before = classical_entropies(joint_histogram(a, b))
            after = classical_entropies(joint_histogram(a2, b2))
            self.assertAlmostEqual(before.H_AB, after.H_AB, places=12)
            self.assertAlmostEqual(before.I, after.I, places=12)


class TestCorrelationReport(unittest.TestCase):
    def test_binary_pair(self):
        report = correlation_report(parse_pattern("1000"), parse_pattern("1010"))
        self.assertAlmostEqual(H_QUARTER, report.S_A, places=9)
        self.assertAlmostEqual(1.0, report.S_B, places=9)
        self.assertAlmostEqual(1.5, report.S_12, places=9)
        self.assertAlmostEqual(1.5, report.S_AB, places=9)
        self.assertAlmostEqual(1.0, report.S_A12, places=9)
        self.assertAlmostEqual(H_QUARTER, report.S_B12, places=9)
        self.assertAlmostEqual(0.0, report.I0, delta=1e-9)
        self.assertAlmostEqual(H_QUARTER + 2.5, report.IT, places=9)
        self.assertAlmostEqual(report.IT, report.ID, places=9)
        self.assertAlmostEqual(H_QUARTER - 0.5, report.I_AB, places=9)
        self.assertAlmostEqual(1.5, report.H_AB, places=9)

    def test_quantum_only(self):
        report = correlation_report(parse_pattern("1000"), parse_pattern("1010"), False)
        self.assertIsNone(report.H_AB)
        self.assertIsNone(report.NMI)

    def test_all_binary_pairs(self):
        patterns = list(binary_patterns(4).values())
        for a in patterns:
            for b in patterns:
                report = correlation_report(a, b)
                # Pure global state: complementary subsystems share their entropy.
                self.assertAlmostEqual(report.S_A, report.S_B12, delta=1e-9)
                self.assertAlmostEqual(report.S_B, report.S_A12, delta=1e-9)
                self.assertAlmostEqual(report.S_12, report.S_AB, delta=1e-9)
                self.assertAlmostEqual(0.0, report.I0, delta=1e-9)
                self.assertAlmostEqual(report.IT, report.ID, delta=1e-9)
                # Binary images: the color state is the joint histogram.
                self.assertAlmostEqual(report.S_A, report.H_A, delta=1e-9)
                self.assertAlmostEqual(report.S_B, report.H_B, delta=1e-9)
                self.assertAlmostEqual(report.S_AB, report.H_AB, delta=1e-9)

    def test_pure_bipartition_doubles_entropy(self):
        patterns = list(binary_patterns(4).values())
        for a in patterns:
            for b in patterns:
                rho = density(encode_joint(a, b))
                s = SubsystemEntropies(rho)
                for part in ([COLOR_A], [COLOR_B], POSITIONS_2X2):
                    rest = [label for label in rho.qubits if label not in part]
                    value = quantum_mutual_information(rho, part, rest, entropies=s)
                    self.assertAlmostEqual(2 * s(part), value, delta=1e-9)

    def test_conditional_mutual_information_of_colors(self):
        report = correlation_report(parse_pattern("1000"), parse_pattern("1010"), False)
        self.assertAlmostEqual(report.I_AB - report.I0, report.I_AB_12, delta=1e-9)

    def test_gray_levels_separate_quantum_from_classical(self):
        a = parse_pattern("graylist:128,128,128,128")
        b = parse_pattern("graylist:0,128,128,128")
        report = correlation_report(a, b)
        self.assertGreater(abs(report.S_AB - report.H_AB), 0.05)

    def test_natural_base(self):
        report = correlation_report(parse_pattern("1000"), parse_pattern("1010"), base="e")
        self.assertAlmostEqual(1.5 * math.log(2), report.S_AB, places=9)
        self.assertAlmostEqual(1.5 * math.log(2), report.H_AB, places=9)


class TestSingleImage(unittest.TestCase):
    def test_one_white_pixel(self):
        purity_cp, purity_c, purity_p, s_c, s_p = single_image_measures(parse_pattern("1000"))
        self.assertAlmostEqual(1.0, purity_cp, places=12)
        self.assertAlmostEqual(0.625, purity_c, places=12)
        self.assertAlmostEqual(0.625, purity_p, places=12)
        self.assertAlmostEqual(H_QUARTER, s_c, places=9)
        self.assertAlmostEqual(H_QUARTER, s_p, places=9)

    def test_balanced(self):
        _, purity_c, _, s_c, s_p = single_image_measures(parse_pattern("0011"))
        self.assertAlmostEqual(0.5, purity_c, places=12)
        self.assertAlmostEqual(1.0, s_c, places=9)
        self.assertAlmostEqual(1.0, s_p, places=9)
