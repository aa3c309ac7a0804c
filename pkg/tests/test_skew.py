import math

import numpy as np
import pytest

from skewchain.errors import DimensionMismatchError, NotHermitianError
from skewchain.example import example_channels, rho_theta
from skewchain.linalg import max_abs
from skewchain.objects import (
    Convention,
    mix_kraus,
    random_channel,
    random_density,
    random_unitary,
    validate_density,
)
from skewchain.skew import (
    commutator_frame,
    observable_commutator_bound,
    skew_info_channel,
    skew_info_observable,
    skew_info_operator,
)


def brute_skew(dm, k):
    """Oracle: (1/2) Tr(C^dag C) via explicit matrix products."""
    c = dm.sqrt_rho @ k - k @ dm.sqrt_rho
    return 0.5 * float(np.trace(c.conj().T @ c).real)


class TestCommutatorFrame:
    def test_maximally_mixed_gives_zero_frame(self):
        dm = validate_density(np.eye(4) / 4)
        frame = commutator_frame(dm, np.diag([1.0, 2.0, 3.0, 4.0]))
        assert max_abs(frame.matrix) <= 1e-15
        assert all(np.linalg.norm(col) <= 1e-15 for col in frame.columns)

    def test_columns_are_matrix_columns(self):
        dm = random_density(4, 4, seed=3)
        k = random_unitary(4, seed=4)
        frame = commutator_frame(dm, k)
        for idx, col in enumerate(frame.columns):
            assert np.array_equal(col, frame.matrix[:, idx])

    def test_block_structure_of_worked_example(self):
        # [sqrt(rho(1)), E1(p=1/2)] is c * [[0,1],[-1,0]] on each block,
        # c = (sqrt(1/2) - 1) / (2 sqrt(2))
        dm = rho_theta(1.0)
        n1, _ = example_channels(0.5, 0.5)
        frame = commutator_frame(dm, n1.operators[0])
        c = (math.sqrt(0.5) - 1.0) / (2.0 * math.sqrt(2.0))
        block = c * np.array([[0, 1], [-1, 0]], dtype=complex)
        expected = np.zeros((4, 4), dtype=complex)
        expected[:2, :2] = block
        expected[2:, 2:] = block
        assert max_abs(frame.matrix - expected) <= 1e-14

    def test_diagonal_state_and_operator_commute(self):
        dm = validate_density(np.diag([0.5, 0.3, 0.2]))
        frame = commutator_frame(dm, np.diag([1.0, 5.0, 9.0]))
        assert max_abs(frame.matrix) == 0.0

    def test_half_column_norms_equal_skew_info(self):
        dm = random_density(5, 3, seed=8)
        k = random_unitary(5, seed=9)
        frame = commutator_frame(dm, k)
        total = 0.5 * math.fsum(frame.column_norms_sq().tolist())
        assert total == pytest.approx(skew_info_operator(dm, k), abs=1e-12)

    def test_dimension_mismatch(self):
        dm = random_density(3, 3, seed=1)
        with pytest.raises(DimensionMismatchError):
            commutator_frame(dm, np.eye(4))


class TestSkewInfoOperator:
    def test_maximally_mixed_is_zero(self):
        dm = validate_density(np.eye(4) / 4)
        assert skew_info_operator(dm, random_unitary(4, seed=2)) == 0.0

    def test_worked_example_e1(self):
        # closed form (1 - sqrt(1-p))^2 (1 - 2 sqrt(theta(1-theta))) / 4
        dm = rho_theta(1.0)
        n1, _ = example_channels(0.5, 0.5)
        value = skew_info_operator(dm, n1.operators[0])
        assert value == pytest.approx(brute_skew(dm, n1.operators[0]), abs=1e-14)
        assert value == pytest.approx(0.021446609406726224, abs=1e-12)

    def test_worked_example_e2(self):
        # closed form p (1 - 2 sqrt(theta(1-theta))) / 4
        dm = rho_theta(1.0)
        n1, _ = example_channels(0.5, 0.5)
        value = skew_info_operator(dm, n1.operators[1])
        assert value == pytest.approx(0.125, abs=1e-12)

    def test_nonnegative_and_zero_iff_commuting(self):
        dm = random_density(4, 4, seed=5)
        for seed in range(5):
            k = random_unitary(4, seed=60 + seed)
            value = skew_info_operator(dm, k)
            frame = commutator_frame(dm, k)
            assert value >= 0.0
            if max_abs(frame.matrix) <= 1e-12:
                assert value <= 1e-12
            else:
                assert value > 1e-12
        # commuting case: polynomial in rho
        poly = dm.rho @ dm.rho
        assert skew_info_operator(dm, poly) <= 1e-12

    def test_matches_brute_force_on_random(self):
        rng = np.random.default_rng(71)
        for _ in range(10):
            dm = random_density(3, 3, seed=int(rng.integers(1 << 32)))
            k = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            assert skew_info_operator(dm, k) == pytest.approx(brute_skew(dm, k), abs=1e-12)


class TestSkewInfoChannel:
    def test_incoherent_point_vanishes(self):
        dm = rho_theta(0.5)
        n1, n2 = example_channels(0.5, 0.5)
        assert skew_info_channel(dm, n1) == 0.0
        assert skew_info_channel(dm, n2) == 0.0

    def test_worked_example_value(self):
        # closed form (1 - sqrt(1-p)) (1 - 2 sqrt(theta(1-theta))) / 2
        dm = rho_theta(1.0)
        n1, n2 = example_channels(0.5, 0.5)
        brute = math.fsum(brute_skew(dm, k) for k in n1.operators)
        assert skew_info_channel(dm, n1) == pytest.approx(brute, abs=1e-14)
        assert skew_info_channel(dm, n1) == pytest.approx(0.1464466094067262, abs=1e-12)
        assert skew_info_channel(dm, n2) == pytest.approx(0.1464466094067262, abs=1e-12)

    def test_invariant_under_kraus_mixing(self):
        dm = random_density(4, 4, seed=81)
        ch = random_channel(4, 3, Convention.COLUMN_SUM, seed=82)
        base = skew_info_channel(dm, ch)
        for seed in range(5):
            mixed = mix_kraus(ch, random_unitary(3, seed=90 + seed))
            assert skew_info_channel(dm, mixed) == pytest.approx(base, abs=1e-10)

    def test_dimension_mismatch(self):
        dm = random_density(3, 3, seed=1)
        ch = random_channel(4, 2, Convention.COLUMN_SUM, seed=2)
        with pytest.raises(DimensionMismatchError):
            skew_info_channel(dm, ch)


class TestSkewInfoObservable:
    def test_maximally_mixed_is_zero(self):
        dm = validate_density(np.eye(3) / 3)
        a = np.diag([1.0, 2.0, 3.0])
        assert skew_info_observable(dm, a) == 0.0

    def test_identity_observable_is_zero(self):
        dm = random_density(3, 3, seed=14)
        assert skew_info_observable(dm, np.eye(3)) <= 1e-15

    def test_pure_state_with_exchange(self):
        dm = validate_density(np.diag([1.0, 0.0]))
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        assert skew_info_observable(dm, x) == pytest.approx(1.0, abs=1e-12)

    def test_agrees_with_operator_form_for_hermitian(self):
        rng = np.random.default_rng(15)
        dm = random_density(4, 4, seed=16)
        for _ in range(5):
            g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            a = (g + g.conj().T) / 2
            assert skew_info_observable(dm, a) == pytest.approx(
                skew_info_operator(dm, a), abs=1e-12)

    def test_rejects_non_hermitian(self):
        dm = random_density(2, 2, seed=17)
        with pytest.raises(NotHermitianError):
            skew_info_observable(dm, np.array([[0, 1], [0, 0]]))


class TestObservableCommutatorBound:
    def test_same_observable_gives_zero(self):
        dm = random_density(3, 3, seed=18)
        a = np.diag([1.0, 2.0, 3.0])
        assert observable_commutator_bound(dm, a, a) == 0.0

    def test_maximally_mixed_gives_zero(self):
        dm = validate_density(np.eye(2) / 2)
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        y = np.array([[0, -1j], [1j, 0]])
        assert observable_commutator_bound(dm, x, y) <= 1e-15

    def test_pure_state_attains_equality(self):
        dm = validate_density(np.diag([1.0, 0.0]))
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        y = np.array([[0, -1j], [1j, 0]])
        bound = observable_commutator_bound(dm, x, y)
        assert bound == pytest.approx(1.0, abs=1e-12)
        product = skew_info_observable(dm, x) * skew_info_observable(dm, y)
        assert product >= bound - 1e-10

    def test_holds_on_random_pure_states(self):
        rng = np.random.default_rng(19)
        for _ in range(25):
            d = int(rng.integers(2, 5))
            psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            psi /= np.linalg.norm(psi)
            dm = validate_density(np.outer(psi, psi.conj()))
            g1 = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            g2 = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            a, b = (g1 + g1.conj().T) / 2, (g2 + g2.conj().T) / 2
            product = skew_info_observable(dm, a) * skew_info_observable(dm, b)
            assert product >= observable_commutator_bound(dm, a, b) - 1e-10

    def test_can_exceed_skew_product_for_mixed_states(self):
        # the check value is not a universal lower bound off pure states:
        # diag(0.9, 0.1) with the two standard anticommuting observables
        dm = validate_density(np.diag([0.9, 0.1]))
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        y = np.array([[0, -1j], [1j, 0]])
        product = skew_info_observable(dm, x) * skew_info_observable(dm, y)
        bound = observable_commutator_bound(dm, x, y)
        assert product == pytest.approx(0.16, abs=1e-12)
        assert bound == pytest.approx(0.64, abs=1e-12)
        assert bound > product
