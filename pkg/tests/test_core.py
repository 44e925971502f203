import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from framefree.core import (DensityOperator, GroupElement, RandomSource, StateVector,
                            collective_rotation, fidelity, haar_random_su2,
                            haar_random_su2_batch, partial_trace, random_density,
                            random_state_vector, tensor, trace_distance)

SINGLET = StateVector.normalized([0.0, 1.0, -1.0, 0.0])

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])


class TestRandomSource:
    def test_same_seed_same_stream(self):
        a = RandomSource(99).normal(16)
        b = RandomSource(99).normal(16)
        assert np.array_equal(a, b)

    def test_split_children_are_independent_and_reproducible(self):
        parent = RandomSource(5)
        first, second = parent.split(2)
        again_first, again_second = RandomSource(5).split(2)
        assert np.array_equal(first.normal(8), again_first.normal(8))
        assert np.array_equal(second.normal(8), again_second.normal(8))
        assert not np.array_equal(RandomSource(5, (0,)).normal(8),
                                  RandomSource(5, (1,)).normal(8))

    def test_sample_index_is_deterministic(self):
        p = [0.25, 0.5, 0.25]
        draws = [RandomSource(3).sample_index(p) for _ in range(3)]
        assert draws[0] == draws[1] == draws[2]

    def test_sample_index_point_mass(self, rng):
        assert all(rng.sample_index([0.0, 1.0, 0.0]) == 1 for _ in range(50))


class TestHaarSampling:
    def test_group_membership(self, rng):
        for _ in range(50):
            g = haar_random_su2(rng)  # GroupElement validates itself
            assert np.abs(g.matrix @ g.matrix.conj().T - np.eye(2)).max() < 1e-10
            assert abs(np.linalg.det(g.matrix) - 1.0) < 1e-10

    def test_mean_entry_vanishes(self, rng):
        batch = haar_random_su2_batch(rng, 100_000)
        assert np.abs(batch.mean(axis=0)).max() < 0.02

    def test_mean_upper_left_probability_is_half(self, rng):
        # quadrature oracle: in ZYZ Euler angles |R00|^2 = cos^2(beta/2) and the
        # Haar weight in beta is sin(beta)/2 on [0, pi]
        beta = np.linspace(0.0, np.pi, 20_001)
        oracle = np.trapezoid(np.cos(beta / 2) ** 2 * np.sin(beta) / 2, beta)
        assert abs(oracle - 0.5) < 1e-6
        batch = haar_random_su2_batch(rng, 100_000)
        assert abs(np.mean(np.abs(batch[:, 0, 0]) ** 2) - oracle) < 0.01


class TestGroupElement:
    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            GroupElement(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_rejects_unit_determinant_violation(self):
        with pytest.raises(ValueError):
            GroupElement(SIGMA_X)  # unitary but det = -1

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            GroupElement(np.eye(3))


class TestCollectiveRotation:
    def test_identity(self):
        assert np.array_equal(collective_rotation(GroupElement.identity(), 3), np.eye(8))

    def test_single_factor_is_the_element(self, rng):
        g = haar_random_su2(rng)
        assert np.array_equal(collective_rotation(g, 1), g.matrix)

    def test_singlet_invariant_up_to_phase(self, rng):
        for _ in range(100):
            u = collective_rotation(haar_random_su2(rng), 2)
            assert abs(abs(SINGLET.evolve(u).overlap(SINGLET)) - 1.0) < 1e-10

    def test_unitary_for_all_sizes(self, rng):
        for n in range(1, 11):
            u = collective_rotation(haar_random_su2(rng), n)
            assert np.abs(u @ u.conj().T - np.eye(2 ** n)).max() < 1e-10

    def test_rejects_zero_qubits(self, rng):
        with pytest.raises(ValueError):
            collective_rotation(haar_random_su2(rng), 0)


class TestTensor:
    def test_scalar_identity(self):
        m = np.arange(4.0).reshape(2, 2)
        assert np.array_equal(tensor(np.eye(1), m), m)

    def test_identity_product(self):
        assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_double_bit_flip(self):
        state = StateVector.from_bits("00")
        flipped = state.evolve(tensor(SIGMA_X, SIGMA_X))
        assert np.array_equal(flipped.amplitudes, StateVector.from_bits("11").amplitudes)

    @given(st.data())
    @settings(max_examples=30, deadline=None)
    def test_associativity_exact_on_integer_matrices(self, data):
        def matrix(rows, cols):
            entries = data.draw(st.lists(
                st.complex_numbers(min_magnitude=0, max_magnitude=4,
                                   allow_nan=False, allow_infinity=False).map(
                                       lambda z: complex(round(z.real), round(z.imag))),
                min_size=rows * cols, max_size=rows * cols))
            return np.array(entries).reshape(rows, cols)

        a = matrix(2, 2)
        b = matrix(2, 3)
        c = matrix(3, 1)
        # integer entries make the float products exact, so equality is exact
        assert np.array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))


class TestPartialTrace:
    def test_singlet_reduces_to_maximally_mixed(self):
        rho = SINGLET.to_density()
        for keep in ([0], [1]):
            reduced = partial_trace(rho, keep, [2, 2])
            assert np.abs(reduced.matrix - np.eye(2) / 2).max() < 1e-12

    def test_keep_everything_is_identity_operation(self, rng):
        rho = random_density(rng, 8)
        assert np.abs(partial_trace(rho, [0, 1, 2], [2, 2, 2]).matrix - rho.matrix).max() < 1e-14

    def test_product_state(self):
        rho = StateVector.from_bits("00").to_density()
        reduced = partial_trace(rho, [0], [2, 2])
        assert np.abs(reduced.matrix - np.diag([1.0, 0.0])).max() < 1e-14

    def test_trace_preserved(self, rng):
        for _ in range(20):
            rho = random_density(rng, 8)
            reduced = partial_trace(rho, [1], [2, 2, 2])
            assert abs(np.trace(reduced.matrix) - 1.0) < 1e-12

    def test_rejects_inconsistent_dims(self, rng):
        with pytest.raises(ValueError):
            partial_trace(random_density(rng, 8), [0], [2, 2])


class TestMetrics:
    def test_fidelity_with_self(self, rng):
        rho = random_density(rng, 4)
        assert abs(fidelity(rho, rho) - 1.0) < 1e-9

    def test_fidelity_orthogonal_pure_states(self):
        zero = StateVector.basis(2, 0).to_density()
        one = StateVector.basis(2, 1).to_density()
        assert fidelity(zero, one) < 1e-12

    def test_fidelity_pure_vs_maximally_mixed(self):
        zero = StateVector.basis(2, 0).to_density()
        assert abs(fidelity(zero, DensityOperator.maximally_mixed(2)) - 0.5) < 1e-12

    def test_fidelity_with_pure_state_reduces_to_overlap(self, rng):
        for _ in range(20):
            rho = random_density(rng, 4)
            psi = random_state_vector(rng, 4)
            direct = psi.expectation(rho.matrix).real
            assert abs(fidelity(rho, psi.to_density()) - direct) < 1e-10

    def test_fidelity_rejects_dimension_mismatch(self, rng):
        with pytest.raises(ValueError):
            fidelity(random_density(rng, 2), random_density(rng, 4))

    def test_trace_distance_basics(self, rng):
        rho = random_density(rng, 4)
        assert trace_distance(rho, rho) < 1e-12
        zero = StateVector.basis(2, 0).to_density()
        one = StateVector.basis(2, 1).to_density()
        assert abs(trace_distance(zero, one) - 1.0) < 1e-12
        with pytest.raises(ValueError):
            trace_distance(zero, random_density(rng, 4))

    def test_fuchs_van_de_graaff_sandwich(self, rng):
        for _ in range(100):
            rho = random_density(rng, 4)
            sigma = random_density(rng, 4)
            f = fidelity(rho, sigma)
            d = trace_distance(rho, sigma)
            assert 1.0 - np.sqrt(f) <= d + 1e-9
            assert d <= np.sqrt(1.0 - f) + 1e-9

    def test_hermitian_eigensolver_contract(self, rng):
        m = rng.normal((16, 16)) + 1j * rng.normal((16, 16))
        m = m + m.conj().T
        w, v = np.linalg.eigh(m)
        assert np.all(np.isreal(w))
        assert np.abs(m @ v - v * w).max() < 1e-9


class TestWrapperValidation:
    def test_state_vector_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            StateVector(np.array([1.0, 1.0]))

    def test_state_vector_rejects_non_finite(self):
        with pytest.raises(ValueError):
            StateVector(np.array([np.inf, 0.0]))

    def test_normalized_rejects_zero_vector(self):
        with pytest.raises(ValueError):
            StateVector.normalized(np.zeros(4))

    def test_density_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            DensityOperator(np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_density_rejects_wrong_trace(self):
        with pytest.raises(ValueError):
            DensityOperator(np.eye(2))

    def test_density_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError):
            DensityOperator(np.diag([1.5, -0.5]))

    def test_arrays_are_read_only(self, rng):
        rho = random_density(rng, 2)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 0.0

    def test_random_states_are_valid(self, rng):
        assert abs(np.linalg.norm(random_state_vector(rng, 8).amplitudes) - 1.0) < 1e-12
        assert random_density(rng, 8, rank=2).dim == 8
