import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from framefree.core import collective_rotation, haar_random_su2
from framefree.irreps import (CouplingPath, HalfInteger, block_projector,
                              clebsch_gordan, decompose, enumerate_paths, half,
                              multiplicity, total_irrep_count)

SQRT2 = np.sqrt(2.0)


# ---------------------------------------------------------------------------
# independent oracle: build coupled bases with ladder operators only
# ---------------------------------------------------------------------------

def _jz(tj: int) -> np.ndarray:
    return np.diag([m / 2.0 for m in range(tj, -tj - 1, -2)])


def _lowering(tj: int) -> np.ndarray:
    """J- in the |j, m> basis with columns ordered m = j .. -j."""
    j = tj / 2.0
    dim = tj + 1
    op = np.zeros((dim, dim))
    for row, tm in enumerate(range(tj, -tj - 1, -2)):
        m = tm / 2.0
        if row + 1 < dim:
            op[row + 1, row] = np.sqrt(j * (j + 1) - m * (m - 1))
    return op


def ladder_coupled_states(tj1: int, tj2: int) -> dict[tuple[int, int], np.ndarray]:
    """Map (tj, tm) -> coupled vector in the product basis |m1> x |m2>.

    Uses only highest-weight states, lowering operators, and the
    Condon-Shortley sign rule (the |j1 j1>|j2 j-j1> component of each new
    highest-weight state is positive).  Independent of the Racah sum.
    """
    d1, d2 = tj1 + 1, tj2 + 1
    lower = np.kron(_lowering(tj1), np.eye(d2)) + np.kron(np.eye(d1), _lowering(tj2))
    jz = np.kron(_jz(tj1), np.eye(d2)) + np.kron(np.eye(d1), _jz(tj2))
    states: dict[tuple[int, int], np.ndarray] = {}
    for tj in range(tj1 + tj2, abs(tj1 - tj2) - 2, -2):
        # the m = j subspace, minus the already-built states of larger j
        mask = np.abs(np.diag(jz) - tj / 2.0) < 1e-12
        basis = np.eye(d1 * d2)[:, mask]
        for (otj, otm), vec in states.items():
            if otm == tj:
                basis = basis - np.outer(vec, vec.conj() @ basis)
        q, _ = np.linalg.qr(basis)
        top = q[:, np.abs(np.linalg.norm(q, axis=0) - 1.0) < 1e-9][:, :1].ravel()
        # Condon-Shortley: <j1 j1; j2 (j - j1) | j j> > 0
        anchor = ((tj1 - tj1) // 2) * d2 + (tj2 - (tj - tj1)) // 2
        if top[anchor].real < 0:
            top = -top
        states[(tj, tj)] = top
        vec = top
        for tm in range(tj - 2, -tj - 2, -2):
            vec = lower @ vec
            vec = vec / np.linalg.norm(vec)
            states[(tj, tm)] = vec
    return states


class TestClebschGordanOracle:
    @pytest.mark.parametrize("tj1,tj2", [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (4, 1), (3, 2)])
    def test_matches_ladder_construction(self, tj1, tj2):
        states = ladder_coupled_states(tj1, tj2)
        d2 = tj2 + 1
        for (tj, tm), vec in states.items():
            for row, amp in enumerate(vec):
                tm1 = tj1 - 2 * (row // d2)
                tm2 = tj2 - 2 * (row % d2)
                coeff = clebsch_gordan(HalfInteger(tj1), HalfInteger(tm1),
                                       HalfInteger(tj2), HalfInteger(tm2),
                                       HalfInteger(tj), HalfInteger(tm))
                assert abs(coeff - amp) < 1e-10, (tj1, tj2, tj, tm, tm1, tm2)


class TestClebschGordan:
    def test_stretched_state(self):
        assert clebsch_gordan(0.5, 0.5, 0.5, 0.5, 1, 1) == 1.0

    def test_singlet_components(self):
        assert abs(clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0, 0) - 1 / SQRT2) < 1e-15
        assert abs(clebsch_gordan(0.5, -0.5, 0.5, 0.5, 0, 0) + 1 / SQRT2) < 1e-15

    def test_spin_one_pair_table_values(self):
        assert abs(clebsch_gordan(1, 0, 1, 0, 2, 0) - np.sqrt(2.0 / 3.0)) < 1e-15
        assert abs(clebsch_gordan(1, 1, 1, -1, 0, 0) - 1 / np.sqrt(3.0)) < 1e-15
        assert clebsch_gordan(1, 0, 1, 0, 1, 0) == 0.0
        assert abs(clebsch_gordan(1, 1, 0.5, -0.5, 0.5, 0.5) - np.sqrt(2.0 / 3.0)) < 1e-15

    def test_selection_rule(self):
        assert clebsch_gordan(1, 1, 1, 1, 1, 1) == 0.0
        assert clebsch_gordan(1, 0, 0.5, 0.5, 1.5, 1.5) == 0.0

    def test_rejects_m_out_of_range(self):
        with pytest.raises(ValueError):
            clebsch_gordan(0.5, 1.5, 0.5, -0.5, 1, 1)

    def test_rejects_triangle_violation(self):
        with pytest.raises(ValueError):
            clebsch_gordan(0.5, 0.5, 0.5, 0.5, 2, 1)

    def test_rejects_parity_mismatch(self):
        with pytest.raises(ValueError):
            clebsch_gordan(0.5, 0.5, 0.5, 0.5, 0.5, 0.5)

    @given(st.integers(1, 3), st.integers(1, 3), st.data())
    @settings(max_examples=40, deadline=None)
    def test_rows_are_orthonormal(self, tj1, tj2, data):
        # fixed total m: sum over (m1, m2) of products for two target j is
        # delta_{j j'}
        tm = data.draw(st.integers(-(tj1 + tj2) // 2, (tj1 + tj2) // 2).map(lambda k: 2 * k + (tj1 + tj2) % 2))
        valid_j = [tj for tj in range(abs(tj1 - tj2), tj1 + tj2 + 2, 2) if abs(tm) <= tj]
        if len(valid_j) < 2:
            return
        ja, jb = valid_j[0], valid_j[-1]
        for target in (ja, jb):
            total = 0.0
            for tm1 in range(-tj1, tj1 + 2, 2):
                tm2 = tm - tm1
                if abs(tm2) > tj2:
                    continue
                ca = clebsch_gordan(HalfInteger(tj1), HalfInteger(tm1),
                                    HalfInteger(tj2), HalfInteger(tm2),
                                    HalfInteger(ja), HalfInteger(tm))
                cb = clebsch_gordan(HalfInteger(tj1), HalfInteger(tm1),
                                    HalfInteger(tj2), HalfInteger(tm2),
                                    HalfInteger(target), HalfInteger(tm))
                total += ca * cb
            assert abs(total - (1.0 if target == ja else 0.0)) < 1e-10


class TestHalfInteger:
    def test_coercion(self):
        assert half(1.5).twice == 3
        assert half(2).twice == 4
        assert half(Fraction(1, 2)).twice == 1
        assert half(half(0.5)) == HalfInteger(1)

    def test_rejects_non_half_integers(self):
        with pytest.raises(ValueError):
            half(0.3)

    def test_arithmetic_and_order(self):
        assert half(0.5) + half(1) == half(1.5)
        assert half(2) - half(0.5) == half(1.5)
        assert -half(0.5) == HalfInteger(-1)
        assert half(0.5) < half(1)

    def test_str(self):
        assert str(half(1.5)) == "3/2"
        assert str(half(2)) == "2"


class TestCouplingPath:
    def test_validation(self):
        CouplingPath((half(0.5), half(1), half(0.5)))
        with pytest.raises(ValueError):
            CouplingPath((half(1),))  # must start at 1/2
        with pytest.raises(ValueError):
            CouplingPath((half(0.5), half(1.5)))  # step of 1

    def test_steps(self):
        path = CouplingPath((half(0.5), half(1), half(0.5), half(0)))
        assert path.steps == (1, -1, -1)
        assert path.final == half(0)


class TestMultiplicity:
    def test_known_values(self):
        assert multiplicity(4, 0) == 2
        assert multiplicity(4, 2) == 1
        assert multiplicity(6, 1) == 9

    def test_rejects_parity_mismatch(self):
        with pytest.raises(ValueError):
            multiplicity(4, 0.5)

    def test_rejects_j_too_large(self):
        with pytest.raises(ValueError):
            multiplicity(4, 3)

    @pytest.mark.parametrize("n", range(1, 11))
    def test_matches_path_count(self, n):
        for tj in range(n % 2, n + 1, 2):
            assert multiplicity(n, HalfInteger(tj)) == len(enumerate_paths(n, HalfInteger(tj)))

    @pytest.mark.parametrize("n", range(1, 13))
    def test_dimension_sum_rule(self, n):
        total = sum((tj + 1) * multiplicity(n, HalfInteger(tj))
                    for tj in range(n % 2, n + 1, 2))
        assert total == 2 ** n


class TestTotalIrrepCount:
    def test_known_values(self):
        assert total_irrep_count(2) == 2
        assert total_irrep_count(4) == 6
        assert total_irrep_count(6) == 20  # path counts 5 + 9 + 5 + 1

    @pytest.mark.parametrize("n", [2, 4, 6, 8, 10, 12])
    def test_even_closed_form(self, n):
        from math import comb
        assert total_irrep_count(n) == comb(n, n // 2)


class TestEnumeratePaths:
    def test_two_qubits(self):
        paths = enumerate_paths(2, 0)
        assert len(paths) == 1
        assert paths[0].js == (half(0.5), half(0))

    def test_four_qubits_j0(self):
        paths = enumerate_paths(4, 0)
        tuples = [tuple(j.twice for j in p.js) for p in paths]
        assert sorted(tuples) == [(1, 0, 1, 0), (1, 2, 1, 0)]

    def test_all_steps_up(self):
        paths = enumerate_paths(3, 1.5)
        assert len(paths) == 1
        assert paths[0].steps == (1, 1)

    def test_lexicographic_order_up_before_down(self):
        for n, tj in ((4, 0), (5, 1), (6, 2)):
            paths = enumerate_paths(n, HalfInteger(tj))
            keys = [tuple(0 if s > 0 else 1 for s in p.steps) for p in paths]
            assert keys == sorted(keys)


class TestDecompose:
    def test_single_qubit(self):
        d = decompose(1)
        assert len(d.blocks) == 1
        assert d.blocks[0].j == half(0.5)
        assert np.array_equal(d.blocks[0].isometry, np.eye(2))

    def test_two_qubits(self):
        d = decompose(2)
        assert [b.j.twice for b in d.blocks] == [2, 0]
        assert d.blocks[0].dim == 3
        singlet = np.array([0.0, 1.0, -1.0, 0.0]) / SQRT2
        assert np.abs(d.blocks[1].isometry[:, 0] - singlet).max() < 1e-12

    def test_four_qubits(self):
        d = decompose(4)
        assert {j.twice: c for j, c in d.multiplicity_table.items()} == {4: 1, 2: 3, 0: 2}
        assert len(d.blocks) == 6

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            decompose(0)
        with pytest.raises(ValueError):
            decompose(13)

    @pytest.mark.parametrize("n", range(1, 11))
    def test_coupling_matrix_is_unitary(self, n):
        w = decompose(n).coupling_matrix
        assert np.abs(w.conj().T @ w - np.eye(2 ** n)).max() < 1e-10

    def test_blocks_are_rotation_invariant(self, rng):
        for n in (2, 3, 4):
            d = decompose(n)
            for _ in range(20):
                u = collective_rotation(haar_random_su2(rng), n)
                for b in d.blocks:
                    p = b.projector()
                    assert np.abs(p @ u - u @ p).max() < 1e-9

    def test_block_ordering_matches_paths(self):
        d = decompose(4)
        labels = [(b.j.twice, b.r) for b in d.blocks]
        assert labels == [(4, 1), (2, 1), (2, 2), (2, 3), (0, 1), (0, 2)]

    def test_commutant_inside_each_block_is_trivial(self, rng):
        # the only matrices commuting with the sampled block rotations are
        # multiples of the identity
        for n in (2, 3, 4):
            d = decompose(n)
            for b in d.blocks:
                dim = b.dim
                rows = []
                for _ in range(20):
                    u = collective_rotation(haar_random_su2(rng), n)
                    inside = b.isometry.conj().T @ u @ b.isometry
                    rows.append(np.kron(inside, np.eye(dim))
                                - np.kron(np.eye(dim), inside.T))
                stacked = np.vstack(rows)
                nullity = int(np.sum(np.linalg.svd(stacked, compute_uv=False) < 1e-8))
                assert nullity == 1, (n, str(b.j), b.r)

    def test_summary_serialization(self):
        summary = decompose(4).summary()
        assert summary == {
            "n": 4,
            "table": [{"j2": 4, "multiplicity": 1},
                      {"j2": 2, "multiplicity": 3},
                      {"j2": 0, "multiplicity": 2}],
            "total": 6,
        }
        json.dumps(summary)  # JSON-representable


class TestBlockProjector:
    def test_two_qubit_singlet_projector(self):
        d = decompose(2)
        singlet = np.array([0.0, 1.0, -1.0, 0.0]) / SQRT2
        assert np.abs(block_projector(d, 0, 1) - np.outer(singlet, singlet)).max() < 1e-12

    def test_completeness(self):
        for n in (2, 3, 4):
            d = decompose(n)
            total = sum(block_projector(d, b.j, b.r) for b in d.blocks)
            assert np.abs(total - np.eye(2 ** n)).max() < 1e-10

    def test_ranks_for_four_qubits(self):
        d = decompose(4)
        for r in (1, 2, 3):
            eigenvalues = np.linalg.eigvalsh(block_projector(d, 1, r))
            assert int(np.sum(eigenvalues > 0.5)) == 3

    def test_pairwise_orthogonality(self):
        d = decompose(4)
        for i, a in enumerate(d.blocks):
            for b in d.blocks[i + 1:]:
                assert np.abs(a.projector() @ b.projector()).max() < 1e-10

    def test_rejects_unknown_label(self):
        with pytest.raises(KeyError):
            block_projector(decompose(2), 0, 2)
