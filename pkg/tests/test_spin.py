import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmgqb.spin import (
    SpinState,
    build_sector,
    expectation_sy,
    expectation_sz,
    ground_state,
    ladder_elements,
    max_state,
    op_sx,
    op_sx2,
    op_sz,
    parity_split,
)


def random_state(sector, rng, real=False):
    amp = rng.normal(size=sector.dim)
    if not real:
        amp = amp + 1j * rng.normal(size=sector.dim)
    return SpinState(sector, amp / np.linalg.norm(amp))


def dense_sy(sector):
    # independent route: S_y = (S+ - S-)/(2i) from the raw ladder amplitudes
    splus = np.zeros((sector.dim, sector.dim), dtype=complex)
    for i, amp in enumerate(ladder_elements(sector)):
        splus[i + 1, i] = amp
    return (splus - splus.conj().T) / 2j


class TestBuildSector:
    def test_single_tls(self):
        sec = build_sector(1)
        assert sec.dim == 2
        assert np.array_equal(sec.m_values, [-0.5, 0.5])

    def test_two_tls(self):
        sec = build_sector(2)
        assert sec.dim == 3
        assert np.array_equal(sec.m_values, [-1.0, 0.0, 1.0])

    def test_thirty_tls(self):
        assert build_sector(30).dim == 31

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            build_sector(0)

    @given(st.integers(min_value=1, max_value=200))
    @settings(max_examples=40, deadline=None)
    def test_m_ladder_structure(self, n):
        sec = build_sector(n)
        m = sec.m_values
        assert len(m) == n + 1
        assert np.allclose(np.diff(m), 1.0)
        assert m[0] == -m[-1] == -n / 2


class TestOperators:
    def test_sz_diagonal(self):
        assert np.array_equal(op_sz(build_sector(2)), np.diag([-1.0, 0.0, 1.0]))
        assert np.array_equal(op_sz(build_sector(1)), np.diag([-0.5, 0.5]))
        assert op_sz(build_sector(4))[0, 0] == -2.0

    def test_sx_single_tls_is_half_pauli(self):
        assert np.allclose(op_sx(build_sector(1)), 0.5 * np.array([[0, 1], [1, 0]]))

    def test_sx_ladder_element(self):
        sx = op_sx(build_sector(2))
        assert sx[1, 0] == pytest.approx(np.sqrt(2) / 2, abs=1e-15)
        assert sx[2, 0] == 0.0  # S_x only changes m by one

    def test_sx2_single_tls_trivial(self):
        assert np.allclose(op_sx2(build_sector(1)), 0.25 * np.eye(2))

    def test_sx2_even_block_n2(self):
        sx2 = op_sx2(build_sector(2))
        block = sx2[np.ix_([0, 2], [0, 2])]
        assert np.allclose(block, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)
        assert sx2[1, 1] == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 10, 17, 30, 64, 100])
    def test_sx2_equals_square_of_sx(self, n):
        sec = build_sector(n)
        sx = op_sx(sec)
        assert np.abs(op_sx2(sec) - sx @ sx).max() < 1e-12


class TestParity:
    def test_n2_split(self):
        even, odd = parity_split(build_sector(2))
        assert list(even.indices) == [0, 2]  # m = -1, +1
        assert list(odd.indices) == [1]  # m = 0

    def test_n3_split(self):
        even, odd = parity_split(build_sector(3))
        sec = even.parent
        assert np.array_equal(sec.m_values[even.indices], [-1.5, 0.5])
        assert np.array_equal(sec.m_values[odd.indices], [-0.5, 1.5])

    def test_n4_sizes(self):
        even, odd = parity_split(build_sector(4))
        assert (even.dim, odd.dim) == (3, 2)

    @given(st.integers(min_value=1, max_value=120))
    @settings(max_examples=40, deadline=None)
    def test_partition(self, n):
        even, odd = parity_split(build_sector(n))
        merged = sorted(list(even.indices) + list(odd.indices))
        assert merged == list(range(n + 1))
        assert 0 in even.indices  # ground state lives in the first sector


class TestStates:
    def test_ground_and_max(self):
        sec = build_sector(2)
        assert np.array_equal(ground_state(sec).amplitudes, [1, 0, 0])
        assert np.array_equal(max_state(sec).amplitudes, [0, 0, 1])

    def test_ground_battery_energy(self):
        for n in (1, 2, 7, 30):
            g = ground_state(build_sector(n))
            assert expectation_sz(g) * 1.0 == pytest.approx(-n / 2)

    def test_norm_validation(self):
        sec = build_sector(2)
        with pytest.raises(ValueError):
            SpinState(sec, np.array([1.0, 1.0, 0.0]))


class TestExpectationSy:
    def test_extremal_state(self):
        assert expectation_sy(ground_state(build_sector(5))) == 0.0

    def test_circular_single_tls(self):
        # (|up> + i|down>)/sqrt(2) in ascending-m order; the dense-matrix
        # oracle gives +1/2 for S_y = (S+ - S-)/2i with positive ladder elements
        sec = build_sector(1)
        state = SpinState(sec, np.array([1j, 1.0]) / np.sqrt(2))
        sy = dense_sy(sec)
        oracle = np.vdot(state.amplitudes, sy @ state.amplitudes).real
        assert oracle == pytest.approx(0.5, abs=1e-15)
        assert expectation_sy(state) == pytest.approx(oracle, abs=1e-14)
        conj = SpinState(sec, np.array([-1j, 1.0]) / np.sqrt(2))
        assert expectation_sy(conj) == pytest.approx(-0.5, abs=1e-14)

    def test_real_amplitudes_give_zero(self):
        rng = np.random.default_rng(7)
        for n in (1, 2, 5, 9):
            state = random_state(build_sector(n), rng, real=True)
            assert expectation_sy(state) == pytest.approx(0.0, abs=1e-14)

    def test_matches_dense_matrix_on_random_states(self):
        rng = np.random.default_rng(11)
        for n in (1, 3, 8):
            sec = build_sector(n)
            sy = dense_sy(sec)
            for _ in range(5):
                state = random_state(sec, rng)
                oracle = np.vdot(state.amplitudes, sy @ state.amplitudes).real
                assert expectation_sy(state) == pytest.approx(oracle, abs=1e-13)


class TestMomentSumRule:
    @pytest.mark.parametrize("n", range(1, 11))
    def test_total_spin_moments(self, n):
        # <S_x^2> + <S_y^2> + <S_z^2> = s(s+1), with S_y^2 evaluated through
        # the independent dense ladder construction
        rng = np.random.default_rng(100 + n)
        sec = build_sector(n)
        sx2 = op_sx2(sec)
        sy2 = dense_sy(sec) @ dense_sy(sec)
        sz2 = op_sz(sec) @ op_sz(sec)
        s = n / 2
        for _ in range(8):
            psi = random_state(sec, rng).amplitudes
            total = (
                np.vdot(psi, sx2 @ psi) + np.vdot(psi, sy2 @ psi) + np.vdot(psi, sz2 @ psi)
            ).real
            assert total == pytest.approx(s * (s + 1), rel=1e-12)
