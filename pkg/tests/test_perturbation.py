import math

import numpy as np
import pytest

from lmgqb.dynamics import ProtocolConfig, run_protocol
from lmgqb.metrics import stored_energy
from lmgqb.perturbation import e_weak, p_weak, power_peak_root, weak_maxima
from lmgqb.spin import build_sector


class TestEWeak:
    def test_zero_at_origin(self):
        assert e_weak(0.0, 1e-3, 1.0, 30) == 0.0

    def test_single_tls_never_charges(self):
        t = np.linspace(0, 10, 50)
        assert np.all(e_weak(t, 1.0, 1.0, 1) == 0.0)

    def test_peak_value(self):
        g, n = 1e-3, 30
        val = e_weak(math.pi / 2, g, 1.0, n)
        assert val == pytest.approx(g**2 / 4 * (n**2 - n), rel=1e-12)
        assert val == pytest.approx(2.175e-4, rel=1e-12)

    def test_periodic_zeros(self):
        for k in range(4):
            assert e_weak(k * math.pi, 2e-3, 1.0, 12) == pytest.approx(0.0, abs=1e-18)

    def test_nonnegative(self):
        t = np.linspace(0, 20, 500)
        assert np.all(e_weak(t, 1e-2, 1.0, 9) >= 0.0)


class TestPWeak:
    def test_vanishes_at_origin(self):
        assert p_weak(0.0, 1e-3, 1.0, 30) == 0.0

    def test_single_tls(self):
        assert p_weak(1.3, 1.0, 1.0, 1) == 0.0

    def test_ratio_definition(self):
        t = np.linspace(0.1, 5, 40)
        assert np.allclose(p_weak(t, 1e-3, 1.0, 8), e_weak(t, 1e-3, 1.0, 8) / t)


class TestPeakRoot:
    def test_against_dense_grid_oracle(self):
        # independent location of the maximum of (1 - cos 2x)/x
        x = np.linspace(1.0, 1.5, 2_000_001)
        f = (1 - np.cos(2 * x)) / x
        coarse = x[np.argmax(f)]
        root = power_peak_root()
        assert root == pytest.approx(coarse, abs=1e-6)
        assert math.tan(root) == pytest.approx(2 * root, abs=1e-9)

    def test_bracket(self):
        root = power_peak_root()
        assert math.pi / 4 < root < 1.5 * math.pi / 2
        assert root == pytest.approx(1.16556, abs=1e-4)


class TestWeakMaxima:
    def test_energy_peak_analytic(self):
        pred = weak_maxima(1e-3, 1.0, 30)
        assert pred.t_e == math.pi / 2
        assert pred.e_max == pytest.approx(2.175e-4, rel=1e-12)

    def test_power_peak_numerical(self):
        g, n = 1e-3, 30
        pred = weak_maxima(g, 1.0, n)
        # independent maximization of the power curve on a dense grid
        t = np.linspace(0.5, 2.0, 1_000_001)
        p = e_weak(t, g, 1.0, n) / t
        k = np.argmax(p)
        assert pred.t_p == pytest.approx(t[k], abs=1e-5)
        assert pred.p_max == pytest.approx(p[k], rel=1e-9)
        assert pred.p_max / (g**2 * (n**2 - n)) == pytest.approx(0.18113, abs=1e-4)

    def test_callable_handles(self):
        pred = weak_maxima(2e-3, 1.0, 10)
        ts = np.linspace(0, 3, 7)
        assert np.allclose(pred.e_of_t(ts), e_weak(ts, 2e-3, 1.0, 10))
        assert np.allclose(pred.p_of_t(ts), p_weak(ts, 2e-3, 1.0, 10))

    def test_scaling_exponent_approaches_two(self):
        n = np.array([200.0, 400.0, 800.0])
        e = np.array([weak_maxima(1e-3, 1.0, int(k)).e_max for k in n])
        b = np.polyfit(np.log(n), np.log(e), 1)[0]
        assert b == pytest.approx(2.0, abs=0.01)


class TestOracleAgreement:
    """Exact diagonalization against the closed form.

    The closed form is second order: the exact curve differs from it by a
    relative O(g*N) correction, so the agreement is checked at couplings
    where that correction is far below the asserted tolerance, and the
    correction itself is verified to shrink linearly with g.
    """

    def exact_emax(self, n, g, samples=6001):
        cfg = ProtocolConfig(omega_z=1.0, g=g, t_grid=np.linspace(0, math.pi, samples))
        traj = run_protocol(cfg, build_sector(n))
        return stored_energy(traj.sz, 1.0, n).max()

    @pytest.mark.parametrize("n", [5, 10, 20, 30])
    def test_small_coupling_within_one_percent(self, n):
        g = 1e-4
        assert self.exact_emax(n, g) == pytest.approx(
            weak_maxima(g, 1.0, n).e_max, rel=0.01
        )

    def test_correction_is_first_order_in_g(self):
        n = 30
        devs = []
        for g in (1e-3, 5e-4, 2.5e-4):
            formula = weak_maxima(g, 1.0, n).e_max
            devs.append(self.exact_emax(n, g) / formula - 1.0)
        assert devs[0] / devs[1] == pytest.approx(2.0, abs=0.1)
        assert devs[1] / devs[2] == pytest.approx(2.0, abs=0.1)

    def test_curve_agreement_at_small_coupling(self):
        n, g = 30, 1e-4
        t = np.linspace(0, math.pi, 3001)
        cfg = ProtocolConfig(omega_z=1.0, g=g, t_grid=t)
        traj = run_protocol(cfg, build_sector(n))
        exact = stored_energy(traj.sz, 1.0, n)
        approx = e_weak(t, g, 1.0, n)
        peak = approx.max()
        assert np.abs(exact - approx).max() / peak < 0.01
