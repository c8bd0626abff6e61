import math

import numpy as np
import pytest

from lmgqb.perturbation import weak_maxima
from lmgqb.scaling import (
    SweepSpec,
    detect_crossover,
    fit_power_law,
    sweep,
    sweep_point,
    universality_point,
    universality_scan,
)


class TestSweep:
    def test_rabi_point(self):
        oc = sweep_point(2, 1.0, samples=8000)
        assert oc.ok
        assert oc.summary.e_max == pytest.approx(0.4, abs=1e-5)
        assert oc.summary.t_e == pytest.approx(math.pi / (2 * math.sqrt(1.25)), abs=1e-5)

    def test_weak_sweep_against_perturbative_oracle(self):
        # at g = 1e-4 the O(g*N) correction sits well below the 1% band
        spec = SweepSpec(g_values=(1e-4,), n_values=tuple(range(10, 31, 5)))
        for oc in sweep(spec):
            assert oc.ok
            pred = weak_maxima(oc.g, 1.0, oc.n_tls)
            assert oc.summary.e_max == pytest.approx(pred.e_max, rel=0.01)
            assert oc.summary.t_e == pytest.approx(pred.t_e, rel=0.01)

    def test_strong_coupling_beating_structure(self):
        # N=30 at g=omega_z: the power curve develops many local maxima,
        # unlike the single smooth peak of the weak regime
        from lmgqb.dynamics import ProtocolConfig, run_protocol
        from lmgqb.metrics import averaged_power, stored_energy
        from lmgqb.spin import build_sector

        grid = np.linspace(0.0, 10.0, 5000)

        def n_power_peaks(n, g):
            cfg = ProtocolConfig(omega_z=1.0, g=g, t_grid=grid)
            traj = run_protocol(cfg, build_sector(n))
            p = averaged_power(stored_energy(traj.sz, 1.0, n), grid)
            return len(np.flatnonzero((p[1:-1] > p[:-2]) & (p[1:-1] > p[2:])))

        assert n_power_peaks(30, 1.0) > 5
        assert n_power_peaks(30, 1e-3) <= 4  # smooth single-frequency regime

    def test_failure_carried_not_raised(self):
        # horizon far too short to contain a maximum: monotone rise only
        oc = sweep_point(8, 1e-3, horizon_periods=0.01, samples=50)
        assert not oc.ok
        assert "no-maximum" in oc.error

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SweepSpec(g_values=(), n_values=(2,))
        with pytest.raises(ValueError):
            SweepSpec(g_values=(0.1,), n_values=(5, 2))


class TestFitPowerLaw:
    def test_exact_pure_power(self):
        n = np.arange(4, 40, 3, dtype=float)
        fit = fit_power_law(n, 3.0 * n**2)
        assert fit.a == pytest.approx(3.0, abs=1e-9)
        assert fit.b == pytest.approx(2.0, abs=1e-9)
        assert fit.residual < 1e-12
        assert fit.model_kind == "pure power"

    def test_exact_offset_recovery(self):
        n = np.arange(5, 41, 5, dtype=float)
        fit = fit_power_law(n, 2.0 * n**-0.5 + 0.7, with_offset=True)
        assert fit.a == pytest.approx(2.0, abs=1e-6)
        assert fit.b == pytest.approx(-0.5, abs=1e-6)
        assert fit.c == pytest.approx(0.7, abs=1e-6)

    def test_weak_coupling_formula_exponent(self):
        # (N^2 - N) is not a pure power law; over N in [10, 50] it fits
        # inside the 2 +/- 0.1 band
        n = np.arange(10, 51, 5, dtype=float)
        y = 1e-6 / 4 * (n**2 - n)
        fit = fit_power_law(n, y)
        assert abs(fit.b - 2.0) < 0.1

    def test_rejections(self):
        with pytest.raises(ValueError):
            fit_power_law([1, 2], [1.0, 2.0])
        with pytest.raises(ValueError):
            fit_power_law([3, 3, 3], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            fit_power_law([1, 2, 3], [1.0, -2.0, 3.0])
        with pytest.raises(ValueError):
            fit_power_law([1, 2, 3], [1.0, 2.0, 3.0], with_offset=True)


class TestUniversality:
    def test_rows_sorted_and_complete(self):
        rows = universality_scan([0.05, 0.1], [4, 8, 12])
        assert len(rows) == 6
        gs = [r.big_g for r in rows]
        assert gs == sorted(gs)
        assert all(r.ok for r in rows)

    def test_weak_rows_nearly_empty_battery(self):
        rows = universality_scan([0.01], [5, 10, 20])
        for r in rows:  # G <= 0.2: far below the crossover
            assert r.e_max_norm < 0.01

    def test_reachable_bound_exceeds_first_maximum(self):
        row = universality_point(30, 1.0)
        assert row.e_reach_norm >= row.e_max_norm - 1e-12
        assert row.e_reach_norm > 0.6  # beats push later peaks higher at strong coupling

    def test_matched_g_collapse_above_crossover(self):
        a = universality_point(30, 0.1)
        b = universality_point(60, 0.05)
        assert a.big_g == pytest.approx(b.big_g)
        spread = abs(a.e_max_norm - b.e_max_norm) / (0.5 * (a.e_max_norm + b.e_max_norm))
        assert spread < 0.05

    def test_crossover_detection_synthetic(self):
        g = np.linspace(0.2, 4.0, 39)
        e = np.where(g < 1.0, 0.02 * g**2, 0.02 + 0.3 * (g - 1.0))
        assert 0.8 < detect_crossover(g, e) < 1.3

    def test_crossover_needs_three_points(self):
        with pytest.raises(ValueError):
            detect_crossover(np.array([1.0, 2.0]), np.array([0.1, 0.2]))
