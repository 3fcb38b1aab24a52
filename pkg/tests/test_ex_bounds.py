import math

import numpy as np
import pytest
import scipy.integrate
import scipy.optimize

from freqchan.ex_bounds import (MEAN_ABS_XY, ExParams, ExSettings,
                         QuadratureSettings, ex_exponent, f_kappa, g_fn,
                         j_fn, l_fn, s_fn)
from freqchan.rc_bounds import BoundQuery

# High-precision reference values (40-digit arithmetic, rounded).
F_02 = 1.1514524984457282451
F_05 = 1.5396007178390020387
F_08 = 2.6505574510028884945
F_095 = 5.757679193019936042
G_09 = 0.0456120683577734394
L_095 = 0.0114562171237582


def _f_scipy(kappa: float) -> float:
    """Independent route: adaptive quadrature of the same integral."""

    def integrand(x):
        phi = 0.5 * (1.0 + math.erf(kappa * x / math.sqrt(2.0)))
        return math.exp(-0.5 * (1.0 - kappa * kappa) * x * x) * phi

    val, _ = scipy.integrate.quad(integrand, 0.0, np.inf, limit=200)
    return 4.0 / math.sqrt(2.0 * math.pi) * val


class TestFKappa:
    def test_one_at_zero(self):
        assert f_kappa(0.0) == pytest.approx(1.0, abs=1e-12)

    def test_reference_values(self):
        assert f_kappa(0.2) == pytest.approx(F_02, rel=1e-12)
        assert f_kappa(0.5) == pytest.approx(F_05, rel=1e-12)
        assert f_kappa(0.8) == pytest.approx(F_08, rel=1e-12)
        assert f_kappa(0.95) == pytest.approx(F_095, rel=1e-11)

    def test_matches_adaptive_quadrature(self):
        for kappa in (0.1, 0.35, 0.65, 0.9):
            assert f_kappa(kappa) == pytest.approx(_f_scipy(kappa), rel=1e-9)

    def test_increasing_and_convex(self):
        grid = np.linspace(0.0, 0.97, 60)
        vals = np.array([f_kappa(float(k)) for k in grid])
        assert np.all(np.diff(vals) > 0.0)
        assert np.all(np.diff(vals, 2) > -1e-12)

    def test_blows_up_like_inverse_sqrt_gap(self):
        # F(kappa) ~ 2 / sqrt(1 - kappa^2) as kappa -> 1.
        kappa = 0.999
        asymptote = 2.0 / math.sqrt(1.0 - kappa * kappa)
        assert f_kappa(kappa) == pytest.approx(asymptote, rel=0.05)
        assert f_kappa(0.9999) > f_kappa(0.999) > f_kappa(0.99)

    def test_domain(self):
        with pytest.raises(ValueError):
            f_kappa(1.0)
        with pytest.raises(ValueError):
            f_kappa(-0.1)

    def test_quadrature_settings_validation(self):
        with pytest.raises(ValueError):
            QuadratureSettings(truncation=4.0)
        with pytest.raises(ValueError):
            QuadratureSettings(panels=0)


class TestGFn:
    def test_zero_at_and_below_the_mean(self):
        for x in (0.0, 0.2, 0.5, MEAN_ABS_XY - 1e-3, MEAN_ABS_XY):
            assert g_fn(x) <= 1e-9

    def test_positive_above_the_mean(self):
        assert g_fn(MEAN_ABS_XY + 0.05) > 1e-4

    def test_reference_value(self):
        assert g_fn(0.9) == pytest.approx(G_09, abs=1e-8)

    def test_matches_independent_optimization(self):
        # Legendre transform computed with scipy's quadrature and
        # bounded minimizer instead of the module's machinery.
        for x in (0.7, 0.8, 0.9, 0.95):
            res = scipy.optimize.minimize_scalar(
                lambda k: -(k * x - math.log(_f_scipy(k))),
                bounds=(1e-9, 1.0 - 1e-9), method="bounded",
                options={"xatol": 1e-12})
            assert g_fn(x) == pytest.approx(-res.fun, abs=1e-7)

    def test_nondecreasing(self):
        grid = np.linspace(0.0, 0.99, 80)
        vals = [g_fn(float(x)) for x in grid]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            g_fn(1.0)
        with pytest.raises(ValueError):
            g_fn(-0.01)


class TestJFn:
    def test_zero_at_one(self):
        assert j_fn(1.0) == 0.0

    def test_closed_form(self):
        assert j_fn(0.5) == pytest.approx(
            0.5 * (0.5 - math.log(0.5) - 1.0), rel=1e-15)

    def test_decreasing_on_unit_interval(self):
        vals = [j_fn(s) for s in (0.1, 0.3, 0.6, 0.9, 1.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            j_fn(0.0)
        with pytest.raises(ValueError):
            j_fn(1.5)


class TestLFn:
    def test_zero_at_and_below_the_mean(self):
        for lam in (0.1, 0.5, MEAN_ABS_XY - 1e-3, MEAN_ABS_XY):
            assert l_fn(lam) <= 1e-9

    def test_reference_value(self):
        assert l_fn(0.95) == pytest.approx(L_095, abs=1e-7)

    def test_min_max_structure(self):
        # At the reported value both branches are attainable: some sigma
        # must make min(G(lam sigma), J(sigma)) reach L within tolerance.
        lam = 0.95
        val = l_fn(lam)
        sigmas = np.linspace(0.5, 1.0 - 1e-9, 20001)
        inner = np.array([min(g_fn(lam * s), j_fn(float(s))) for s in sigmas])
        assert val == pytest.approx(float(inner.max()), abs=1e-6)
        assert val >= inner.max() - 1e-8

    def test_nondecreasing(self):
        vals = [l_fn(lam) for lam in (0.7, 0.8, 0.9, 0.95, 0.98)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            l_fn(0.0)
        with pytest.raises(ValueError):
            l_fn(1.0)


class TestSFn:
    def test_decreasing_in_rho(self):
        vals = [s_fn(400.0, rho) for rho in (2.0, 10.0, 100.0, 1000.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_increasing_in_r(self):
        vals = [s_fn(r, 100.0) for r in (10.0, 100.0, 400.0)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_crossing_structure(self):
        # The supremum is the crossing height of a decreasing and a
        # nondecreasing branch; verify against a dense lambda grid.
        r, rho = 400.0, 1000.0
        val = s_fn(r, rho)
        lams = np.linspace(MEAN_ABS_XY + 1e-6, 1.0 - 1e-9, 20001)
        inner = np.array([
            min((r / rho) * math.log(1.0 / lam), l_fn(float(lam)))
            for lam in lams
        ])
        assert val == pytest.approx(float(inner.max()), abs=1e-6)
        assert val >= inner.max() - 1e-8

    def test_domain(self):
        with pytest.raises(ValueError):
            s_fn(0.0, 10.0)
        with pytest.raises(ValueError):
            s_fn(400.0, 1.0)


class TestExExponent:
    def test_zero_rate_is_cap_dominated(self):
        pt = ex_exponent(BoundQuery(R=0.0, r=400.0))
        assert pt.rho_capped
        assert pt.E == pytest.approx(1000.0 * s_fn(400.0, 1000.0), rel=1e-6)

    def test_interior_argmax_not_capped(self):
        pt = ex_exponent(BoundQuery(R=0.014, r=400.0))
        assert not pt.rho_capped
        assert 1.0 < pt.argmax.rho < 1000.0

    def test_decreasing_in_rate(self):
        es = [ex_exponent(BoundQuery(R=R, r=400.0)).E
              for R in (0.0, 0.005, 0.01, 0.012, 0.014)]
        assert all(a > b for a, b in zip(es, es[1:]))

    def test_witness_reproduces_value(self):
        pt = ex_exponent(BoundQuery(R=0.012, r=400.0))
        s_at = s_fn(400.0, pt.argmax.rho)
        assert pt.E == pytest.approx(pt.argmax.rho * (s_at - 0.012), rel=1e-6)

    def test_cap_controls_low_rate_value(self):
        small = ExSettings(rho_max=100.0)
        pt_small = ex_exponent(BoundQuery(R=0.0, r=400.0), small)
        pt_big = ex_exponent(BoundQuery(R=0.0, r=400.0))
        assert pt_small.rho_capped and pt_big.rho_capped
        assert pt_small.E < pt_big.E

    def test_zero_beyond_crossover(self):
        pt = ex_exponent(BoundQuery(R=0.05, r=400.0))
        assert pt.E == 0.0

    def test_params_validation(self):
        with pytest.raises(ValueError):
            ExParams(kappa=0.0, sigma=0.5, lam=0.5, rho=2.0)
        with pytest.raises(ValueError):
            ExParams(kappa=0.5, sigma=0.5, lam=0.5, rho=1.0)
        with pytest.raises(ValueError):
            ExSettings(rho_max=1.0)
