import numpy as np
import pytest
from scipy.integrate import quad

from asianpricer import BadConfig, FFTConfig, OutOfCoverage, VGInadmissible, VarianceGamma, bs_call
from asianpricer.levy_fft import (
    VarianceGammaPricer,
    check_alpha_admissible,
    curve_to_pricer,
    dampened_transform,
    fft_call_curve,
    fft_call_derivatives,
    invert_dampened_transform,
    strike_convexity,
    vg_characteristic,
    vg_omega,
)

RATE = 0.05
DAY = 1.0 / 365.0
TAU_90D = 90 / 365


@pytest.fixture(scope="module")
def vg():
    return VarianceGamma(sigma=0.3, nu=0.3, theta=-0.1)


@pytest.fixture(scope="module")
def day_curve(vg):
    return fft_call_curve(FFTConfig(), vg, RATE, DAY)


class TestOmega:
    def test_vanishing_parameters_give_zero(self):
        assert vg_omega(1e-9, 0.3, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_reference_arithmetic(self, vg):
        # (1/0.3) * log(1 + 0.03 - 0.0135)
        expected = np.log(1.0165) / 0.3
        assert vg_omega(vg.sigma, vg.nu, vg.theta) == pytest.approx(expected, abs=1e-15)

    def test_martingale_condition(self, vg):
        # omega is defined exactly so that psi(-i) = e^{r tau}
        psi = vg_characteristic(-1j, vg, RATE, TAU_90D)
        assert abs(psi - np.exp(RATE * TAU_90D)) < 1e-12

    def test_inadmissible_raises(self):
        with pytest.raises(VGInadmissible):
            vg_omega(0.3, 0.3, 5.0)


class TestCharacteristic:
    def test_normalization(self, vg):
        assert vg_characteristic(0.0, vg, RATE, TAU_90D) == pytest.approx(1.0 + 0j, abs=1e-15)

    def test_high_precision_reference_values(self, vg):
        # frozen from a 40-digit evaluation of the same closed form
        got = vg_characteristic(1.0, vg, RATE, TAU_90D)
        assert got.real == pytest.approx(0.98868189645655528, abs=1e-12)
        assert got.imag == pytest.approx(0.00144125543878031527, abs=1e-12)
        got = vg_characteristic(2.5 - 0.7j, vg, RATE, TAU_90D)
        assert got.real == pytest.approx(0.94121727209592312, abs=1e-12)
        assert got.imag == pytest.approx(0.04115327150178227, abs=1e-12)


class TestDampenedTransform:
    def test_value_at_zero_matches_specialization(self, vg):
        alpha = 1.5
        expected = (np.exp(-RATE * DAY)
                    * vg_characteristic(-(alpha + 1) * 1j, vg, RATE, DAY)
                    / (alpha**2 + alpha))
        assert dampened_transform(0.0, alpha, vg, RATE, DAY) == pytest.approx(expected, abs=1e-15)

    def test_hermitian_symmetry(self, vg):
        v = np.array([0.5, 3.0, 17.0, 250.0])
        plus = dampened_transform(v, 1.5, vg, RATE, DAY)
        minus = dampened_transform(-v, 1.5, vg, RATE, DAY)
        assert np.max(np.abs(minus - np.conj(plus))) < 1e-12

    def test_tail_decay_at_upper_limit(self, vg):
        # measured |zeta(2000)| = 2.26e-7 for these parameters: the transform
        # decays like v^-2 with a slowly varying characteristic factor
        tail = abs(dampened_transform(2000.0, 1.5, vg, RATE, DAY))
        assert tail < 1e-6

    def test_inadmissible_alpha_raises(self, vg):
        with pytest.raises(VGInadmissible):
            check_alpha_admissible(20.0, vg)


class TestFFTCurve:
    def test_deep_itm_limit(self, vg, day_curve):
        k = np.log(0.2)
        interp = curve_to_pricer(day_curve, RATE, DAY)
        value = interp.call(1.0, 0.2, DAY)
        expected = 1.0 - np.exp(k - RATE * DAY)
        assert value == pytest.approx(expected, rel=1e-4)

    def test_values_clamped_and_monotone(self, day_curve):
        assert np.all(day_curve.cbar_values >= 0.0)
        assert np.all(day_curve.cbar_values <= 1.0)
        assert np.all(np.diff(day_curve.cbar_values) <= 1e-12)
        # raw output before clamping is already monotone to well under 1e-7
        assert day_curve.pre_clamp_increase < 1e-7

    def test_matches_direct_quadrature(self, vg, day_curve):
        alpha = 1.5
        pricer = curve_to_pricer(day_curve, RATE, DAY)
        rng = np.random.default_rng(11)
        for strike in rng.uniform(0.2, 1.8, 10):
            k = float(np.log(strike))
            tail = quad(lambda v: (dampened_transform(v, alpha, vg, RATE, DAY)
                                   * np.exp(-1j * v * k)).real,
                        0.0, 2000.0, limit=400)[0]
            reference = np.exp(-alpha * k) / np.pi * tail
            assert pricer.call(1.0, strike, DAY) == pytest.approx(reference, abs=1e-3)

    def test_bs_limit(self):
        nearly_bs = VarianceGamma(sigma=0.2, nu=1e-6, theta=0.0)
        curve = fft_call_curve(FFTConfig(), nearly_bs, RATE, TAU_90D)
        pricer = curve_to_pricer(curve, RATE, TAU_90D)
        strikes = np.arange(0.1, 2.0, 0.01)
        fft_vals = pricer.call(1.0, strikes, TAU_90D)
        bs_vals = bs_call(1.0, strikes, RATE, 0.2, TAU_90D)
        assert np.max(np.abs(fft_vals - bs_vals)) < 1e-3

    def test_matches_monte_carlo_european_atm(self, vg):
        from asianpricer import Market, SimConfig, mc_european_price

        curve = fft_call_curve(FFTConfig(), vg, RATE, TAU_90D)
        pricer = curve_to_pricer(curve, RATE, TAU_90D)
        value = pricer.call(1.0, 1.0, TAU_90D)
        mc = mc_european_price(vg, Market(spot=1.0, rate=RATE), TAU_90D, 1.0,
                               SimConfig(n_paths=2_000_000, seed=20240601))
        assert abs(value - mc.estimate) < 3 * mc.std_error


# half-year period: the log-price density is smooth there (the gamma clock's
# shape parameter exceeds one), so spectral and difference derivatives must
# agree; at shorter periods the density has a cusp and the two smooth it
# differently
SMOOTH_TAU = 0.5


@pytest.fixture(scope="module")
def smooth_curve(vg):
    cfg = FFTConfig()
    curve = fft_call_curve(cfg, vg, RATE, SMOOTH_TAU)
    return fft_call_derivatives(curve, cfg, vg, RATE, SMOOTH_TAU)


class TestFFTDerivatives:
    def test_first_derivative_matches_differences(self, smooth_curve):
        k = smooth_curve.k_grid
        sel = (k > -1.0) & (k < 1.0)
        idx = np.where(sel)[0]
        fd = (smooth_curve.cbar_values[idx + 1] - smooth_curve.cbar_values[idx - 1]) / (
            k[idx + 1] - k[idx - 1])
        assert np.max(np.abs(fd - smooth_curve.first_derivs[idx])) < 1e-4

    def test_strike_space_convexity(self, smooth_curve):
        k = smooth_curve.k_grid
        sel = (k > -1.5) & (k < 0.7)
        assert strike_convexity(smooth_curve)[sel].min() >= -1e-6

    def test_fourier_shift_moves_the_curve(self, vg):
        cfg = FFTConfig(n_points=2**12, v_max=2000.0)
        v = cfg.v_step * np.arange(cfg.n_points)
        zeta = dampened_transform(v, cfg.alpha, vg, RATE, TAU_90D)
        raw = invert_dampened_transform(zeta, cfg)
        shift_cells = 16
        k0 = shift_cells * cfg.k_step
        shifted = invert_dampened_transform(zeta * np.exp(-1j * v * k0), cfg)
        expected = np.exp(cfg.alpha * k0) * raw[shift_cells:]
        assert np.allclose(shifted[:-shift_cells], expected, rtol=1e-9, atol=1e-12)


class TestCurvePricer:
    def test_node_values_are_exact(self, day_curve):
        pricer = curve_to_pricer(day_curve, RATE, DAY)
        idx = len(day_curve.k_grid) // 2 + 7
        strike = float(np.exp(day_curve.k_grid[idx]))
        assert pricer.call(1.0, strike, DAY) == pytest.approx(
            day_curve.cbar_values[idx], abs=1e-12)

    def test_homogeneity_in_spot(self, day_curve):
        pricer = curve_to_pricer(day_curve, RATE, DAY)
        one = pricer.call(1.0, 0.97, DAY)
        doubled = pricer.call(2.0, 1.94, DAY)
        assert doubled == pytest.approx(2.0 * one, abs=1e-12)

    def test_parity_residual_small(self, day_curve):
        pricer = curve_to_pricer(day_curve, RATE, DAY)
        strikes = np.arange(0.1, 2.0, 0.01)
        calls = pricer.call(1.0, strikes, DAY)
        puts = pricer.put(1.0, strikes, DAY)
        residual = calls - puts - 1.0 + strikes * np.exp(-RATE * DAY)
        assert np.max(np.abs(residual)) < 1e-6

    def test_out_of_coverage(self, day_curve):
        pricer = curve_to_pricer(day_curve, RATE, DAY)
        with pytest.raises(OutOfCoverage):
            pricer.call(1.0, 1e-15, DAY)
        with pytest.raises(OutOfCoverage):
            pricer.call(1.0, 0.97, tau=0.5)

    def test_pricer_reuses_cached_curves(self, vg):
        pricer = VarianceGammaPricer(vg, RATE)
        first = pricer.curve_pricer(DAY)
        second = pricer.curve_pricer(DAY)
        assert first is second


def test_fft_config_validation():
    with pytest.raises(BadConfig):
        FFTConfig(n_points=1000)
    with pytest.raises(BadConfig):
        FFTConfig(v_max=-1.0)
