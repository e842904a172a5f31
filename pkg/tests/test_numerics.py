import numpy as np
import pytest

from nlskink.errors import (
    DegenerateFitError,
    GammaPoleError,
    InteriorPoleError,
    NumericalBlowupError,
)
from nlskink.numerics import (
    ComplexGrid1D,
    QuadratureSpec,
    fit_power_law,
    integrate_linear_ode,
    integrate_with_log_endpoint,
    log_gamma,
)

I2 = np.eye(2, dtype=complex)


class TestComplexGrid:
    def test_positions_from_index(self):
        g = ComplexGrid1D(x0=-3.0, dx=0.25, values=np.zeros(25))
        assert g.position(0) == -3.0
        assert g.position(24) == -3.0 + 24 * 0.25
        assert np.array_equal(g.x, -3.0 + 0.25 * np.arange(25))

    def test_invariants(self):
        with pytest.raises(ValueError):
            ComplexGrid1D(x0=0.0, dx=-0.1, values=np.zeros(4))
        with pytest.raises(ValueError):
            ComplexGrid1D(x0=0.0, dx=0.1, values=np.array([]))


class TestQuadratureSpec:
    def test_point_budget(self):
        with pytest.raises(ValueError):
            QuadratureSpec(panels=1, points_per_panel=4)
        with pytest.raises(ValueError):
            QuadratureSpec(rule="simpson")


class TestLinearOde:
    def test_zero_coefficient(self):
        out = integrate_linear_ode(lambda x: np.zeros((2, 2)), I2, 0.0, 2.0, 10)
        assert np.allclose(out, I2, atol=1e-15)

    def test_constant_rotation(self):
        # A = i*I over an interval of length pi: Y = exp(i*pi) I = -I
        out = integrate_linear_ode(lambda x: 1j * I2, I2, 0.0, np.pi, 200)
        assert np.allclose(out, -I2, atol=1e-9)

    def test_nilpotent(self):
        A = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        out = integrate_linear_ode(lambda x: A, I2, 0.0, 1.0, 8)
        assert np.allclose(out, np.array([[1, 1], [0, 1]]), atol=1e-14)

    def test_backward(self):
        fwd = integrate_linear_ode(lambda x: 1j * I2, I2, 0.0, 1.0, 100)
        back = integrate_linear_ode(lambda x: 1j * I2, fwd, 1.0, 0.0, 100)
        assert np.allclose(back, I2, atol=1e-12)

    def test_fourth_order(self):
        def err(n):
            out = integrate_linear_ode(lambda x: 1j * I2, I2, 0.0, np.pi, n)
            return np.max(np.abs(out + I2))
        assert err(40) / err(80) >= 12.0

    def test_batched(self):
        rates = np.array([0.5j, 1.0j, 2.0j])
        coef = lambda x: rates[:, None, None] * I2[None]
        y0 = np.broadcast_to(I2, (3, 2, 2)).copy()
        out = integrate_linear_ode(coef, y0, 0.0, 1.0, 400)
        expected = np.exp(rates)[:, None, None] * I2[None]
        assert np.allclose(out, expected, atol=1e-10)

    def test_blowup_carries_step(self):
        big = np.full((2, 2), 1e200, dtype=complex)
        with pytest.raises(NumericalBlowupError) as err:
            integrate_linear_ode(lambda x: big, I2, 0.0, 10.0, 50)
        assert err.value.step is not None


class TestCauchyQuadrature:
    def test_zero_integrand(self):
        assert integrate_with_log_endpoint(lambda s: 0.0, (0.0, 1.0), 2.0) == 0.0

    def test_constant_closed_form(self):
        # int_0^1 ds/(s-2) = ln(1/2)
        val = integrate_with_log_endpoint(lambda s: 1.0, (0.0, 1.0), 2.0)
        assert abs(val - np.log(0.5)) < 1e-12

    def test_complex_pole_vs_trapezoid_oracle(self):
        # f(s) = s on (0,1), z = i, against a 10^6-point trapezoid
        s = np.linspace(0.0, 1.0, 1_000_001)
        oracle = np.trapezoid(s / (s - 1j), s)
        val = integrate_with_log_endpoint(lambda s: s, (0.0, 1.0), 1j)
        assert abs(val - oracle) < 1e-10

    def test_linearity(self):
        rng = np.random.default_rng(7)
        c1, c2 = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        f1 = lambda s: np.sin(s) + 0.3j * s
        f2 = lambda s: np.exp(-s) * (1 + 0.5j)
        comb = lambda s: c1 * f1(s) + c2 * f2(s)
        z = 1.7
        lhs = integrate_with_log_endpoint(comb, (0.0, 1.0), z)
        rhs = c1 * integrate_with_log_endpoint(f1, (0.0, 1.0), z) \
            + c2 * integrate_with_log_endpoint(f2, (0.0, 1.0), z)
        assert abs(lhs - rhs) < 1e-10

    def test_interior_pole_rejected(self):
        with pytest.raises(InteriorPoleError):
            integrate_with_log_endpoint(lambda s: 1.0, (0.0, 1.0), 0.5)

    def test_endpoint_constant_closed_forms(self):
        # pole at the left endpoint, f = 1 on (0,1): limit is i*pi
        val = integrate_with_log_endpoint(lambda s: 1.0, (0.0, 1.0), 0.0)
        assert abs(val - 1j * np.pi) < 1e-12
        # pole at the right endpoint, f = 1 on (0,1): limit is -log(1) = 0
        val = integrate_with_log_endpoint(lambda s: 1.0, (0.0, 1.0), 1.0)
        assert abs(val) < 1e-12

    def test_endpoint_matches_upper_half_plane_limit(self):
        # independent oracle: brute-force quadrature at z = e + i*delta plus
        # the explicit counterterm, extrapolated in delta with the
        # delta*log(delta) convergence model
        f = lambda s: np.cos(s) + 0.2j * np.sin(3 * s)
        a, b = 0.3, 1.4
        s = np.linspace(a, b, 2_000_001)
        fs = f(s)

        def extrapolated_limit(e, sign):
            ds = np.array([2e-3, 1e-3, 5e-4])
            vals = np.array([np.trapezoid(fs / (s - (e + 1j * d)), s)
                             + sign * f(e) * np.log(1j * d) for d in ds])
            M = np.column_stack([np.ones(3), ds * np.log(ds), ds])
            return np.linalg.solve(M, vals)[0]

        val_a = integrate_with_log_endpoint(f, (a, b), a)
        val_b = integrate_with_log_endpoint(f, (a, b), b)
        assert abs(val_a - extrapolated_limit(a, +1)) < 2e-5
        assert abs(val_b - extrapolated_limit(b, -1)) < 2e-5

    def test_infinite_interval_plain(self):
        # int_2^inf s^-4/(s-1) ds against a dense mapped trapezoid
        f = lambda s: s**-4.0
        u = np.linspace(1e-9, 1 - 1e-9, 2_000_001)
        s = 2.0 + u / (1 - u)
        oracle = np.trapezoid(f(s) / ((s - 1.0) * (1 - u) ** 2), u)
        val = integrate_with_log_endpoint(f, (2.0, np.inf), 1.0)
        assert abs(val - oracle) < 1e-8

    def test_endpoint_needs_subtraction_flag(self):
        spec = QuadratureSpec(singularity_subtraction=False)
        with pytest.raises(InteriorPoleError):
            integrate_with_log_endpoint(lambda s: 1.0, (0.0, 1.0), 0.0, spec)

    def test_tanh_sinh_agrees(self):
        spec = QuadratureSpec(rule="tanh-sinh", panels=4, points_per_panel=40)
        val = integrate_with_log_endpoint(lambda s: np.exp(s), (0.0, 1.0),
                                          3.0, spec)
        ref = integrate_with_log_endpoint(lambda s: np.exp(s), (0.0, 1.0), 3.0)
        assert abs(val - ref) < 1e-9


def _loggamma_shift_oracle(w, n=200):
    """log Gamma via n-fold recurrence down from a Stirling evaluation."""
    w = complex(w)
    zz = w + n
    stirling = (zz - 0.5) * np.log(zz) - zz + 0.5 * np.log(2 * np.pi) \
        + 1 / (12 * zz) - 1 / (360 * zz**3) + 1 / (1260 * zz**5)
    return stirling - sum(np.log(w + j) for j in range(n))


class TestLogGamma:
    def test_known_values(self):
        assert abs(log_gamma(1.0)) < 1e-14
        assert abs(log_gamma(0.5) - np.log(np.sqrt(np.pi))) < 1e-14

    def test_series_oracle(self):
        for w in (0.3j, 1.2 - 0.7j, 0.05 + 2.0j):
            assert abs(log_gamma(w) - _loggamma_shift_oracle(w)) < 1e-10

    def test_poles(self):
        for w in (0.0, -1.0, -7.0):
            with pytest.raises(GammaPoleError):
                log_gamma(w)

    def test_recurrence(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            w = complex(rng.uniform(0.5, 5.0), rng.uniform(-5.0, 5.0))
            diff = log_gamma(w + 1) - log_gamma(w) - np.log(w)
            assert abs(np.exp(diff) - 1.0) < 1e-10


class TestFitPowerLaw:
    def test_exact_half(self):
        amp, p = fit_power_law([(1.0, 1.0), (4.0, 0.5), (16.0, 0.25)])
        assert abs(p - 0.5) < 1e-12
        assert abs(amp - 1.0) < 1e-12

    def test_constant(self):
        _, p = fit_power_law([(1.0, 3.0), (10.0, 3.0)])
        assert abs(p) < 1e-12

    @pytest.mark.parametrize("n", [2, 5, 17])
    def test_exact_any_length(self, n):
        t = np.linspace(2.0, 40.0, n)
        e = 3.7 * t**-1.25
        amp, p = fit_power_law(list(zip(t, e)))
        assert abs(p - 1.25) < 1e-12
        assert abs(amp - 3.7) < 1e-10

    def test_noisy_synthetic(self):
        rng = np.random.default_rng(3)
        t = np.linspace(10.0, 100.0, 25)
        e = 2.0 * t**-0.75 * (1.0 + 0.01 * rng.standard_normal(t.size))
        _, p = fit_power_law(list(zip(t, e)))
        assert 0.73 <= p <= 0.77

    def test_degenerate(self):
        with pytest.raises(DegenerateFitError):
            fit_power_law([(1.0, 1.0)])
        with pytest.raises(DegenerateFitError):
            fit_power_law([(1.0, 1.0), (2.0, 0.0)])
        with pytest.raises(DegenerateFitError):
            fit_power_law([(1.0, 1.0), (-2.0, 0.5)])
