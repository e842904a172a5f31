import csv

import numpy as np
import pytest

from nlskink.errors import PhaseOriginError, RegionError
from nlskink.phase import (
    RayCoordinate,
    export_signature_grid,
    signature_sample,
    stationary_points,
    theta,
    theta_derivatives,
)


def re_2i_theta_direct(z, xi):
    """Independent closed form of Re(2 i theta) per unit time."""
    u, v = z.real, z.imag
    rho2 = u * u + v * v
    return -2.0 * xi * v * (1.0 + 1.0 / rho2) + 2.0 * u * v * (1.0 + 1.0 / rho2**2)


class TestRayCoordinate:
    def test_exactness(self):
        ray = RayCoordinate.from_xi_t(1.5, 10.0)
        assert ray.x == 2.0 * 1.5 * 10.0
        with pytest.raises(ValueError):
            RayCoordinate(xi=1.5, x=31.0, t=10.0)
        with pytest.raises(ValueError):
            RayCoordinate(xi=1.5, x=-3.0, t=-1.0)


class TestTheta:
    def test_zero_at_one(self):
        assert theta(1.0, 1.7) == 0.0

    def test_real_axis_is_real(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            z = rng.uniform(0.1, 4.0) * rng.choice([-1.0, 1.0])
            assert abs(complex(theta(z, 1.5)).imag) < 1e-14

    def test_at_i(self):
        # lambda(i) = 0 and zeta(i) = i give Re(2 i theta(i)) = -4 xi
        val = (2j * theta(1j, 1.5)).real
        assert abs(val - (-6.0)) < 1e-14

    def test_origin_rejected(self):
        with pytest.raises(PhaseOriginError):
            theta(0.0, 1.5)
        with pytest.raises(PhaseOriginError):
            theta_derivatives(0.0, 1.5)


class TestDerivatives:
    def test_stationary_root(self):
        pair = stationary_points(1.5)
        for zk in (pair.xi1, pair.xi2):
            d1, _ = theta_derivatives(zk, 1.5)
            assert abs(d1) < 1e-10

    def test_second_derivative_vs_finite_differences(self):
        # cross-check the closed form against central differences of theta'
        pair = stationary_points(1.5)
        h = 1e-5
        for zk in (pair.xi1, pair.xi2):
            dp, _ = theta_derivatives(zk + h, 1.5)
            dm, _ = theta_derivatives(zk - h, 1.5)
            fd = (dp - dm) / (2 * h)
            _, d2 = theta_derivatives(zk, 1.5)
            assert abs(d2 - fd) < 1e-6 * max(1.0, abs(d2))
        assert pair.theta_pp_1 > 0 > pair.theta_pp_2


class TestStationaryPoints:
    def test_reference_ray(self):
        pair = stationary_points(1.5)
        assert abs(pair.xi1 * pair.xi2 - 1.0) < 1e-12
        assert 0 < pair.xi1 < 1 < pair.xi2
        assert abs(pair.xi1 - 0.5577) < 1e-3
        assert abs(pair.xi2 - 1.7931) < 1e-3

    def test_negative_ray(self):
        pair = stationary_points(-1.5)
        assert pair.xi2 < -1 < pair.xi1 < 0
        assert abs(pair.xi1 * pair.xi2 - 1.0) < 1e-12

    def test_coalescence_guard(self):
        for xi in (1.0, -1.0, 0.5, 1.0 + 5e-10):
            with pytest.raises(RegionError):
                stationary_points(xi)

    def test_coalescence_limit(self):
        pair = stationary_points(1.0 + 1e-6)
        assert abs(pair.xi1 - 1.0) < 0.01
        assert abs(pair.xi2 - 1.0) < 0.01

    def test_random_sample_properties(self):
        rng = np.random.default_rng(42)
        signs = rng.choice([-1.0, 1.0], size=50)
        mags = rng.uniform(1.01, 5.0, size=50)
        for xi in signs * mags:
            pair = stationary_points(xi)
            assert abs(pair.xi1 * pair.xi2 - 1.0) < 1e-12
            for zk in (pair.xi1, pair.xi2):
                d1, _ = theta_derivatives(zk, xi)
                assert abs(d1) < 1e-10
            assert pair.theta_pp_1 > 0 > pair.theta_pp_2


class TestSignature:
    def test_real_axis_zero(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            z = complex(rng.uniform(-4, 4), 0.0)
            if z == 0:
                continue
            assert signature_sample(z, 1.5) == 0

    def test_probe_points(self):
        pair = stationary_points(1.5)
        probes = [1j, pair.xi2 + 0.1j, pair.xi1 - 0.1j, 0.5j]
        for z in probes:
            expected = int(np.sign(re_2i_theta_direct(z, 1.5)))
            assert signature_sample(z, 1.5) == expected
        assert signature_sample(1j, 1.5) == -1
        assert signature_sample(pair.xi2 + 0.1j, 1.5) == 1
        assert signature_sample(pair.xi1 - 0.1j, 1.5) == 1
        assert signature_sample(0.5j, 1.5) == -1

    def test_conjugation_antisymmetry(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            z = complex(rng.uniform(-3, 3), rng.uniform(0.05, 2.0))
            a = (2j * theta(z, 1.5)).real
            b = (2j * theta(np.conj(z), 1.5)).real
            assert abs(a + b) < 1e-12

    def test_grid_export(self, tmp_path):
        path = tmp_path / "sig.csv"
        export_signature_grid(path, 1.5, re_range=(-2, 2), im_range=(-1, 1),
                              n_re=21, n_im=11)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["re_z", "im_z", "sign"]
        signs = {row[2] for row in rows[1:]}
        assert signs <= {"-1", "0", "1"}
        for row in rows[1:]:
            if float(row[1]) == 0.0:
                assert row[2] == "0"
