import json
import warnings

import numpy as np
import pytest

from nlskink.errors import (
    BackgroundMismatchError,
    ConfigError,
    EvalTooNearCutError,
    SpectralPointError,
)
from nlskink.numerics import fit_power_law
from nlskink.scattering import (
    DiscreteSpectrum,
    PotentialField,
    ReflectionTable,
    build_z_grid,
    find_discrete_spectrum,
    jost_matrix,
    load_profile_csv,
    load_scattering_json,
    norming_constant,
    reflection_table,
    s11_continued,
    save_profile_csv,
    save_scattering_json,
    scattering_coefficients,
    trace_formula_eval,
)


@pytest.fixture(scope="module")
def tanh_field():
    return PotentialField.tanh_kink(half_width=25.0, dx=0.01)


@pytest.fixture(scope="module")
def pert_field():
    return PotentialField.perturbed_kink(amplitude=0.1, width=2.0)


@pytest.fixture(scope="module")
def generic_field():
    # strong bump: generically sized residues of s11 at z = +-1
    return PotentialField.perturbed_kink(amplitude=1.0, width=2.0)


def zero_table():
    """Reflectionless table (r identically 0) on a modest grid."""
    z = np.concatenate([np.linspace(-4, -0.2, 25), np.linspace(0.2, 4, 25)])
    ones = np.ones_like(z, dtype=complex)
    return ReflectionTable(z, ones, np.zeros_like(ones))


class TestPotentialField:
    def test_background_enforced(self):
        with pytest.raises(BackgroundMismatchError):
            PotentialField.from_callable(lambda x: np.tanh(x), 4.0, 0.1)

    def test_builtin(self, tanh_field):
        assert abs(tanh_field.grid.values[0] + 1.0) < 1e-10
        assert abs(tanh_field.grid.values[-1] - 1.0) < 1e-10


class TestJostMatrix:
    def test_pure_background_from_the_right(self):
        # q = +1 on [0, L]: the side-plus integrand vanishes identically and
        # the Jost matrix stays the exact free matrix Y_+
        vals = np.where(np.arange(2 * 500 + 1) >= 500, 1.0, -1.0).astype(complex)
        from nlskink.numerics import ComplexGrid1D
        grid = ComplexGrid1D(x0=-5.0, dx=0.01, values=vals)
        q = PotentialField(grid=grid, half_width=5.0)
        for z in (2.0, 0.5, -3.0, 1.3j + 0.4):
            m = jost_matrix(q, z, "plus")
            y_plus = np.eye(2, dtype=complex)
            y_plus[0, 1] = y_plus[1, 0] = 1.0 / z
            assert np.max(np.abs(m - y_plus)) < 1e-12

    def test_determinant_identity(self, tanh_field):
        # det Y_- = 1 - z^-2 is preserved by the trace-free evolution
        m = jost_matrix(tanh_field, 2.0, "minus")
        assert abs(np.linalg.det(m) - 0.75) < 1e-8

    def test_fourth_order_convergence(self):
        fn = lambda x: np.tanh(x) + 0.1 * np.exp(-x**2 / 4)
        fields = {dx: PotentialField.from_callable(fn, 25.0, dx)
                  for dx in (0.1, 0.05, 0.005)}
        ref = jost_matrix(fields[0.005], 0.5, "plus")
        e_coarse = np.max(np.abs(jost_matrix(fields[0.1], 0.5, "plus") - ref))
        e_fine = np.max(np.abs(jost_matrix(fields[0.05], 0.5, "plus") - ref))
        assert e_coarse / e_fine >= 12.0

    def test_exclusion_disk(self, tanh_field):
        for z in (1.0005, -0.9999, 5e-4):
            with pytest.raises(SpectralPointError):
                jost_matrix(tanh_field, z, "minus")

    def test_wronskian_x_independent(self, pert_field):
        rng = np.random.default_rng(17)
        zs = rng.uniform(0.2, 4.0, size=20) * rng.choice([-1, 1], size=20)
        zs = zs[np.abs(np.abs(zs) - 1.0) > 0.05]
        for z in zs:
            vals = []
            for x_eval in (0.0, pert_field.half_width / 2.0):
                mm = jost_matrix(pert_field, z, "minus", x_eval=x_eval)
                mp = jost_matrix(pert_field, z, "plus", x_eval=x_eval)
                vals.append(mm[0, 0] * mp[1, 1] - mm[1, 0] * mp[0, 1])
            assert abs(vals[0] - vals[1]) < 1e-8


class TestScatteringCoefficients:
    def test_tanh_reflectionless(self, tanh_field):
        s = scattering_coefficients(tanh_field, 0.5)
        assert abs(s.s21) <= 1e-5
        assert 1 - 1e-5 <= abs(s.s11) <= 1 + 1e-5

    def test_unitarity(self, pert_field):
        for z in (0.3, -0.7, 2.4, -3.3):
            s = scattering_coefficients(pert_field, z)
            assert s.unitarity_defect < 1e-6

    def test_boundary_limits(self, generic_field):
        # r -> -+1 as z -> +-1 for generically sized residues
        for z, target in ((1 - 5e-3, -1), (1 + 5e-3, -1),
                          (-1 - 5e-3, 1), (-1 + 5e-3, 1)):
            s = scattering_coefficients(generic_field, z)
            assert abs(s.r - target) < 0.05


class TestReflectionTable:
    def test_tanh_table(self, tanh_field):
        grid = build_z_grid(n=200)
        tab = reflection_table(tanh_field, grid)
        assert np.max(np.abs(tab.r)) <= 1e-5
        assert tab.max_unitarity_defect() < 1e-6

    def test_reciprocal_symmetry(self, pert_field):
        tab = reflection_table(pert_field, np.array([0.5, 2.0, 0.25, 4.0]))
        assert tab.max_symmetry_defect() < 1e-6
        r2 = tab.r[tab.z_grid == 2.0][0]
        r_half = tab.r[tab.z_grid == 0.5][0]
        assert abs(r2 - np.conj(r_half)) < 1e-6

    def test_modulus_below_one(self, pert_field):
        grid = build_z_grid(n=150)
        tab = reflection_table(pert_field, grid)
        assert np.all(np.abs(tab.r) < 1.0)

    def test_large_z_decay(self):
        # a C^0 cusp perturbation realises the generic z^-2 tail with a
        # monotone envelope (smooth bumps decay super-polynomially)
        cusp = lambda x: np.tanh(x) + 0.1 * np.exp(-np.abs(x))
        q = PotentialField.from_callable(cusp, 25.0, 0.01)
        zg = np.linspace(10.0, 40.0, 25)
        tab = reflection_table(q, zg)
        _, p = fit_power_law(list(zip(zg, np.abs(tab.r))))
        assert p >= 1.8

    def test_small_z_order(self, pert_field):
        zg = np.linspace(0.08, 0.3, 15)
        tab = reflection_table(pert_field, zg)
        _, p = fit_power_law(list(zip(zg, np.abs(tab.r))))
        assert -p >= 1.8  # |r| ~ z^s with s >= 1.8 as z -> 0

    def test_grid_refinement_stability(self):
        fn = lambda x: np.tanh(x) + 0.1 * np.exp(-x**2 / 4)
        zg = np.linspace(0.3, 3.0, 12)
        zg = zg[np.abs(zg - 1.0) > 0.05]
        r_values = {}
        for dx in (0.01, 0.005):
            q = PotentialField.from_callable(fn, 25.0, dx)
            r_values[dx] = reflection_table(q, zg).r
        assert np.max(np.abs(r_values[0.01] - r_values[0.005])) <= 1e-6


class TestDiscreteSpectrum:
    def test_tanh_single_eigenvalue(self, tanh_field):
        spec = find_discrete_spectrum(tanh_field)
        assert len(spec.eigenvalues) == 1
        assert abs(spec.eigenvalues[0] - 1j) <= 1e-4

    def test_continuity_under_tiny_perturbation(self, tanh_field):
        qp = PotentialField.perturbed_kink(amplitude=1e-3, width=2.0)
        spec0 = find_discrete_spectrum(tanh_field, with_norming=False)
        spec1 = find_discrete_spectrum(qp, with_norming=False)
        assert len(spec1.eigenvalues) == 1
        assert abs(spec1.eigenvalues[0] - spec0.eigenvalues[0]) < 1e-2

    def test_type_invariants(self):
        with pytest.raises(ValueError):
            DiscreteSpectrum((0.5 + 0.5j,), (1.0,))
        with pytest.raises(ValueError):
            DiscreteSpectrum((1j, 1j), (1.0, 1.0))
        empty = DiscreteSpectrum((), ())
        assert empty.eigenvalues == ()


class TestNormingConstant:
    def test_tanh(self, tanh_field):
        spec = find_discrete_spectrum(tanh_field, with_norming=False)
        z1 = spec.eigenvalues[0]
        c1 = norming_constant(tanh_field, z1)
        # arg(c) = arg(i z) and the ratio is real positive
        ratio = c1 / (1j * z1)
        assert abs(np.angle(ratio)) < 1e-3
        assert ratio.real > 0
        assert abs(c1 + 2.0) < 1e-6  # black soliton reference value

    def test_lipschitz(self, tanh_field):
        qp = PotentialField.perturbed_kink(amplitude=1e-4, width=2.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            z1 = find_discrete_spectrum(qp, with_norming=False).eigenvalues[0]
            c_pert = norming_constant(qp, z1)
        assert 0 < abs(c_pert + 2.0) < 1e-2


class TestTraceFormula:
    def test_blaschke_factor(self):
        spec = DiscreteSpectrum((1j,), (-2.0,))
        val = trace_formula_eval(spec, zero_table(), 2j)
        assert abs(val - 1.0 / 3.0) < 1e-12

    def test_reflectionless_no_spectrum(self):
        spec = DiscreteSpectrum((), ())
        for z in (2j, 1.5 + 0.5j):
            assert abs(trace_formula_eval(spec, zero_table(), z) - 1.0) < 1e-12

    def test_too_near_cut(self):
        with pytest.raises(EvalTooNearCutError):
            trace_formula_eval(DiscreteSpectrum((), ()), zero_table(),
                               1.0 + 0.01j)

    def test_generic_consistency(self, pert_field):
        grid = build_z_grid(n=420, exclusion_radius=2e-4)
        tab = reflection_table(pert_field, grid, exclusion_radius=2e-4)
        spec = find_discrete_spectrum(pert_field)
        for z in (1.5j, 2j):
            recon = trace_formula_eval(spec, tab, z)
            direct = s11_continued(pert_field, z)
            assert abs(recon - direct) / abs(direct) < 1e-3


class TestFileInterfaces:
    def test_profile_roundtrip(self, tmp_path):
        q = PotentialField.perturbed_kink(amplitude=0.2 + 0.1j, width=1.5,
                                          half_width=20.0, dx=0.05)
        path = tmp_path / "profile.csv"
        save_profile_csv(path, q)
        q2 = load_profile_csv(path)
        assert np.allclose(q2.grid.values, q.grid.values, atol=1e-14)
        assert q2.half_width == q.half_width

    def test_profile_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n0,0,0\n")
        with pytest.raises(ConfigError):
            load_profile_csv(path)

    def test_profile_nonuniform_row_reported(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,re_q,im_q\n-1,-1,0\n0,0,0\n1.1,1,0\n")
        with pytest.raises(ConfigError) as err:
            load_profile_csv(path)
        assert "row 4" in str(err.value) or "row 3" in str(err.value)

    def test_scattering_json_roundtrip(self, tmp_path, tanh_field):
        grid = np.linspace(0.2, 3.0, 9)
        grid = grid[np.abs(grid - 1.0) > 0.05]
        tab = reflection_table(tanh_field, grid)
        spec = find_discrete_spectrum(tanh_field)
        path = tmp_path / "scattering.json"
        save_scattering_json(path, tab, spec)
        with open(path) as fh:
            payload = json.load(fh)
        assert set(payload) == {"grid", "s11", "s21", "r", "eigenvalues",
                                "norming_constants"}
        tab2, spec2 = load_scattering_json(path)
        assert np.allclose(tab2.r, tab.r)
        assert spec2.eigenvalues == spec.eigenvalues
