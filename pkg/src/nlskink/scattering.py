"""Direct Zakharov-Shabat scattering on the kink background.

The spectral problem is psi_x = L psi with

    L(z; x) = [[-i*lam, i*conj(q)], [-i*q, i*lam]],   lam = (z + 1/z)/2.

Jost solutions are normalised to Y_pm exp(-i*zeta*x*sigma3) as x -> +-inf
(Y_pm = I +- sigma1/z, zeta = (z - 1/z)/2).  We integrate the conjugated
columns m = psi * exp(i*zeta*x*sigma3), whose equations

    m_col1' = (L + i*zeta) m_col1,      m_col2' = (L - i*zeta) m_col2,

have constant co-moving modes on the settled background, so the integrand
amplitude is O(|q - tanh|) and the RK4 error does not grow with |zeta|.
The domain is truncated at +-half_width where the profile must have settled
to -+1 within background_tolerance; the seed is then the exact free matrix.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import (
    BackgroundMismatchError,
    ConfigError,
    EvalTooNearCutError,
    NonSimpleZeroError,
    SpectralPointError,
    SpectralSingularityError,
)
from .numerics import ComplexGrid1D, integrate_linear_ode
from .vdensity import VDensity

DEFAULT_EXCLUSION_RADIUS = 1e-3
_SING_POINTS = (-1.0, 0.0, 1.0)


@dataclass(frozen=True)
class PotentialField:
    """Sampled initial profile q0 on [-half_width, half_width].

    The grid must reach the +-1 background at the ends; anything else means
    the truncation is lossy and the Jost seeds would be wrong.
    """

    grid: ComplexGrid1D
    half_width: float
    background_tolerance: float = 1e-10

    def __post_init__(self):
        q = self.grid.values
        x = self.grid.x
        L = self.half_width
        if abs(x[0] + L) > 1e-9 or abs(x[-1] - L) > 1e-9:
            raise BackgroundMismatchError(
                f"grid [{x[0]}, {x[-1]}] does not span [-{L}, {L}]")
        if abs(q[0] + 1.0) > self.background_tolerance or \
           abs(q[-1] - 1.0) > self.background_tolerance:
            raise BackgroundMismatchError(
                "background mismatch: |q(-L)+1|="
                f"{abs(q[0] + 1.0):.3e}, |q(L)-1|={abs(q[-1] - 1.0):.3e} "
                f"exceed tolerance {self.background_tolerance:.1e}")

    @classmethod
    def from_callable(cls, fn, half_width: float, dx: float,
                      background_tolerance: float = 1e-10) -> "PotentialField":
        n = int(round(half_width / dx))
        if abs(n * dx - half_width) > 1e-12 * half_width:
            raise ValueError("half_width must be an integer multiple of dx")
        x = -half_width + dx * np.arange(2 * n + 1)
        vals = np.asarray(fn(x), dtype=complex)
        grid = ComplexGrid1D(x0=-half_width, dx=dx, values=vals)
        return cls(grid=grid, half_width=half_width,
                   background_tolerance=background_tolerance)

    @classmethod
    def tanh_kink(cls, half_width: float = 25.0, dx: float = 0.01) -> "PotentialField":
        return cls.from_callable(np.tanh, half_width, dx)

    @classmethod
    def perturbed_kink(cls, amplitude: complex = 0.1, center: float = 0.0,
                       width: float = 2.0, half_width: float = 25.0,
                       dx: float = 0.01) -> "PotentialField":
        def fn(x):
            return np.tanh(x) + amplitude * np.exp(-((x - center) / width) ** 2)
        return cls.from_callable(fn, half_width, dx)


@dataclass(frozen=True)
class ScatteringSample:
    """Scattering data at one real spectral point."""

    z: float
    s11: complex
    s21: complex
    r: complex = field(default=None)

    def __post_init__(self):
        if self.r is None:
            object.__setattr__(self, "r", self.s21 / self.s11)

    @property
    def unitarity_defect(self) -> float:
        return abs(abs(self.s11) ** 2 - abs(self.s21) ** 2 - 1.0)


@dataclass(frozen=True)
class DiscreteSpectrum:
    """Zeros of s11 on the upper unit circle with their norming constants."""

    eigenvalues: tuple
    norming_constants: tuple

    def __post_init__(self):
        zs = tuple(complex(z) for z in self.eigenvalues)
        cs = tuple(complex(c) for c in self.norming_constants)
        object.__setattr__(self, "eigenvalues", zs)
        object.__setattr__(self, "norming_constants", cs)
        for z in zs:
            if abs(abs(z) - 1.0) > 1e-6 or z.imag < 0:
                raise ValueError(f"eigenvalue {z} not on the upper unit circle")
        for za, zb in zip(zs, zs[1:]):
            if abs(za - zb) < 1e-10:
                raise ValueError("eigenvalues must be pairwise distinct")


class ReflectionTable:
    """Reflection coefficient tabulated on a real z grid."""

    def __init__(self, z_grid, s11, s21):
        self.z_grid = np.asarray(z_grid, dtype=float)
        self.s11 = np.asarray(s11, dtype=complex)
        self.s21 = np.asarray(s21, dtype=complex)
        self.r = self.s21 / self.s11
        order = np.argsort(self.z_grid)
        self.z_grid = self.z_grid[order]
        self.s11 = self.s11[order]
        self.s21 = self.s21[order]
        self.r = self.r[order]

    @property
    def samples(self):
        return [ScatteringSample(float(z), complex(a), complex(b))
                for z, a, b in zip(self.z_grid, self.s11, self.s21)]

    def max_unitarity_defect(self) -> float:
        return float(np.max(np.abs(np.abs(self.s11) ** 2
                                   - np.abs(self.s21) ** 2 - 1.0)))

    def max_symmetry_defect(self, match_tol: float = 1e-9) -> float:
        """sup |r(z) - conj(r(1/z))| over grid points whose reciprocal is
        also on the grid."""
        worst = 0.0
        lookup = {round(z, 12): i for i, z in enumerate(self.z_grid)}
        for i, z in enumerate(self.z_grid):
            if z == 0:
                continue
            j = lookup.get(round(1.0 / z, 12))
            if j is None:
                continue
            worst = max(worst, abs(self.r[i] - np.conj(self.r[j])))
        return worst

    def interp_r(self, z: float) -> complex:
        """Cubic interpolation of r at a real point inside the grid range."""
        z = float(z)
        sp_re = CubicSpline(self.z_grid, self.r.real)
        sp_im = CubicSpline(self.z_grid, self.r.imag)
        return complex(sp_re(z) + 1j * sp_im(z))

    def density(self) -> VDensity:
        return VDensity(self.z_grid, np.abs(self.r) ** 2)


def _check_exclusion(z, exclusion_radius):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    for p in _SING_POINTS:
        bad = np.abs(z - p) <= exclusion_radius
        if np.any(bad):
            raise SpectralPointError(
                f"singular spectral point: z={z[bad][0]} within "
                f"{exclusion_radius} of {p}")


def _even_grid(q: PotentialField):
    """Full sample array with an even interval count per half-domain.

    Odd counts are refined 2x by cubic interpolation so the paired RK4 steps
    (h = 2 dx, midpoints on-grid) always land exactly on x = 0."""
    vals = q.grid.values
    n = (len(vals) - 1) // 2
    if n % 2 == 0:
        return vals, q.grid.dx
    x_old = np.arange(len(vals), dtype=float)
    x_new = 0.5 * np.arange(2 * len(vals) - 1)
    refined = (CubicSpline(x_old, vals.real)(x_new)
               + 1j * CubicSpline(x_old, vals.imag)(x_new))
    return refined, q.grid.dx / 2.0


def jost_matrix(q: PotentialField, z, side: str,
                exclusion_radius: float = DEFAULT_EXCLUSION_RADIUS,
                x_eval: float = 0.0) -> np.ndarray:
    """Jost matrix m^+- (z; x_eval), vectorised over z.

    side "minus" integrates from -half_width, side "plus" from +half_width,
    toward x_eval (default 0), seeded with the free matrix Y_-+ at the end.
    Returns shape (2, 2) for scalar z, else (n, 2, 2).
    """
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    scalar = np.isscalar(z) or np.asarray(z).ndim == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_exclusion(z, exclusion_radius)
    lam = 0.5 * (z + 1.0 / z)
    zeta = 0.5 * (z - 1.0 / z)
    nz = z.size

    qs, dx = _even_grid(q)
    sgn = -1.0 if side == "minus" else 1.0      # x runs sgn*L -> x_eval
    x_start, x_end = sgn * q.half_width, float(x_eval)
    span = x_end - x_start
    n_steps = int(round(abs(span) / (2.0 * dx)))
    if n_steps < 1:
        raise ValueError("evaluation point too close to the seeding end")
    if abs(abs(span) - n_steps * 2.0 * dx) > 1e-9:
        raise ValueError("x_eval must sit on the sample grid an even number "
                         "of steps from the seeding end")
    # stack the two column systems: first nz entries evolve column 1 with
    # A = L + i*zeta, the rest evolve column 2 with A = L - i*zeta
    col_sign = np.concatenate([np.ones(nz), -np.ones(nz)])
    lam2 = np.concatenate([lam, lam])
    zeta2 = np.concatenate([zeta, zeta])
    diag_shift = 1j * col_sign * zeta2

    x_left = -q.half_width

    def coefficient(x):
        idx = int(round((x - x_left) / dx))
        idx = min(max(idx, 0), len(qs) - 1)
        qx = qs[idx]
        A = np.empty((2 * nz, 2, 2), dtype=complex)
        A[:, 0, 0] = -1j * lam2 + diag_shift
        A[:, 1, 1] = 1j * lam2 + diag_shift
        A[:, 0, 1] = 1j * np.conj(qx)
        A[:, 1, 0] = -1j * qx
        return A

    y0 = np.zeros((2 * nz, 2, 2), dtype=complex)
    y0[:, 0, 0] = 1.0
    y0[:, 1, 1] = 1.0
    y0[:nz, 1, 0] = sgn / z
    y0[:nz, 0, 1] = sgn / z
    y0[nz:, 1, 0] = sgn / z
    y0[nz:, 0, 1] = sgn / z
    out = integrate_linear_ode(coefficient, y0, x_start, x_end, n_steps)
    m = np.empty((nz, 2, 2), dtype=complex)
    m[:, :, 0] = out[:nz, :, 0]
    m[:, :, 1] = out[nz:, :, 1]
    return m[0] if scalar else m


def _wronskians(q: PotentialField, z, exclusion_radius=DEFAULT_EXCLUSION_RADIUS):
    """(J11, J21) = (det[m1-, m2+], det[m1+, m1-]) at x = 0, vectorised."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    mm = jost_matrix(q, z, "minus", exclusion_radius)
    mp = jost_matrix(q, z, "plus", exclusion_radius)
    mm = mm.reshape(-1, 2, 2)
    mp = mp.reshape(-1, 2, 2)
    j11 = mm[:, 0, 0] * mp[:, 1, 1] - mm[:, 1, 0] * mp[:, 0, 1]
    j21 = mp[:, 0, 0] * mm[:, 1, 0] - mp[:, 1, 0] * mm[:, 0, 0]
    return j11, j21


def s11_continued(q: PotentialField, z,
                  exclusion_radius=DEFAULT_EXCLUSION_RADIUS):
    """s11 continued off the real axis (Im z >= 0) via its Wronskian."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    j11, _ = _wronskians(q, zs, exclusion_radius)
    val = j11 / (1.0 - zs**-2)
    return complex(val[0]) if np.isscalar(z) or np.asarray(z).ndim == 0 else val


def scattering_coefficients(q: PotentialField, z: float,
                            exclusion_radius=DEFAULT_EXCLUSION_RADIUS
                            ) -> ScatteringSample:
    """s11, s21 from the two Wronskians at x = 0 and r = s21/s11."""
    zr = float(z)
    j11, j21 = _wronskians(q, zr, exclusion_radius)
    det_fac = 1.0 - zr**-2
    s11 = complex(j11[0] / det_fac)
    s21 = complex(j21[0] / det_fac)
    if abs(s11) < 1e-12:
        raise SpectralSingularityError(f"spectral singularity on R at z={zr}")
    return ScatteringSample(z=zr, s11=s11, s21=s21)


def reflection_table(q: PotentialField, z_grid,
                     exclusion_radius=DEFAULT_EXCLUSION_RADIUS
                     ) -> ReflectionTable:
    """One ScatteringSample per grid point, in one batched ODE sweep."""
    z_grid = np.asarray(z_grid, dtype=float)
    j11, j21 = _wronskians(q, z_grid.astype(complex), exclusion_radius)
    det_fac = 1.0 - z_grid.astype(complex) ** -2
    s11 = j11 / det_fac
    s21 = j21 / det_fac
    if np.any(np.abs(s11) < 1e-12):
        bad = z_grid[np.abs(s11) < 1e-12][0]
        raise SpectralSingularityError(f"spectral singularity on R at z={bad}")
    return ReflectionTable(z_grid, s11, s21)


def build_z_grid(zmin: float = -5.0, zmax: float = 5.0, n: int = 480,
                 exclusion_radius: float = DEFAULT_EXCLUSION_RADIUS,
                 refine_branch_points: bool = True) -> np.ndarray:
    """Real grid on [zmin, zmax] avoiding the exclusion disks around -1,0,1.

    With refine_branch_points a geometric cluster of extra nodes is added on
    both sides of -1 and +1 so the logarithmic peak of the reflection density
    is resolved down to the exclusion radius.
    """
    base = np.linspace(zmin, zmax, n)
    pts = [base]
    if refine_branch_points:
        ratios = exclusion_radius * 1.25 ** np.arange(0, 18)
        for p in (-1.0, 1.0):
            if zmin < p < zmax:
                pts.append(p + ratios[ratios < 0.08])
                pts.append(p - ratios[ratios < 0.08])
    grid = np.unique(np.concatenate(pts))
    keep = np.ones(grid.size, dtype=bool)
    for p in _SING_POINTS:
        keep &= np.abs(grid - p) > exclusion_radius
    return grid[keep]


def find_discrete_spectrum(q: PotentialField, n_arc_samples: int = 64,
                           exclusion_angle: float = 0.01,
                           exclusion_radius=DEFAULT_EXCLUSION_RADIUS,
                           with_norming: bool = True) -> DiscreteSpectrum:
    """Zeros of s11 on the upper unit-circle arc z = e^{iw}, w in (d, pi-d).

    On the circle s11 is purely imaginary, so Im s11 restricted to the arc is
    the real phase-tracked function whose sign changes bracket the zeros.
    Each bracket is refined by Brent root polishing (bisection safeguarded
    secant steps) until |s11| < 1e-10.
    """
    if n_arc_samples < 16:
        raise ValueError("n_arc_samples must be at least 16")
    w = np.linspace(exclusion_angle, np.pi - exclusion_angle, n_arc_samples)
    s11 = s11_continued(q, np.exp(1j * w), exclusion_radius)
    g = s11.imag
    if np.max(np.abs(s11.real)) > 1e-6 * max(1.0, np.max(np.abs(g))):
        warnings.warn("s11 not purely imaginary on the arc; data may violate "
                      "the kink background assumptions")

    def g_of(wv):
        return s11_continued(q, np.exp(1j * wv), exclusion_radius).imag

    zeros = []
    flips = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
    for i in flips:
        if i == 0 or i == n_arc_samples - 2:
            warnings.warn(
                "eigenvalue too close to branch point; returning the "
                f"unrefined bracket midpoint near w={0.5 * (w[i] + w[i + 1]):.4f}")
            zeros.append(np.exp(1j * 0.5 * (w[i] + w[i + 1])))
            continue
        w_root = brentq(g_of, w[i], w[i + 1], xtol=1e-14, rtol=1e-15)
        z_root = np.exp(1j * w_root)
        if abs(s11_continued(q, z_root, exclusion_radius)) > 1e-10:
            warnings.warn(f"arc zero near w={w_root:.6f} refined only to "
                          "|s11| > 1e-10")
        zeros.append(z_root)
    if not zeros and float(np.min(np.abs(s11))) < 1e-6:
        warnings.warn("suspicious arc residual: min |s11| < 1e-6 without a "
                      "sign change; a 2-d search is out of scope")
    zeros.sort(key=np.angle)
    if with_norming:
        consts = tuple(norming_constant(q, zj, exclusion_radius) for zj in zeros)
    else:
        consts = tuple(0j for _ in zeros)
    return DiscreteSpectrum(eigenvalues=tuple(zeros), norming_constants=consts)


def norming_constant(q: PotentialField, z_j: complex,
                     exclusion_radius=DEFAULT_EXCLUSION_RADIUS) -> complex:
    """c_j = s21(z_j)/s11'(z_j) for a refined eigenvalue z_j.

    At a zero of s11 the Jost columns align, psi1^- = b_j psi2^+, and b_j is
    the analytic continuation of s21 to z_j; it is recovered from the column
    ratio at x = 0.  s11' is a 4th-order central difference along the circle
    tangent (step 1e-4 in arc length).
    """
    z_j = complex(z_j)
    mm = jost_matrix(q, z_j, "minus", exclusion_radius)
    mp = jost_matrix(q, z_j, "plus", exclusion_radius)
    col_m = mm[:, 0]
    col_p = mp[:, 1]
    b_j = np.vdot(col_p, col_m) / np.vdot(col_p, col_p)
    resid = np.linalg.norm(col_m - b_j * col_p) / np.linalg.norm(col_m)
    if resid > 1e-6:
        warnings.warn(f"column alignment residual {resid:.2e} at z_j={z_j}; "
                      "eigenvalue may be unconverged")
    w_j = np.angle(z_j)
    h = 1e-4
    nodes = np.exp(1j * (w_j + h * np.array([-2.0, -1.0, 1.0, 2.0])))
    vals = s11_continued(q, nodes, exclusion_radius)
    ds11_dw = (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * h)
    s11p = ds11_dw / (1j * z_j)
    if abs(s11p) < 1e-10:
        raise NonSimpleZeroError(f"non-simple zero of s11 at {z_j}")
    c_j = complex(b_j / s11p)
    phase_defect = abs(np.angle(c_j / (1j * z_j)))
    if phase_defect > 1e-3:
        warnings.warn(f"norming constant at {z_j} violates arg(c) = arg(i z) "
                      f"by {phase_defect:.2e}; reporting the raw value")
    return c_j


def trace_formula_eval(spectrum: DiscreteSpectrum, r_table: ReflectionTable,
                       z: complex) -> complex:
    """Product-integral reconstruction of s11 at Im z > 0.

    s11(z) = prod_j (z - z_j)/(z - conj(z_j)) * exp(-i * int_R v(s)/(s-z) ds)
    with v = -log(1 - |r|^2)/(2*pi) taken from the tabulated grid; the tails
    beyond the grid use the |r| ~ z^-2 decay model built into the density.
    """
    z = complex(z)
    if z.imag < 0.05:
        raise EvalTooNearCutError(
            f"evaluation too near the cut: Im z = {z.imag} < 0.05")
    prod = 1.0 + 0.0j
    for zj in spectrum.eigenvalues:
        prod *= (z - zj) / (z - np.conj(zj))
    dens = r_table.density()
    return prod * np.exp(-1j * dens.cauchy_real_line(z))


# ---------------------------------------------------------------------------
# file interfaces
# ---------------------------------------------------------------------------

def load_profile_csv(path) -> PotentialField:
    """Read the profile file "x,re_q,im_q" (header required, uniform x)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["x", "re_q", "im_q"]:
        raise ConfigError(f"{path}: expected header 'x,re_q,im_q'")
    try:
        data = np.array([[float(c) for c in row] for row in rows[1:]])
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed numeric row ({exc})") from exc
    if data.shape[0] < 3:
        raise ConfigError(f"{path}: need at least 3 samples")
    x = data[:, 0]
    dx = x[1] - x[0]
    steps = np.diff(x)
    bad = np.nonzero(np.abs(steps - dx) > 1e-9 * max(1.0, abs(dx)))[0]
    if bad.size:
        raise ConfigError(
            f"{path}: non-uniform spacing at row {bad[0] + 2} "
            f"(step {steps[bad[0]]:.12g} vs {dx:.12g})")
    if abs(x[0] + x[-1]) > 1e-9:
        raise ConfigError(f"{path}: domain [{x[0]}, {x[-1]}] is not symmetric")
    grid = ComplexGrid1D(x0=float(x[0]), dx=float(dx),
                         values=data[:, 1] + 1j * data[:, 2])
    return PotentialField(grid=grid, half_width=float(-x[0]),
                          background_tolerance=1e-6)


def save_profile_csv(path, field: PotentialField) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "re_q", "im_q"])
        for xv, qv in zip(field.grid.x, field.grid.values):
            writer.writerow([f"{xv:.12g}", f"{qv.real:.16g}", f"{qv.imag:.16g}"])


def save_scattering_json(path, table: ReflectionTable,
                         spectrum: DiscreteSpectrum) -> None:
    """Write {grid, s11, s21, r, eigenvalues, norming_constants} with complex
    numbers as [re, im] pairs."""
    def pairs(arr):
        return [[float(v.real), float(v.imag)] for v in np.asarray(arr)]

    payload = {
        "grid": [float(v) for v in table.z_grid],
        "s11": pairs(table.s11),
        "s21": pairs(table.s21),
        "r": pairs(table.r),
        "eigenvalues": pairs(spectrum.eigenvalues),
        "norming_constants": pairs(spectrum.norming_constants),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def load_scattering_json(path) -> tuple[ReflectionTable, DiscreteSpectrum]:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        z = np.asarray(payload["grid"], dtype=float)
        s11 = np.asarray([complex(a, b) for a, b in payload["s11"]])
        s21 = np.asarray([complex(a, b) for a, b in payload["s21"]])
        eig = tuple(complex(a, b) for a, b in payload["eigenvalues"])
        cst = tuple(complex(a, b) for a, b in payload["norming_constants"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: invalid scattering file ({exc})") from exc
    return ReflectionTable(z, s11, s21), DiscreteSpectrum(eig, cst)
