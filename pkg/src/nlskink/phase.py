"""Ray phase function, stationary points and signature tables.

Along a ray x = 2*xi*t the oscillatory factors of the scattering transform
are exp(+-2*i*t*theta(z; xi)) with

    theta(z) = zeta(z) * (x/t - 2*lambda(z)),
    lambda = (z + 1/z)/2,   zeta = (z - 1/z)/2,

so theta here is always the phase *per unit time*.  For |xi| > 1 the
derivative theta' has two real zeros xi1, xi2 with xi1*xi2 = 1; they carry
the whole t^(-1/2) radiation contribution.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, PhaseOriginError, RegionError

COALESCENCE_MARGIN = 1e-9  # refuse |xi| <= 1 + margin (stationary points merge)


@dataclass(frozen=True)
class RayCoordinate:
    """A space-time ray point (x, t) with its ray parameter xi = x/(2t)."""

    xi: float
    x: float
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("ray time must be positive")
        if abs(self.x - 2.0 * self.xi * self.t) > 1e-12 * max(1.0, abs(self.x)):
            raise ValueError(
                f"inconsistent ray: xi={self.xi}, x={self.x}, t={self.t}")

    @classmethod
    def from_xi_t(cls, xi: float, t: float) -> "RayCoordinate":
        return cls(xi=float(xi), x=2.0 * float(xi) * float(t), t=float(t))


@dataclass(frozen=True)
class StationaryPair:
    """The two real stationary points of theta and the curvatures there."""

    xi1: float
    xi2: float
    theta_pp_1: float
    theta_pp_2: float
    nu: float

    def __post_init__(self):
        if not (self.theta_pp_1 > 0 and self.theta_pp_2 < 0):
            raise GeometryError(
                "curvature signs violated: expected theta''(xi1) > 0 > theta''(xi2)")


def theta(z: complex, ray: RayCoordinate | float) -> complex:
    """Phase per unit time, theta = (x/t)(z - 1/z)/2 - (z^2 - z^-2)/2."""
    xi = ray.xi if isinstance(ray, RayCoordinate) else float(ray)
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise PhaseOriginError("phase singular at origin")
    val = xi * (z - 1.0 / z) - 0.5 * (z**2 - z**-2)
    return complex(val) if val.ndim == 0 else val


def theta_derivatives(z: complex, ray: RayCoordinate | float) -> tuple[complex, complex]:
    """(theta', theta'') from 2*theta' = (x/t)(1+z^-2) - 2z - 2z^-3 and its
    direct z-derivative 2*theta'' = -2(x/t) z^-3 - 2 + 6 z^-4."""
    xi = ray.xi if isinstance(ray, RayCoordinate) else float(ray)
    z = complex(z)
    if z == 0:
        raise PhaseOriginError("phase singular at origin")
    xt = 2.0 * xi
    d1 = 0.5 * (xt * (1.0 + z**-2) - 2.0 * z - 2.0 * z**-3)
    d2 = 0.5 * (-2.0 * xt * z**-3 - 2.0 + 6.0 * z**-4)
    return d1, d2


def stationary_points(xi: float) -> StationaryPair:
    """Both real zeros of theta' for |xi| > 1, ordered so that |xi1| < 1 < |xi2|.

    For xi > 1 both points are positive; for xi < -1 both are negative.
    Raises :class:`RegionError` inside (or at the edge of) the solitonic
    region where the points coalesce.
    """
    xi = float(xi)
    if abs(xi) <= 1.0 + COALESCENCE_MARGIN:
        raise RegionError(
            f"xi={xi} inside solitonic region; use the Cuccagna-Jenkins regime")
    nu = 0.5 * (abs(xi) + np.sqrt(xi**2 + 8.0))
    root = np.sqrt(nu**2 - 4.0)
    x1 = 0.5 * abs(nu - root)
    x2 = 0.5 * abs(nu + root)
    if xi < 0:
        x1, x2 = -x1, -x2
    _, d2_1 = theta_derivatives(x1, xi)
    _, d2_2 = theta_derivatives(x2, xi)
    return StationaryPair(xi1=float(x1), xi2=float(x2),
                          theta_pp_1=float(d2_1.real), theta_pp_2=float(d2_2.real),
                          nu=float(nu))


def signature_sample(z: complex, xi: float) -> int:
    """Sign of Re(2*i*theta(z)) per unit time; values below 1e-14 map to 0."""
    val = (2j * theta(complex(z), float(xi))).real
    if abs(val) < 1e-14:
        return 0
    return 1 if val > 0 else -1


def export_signature_grid(path, xi: float, re_range=(-3.0, 3.0),
                          im_range=(-2.0, 2.0), n_re: int = 121,
                          n_im: int = 81) -> None:
    """Write the CSV "re_z,im_z,sign" over a rectangular lattice.

    Lattice points on the coordinate axes that would hit z = 0 are skipped.
    """
    res = np.linspace(*re_range, n_re)
    ims = np.linspace(*im_range, n_im)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re_z", "im_z", "sign"])
        for b in ims:
            for a in res:
                if a == 0.0 and b == 0.0:
                    continue
                writer.writerow([f"{a:.12g}", f"{b:.12g}",
                                 signature_sample(complex(a, b), xi)])
