"""Reflection density v(s) = -log(1 - |r(s)|^2) / (2*pi) on the real line.

The density is assembled from a tabulated reflection coefficient with three
asymptotic models stitched in:

* |s| below the innermost samples:  r = O(s^2), so v ~ s^4;
* |s| beyond the outermost samples: r ~ s^-2, so v ~ s^-4;
* windows around s = +-1: s11 has simple poles there, so v has an integrable
  logarithmic peak.  Inside the window the smooth combination
  u(s) = v(s) + log|s -+ 1| / pi is interpolated instead and the log is
  subtracted back, which remains valid inside the exclusion sliver where the
  table has no samples.

Between those regions |r|^2 is interpolated with a shape-preserving cubic
(PCHIP), which cannot overshoot the data and therefore keeps |r|^2 < 1.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ReflectionBoundError
from .numerics import QuadratureSpec, quadrature_nodes

BRANCH_WINDOW = 0.05  # half width of the log-model windows at s = +-1


class VDensity:
    """Callable density built from (z_grid, |r|^2) samples."""

    def __init__(self, z_grid, abs_r_sq, window: float = BRANCH_WINDOW):
        z = np.asarray(z_grid, dtype=float)
        rho = np.asarray(abs_r_sq, dtype=float)
        order = np.argsort(z)
        z, rho = z[order], rho[order]
        if np.any(rho >= 1.0):
            worst = z[np.argmax(rho)]
            raise ReflectionBoundError(
                f"reflection modulus violation: |r(z={worst})| >= 1")
        self.window = float(window)
        self._sides = []
        for sel in (z < 0, z > 0):
            if np.count_nonzero(sel) >= 4:
                self._sides.append(self._build_side(z[sel], rho[sel]))
        if not self._sides:
            raise ValueError("density needs at least 4 samples on one side of 0")

    def _build_side(self, z, rho):
        v = -np.log1p(-rho) / (2.0 * np.pi)
        side = {
            "zmin": z[0], "zmax": z[-1],
            "v_in": v[0] if z[0] > 0 else v[-1],
            "v_out": v[-1] if z[0] > 0 else v[0],
            "interp": PchipInterpolator(z, rho, extrapolate=False),
            "windows": {},
        }
        for p in (-1.0, 1.0):
            lo, hi = p - self.window, p + self.window
            sel = (z >= lo) & (z <= hi)
            if np.count_nonzero(sel & (z < p)) >= 3 and \
               np.count_nonzero(sel & (z > p)) >= 3:
                u = v[sel] + np.log(np.abs(z[sel] - p)) / np.pi
                side["windows"][p] = PchipInterpolator(z[sel], u,
                                                       extrapolate=True)
        return side

    def _side_for(self, s: float):
        for side in self._sides:
            if (side["zmin"] < 0) == (s < 0):
                return side
        return None

    def __call__(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty_like(s_arr)
        for i, sv in enumerate(s_arr):
            out[i] = self._eval_one(sv)
        return float(out[0]) if np.isscalar(s) or np.asarray(s).ndim == 0 else out

    def _eval_one(self, s: float) -> float:
        if s == 0.0:
            return 0.0
        side = self._side_for(s)
        if side is None:
            return 0.0
        for p, uinterp in side["windows"].items():
            if abs(s - p) <= self.window:
                return max(float(uinterp(s)) - np.log(abs(s - p)) / np.pi, 0.0)
        zmin, zmax = side["zmin"], side["zmax"]
        if zmin <= s <= zmax:
            rho = float(side["interp"](s))
            return max(-np.log1p(-rho) / (2.0 * np.pi), 0.0)
        # inner gap around 0: v ~ s^4; outer tail: v ~ s^-4
        if abs(s) < min(abs(zmin), abs(zmax)):
            edge = zmin if s > 0 else zmax
            return side["v_in"] * float((s / edge) ** 4)
        edge = zmax if s > 0 else zmin
        return side["v_out"] * float((edge / s) ** 4)

    # -- integration helpers -------------------------------------------------

    def breakpoints(self, lo: float, hi: float):
        """Interior points of (lo, hi) where the evaluation rule changes."""
        pts = set()
        for side in self._sides:
            for p in (side["zmin"], side["zmax"]):
                pts.add(p)
            for p in side["windows"]:
                pts.add(p - self.window)
                pts.add(p)
                pts.add(p + self.window)
        pts.add(0.0)
        return sorted(p for p in pts if lo < p < hi)

    def cauchy_real_line(self, z: complex,
                         spec: QuadratureSpec | None = None) -> complex:
        """int_R v(s)/(s - z) ds for Im z > 0, tails included via the decay
        model."""
        if spec is None:
            spec = QuadratureSpec(panels=6, points_per_panel=20)
        z = complex(z)
        zmin = min(side["zmin"] for side in self._sides)
        zmax = max(side["zmax"] for side in self._sides)
        edges = [zmin] + self.breakpoints(zmin, zmax) + [zmax]
        total = 0.0 + 0.0j
        for a, b in zip(edges[:-1], edges[1:]):
            grade = None
            for side in self._sides:
                for p in side["windows"]:
                    if abs(a - p) < 1e-12:
                        grade = a
                    if abs(b - p) < 1e-12:
                        grade = b
            s, w = quadrature_nodes(a, b, spec, grade_toward=grade)
            total += np.sum(w * self.__call__(s) / (s - z))
        # tails: v ~ v_out (edge/s)^4 beyond the table
        for sgn, edge in ((1.0, zmax), (-1.0, zmin)):
            side = self._side_for(sgn)
            if side is None:
                continue
            v_edge = side["v_out"]

            def tail(u):
                s = edge + sgn * u / (1.0 - u)
                return v_edge * (edge / s) ** 4 / (s - z) * sgn / (1.0 - u) ** 2

            s_u, w_u = quadrature_nodes(0.0, 1.0 - 1e-8, spec,
                                        grade_toward=1.0 - 1e-8)
            total += np.sum(w_u * np.asarray([tail(u) for u in s_u]))
        return complex(total)
