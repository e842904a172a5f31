"""Shared numerical kernels.

Everything here is a pure function; no state is kept between calls.  The
Cauchy-type quadrature implements the endpoint regularisation needed by the
conjugation factor of the ray asymptotics: when the pole sits exactly at an
interval endpoint the logarithmic divergence of ``int f(s)/(s-z) ds`` is
cancelled against an explicit ``f(e)*log(z-e)`` counterterm and the finite
upper-half-plane limit is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import loggamma as _loggamma

from .errors import (
    DegenerateFitError,
    GammaPoleError,
    InteriorPoleError,
    NumericalBlowupError,
    QuadratureError,
)


@dataclass(frozen=True)
class ComplexGrid1D:
    """Uniformly sampled complex-valued function of one real variable.

    Positions are always computed as ``x0 + i*dx`` from the index; they are
    never accumulated by summation, so there is no drift for long grids.
    """

    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if not self.dx > 0:
            raise ValueError(f"grid spacing must be positive, got {self.dx}")
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("grid values must be a nonempty 1-d sequence")

    def __len__(self):
        return self.values.size

    def position(self, i):
        return self.x0 + np.asarray(i) * self.dx

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.values.size)


@dataclass(frozen=True)
class QuadratureSpec:
    """Panelised quadrature rule selection.

    rule is either ``"gauss-legendre"`` (composite Gauss-Legendre, default)
    or ``"tanh-sinh"``.  ``singularity_subtraction`` must be enabled for
    poles sitting exactly at an interval endpoint.
    """

    rule: str = "gauss-legendre"
    panels: int = 8
    points_per_panel: int = 24
    singularity_subtraction: bool = True

    def __post_init__(self):
        if self.rule not in ("gauss-legendre", "tanh-sinh"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.panels < 1 or self.points_per_panel < 1:
            raise ValueError("panels and points_per_panel must be positive")
        if self.panels * self.points_per_panel < 8:
            raise ValueError("panels * points_per_panel must be at least 8")


def _base_nodes(spec: QuadratureSpec):
    """Nodes and weights on (-1, 1) for one panel."""
    n = spec.points_per_panel
    if spec.rule == "gauss-legendre":
        return np.polynomial.legendre.leggauss(n)
    # tanh-sinh: symmetric double-exponential nodes, n points total
    m = max(n // 2, 1)
    h = 3.2 / m
    j = np.arange(-m, m + 1)
    u = 0.5 * np.pi * np.sinh(j * h)
    x = np.tanh(u)
    w = h * 0.5 * np.pi * np.cosh(j * h) / np.cosh(u) ** 2
    return x, w


def _panel_edges(a: float, b: float, n: int, grade_toward: float | None = None,
                 ratio: float = 2.0) -> np.ndarray:
    """Panel boundaries on [a, b]; geometrically graded toward one endpoint."""
    if grade_toward is None or n == 1:
        return np.linspace(a, b, n + 1)
    weights = ratio ** np.arange(n, dtype=float)
    widths = weights / weights.sum() * (b - a)
    if abs(grade_toward - a) < abs(grade_toward - b):
        widths = widths[::-1]
    return a + np.concatenate([[0.0], np.cumsum(widths)])


def _quad_panels(f: Callable, a: float, b: float, spec: QuadratureSpec,
                 grade_toward: float | None = None) -> complex:
    xn, wn = _base_nodes(spec)
    edges = _panel_edges(a, b, spec.panels, grade_toward)
    total = 0.0 + 0.0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        s = mid + half * xn
        total += half * np.sum(wn * np.asarray([f(si) for si in s]))
    return total


def _quad_vec(fvals: np.ndarray, wvals: np.ndarray) -> complex:
    return complex(np.sum(wvals * fvals))


def quadrature_nodes(a: float, b: float, spec: QuadratureSpec,
                     grade_toward: float | None = None):
    """All nodes and weights of the composite rule on [a, b] in one array."""
    xn, wn = _base_nodes(spec)
    edges = _panel_edges(a, b, spec.panels, grade_toward)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    s = (mid[:, None] + half[:, None] * xn[None, :]).ravel()
    w = (half[:, None] * wn[None, :]).ravel()
    return s, w


_TAIL_SPLIT = 1.0  # subtraction window length used when the interval is infinite


def integrate_linear_ode(coefficient: Callable[[float], np.ndarray],
                         y0: np.ndarray, x_start: float, x_end: float,
                         n_steps: int) -> np.ndarray:
    """Integrate dY/dx = A(x) Y with classical fixed-step RK4.

    ``coefficient`` maps x to a 2x2 complex matrix (leading batch dimensions
    are allowed and broadcast against ``y0``).  Backward integration
    (x_start > x_end) is supported with a negative step.  Raises
    :class:`NumericalBlowupError` carrying the step index if the state stops
    being finite.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    y = np.array(y0, dtype=complex)
    h = (x_end - x_start) / n_steps
    for k in range(n_steps):
        x = x_start + k * h
        k1 = coefficient(x) @ y
        k2 = coefficient(x + 0.5 * h) @ (y + 0.5 * h * k1)
        k3 = coefficient(x + 0.5 * h) @ (y + 0.5 * h * k2)
        k4 = coefficient(x + h) @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(y).all():
            raise NumericalBlowupError(
                f"numerical blow-up in linear ODE at step {k}", step=k)
    return y


def integrate_with_log_endpoint(f: Callable[[float], complex],
                                interval: tuple[float, float],
                                pole: complex,
                                spec: QuadratureSpec | None = None) -> complex:
    """Cauchy-type integral ``int_a^b f(s)/(s - z) ds``.

    For ``z`` off the closed interval this is plain (graded) panel
    quadrature; the closed form ``f * log((b-z)/(a-z))`` with principal
    branches is exact for constant f since the segment never crosses a
    branch cut when Im z != 0.

    For ``z`` equal to an endpoint ``e`` the integral diverges
    logarithmically; the conjugation factor of the asymptotics pairs it with
    the counterterm ``c_e * f(e) * log(z - e)`` (c = +1 at the left endpoint,
    -1 at the right) and this routine returns the finite upper-half-plane
    limit of the pair:

        z = a:  int (f(s)-f(a))/(s-a) ds + f(a) * (log(b-a) + i*pi)
        z = b:  int (f(s)-f(b))/(s-b) ds - f(b) * log(b-a)

    ``b = inf`` is allowed (mapped by s = a' + u/(1-u)); f must then decay at
    least like s^-2.  A pole strictly inside (a, b) raises
    :class:`InteriorPoleError`.
    """
    if spec is None:
        spec = QuadratureSpec()
    a, b = interval
    z = complex(pole)
    infinite = np.isinf(b)
    if not a < b:
        raise ValueError("interval must satisfy a < b")

    at_a = z == a
    at_b = (not infinite) and z == b
    if not (at_a or at_b):
        on_axis = z.imag == 0.0
        inside = on_axis and (a < z.real < (np.inf if infinite else b))
        if inside:
            raise InteriorPoleError(
                f"interior pole unsupported: z={z} lies inside ({a}, {b})")
        return _cauchy_plain(f, a, b, z, spec, infinite)

    if not spec.singularity_subtraction:
        raise InteriorPoleError(
            "pole at an interval endpoint requires singularity_subtraction")
    if at_b:
        fb = complex(f(b))
        s, w = quadrature_nodes(a, b, spec, grade_toward=b)
        fs = np.asarray([f(si) for si in s], dtype=complex)
        val = _quad_vec((fs - fb) / (s - b), w) - fb * np.log(b - a)
        return val
    # pole at the left endpoint a
    fa = complex(f(a))
    if infinite:
        m = a + _TAIL_SPLIT
        s, w = quadrature_nodes(a, m, spec, grade_toward=a)
        fs = np.asarray([f(si) for si in s], dtype=complex)
        val = _quad_vec((fs - fa) / (s - a), w) + fa * 1j * np.pi
        val += _cauchy_plain(f, m, np.inf, a, spec, True)
        return val
    s, w = quadrature_nodes(a, b, spec, grade_toward=a)
    fs = np.asarray([f(si) for si in s], dtype=complex)
    return _quad_vec((fs - fa) / (s - a), w) + fa * (np.log(b - a) + 1j * np.pi)


def _cauchy_plain(f, a, b, z, spec, infinite) -> complex:
    """Plain quadrature of f(s)/(s-z) with the pole off the closed interval."""
    if infinite:
        # map s = a + u/(1-u); the last panel edge stops short of u = 1 and
        # the remainder is negligible for f decaying like s^-2 or faster.
        def g(u):
            s = a + u / (1.0 - u)
            return f(s) / ((s - z) * (1.0 - u) ** 2)

        val = _quad_panels(g, 0.0, 1.0 - 1e-8, spec, grade_toward=1.0 - 1e-8)
        if not np.isfinite(val):
            raise QuadratureError("tail integration failure on infinite interval")
        return val
    grade = None
    if z.imag == 0.0 and min(abs(z.real - a), abs(z.real - b)) < (b - a):
        grade = a if abs(z.real - a) < abs(z.real - b) else b
    val = _quad_panels(lambda s: f(s) / (s - z), a, b, spec, grade_toward=grade)
    if not np.isfinite(val):
        raise QuadratureError("quadrature failure on finite interval")
    return val


def log_gamma(w: complex) -> complex:
    """Principal-branch log Gamma(w); relative accuracy ~1e-14 for |w| <= 20.

    Raises :class:`GammaPoleError` at the poles w = 0, -1, -2, ...
    """
    w = complex(w)
    if w.imag == 0.0 and w.real <= 0.0 and w.real == round(w.real):
        raise GammaPoleError(f"gamma pole at w={w}")
    return complex(_loggamma(w))


def fit_power_law(samples: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares fit of e ~ amplitude * t^(-exponent).

    Returns (amplitude, exponent) with the sign convention that decaying data
    yields a positive exponent.  Raises :class:`DegenerateFitError` for fewer
    than two samples or any nonpositive coordinate.
    """
    pts = [(float(t), float(e)) for t, e in samples]
    if len(pts) < 2:
        raise DegenerateFitError("degenerate fit input: need at least 2 samples")
    if any(t <= 0 or e <= 0 for t, e in pts):
        raise DegenerateFitError("degenerate fit input: nonpositive value")
    log_t = np.log([t for t, _ in pts])
    log_e = np.log([e for _, e in pts])
    slope, intercept = np.polyfit(log_t, log_e, 1)
    return float(np.exp(intercept)), float(-slope)
