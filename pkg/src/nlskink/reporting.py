"""Comparison reports: PDE reference vs asymptotic profile along rays.

The report path writes one delimited table and one rendered figure per ray,
plus a machine-readable JSON summary with the fitted decay exponents.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .errors import DegenerateFitError, KeyMismatchError  # noqa: E402
from .numerics import fit_power_law  # noqa: E402

# acceptance thresholds for the pass flags
P_LEADING_RANGE = (0.35, 0.65)
P_CORRECTED_MIN = 0.60


@dataclass
class RayComparison:
    """Per-ray table of PDE vs asymptotics with fitted decay exponents."""

    xi: float
    t: np.ndarray
    q_pde: np.ndarray
    q_leading: np.ndarray
    q_corrected: np.ndarray
    err_leading: np.ndarray = field(init=False)
    err_corrected: np.ndarray = field(init=False)
    p_leading: float = field(init=False, default=float("nan"))
    p_corrected: float = field(init=False, default=float("nan"))
    exact_match: bool = field(init=False, default=False)
    passed: bool = field(init=False, default=False)

    def __post_init__(self):
        self.err_leading = np.abs(self.q_pde - self.q_leading)
        self.err_corrected = np.abs(self.q_pde - self.q_corrected)

    def fit(self, window: str = "upper_half"):
        """Fit decay exponents on the chosen window of t values."""
        sel = slice(None)
        if window == "upper_half":
            sel = slice(len(self.t) // 2, None)
        elif window != "all":
            raise ValueError(f"unknown fit window {window!r}")
        try:
            _, self.p_leading = fit_power_law(
                list(zip(self.t[sel], self.err_leading[sel])))
            _, self.p_corrected = fit_power_law(
                list(zip(self.t[sel], self.err_corrected[sel])))
        except DegenerateFitError:
            self.exact_match = bool(np.all(self.err_corrected == 0.0))
            self.p_leading = float("nan")
            self.p_corrected = float("nan")
            self.passed = self.exact_match
            return self
        lo, hi = P_LEADING_RANGE
        self.passed = (lo <= self.p_leading <= hi
                       and self.p_corrected >= P_CORRECTED_MIN
                       and bool(np.all(self.err_corrected < self.err_leading)))
        return self

    @property
    def max_err_leading(self) -> float:
        return float(np.max(self.err_leading))

    @property
    def max_err_corrected(self) -> float:
        return float(np.max(self.err_corrected))

    def summary(self) -> dict:
        out = {
            "xi": self.xi,
            "p_leading": self.p_leading,
            "p_corrected": self.p_corrected,
            "max_err_corrected": self.max_err_corrected,
            "pass": bool(self.passed),
        }
        if self.exact_match:
            out["flag"] = "exact match"
        return out


def build_comparison(xi, t_ray, q_ray, t_asy, q_leading, q_corrected,
                     window: str = "upper_half") -> RayComparison:
    """Join the two tables on their t keys and fit the error decay."""
    t_ray = np.asarray(t_ray, dtype=float)
    t_asy = np.asarray(t_asy, dtype=float)
    key_r = {round(float(t), 9) for t in t_ray}
    key_a = {round(float(t), 9) for t in t_asy}
    if key_r != key_a:
        missing = sorted(key_r ^ key_a)
        raise KeyMismatchError(
            f"xi={xi}: ray and asymptotics tables disagree on t keys; "
            f"unmatched: {missing}")
    order_r = np.argsort(t_ray)
    order_a = np.argsort(t_asy)
    comp = RayComparison(
        xi=float(xi), t=t_ray[order_r], q_pde=np.asarray(q_ray)[order_r],
        q_leading=np.asarray(q_leading)[order_a],
        q_corrected=np.asarray(q_corrected)[order_a])
    return comp.fit(window)


def write_comparison_csv(path, comp: RayComparison) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "re_q_pde", "im_q_pde", "re_q_asy_leading",
                         "im_q_asy_leading", "re_q_asy_corrected",
                         "im_q_asy_corrected", "err_leading", "err_corrected"])
        for i, t in enumerate(comp.t):
            writer.writerow([
                f"{t:.12g}",
                f"{comp.q_pde[i].real:.16g}", f"{comp.q_pde[i].imag:.16g}",
                f"{comp.q_leading[i].real:.16g}", f"{comp.q_leading[i].imag:.16g}",
                f"{comp.q_corrected[i].real:.16g}",
                f"{comp.q_corrected[i].imag:.16g}",
                f"{comp.err_leading[i]:.16g}", f"{comp.err_corrected[i]:.16g}"])


def render_comparison_figure(path, comp: RayComparison) -> None:
    """Two-panel figure: log-log error decay and the field along the ray."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.loglog(comp.t, comp.err_leading, "o-", label="leading order")
    ax1.loglog(comp.t, comp.err_corrected, "s-", label="with correction")
    for p, style in ((0.5, ":"), (0.75, "--")):
        ref = comp.err_leading[0] * (comp.t / comp.t[0]) ** (-p)
        ax1.loglog(comp.t, ref, style, color="gray", lw=0.8,
                   label=f"t^-{p:g}")
    ax1.set_xlabel("t")
    ax1.set_ylabel("|q_pde - q_asy|")
    ax1.set_title(f"xi = {comp.xi:g}: p_lead = {comp.p_leading:.2f}, "
                  f"p_corr = {comp.p_corrected:.2f}")
    ax1.legend(fontsize=8)
    ax2.plot(comp.t, np.abs(comp.q_pde), "o-", label="|q| PDE")
    ax2.plot(comp.t, np.abs(comp.q_corrected), "s--", label="|q| asymptotic")
    ax2.axhline(1.0, color="gray", lw=0.6)
    ax2.set_xlabel("t")
    ax2.set_ylabel("|q| along the ray")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_summary_json(path, comparisons) -> None:
    payload = [comp.summary() for comp in comparisons]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, allow_nan=True)
