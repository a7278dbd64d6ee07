"""Monte Carlo versus analytic comparison reports.

The analytic integral fixes the correlator only up to an overall constant;
:func:`compare_grids` calibrates that constant on a chosen gamma subset,
then scores every grid point by its pull ``|k_mc - C k_an| / sigma`` and
the whole grid by the normalized RMS deviation
``sqrt(sum |k_mc - C k_an|^2 / sum |k_mc|^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .correlator import CorrelatorGrid
from .kernel import CalibrationResult, calibrate_constant

__all__ = ["ComparisonReport", "compare_grids", "check_smoothing_compatible",
           "render_report"]


@dataclass(frozen=True)
class ComparisonReport:
    """Per-point table plus summary statistics of an MC/analytic comparison."""

    calibration: CalibrationResult
    epsilon_over_d: np.ndarray
    gamma_over_d: np.ndarray
    mc_values: np.ndarray
    analytic_values: np.ndarray  # already scaled by the calibration constant
    std_err: np.ndarray
    pulls: np.ndarray
    normalized_rms: float
    max_pull: float
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        rows = []
        for i, r in enumerate(self.epsilon_over_d):
            for j, g in enumerate(self.gamma_over_d):
                rows.append({
                    "epsilon_over_d": float(r),
                    "gamma_over_d": float(g),
                    "mc_re": float(self.mc_values[i, j].real),
                    "mc_im": float(self.mc_values[i, j].imag),
                    "analytic_re": float(self.analytic_values[i, j].real),
                    "analytic_im": float(self.analytic_values[i, j].imag),
                    "std_err": float(self.std_err[i, j]),
                    "pull": float(self.pulls[i, j]),
                })
        return {
            "calibration_constant": self.calibration.c,
            "calibration_error": self.calibration.c_err,
            "calibration_gammas": list(self.calibration.gammas),
            "normalized_rms": self.normalized_rms,
            "max_pull": self.max_pull,
            "rows": rows,
            "meta": self.meta,
        }


def check_smoothing_compatible(mc_meta, analytic_meta, tol=1e-9):
    """Hard guard: the analytic regulator must equal 2 * eta/d of the MC run."""
    eta_over_d = mc_meta.get("eta_over_d")
    regulator = analytic_meta.get("regulator")
    if eta_over_d is None or regulator is None:
        raise ValueError("missing smoothing metadata (eta_over_d / regulator)")
    expected = 2.0 * float(eta_over_d)
    if abs(float(regulator) - expected) > tol:
        raise ValueError(
            f"smoothing mismatch: analytic regulator {regulator} != "
            f"2 * eta_over_d = {expected}"
        )


def compare_grids(mc: CorrelatorGrid, analytic_values, analytic_errors=None,
                  calibration_gammas=None, calibration=None, rtol=1e-6,
                  damping="radial"):
    """Calibrate and score an MC grid against analytic values on the same grid.

    ``analytic_values`` must be shaped like ``mc.values`` (branch convention
    already matched).  The constant is fitted on ``calibration_gammas``
    (default: gamma = 1 when present, else all) unless an explicit
    :class:`CalibrationResult` is supplied.  Pulls are computed only where
    ``std_err > 0``.
    """
    analytic_values = np.asarray(analytic_values, dtype=complex)
    if analytic_values.shape != mc.values.shape:
        raise ValueError(
            f"grid shape mismatch: analytic {analytic_values.shape} vs "
            f"mc {mc.values.shape}"
        )
    if calibration is None:
        if calibration_gammas is None:
            if any(np.isclose(g, 1.0) for g in mc.gamma_over_d):
                calibration_gammas = [1.0]
            else:
                calibration_gammas = list(mc.gamma_over_d)
        calibration = calibrate_constant(mc, gammas=calibration_gammas,
                                         rtol=rtol, damping=damping)
    scaled = calibration.c * analytic_values
    resid = mc.values - scaled
    ok = mc.std_err > 0
    pulls = np.zeros_like(mc.std_err)
    pulls[ok] = np.abs(resid[ok]) / mc.std_err[ok]
    denom = np.sum(np.abs(mc.values) ** 2)
    nrms = float(np.sqrt(np.sum(np.abs(resid) ** 2) / denom)) if denom > 0 else np.inf
    meta = {"analytic_errors": None if analytic_errors is None
            else np.asarray(analytic_errors).tolist()}
    return ComparisonReport(
        calibration=calibration,
        epsilon_over_d=mc.epsilon_over_d,
        gamma_over_d=mc.gamma_over_d,
        mc_values=mc.values,
        analytic_values=scaled,
        std_err=mc.std_err,
        pulls=pulls,
        normalized_rms=nrms,
        max_pull=float(pulls.max()) if pulls.size else 0.0,
        meta=meta,
    )


def render_report(report: ComparisonReport):
    """Human-readable comparison table."""
    out = [
        f"calibration constant C = {report.calibration.c:.6g} "
        f"+- {report.calibration.c_err:.2g} "
        f"(fitted on gamma = {list(report.calibration.gammas)})",
        f"normalized RMS = {100 * report.normalized_rms:.2f}%   "
        f"max pull = {report.max_pull:.2f} sigma",
        f"{'eps/d':>8} {'gamma':>7} {'mc (re, im)':>24} "
        f"{'C*analytic (re, im)':>24} {'pull':>6}",
    ]
    for i, r in enumerate(report.epsilon_over_d):
        for j, g in enumerate(report.gamma_over_d):
            m = report.mc_values[i, j]
            a = report.analytic_values[i, j]
            out.append(
                f"{r:8.3f} {g:7.3f} ({m.real:11.4g},{m.imag:11.4g}) "
                f"({a.real:11.4g},{a.imag:11.4g}) {report.pulls[i, j]:6.2f}"
            )
    return "\n".join(out)
