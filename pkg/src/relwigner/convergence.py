"""Log-log slope fitting for convergence studies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPECTRAL_FLOOR = 1e-12
SPECTRAL_SLOPE = 8.0


@dataclass(frozen=True)
class SlopeReport:
    """Fitted order of accuracy over a refinement study.

    ``classification`` is ``"fitted"`` for a clean power law,
    ``"spectral"`` when the decay is faster than any moderate power (or the
    errors hit the rounding floor), and ``"slope-undefined"`` when the
    errors are not monotone in the refinement parameter.
    """

    parameter: str
    levels: list[float]
    errors: list[float]
    slope: float
    r_squared: float
    classification: str


def fit_slope(parameter: str, levels: list[float], errors: list[float]) -> SlopeReport:
    """Least-squares slope of log(error) against log(level).

    ``levels`` must be positive and strictly decreasing (refinement order);
    non-monotone errors are reported, not fitted.
    """
    if len(levels) < 3:
        raise ValueError("need at least 3 levels")
    if len(levels) != len(errors):
        raise ValueError("levels and errors must have equal length")
    lv = np.asarray(levels, dtype=float)
    er = np.asarray(errors, dtype=float)
    if (lv <= 0).any():
        raise ValueError("levels must be positive")
    if not (np.diff(lv) < 0).all():
        raise ValueError("levels must be strictly decreasing")

    if (er < SPECTRAL_FLOOR).any():
        return SlopeReport(parameter, list(lv), list(er), float("nan"), float("nan"), "spectral")
    if not (np.diff(er) < 0).all():
        return SlopeReport(
            parameter, list(lv), list(er), float("nan"), float("nan"), "slope-undefined"
        )
    logl, loge = np.log(lv), np.log(er)
    coeffs = np.polyfit(logl, loge, 1)
    fitted = np.polyval(coeffs, logl)
    ss_res = float(np.sum((loge - fitted) ** 2))
    ss_tot = float(np.sum((loge - loge.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    slope = float(coeffs[0])
    cls = "spectral" if slope > SPECTRAL_SLOPE else "fitted"
    return SlopeReport(parameter, list(lv), list(er), slope, r2, cls)
