"""Least-squares growth-model fits used by the kernel and sharpness harnesses."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["GrowthFit", "fit_power_model", "fit_semilog_model"]


@dataclass(frozen=True)
class GrowthFit:
    """Slope/intercept/R^2 of a growth model over a window of scales.

    ``model`` is "power" (log y vs log x), "log" (y vs log x), or
    "loglog" (y vs log log x).
    """

    model: str
    slope: float
    intercept: float
    r_squared: float
    window: tuple
    points: int = 0

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "window": list(self.window),
            "points": self.points,
        }


def _ols(u: np.ndarray, v: np.ndarray, model: str, window) -> GrowthFit:
    if u.size < 2:
        raise ValueError("growth fit needs at least 2 points")
    slope, intercept = np.polyfit(u, v, 1)
    resid = v - (slope * u + intercept)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(v - v.mean(), v - v.mean()))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return GrowthFit(model=model, slope=float(slope), intercept=float(intercept),
                     r_squared=r2, window=tuple(window), points=int(u.size))


def fit_power_model(x, y, drop_below: float = 0.0) -> GrowthFit:
    """Fit y ~ C x^s by least squares on log-log axes.

    Points with |y| <= drop_below are discarded (exact cases where the
    residual has hit rounding noise).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = np.abs(y) > drop_below
    if mask.sum() < 2:
        raise ValueError("too few points above the noise floor for a power fit")
    return _ols(np.log(x[mask]), np.log(np.abs(y[mask])), "power",
                (float(x.min()), float(x.max())))


def fit_semilog_model(x, y) -> GrowthFit:
    """Fit y ~ a log x + b by least squares."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return _ols(np.log(x), y, "log", (float(x.min()), float(x.max())))
