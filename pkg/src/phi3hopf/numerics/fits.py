"""Small fitting helpers for divergence diagnostics."""

from __future__ import annotations

import numpy as np


def linear_log_fit(cutoffs, values) -> dict:
    """Fit value = a + b*ln(cutoff); returns slope, intercept and r^2."""
    x = np.log(np.asarray(cutoffs, dtype=float))
    y = np.asarray(values, dtype=float)
    b, a = np.polyfit(x, y, 1)
    pred = a + b * x
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(b), "intercept": float(a), "r2": r2}


def loglog_slope(radii, magnitudes) -> dict:
    """Fit |f| ~ c * r^slope on log-log axes."""
    x = np.log(np.asarray(radii, dtype=float))
    y = np.log(np.asarray(magnitudes, dtype=float))
    b, a = np.polyfit(x, y, 1)
    pred = a + b * x
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(b), "intercept": float(a), "r2": r2}
