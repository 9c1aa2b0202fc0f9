"""Multi-restart simplex search over log-hyperparameters.

Model selection maximizes the log marginal likelihood with a
derivative-free Nelder-Mead search: one run from the supplied initial
point plus restarts from log-uniform draws inside the bounds. The best
point over every run (and every raw start) is returned, so the achieved
objective can never fall below the objective at any initialization.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.optimize import Bounds, minimize

from .errors import NumericalError, OptimizationError


def maximize_log_marginal(
    objective: Callable[[np.ndarray], float],
    theta_init: np.ndarray,
    bounds_log: np.ndarray,
    n_restarts: int = 5,
    rng: np.random.Generator | None = None,
    maxiter: int | None = None,
) -> tuple[np.ndarray, float]:
    """Return ``(theta_best, value_best)`` maximizing ``objective``.

    ``theta_init`` and ``bounds_log`` (shape ``(p, 2)``) live in log-space.
    ``n_restarts`` counts optimizer runs in total; the first starts from
    ``theta_init``, the rest from log-uniform draws. Evaluations that
    raise :class:`NumericalError` count as ``-inf``.
    """
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    bounds_log = np.asarray(bounds_log, dtype=float)
    lo, hi = bounds_log[:, 0], bounds_log[:, 1]
    if np.any(hi <= lo):
        raise ValueError("bounds must satisfy low < high")

    def safe(theta: np.ndarray) -> float:
        try:
            value = objective(theta)
        except NumericalError:
            return -np.inf
        return value if np.isfinite(value) else -np.inf

    starts = [np.clip(np.asarray(theta_init, dtype=float), lo, hi)]
    starts += [rng.uniform(lo, hi) for _ in range(n_restarts - 1)]

    best_theta, best_value = None, -np.inf
    for start in starts:
        f0 = safe(start)
        if f0 > best_value:
            best_theta, best_value = start, f0
        # log-space parameters: 2% resolution is ample for kernel scales,
        # and objective evaluations (a refit each) are the dominant cost
        res = minimize(
            lambda th: -safe(th),
            start,
            method="Nelder-Mead",
            bounds=Bounds(lo, hi),
            options={
                "xatol": 0.02,
                "fatol": 0.02,
                **({"maxiter": maxiter, "maxfev": maxiter} if maxiter else {}),
            },
        )
        if np.isfinite(res.fun) and -res.fun > best_value:
            best_theta, best_value = np.clip(res.x, lo, hi), -res.fun

    if best_theta is None or not np.isfinite(best_value):
        raise OptimizationError("every hyperparameter search restart failed")
    return np.asarray(best_theta, dtype=float), float(best_value)
