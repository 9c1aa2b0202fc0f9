"""Gaussian-process regression, exact and with the FITC approximation.

The estimator follows the usual conventions: hyperparameters are
constructor arguments, ``fit`` caches a factorization of the training
covariance, and ``predict`` returns posterior means (optionally with
posterior variances of the latent function). A zero prior mean is
assumed throughout, so predictions revert to zero far from the data.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from sklearn.base import BaseEstimator, RegressorMixin

from .errors import NumericalError
from .kernels import (
    JITTER_REL,
    FITCStructure,
    Kernel,
    RationalQuadratic,
    SquaredExponential,
    jittered_cholesky,
)
from .optimize import maximize_log_marginal
from .validation import as_points, as_targets

LOG_2PI = float(np.log(2.0 * np.pi))

# Natural-space search boxes for marginal-likelihood optimization; inputs
# live in the unit cube, outputs are unnormalized.
DEFAULT_BOUNDS = {
    "variance": (1e-8, 1e10),
    "lengthscale": (1e-2, 1e2),
    "alpha": (1e-2, 1e4),
    "noise": (1e-12, 1e4),
}


def _dedupe_rows(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop exact duplicate input rows, keeping the first occurrence."""
    _, first = np.unique(X, axis=0, return_index=True)
    if first.shape[0] == X.shape[0]:
        return X, y
    keep = np.sort(first)
    return X[keep], y[keep]


def _theta_bounds(kernel: Kernel, bounds: dict | None, optimize_noise: bool) -> np.ndarray:
    merged = dict(DEFAULT_BOUNDS)
    if bounds:
        unknown = set(bounds) - set(DEFAULT_BOUNDS)
        if unknown:
            raise ValueError(f"unknown bound names: {sorted(unknown)}")
        merged.update(bounds)
    rows = [merged["variance"]]
    n_ls = len(kernel.theta) - 1 - (1 if isinstance(kernel, RationalQuadratic) else 0)
    rows += [merged["lengthscale"]] * n_ls
    if isinstance(kernel, RationalQuadratic):
        rows.append(merged["alpha"])
    if optimize_noise:
        rows.append(merged["noise"])
    return np.log(np.asarray(rows, dtype=float))


def optimize_hyperparameters(
    X,
    y,
    kernel: Kernel,
    noise: float,
    bounds: dict | None = None,
    n_restarts: int = 5,
    optimize_noise: bool = False,
    rng: np.random.Generator | None = None,
    maxiter: int | None = None,
) -> tuple[Kernel, float, float]:
    """Maximize the regression log marginal likelihood.

    Returns ``(kernel, noise, log_marginal)`` for the best candidate over
    all restarts. ``kernel`` supplies both the family and the starting
    point; ``noise`` is held fixed unless ``optimize_noise``.
    """
    X = as_points(X)
    y = as_targets(y, X.shape[0])
    bounds_log = _theta_bounds(kernel, bounds, optimize_noise)
    theta0 = kernel.theta
    if optimize_noise:
        theta0 = np.r_[theta0, np.log(max(noise, 1e-12))]

    def objective(theta: np.ndarray) -> float:
        if optimize_noise:
            kern, sig2 = kernel.with_theta(theta[:-1]), float(np.exp(theta[-1]))
        else:
            kern, sig2 = kernel.with_theta(theta), noise
        return _exact_log_marginal(X, y, kern, sig2)

    theta_best, value = maximize_log_marginal(
        objective, theta0, bounds_log, n_restarts=n_restarts, rng=rng, maxiter=maxiter
    )
    if optimize_noise:
        return kernel.with_theta(theta_best[:-1]), float(np.exp(theta_best[-1])), value
    return kernel.with_theta(theta_best), noise, value


def _exact_log_marginal(X, y, kernel: Kernel, noise: float) -> float:
    K = kernel(X)
    L, _ = jittered_cholesky(K + noise * np.eye(X.shape[0]), kernel.variance)
    alpha = cho_solve((L, True), y)
    return float(
        -0.5 * y @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * X.shape[0] * LOG_2PI
    )


class GPRegressor(BaseEstimator, RegressorMixin):
    """GP regression with a cached Cholesky (or FITC) factorization.

    Parameters
    ----------
    kernel : kernel object, optional
        Covariance function and initial hyperparameters. Defaults to a
        rational quadratic, which accommodates the mix of long- and
        short-lengthscale variation seen near response-surface boundaries.
    noise : float, optional
        Observation noise variance. ``None`` uses ``1e-8 * var(y)``:
        effectively noiseless, as appropriate for deterministic
        simulators, while keeping factorizations well posed.
    inducing : int or array-like, optional
        ``None`` for exact inference. An integer m selects m inducing
        points uniformly at random (seeded) from the training inputs and
        switches to the FITC approximation; an array supplies the
        inducing points directly.
    optimizer : {None, "nelder-mead"}
        ``None`` keeps the constructor hyperparameters. Otherwise fit
        maximizes the log marginal likelihood by multi-restart simplex
        search in log-space.
    n_restarts : int
        Total optimizer runs (first from ``kernel``, rest from
        log-uniform draws inside ``bounds``).
    optimize_noise : bool
        Include the noise variance in the search.
    bounds : dict, optional
        Overrides for the default search boxes, keyed by
        ``variance | lengthscale | alpha | noise``.
    random_state : int
        Seed for restart draws and inducing-point subsampling.
    """

    def __init__(
        self,
        kernel: Kernel | None = None,
        noise: float | None = None,
        inducing=None,
        optimizer: str | None = None,
        n_restarts: int = 5,
        optimize_noise: bool = False,
        bounds: dict | None = None,
        max_opt_iter: int | None = None,
        random_state: int = 0,
    ):
        self.kernel = kernel
        self.noise = noise
        self.inducing = inducing
        self.optimizer = optimizer
        self.n_restarts = n_restarts
        self.optimize_noise = optimize_noise
        self.bounds = bounds
        self.max_opt_iter = max_opt_iter
        self.random_state = random_state

    # ------------------------------------------------------------------

    def fit(self, X, y):
        X = as_points(X)
        y = as_targets(y, X.shape[0])
        X, y = _dedupe_rows(X, y)
        if X.shape[0] < 1:
            raise ValueError("training set must be nonempty")

        kernel = self.kernel
        if kernel is None:
            scale = float(np.var(y))
            kernel = RationalQuadratic(
                variance=scale if scale > 0 else 1.0, lengthscale=0.3, alpha=2.0
            )
        noise = self.noise
        if noise is None:
            noise = 1e-8 * float(np.var(y))
        if noise < 0:
            raise ValueError("noise variance must be nonnegative")

        if self.optimizer is not None:
            if self.optimizer != "nelder-mead":
                raise ValueError(f"unknown optimizer {self.optimizer!r}")
            kernel, noise, _ = optimize_hyperparameters(
                X,
                y,
                kernel,
                noise,
                bounds=self.bounds,
                n_restarts=self.n_restarts,
                optimize_noise=self.optimize_noise,
                rng=np.random.default_rng(self.random_state),
                maxiter=self.max_opt_iter,
            )

        self.X_train_ = X
        self.y_train_ = y
        self.kernel_ = kernel
        self.noise_ = float(noise)
        if self.inducing is None:
            self._fit_exact()
        else:
            self._fit_fitc()
        return self

    def _fit_exact(self):
        X, y = self.X_train_, self.y_train_
        K = self.kernel_(X)
        self.L_, self.jitter_ = jittered_cholesky(
            K + self.noise_ * np.eye(X.shape[0]), self.kernel_.variance
        )
        self.alpha_ = cho_solve((self.L_, True), y)
        self.fitc_ = None
        self._update_lml()

    def _update_lml(self):
        n = self.X_train_.shape[0]
        self.log_marginal_likelihood_value_ = float(
            -0.5 * self.y_train_ @ self.alpha_
            - np.sum(np.log(np.diag(self.L_)))
            - 0.5 * n * LOG_2PI
        )

    def _fit_fitc(self):
        X, y = self.X_train_, self.y_train_
        if isinstance(self.inducing, (int, np.integer)):
            m = int(self.inducing)
            if m < 1:
                raise ValueError("inducing count must be >= 1")
            m = min(m, X.shape[0])
            idx = np.random.default_rng(self.random_state).choice(
                X.shape[0], size=m, replace=False
            )
            Xu = X[np.sort(idx)]
        else:
            Xu = as_points(self.inducing, n_dims=X.shape[1], name="inducing")
        fitc = FITCStructure(X, Xu, self.kernel_)
        lam = fitc.diag_correction + self.noise_ + JITTER_REL * self.kernel_.variance
        P = fitc.P
        Ai = np.eye(fitc.m) + (P / lam[:, None]).T @ P
        try:
            Lai = cholesky(Ai, lower=True)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("FITC inner factorization failed") from exc
        py = P.T @ (y / lam)
        gamma = cho_solve((Lai, True), py)
        self.fitc_ = fitc
        self.lam_ = lam
        self.Lai_ = Lai
        self.gamma_ = gamma
        quad = float(y @ (y / lam) - py @ gamma)
        logdet = 2.0 * float(np.sum(np.log(np.diag(Lai)))) + float(np.sum(np.log(lam)))
        self.log_marginal_likelihood_value_ = float(
            -0.5 * quad - 0.5 * logdet - 0.5 * X.shape[0] * LOG_2PI
        )

    # ------------------------------------------------------------------

    def predict(self, X, return_var: bool = False):
        """Posterior mean (and latent variance) at the query points.

        Variances are clamped at zero; they never exceed the prior
        variance of the kernel.
        """
        self._check_fitted()
        X = as_points(X, n_dims=self.X_train_.shape[1])
        if self.fitc_ is None:
            Ks = self.kernel_(X, self.X_train_)
            mean = Ks @ self.alpha_
            if not return_var:
                return mean
            V = solve_triangular(self.L_, Ks.T, lower=True)
            var = self.kernel_.diag(X) - np.einsum("ij,ij->j", V, V)
        else:
            Bs = solve_triangular(
                self.fitc_.Luu, self.kernel_(self.fitc_.Xu, X), lower=True
            ).T
            mean = Bs @ self.gamma_
            if not return_var:
                return mean
            W = solve_triangular(self.Lai_, Bs.T, lower=True)
            var = (
                self.kernel_.diag(X)
                - np.einsum("ij,ij->i", Bs, Bs)
                + np.einsum("ij,ij->j", W, W)
            )
        return mean, np.maximum(var, 0.0)

    def log_marginal_likelihood(self) -> float:
        self._check_fitted()
        return self.log_marginal_likelihood_value_

    def add_point(self, x, y: float):
        """Extend the training set by one point, updating the cached
        factorization in place (O(n^2); exact mode only)."""
        self._check_fitted()
        if self.fitc_ is not None:
            raise NotImplementedError("incremental updates require exact mode")
        x = as_points(x, n_dims=self.X_train_.shape[1])
        if x.shape[0] != 1:
            raise ValueError("add_point takes a single input point")
        if np.any(np.all(self.X_train_ == x[0], axis=1)):
            raise ValueError("point already present in the training set")
        k_new = self.kernel_(self.X_train_, x)[:, 0]
        b = solve_triangular(self.L_, k_new, lower=True)
        d2 = self.kernel_.variance + self.noise_ + self.jitter_ - b @ b
        if d2 <= 0.0:
            raise NumericalError("incremental Cholesky update lost definiteness")
        n = self.X_train_.shape[0]
        L = np.zeros((n + 1, n + 1))
        L[:n, :n] = self.L_
        L[n, :n] = b
        L[n, n] = np.sqrt(d2)
        self.L_ = L
        self._last_update = (b, float(np.sqrt(d2)))
        self.X_train_ = np.vstack([self.X_train_, x])
        self.y_train_ = np.append(self.y_train_, float(y))
        self.alpha_ = cho_solve((self.L_, True), self.y_train_)
        self._update_lml()
        return self

    def _check_fitted(self):
        if not hasattr(self, "X_train_"):
            raise ValueError("regressor is not fitted")
