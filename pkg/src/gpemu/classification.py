"""Binary GP classification by expectation propagation, and the
one-versus-rest composition used for three-way boundary detection.

The likelihood is a logistic sigmoid; site updates moment-match against
it with 64-node Gauss-Hermite quadrature. The predictive step squashes
the latent Gaussian through a probit, giving the closed form
``Phi(m / sqrt(1 + v))``. Site updates run sequentially in dataset order
so refits are reproducible.

Both an exact O(n^3) path and a FITC low-rank path are provided; the
latter keeps every per-site update at O(m^2) via Sherman-Morrison
corrections of an m x m posterior kernel.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.linalg.blas import dger
from scipy.special import expit, ndtr
from sklearn.base import BaseEstimator, ClassifierMixin

from .errors import NumericalError
from .kernels import JITTER_REL, FITCStructure, Kernel, SquaredExponential
from .optimize import maximize_log_marginal
from .regression import DEFAULT_BOUNDS, LOG_2PI, _theta_bounds
from .validation import as_binary_labels, as_class_labels, as_points

_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(64)
_ONES_GH = np.ones_like(_GH_WEIGHTS)
_SQRT_PI = float(np.sqrt(np.pi))

PROB_EPS = 1e-15
CLASS_LABELS = (1, 2, 3)

# Search boxes for classifier hyperparameters: the latent function is
# squashed through a unit-scale sigmoid, so signal amplitudes far beyond
# ~30 only saturate it, and lengthscales are bounded by the unit cube.
CLASSIFIER_BOUNDS = {"variance": (1e-2, 1e3), "lengthscale": (1e-2, 1e1)}


def _logistic_moments(t: int, cav_mean: float, cav_var: float):
    """Zeroth/first/second moments of ``sigmoid(t*g) N(g; m, v)``.

    Returns ``(Z, mean, var)`` of the tilted density, or ``None`` when the
    normalizer underflows.
    """
    g = cav_mean + np.sqrt(2.0 * cav_var) * _GH_NODES
    w = _GH_WEIGHTS * expit(t * g)
    zw = float(w @ _ONES_GH)
    if zw < 1e-300:
        return None
    m1 = float(w @ g) / zw
    m2 = float(w @ (g * g)) / zw
    var = m2 - m1 * m1
    return zw / _SQRT_PI, m1, max(var, 1e-14 * cav_var)


def certainty_from_probabilities(probs) -> np.ndarray:
    """Gap between the two largest per-class probabilities of each row.

    Zero means the top two classes are tied (a point on a decision
    boundary); one means total confidence.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.ndim == 1:
        probs = probs[None, :]
    part = np.sort(probs, axis=1)
    return part[:, -1] - part[:, -2]


class _EPCore:
    """Sequential EP sweeps against a generic posterior representation."""

    def __init__(self, t, max_sweeps, tol):
        self.t = t
        self.n = t.shape[0]
        self.max_sweeps = max_sweeps
        self.tol = tol
        self.tau = np.zeros(self.n)
        self.nu = np.zeros(self.n)
        self.converged = False
        self.n_sweeps = 0
        self.n_skipped = 0

    # subclasses provide marginal(i) -> (mu_i, sigma2_i), apply_update(i,
    # dtau, dnu, tau_old), and start_sweep()

    def run(self, tau0=None, nu0=None):
        if tau0 is not None:
            self.tau = np.asarray(tau0, dtype=float).copy()
            self.nu = np.asarray(nu0, dtype=float).copy()
        for sweep in range(self.max_sweeps):
            self.start_sweep()
            tau_prev, nu_prev = self.tau.copy(), self.nu.copy()
            skipped = 0
            for i in range(self.n):
                mu_i, s2_i = self.marginal(i)
                if not np.isfinite(s2_i) or s2_i <= 0.0:
                    skipped += 1
                    continue
                tau_cav = 1.0 / s2_i - self.tau[i]
                nu_cav = mu_i / s2_i - self.nu[i]
                if tau_cav <= 0.0 or not np.isfinite(tau_cav):
                    skipped += 1
                    continue
                moments = _logistic_moments(
                    int(self.t[i]), nu_cav / tau_cav, 1.0 / tau_cav
                )
                if moments is None:
                    skipped += 1
                    continue
                _, m_hat, v_hat = moments
                tau_new = 1.0 / v_hat - tau_cav
                nu_new = m_hat / v_hat - nu_cav
                if tau_new < 0.0:
                    # logistic likelihood is log-concave so this only occurs
                    # through quadrature noise; treat as an uninformative site
                    tau_new, nu_new = 0.0, 0.0
                tau_old = self.tau[i]
                dtau, dnu = tau_new - tau_old, nu_new - self.nu[i]
                self.tau[i], self.nu[i] = tau_new, nu_new
                self.apply_update(i, dtau, dnu, tau_old)
            self.n_sweeps = sweep + 1
            self.n_skipped += skipped
            if skipped == self.n:
                raise NumericalError("EP update failed at every site in a sweep")
            delta = max(
                float(np.max(np.abs(self.tau - tau_prev))),
                float(np.max(np.abs(self.nu - nu_prev))),
            )
            if delta < self.tol:
                self.converged = True
                break
        self.start_sweep()  # leave a fresh posterior representation


class _ExactEP(_EPCore):
    def __init__(self, K, t, max_sweeps, tol):
        super().__init__(t, max_sweeps, tol)
        self.K = K
        self.Sigma = K.copy()
        self.mu = np.zeros(self.n)

    def start_sweep(self):
        sqrt_tau = np.sqrt(self.tau)
        B = np.eye(self.n) + sqrt_tau[:, None] * self.K * sqrt_tau[None, :]
        L = cholesky(B, lower=True)
        V = solve_triangular(L, sqrt_tau[:, None] * self.K, lower=True)
        self.Sigma = self.K - V.T @ V
        self.mu = self.Sigma @ self.nu
        self.L = L
        self.sqrt_tau = sqrt_tau

    def marginal(self, i):
        return self.mu[i], self.Sigma[i, i]

    def apply_update(self, i, dtau, dnu, tau_old):
        s = self.Sigma[:, i].copy()
        denom = 1.0 + dtau * s[i]
        if denom <= 1e-12:
            self.start_sweep()
            return
        coef = dtau / denom
        mu_i_old = self.mu[i]
        self.Sigma -= coef * np.outer(s, s)
        self.mu += (dnu - coef * (mu_i_old + dnu * s[i])) * s

    def posterior_marginals(self):
        return self.mu.copy(), np.diag(self.Sigma).copy()


class _FITCEP(_EPCore):
    """EP against a low-rank-plus-diagonal prior ``P P^T + diag(d)``.

    Each site visit costs one m-vector matvec: the m x m posterior
    kernel ``W`` and the projections ``s_vec = P^T (nu / f)`` and
    ``ws = W s_vec`` are maintained by Sherman-Morrison rank-1 updates
    and rebuilt from scratch at every sweep boundary to bound drift.
    """

    def __init__(self, P, d, t, max_sweeps, tol):
        super().__init__(t, max_sweeps, tol)
        self.P = P
        self.d = d  # positive diagonal of the low-rank-plus-diagonal prior
        self.m = P.shape[1]

    def start_sweep(self):
        f = 1.0 + self.d * self.tau
        G2 = np.eye(self.m) + self.P.T @ ((self.tau / f)[:, None] * self.P)
        Lg = cholesky(G2, lower=True)
        # Fortran order lets the per-site rank-1 update run in place via BLAS
        self.W = np.asfortranarray(cho_solve((Lg, True), np.eye(self.m)))
        self.s_vec = self.P.T @ (self.nu / f)
        self.ws = self.W @ self.s_vec
        self.f = f
        self._Wp = None

    def marginal(self, i):
        p = self.P[i]
        fi = self.f[i]
        Wp = self.W @ p
        self._Wp, self._pWp = Wp, float(p @ Wp)
        s2 = self.d[i] / fi + self._pWp / fi**2
        mu = self.nu[i] * self.d[i] / fi + float(p @ self.ws) / fi
        return mu, s2

    def apply_update(self, i, dtau, dnu, tau_old):
        p = self.P[i]
        tau_new, nu_new = self.tau[i], self.nu[i]
        nu_old = nu_new - dnu
        f_old = self.f[i]
        f_new = 1.0 + self.d[i] * tau_new
        dc = tau_new / f_new - tau_old / f_old
        Wp, pWp = self._Wp, self._pWp
        if dc != 0.0:
            denom = 1.0 + dc * pWp
            if abs(denom) < 1e-12:
                self.f[i] = f_new
                self.start_sweep()  # rebuild from the updated site state
                return
            coef = dc / denom
            self.ws -= (coef * float(p @ self.ws)) * Wp
            self.W = dger(-coef, Wp, Wp, a=self.W, overwrite_a=1)
            Wp = Wp * (1.0 - coef * pWp)
        gamma = nu_new / f_new - nu_old / f_old
        if gamma != 0.0:
            self.s_vec += gamma * p
            self.ws += gamma * Wp
        self.f[i] = f_new

    def posterior_marginals(self):
        base = self.d / self.f
        U = self.P / self.f[:, None]
        WU = U @ self.W
        s2 = base + np.einsum("ij,ij->i", WU, U)
        mu = self.nu * base + WU @ self.s_vec
        return mu, s2


class BinaryGPClassifier(BaseEstimator, ClassifierMixin):
    """Two-class GP classifier with EP inference.

    Parameters
    ----------
    kernel : kernel object, optional
        Defaults to a unit squared exponential.
    inducing : int or array-like, optional
        ``None`` for exact inference; an integer m (or explicit points)
        switches to the FITC low-rank prior.
    max_sweeps : int
        EP sweep budget; ``converged_`` reports whether the site
        parameters settled within ``tol`` before it ran out.
    optimizer : {None, "nelder-mead"}
        Optional marginal-likelihood maximization of the kernel
        hyperparameters (EP is refit for every objective evaluation).
    allow_single_class : bool
        Permit training data containing only one of the two labels
        (used by active-learning drivers before every region has been
        discovered).
    """

    def __init__(
        self,
        kernel: Kernel | None = None,
        inducing=None,
        max_sweeps: int = 20,
        tol: float = 1e-6,
        optimizer: str | None = None,
        n_restarts: int = 5,
        bounds: dict | None = None,
        max_opt_iter: int | None = None,
        warm_start_objective: bool = True,
        allow_single_class: bool = False,
        random_state: int = 0,
    ):
        self.kernel = kernel
        self.inducing = inducing
        self.max_sweeps = max_sweeps
        self.tol = tol
        self.optimizer = optimizer
        self.n_restarts = n_restarts
        self.bounds = bounds
        self.max_opt_iter = max_opt_iter
        self.warm_start_objective = warm_start_objective
        self.allow_single_class = allow_single_class
        self.random_state = random_state

    # ------------------------------------------------------------------

    def fit(self, X, t, site_init=None):
        """Run EP to convergence (or budget) on labels ``t`` in {-1, +1}.

        ``site_init`` optionally seeds the site natural parameters, e.g.
        with the converged state of a previous fit on a prefix of the
        data; the fixed point is unchanged but fewer sweeps are needed.
        """
        X = as_points(X)
        t = as_binary_labels(t, X.shape[0])
        if not self.allow_single_class and len(np.unique(t)) < 2:
            raise ValueError("training data must contain both labels")

        kernel = self.kernel if self.kernel is not None else SquaredExponential()
        if self.optimizer is not None:
            if self.optimizer != "nelder-mead":
                raise ValueError(f"unknown optimizer {self.optimizer!r}")
            kernel = self._optimize(X, t, kernel)

        self.X_train_ = X
        self.t_train_ = t
        self.kernel_ = kernel
        self._run_ep(site_init=site_init)
        self._finalize()
        return self

    def _inducing_points(self, X):
        if isinstance(self.inducing, (int, np.integer)):
            m = min(int(self.inducing), X.shape[0])
            if m < 1:
                raise ValueError("inducing count must be >= 1")
            idx = np.random.default_rng(self.random_state).choice(
                X.shape[0], size=m, replace=False
            )
            return X[np.sort(idx)]
        return as_points(self.inducing, n_dims=X.shape[1], name="inducing")

    def _make_core(self, X, t, kernel):
        if self.inducing is None:
            K = kernel(X) + JITTER_REL * kernel.variance * np.eye(X.shape[0])
            return _ExactEP(K, t, self.max_sweeps, self.tol)
        fitc = FITCStructure(X, self._inducing_points(X), kernel)
        d = fitc.diag_correction + JITTER_REL * kernel.variance
        core = _FITCEP(fitc.P, d, t, self.max_sweeps, self.tol)
        core.fitc = fitc
        return core

    def _run_ep(self, site_init=None):
        core = self._make_core(self.X_train_, self.t_train_, self.kernel_)
        if site_init is not None:
            tau0, nu0 = site_init
            core.run(tau0, nu0)
        else:
            core.run()
        self._core = core
        self.site_tau_ = core.tau
        self.site_nu_ = core.nu
        self.converged_ = core.converged
        self.n_sweeps_ = core.n_sweeps
        self.n_skipped_ = core.n_skipped

    # ------------------------------------------------------------------

    def _finalize(self):
        """Cache prediction quantities and the EP marginal likelihood."""
        core = self._core
        tau, nu = core.tau, core.nu
        if isinstance(core, _ExactEP):
            # w = (I + S K)^-1 nu, via the standard stable factorization
            z = core.sqrt_tau * solve_triangular(
                core.L.T,
                solve_triangular(core.L, core.sqrt_tau * (core.K @ nu), lower=True),
                lower=False,
            )
            self._w = nu - z
        else:
            f = 1.0 + core.d * tau
            Pw = (tau / f)[:, None] * core.P
            H = np.eye(core.m) + core.P.T @ Pw
            Lh = cholesky(H, lower=True)
            g_nu = nu / f - Pw @ cho_solve((Lh, True), core.P.T @ (nu / f))
            self._c1 = core.P.T @ g_nu
            Mw = core.P.T @ Pw
            self._C2 = Mw - Mw @ cho_solve((Lh, True), Mw)
        self.log_marginal_likelihood_value_ = self._ep_log_marginal()

    def _ep_log_marginal(self) -> float:
        core = self._core
        tau, nu = core.tau, core.nu
        active = tau > 0.0
        if not np.any(active):
            return 0.0  # no informative sites: the likelihood integrates to 1
        mu_post, s2_post = core.posterior_marginals()
        tau_cav = 1.0 / s2_post[active] - tau[active]
        nu_cav = mu_post[active] / s2_post[active] - nu[active]
        if np.any(tau_cav <= 0.0):
            # fall back to prior cavities for the offending sites
            bad = tau_cav <= 0.0
            prior_var = (
                np.diag(core.K)[active]
                if isinstance(core, _ExactEP)
                else (core.d + np.einsum("ij,ij->i", core.P, core.P))[active]
            )
            tau_cav[bad] = 1.0 / prior_var[bad]
            nu_cav[bad] = 0.0
        mu_cav = nu_cav / tau_cav
        s2_cav = 1.0 / tau_cav
        s2_site = 1.0 / tau[active]
        mu_site = nu[active] / tau[active]
        t_act = core.t[active]
        log_zhat = np.empty(int(np.sum(active)))
        for j, (tj, mc, vc) in enumerate(zip(t_act, mu_cav, s2_cav)):
            moments = _logistic_moments(int(tj), float(mc), float(vc))
            log_zhat[j] = -np.inf if moments is None else np.log(moments[0])
        tot_var = s2_cav + s2_site
        log_ztilde = (
            log_zhat
            + 0.5 * np.log(2.0 * np.pi * tot_var)
            + 0.5 * (mu_cav - mu_site) ** 2 / tot_var
        )
        # ln Z = sum log Ztilde + log N(mu_site; 0, K_active + diag(s2_site))
        quad, logdet = self._site_gaussian_terms(active, mu_site, s2_site)
        n_act = int(np.sum(active))
        return float(
            np.sum(log_ztilde) - 0.5 * quad - 0.5 * logdet - 0.5 * n_act * LOG_2PI
        )

    def _site_gaussian_terms(self, active, mu_site, s2_site):
        core = self._core
        if isinstance(core, _ExactEP):
            A = core.K[np.ix_(active, active)] + np.diag(s2_site)
            La = cholesky(A, lower=True)
            v = solve_triangular(La, mu_site, lower=True)
            return float(v @ v), 2.0 * float(np.sum(np.log(np.diag(La))))
        P = core.P[active]
        lam = core.d[active] + s2_site
        Ai = np.eye(core.m) + (P / lam[:, None]).T @ P
        La = cholesky(Ai, lower=True)
        pm = P.T @ (mu_site / lam)
        sol = cho_solve((La, True), pm)
        quad = float(mu_site @ (mu_site / lam) - pm @ sol)
        logdet = 2.0 * float(np.sum(np.log(np.diag(La)))) + float(np.sum(np.log(lam)))
        return quad, logdet

    # ------------------------------------------------------------------

    def latent(self, X):
        """Posterior mean and variance of the latent function at ``X``."""
        self._check_fitted()
        X = as_points(X, n_dims=self.X_train_.shape[1])
        core = self._core
        if isinstance(core, _ExactEP):
            Ks = self.kernel_(X, self.X_train_)
            mean = Ks @ self._w
            V = solve_triangular(core.L, core.sqrt_tau[:, None] * Ks.T, lower=True)
            var = self.kernel_.diag(X) - np.einsum("ij,ij->j", V, V)
        else:
            Bs = solve_triangular(
                core.fitc.Luu, self.kernel_(core.fitc.Xu, X), lower=True
            ).T
            mean = Bs @ self._c1
            var = self.kernel_.diag(X) - np.einsum(
                "ij,jk,ik->i", Bs, self._C2, Bs
            )
        return mean, np.maximum(var, 1e-12)

    def predict_proba(self, X) -> np.ndarray:
        """Class probabilities, columns ordered ``(-1, +1)``."""
        mean, var = self.latent(X)
        p = ndtr(mean / np.sqrt(1.0 + var))
        p = np.clip(p, PROB_EPS, 1.0 - PROB_EPS)
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        return np.where(self.predict_proba(X)[:, 1] >= 0.5, 1, -1)

    def log_marginal_likelihood(self) -> float:
        self._check_fitted()
        return self.log_marginal_likelihood_value_

    # ------------------------------------------------------------------

    def _optimize(self, X, t, kernel: Kernel) -> Kernel:
        bounds = {**CLASSIFIER_BOUNDS, **(self.bounds or {})}
        bounds_log = _theta_bounds(kernel, bounds, optimize_noise=False)
        rng = np.random.default_rng(self.random_state)
        state: dict = {}

        def objective(theta):
            # objective evaluations pay for a full EP refit each, so run
            # them at a relaxed site tolerance; the final fit is precise
            clf = BinaryGPClassifier(
                kernel=kernel.with_theta(theta),
                inducing=self.inducing,
                max_sweeps=self.max_sweeps,
                tol=max(self.tol, 1e-4),
                allow_single_class=True,
                random_state=self.random_state,
            )
            init = state.get("sites") if self.warm_start_objective else None
            clf.X_train_, clf.t_train_, clf.kernel_ = X, t, clf.kernel
            clf._run_ep(site_init=init)
            clf._finalize()
            if self.warm_start_objective:
                state["sites"] = (clf.site_tau_.copy(), clf.site_nu_.copy())
            return clf.log_marginal_likelihood_value_

        theta_best, _ = maximize_log_marginal(
            objective,
            kernel.theta,
            bounds_log,
            n_restarts=self.n_restarts,
            rng=rng,
            maxiter=self.max_opt_iter,
        )
        return kernel.with_theta(theta_best)

    def _check_fitted(self):
        if not hasattr(self, "X_train_"):
            raise ValueError("classifier is not fitted")


def _child_seeds(random_state: int, n: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(random_state).generate_state(n)]


class OVRClassifier(BaseEstimator, ClassifierMixin):
    """One-versus-rest composition of three binary EP classifiers.

    One binary task per class label in {1, 2, 3}; class k relabels the
    data as +1 for k and -1 for the rest. The per-class probabilities are
    not normalized across classes; prediction takes the argmax and the
    ``certainty`` of a prediction is the gap between the two largest
    probabilities.
    """

    classes_ = np.array(CLASS_LABELS)

    def __init__(
        self,
        kernel: Kernel | None = None,
        inducing=None,
        max_sweeps: int = 20,
        tol: float = 1e-6,
        optimizer: str | None = None,
        n_restarts: int = 5,
        bounds: dict | None = None,
        max_opt_iter: int | None = None,
        shared_hyper: bool = False,
        require_all_classes: bool = True,
        random_state: int = 0,
    ):
        self.kernel = kernel
        self.inducing = inducing
        self.max_sweeps = max_sweeps
        self.tol = tol
        self.optimizer = optimizer
        self.n_restarts = n_restarts
        self.bounds = bounds
        self.max_opt_iter = max_opt_iter
        self.shared_hyper = shared_hyper
        self.require_all_classes = require_all_classes
        self.random_state = random_state

    def fit(self, X, labels, site_init=None):
        """Fit the three binary tasks. ``site_init`` may carry a list of
        per-class ``(tau, nu)`` pairs for warm-started refits."""
        X = as_points(X)
        labels = as_class_labels(labels, X.shape[0])
        present = set(np.unique(labels).tolist())
        if self.require_all_classes:
            for k in CLASS_LABELS:
                if k not in present:
                    raise ValueError(f"class {k} is absent from the training data")
        seeds = _child_seeds(self.random_state, len(CLASS_LABELS))
        kernels = self._resolve_kernels(X, labels, seeds)
        self.estimators_ = []
        for j, k in enumerate(CLASS_LABELS):
            clf = BinaryGPClassifier(
                kernel=kernels[j],
                inducing=self.inducing,
                max_sweeps=self.max_sweeps,
                tol=self.tol,
                optimizer=None,  # hyperparameters already resolved
                allow_single_class=True,
                random_state=seeds[j],
            )
            init = None if site_init is None else site_init[j]
            clf.fit(X, np.where(labels == k, 1, -1), site_init=init)
            self.estimators_.append(clf)
        self.X_train_ = X
        self.labels_train_ = labels
        return self

    def _resolve_kernels(self, X, labels, seeds):
        if isinstance(self.kernel, (list, tuple)):
            if len(self.kernel) != len(CLASS_LABELS):
                raise ValueError("per-class kernels must come as a list of three")
            inits = list(self.kernel)
        else:
            base = self.kernel if self.kernel is not None else SquaredExponential()
            inits = [base] * 3
        if self.optimizer is None:
            return inits
        if self.shared_hyper:
            kernel = self._optimize_shared(X, labels, inits[0])
            return [kernel] * 3
        kernels = []
        for j, k in enumerate(CLASS_LABELS):
            clf = BinaryGPClassifier(
                kernel=inits[j],
                inducing=self.inducing,
                max_sweeps=self.max_sweeps,
                tol=self.tol,
                optimizer=self.optimizer,
                n_restarts=self.n_restarts,
                bounds=self.bounds,
                max_opt_iter=self.max_opt_iter,
                allow_single_class=True,
                random_state=seeds[j],
            )
            kernels.append(clf._optimize(X, np.where(labels == k, 1, -1), inits[j]))
        return kernels

    def _optimize_shared(self, X, labels, base: Kernel) -> Kernel:
        bounds = {**CLASSIFIER_BOUNDS, **(self.bounds or {})}
        bounds_log = _theta_bounds(base, bounds, optimize_noise=False)
        rng = np.random.default_rng(self.random_state)
        tasks = [np.where(labels == k, 1, -1) for k in CLASS_LABELS]

        def objective(theta):
            total = 0.0
            for t in tasks:
                clf = BinaryGPClassifier(
                    kernel=base.with_theta(theta),
                    inducing=self.inducing,
                    max_sweeps=self.max_sweeps,
                    tol=self.tol,
                    allow_single_class=True,
                    random_state=self.random_state,
                )
                clf.fit(X, t)
                total += clf.log_marginal_likelihood_value_
            return total

        theta_best, _ = maximize_log_marginal(
            objective,
            base.theta,
            bounds_log,
            n_restarts=self.n_restarts,
            rng=rng,
            maxiter=self.max_opt_iter,
        )
        return base.with_theta(theta_best)

    # ------------------------------------------------------------------

    def predict_proba(self, X) -> np.ndarray:
        """Per-class binary probabilities, shape ``(n, 3)``; the rows are
        not constrained to sum to one."""
        self._check_fitted()
        return np.column_stack(
            [clf.predict_proba(X)[:, 1] for clf in self.estimators_]
        )

    def predict(self, X) -> np.ndarray:
        probs = self.predict_proba(X)
        return self.classes_[np.argmax(probs, axis=1)]

    def certainty(self, X) -> np.ndarray:
        return certainty_from_probabilities(self.predict_proba(X))

    def predict_full(self, X):
        """One pass returning ``(labels, probs, certainty)``."""
        probs = self.predict_proba(X)
        labels = self.classes_[np.argmax(probs, axis=1)]
        return labels, probs, certainty_from_probabilities(probs)

    def _check_fitted(self):
        if not hasattr(self, "estimators_"):
            raise ValueError("classifier is not fitted")
