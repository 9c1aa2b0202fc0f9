"""Covariance functions, Gram assembly and the FITC low-rank structure.

Two stationary kernels are provided: the squared exponential (optionally
with per-dimension lengthscales) used by the boundary classifier, and the
rational quadratic used by the surface regressor. Both expose the same
small interface: ``k(X, Y)`` builds a cross-Gram matrix, ``k.diag(X)`` its
diagonal, and ``theta``/``with_theta`` map to and from an unconstrained
log-parameter vector for optimizers.

All kernel objects are immutable; fitted models can share them freely.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.spatial.distance import cdist

from .errors import NumericalError
from .validation import as_points

# Relative jitter added to Gram diagonals before factorization, and the
# fallback used when the first attempt fails. Deterministic simulators
# produce near-singular Grams, so this is applied unconditionally.
JITTER_REL = 1e-10
JITTER_REL_FALLBACK = 1e-6


def _check_positive(value, name: str) -> None:
    arr = np.asarray(value, dtype=float)
    if arr.size == 0 or not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError(f"{name} must be strictly positive and finite, got {value!r}")


def _sq_dists(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    D = cdist(X, Y, metric="sqeuclidean")
    return np.maximum(D, 0.0)


@dataclass(frozen=True)
class SquaredExponential:
    """Squared exponential covariance ``v * exp(-||x-x'||^2 / (2 l^2))``.

    ``variance`` is the prior signal variance (output units squared).
    ``lengthscale`` is a single positive scalar, or a length-D vector for
    per-dimension (ARD) scaling.
    """

    variance: float = 1.0
    lengthscale: float | tuple[float, ...] = 1.0

    def __post_init__(self):
        _check_positive(self.variance, "variance")
        _check_positive(self.lengthscale, "lengthscale")
        ls = np.asarray(self.lengthscale, dtype=float)
        if ls.ndim > 1:
            raise ValueError("lengthscale must be a scalar or a 1-d vector")
        if ls.ndim == 1:
            # store hashably so the dataclass stays frozen/comparable
            object.__setattr__(self, "lengthscale", tuple(float(v) for v in ls))

    @property
    def is_ard(self) -> bool:
        return not np.isscalar(self.lengthscale)

    def _scaled(self, X: np.ndarray) -> np.ndarray:
        ls = np.asarray(self.lengthscale, dtype=float)
        if ls.ndim == 1 and ls.shape[0] != X.shape[1]:
            raise ValueError(
                f"ARD lengthscale has {ls.shape[0]} entries for {X.shape[1]}-d inputs"
            )
        return X / ls

    def __call__(self, X, Y=None) -> np.ndarray:
        X = as_points(X)
        Y = X if Y is None else as_points(Y, n_dims=X.shape[1], name="Y")
        D = _sq_dists(self._scaled(X), self._scaled(Y))
        return self.variance * np.exp(-0.5 * D)

    def diag(self, X) -> np.ndarray:
        X = as_points(X)
        return np.full(X.shape[0], self.variance)

    # --- log-space parameter vector for optimizers ---

    @property
    def theta(self) -> np.ndarray:
        return np.log(np.r_[self.variance, np.atleast_1d(self.lengthscale)])

    def with_theta(self, theta) -> "SquaredExponential":
        theta = np.asarray(theta, dtype=float)
        ls = np.exp(theta[1:])
        ls = float(ls[0]) if ls.size == 1 else tuple(ls)
        return replace(self, variance=float(np.exp(theta[0])), lengthscale=ls)


@dataclass(frozen=True)
class RationalQuadratic:
    """Rational quadratic covariance ``v * (1 + ||x-x'||^2/(2 a l^2))^-a``.

    Equivalent to a scale mixture of squared exponentials; the shape
    parameter ``alpha`` sets the weighting of long against short
    lengthscales, and the kernel tends to the squared exponential as
    ``alpha`` grows.
    """

    variance: float = 1.0
    lengthscale: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        _check_positive(self.variance, "variance")
        _check_positive(self.lengthscale, "lengthscale")
        _check_positive(self.alpha, "alpha")
        if not np.isscalar(self.lengthscale):
            raise ValueError("rational quadratic kernel is isotropic only")

    def __call__(self, X, Y=None) -> np.ndarray:
        X = as_points(X)
        Y = X if Y is None else as_points(Y, n_dims=X.shape[1], name="Y")
        D = _sq_dists(X, Y)
        base = 1.0 + D / (2.0 * self.alpha * self.lengthscale**2)
        return self.variance * base ** (-self.alpha)

    def diag(self, X) -> np.ndarray:
        X = as_points(X)
        return np.full(X.shape[0], self.variance)

    @property
    def theta(self) -> np.ndarray:
        return np.log([self.variance, self.lengthscale, self.alpha])

    def with_theta(self, theta) -> "RationalQuadratic":
        theta = np.asarray(theta, dtype=float)
        return replace(
            self,
            variance=float(np.exp(theta[0])),
            lengthscale=float(np.exp(theta[1])),
            alpha=float(np.exp(theta[2])),
        )


Kernel = SquaredExponential | RationalQuadratic


def jittered_cholesky(A: np.ndarray, variance: float) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of ``A + jitter*I`` under the escalation policy.

    Tries ``1e-10 * variance`` first, then ``1e-6 * variance``; raises
    :class:`NumericalError` if both fail. Returns ``(L, jitter_used)``.
    """
    n = A.shape[0]
    for rel in (JITTER_REL, JITTER_REL_FALLBACK):
        jitter = rel * variance
        try:
            L = cholesky(A + jitter * np.eye(n), lower=True)
            return L, jitter
        except np.linalg.LinAlgError:
            continue
    raise NumericalError(
        f"Cholesky factorization failed for a {n}x{n} matrix even with "
        f"jitter {JITTER_REL_FALLBACK * variance:g}"
    )


class FITCStructure:
    """Low-rank-plus-diagonal approximation of a Gram matrix.

    Holds the pieces of ``K_hat = Q + diag(K - Q)`` with
    ``Q = K_fu K_uu^-1 K_uf`` for inducing points ``Xu``: the inducing
    Gram factor, the cross-covariance, and the diagonal correction. The
    diagonal of ``K_hat`` matches the exact Gram by construction, and all
    products/determinants run in O(n m^2).
    """

    def __init__(self, X, Xu, kernel: Kernel):
        X = as_points(X)
        Xu = as_points(Xu, n_dims=X.shape[1], name="Xu")
        self.X = X
        self.Xu = Xu
        self.kernel = kernel
        K_uu = kernel(Xu, Xu)
        # any jitter on the inducing Gram biases the whole approximation
        # (amplified by 1/noise downstream), so try the raw factor first
        try:
            self.Luu, self.jitter_uu = cholesky(K_uu, lower=True), 0.0
        except np.linalg.LinAlgError:
            self.Luu, self.jitter_uu = jittered_cholesky(K_uu, kernel.variance)
        self.K_fu = kernel(X, Xu)
        # P P^T = Q; rows of P are the whitened cross-covariances
        self.P = solve_triangular(self.Luu, self.K_fu.T, lower=True).T
        diag_exact = kernel.diag(X)
        q_diag = np.einsum("ij,ij->i", self.P, self.P)
        self.diag_correction = np.maximum(diag_exact - q_diag, 0.0)
        self.n, self.m = self.P.shape

    def dense(self) -> np.ndarray:
        """Materialize ``K_hat`` (for small-n checks only)."""
        return self.P @ self.P.T + np.diag(self.diag_correction)

    def _lam(self, extra_diag) -> np.ndarray:
        lam = self.diag_correction + np.broadcast_to(
            np.asarray(extra_diag, dtype=float), (self.n,)
        )
        if np.any(lam <= 0.0):
            raise NumericalError("FITC diagonal must be positive; add noise/jitter")
        return lam

    def _inner_chol(self, lam: np.ndarray) -> np.ndarray:
        A = np.eye(self.m) + (self.P / lam[:, None]).T @ self.P
        return cholesky(A, lower=True)

    def matvec(self, v: np.ndarray, extra_diag=0.0) -> np.ndarray:
        """``(K_hat + diag(extra)) @ v`` without forming the dense matrix."""
        extra = np.broadcast_to(np.asarray(extra_diag, dtype=float), (self.n,))
        return self.P @ (self.P.T @ v) + (self.diag_correction + extra) * v

    def solve(self, B: np.ndarray, extra_diag) -> np.ndarray:
        """Solve ``(K_hat + diag(extra)) x = B`` via the Woodbury identity."""
        lam = self._lam(extra_diag)
        La = self._inner_chol(lam)
        B = np.asarray(B, dtype=float)
        vec = B.ndim == 1
        Bl = (B[:, None] if vec else B) / lam[:, None]
        t = solve_triangular(La, self.P.T @ Bl, lower=True)
        t = solve_triangular(La.T, t, lower=False)
        out = Bl - (self.P @ t) / lam[:, None]
        return out[:, 0] if vec else out

    def logdet(self, extra_diag) -> float:
        """``log det(K_hat + diag(extra))`` via the determinant lemma."""
        lam = self._lam(extra_diag)
        La = self._inner_chol(lam)
        return 2.0 * float(np.sum(np.log(np.diag(La)))) + float(np.sum(np.log(lam)))
