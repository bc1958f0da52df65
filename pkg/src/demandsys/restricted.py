"""Multi-equation least squares with exact linear equality restrictions and
iterated feasible GLS weighting.

The estimator solves, for a T x m response block Y and a common T x k
design X, the problem

    min_B  sum_t (y_t - B x_t)' W (y_t - B x_t)   s.t.  R vec(B) = c

where vec(B) stacks coefficients equation-major (``B.ravel()`` for B of
shape (m, k)). Restrictions are imposed exactly through a null-space
reparameterization, never через a penalty. The FGLS weight is the inverse
of the maximum-likelihood residual covariance (denominator T), so the
reported Gaussian log-likelihood and likelihood-ratio statistics are
internally consistent.

Everything here is pure computation over immutable inputs; independent
fits can run in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import (
    ConvergenceError,
    DataError,
    DimensionError,
    IdentificationError,
    NumericalError,
)
from .validation import check_matrix, check_vector

__all__ = [
    "LinearSystem",
    "RestrictionSet",
    "LinearFit",
    "fit_restricted",
    "gaussian_log_likelihood",
]

# Residuals at or below this scale (relative to the response magnitude)
# mean the system is fit exactly; the FGLS loop stops there because the
# residual covariance carries no information.
_EXACT_FIT_RTOL = 1e-11

# Eigenvalues of the residual covariance below this fraction of the largest
# are floored before inversion; keeps the weight finite when the covariance
# is numerically rank deficient (e.g. noise-free data mid-iteration).
_WEIGHT_CLIP_RTOL = 1e-12


@dataclass(frozen=True)
class LinearSystem:
    """A stack of share equations with a common regressor matrix."""

    responses: np.ndarray
    design: np.ndarray
    equation_labels: tuple

    def __post_init__(self):
        Y = check_matrix(self.responses, "responses")
        X = check_matrix(self.design, "design", rows=Y.shape[0])
        labels = tuple(str(v) for v in self.equation_labels)
        if len(labels) != Y.shape[1]:
            raise DimensionError(f"expected {Y.shape[1]} equation labels, got {len(labels)}")
        if X.shape[0] <= X.shape[1]:
            raise DataError(f"need more observations than regressors: T={X.shape[0]}, k={X.shape[1]}")
        norms = np.abs(X).max(axis=0)
        if np.any(norms == 0):
            raise DataError(f"design column {int(np.argmin(norms))} is identically zero")
        object.__setattr__(self, "responses", Y)
        object.__setattr__(self, "design", X)
        object.__setattr__(self, "equation_labels", labels)

    @property
    def n_obs(self) -> int:
        return self.responses.shape[0]

    @property
    def n_equations(self) -> int:
        return self.responses.shape[1]

    @property
    def n_regressors(self) -> int:
        return self.design.shape[1]


@dataclass(frozen=True)
class RestrictionSet:
    """Exact equalities R vec(B) = c on the equation-major coefficient vector.

    R must have full row rank; an empty R (zero rows) means unrestricted.
    """

    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.matrix, dtype=float)
        if R.ndim != 2:
            raise DimensionError("restriction matrix must be 2-dimensional")
        c = check_vector(self.rhs, "rhs", size=R.shape[0])
        if R.shape[0] >= R.shape[1] and R.shape[0] > 0:
            raise DimensionError(f"restriction count {R.shape[0]} must be below coefficient count {R.shape[1]}")
        if R.shape[0] > 0 and np.linalg.matrix_rank(R) != R.shape[0]:
            raise DataError("restriction matrix does not have full row rank")
        object.__setattr__(self, "matrix", R)
        object.__setattr__(self, "rhs", c)

    @classmethod
    def empty(cls, n_coefficients: int) -> "RestrictionSet":
        return cls(matrix=np.zeros((0, n_coefficients)), rhs=np.zeros(0))

    @property
    def n_restrictions(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class LinearFit:
    """Output of :func:`fit_restricted`."""

    coefficients: np.ndarray  # (m, k)
    coefficient_covariance: np.ndarray  # (m*k, m*k)
    residuals: np.ndarray  # (T, m)
    residual_covariance: np.ndarray  # (m, m)
    log_likelihood: float
    iterations: int
    converged: bool = True
    delta_trace: tuple = field(default=())


def gaussian_log_likelihood(residuals) -> float:
    """Concentrated multivariate-normal log-likelihood of a residual block.

    Uses the ML covariance E'E/T:
    LL = -(T/2) * (m*log(2*pi) + logdet(Sigma) + m). Requires T > m and a
    nonsingular covariance.
    """
    E = check_matrix(residuals, "residuals")
    T, m = E.shape
    if T <= m:
        raise DataError(f"need more observations than equations: T={T}, m={m}")
    sigma = E.T @ E / T
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0 or not np.isfinite(logdet):
        raise NumericalError("residual covariance is singular", condition=float(np.linalg.cond(sigma)))
    return -(T / 2.0) * (m * math.log(2.0 * math.pi) + logdet + m)


def _solve_restricted(A: np.ndarray, g: np.ndarray, basis: np.ndarray, offset: np.ndarray) -> np.ndarray:
    """Minimize b'Ab/2 - g'b over b = offset + basis z; returns b."""
    reduced = basis.T @ A @ basis
    rhs = basis.T @ (g - A @ offset)
    try:
        chol = scipy.linalg.cho_factor(reduced, check_finite=False)
    except scipy.linalg.LinAlgError:
        raise IdentificationError(
            "restricted normal equations are rank deficient",
            condition=float(np.linalg.cond(reduced)),
        ) from None
    z = scipy.linalg.cho_solve(chol, rhs, check_finite=False)
    return offset + basis @ z


def _weight_from_covariance(sigma: np.ndarray) -> np.ndarray:
    """Inverse of a PSD covariance with a relative spectral floor."""
    lam, vec = np.linalg.eigh(sigma)
    lam_max = lam[-1]
    if not np.isfinite(lam_max) or lam_max <= 0:
        raise NumericalError("weighting matrix is singular", condition=float("inf"))
    lam = np.maximum(lam, lam_max * _WEIGHT_CLIP_RTOL)
    return (vec / lam) @ vec.T


def fit_restricted(
    system: LinearSystem,
    restrictions: RestrictionSet | None = None,
    weighting: str = "fgls_iterated",
    tol: float = 1e-8,
    max_iter: int = 100,
) -> LinearFit:
    """Restricted (iterated F)GLS fit of a multi-equation linear system.

    Parameters
    ----------
    system : LinearSystem
    restrictions : RestrictionSet, optional
        Defaults to unrestricted.
    weighting : {'identity', 'fgls_once', 'fgls_iterated'}
        'identity' solves once with an unweighted objective; 'fgls_once'
        re-solves once with the residual-covariance weight; 'fgls_iterated'
        alternates weight and coefficients until the largest coefficient
        change drops below ``tol``.
    tol, max_iter : float, int
        Convergence control for the iterated weighting.

    Raises
    ------
    IdentificationError
        Rank-deficient restricted normal equations.
    NumericalError
        Singular weighting or residual covariance.
    ConvergenceError
        Iterated weighting still moving after ``max_iter`` passes.
    """
    if weighting not in ("identity", "fgls_once", "fgls_iterated"):
        raise ValueError(f"unknown weighting {weighting!r}")
    Y, X = system.responses, system.design
    T, m = Y.shape
    k = X.shape[1]
    if restrictions is None:
        restrictions = RestrictionSet.empty(m * k)
    if restrictions.matrix.shape[1] != m * k:
        raise DimensionError(
            f"restriction matrix has {restrictions.matrix.shape[1]} columns, expected {m * k}"
        )

    R, c = restrictions.matrix, restrictions.rhs
    if restrictions.n_restrictions:
        basis = scipy.linalg.null_space(R)
        offset = np.linalg.lstsq(R, c, rcond=None)[0]
    else:
        basis = np.eye(m * k)
        offset = np.zeros(m * k)

    xtx = X.T @ X
    xty = X.T @ Y  # (k, m)
    y_scale = max(1.0, float(np.abs(Y).max()))

    def solve(W: np.ndarray) -> np.ndarray:
        A = np.kron(W, xtx)
        g = (xty @ W).T.ravel()  # block i = sum_j W_ij X'y_j
        return _solve_restricted(A, g, basis, offset).reshape(m, k)

    identity = np.eye(m)
    B = solve(identity)
    W = identity
    iterations = 1
    converged = True
    trace: list[float] = []

    if weighting != "identity":
        for _ in range(max_iter):
            resid = Y - X @ B.T
            if np.abs(resid).max() <= _EXACT_FIT_RTOL * y_scale:
                break  # exact fit: covariance carries no information
            sigma = resid.T @ resid / T
            W = _weight_from_covariance(sigma)
            B_new = solve(W)
            iterations += 1
            delta = float(np.abs(B_new - B).max())
            trace.append(delta)
            B = B_new
            if weighting == "fgls_once" or delta < tol:
                break
        else:
            raise ConvergenceError(
                f"FGLS weighting did not converge in {max_iter} iterations "
                f"(last delta {trace[-1]:.3e}, tol {tol:.1e})",
                trace=trace,
            )

    residuals = Y - X @ B.T
    sigma = residuals.T @ residuals / T
    exact_fit = np.abs(residuals).max() <= _EXACT_FIT_RTOL * y_scale
    if exact_fit:
        log_likelihood = math.inf
    else:
        log_likelihood = gaussian_log_likelihood(residuals)

    # Sandwich covariance consistent with the final weight W:
    # Var(vec B) = M [ (W Sigma W) kron X'X ] M  with  M = N (N'(W kron X'X) N)^-1 N'.
    A_w = np.kron(W, xtx)
    reduced = basis.T @ A_w @ basis
    try:
        chol = scipy.linalg.cho_factor(reduced, check_finite=False)
    except scipy.linalg.LinAlgError:
        raise IdentificationError(
            "restricted normal equations are rank deficient",
            condition=float(np.linalg.cond(reduced)),
        ) from None
    inner = scipy.linalg.cho_solve(chol, basis.T, check_finite=False)  # (q, mk)
    bread = basis @ inner  # N (N' A N)^-1 N'
    meat = np.kron(W @ sigma @ W, xtx)
    covariance = bread @ meat @ bread.T
    covariance = (covariance + covariance.T) / 2.0

    return LinearFit(
        coefficients=B,
        coefficient_covariance=covariance,
        residuals=residuals,
        residual_covariance=sigma,
        log_likelihood=log_likelihood,
        iterations=iterations,
        converged=converged,
        delta_trace=tuple(trace),
    )
