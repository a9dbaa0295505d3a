"""Two-group decision rules over training statistics.

Four classifiers share the same decision convention: the returned statistic
is the left-hand side minus the right-hand side of the rule's inequality,
and the point is assigned to the first group whenever statistic <= 0 (ties
resolve to group 1 for reproducibility).

* ``d_criterion``     -- compares quadratic forms against the pooled scatter
  inverse; equivalent (matrix determinant lemma) to comparing determinants
  of the two augmented scatter matrices.
* ``d_criterion_det`` -- the direct determinant comparison; O(p^3) per query
  and kept public as a cross-check oracle.
* ``t_criterion``     -- alpha-weighted squared distances to the group means.
* ``naive_bayes``     -- independence rule with pooled per-feature variances.
* ``oracle_fisher``   -- Fisher's rule with the true means and covariance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .covariance import CovarianceSpec, inverse_covariance
from .errors import (
    ConditioningError,
    DegenerateFeatureError,
    DomainError,
    SingularityError,
)

PI1 = "pi1"
PI2 = "pi2"

CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class Decision:
    """Label plus the signed decision statistic (<= 0 means group 1)."""

    label: str
    statistic: float


def _decide(statistic: float) -> Decision:
    return Decision(PI1 if statistic <= 0.0 else PI2, float(statistic))


@dataclass
class TrainedStats:
    """Sufficient statistics fitted from the two training samples."""

    mean_x: np.ndarray
    mean_y: np.ndarray
    n1: int
    n2: int
    pooled_scatter: np.ndarray | None = None
    _chol: tuple | None = field(default=None, repr=False)

    @property
    def alpha1(self) -> float:
        return self.n1 / (self.n1 + 1.0)

    @property
    def alpha2(self) -> float:
        return self.n2 / (self.n2 + 1.0)

    @property
    def p(self) -> int:
        return self.mean_x.shape[0]

    @property
    def n(self) -> int:
        return self.n1 + self.n2 - 2

    def pooled_variances(self) -> np.ndarray:
        """Per-feature pooled within-group variances, diag(A) / (n1+n2-2)."""
        if self.pooled_scatter is None:
            raise SingularityError("pooled scatter was not retained at fit time")
        return np.diag(self.pooled_scatter) / self.n


def fit(X, Y, need_scatter: bool = True) -> TrainedStats:
    """Fit group means and (optionally) the pooled within-group scatter."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise DomainError(
            f"feature dimensions differ: {X.shape[1]} vs {Y.shape[1]}"
        )
    n1, n2, p = X.shape[0], Y.shape[0], X.shape[1]
    if n1 < 2 or n2 < 2:
        raise DomainError("each group needs at least 2 training points")
    stats = TrainedStats(X.mean(axis=0), Y.mean(axis=0), n1, n2)
    if need_scatter:
        if p >= n1 + n2 - 2:
            raise SingularityError(
                f"the D-criterion needs p < n1+n2-2 so the pooled scatter is "
                f"invertible; got p = {p}, n1+n2-2 = {n1 + n2 - 2}"
            )
        Xc = X - stats.mean_x
        Yc = Y - stats.mean_y
        A = Xc.T @ Xc + Yc.T @ Yc
        A = (A + A.T) / 2.0
        stats.pooled_scatter = A
        stats._chol = _factor_scatter(A)
    return stats


def _factor_scatter(A: np.ndarray):
    try:
        factor = cho_factor(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularityError(f"pooled scatter is singular: {exc}") from exc
    d = np.diag(factor[0])
    cond_est = (d.max() / d.min()) ** 2
    if cond_est > CONDITION_LIMIT:
        raise ConditioningError(
            f"pooled scatter condition estimate {cond_est:.3g} exceeds "
            f"{CONDITION_LIMIT:g}; p/n too close to 1"
        )
    return factor


def d_statistics(stats: TrainedStats, Z) -> np.ndarray:
    """Vectorized D-criterion statistics for rows of Z."""
    if stats._chol is None:
        raise SingularityError("stats carry no pooled scatter; fit with "
                               "need_scatter=True")
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    Rx = Z - stats.mean_x
    Ry = Z - stats.mean_y
    qx = np.einsum("ij,ij->i", Rx, cho_solve(stats._chol, Rx.T).T)
    qy = np.einsum("ij,ij->i", Ry, cho_solve(stats._chol, Ry.T).T)
    return stats.alpha1 * qx - stats.alpha2 * qy


def d_criterion(stats: TrainedStats, z) -> Decision:
    return _decide(d_statistics(stats, np.asarray(z, dtype=float))[0])


def d_criterion_det(X, Y, z) -> Decision:
    """Direct determinant comparison of the two augmented scatter matrices."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    z = np.asarray(z, dtype=float)
    n1, n2, p = X.shape[0], Y.shape[0], X.shape[1]
    if p >= n1 + n2 - 1:
        raise SingularityError(
            f"determinant comparison needs p < n1+n2-1; got p = {p}"
        )
    xbar, ybar = X.mean(axis=0), Y.mean(axis=0)
    Xc, Yc = X - xbar, Y - ybar
    A = Xc.T @ Xc + Yc.T @ Yc
    rx, ry = z - xbar, z - ybar
    A1 = A + (n1 / (n1 + 1.0)) * np.outer(rx, rx)
    A2 = A + (n2 / (n2 + 1.0)) * np.outer(ry, ry)
    s1, ld1 = np.linalg.slogdet(A1)
    s2, ld2 = np.linalg.slogdet(A2)
    if s1 <= 0 or s2 <= 0:
        raise SingularityError("augmented scatter matrix is singular")
    # log-determinant difference has the same sign as det(A1) - det(A2)
    return _decide(ld1 - ld2)


def t_statistics(stats: TrainedStats, Z) -> np.ndarray:
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    qx = np.sum((Z - stats.mean_x) ** 2, axis=1)
    qy = np.sum((Z - stats.mean_y) ** 2, axis=1)
    return stats.alpha1 * qx - stats.alpha2 * qy


def t_criterion(stats: TrainedStats, z) -> Decision:
    return _decide(t_statistics(stats, np.asarray(z, dtype=float))[0])


def naive_bayes_statistics(stats: TrainedStats, pooled_variances, Z) -> np.ndarray:
    d = np.asarray(pooled_variances, dtype=float)
    if np.any(d <= 0):
        raise DegenerateFeatureError(
            f"{int(np.sum(d <= 0))} feature(s) have zero pooled variance"
        )
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    w = (stats.mean_x - stats.mean_y) / d
    score = (Z - (stats.mean_x + stats.mean_y) / 2.0) @ w
    return -score  # assign to group 1 when the projection is positive


def naive_bayes(stats: TrainedStats, pooled_variances, z) -> Decision:
    return _decide(
        naive_bayes_statistics(stats, pooled_variances,
                               np.asarray(z, dtype=float))[0]
    )


def oracle_statistics(mu1, mu2, sigma: CovarianceSpec, Z) -> np.ndarray:
    mu1 = np.asarray(mu1, dtype=float)
    mu2 = np.asarray(mu2, dtype=float)
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    w = inverse_covariance(sigma) @ (mu1 - mu2)
    score = (Z - (mu1 + mu2) / 2.0) @ w
    return -score


def oracle_fisher(mu1, mu2, sigma: CovarianceSpec, z) -> Decision:
    return _decide(oracle_statistics(mu1, mu2, sigma,
                                     np.asarray(z, dtype=float))[0])
