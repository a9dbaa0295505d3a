"""Covariance structures with closed-form inverses and related quantities.

Supported kinds:

* ``identity``   -- I_p
* ``equal_corr`` -- unit diagonal, constant off-diagonal correlation rho
* ``ar1``        -- Sigma[l, l'] = rho ** |l - l'|
* ``diagonal``   -- diag(sigmas), all entries positive
* ``explicit``   -- arbitrary symmetric positive definite matrix

The equal-correlation and AR(1) inverses use their closed forms
(Sherman-Morrison and the tridiagonal form respectively); everything else
is factorized numerically with a conditioning guard.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    CalibrationError,
    ConditioningError,
    DomainError,
    StructureError,
)

CONDITION_LIMIT = 1e12

KINDS = ("identity", "equal_corr", "ar1", "diagonal", "explicit")


def _arrays_equal(a, b) -> bool:
    if a is None or b is None:
        return a is b
    return np.array_equal(a, b)


@dataclass(frozen=True)
class CovarianceSpec:
    """Symbolic description of a p x p covariance matrix."""

    kind: str
    p: int
    rho: float | None = None
    sigmas: np.ndarray | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown covariance kind {self.kind!r}")
        if self.p < 1:
            raise DomainError(f"dimension p must be >= 1, got {self.p}")
        if self.kind == "equal_corr":
            lo = -1.0 / (self.p - 1) if self.p > 1 else -1.0
            if self.rho is None or not (lo < self.rho < 1.0):
                raise DomainError(
                    f"equal_corr requires rho in ({lo:g}, 1), got {self.rho}"
                )
        elif self.kind == "ar1":
            if self.rho is None or not (-1.0 < self.rho < 1.0):
                raise DomainError(f"ar1 requires rho in (-1, 1), got {self.rho}")
        elif self.kind == "diagonal":
            sig = np.asarray(self.sigmas, dtype=float)
            if sig.shape != (self.p,) or not np.all(sig > 0):
                raise DomainError(
                    "diagonal requires a length-p vector of positive entries"
                )
            object.__setattr__(self, "sigmas", sig)
        elif self.kind == "explicit":
            mat = np.asarray(self.matrix, dtype=float)
            if mat.shape != (self.p, self.p):
                raise StructureError(f"explicit matrix must be {self.p}x{self.p}")
            if not np.allclose(mat, mat.T, rtol=1e-10, atol=1e-12):
                raise StructureError("explicit covariance must be symmetric")
            try:
                np.linalg.cholesky(mat)
            except np.linalg.LinAlgError:
                raise StructureError(
                    "explicit covariance is not positive definite"
                ) from None
            object.__setattr__(self, "matrix", mat)

    # array fields need value comparison, so the generated __eq__ won't do
    def __eq__(self, other):
        if not isinstance(other, CovarianceSpec):
            return NotImplemented
        return (self.kind == other.kind and self.p == other.p
                and self.rho == other.rho
                and _arrays_equal(self.sigmas, other.sigmas)
                and _arrays_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.kind, self.p, self.rho))

    # convenience constructors -------------------------------------------

    @classmethod
    def identity(cls, p: int) -> "CovarianceSpec":
        return cls("identity", p)

    @classmethod
    def equal_corr(cls, p: int, rho: float) -> "CovarianceSpec":
        return cls("equal_corr", p, rho=rho)

    @classmethod
    def ar1(cls, p: int, rho: float) -> "CovarianceSpec":
        return cls("ar1", p, rho=rho)

    @classmethod
    def diagonal(cls, sigmas) -> "CovarianceSpec":
        sig = np.asarray(sigmas, dtype=float)
        return cls("diagonal", sig.shape[0], sigmas=sig)

    @classmethod
    def explicit(cls, matrix) -> "CovarianceSpec":
        mat = np.asarray(matrix, dtype=float)
        return cls("explicit", mat.shape[0], matrix=mat)


def build_covariance(spec: CovarianceSpec) -> np.ndarray:
    """Materialize Sigma. The result is exactly symmetric by construction."""
    p = spec.p
    if spec.kind == "identity":
        return np.eye(p)
    if spec.kind == "equal_corr":
        sigma = np.full((p, p), spec.rho)
        np.fill_diagonal(sigma, 1.0)
        return sigma
    if spec.kind == "ar1":
        idx = np.arange(p)
        return spec.rho ** np.abs(idx[:, None] - idx[None, :])
    if spec.kind == "diagonal":
        return np.diag(spec.sigmas)
    return spec.matrix.copy()


def inverse_covariance(spec: CovarianceSpec) -> np.ndarray:
    """Sigma^{-1}, via closed forms where available."""
    p = spec.p
    if spec.kind == "identity":
        return np.eye(p)
    if spec.kind == "equal_corr":
        rho = spec.rho
        inv = np.full((p, p), -rho / ((1.0 + (p - 1) * rho) * (1.0 - rho)))
        diag = (1.0 - rho / (1.0 + (p - 1) * rho)) / (1.0 - rho)
        np.fill_diagonal(inv, diag)
        return inv
    if spec.kind == "ar1":
        rho = spec.rho
        inv = np.zeros((p, p))
        if p == 1:
            inv[0, 0] = 1.0
            return inv
        c = 1.0 / (1.0 - rho * rho)
        d = np.full(p, (1.0 + rho * rho) * c)
        d[0] = d[-1] = c
        np.fill_diagonal(inv, d)
        off = np.full(p - 1, -rho * c)
        inv[np.arange(p - 1), np.arange(1, p)] = off
        inv[np.arange(1, p), np.arange(p - 1)] = off
        return inv
    if spec.kind == "diagonal":
        return np.diag(1.0 / spec.sigmas)
    return _guarded_inverse(spec.matrix)


def _guarded_inverse(sigma: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(sigma)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise ConditioningError(
            f"covariance condition number {cond:.3g} exceeds {CONDITION_LIMIT:g}"
        )
    try:
        factor = cho_factor(sigma)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"covariance factorization failed: {exc}") from exc
    return cho_solve(factor, np.eye(sigma.shape[0]))


def mahalanobis(delta, spec: CovarianceSpec) -> float:
    """Squared Mahalanobis distance delta' Sigma^{-1} delta."""
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (spec.p,):
        raise DomainError(f"delta must have length {spec.p}, got {delta.shape}")
    inv = inverse_covariance(spec)
    return float(delta @ inv @ delta)


def trace_sigma_squared(spec: CovarianceSpec) -> float:
    """tr(Sigma^2) = squared Frobenius norm of Sigma."""
    if spec.kind == "identity":
        return float(spec.p)
    if spec.kind == "diagonal":
        return float(np.sum(spec.sigmas**2))
    sigma = build_covariance(spec)
    return float(np.sum(sigma * sigma))


def beta_squared(spec: CovarianceSpec) -> float:
    """Calibration constant beta^2 for delocalized mean differences.

    beta is chosen so that uniform draws on (e/2, 3e/2) with e = Delta_L / beta
    reproduce the localized Mahalanobis distance in expectation. Closed forms
    exist for the equal-correlation and AR(1) structures; identity is the
    rho = 0 special case of either (beta^2 = 13 p / 12).
    """
    p, rho = spec.p, spec.rho
    if spec.kind == "identity":
        return 13.0 * p / 12.0
    if spec.kind == "equal_corr":
        if p < 2:
            raise DomainError("beta_squared requires p >= 2")
        return p * (p * rho - 14.0 * rho + 13.0) / (
            12.0 * (1.0 - rho + p * rho) * (1.0 - rho)
        )
    if spec.kind == "ar1":
        if p < 2:
            raise DomainError("beta_squared requires p >= 2")
        return (p * (24.0 * rho - 13.0 * rho**2 - 13.0) - 24.0 * rho
                + 26.0 * rho**2) / (12.0 * (rho**2 - 1.0))
    raise CalibrationError(
        f"beta calibration is only available for identity/equal_corr/ar1, "
        f"not {spec.kind!r}"
    )


@dataclass(frozen=True)
class MixingMatrix:
    """Symmetric PSD square root Gamma of a covariance, Gamma @ Gamma = Sigma.

    The symmetric root (not a Cholesky factor) is required: the third-moment
    term 1' Gamma^3 delta in the trace-criterion variance is tied to this
    specific choice.
    """

    gamma: np.ndarray = field(repr=False)
    source: CovarianceSpec

    @classmethod
    def from_spec(cls, spec: CovarianceSpec) -> "MixingMatrix":
        if spec.kind == "identity":
            return cls(np.eye(spec.p), spec)
        if spec.kind == "diagonal":
            return cls(np.diag(np.sqrt(spec.sigmas)), spec)
        if spec.kind == "equal_corr":
            # Sigma = (1-rho) I + rho J has eigenvalues 1-rho and 1+(p-1)rho,
            # so any power is a I + b J/p in the same eigenbasis.
            return cls(_equal_corr_power(spec, 0.5), spec)
        sigma = build_covariance(spec)
        vals, vecs = np.linalg.eigh(sigma)
        if np.min(vals) <= 0:
            raise StructureError(
                f"covariance is not positive definite (min eigenvalue "
                f"{np.min(vals):.3g})"
            )
        root = (vecs * np.sqrt(vals)) @ vecs.T
        return cls((root + root.T) / 2.0, spec)

    @property
    def is_identity(self) -> bool:
        return self.source.kind == "identity"

    def cube(self) -> np.ndarray:
        """Gamma^3 = Sigma^{3/2}."""
        if self.source.kind == "identity":
            return np.eye(self.source.p)
        if self.source.kind == "diagonal":
            return np.diag(self.source.sigmas**1.5)
        if self.source.kind == "equal_corr":
            return _equal_corr_power(self.source, 1.5)
        return self.gamma @ self.gamma @ self.gamma


def _equal_corr_power(spec: CovarianceSpec, exponent: float) -> np.ndarray:
    p, rho = spec.p, spec.rho
    lam_ones = (1.0 + (p - 1) * rho) ** exponent  # eigenvector 1/sqrt(p)
    lam_rest = (1.0 - rho) ** exponent
    out = np.full((p, p), (lam_ones - lam_rest) / p)
    np.fill_diagonal(out, lam_rest + (lam_ones - lam_rest) / p)
    return out
