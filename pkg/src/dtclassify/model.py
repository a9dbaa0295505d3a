"""Population models: innovation laws, mean scenarios, and samplers.

Observations follow the linear mixing model ``obs = Gamma @ innovations + mu``
where the innovations are i.i.d. centered and standardized and Gamma is the
symmetric PSD square root of the common covariance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import (
    CovarianceSpec,
    MixingMatrix,
    beta_squared,
    inverse_covariance,
    mahalanobis,
)
from .errors import CalibrationError, DomainError

INNOVATION_KINDS = ("normal", "student_t", "gamma_shifted")


@dataclass(frozen=True)
class InnovationSpec:
    """An i.i.d. innovation law with mean 0 and variance 1.

    * ``normal``        -- N(0, 1); skewness 0, fourth moment 3
    * ``student_t``     -- t(df) scaled by sqrt((df-2)/df), df > 4;
                           skewness 0, fourth moment 3 + 6/(df-4)
    * ``gamma_shifted`` -- u - 1 with u ~ Gamma(1, 1); skewness +2,
                           fourth moment 9. With ``negate`` it is 1 - u,
                           flipping the skewness to -2.
    """

    kind: str
    df: int | None = None
    negate: bool = False

    def __post_init__(self):
        if self.kind not in INNOVATION_KINDS:
            raise DomainError(f"unknown innovation kind {self.kind!r}")
        if self.kind == "student_t":
            if self.df is None or self.df <= 4:
                raise DomainError(
                    f"student_t needs integer df > 4 (finite fourth moment), "
                    f"got {self.df}"
                )
        if self.negate and self.kind != "gamma_shifted":
            raise DomainError("negate only applies to gamma_shifted")

    @property
    def theta(self) -> float:
        """Third moment of one standardized component."""
        if self.kind == "gamma_shifted":
            return -2.0 if self.negate else 2.0
        return 0.0

    @property
    def gamma4(self) -> float:
        """Fourth moment of one standardized component."""
        if self.kind == "normal":
            return 3.0
        if self.kind == "student_t":
            return 3.0 + 6.0 / (self.df - 4)
        return 9.0

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "normal":
            return rng.standard_normal(size)
        if self.kind == "student_t":
            return rng.standard_t(self.df, size) * np.sqrt((self.df - 2) / self.df)
        u = rng.exponential(1.0, size)  # Gamma(1, 1)
        return (1.0 - u) if self.negate else (u - 1.0)

    def sample_mean(self, rng: np.random.Generator, n: int, size) -> np.ndarray:
        """Sample the average of ``n`` i.i.d. innovations, exactly in law.

        Normal and gamma sums have closed-form laws; other kinds fall back
        to averaging ``n`` draws.
        """
        if self.kind == "normal":
            return rng.standard_normal(size) / np.sqrt(n)
        if self.kind == "gamma_shifted":
            s = rng.gamma(float(n), 1.0, size) / n - 1.0  # sum of Gamma(1,1)
            return -s if self.negate else s
        shape = (size,) if np.isscalar(size) else tuple(size)
        return self.sample(rng, (n, *shape)).mean(axis=0)


@dataclass(frozen=True)
class ScenarioSpec:
    """Mean-difference scenario.

    Localized: mu2 has n0 leading unit entries, zeros elsewhere.
    Delocalized: mu2 entries are i.i.d. Uniform(e/2, 3e/2) with e calibrated
    so that the expected Mahalanobis distance matches the localized one.
    """

    kind: str
    n0: int
    redraw_mu2: bool = True

    def __post_init__(self):
        if self.kind not in ("localized", "delocalized"):
            raise DomainError(f"unknown scenario kind {self.kind!r}")
        if self.n0 < 1:
            raise DomainError("sparsity size n0 must be >= 1")


def localized_mu2(n0: int, p: int) -> np.ndarray:
    mu2 = np.zeros(p)
    mu2[:n0] = 1.0
    return mu2


def localized_distance(n0: int, sigma: CovarianceSpec) -> float:
    """Mahalanobis distance of the localized mean difference."""
    return mahalanobis(localized_mu2(n0, sigma.p), sigma)


def delocalized_scale(scenario: ScenarioSpec, sigma: CovarianceSpec) -> float:
    """The uniform-law scale e = Delta_L / beta."""
    if sigma.kind not in ("identity", "equal_corr", "ar1"):
        raise CalibrationError(
            f"delocalized calibration is not defined for covariance kind "
            f"{sigma.kind!r}"
        )
    delta_l2 = localized_distance(scenario.n0, sigma)
    return float(np.sqrt(delta_l2 / beta_squared(sigma)))


def make_scenario_means(
    scenario: ScenarioSpec, sigma: CovarianceSpec, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw (mu1, mu2) for one replication; mu1 is always zero."""
    p = sigma.p
    if scenario.n0 > p:
        raise DomainError(f"n0 = {scenario.n0} exceeds dimension p = {p}")
    mu1 = np.zeros(p)
    if scenario.kind == "localized":
        return mu1, localized_mu2(scenario.n0, p)
    e = delocalized_scale(scenario, sigma)
    mu2 = rng.uniform(e / 2.0, 3.0 * e / 2.0, p)
    return mu1, mu2


@dataclass(frozen=True)
class PopulationModel:
    """One population: mean, mixing matrix, and innovation law."""

    mu: np.ndarray
    gamma: MixingMatrix
    innovation: InnovationSpec

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n i.i.d. rows Gamma @ innovations + mu."""
        if n < 1:
            raise DomainError("sample size must be >= 1")
        star = self.innovation.sample(rng, (n, self.gamma.source.p))
        if self.gamma.is_identity:
            return star + self.mu
        return star @ self.gamma.gamma + self.mu  # Gamma symmetric


@dataclass(frozen=True)
class PopulationPair:
    """Two populations sharing a covariance and mixing matrix."""

    mu1: np.ndarray
    mu2: np.ndarray
    sigma: CovarianceSpec
    gamma: MixingMatrix
    innov1: InnovationSpec
    innov2: InnovationSpec

    @classmethod
    def from_parts(cls, mu1, mu2, sigma: CovarianceSpec,
                   innov1: InnovationSpec, innov2: InnovationSpec | None = None
                   ) -> "PopulationPair":
        return cls(
            np.asarray(mu1, dtype=float),
            np.asarray(mu2, dtype=float),
            sigma,
            MixingMatrix.from_spec(sigma),
            innov1,
            innov2 or innov1,
        )

    @property
    def delta(self) -> np.ndarray:
        return self.mu2 - self.mu1

    def population(self, which: int) -> PopulationModel:
        if which == 1:
            return PopulationModel(self.mu1, self.gamma, self.innov1)
        if which == 2:
            return PopulationModel(self.mu2, self.gamma, self.innov2)
        raise DomainError("population index must be 1 or 2")

    def mu_tilde(self) -> np.ndarray:
        """Gamma^{-1} (mu2 - mu1)."""
        if self.gamma.is_identity:
            return self.delta.copy()
        return np.linalg.solve(self.gamma.gamma, self.delta)

    def mahalanobis(self) -> float:
        return mahalanobis(self.delta, self.sigma)


def sample_population(n: int, model: PopulationModel,
                      rng: np.random.Generator) -> np.ndarray:
    """Functional alias for PopulationModel.sample."""
    return model.sample(n, rng)
