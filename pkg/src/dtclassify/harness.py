"""Replicated Monte Carlo classification experiments.

A replication draws fresh training and test samples (and, in the
delocalized scenario, optionally a fresh second mean vector), fits once,
and scores every requested classifier. Replications are independent work
units: each derives its own RNG stream from (master_seed, rep_index), so
results are bit-identical regardless of how many workers execute them.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import classify
from .covariance import (
    CovarianceSpec,
    MixingMatrix,
    build_covariance,
    mahalanobis,
)
from .errors import DomainError, NumericalError, SingularityError
from .model import (
    InnovationSpec,
    PopulationPair,
    ScenarioSpec,
    delocalized_scale,
    localized_distance,
    localized_mu2,
    make_scenario_means,
)
from .theory import (
    TheoryInputsD,
    d_misclass,
    normal_cdf,
    t_variance_terms,
    theta1,
    theta2,
)

CLASSIFIER_IDS = ("d", "t", "nb", "oracle")

# RNG stream layout: replication r uses [master_seed, r]; the reserved
# stream below draws a fixed delocalized mu2 when redraw_mu2 is off.
FIXED_MU_STREAM = 2**32 - 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Full specification of one Monte Carlo experiment."""

    p: int
    n1: int
    n2: int
    covariance: CovarianceSpec
    scenario: ScenarioSpec
    innovation1: InnovationSpec = InnovationSpec("normal")
    innovation2: InnovationSpec = InnovationSpec("normal")
    classifiers: tuple[str, ...] = ("d", "t", "nb", "oracle")
    m1: int | None = None
    m2: int | None = None
    reps: int = 1000
    master_seed: int = 0
    theory_overlay: bool = True
    mu2_override: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.covariance.p != self.p:
            raise DomainError("covariance dimension does not match p")
        for name, size in (("n1", self.n1), ("n2", self.n2),
                           ("m1", self.test1), ("m2", self.test2)):
            if size < 2:
                raise DomainError(f"{name} must be >= 2, got {size}")
        unknown = set(self.classifiers) - set(CLASSIFIER_IDS)
        if unknown:
            raise DomainError(f"unknown classifier id(s): {sorted(unknown)}")
        if not self.classifiers:
            raise DomainError("at least one classifier is required")
        if "d" in self.classifiers and self.p >= self.n1 + self.n2 - 2:
            raise SingularityError(
                f"the D-criterion needs p < n1+n2-2; got p = {self.p}, "
                f"n1+n2-2 = {self.n1 + self.n2 - 2}"
            )
        if self.scenario.n0 > self.p:
            raise DomainError("scenario sparsity n0 exceeds p")
        if self.mu2_override is not None:
            mu2 = np.asarray(self.mu2_override, dtype=float)
            if mu2.shape != (self.p,):
                raise DomainError("mu2_override must have length p")
            object.__setattr__(self, "mu2_override", mu2)

    @property
    def test1(self) -> int:
        return self.m1 if self.m1 is not None else self.n1

    @property
    def test2(self) -> int:
        return self.m2 if self.m2 is not None else self.n2


@dataclass
class ClassifierResult:
    """Aggregated errors of one classifier across replications."""

    classifier: str
    per_rep_errors: np.ndarray          # total test error % per replication
    per_rep_errors_pi1: np.ndarray      # group-1 misclassification % only
    median_error_pct: float
    se_pct: float                       # sd of per-replication error %
    mean_error_pct: float
    mean_error_pi1_pct: float
    theory_pred_pct: float | None = None
    se_defined: bool = True


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    classifiers: dict[str, ClassifierResult]


def _fixed_mu2(config: ExperimentConfig) -> np.ndarray | None:
    """The mu2 shared by all replications, or None when redrawn per rep."""
    if config.mu2_override is not None:
        return config.mu2_override
    if config.scenario.kind == "localized":
        return localized_mu2(config.scenario.n0, config.p)
    if not config.scenario.redraw_mu2:
        rng = np.random.default_rng([config.master_seed, FIXED_MU_STREAM])
        return make_scenario_means(config.scenario, config.covariance, rng)[1]
    return None


def run_replication(config: ExperimentConfig, rep_index: int,
                    gamma: MixingMatrix | None = None,
                    fixed_mu2: np.ndarray | None = None,
                    ) -> dict[str, tuple[int, int]]:
    """One replication; returns per-classifier (group-1, group-2) miscounts."""
    rng = np.random.default_rng([config.master_seed, rep_index])
    if gamma is None:
        gamma = MixingMatrix.from_spec(config.covariance)
    if fixed_mu2 is None:
        fixed_mu2 = _fixed_mu2(config)
    mu1 = np.zeros(config.p)
    if fixed_mu2 is not None:
        mu2 = fixed_mu2
    else:
        mu2 = make_scenario_means(config.scenario, config.covariance, rng)[1]
    pair = PopulationPair(mu1, mu2, config.covariance, gamma,
                          config.innovation1, config.innovation2)

    try:
        X = pair.population(1).sample(config.n1, rng)
        Y = pair.population(2).sample(config.n2, rng)
        Z1 = pair.population(1).sample(config.test1, rng)
        Z2 = pair.population(2).sample(config.test2, rng)
        Z = np.vstack([Z1, Z2])

        stats = classify.fit(X, Y, need_scatter="d" in config.classifiers)

        out: dict[str, tuple[int, int]] = {}
        for clf in config.classifiers:
            if clf == "d":
                s = classify.d_statistics(stats, Z)
            elif clf == "t":
                s = classify.t_statistics(stats, Z)
            elif clf == "nb":
                variances = pooled_variances_from_data(X, Y)
                s = classify.naive_bayes_statistics(stats, variances, Z)
            else:
                s = classify.oracle_statistics(mu1, mu2, config.covariance, Z)
            mis1 = int(np.sum(s[:config.test1] > 0))
            mis2 = int(np.sum(s[config.test1:] <= 0))
            out[clf] = (mis1, mis2)
        return out
    except NumericalError as exc:
        raise type(exc)(f"replication {rep_index}: {exc}") from exc


def pooled_variances_from_data(X, Y) -> np.ndarray:
    """Per-feature pooled within-group variances, without forming the scatter."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    n = X.shape[0] + Y.shape[0] - 2
    ssq = (np.sum((X - X.mean(axis=0)) ** 2, axis=0)
           + np.sum((Y - Y.mean(axis=0)) ** 2, axis=0))
    return ssq / n


def _run_chunk(args) -> list[dict[str, tuple[int, int]]]:
    config, indices = args
    gamma = MixingMatrix.from_spec(config.covariance)
    fixed = _fixed_mu2(config)
    return [run_replication(config, r, gamma, fixed) for r in indices]


def run_experiment(config: ExperimentConfig, workers: int = 1
                   ) -> ExperimentResult:
    """Run all replications and aggregate medians / standard errors."""
    if config.reps < 1:
        raise DomainError("reps must be >= 1")
    indices = list(range(config.reps))
    if workers <= 1 or config.reps == 1:
        counts = _run_chunk((config, indices))
    else:
        chunks = [(config, indices[i::workers]) for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, chunks))
        # reassemble in replication order regardless of scheduling
        counts = [None] * config.reps
        for (_, idx), part in zip(chunks, parts):
            for r, row in zip(idx, part):
                counts[r] = row

    m1, m2 = config.test1, config.test2
    preds = theory_predictions(config) if config.theory_overlay else {}
    results: dict[str, ClassifierResult] = {}
    for clf in config.classifiers:
        mis = np.array([c[clf] for c in counts], dtype=float)
        total = 100.0 * (mis[:, 0] + mis[:, 1]) / (m1 + m2)
        pi1 = 100.0 * mis[:, 0] / m1
        se_defined = config.reps >= 2
        results[clf] = ClassifierResult(
            classifier=clf,
            per_rep_errors=total,
            per_rep_errors_pi1=pi1,
            median_error_pct=float(np.median(total)),
            se_pct=float(np.std(total, ddof=1)) if se_defined else 0.0,
            mean_error_pct=float(np.mean(total)),
            mean_error_pi1_pct=float(np.mean(pi1)),
            theory_pred_pct=preds.get(clf),
            se_defined=se_defined,
        )
    return ExperimentResult(config, results)


def _expected_delta_terms(config: ExperimentConfig
                          ) -> tuple[float, float, float, float]:
    """(Delta^2, E||delta||^2, E delta'Sigma delta, E 1'Gamma^3 delta).

    Exact for a known mean difference; expectations over the uniform draw
    in the delocalized scenario.
    """
    sigma = config.covariance
    if config.mu2_override is not None or config.scenario.kind == "localized":
        delta = (config.mu2_override if config.mu2_override is not None
                 else localized_mu2(config.scenario.n0, config.p))
        sig = build_covariance(sigma)
        g3 = MixingMatrix.from_spec(sigma).cube()
        return (mahalanobis(delta, sigma), float(delta @ delta),
                float(delta @ sig @ delta), float(np.sum(g3 @ delta)))
    # delocalized: entries i.i.d. Uniform(e/2, 3e/2), mean e, variance e^2/12
    e = delocalized_scale(config.scenario, sigma)
    p = config.p
    sig = build_covariance(sigma)
    g3 = MixingMatrix.from_spec(sigma).cube()
    e2 = e * e
    norm2 = p * e2 * 13.0 / 12.0
    dsd = e2 * (np.trace(sig) / 12.0 + np.sum(sig))
    ones_g3_d = e * float(np.sum(g3))
    delta2 = localized_distance(config.scenario.n0, sigma)
    return delta2, float(norm2), float(dsd), ones_g3_d


def theory_predictions(config: ExperimentConfig) -> dict[str, float | None]:
    """Asymptotic error predictions (%) from the true parameters."""
    delta2, norm2, dsd, ones_g3_d = _expected_delta_terms(config)
    tr2 = float(np.sum(build_covariance(config.covariance) ** 2))
    preds: dict[str, float | None] = {}
    for clf in config.classifiers:
        if clf == "d":
            inputs = TheoryInputsD.from_design(config.p, config.n1, config.n2,
                                               delta2)
            preds[clf] = 100.0 * d_misclass(inputs)
        elif clf == "t":
            var = t_variance_terms("v1", tr2, dsd, ones_g3_d,
                                   config.n1, config.n2,
                                   theta_x=config.innovation1.theta,
                                   theta_y=config.innovation2.theta,
                                   gamma_x=config.innovation1.gamma4,
                                   gamma_y=config.innovation2.gamma4)
            alpha2 = config.n2 / (config.n2 + 1.0)
            preds[clf] = 100.0 * normal_cdf(-alpha2 * norm2 / math.sqrt(var))
        elif clf == "oracle":
            preds[clf] = 100.0 * normal_cdf(-math.sqrt(delta2) / 2.0)
        else:
            preds[clf] = None
    return preds


@dataclass
class DatasetErrors:
    """Re-substitution and held-out error counts for one classifier."""

    classifier: str
    train_errors: int
    test_errors: int
    n_features: int


def classify_dataset(train, test, classifiers=("t",)
                     ) -> dict[str, DatasetErrors]:
    """Fit on a labeled training set, report train/test error counts.

    The oracle classifier is not available here (true parameters unknown);
    the D-criterion requires p < n_train - 2.
    """
    from .data import LabeledDataset  # local import to avoid a cycle

    if not isinstance(train, LabeledDataset) or not isinstance(
            test, LabeledDataset):
        raise DomainError("train and test must be LabeledDataset instances")
    if train.p != test.p:
        raise DomainError(
            f"feature dimensions differ: train {train.p}, test {test.p}"
        )
    if set(test.label_set) != set(train.label_set):
        raise DomainError("train and test label sets differ")
    test = test.with_label_order(train.label_set)

    unknown = set(classifiers) - {"d", "t", "nb"}
    if unknown:
        raise DomainError(
            f"classifier id(s) {sorted(unknown)} not usable on real data"
        )
    X, Y = train.group(1), train.group(2)
    need_scatter = "d" in classifiers
    if need_scatter and train.p >= train.n - 2:
        raise SingularityError(
            f"the D-criterion needs p < n1+n2-2; got p = {train.p}, "
            f"n1+n2-2 = {train.n - 2}"
        )
    stats = classify.fit(X, Y, need_scatter=need_scatter)
    variances = (pooled_variances_from_data(X, Y) if "nb" in classifiers
                 else None)

    out: dict[str, DatasetErrors] = {}
    for clf in classifiers:
        errs = []
        for ds in (train, test):
            if clf == "d":
                s = classify.d_statistics(stats, ds.features)
            elif clf == "t":
                s = classify.t_statistics(stats, ds.features)
            else:
                s = classify.naive_bayes_statistics(stats, variances,
                                                    ds.features)
            predicted_pi2 = s > 0
            actual_pi2 = np.array(
                [lab == ds.label_set[1] for lab in ds.labels])
            errs.append(int(np.sum(predicted_pi2 != actual_pi2)))
        out[clf] = DatasetErrors(clf, errs[0], errs[1], train.p)
    return out
