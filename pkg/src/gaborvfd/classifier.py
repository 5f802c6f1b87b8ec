"""Gaussian naive Bayes with log-space scoring."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

VAR_FLOOR_SCALE = 1e-9


@dataclass(frozen=True)
class NaiveBayesModel:
    """Per-class priors and per-feature Gaussian parameters.

    Classes are integer labels kept in ascending order; ties in
    :func:`predict` go to the smallest label.
    """

    classes: np.ndarray  # (C,)
    priors: np.ndarray  # (C,)
    means: np.ndarray  # (C, p)
    variances: np.ndarray  # (C, p), floored

    @property
    def n_features(self) -> int:
        return self.means.shape[1]

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[np.newaxis, :]
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        var = self.variances
        # (n, C): sum over features of log N(x; mu, var)
        const = -0.5 * np.sum(np.log(2.0 * np.pi * var), axis=1)
        quad = -0.5 * (((X[:, None, :] - self.means[None]) ** 2) / var[None]).sum(axis=2)
        return np.log(self.priors)[None, :] + const[None, :] + quad

    def save(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["class", "prior", "kind"] + [f"f{i}" for i in range(self.n_features)])
            for c, pr, mu, var in zip(self.classes, self.priors, self.means, self.variances):
                w.writerow([int(c), repr(float(pr)), "mean"] + [repr(float(v)) for v in mu])
                w.writerow([int(c), repr(float(pr)), "variance"] + [repr(float(v)) for v in var])

    @classmethod
    def load(cls, path) -> NaiveBayesModel:
        classes, priors, means, variances = [], [], [], []
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            next(r)
            for row in r:
                vals = [float(v) for v in row[3:]]
                if row[2] == "mean":
                    classes.append(int(row[0]))
                    priors.append(float(row[1]))
                    means.append(vals)
                else:
                    variances.append(vals)
        return cls(np.array(classes), np.array(priors), np.array(means), np.array(variances))


def fit_nb(X, y) -> NaiveBayesModel:
    """Class frequencies as priors, unbiased per-class feature variances.

    Variances are floored at ``1e-9 * (global feature variance + 1e-12)``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise ValueError("X must be (samples, features) with one label per row")
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) < 2:
        raise ValueError("naive Bayes needs at least two classes")
    small = classes[counts < 2]
    if len(small):
        raise ValueError(f"class {small[0].item()!r} has fewer than 2 samples")
    floor = VAR_FLOOR_SCALE * (X.var(axis=0) + 1e-12)
    means = np.array([X[y == c].mean(axis=0) for c in classes])
    variances = np.array([X[y == c].var(axis=0, ddof=1) for c in classes])
    variances = np.maximum(variances, floor[None, :])
    return NaiveBayesModel(classes, counts / counts.sum(), means, variances)


def predict_log_proba(model: NaiveBayesModel, X) -> np.ndarray:
    jll = model.joint_log_likelihood(X)
    return jll - logsumexp(jll, axis=1, keepdims=True)


def predict(model: NaiveBayesModel, x) -> tuple[int, np.ndarray]:
    """Label and per-class log-posterior for a single feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("predict takes one feature vector; use predict_many for batches")
    lp = predict_log_proba(model, x)[0]
    return int(model.classes[np.argmax(lp)]), lp


def predict_many(model: NaiveBayesModel, X) -> np.ndarray:
    # argmax returns the first maximum, i.e. the smallest class label
    return model.classes[np.argmax(model.joint_log_likelihood(X), axis=1)]


@dataclass(frozen=True)
class Evaluation:
    accuracy: float
    confusion: np.ndarray  # rows: true class, columns: predicted class
    predictions: np.ndarray


def evaluate(model: NaiveBayesModel, X_test, y_test, n_classes: int | None = None) -> Evaluation:
    y_test = np.asarray(y_test)
    if len(y_test) == 0:
        raise ValueError("empty test set")
    pred = predict_many(model, X_test)
    if n_classes is None:
        n_classes = int(max(y_test.max(), model.classes.max())) + 1
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (y_test, pred), 1)
    return Evaluation(float(np.mean(pred == y_test)), cm, pred)
