"""Canonical discriminant analysis.

Scatter matrices, a ridged generalized symmetric eigenproblem, and a
plain-text serialization of the fitted projection.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import linalg

FORMAT_VERSION = 1
DEFAULT_COMPONENTS = 10
DEFAULT_RIDGE_SCALE = 1e-6
RIDGE_FLOOR = 1e-12


@dataclass(frozen=True)
class ScatterSet:
    S_intra: np.ndarray
    S_inter: np.ndarray
    S_total: np.ndarray
    global_mean: np.ndarray
    class_means: np.ndarray  # (n_classes, p), rows in sorted label order
    class_counts: np.ndarray
    classes: np.ndarray


def _check_xy(X, y):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ValueError("X must be a (samples, features) matrix with at least one feature")
    y = np.asarray(y)
    if y.shape != (X.shape[0],):
        raise ValueError("y must have one label per row of X")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")
    return X, y


def scatter_matrices(X, y) -> ScatterSet:
    """Within-class, between-class and total scatter of labelled rows."""
    X, y = _check_xy(X, y)
    classes, inv, counts = np.unique(y, return_inverse=True, return_counts=True)
    if len(classes) < 2:
        raise ValueError("scatter matrices need at least two classes")
    mean = X.mean(axis=0)
    means = np.array([X[inv == c].mean(axis=0) for c in range(len(classes))])
    within = X - means[inv]
    S_intra = within.T @ within
    between = means - mean
    S_inter = (between * counts[:, None]).T @ between
    centered = X - mean
    S_total = centered.T @ centered
    sym = lambda A: 0.5 * (A + A.T)
    return ScatterSet(sym(S_intra), sym(S_inter), sym(S_total), mean, means, counts, classes)


@dataclass(frozen=True)
class CdaProjection:
    """Canonical directions as rows of ``components`` (unit norm, descending eigenvalue)."""

    components: np.ndarray  # (n_components, p)
    eigenvalues: np.ndarray
    ridge: float

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def n_features(self) -> int:
        return self.components.shape[1]

    def explained(self) -> np.ndarray:
        """Cumulative eigenvalue fraction of the kept components."""
        ev = np.clip(self.eigenvalues, 0, None)
        total = ev.sum()
        return np.cumsum(ev) / total if total > 0 else np.zeros_like(ev)

    def save(self, path) -> None:
        header = [
            f"# cda-projection v{FORMAT_VERSION}",
            f"# ridge={self.ridge!r}",
            "# eigenvalues=" + " ".join(repr(float(e)) for e in self.eigenvalues),
            f"# shape={self.n_components}x{self.n_features}",
        ]
        rows = [",".join(repr(float(v)) for v in row) for row in self.components]
        Path(path).write_text("\n".join(header + rows) + "\n")

    @classmethod
    def load(cls, path) -> CdaProjection:
        meta, rows = {}, []
        for line in Path(path).read_text().splitlines():
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k] = v
                elif body != f"cda-projection v{FORMAT_VERSION}":
                    raise ValueError(f"{path}: unsupported projection header {body!r}")
            elif line.strip():
                rows.append([float(v) for v in line.split(",")])
        nc, p = (int(v) for v in meta["shape"].split("x"))
        comps = np.array(rows, dtype=np.float64).reshape(nc, p)
        eig = np.array([float(v) for v in meta["eigenvalues"].split()]) if meta["eigenvalues"] else np.zeros(0)
        return cls(comps, eig, float(meta["ridge"]))


def _sign_normalize(vectors: np.ndarray) -> np.ndarray:
    """Unit norm, first non-negligible entry positive. Operates on rows."""
    out = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    for row in out:
        nz = np.flatnonzero(np.abs(row) > 1e-12)
        if len(nz) and row[nz[0]] < 0:
            row *= -1
    return out


def ridge_value(S_intra: np.ndarray, ridge_scale: float) -> float:
    p = S_intra.shape[0]
    tr = float(np.trace(S_intra))
    if tr <= 0:
        return RIDGE_FLOOR
    return max(ridge_scale * tr / p, 0.0)


def fit_cda(X, y, n_components: int = DEFAULT_COMPONENTS, ridge_scale: float = DEFAULT_RIDGE_SCALE,
            cap: bool = True) -> CdaProjection:
    """Fit canonical directions maximizing between- over within-class scatter.

    Solves ``S_inter v = lambda (S_intra + eps I) v`` with
    ``eps = ridge_scale * trace(S_intra) / p``. With ``cap`` the component
    count is limited to ``min(p, n_classes - 1)``.
    """
    if n_components < 1:
        raise ValueError("n_components must be >= 1")
    sc = scatter_matrices(X, y)
    p = sc.S_intra.shape[0]
    limit = min(p, len(sc.classes) - 1) if cap else p
    k = min(n_components, limit)
    eps = ridge_value(sc.S_intra, ridge_scale)
    Sw = sc.S_intra + eps * np.eye(p)
    w, V = linalg.eigh(sc.S_inter, Sw)
    order = np.argsort(w)[::-1][:k]
    comps = _sign_normalize(V[:, order].T)
    return CdaProjection(comps, w[order], eps)


def project(proj: CdaProjection, X) -> np.ndarray:
    """Canonical variables ``Z = X @ components.T``."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    if X.shape[1] != proj.n_features:
        raise ValueError(f"expected {proj.n_features} features, got {X.shape[1]}")
    # row by row: a batched matmul may round differently from a single row,
    # and a sample must project identically whether scored alone or in a batch
    out = np.empty((X.shape[0], proj.n_components))
    for i, row in enumerate(X):
        out[i] = proj.components @ row
    return out
