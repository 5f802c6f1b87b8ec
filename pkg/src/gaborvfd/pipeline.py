"""Descriptor assembly, the Gabor + fractal signature, and fitted models.

Every descriptor kind goes through the same two stages:

* raw extraction, which needs no labels (Gabor stack -> statistics, or
  Gabor stack -> one fractal signature per channel);
* a supervised head fitted on training rows only: per-channel CDA (fractal
  kind only), an optional dataset-level CDA, then Gaussian naive Bayes.
"""

from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import cda, classifier, descriptors, vfd
from .gabor import BankConfig, build_bank, gabor_stack
from .imaging import GrayImage, LabeledDataset, quantize

KINDS = ("energy", "variance", "percentile75", "glcm", "covariance", "lgbp", "enhanced_fractal")
BASELINE_KINDS = KINDS[:-1]
FRACTAL_LEVELS = 256
MODEL_VERSION = 1


def check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ValueError(f"unknown descriptor kind {kind!r}; choose from {', '.join(KINDS)}")
    return kind


def feature_length(kind: str, config: BankConfig, r_max: int = vfd.DEFAULT_R_MAX,
                   n_components: int | None = None) -> int:
    """Closed-form raw feature length for a kind and bank.

    For ``enhanced_fractal`` this is ``M N n_components`` if the component
    count is given, else ``M N |E(r_max)|`` (the raw signature table width).
    """
    K = config.n_channels
    if kind in descriptors.FIRST_ORDER:
        return K
    if kind == "glcm":
        return 3 * K
    if kind == "covariance":
        return K * (K + 1) // 2
    if kind == "lgbp":
        return descriptors.LBP_BINS * K
    if kind == "enhanced_fractal":
        return K * (n_components if n_components is not None else len(vfd.radius_set(r_max)))
    raise ValueError(f"unknown descriptor kind {kind!r}")


@functools.lru_cache(maxsize=16)
def _bank(config: BankConfig):
    return build_bank(config)


def stack_signatures(stack, r_max: int) -> np.ndarray:
    """``(M N, |E|)`` log-volume signatures, one row per channel in scan order."""
    rows = []
    for mn, ch in stack.items():
        rows.append(vfd.fractal_signature(quantize(ch, FRACTAL_LEVELS), r_max, mn).log_volumes)
    return np.array(rows)


def baseline_vector(kind: str, stack) -> descriptors.FeatureVector:
    if kind in descriptors.FIRST_ORDER:
        return descriptors.stat_features(stack, kind)
    if kind == "glcm":
        return descriptors.glcm_features_stack(stack)
    if kind == "covariance":
        return descriptors.covariance_features(stack)
    if kind == "lgbp":
        return descriptors.lgbp_features(stack)
    raise ValueError(f"{kind!r} is not a baseline descriptor")


def raw_features(kind: str, img: GrayImage, config: BankConfig, r_max: int = vfd.DEFAULT_R_MAX) -> np.ndarray:
    """Label-free features of one image: a vector, or a signature matrix for the fractal kind."""
    stack = gabor_stack(img, config, _bank(config))
    if check_kind(kind) == "enhanced_fractal":
        return stack_signatures(stack, r_max)
    return baseline_vector(kind, stack).values


def _raw_job(args):
    kind, pixels, levels, config, r_max = args
    return raw_features(kind, GrayImage(pixels, levels), config, r_max)


def raw_feature_table(kind: str, images, config: BankConfig, r_max: int = vfd.DEFAULT_R_MAX,
                      jobs: int = 1) -> np.ndarray:
    """Raw features of many images, stacked along the first axis in input order."""
    args = [(kind, img.pixels, img.levels, config, r_max) for img in images]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_raw_job, args, chunksize=max(1, len(args) // (4 * jobs))))
    else:
        rows = [_raw_job(a) for a in args]
    return np.array(rows)


@dataclass
class ChannelSignatureTable:
    """Fractal signatures per channel: ``signatures[sample, channel, radius]``."""

    signatures: np.ndarray
    labels: np.ndarray
    config: BankConfig
    r_max: int

    def channel(self, m: int, n: int) -> np.ndarray:
        return self.signatures[:, m * self.config.orientations + n, :]

    def take(self, index) -> ChannelSignatureTable:
        return replace(self, signatures=self.signatures[index], labels=self.labels[index])


def channel_signatures(dataset: LabeledDataset, config: BankConfig, r_max: int = vfd.DEFAULT_R_MAX,
                       jobs: int = 1) -> ChannelSignatureTable:
    sig = raw_feature_table("enhanced_fractal", dataset.images, config, r_max, jobs)
    return ChannelSignatureTable(sig, dataset.labels.copy(), config, r_max)


def fit_channel_projections(signatures: np.ndarray, labels, n_components: int = cda.DEFAULT_COMPONENTS,
                            ridge_scale: float = cda.DEFAULT_RIDGE_SCALE, cap: bool = True) -> list[cda.CdaProjection]:
    """One CDA per channel of a ``(samples, channels, radii)`` array."""
    return [cda.fit_cda(signatures[:, c, :], labels, n_components, ridge_scale, cap)
            for c in range(signatures.shape[1])]


def fit_proposed(table: ChannelSignatureTable, n_components: int = cda.DEFAULT_COMPONENTS,
                 ridge_scale: float = cda.DEFAULT_RIDGE_SCALE, cap: bool = True) -> list[cda.CdaProjection]:
    """Per-channel projections; pass a table of training samples only."""
    return fit_channel_projections(table.signatures, table.labels, n_components, ridge_scale, cap)


def compose_matrix(projections: list[cda.CdaProjection], signatures: np.ndarray) -> np.ndarray:
    """Concatenate per-channel canonical variables in channel scan order."""
    if signatures.ndim == 2:
        signatures = signatures[np.newaxis]
    if signatures.shape[1] != len(projections):
        raise ValueError(f"{signatures.shape[1]} channels but {len(projections)} projections")
    parts = [cda.project(p, signatures[:, c, :]) for c, p in enumerate(projections)]
    return np.concatenate(parts, axis=1)


def compose_features(projections: list[cda.CdaProjection], table: ChannelSignatureTable) -> list[descriptors.FeatureVector]:
    Z = compose_matrix(projections, table.signatures)
    names = [f"m{m}n{n}:cv{i}" for (m, n), p in zip(table.config.channels(), projections)
             for i in range(p.n_components)]
    return [descriptors.FeatureVector(row, names, "enhanced_fractal") for row in Z]


@dataclass
class Head:
    """Supervised stages fitted on training rows."""

    channel_projections: list[cda.CdaProjection] | None
    final: cda.CdaProjection | None
    nb: classifier.NaiveBayesModel

    def transform(self, raw: np.ndarray) -> np.ndarray:
        X = compose_matrix(self.channel_projections, raw) if self.channel_projections else raw
        if X.ndim == 1:
            X = X[np.newaxis]
        return cda.project(self.final, X) if self.final is not None else X


def fit_projections(kind: str, raw: np.ndarray, labels, n_components: int, ridge_scale: float,
                    cap: bool, use_final: bool):
    channel = None
    X = raw
    if kind == "enhanced_fractal":
        channel = fit_channel_projections(raw, labels, n_components, ridge_scale, cap)
        X = compose_matrix(channel, raw)
    final = cda.fit_cda(X, labels, n_components, ridge_scale, cap) if use_final else None
    return channel, final


def fit_head(kind: str, raw: np.ndarray, labels, n_components: int = cda.DEFAULT_COMPONENTS,
             ridge_scale: float = cda.DEFAULT_RIDGE_SCALE, cap: bool = True, use_final: bool = True,
             projections=None) -> Head:
    """Fit CDA stages (unless ``projections`` is given) and naive Bayes on ``raw`` rows."""
    if projections is None:
        projections = fit_projections(kind, raw, labels, n_components, ridge_scale, cap, use_final)
    channel, final = projections
    partial = Head(channel, final, nb=None)
    nb = classifier.fit_nb(partial.transform(raw), labels)
    return Head(channel, final, nb)


@dataclass
class PipelineModel:
    """Everything needed to classify a new image."""

    kind: str
    config: BankConfig
    r_max: int
    head: Head
    class_names: list[str]
    n_components: int = cda.DEFAULT_COMPONENTS
    ridge_scale: float = cda.DEFAULT_RIDGE_SCALE
    cap: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def channel_projections(self):
        return self.head.channel_projections

    def features(self, img: GrayImage) -> descriptors.FeatureVector:
        """Pre-classifier features of one image (before the dataset-level CDA)."""
        raw = raw_features(self.kind, img, self.config, self.r_max)
        if self.kind != "enhanced_fractal":
            names = [f"f{i}" for i in range(len(raw))]
            return descriptors.FeatureVector(raw, names, self.kind)
        Z = compose_matrix(self.head.channel_projections, raw)[0]
        return descriptors.FeatureVector(Z, [f"cv{i}" for i in range(len(Z))], self.kind)

    def predict_raw(self, raw: np.ndarray) -> np.ndarray:
        return classifier.predict_many(self.head.nb, self.head.transform(raw))

    def predict(self, img: GrayImage) -> str:
        raw = raw_features(self.kind, img, self.config, self.r_max)
        return self.class_names[int(self.predict_raw(raw)[0])]

    def save(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        cfg = self.config
        lines = [
            f"version={MODEL_VERSION}",
            f"kind={self.kind}",
            f"scales={cfg.scales}",
            f"orientations={cfg.orientations}",
            f"u_low={cfg.u_low!r}",
            f"u_high={cfg.u_high!r}",
            f"truncation={cfg.truncation!r}",
            f"sigma_v_form={cfg.sigma_v_form}",
            f"r_max={self.r_max}",
            f"n_components={self.n_components}",
            f"ridge_scale={self.ridge_scale!r}",
            f"cap={int(self.cap)}",
            f"final={int(self.head.final is not None)}",
            "classes=" + ",".join(self.class_names),
        ]
        if self.head.channel_projections:
            lines.append("channel_components=" + ",".join(str(p.n_components) for p in self.head.channel_projections))
            for (m, n), p in zip(cfg.channels(), self.head.channel_projections):
                p.save(d / f"channel_{m}_{n}.csv")
        if self.head.final is not None:
            lines.append(f"final_components={self.head.final.n_components}")
            self.head.final.save(d / "final.csv")
        self.head.nb.save(d / "nb.csv")
        (d / "model.meta").write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, directory) -> PipelineModel:
        d = Path(directory)
        meta = dict(line.split("=", 1) for line in (d / "model.meta").read_text().splitlines() if "=" in line)
        if int(meta["version"]) != MODEL_VERSION:
            raise ValueError(f"unsupported model version {meta['version']}")
        cfg = BankConfig(int(meta["scales"]), int(meta["orientations"]), float(meta["u_low"]),
                         float(meta["u_high"]), float(meta["truncation"]), meta["sigma_v_form"])
        channel = None
        if meta["kind"] == "enhanced_fractal":
            channel = [cda.CdaProjection.load(d / f"channel_{m}_{n}.csv") for m, n in cfg.channels()]
        final = cda.CdaProjection.load(d / "final.csv") if meta["final"] == "1" else None
        head = Head(channel, final, classifier.NaiveBayesModel.load(d / "nb.csv"))
        return cls(meta["kind"], cfg, int(meta["r_max"]), head, meta["classes"].split(","),
                   int(meta["n_components"]), float(meta["ridge_scale"]), meta["cap"] == "1")


def fit_pipeline(dataset: LabeledDataset, kind: str, config: BankConfig, r_max: int = vfd.DEFAULT_R_MAX,
                 n_components: int = cda.DEFAULT_COMPONENTS, ridge_scale: float = cda.DEFAULT_RIDGE_SCALE,
                 cap: bool = True, use_final: bool = True, jobs: int = 1) -> PipelineModel:
    raw = raw_feature_table(check_kind(kind), dataset.images, config, r_max, jobs)
    head = fit_head(kind, raw, dataset.labels, n_components, ridge_scale, cap, use_final)
    return PipelineModel(kind, config, r_max, head, list(dataset.class_names), n_components, ridge_scale, cap)


def extract(kind: str, img: GrayImage, model_or_config, r_max: int = vfd.DEFAULT_R_MAX) -> descriptors.FeatureVector:
    """Feature vector of one image for any descriptor kind.

    Baselines take a :class:`BankConfig` (or a model, whose bank is used).
    ``enhanced_fractal`` needs a fitted :class:`PipelineModel` carrying the
    per-channel projections.
    """
    check_kind(kind)
    if kind == "enhanced_fractal":
        if not isinstance(model_or_config, PipelineModel) or not model_or_config.head.channel_projections:
            raise ValueError("enhanced_fractal needs a fitted model with per-channel projections")
        return model_or_config.features(img)
    config = model_or_config.config if isinstance(model_or_config, PipelineModel) else model_or_config
    if not isinstance(config, BankConfig):
        raise TypeError("expected a BankConfig or PipelineModel")
    stack = gabor_stack(img, config, _bank(config))
    return baseline_vector(kind, stack)
