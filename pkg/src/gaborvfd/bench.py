"""Cross-validated benchmark sweeps over descriptor kinds and bank grids."""

from __future__ import annotations

import configparser
import csv
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from sklearn.model_selection import StratifiedKFold

from . import __version__, cda, classifier, pipeline, vfd
from .gabor import BankConfig, parse_grid
from .imaging import LabeledDataset, load_dataset
from .synthetic import brodatz_style_dataset, sinusoid_dataset

log = logging.getLogger(__name__)

REPORT_HEADER = ["kind", "grid", "fold", "accuracy", "seconds"]
SUMMARY_HEADER = ["kind", "grid", "mean_accuracy", "std_accuracy", "folds", "extract_seconds", "fit_seconds", "status"]


@dataclass
class BenchConfig:
    """Benchmark settings; see ``docs/config.md`` for the file format.

    ``dataset`` is a directory path, or ``synthetic:brodatz`` /
    ``synthetic:sinusoid`` for the generated corpora.
    """

    dataset: str = "synthetic:brodatz"
    kinds: list[str] = field(default_factory=lambda: list(pipeline.KINDS))
    grids: list[tuple[int, int]] = field(default_factory=lambda: [(4, 6)])
    u_low: float = 0.05
    u_high: float = 0.4
    sigma_v_form: str = "printed"
    truncation: float = 3.0
    r_max: int = vfd.DEFAULT_R_MAX
    n_components: int = cda.DEFAULT_COMPONENTS
    ridge_scale: float = cda.DEFAULT_RIDGE_SCALE
    cap_components: bool = True
    final_cda: bool = True
    folds: int = 10
    seed: int = 42
    leaky_cda: bool = False
    record_time: bool = False
    jobs: int = 1
    output: str = "bench-out"
    # synthetic corpus shape
    synthetic_classes: int = 10
    synthetic_per_class: int = 10
    synthetic_size: int = 64

    def validate(self) -> BenchConfig:
        if not self.kinds:
            raise ValueError("at least one descriptor kind is required")
        for k in self.kinds:
            pipeline.check_kind(k)
        if not self.grids:
            raise ValueError("grid list is empty")
        for m, n in self.grids:
            if not (2 <= m <= 6 and 3 <= n <= 6):
                raise ValueError(f"grid {m}x{n} outside 2..6 scales x 3..6 orientations")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        for m, n in self.grids:
            self.bank(m, n)
        return self

    def bank(self, m: int, n: int) -> BankConfig:
        return BankConfig(m, n, self.u_low, self.u_high, self.truncation, self.sigma_v_form)


def _bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _list(text: str) -> list[str]:
    return [t.strip() for t in text.replace(",", " ").split() if t.strip()]


# section -> key -> (attribute, parser)
CONFIG_SCHEMA = {
    "dataset": {
        "root": ("dataset", str),
        "synthetic_classes": ("synthetic_classes", int),
        "synthetic_per_class": ("synthetic_per_class", int),
        "synthetic_size": ("synthetic_size", int),
    },
    "bank": {
        "grids": ("grids", lambda s: [parse_grid(g) for g in _list(s)]),
        "u_low": ("u_low", float),
        "u_high": ("u_high", float),
        "sigma_v_form": ("sigma_v_form", str),
        "truncation": ("truncation", float),
    },
    "descriptors": {
        "kinds": ("kinds", _list),
        "r_max": ("r_max", int),
        "components": ("n_components", int),
        "ridge_scale": ("ridge_scale", float),
        "cap_components": ("cap_components", _bool),
        "final_cda": ("final_cda", _bool),
    },
    "evaluation": {
        "folds": ("folds", int),
        "seed": ("seed", int),
        "leaky_cda": ("leaky_cda", _bool),
        "jobs": ("jobs", int),
    },
    "output": {
        "directory": ("output", str),
        "record_time": ("record_time", _bool),
    },
}


def load_config(path, base: BenchConfig | None = None) -> BenchConfig:
    """Read an INI-style config file on top of ``base`` (defaults if omitted)."""
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    cfg = base or BenchConfig()
    for section in parser.sections():
        if section not in CONFIG_SCHEMA:
            raise ValueError(f"{path}: unknown section [{section}]")
        keys = CONFIG_SCHEMA[section]
        for key, raw in parser.items(section):
            if key not in keys:
                raise ValueError(f"{path}: unknown key {key!r} in [{section}]")
            attr, conv = keys[key]
            setattr(cfg, attr, conv(raw))
    return cfg


def resolve_dataset(cfg: BenchConfig) -> LabeledDataset:
    if cfg.dataset == "synthetic:brodatz":
        return brodatz_style_dataset(cfg.synthetic_classes, cfg.synthetic_per_class, cfg.synthetic_size,
                                     seed=cfg.seed)
    if cfg.dataset == "synthetic:sinusoid":
        return sinusoid_dataset(cfg.synthetic_classes, cfg.synthetic_per_class, cfg.synthetic_size, seed=cfg.seed)
    return load_dataset(cfg.dataset)


def stratified_folds(labels, folds: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded stratified k-fold ``(train, test)`` index pairs."""
    labels = np.asarray(labels)
    _, counts = np.unique(labels, return_counts=True)
    if counts.min() < folds:
        raise ValueError(f"smallest class has {counts.min()} samples, fewer than {folds} folds")
    skf = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    return list(skf.split(np.zeros(len(labels)), labels))


def predict_fold(kind: str, raw: np.ndarray, labels, train_idx, test_idx, cfg: BenchConfig,
                 projections=None) -> np.ndarray:
    """Fit on ``train_idx`` rows, predict ``test_idx`` rows.

    Only ``labels[train_idx]`` is ever read.
    """
    y_train = np.asarray(labels)[train_idx]
    head = pipeline.fit_head(kind, raw[train_idx], y_train, cfg.n_components, cfg.ridge_scale,
                             cfg.cap_components, cfg.final_cda, projections)
    return classifier.predict_many(head.nb, head.transform(raw[test_idx]))


def _leaky_projections(kind, raw, labels, cfg):
    return pipeline.fit_projections(kind, raw, labels, cfg.n_components, cfg.ridge_scale,
                                    cfg.cap_components, cfg.final_cda)


def cross_validate(dataset: LabeledDataset, kind: str, grid: tuple[int, int], cfg: BenchConfig,
                   raw: np.ndarray | None = None) -> list[float]:
    """Per-fold accuracies (fractions) of one descriptor kind on one grid."""
    accs, _ = _cross_validate(dataset, kind, grid, cfg, raw)
    return accs


def _cross_validate(dataset, kind, grid, cfg, raw=None):
    if raw is None:
        raw = pipeline.raw_feature_table(kind, dataset.images, cfg.bank(*grid), cfg.r_max, cfg.jobs)
    labels = dataset.labels
    splits = stratified_folds(labels, cfg.folds, cfg.seed)
    shared = _leaky_projections(kind, raw, labels, cfg) if cfg.leaky_cda else None
    accs, secs = [], []
    for train_idx, test_idx in splits:
        t0 = time.perf_counter()
        pred = predict_fold(kind, raw, labels, train_idx, test_idx, cfg, shared)
        secs.append(time.perf_counter() - t0)
        accs.append(float(np.mean(pred == labels[test_idx])))
    return accs, secs


@dataclass
class CellResult:
    kind: str
    grid: str
    fold_accuracies: list[float]
    fold_seconds: list[float]
    extract_seconds: float
    error: str | None = None

    @property
    def mean_accuracy(self) -> float:
        return 100.0 * float(np.mean(self.fold_accuracies)) if self.fold_accuracies else float("nan")

    @property
    def std_accuracy(self) -> float:
        return 100.0 * float(np.std(self.fold_accuracies)) if self.fold_accuracies else float("nan")


@dataclass
class BenchmarkReport:
    config: BenchConfig
    cells: list[CellResult]
    n_samples: int
    class_names: list[str]
    version: str = __version__

    def cell(self, kind: str, grid: str) -> CellResult:
        for c in self.cells:
            if c.kind == kind and c.grid == grid:
                return c
        raise KeyError((kind, grid))

    def table(self) -> str:
        grids = [f"{m}x{n}" for m, n in self.config.grids]
        width = max(len(k) for k in self.config.kinds) + 2
        lines = ["Gabor +".ljust(width) + "".join(g.rjust(9) for g in grids)]
        for kind in self.config.kinds:
            row = kind.ljust(width)
            for g in grids:
                c = self.cell(kind, g)
                row += ("ERROR" if c.error else f"{c.mean_accuracy:.2f}").rjust(9)
            lines.append(row)
        return "\n".join(lines) + "\n"

    def write(self, directory) -> Path:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "report.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(REPORT_HEADER)
            for c in self.cells:
                if c.error:
                    w.writerow([c.kind, c.grid, "error", "nan", ""])
                    continue
                for i, (acc, sec) in enumerate(zip(c.fold_accuracies, c.fold_seconds)):
                    seconds = f"{sec:.4f}" if self.config.record_time else ""
                    w.writerow([c.kind, c.grid, i, f"{100.0 * acc:.6f}", seconds])
        with open(out / "summary.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SUMMARY_HEADER)
            for c in self.cells:
                w.writerow([c.kind, c.grid, f"{c.mean_accuracy:.6f}", f"{c.std_accuracy:.6f}",
                            len(c.fold_accuracies), f"{c.extract_seconds:.3f}",
                            f"{sum(c.fold_seconds):.3f}", c.error or "ok"])
        (out / "table.txt").write_text(self.table())
        echo = asdict(self.config)
        echo["grids"] = " ".join(f"{m}x{n}" for m, n in self.config.grids)
        echo["kinds"] = " ".join(self.config.kinds)
        meta = [f"version={self.version}", f"samples={self.n_samples}",
                f"classes={len(self.class_names)}"] + [f"{k}={v}" for k, v in echo.items()]
        (out / "run.meta").write_text("\n".join(meta) + "\n")
        return out / "report.csv"


def run_benchmark(cfg: BenchConfig, dataset: LabeledDataset | None = None) -> BenchmarkReport:
    """Cross-validate every (kind, grid) cell and write the report files.

    A failing cell is logged and marked in the report; the sweep continues.
    """
    cfg.validate()
    if dataset is None:
        dataset = resolve_dataset(cfg)
    cells = []
    for kind in cfg.kinds:
        for m, n in cfg.grids:
            grid = f"{m}x{n}"
            t0 = time.perf_counter()
            try:
                raw = pipeline.raw_feature_table(kind, dataset.images, cfg.bank(m, n), cfg.r_max, cfg.jobs)
                t_extract = time.perf_counter() - t0
                accs, secs = _cross_validate(dataset, kind, (m, n), cfg, raw)
                cells.append(CellResult(kind, grid, accs, secs, t_extract))
                log.info("%s %s: %.2f%%", kind, grid, cells[-1].mean_accuracy)
            except Exception as exc:  # isolate the cell, keep the sweep going
                log.warning("%s %s failed: %s", kind, grid, exc)
                cells.append(CellResult(kind, grid, [], [], time.perf_counter() - t0,
                                        f"{type(exc).__name__}: {exc}"))
    report = BenchmarkReport(cfg, cells, len(dataset), list(dataset.class_names))
    report.write(cfg.output)
    return report
