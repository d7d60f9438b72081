"""Experiment manifests out, training results in, figure-ready aggregates.

Manifests are one JSON document per architecture with a fixed key order, so
serialize -> parse -> serialize is byte-identical.  Results arrive as CSV
rows ``arch_id,dataset,epoch,val_accuracy,seed``; ingestion either accepts a
file completely or fails with a line-numbered diagnostic.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

from .archgen import ArchitectureSpec
from .schedule import ScheduleParams
from .skewnorm import SkewNormalParams

RESULTS_HEADER = ("arch_id", "dataset", "epoch", "val_accuracy", "seed")

DATASETS = ("mnist", "fashion_mnist", "cifar10")

#: Per-dataset defaults: epochs, input resize, horizontal flip, random
#: translation in pixels.  Flip and translation apply to cifar10 only; the
#: grayscale sets are resized to 32x32 and otherwise left untouched.
DATASET_DEFAULTS = {
    "mnist": (30, (32, 32), False, 0),
    "fashion_mnist": (30, (32, 32), False, 0),
    "cifar10": (150, (32, 32), True, 4),
}

DEFAULT_BATCH_SIZE = 128
DEFAULT_WEIGHT_DECAY = 5e-4
DEFAULT_INIT_SCHEME = "he_normal"
DEFAULT_BN_EPSILON = 1e-4
DEFAULT_ETA_MAX = 1e-2
DEFAULT_ETA_MIN = 1e-5
DEFAULT_FIRST_CYCLE = 10
DEFAULT_CYCLE_MULT = 2


class ResultsError(Exception):
    """Base class for result-ingestion failures."""


class ResultsParseError(ResultsError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class ResultsConflictError(ResultsError):
    def __init__(self, path, line: int, key: tuple):
        super().__init__(f"{path}:{line}: duplicate result for {key}")
        self.path = path
        self.line = line
        self.key = key


@dataclass(frozen=True)
class Augmentation:
    horizontal_flip: bool
    translate_pixels: int

    def __post_init__(self) -> None:
        if self.translate_pixels < 0:
            raise ValueError("translate_pixels must be >= 0")


@dataclass(frozen=True)
class ExperimentManifest:
    """Everything a trainer needs to reproduce one run."""

    arch_id: str
    params: SkewNormalParams
    template: str
    counts: tuple[int, ...]
    parameter_count: int
    dataset: str
    epochs: int
    batch_size: int
    weight_decay: float
    schedule: ScheduleParams
    augmentation: Augmentation
    resize_to: tuple[int, int]
    init_scheme: str
    bn_epsilon: float
    seed: int

    def __post_init__(self) -> None:
        if self.dataset not in DATASETS:
            raise ValueError(f"unknown dataset {self.dataset!r}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if self.schedule.total_epochs != self.epochs:
            raise ValueError("schedule horizon must equal the manifest epochs")
        if len(self.resize_to) != 2 or any(v < 1 for v in self.resize_to):
            raise ValueError(f"bad resize_to {self.resize_to!r}")


def manifest_for(
    spec: ArchitectureSpec,
    dataset: str,
    *,
    epochs: int | None = None,
    seed: int = 0,
) -> ExperimentManifest:
    """Manifest with the standard training recipe for ``dataset``.

    ``epochs`` overrides the dataset default (150 for cifar10, 30 otherwise),
    e.g. for reduced desk-scale runs.
    """
    if dataset not in DATASET_DEFAULTS:
        raise ValueError(f"unknown dataset {dataset!r}")
    default_epochs, resize_to, flip, translate = DATASET_DEFAULTS[dataset]
    run_epochs = default_epochs if epochs is None else epochs
    return ExperimentManifest(
        arch_id=spec.arch_id,
        params=spec.params,
        template=spec.template_name,
        counts=spec.allocation.counts,
        parameter_count=spec.parameter_count,
        dataset=dataset,
        epochs=run_epochs,
        batch_size=DEFAULT_BATCH_SIZE,
        weight_decay=DEFAULT_WEIGHT_DECAY,
        schedule=ScheduleParams(
            eta_max=DEFAULT_ETA_MAX,
            eta_min=DEFAULT_ETA_MIN,
            first_cycle=DEFAULT_FIRST_CYCLE,
            cycle_mult=DEFAULT_CYCLE_MULT,
            total_epochs=run_epochs,
        ),
        augmentation=Augmentation(horizontal_flip=flip, translate_pixels=translate),
        resize_to=resize_to,
        init_scheme=DEFAULT_INIT_SCHEME,
        bn_epsilon=DEFAULT_BN_EPSILON,
        seed=seed,
    )


def manifest_to_json(manifest: ExperimentManifest) -> str:
    doc = {
        "arch_id": manifest.arch_id,
        "params": {
            "xi": manifest.params.xi,
            "omega": manifest.params.omega,
            "alpha": manifest.params.alpha,
        },
        "template": manifest.template,
        "counts": list(manifest.counts),
        "parameter_count": manifest.parameter_count,
        "dataset": manifest.dataset,
        "epochs": manifest.epochs,
        "batch_size": manifest.batch_size,
        "weight_decay": manifest.weight_decay,
        "schedule": {
            "eta_max": manifest.schedule.eta_max,
            "eta_min": manifest.schedule.eta_min,
            "first_cycle": manifest.schedule.first_cycle,
            "cycle_mult": manifest.schedule.cycle_mult,
        },
        "augmentation": {
            "horizontal_flip": manifest.augmentation.horizontal_flip,
            "translate_pixels": manifest.augmentation.translate_pixels,
        },
        "resize_to": list(manifest.resize_to),
        "init_scheme": manifest.init_scheme,
        "bn_epsilon": manifest.bn_epsilon,
        "seed": manifest.seed,
    }
    return json.dumps(doc, indent=2) + "\n"


def _require_keys(doc: dict, expected: Sequence[str], context: str) -> None:
    missing = [k for k in expected if k not in doc]
    extra = [k for k in doc if k not in expected]
    if missing or extra:
        raise ValueError(
            f"{context}: missing keys {missing or 'none'}, unexpected keys {extra or 'none'}"
        )


def manifest_from_json(text: str) -> ExperimentManifest:
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("manifest must be a JSON object")
    _require_keys(
        doc,
        (
            "arch_id", "params", "template", "counts", "parameter_count",
            "dataset", "epochs", "batch_size", "weight_decay", "schedule",
            "augmentation", "resize_to", "init_scheme", "bn_epsilon", "seed",
        ),
        "manifest",
    )
    _require_keys(doc["params"], ("xi", "omega", "alpha"), "manifest params")
    _require_keys(
        doc["schedule"],
        ("eta_max", "eta_min", "first_cycle", "cycle_mult"),
        "manifest schedule",
    )
    _require_keys(
        doc["augmentation"], ("horizontal_flip", "translate_pixels"), "manifest augmentation"
    )
    schedule = ScheduleParams(
        eta_max=float(doc["schedule"]["eta_max"]),
        eta_min=float(doc["schedule"]["eta_min"]),
        first_cycle=int(doc["schedule"]["first_cycle"]),
        cycle_mult=int(doc["schedule"]["cycle_mult"]),
        total_epochs=int(doc["epochs"]),
    )
    return ExperimentManifest(
        arch_id=str(doc["arch_id"]),
        params=SkewNormalParams(
            xi=float(doc["params"]["xi"]),
            omega=float(doc["params"]["omega"]),
            alpha=float(doc["params"]["alpha"]),
        ),
        template=str(doc["template"]),
        counts=tuple(int(c) for c in doc["counts"]),
        parameter_count=int(doc["parameter_count"]),
        dataset=str(doc["dataset"]),
        epochs=int(doc["epochs"]),
        batch_size=int(doc["batch_size"]),
        weight_decay=float(doc["weight_decay"]),
        schedule=schedule,
        augmentation=Augmentation(
            horizontal_flip=bool(doc["augmentation"]["horizontal_flip"]),
            translate_pixels=int(doc["augmentation"]["translate_pixels"]),
        ),
        resize_to=(int(doc["resize_to"][0]), int(doc["resize_to"][1])),
        init_scheme=str(doc["init_scheme"]),
        bn_epsilon=float(doc["bn_epsilon"]),
        seed=int(doc["seed"]),
    )


def write_manifests(
    specs: Sequence[ArchitectureSpec],
    dataset: str,
    output_dir,
    *,
    epochs: int | None = None,
    seed: int = 0,
) -> int:
    """Write ``<arch_id>.manifest.json`` per spec; returns the file count.

    Files are written to a temporary name and renamed into place, so readers
    never observe a partial manifest.
    """
    if not specs:
        raise ValueError("no architectures to write manifests for")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for spec in specs:
        manifest = manifest_for(spec, dataset, epochs=epochs, seed=seed)
        target = out / f"{manifest.arch_id}.manifest.json"
        tmp = target.with_suffix(".json.tmp")
        tmp.write_text(manifest_to_json(manifest), encoding="utf-8")
        os.replace(tmp, target)
    return len(specs)


def read_manifests(directory) -> list[ExperimentManifest]:
    """Parse every ``*.manifest.json`` under ``directory``, sorted by file name."""
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"manifest directory {root} does not exist")
    manifests = []
    for path in sorted(root.glob("*.manifest.json")):
        try:
            manifests.append(manifest_from_json(path.read_text(encoding="utf-8")))
        except (ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"{path}: {exc}") from exc
    if not manifests:
        raise ValueError(f"no manifests found under {root}")
    return manifests


@dataclass(frozen=True)
class RunResult:
    arch_id: str
    dataset: str
    epoch: int
    val_accuracy: float
    seed: int

    def __post_init__(self) -> None:
        if self.epoch < 1:
            raise ValueError("epoch must be >= 1")
        if not 0.0 <= self.val_accuracy <= 1.0:
            raise ValueError(f"val_accuracy {self.val_accuracy} outside [0, 1]")

    @property
    def key(self) -> tuple[str, str, int, int]:
        return (self.arch_id, self.dataset, self.epoch, self.seed)


def ingest_results(path) -> list[RunResult]:
    """Parse a results CSV, rejecting malformed rows and duplicate keys.

    Every failure names the offending line; a file either parses completely
    or raises, never silently dropping rows.
    """
    source = Path(path)
    if not source.is_file():
        raise FileNotFoundError(f"results file {source} does not exist")
    results: list[RunResult] = []
    seen: set[tuple] = set()
    with source.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ResultsParseError(source, 1, "empty file, expected header") from None
        if tuple(header) != RESULTS_HEADER:
            raise ResultsParseError(
                source, 1, f"bad header {header!r}, expected {','.join(RESULTS_HEADER)}"
            )
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ResultsParseError(source, line, f"expected 5 fields, got {len(row)}")
            arch_id, dataset, epoch_s, acc_s, seed_s = (field.strip() for field in row)
            if not arch_id or not dataset:
                raise ResultsParseError(source, line, "empty arch_id or dataset")
            try:
                epoch = int(epoch_s)
                seed = int(seed_s)
                accuracy = float(acc_s)
            except ValueError:
                raise ResultsParseError(source, line, f"unparseable row {row!r}") from None
            if not math.isfinite(accuracy) or not 0.0 <= accuracy <= 1.0:
                raise ResultsParseError(
                    source, line, f"val_accuracy {acc_s} outside [0, 1]"
                )
            if epoch < 1:
                raise ResultsParseError(source, line, f"epoch {epoch} must be >= 1")
            result = RunResult(arch_id, dataset, epoch, accuracy, seed)
            if result.key in seen:
                raise ResultsConflictError(source, line, result.key)
            seen.add(result.key)
            results.append(result)
    return results


def results_to_csv(results: Iterable[RunResult]) -> str:
    lines = [",".join(RESULTS_HEADER)]
    for r in results:
        lines.append(f"{r.arch_id},{r.dataset},{r.epoch},{r.val_accuracy!r},{r.seed}")
    return "\n".join(lines) + "\n"


ArchSource = Union[ArchitectureSpec, ExperimentManifest]


@dataclass(frozen=True)
class _ArchInfo:
    arch_id: str
    xi: float
    omega: float
    alpha: float
    parameter_count: int


def _arch_index(specs: Iterable[ArchSource]) -> dict[str, _ArchInfo]:
    index: dict[str, _ArchInfo] = {}
    for spec in specs:
        index[spec.arch_id] = _ArchInfo(
            arch_id=spec.arch_id,
            xi=spec.params.xi,
            omega=spec.params.omega,
            alpha=spec.params.alpha,
            parameter_count=spec.parameter_count,
        )
    if not index:
        raise ValueError("no architecture descriptions given")
    return index


def _trajectories(
    results: Sequence[RunResult], index: dict[str, _ArchInfo]
) -> dict[tuple[str, str, int], list[RunResult]]:
    if not results:
        raise ValueError("no results to aggregate")
    grouped: dict[tuple[str, str, int], list[RunResult]] = {}
    for result in results:
        if result.arch_id not in index:
            raise ValueError(f"result references unknown architecture {result.arch_id!r}")
        grouped.setdefault((result.dataset, result.arch_id, result.seed), []).append(result)
    for runs in grouped.values():
        runs.sort(key=lambda r: r.epoch)
    return grouped


@dataclass(frozen=True)
class BestPerXi:
    dataset: str
    xi: float
    arch_id: str
    omega: float
    alpha: float
    parameter_count: int
    seed: int
    final_accuracy: float
    trajectory: tuple[tuple[int, float], ...]


def best_per_xi(
    results: Sequence[RunResult], specs: Iterable[ArchSource]
) -> list[BestPerXi]:
    """Winner per (dataset, xi): highest final-epoch accuracy, ties broken by
    lower parameter count, then lexicographic (omega, alpha), then seed.

    Returns the winners with their full per-epoch trajectories, sorted by
    (dataset, xi).
    """
    index = _arch_index(specs)
    grouped = _trajectories(results, index)
    candidates: dict[tuple[str, float], list] = {}
    for (dataset, arch_id, seed), runs in grouped.items():
        info = index[arch_id]
        final = runs[-1].val_accuracy
        rank = (-final, info.parameter_count, info.omega, info.alpha, seed, arch_id)
        entry = BestPerXi(
            dataset=dataset,
            xi=info.xi,
            arch_id=arch_id,
            omega=info.omega,
            alpha=info.alpha,
            parameter_count=info.parameter_count,
            seed=seed,
            final_accuracy=final,
            trajectory=tuple((r.epoch, r.val_accuracy) for r in runs),
        )
        candidates.setdefault((dataset, info.xi), []).append((rank, entry))
    winners = []
    for key in sorted(candidates):
        ranked = sorted(candidates[key], key=lambda pair: pair[0])
        winners.append(ranked[0][1])
    return winners


@dataclass(frozen=True)
class ScatterRow:
    dataset: str
    xi: float
    omega: float
    alpha: float
    parameter_count: int
    final_accuracy: float


def scatter_data(
    results: Sequence[RunResult], specs: Iterable[ArchSource]
) -> list[ScatterRow]:
    """One row per (architecture, dataset) with its final-epoch accuracy.

    With several seeds for the same architecture the best final accuracy is
    reported.  Rows are sorted by (dataset, xi, omega, alpha).
    """
    index = _arch_index(specs)
    grouped = _trajectories(results, index)
    best: dict[tuple[str, str], float] = {}
    for (dataset, arch_id, _seed), runs in grouped.items():
        final = runs[-1].val_accuracy
        key = (dataset, arch_id)
        if key not in best or final > best[key]:
            best[key] = final
    rows = [
        ScatterRow(
            dataset=dataset,
            xi=index[arch_id].xi,
            omega=index[arch_id].omega,
            alpha=index[arch_id].alpha,
            parameter_count=index[arch_id].parameter_count,
            final_accuracy=final,
        )
        for (dataset, arch_id), final in best.items()
    ]
    rows.sort(key=lambda r: (r.dataset, r.xi, r.omega, r.alpha))
    return rows


def best_per_xi_csv(winners: Sequence[BestPerXi]) -> str:
    lines = ["dataset,xi,arch_id,omega,alpha,parameter_count,seed,epoch,val_accuracy"]
    for w in winners:
        for epoch, accuracy in w.trajectory:
            lines.append(
                f"{w.dataset},{w.xi!r},{w.arch_id},{w.omega!r},{w.alpha!r},"
                f"{w.parameter_count},{w.seed},{epoch},{accuracy!r}"
            )
    return "\n".join(lines) + "\n"


def scatter_csv(rows: Sequence[ScatterRow]) -> str:
    lines = ["dataset,xi,omega,alpha,parameter_count,final_val_accuracy"]
    for r in rows:
        lines.append(
            f"{r.dataset},{r.xi!r},{r.omega!r},{r.alpha!r},"
            f"{r.parameter_count},{r.final_accuracy!r}"
        )
    return "\n".join(lines) + "\n"
