"""SMOTE oversampling: equalize class counts by interpolating minority rows.

Runs on raw (unscaled) features; neighbor distances are Euclidean and the
search is exact brute force, which is plenty at desk scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, Task
from .errors import ClassTooSmall, NotClassification


@dataclass(frozen=True)
class SmoteConfig:
    k_neighbors: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError(f"k_neighbors must be >= 1, got {self.k_neighbors}")


@dataclass(frozen=True)
class SyntheticOrigin:
    """Provenance of one synthetic row: parent/neighbor dataset indices and u."""

    parent_index: int
    neighbor_index: int
    u: float
    class_code: int


def _nearest_same_class(features: np.ndarray, members: np.ndarray, k: int) -> np.ndarray:
    """Indices (into ``members``) of each member's k nearest class-mates.

    Ties in distance break toward the lower original row index; self is
    excluded by index, so duplicate rows remain valid neighbors.
    """
    pts = features[members]
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=2)
    n = members.size
    neighbors = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        order = np.argsort(d2[i], kind="stable")
        order = order[order != i]
        neighbors[i] = order[:k]
    return neighbors


def smote_resample(dataset: Dataset, config: SmoteConfig) -> Dataset:
    """Oversample every minority class up to the majority count."""
    return smote_resample_detailed(dataset, config)[0]


def smote_resample_detailed(dataset: Dataset, config: SmoteConfig) -> tuple[Dataset, list[SyntheticOrigin]]:
    """SMOTE with per-synthetic-row provenance (used by verification tests).

    Original rows come first in their original order; synthetic rows follow,
    grouped by ascending class code. For each synthetic row a parent is drawn
    uniformly among the class's original rows, a neighbor uniformly among its
    k nearest class-mates (k clamped to class_count - 1), and the new row is
    parent + u * (neighbor - parent) with u ~ Uniform[0, 1). All draws come
    from one PCG64(seed) stream in that fixed order.
    """
    if dataset.task is not Task.CLASSIFICATION:
        raise NotClassification("smote_resample requires a classification dataset")
    codes = dataset.class_codes()
    counts = {int(c): int(np.sum(codes == c)) for c in np.unique(codes)}
    for code, count in sorted(counts.items()):
        if count < 2:
            raise ClassTooSmall(code, count, 2)
    majority = max(counts.values())

    rng = np.random.Generator(np.random.PCG64(config.seed))
    new_rows: list[np.ndarray] = []
    new_codes: list[int] = []
    origins: list[SyntheticOrigin] = []
    for code in sorted(counts):
        deficit = majority - counts[code]
        if deficit == 0:
            continue
        members = np.flatnonzero(codes == code)
        k = min(config.k_neighbors, members.size - 1)
        neighbors = _nearest_same_class(dataset.features, members, k)
        for _ in range(deficit):
            pi = int(rng.integers(0, members.size))
            ni = int(neighbors[pi, int(rng.integers(0, k))])
            u = float(rng.random())
            parent = dataset.features[members[pi]]
            neighbor = dataset.features[members[ni]]
            new_rows.append(parent + u * (neighbor - parent))
            new_codes.append(code)
            origins.append(SyntheticOrigin(int(members[pi]), int(members[ni]), u, code))

    if not new_rows:
        return dataset, []
    features = np.vstack([dataset.features, np.asarray(new_rows)])
    targets = np.concatenate([dataset.targets, np.asarray(new_codes, dtype=np.float64)])
    return Dataset(features, targets, dataset.feature_names, Task.CLASSIFICATION), origins
