"""Classification/regression metrics, stratified k-fold CV, and nested CV.

A "model recipe" is any callable taking a training Dataset and returning a
prediction function over raw feature matrices. All preprocessing a recipe
needs (scaling, SMOTE) must happen inside the recipe so held-out fold rows
never leak into fitting.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .data import Dataset, Task
from .errors import (
    ClassSmallerThanK,
    CodeOutOfRange,
    ConstantObserved,
    Empty,
    EmptyMatrix,
    LengthMismatch,
)

ModelRecipe = Callable[[Dataset], Callable[[np.ndarray], np.ndarray]]


class Score:
    ACCURACY = "accuracy"
    R2 = "r2"
    RMSE = "rmse"


# --- confusion matrix and classification report --------------------------------

@dataclass(frozen=True)
class ConfusionMatrix:
    """k x k counts; rows are actual classes, columns predicted classes."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"counts must be square, got {c.shape}")
        if np.any(c < 0):
            raise ValueError("counts must be nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def k(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion_matrix(actual, predicted, k: int) -> ConfusionMatrix:
    a = np.asarray(actual).reshape(-1).astype(np.int64)
    p = np.asarray(predicted).reshape(-1).astype(np.int64)
    if a.size != p.size:
        raise LengthMismatch(f"{a.size} actual vs {p.size} predicted")
    if a.size and (a.min() < 0 or a.max() >= k or p.min() < 0 or p.max() >= k):
        raise CodeOutOfRange(f"codes must lie in [0, {k})")
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (a, p), 1)
    return ConfusionMatrix(counts)


@dataclass(frozen=True)
class ClassificationReport:
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f1: tuple[float, ...]
    support: tuple[int, ...]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def classification_report(cm: ConfusionMatrix) -> ClassificationReport:
    """Per-class precision/recall/F1 with macro and support-weighted means.

    Any 0/0 metric is reported as 0, the usual convention for empty
    predicted or actual classes.
    """
    if cm.total == 0:
        raise EmptyMatrix("cannot report on an empty confusion matrix")
    counts = cm.counts.astype(np.float64)
    tp = np.diag(counts)
    support = counts.sum(axis=1)
    predicted = counts.sum(axis=0)
    precision = np.array([_safe_div(tp[i], predicted[i]) for i in range(cm.k)])
    recall = np.array([_safe_div(tp[i], support[i]) for i in range(cm.k)])
    f1 = np.array(
        [_safe_div(2 * precision[i] * recall[i], precision[i] + recall[i]) for i in range(cm.k)]
    )
    weights = support / cm.total
    return ClassificationReport(
        precision=tuple(precision),
        recall=tuple(recall),
        f1=tuple(f1),
        support=tuple(int(s) for s in support),
        accuracy=float(tp.sum() / cm.total),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        weighted_precision=float(np.dot(weights, precision)),
        weighted_recall=float(np.dot(weights, recall)),
        weighted_f1=float(np.dot(weights, f1)),
    )


# --- regression metrics ---------------------------------------------------------

def rmse(observed, predicted) -> float:
    """Root mean squared error between observed and predicted vectors."""
    x = np.asarray(observed, dtype=np.float64).reshape(-1)
    y = np.asarray(predicted, dtype=np.float64).reshape(-1)
    if x.size != y.size:
        raise LengthMismatch(f"{x.size} observed vs {y.size} predicted")
    if x.size == 0:
        raise Empty("rmse needs at least one value")
    return float(np.sqrt(np.mean((x - y) ** 2)))


def r2(observed, predicted) -> float:
    """Coefficient of determination: (SS_tot - SS_res) / SS_tot."""
    x = np.asarray(observed, dtype=np.float64).reshape(-1)
    y = np.asarray(predicted, dtype=np.float64).reshape(-1)
    if x.size != y.size:
        raise LengthMismatch(f"{x.size} observed vs {y.size} predicted")
    if x.size < 2:
        raise Empty("r2 needs at least two values")
    ss_tot = float(np.sum((x - x.mean()) ** 2))
    if ss_tot == 0.0:
        raise ConstantObserved("observed values are constant; r2 undefined")
    ss_res = float(np.sum((x - y) ** 2))
    return (ss_tot - ss_res) / ss_tot


def _score(kind: str, actual: np.ndarray, predicted: np.ndarray) -> float:
    if kind == Score.ACCURACY:
        return float(np.mean(actual.astype(np.int64) == predicted.astype(np.int64)))
    if kind == Score.R2:
        return r2(actual, predicted)
    if kind == Score.RMSE:
        return rmse(actual, predicted)
    raise ValueError(f"unknown score kind {kind!r}")


# --- cross-validation ------------------------------------------------------------

@dataclass(frozen=True)
class CvSummary:
    fold_scores: tuple[float, ...]
    mean: float
    sample_sd: float


def make_cv_summary(fold_scores) -> CvSummary:
    """Aggregate fold scores with mean and sample (n-1) standard deviation."""
    scores = tuple(float(s) for s in fold_scores)
    arr = np.asarray(scores)
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return CvSummary(scores, float(arr.mean()), sd)


def stratified_fold_indices(dataset: Dataset, k: int, seed: int) -> list[np.ndarray]:
    """Partition row indices into k folds preserving class proportions.

    Per class, indices are shuffled by a PCG64(seed) stream and dealt
    round-robin, so per-class fold sizes differ by at most one. Regression
    datasets form a single stratum. Each fold comes back sorted.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    rng = np.random.Generator(np.random.PCG64(seed))
    folds: list[list[int]] = [[] for _ in range(k)]
    if dataset.task is Task.CLASSIFICATION:
        codes = dataset.class_codes()
        strata = [np.flatnonzero(codes == c) for c in sorted(np.unique(codes))]
        for code, members in zip(sorted(np.unique(codes)), strata):
            if members.size < k:
                raise ClassSmallerThanK(int(code), int(members.size), k)
    else:
        if dataset.n < k:
            raise ClassSmallerThanK(0, dataset.n, k)
        strata = [np.arange(dataset.n)]
    for members in strata:
        order = rng.permutation(members)
        for i, row in enumerate(order):
            folds[i % k].append(int(row))
    return [np.sort(np.asarray(f, dtype=np.int64)) for f in folds]


def stratified_kfold_cv(
    dataset: Dataset,
    k: int,
    seed: int,
    recipe: ModelRecipe,
    score: str,
) -> CvSummary:
    """Train on k-1 folds, score the held-out fold, aggregate over folds."""
    folds = stratified_fold_indices(dataset, k, seed)
    scores = []
    for i, test_idx in enumerate(folds):
        train_idx = np.sort(np.concatenate([f for j, f in enumerate(folds) if j != i]))
        predict = recipe(dataset.subset(train_idx))
        predicted = predict(dataset.features[test_idx])
        scores.append(_score(score, dataset.targets[test_idx], np.asarray(predicted)))
    return make_cv_summary(scores)


# --- nested cross-validation ------------------------------------------------------

@dataclass(frozen=True)
class HyperParams:
    batch_size: int
    learning_rate: float
    dropout_rate: float


@dataclass(frozen=True)
class GridSpec:
    """Candidate hyperparameter lists, enumerated batch-major, then
    learning rate, then dropout; ties in score resolve to the earliest."""

    batch_sizes: tuple[int, ...] = (16, 32)
    learning_rates: tuple[float, ...] = (0.01, 0.001)
    dropout_rates: tuple[float, ...] = (0.0, 0.2)

    def __post_init__(self):
        if not (self.batch_sizes and self.learning_rates and self.dropout_rates):
            raise ValueError("every grid axis needs at least one candidate")

    def combos(self) -> list[HyperParams]:
        return [
            HyperParams(b, lr, dr)
            for b, lr, dr in itertools.product(self.batch_sizes, self.learning_rates, self.dropout_rates)
        ]


@dataclass(frozen=True)
class NestedFoldResult:
    fold: int
    chosen: HyperParams
    r2: float
    rmse: float
    outer_test_indices: tuple[int, ...]
    inner_fold_indices: tuple[tuple[int, ...], ...]  # original dataset coordinates


@dataclass(frozen=True)
class NestedCvReport:
    folds: tuple[NestedFoldResult, ...]
    r2_mean: float
    r2_sd: float
    rmse_mean: float
    rmse_sd: float


def _inner_seed(seed: int, outer_fold: int) -> int:
    return seed + 10007 * (outer_fold + 1)


def nested_cv(
    dataset: Dataset,
    outer_k: int,
    inner_k: int,
    grid: GridSpec,
    seed: int,
    recipe_factory: Callable[[HyperParams], ModelRecipe],
    score: str = Score.R2,
) -> NestedCvReport:
    """Grid-search hyperparameters per outer fold, score on the outer test.

    Inner CV runs only on the outer-train rows; the winning combo retrains
    on the full outer-train portion and is scored (r2, rmse) on the outer
    test fold. Fold index sets are recorded in original dataset coordinates
    so leakage can be audited after the fact.
    """
    outer_folds = stratified_fold_indices(dataset, outer_k, seed)
    combos = grid.combos()
    higher_is_better = score != Score.RMSE
    results = []
    for i, test_idx in enumerate(outer_folds):
        train_idx = np.sort(np.concatenate([f for j, f in enumerate(outer_folds) if j != i]))
        outer_train = dataset.subset(train_idx)
        inner_folds = stratified_fold_indices(outer_train, inner_k, _inner_seed(seed, i))

        best_combo = None
        best_score = None
        for combo in combos:
            recipe = recipe_factory(combo)
            inner_scores = []
            for j, inner_test in enumerate(inner_folds):
                inner_train = np.sort(
                    np.concatenate([f for m, f in enumerate(inner_folds) if m != j])
                )
                predict = recipe(outer_train.subset(inner_train))
                predicted = predict(outer_train.features[inner_test])
                inner_scores.append(_score(score, outer_train.targets[inner_test], np.asarray(predicted)))
            mean_score = float(np.mean(inner_scores))
            better = (
                best_score is None
                or (higher_is_better and mean_score > best_score)
                or (not higher_is_better and mean_score < best_score)
            )
            if better:
                best_score = mean_score
                best_combo = combo

        predict = recipe_factory(best_combo)(outer_train)
        predicted = np.asarray(predict(dataset.features[test_idx]))
        actual = dataset.targets[test_idx]
        results.append(
            NestedFoldResult(
                fold=i + 1,
                chosen=best_combo,
                r2=r2(actual, predicted),
                rmse=rmse(actual, predicted),
                outer_test_indices=tuple(int(v) for v in test_idx),
                inner_fold_indices=tuple(
                    tuple(int(train_idx[v]) for v in fold) for fold in inner_folds
                ),
            )
        )
    r2s = make_cv_summary([f.r2 for f in results])
    rmses = make_cv_summary([f.rmse for f in results])
    return NestedCvReport(tuple(results), r2s.mean, r2s.sample_sd, rmses.mean, rmses.sample_sd)


# --- table formatting and CSV export ----------------------------------------------

def format_classification_report(report: ClassificationReport, labels=None) -> str:
    """Aligned text table: per-class rows, accuracy, macro and weighted rows."""
    k = len(report.precision)
    labels = labels or [str(i) for i in range(k)]
    rows = [("Class", "Precision", "Recall", "F1-score", "Support")]
    for i in range(k):
        rows.append(
            (labels[i], f"{report.precision[i]:.2f}", f"{report.recall[i]:.2f}",
             f"{report.f1[i]:.2f}", str(report.support[i]))
        )
    total = sum(report.support)
    rows.append(("Accuracy", "", "", f"{report.accuracy:.2f}", str(total)))
    rows.append(("Macro Avg", f"{report.macro_precision:.2f}", f"{report.macro_recall:.2f}",
                 f"{report.macro_f1:.2f}", str(total)))
    rows.append(("Weighted Avg", f"{report.weighted_precision:.2f}", f"{report.weighted_recall:.2f}",
                 f"{report.weighted_f1:.2f}", str(total)))
    widths = [max(len(r[c]) for r in rows) for c in range(5)]
    lines = ["  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip() for row in rows]
    return "\n".join(lines)


def format_cv_summary(summary: CvSummary, score_name: str = "Accuracy") -> str:
    rows = [("Fold", score_name)]
    for i, s in enumerate(summary.fold_scores, start=1):
        rows.append((str(i), f"{s:.4f}"))
    rows.append(("Mean", f"{summary.mean:.4f}"))
    rows.append(("SD", f"{summary.sample_sd:.4f}"))
    widths = [max(len(r[c]) for r in rows) for c in range(2)]
    return "\n".join("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip() for row in rows)


def format_nested_report(report: NestedCvReport) -> str:
    rows = [("Fold", "R2 Score", "RMSE", "Chosen (batch, lr, dropout)")]
    for f in report.folds:
        rows.append(
            (str(f.fold), f"{f.r2:.4f}", f"{f.rmse:.4f}",
             f"({f.chosen.batch_size}, {f.chosen.learning_rate}, {f.chosen.dropout_rate})")
        )
    rows.append(
        ("Mean +/- Std Dev", f"{report.r2_mean:.2f} +/- {report.r2_sd:.2f}",
         f"{report.rmse_mean:.2f} +/- {report.rmse_sd:.2f}", "")
    )
    widths = [max(len(r[c]) for r in rows) for c in range(4)]
    return "\n".join("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip() for row in rows)


def cv_summary_to_csv(summary: CvSummary, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold", "score"])
        for i, s in enumerate(summary.fold_scores, start=1):
            writer.writerow([i, repr(s)])
        writer.writerow(["mean", repr(summary.mean)])
        writer.writerow(["sd", repr(summary.sample_sd)])
