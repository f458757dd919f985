"""Dataset ingestion, synthetic generation, standardization, and splitting.

The canonical CSV schema is ``temperature,ph,ec,do,wqi`` (lowercase header,
comma separator, ``.`` decimal, UTF-8). All feature matrices are float64
numpy arrays with one row per sample and columns in that feature order.
"""
from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ClassTooSmall,
    DimensionMismatch,
    EmptyFile,
    MissingColumn,
    NonFiniteInput,
    NonNumericCell,
    TooFewRows,
    ZeroVariance,
)

FEATURE_NAMES = ("temperature", "ph", "ec", "do")
TARGET_NAME = "wqi"


class Task(enum.Enum):
    REGRESSION = "regression"
    CLASSIFICATION = "classification"


class WqiClass(enum.Enum):
    """Water quality class with its fixed label-encoding code.

    The code<->label bijection is frozen: 0=Average, 1=Good, 2=Poor.
    """

    AVERAGE = 0
    GOOD = 1
    POOR = 2

    @property
    def code(self) -> int:
        return self.value

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_code(cls, code: int) -> "WqiClass":
        return cls(code)


N_CLASSES = 3


@dataclass(frozen=True)
class Sample:
    """One measurement: temperature (degC), ph, ec (uS/cm), do (mg/L)."""

    temperature: float
    ph: float
    ec: float
    do: float
    wqi: float | None = None

    def __post_init__(self):
        for name in FEATURE_NAMES:
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise NonFiniteInput(f"sample field {name!r} is not a finite number: {v!r}")

    def features(self) -> np.ndarray:
        return np.array([[self.temperature, self.ph, self.ec, self.do]], dtype=np.float64)


def classify_wqi(wqi: float) -> WqiClass:
    """Map a WQI value to its class: <75 Good, [75, 100] Average, >100 Poor."""
    if not math.isfinite(wqi):
        raise NonFiniteInput(f"wqi value is not finite: {wqi!r}")
    if wqi > 100.0:
        return WqiClass.POOR
    if wqi >= 75.0:
        return WqiClass.AVERAGE
    return WqiClass.GOOD


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """An n x d feature matrix plus per-row targets.

    Targets hold WQI values for regression or class codes {0,1,2} for
    classification. Arrays are read-only so instances can be shared freely.
    """

    features: np.ndarray
    targets: np.ndarray
    feature_names: tuple[str, ...] = FEATURE_NAMES
    task: Task = Task.REGRESSION

    def __post_init__(self):
        feats = _readonly(np.atleast_2d(self.features))
        targs = _readonly(np.asarray(self.targets, dtype=np.float64).reshape(-1))
        if feats.shape[0] != targs.shape[0]:
            raise DimensionMismatch(
                f"{feats.shape[0]} feature rows but {targs.shape[0]} targets"
            )
        if not np.all(np.isfinite(feats)) or not np.all(np.isfinite(targs)):
            raise NonFiniteInput("dataset contains non-finite cells")
        if self.task is Task.CLASSIFICATION:
            codes = np.unique(targs)
            if not np.all(np.isin(codes, (0.0, 1.0, 2.0))):
                raise ValueError(f"classification targets outside {{0,1,2}}: {codes}")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "targets", targs)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def class_codes(self) -> np.ndarray:
        return self.targets.astype(np.int64)

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.targets[idx], self.feature_names, self.task)


def to_classification(dataset: Dataset) -> Dataset:
    """Re-target a regression dataset with class codes from its WQI values."""
    codes = np.array([classify_wqi(w).code for w in dataset.targets], dtype=np.float64)
    return Dataset(dataset.features, codes, dataset.feature_names, Task.CLASSIFICATION)


@dataclass(frozen=True)
class Scaler:
    """Per-column standardization parameters (population statistics)."""

    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "means", _readonly(np.asarray(self.means).reshape(-1)))
        object.__setattr__(self, "stds", _readonly(np.asarray(self.stds).reshape(-1)))
        if np.any(self.stds <= 0.0):
            raise ZeroVariance(str(int(np.argmax(self.stds <= 0.0))))

    @property
    def d(self) -> int:
        return self.means.shape[0]


class Direction(enum.Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


def fit_scaler(features: np.ndarray, feature_names=FEATURE_NAMES) -> Scaler:
    """Fit column means and population (1/n) standard deviations.

    Rejects matrices with fewer than two rows or any zero-variance column.
    """
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if x.shape[0] < 2:
        raise TooFewRows(f"need at least 2 rows to fit a scaler, got {x.shape[0]}")
    means = x.mean(axis=0)
    stds = x.std(axis=0)  # population (ddof=0)
    for i, s in enumerate(stds):
        if s <= 0.0:
            name = feature_names[i] if i < len(feature_names) else str(i)
            raise ZeroVariance(name)
    return Scaler(means, stds)


def apply_scaler(scaler: Scaler, features: np.ndarray, direction: Direction) -> np.ndarray:
    """Standardize (FORWARD: (x-mean)/std) or undo it (INVERSE: x*std+mean)."""
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if x.shape[1] != scaler.d:
        raise DimensionMismatch(f"matrix has {x.shape[1]} columns, scaler has {scaler.d}")
    if direction is Direction.FORWARD:
        return (x - scaler.means) / scaler.stds
    return x * scaler.stds + scaler.means


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(dataset: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic train/test split preserving class proportions.

    Per-class test counts are round(class_count * test_fraction). Regression
    datasets are treated as a single stratum. The split is a pure function
    of (dataset, test_fraction, seed) via a PCG64 stream.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.Generator(np.random.PCG64(seed))
    test_idx: list[np.ndarray] = []
    train_idx: list[np.ndarray] = []
    if dataset.task is Task.CLASSIFICATION:
        codes = dataset.class_codes()
        for code in sorted(np.unique(codes)):
            members = np.flatnonzero(codes == code)
            if members.size < 2:
                raise ClassTooSmall(int(code), int(members.size), 2)
            order = rng.permutation(members)
            n_test = _round_half_up(members.size * test_fraction)
            test_idx.append(order[:n_test])
            train_idx.append(order[n_test:])
    else:
        order = rng.permutation(dataset.n)
        n_test = _round_half_up(dataset.n * test_fraction)
        test_idx.append(order[:n_test])
        train_idx.append(order[n_test:])
    # sorted original order keeps downstream training independent of the
    # shuffle used to pick membership
    train = np.sort(np.concatenate(train_idx))
    test = np.sort(np.concatenate(test_idx))
    return dataset.subset(train), dataset.subset(test)


@dataclass(frozen=True)
class SyntheticConfig:
    """Configuration for the synthetic WQI data generator.

    The target formula is
        wqi = base + ph_weight*|ph-7| + ec_weight*ec
              + do_weight*max(0, 6-do) + temp_weight*|temperature-22| + noise
    with noise ~ Normal(0, noise_sd) from a PCG64 stream.
    """

    n: int
    seed: int = 0
    noise_sd: float = 2.0
    # base 25 keeps every class above 20% of rows across seeds
    base: float = 25.0
    ph_weight: float = 18.0
    ec_weight: float = 0.04
    do_weight: float = 6.0
    temp_weight: float = 0.8

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.noise_sd < 0:
            raise ValueError(f"noise_sd must be >= 0, got {self.noise_sd}")


# uniform sampling ranges per feature, column order temperature, ph, ec, do
FEATURE_RANGES = ((10.0, 35.0), (5.5, 9.0), (100.0, 1500.0), (2.0, 10.0))


def synthetic_wqi_formula(features: np.ndarray, config: SyntheticConfig) -> np.ndarray:
    """Noise-free target for each feature row; the generator's own oracle."""
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    temp, ph, ec, do = x[:, 0], x[:, 1], x[:, 2], x[:, 3]
    return (
        config.base
        + config.ph_weight * np.abs(ph - 7.0)
        + config.ec_weight * ec
        + config.do_weight * np.maximum(0.0, 6.0 - do)
        + config.temp_weight * np.abs(temp - 22.0)
    )


def generate_synthetic(config: SyntheticConfig) -> Dataset:
    """Draw a seeded synthetic regression dataset.

    Columns are drawn uniformly, one block per feature in canonical order,
    then one noise vector, so the whole dataset is a pure function of the
    config.
    """
    rng = np.random.Generator(np.random.PCG64(config.seed))
    cols = [rng.uniform(lo, hi, config.n) for lo, hi in FEATURE_RANGES]
    features = np.column_stack(cols)
    wqi = synthetic_wqi_formula(features, config)
    if config.noise_sd > 0:
        wqi = wqi + rng.normal(0.0, config.noise_sd, config.n)
    return Dataset(features, wqi, FEATURE_NAMES, Task.REGRESSION)


def load_generator_config(path, overrides: dict | None = None) -> SyntheticConfig:
    """Read a JSON key-value config file for the generator.

    Documented keys: n, seed, noise_sd, base, ph_weight, ec_weight,
    do_weight, temp_weight. ``overrides`` wins over file values.
    """
    values = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(values, dict):
        raise ValueError(f"generator config {path} must be a JSON object")
    allowed = {"n", "seed", "noise_sd", "base", "ph_weight", "ec_weight", "do_weight", "temp_weight"}
    unknown = set(values) - allowed
    if unknown:
        raise ValueError(f"unknown generator config keys: {sorted(unknown)}")
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return SyntheticConfig(**values)


def load_csv(path, task: Task) -> Dataset:
    """Read a canonical CSV file into a Dataset.

    For CLASSIFICATION the wqi column is thresholded via classify_wqi and
    stored as class codes. Cells that do not parse to a finite float raise
    NonNumericCell with the 1-based data row and column name.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(path) from None
        header = [h.strip() for h in header]
        col_index = {}
        for name in FEATURE_NAMES + (TARGET_NAME,):
            if name not in header:
                raise MissingColumn(name)
            col_index[name] = header.index(name)

        rows = []
        for row_num, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            values = []
            for name in FEATURE_NAMES + (TARGET_NAME,):
                cell = row[col_index[name]] if col_index[name] < len(row) else ""
                try:
                    v = float(cell)
                except ValueError:
                    raise NonNumericCell(row_num, name, cell) from None
                if not math.isfinite(v):
                    raise NonNumericCell(row_num, name, cell)
                values.append(v)
            rows.append(values)

    if not rows:
        raise EmptyFile(path)
    arr = np.asarray(rows, dtype=np.float64)
    features, wqi = arr[:, :4], arr[:, 4]
    if task is Task.CLASSIFICATION:
        codes = np.array([classify_wqi(w).code for w in wqi], dtype=np.float64)
        return Dataset(features, codes, FEATURE_NAMES, Task.CLASSIFICATION)
    return Dataset(features, wqi, FEATURE_NAMES, Task.REGRESSION)


def write_csv(dataset: Dataset, path) -> None:
    """Write a regression dataset in the canonical CSV format.

    Floats are written with repr so a write/read round-trip is exact.
    """
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(FEATURE_NAMES + (TARGET_NAME,))
        for x, y in zip(dataset.features, dataset.targets):
            writer.writerow([repr(float(v)) for v in x] + [repr(float(y))])
