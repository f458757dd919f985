"""Architecture builders, train/infer pipelines, and the artifact format.

An artifact directory holds ``manifest.json`` (format_version 1: task,
graph wiring, scaler, label codec, declared parameter order) next to
``weights.bin`` (float64 little-endian, concatenated in that declared
order). A loaded artifact is self-contained for inference.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .data import (
    Dataset,
    Direction,
    N_CLASSES,
    Sample,
    Scaler,
    Task,
    WqiClass,
    apply_scaler,
    classify_wqi,
    fit_scaler,
    stratified_split,
)
from .errors import (
    BadArity,
    CorruptBlob,
    InputTooShort,
    ManifestGraphMismatch,
    UnknownVersion,
    WrongTask,
)
from .evaluation import HyperParams, ModelRecipe, r2 as r2_score, rmse as rmse_score
from .neuralnet import (
    Activation,
    Concat,
    Dense,
    Dropout,
    Flatten,
    GraphNode,
    Lstm,
    Mode,
    NetworkGraph,
    ParamStore,
    Reshape,
    TemporalConv,
    forward,
    init_network,
    param_shapes,
)
from .resample import SmoteConfig, smote_resample
from .training import AdamConfig, LossKind, TrainConfig, TrainHistory, train

FORMAT_VERSION = 1
LABEL_CODEC = {c.code: c.label for c in WqiClass}


# --- architecture builders -----------------------------------------------------

def build_mlp_classifier(input_dim: int, n_classes: int, dropout_rate: float = 0.2) -> NetworkGraph:
    """Dense64(ReLU) -> Dropout -> Dense32(ReLU) -> Dropout -> softmax head."""
    if input_dim < 1 or n_classes < 2:
        raise BadArity(f"need input_dim >= 1 and n_classes >= 2, got {input_dim}, {n_classes}")
    nodes = (
        GraphNode("dense_1", Dense(64, Activation.RELU), ("input",)),
        GraphNode("dropout_1", Dropout(dropout_rate), ("dense_1",)),
        GraphNode("dense_2", Dense(32, Activation.RELU), ("dropout_1",)),
        GraphNode("dropout_2", Dropout(dropout_rate), ("dense_2",)),
        GraphNode("head", Dense(n_classes, Activation.SOFTMAX), ("dropout_2",)),
    )
    return NetworkGraph(nodes, input_dim, "head")


def build_hybrid_regressor(input_dim: int, dropout_rate: float = 0.0) -> NetworkGraph:
    """Two-branch regressor: Conv1D(32,3)+Flatten and LSTM(64), concatenated.

    The input row is reshaped to (input_dim, 1) and fed to both branches;
    post-concat Dense64/Dense32 (ReLU) lead to a single linear output.
    Dropout after the two dense layers is off by default.
    """
    if input_dim < 3:
        raise InputTooShort(f"kernel size 3 does not fit input_dim {input_dim}")
    nodes = [
        GraphNode("reshape", Reshape((input_dim, 1)), ("input",)),
        GraphNode("conv", TemporalConv(32, 3), ("reshape",)),
        GraphNode("conv_flat", Flatten(), ("conv",)),
        GraphNode("lstm", Lstm(64), ("reshape",)),
        GraphNode("concat", Concat(), ("conv_flat", "lstm")),
        GraphNode("dense_1", Dense(64, Activation.RELU), ("concat",)),
    ]
    prev = "dense_1"
    if dropout_rate > 0:
        nodes.append(GraphNode("dropout_1", Dropout(dropout_rate), (prev,)))
        prev = "dropout_1"
    nodes.append(GraphNode("dense_2", Dense(32, Activation.RELU), (prev,)))
    prev = "dense_2"
    if dropout_rate > 0:
        nodes.append(GraphNode("dropout_2", Dropout(dropout_rate), (prev,)))
        prev = "dropout_2"
    nodes.append(GraphNode("head", Dense(1, Activation.LINEAR), (prev,)))
    return NetworkGraph(tuple(nodes), input_dim, "head")


# --- artifact -------------------------------------------------------------------

@dataclass
class ModelArtifact:
    """Self-contained trained model: graph, weights, scaler, codec, summary."""

    task: Task
    feature_names: tuple[str, ...]
    graph: NetworkGraph
    scaler: Scaler
    params: ParamStore
    training_summary: dict | None = None
    format_version: int = FORMAT_VERSION


def regressor_predict(artifact: ModelArtifact, features: np.ndarray) -> np.ndarray:
    """WQI values for raw (unscaled) feature rows."""
    if artifact.task is not Task.REGRESSION:
        raise WrongTask("regression", artifact.task.value)
    scaled = apply_scaler(artifact.scaler, features, Direction.FORWARD)
    out, _ = forward(artifact.graph, artifact.params, scaled, Mode.INFER)
    return out.reshape(-1)


def classifier_predict(artifact: ModelArtifact, features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(class codes, probability rows) for raw feature rows."""
    if artifact.task is not Task.CLASSIFICATION:
        raise WrongTask("classification", artifact.task.value)
    scaled = apply_scaler(artifact.scaler, features, Direction.FORWARD)
    probs, _ = forward(artifact.graph, artifact.params, scaled, Mode.INFER)
    return np.argmax(probs, axis=1), probs


def predict_wqi(artifact: ModelArtifact, sample: Sample) -> tuple[float, WqiClass]:
    """Scalar WQI prediction plus its threshold class."""
    wqi = float(regressor_predict(artifact, sample.features())[0])
    return wqi, classify_wqi(wqi)


def classify_sample(artifact: ModelArtifact, sample: Sample) -> tuple[WqiClass, np.ndarray]:
    """Predicted class (argmax, ties to the lowest code) and probabilities."""
    codes, probs = classifier_predict(artifact, sample.features())
    return WqiClass.from_code(int(codes[0])), probs[0]


# --- training pipeline ------------------------------------------------------------

def train_pipeline(
    raw: Dataset,
    task: Task,
    train_cfg: TrainConfig = TrainConfig(),
    adam_cfg: AdamConfig = AdamConfig(),
    smote_cfg: SmoteConfig = SmoteConfig(),
    test_fraction: float = 0.2,
    split_seed: int = 42,
    init_seed: int = 42,
    dropout_rate: float | None = None,
) -> tuple[ModelArtifact, TrainHistory]:
    """Split 80/20, fit the scaler on train, optionally SMOTE, train, evaluate.

    The scaler is fit on the pre-SMOTE training rows; SMOTE interpolates in
    raw units and the held-out 20% never contains synthetic rows. Held-out
    metrics land in the artifact's training summary.
    """
    if raw.task is not task:
        raise WrongTask(task.value, raw.task.value)
    train_raw, test_raw = stratified_split(raw, test_fraction, split_seed)
    scaler = fit_scaler(train_raw.features, raw.feature_names)
    if task is Task.CLASSIFICATION and train_cfg.smote:
        train_raw = smote_resample(train_raw, smote_cfg)
    train_scaled = Dataset(
        apply_scaler(scaler, train_raw.features, Direction.FORWARD),
        train_raw.targets, raw.feature_names, task,
    )

    if task is Task.CLASSIFICATION:
        graph = build_mlp_classifier(raw.d, N_CLASSES, dropout_rate if dropout_rate is not None else 0.2)
        train_cfg = replace(train_cfg, loss=LossKind.CROSS_ENTROPY)
    else:
        graph = build_hybrid_regressor(raw.d, dropout_rate if dropout_rate is not None else 0.0)

    params = init_network(graph, init_seed)
    best, history = train(graph, params, train_scaled, train_cfg, adam_cfg)

    artifact = ModelArtifact(task, raw.feature_names, graph, scaler, best)
    holdout: dict[str, float] = {}
    if test_raw.n:
        if task is Task.CLASSIFICATION:
            codes, _ = classifier_predict(artifact, test_raw.features)
            holdout["accuracy"] = float(np.mean(codes == test_raw.class_codes()))
        else:
            predicted = regressor_predict(artifact, test_raw.features)
            holdout["r2"] = r2_score(test_raw.targets, predicted)
            holdout["rmse"] = rmse_score(test_raw.targets, predicted)
    artifact.training_summary = {
        "epochs_run": history.epochs_run,
        "best_epoch": history.best_epoch,
        "best_validation_loss": min(history.validation_loss) if history.validation_loss else None,
        "stopped_early": history.stopped_early,
        "holdout": holdout,
    }
    return artifact, history


def make_recipe(
    task: Task,
    train_cfg: TrainConfig = TrainConfig(),
    adam_cfg: AdamConfig = AdamConfig(),
    smote_cfg: SmoteConfig = SmoteConfig(),
    init_seed: int = 42,
    dropout_rate: float | None = None,
) -> ModelRecipe:
    """Cross-validation recipe: all preprocessing happens inside the fold.

    The returned callable fits scaler (and SMOTE when configured) on the
    fold's training rows only, trains the task's architecture, and yields
    a prediction function over raw features.
    """

    def recipe(fold_train: Dataset):
        scaler = fit_scaler(fold_train.features, fold_train.feature_names)
        work = fold_train
        cfg = train_cfg
        if task is Task.CLASSIFICATION:
            if cfg.smote:
                work = smote_resample(work, smote_cfg)
            cfg = replace(cfg, loss=LossKind.CROSS_ENTROPY)
            graph = build_mlp_classifier(work.d, N_CLASSES, dropout_rate if dropout_rate is not None else 0.2)
        else:
            graph = build_hybrid_regressor(work.d, dropout_rate if dropout_rate is not None else 0.0)
        scaled = Dataset(
            apply_scaler(scaler, work.features, Direction.FORWARD),
            work.targets, work.feature_names, task,
        )
        best, _ = train(graph, init_network(graph, init_seed), scaled, cfg, adam_cfg)

        def predict(features_raw: np.ndarray) -> np.ndarray:
            scaled_x = apply_scaler(scaler, features_raw, Direction.FORWARD)
            out, _ = forward(graph, best, scaled_x, Mode.INFER)
            if task is Task.CLASSIFICATION:
                return np.argmax(out, axis=1)
            return out.reshape(-1)

        return predict

    return recipe


def grid_recipe_factory(
    task: Task,
    train_cfg: TrainConfig = TrainConfig(),
    adam_cfg: AdamConfig = AdamConfig(),
    smote_cfg: SmoteConfig = SmoteConfig(),
    init_seed: int = 42,
):
    """Map one grid point (batch, learning rate, dropout) to a recipe."""

    def factory(combo: HyperParams) -> ModelRecipe:
        cfg = replace(train_cfg, batch_size=combo.batch_size)
        if combo.learning_rate == 0.0:
            # a zero learning rate freezes the parameters, which AdamConfig
            # forbids; running zero epochs is the same model
            cfg = replace(cfg, epochs=0)
            adam = adam_cfg
        else:
            adam = replace(adam_cfg, learning_rate=combo.learning_rate)
        return make_recipe(task, cfg, adam, smote_cfg, init_seed, dropout_rate=combo.dropout_rate)

    return factory


# --- serialization -----------------------------------------------------------------

_SPEC_TO_DICT = {
    Dense: lambda s: {"type": "dense", "units": s.units, "activation": s.activation.value},
    Dropout: lambda s: {"type": "dropout", "rate": s.rate},
    TemporalConv: lambda s: {"type": "temporal_conv", "filters": s.filters, "kernel_size": s.kernel_size},
    Lstm: lambda s: {"type": "lstm", "units": s.units},
    Flatten: lambda s: {"type": "flatten"},
    Reshape: lambda s: {"type": "reshape", "target_shape": list(s.target_shape)},
    Concat: lambda s: {"type": "concat"},
}


def _spec_from_dict(d: dict):
    kind = d.get("type")
    if kind == "dense":
        return Dense(int(d["units"]), Activation(d["activation"]))
    if kind == "dropout":
        return Dropout(float(d["rate"]))
    if kind == "temporal_conv":
        return TemporalConv(int(d["filters"]), int(d["kernel_size"]))
    if kind == "lstm":
        return Lstm(int(d["units"]))
    if kind == "flatten":
        return Flatten()
    if kind == "reshape":
        return Reshape(tuple(d["target_shape"]))
    if kind == "concat":
        return Concat()
    raise ManifestGraphMismatch(f"unknown layer type {kind!r}")


def _graph_to_dict(graph: NetworkGraph) -> dict:
    return {
        "input_dim": graph.input_dim,
        "output_id": graph.output_id,
        "nodes": [
            {"id": n.id, "inputs": list(n.inputs), **_SPEC_TO_DICT[type(n.spec)](n.spec)}
            for n in graph.nodes
        ],
    }


def _graph_from_dict(d: dict) -> NetworkGraph:
    nodes = tuple(
        GraphNode(nd["id"], _spec_from_dict(nd), tuple(nd["inputs"])) for nd in d["nodes"]
    )
    return NetworkGraph(nodes, int(d["input_dim"]), d["output_id"])


def save_artifact(artifact: ModelArtifact, directory) -> None:
    """Write manifest.json and weights.bin; the pair fully defines inference."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    declared = []
    blob = bytearray()
    for nid, name, tensor in artifact.params.named_tensors():
        entry = next((e for e in declared if e["node"] == nid), None)
        if entry is None:
            entry = {"node": nid, "tensors": []}
            declared.append(entry)
        entry["tensors"].append({"name": name, "shape": list(tensor.shape)})
        blob.extend(np.ascontiguousarray(tensor, dtype="<f8").tobytes())
    manifest = {
        "format_version": artifact.format_version,
        "task": artifact.task.value,
        "feature_names": list(artifact.feature_names),
        "graph": _graph_to_dict(artifact.graph),
        "scaler": {"means": [float(v) for v in artifact.scaler.means],
                   "stds": [float(v) for v in artifact.scaler.stds]},
        "label_codec": {str(k): v for k, v in LABEL_CODEC.items()}
        if artifact.task is Task.CLASSIFICATION else None,
        "training": artifact.training_summary,
        "params": declared,
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    (directory / "weights.bin").write_bytes(bytes(blob))


def load_artifact(directory) -> ModelArtifact:
    """Load and validate an artifact directory.

    Validation order: format_version (UnknownVersion), manifest parameter
    shapes against the graph (ManifestGraphMismatch), then blob length
    (CorruptBlob).
    """
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise UnknownVersion(f"unsupported artifact format_version {version!r}")
    graph = _graph_from_dict(manifest["graph"])

    expected = param_shapes(graph)
    declared = manifest.get("params", [])
    declared_map = {e["node"]: {t["name"]: tuple(t["shape"]) for t in e["tensors"]} for e in declared}
    expected_map = {nid: {n: tuple(s) for n, s in ts.items()} for nid, ts in expected.items()}
    if declared_map != expected_map:
        raise ManifestGraphMismatch(
            "declared parameter shapes do not match the manifest graph"
        )

    total = sum(int(np.prod(s)) for ts in expected_map.values() for s in ts.values())
    blob = (directory / "weights.bin").read_bytes()
    if len(blob) != 8 * total:
        raise CorruptBlob(f"weights.bin holds {len(blob)} bytes, expected {8 * total}")

    flat = np.frombuffer(blob, dtype="<f8").astype(np.float64)
    params: dict[str, dict[str, np.ndarray]] = {}
    offset = 0
    for entry in declared:
        nid = entry["node"]
        params[nid] = {}
        for t in entry["tensors"]:
            shape = tuple(t["shape"])
            size = int(np.prod(shape))
            params[nid][t["name"]] = flat[offset:offset + size].reshape(shape).copy()
            offset += size

    task = Task(manifest["task"])
    if task is Task.CLASSIFICATION:
        codec = manifest.get("label_codec") or {}
        if {int(k): v for k, v in codec.items()} != LABEL_CODEC:
            raise ValueError(f"label codec {codec!r} does not match the fixed encoding")
    scaler = Scaler(np.asarray(manifest["scaler"]["means"]), np.asarray(manifest["scaler"]["stds"]))
    return ModelArtifact(
        task=task,
        feature_names=tuple(manifest["feature_names"]),
        graph=graph,
        scaler=scaler,
        params=ParamStore(params),
        training_summary=manifest.get("training"),
        format_version=version,
    )
