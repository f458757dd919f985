"""Command-line driver for the whole lifecycle.

Subcommands: gen-data, train, eval, cv, nested-cv, predict, classify,
serve. Output is deterministic for identical argv and input files; exit
codes are 0 (success), 1 (runtime/component error), 2 (usage).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import data as data_mod
from . import service as service_mod
from .data import SyntheticConfig, Task, WqiClass
from .errors import WqnetError
from .evaluation import (
    GridSpec,
    Score,
    confusion_matrix,
    classification_report,
    cv_summary_to_csv,
    format_classification_report,
    format_cv_summary,
    format_nested_report,
    nested_cv,
    r2,
    rmse,
    stratified_kfold_cv,
)
from .models import classifier_predict


def _task(value: str) -> Task:
    return Task.CLASSIFICATION if value == "classify" else Task.REGRESSION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wqnet", description="water quality model pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write a synthetic canonical CSV")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--noise-sd", type=float, default=None)
    p.add_argument("--config", default=None, help="JSON key-value generator config")
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train a model and write an artifact directory")
    p.add_argument("--task", choices=("classify", "regress"), required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--smote", action="store_true")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--patience", type=int, default=15)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("eval", help="evaluate an artifact on a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)

    p = sub.add_parser("cv", help="stratified k-fold cross-validation")
    p.add_argument("--task", choices=("classify", "regress"), required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("nested-cv", help="nested cross-validation with grid search")
    p.add_argument("--task", choices=("classify", "regress"), required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--outer", type=int, default=10)
    p.add_argument("--inner", type=int, default=3)
    p.add_argument("--seed", type=int, default=42)

    for name in ("predict", "classify"):
        p = sub.add_parser(name, help=f"{name} one sample against an artifact")
        p.add_argument("--model", required=True)
        p.add_argument("--temperature", type=float, required=True)
        p.add_argument("--ph", type=float, required=True)
        p.add_argument("--ec", type=float, required=True)
        p.add_argument("--do", type=float, required=True, dest="do_")

    p = sub.add_parser("serve", help="run the prediction service")
    p.add_argument("--classifier", default=None)
    p.add_argument("--regressor", default=None)
    p.add_argument("--addr", default=None)

    return parser


def _cmd_gen_data(args) -> int:
    overrides = {"n": args.n, "seed": args.seed, "noise_sd": args.noise_sd}
    if args.config:
        config = data_mod.load_generator_config(args.config, overrides)
    else:
        filled = {k: v for k, v in overrides.items() if v is not None}
        filled.setdefault("n", 1000)
        filled.setdefault("seed", 0)
        config = SyntheticConfig(**filled)
    dataset = data_mod.generate_synthetic(config)
    data_mod.write_csv(dataset, args.out)
    codes = [data_mod.classify_wqi(w).code for w in dataset.targets]
    hist = {cls.label: codes.count(cls.code) for cls in WqiClass}
    print(f"wrote {args.out}: rows={dataset.n} seed={config.seed} noise_sd={config.noise_sd}")
    print("class counts: " + " ".join(f"{k}={v}" for k, v in sorted(hist.items())))
    return 0


def _cmd_train(args) -> int:
    from .models import train_pipeline, save_artifact
    from .training import TrainConfig, history_to_csv
    from .resample import SmoteConfig
    from pathlib import Path

    task = _task(args.task)
    dataset = data_mod.load_csv(args.data, task)
    cfg = TrainConfig(
        epochs=args.epochs, batch_size=args.batch, patience=args.patience,
        shuffle_seed=args.seed, smote=args.smote,
    )
    artifact, history = train_pipeline(
        dataset, task, cfg,
        smote_cfg=SmoteConfig(seed=args.seed),
        split_seed=args.seed, init_seed=args.seed,
    )
    save_artifact(artifact, args.out)
    history_to_csv(history, Path(args.out) / "history.csv")
    summary = artifact.training_summary or {}
    holdout = summary.get("holdout", {})
    print(f"trained {args.task} model: epochs_run={summary.get('epochs_run')} "
          f"best_epoch={summary.get('best_epoch')} stopped_early={summary.get('stopped_early')}")
    print("holdout: " + " ".join(f"{k}={v:.4f}" for k, v in sorted(holdout.items())))
    print(f"artifact written to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    from .models import load_artifact, regressor_predict

    artifact = load_artifact(args.model)
    dataset = data_mod.load_csv(args.data, artifact.task)
    if artifact.task is Task.CLASSIFICATION:
        codes, _ = classifier_predict(artifact, dataset.features)
        cm = confusion_matrix(dataset.class_codes(), codes, data_mod.N_CLASSES)
        print(format_classification_report(classification_report(cm)))
    else:
        predicted = regressor_predict(artifact, dataset.features)
        print(f"rmse={rmse(dataset.targets, predicted):.4f}")
        print(f"r2={r2(dataset.targets, predicted):.4f}")
    return 0


def _cmd_cv(args) -> int:
    from .models import make_recipe

    task = _task(args.task)
    dataset = data_mod.load_csv(args.data, task)
    recipe = make_recipe(task)
    score = Score.ACCURACY if task is Task.CLASSIFICATION else Score.R2
    summary = stratified_kfold_cv(dataset, args.folds, args.seed, recipe, score)
    print(format_cv_summary(summary, "Accuracy" if score == Score.ACCURACY else "R2"))
    cv_summary_to_csv(summary, "cv.csv")
    print("wrote cv.csv")
    return 0


def _cmd_nested_cv(args) -> int:
    from .models import grid_recipe_factory

    task = _task(args.task)
    dataset = data_mod.load_csv(args.data, task)
    factory = grid_recipe_factory(task)
    score = Score.ACCURACY if task is Task.CLASSIFICATION else Score.R2
    report = nested_cv(dataset, args.outer, args.inner, GridSpec(), args.seed, factory, score)
    print(format_nested_report(report))
    return 0


def _cmd_sample(args, classify: bool) -> int:
    from .data import Sample
    from .models import load_artifact
    from .service import classify_response, predict_response

    artifact = load_artifact(args.model)
    sample = Sample(temperature=args.temperature, ph=args.ph, ec=args.ec, do=args.do_)
    body = classify_response(artifact, sample) if classify else predict_response(artifact, sample)
    print(json.dumps(body))
    return 0


def _cmd_serve(args) -> int:
    config = service_mod.ServiceConfig(
        classifier_dir=args.classifier, regressor_dir=args.regressor, addr=args.addr,
    )
    service_mod.run(config)
    return 0


def run(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen-data":
            return _cmd_gen_data(args)
        if args.command == "train":
            return _cmd_train(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "cv":
            return _cmd_cv(args)
        if args.command == "nested-cv":
            return _cmd_nested_cv(args)
        if args.command == "predict":
            return _cmd_sample(args, classify=False)
        if args.command == "classify":
            return _cmd_sample(args, classify=True)
        if args.command == "serve":
            return _cmd_serve(args)
    except WqnetError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
