"""Command-line interface.

Subcommands: synth, extract, train, predict, explain, evaluate, tune,
stratify. Global options (--seed, --threads, --config, --out-dir) attach to
every subcommand; an INI config file supplies defaults that explicit flags
override (precedence: command line > config file > built-in defaults).

Exit codes: 0 success, 2 usage errors, 3 data errors, 4 model errors,
5 internal errors.

Determinism contract: artifacts embed the tool version, seed, and a config
hash, and never embed timestamps, absolute paths, or thread counts; two runs
with identical inputs, config, and seed produce byte-identical artifacts
regardless of --threads.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .corpus import Dataset, SyntheticSpec, generate_synthetic, load_dataset
from .errors import DataError, LexiscreenError, ModelError, UsageError
from .evaluate import (
    GROUPINGS, ParamSpace, bootstrap_evaluate, cross_validate, group_metrics,
    random_search,
)
from .explain import explain_dataset, summarize_importance
from .features import (
    extract_dataset, fingerprint_names, load_default_pos_lexicon,
    load_default_schema, load_pos_lexicon, load_schema, read_features_csv,
    write_features_csv,
)
from .forest import (
    ForestParams, clamp_mmse, fit_forest, predict, predict_proba,
)
from .lexicon import load_default_lexicon, load_lexicon
from .metrics import calibration_curve, roc_points
from .risk import (
    RiskThresholds, bands_of, risk_by_severity, search_thresholds,
    search_thresholds_cv, selective_metrics,
)
from .serialize import load_model, save_model

# Options whose values are filesystem paths: artifacts echo only their
# basename so no absolute path ever lands in an output file.
_PATH_OPTS = frozenset({
    "data", "features", "model", "predictions", "lexicon", "pos", "schema",
    "train_features", "train_data", "test_features", "test_data",
    "params_file", "config", "out_dir", "out",
})
_HASH_SKIP = frozenset({"out_dir", "threads", "config", "command", "func"})


def _fmt(v) -> str:
    return repr(float(v))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt(v)
    return str(v)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _write_json(path, doc, sort_keys: bool = False) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2, sort_keys=sort_keys)
        fh.write("\n")


def _config_echo(args) -> dict:
    # Mirrors the hash: execution-environment options (out_dir, threads,
    # config file location) stay out so reruns produce identical manifests.
    out = {}
    for key, val in sorted(vars(args).items()):
        if key in _HASH_SKIP:
            continue
        if key in _PATH_OPTS and isinstance(val, str):
            val = os.path.basename(val)
        out[key] = val
    return out


def _config_hash(command: str, args) -> str:
    lines = [f"command={command}", f"tool_version={__version__}"]
    for key, val in sorted(vars(args).items()):
        if key in _HASH_SKIP:
            continue
        if key in _PATH_OPTS and isinstance(val, str):
            val = os.path.basename(val)
        lines.append(f"{key}={val!r}")
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()


def _meta(args) -> dict:
    return {
        "tool_version": __version__,
        "seed": args.seed,
        "config_hash": _config_hash(args.command, args),
    }


def _emit_manifest(args, artifacts, extra: dict | None = None) -> None:
    path = os.path.join(args.out_dir, "run_manifest.json")
    doc = None
    if os.path.exists(path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError):
            doc = None
    if not isinstance(doc, dict) or not isinstance(doc.get("runs"), dict):
        doc = {"tool": "lexiscreen", "runs": {}}
    doc["tool"] = "lexiscreen"
    doc["tool_version"] = __version__
    entry = {
        "version": __version__,
        "seed": args.seed,
        "config_hash": _config_hash(args.command, args),
        "config": _config_echo(args),
        "artifacts": sorted(artifacts),
    }
    if extra:
        entry.update(extra)
    doc["runs"][args.command] = entry
    _write_json(path, doc, sort_keys=True)


def _out(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _load_resources(args):
    lexicon = load_lexicon(args.lexicon) if args.lexicon else load_default_lexicon()
    pos = load_pos_lexicon(args.pos) if args.pos else load_default_pos_lexicon()
    schema = load_schema(args.schema) if args.schema else load_default_schema()
    return lexicon, pos, schema


def _records_by_id(dataset: Dataset) -> dict:
    return {r.id: r for r in dataset}


def _labels_for(ids, dataset: Dataset, field: str) -> np.ndarray:
    by_id = _records_by_id(dataset)
    vals = []
    for i in ids:
        rec = by_id.get(i)
        if rec is None:
            raise DataError(f"id {i!r} from the feature file is not in the data file")
        v = getattr(rec, field)
        if v is None:
            raise DataError(f"record {i!r} has no {field}; required for this task")
        vals.append(float(v))
    return np.array(vals, dtype=np.float64)


def _check_fingerprint(model, names) -> None:
    fp = fingerprint_names(names)
    if model.schema_fingerprint is not None and model.schema_fingerprint != fp:
        raise ModelError(
            "schema fingerprint mismatch between model and features: "
            f"model {model.schema_fingerprint[:12]}..., features {fp[:12]}..."
        )


def _resolve_params(args, task: str) -> ForestParams:
    base = (ForestParams.default_classify() if task == "classify"
            else ForestParams.default_regress()).to_dict()
    if getattr(args, "params_file", None):
        try:
            with open(args.params_file, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise DataError(f"params file: {e.msg} at byte {e.pos}") from None
        if isinstance(doc, dict) and "best_params" in doc:
            doc = doc["best_params"]
        if not isinstance(doc, dict):
            raise DataError("params file must hold a parameter object")
        for key, val in doc.items():
            if key not in base:
                raise DataError(f"params file: unknown parameter {key!r}")
            base[key] = val
    for key in base:
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    return ForestParams.from_dict(base)


# ---------------------------------------------------------------- commands


def cmd_synth(args) -> int:
    if args.n_pos < 1 or args.n_neg < 1:
        raise UsageError("each class needs at least 1 record")
    spec = (SyntheticSpec.zero_gap(args.n_pos, args.n_neg) if args.zero_gap
            else SyntheticSpec.default(args.n_pos, args.n_neg))
    ds = generate_synthetic(spec, args.seed)
    path = _out(args, args.out)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for rec in ds:
            doc = {"id": rec.id, "text": rec.text}
            for key in ("diagnosis", "mmse", "age", "sex", "language"):
                v = getattr(rec, key)
                if v is not None:
                    doc[key] = v
            fh.write(json.dumps(doc, separators=(", ", ": ")))
            fh.write("\n")
    _emit_manifest(args, [args.out], extra={"records": len(ds), "dataset": ds.name})
    print(f"wrote {args.out} ({len(ds)} records)")
    return 0


def cmd_extract(args) -> int:
    lexicon, pos, schema = _load_resources(args)
    ds = load_dataset(args.data, args.format)
    ds.require_unique_ids()
    ids, matrix, skipped = extract_dataset(ds, lexicon, pos, schema,
                                           skip_bad=args.skip_bad)
    for rid, msg in skipped:
        print(f"skipped {rid!r}: {msg}", file=sys.stderr)
    if not ids:
        raise DataError("no extractable records in the data file")
    path = _out(args, args.out)
    write_features_csv(path, ids, matrix, schema)
    _emit_manifest(args, [args.out], extra={
        "rows": len(ids),
        "skipped": [[rid, msg] for rid, msg in skipped],
        "schema_fingerprint": schema.fingerprint,
    })
    print(f"wrote {args.out} ({len(ids)} rows x {len(schema)} features)")
    return 0


def cmd_train(args) -> int:
    ids, x, names = read_features_csv(args.features)
    ds = load_dataset(args.data, args.format)
    field = "diagnosis" if args.task == "classify" else "mmse"
    y = _labels_for(ids, ds, field)
    params = _resolve_params(args, args.task)
    artifacts = ["model.json"]
    report = {"meta": _meta(args), "task": args.task, "params": params.to_dict()}
    if args.folds >= 2:
        cv = cross_validate(ids, x, y, params, task=args.task, k=args.folds,
                            seed=args.seed, n_jobs=args.threads)
        report["folds"] = list(cv.folds)
        report["cv_summary"] = {"k": cv.k, "mean": cv.mean, "sd": cv.sd,
                                "sd_kind": "population"}
    order = sorted(range(len(ids)), key=lambda i: ids[i])
    model = fit_forest(x[order], y[order], params, task=args.task,
                       seed=args.seed, n_jobs=args.threads,
                       schema_fingerprint=fingerprint_names(names))
    save_model(model, _out(args, "model.json"))
    _write_json(_out(args, "train_report.json"), report)
    artifacts.append("train_report.json")
    _emit_manifest(args, artifacts)
    print(f"wrote model.json ({params.n_trees} trees, task={args.task})")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    ids, x, names = read_features_csv(args.features)
    _check_fingerprint(model, names)
    if model.task == "classify":
        scores = predict_proba(model, x)
        _write_csv(_out(args, "predictions.csv"), ["id", "score"],
                   zip(ids, scores))
    else:
        raw = predict(model, x)
        _write_csv(_out(args, "predictions.csv"),
                   ["id", "prediction", "raw_prediction"],
                   zip(ids, clamp_mmse(raw), raw))
    _emit_manifest(args, ["predictions.csv"], extra={"rows": len(ids)})
    print(f"wrote predictions.csv ({len(ids)} rows)")
    return 0


def cmd_explain(args) -> int:
    model = load_model(args.model)
    ids, x, names = read_features_csv(args.features)
    _check_fingerprint(model, names)
    phi, base, preds = explain_dataset(model, x, n_jobs=args.threads)
    header = ["id", "prediction", "base_value", *names]
    rows = ([rid, float(p), base, *map(float, row)]
            for rid, p, row in zip(ids, preds, phi))
    _write_csv(_out(args, "explanations.csv"), header, rows)
    summary = summarize_importance(phi, names)
    _write_csv(
        _out(args, "importance.csv"),
        ["rank", "feature", "mean_abs_shap"],
        ([i + 1, name, val] for i, (name, val) in enumerate(summary.ranking)),
    )
    _emit_manifest(args, ["explanations.csv", "importance.csv"],
                   extra={"rows": len(ids)})
    print(f"wrote explanations.csv and importance.csv ({len(ids)} rows)")
    return 0


def cmd_evaluate(args) -> int:
    tr_ids, x_tr, names_tr = read_features_csv(args.train_features)
    te_ids, x_te, names_te = read_features_csv(args.test_features)
    if names_tr != names_te:
        raise DataError("train and test feature files disagree on feature names")
    ds_tr = load_dataset(args.train_data, args.format)
    ds_te = load_dataset(args.test_data, args.format)
    field = "diagnosis" if args.task == "classify" else "mmse"
    y_tr = _labels_for(tr_ids, ds_tr, field)
    y_te = _labels_for(te_ids, ds_te, field)
    params = _resolve_params(args, args.task)

    cv = cross_validate(tr_ids, x_tr, y_tr, params, task=args.task,
                        k=args.folds, seed=args.seed, n_jobs=args.threads,
                        threshold=args.threshold)
    boot = bootstrap_evaluate(tr_ids, x_tr, y_tr, x_te, y_te, params,
                              task=args.task, repeats=args.repeats,
                              seed=args.seed, n_jobs=args.threads,
                              threshold=args.threshold)
    order = sorted(range(len(tr_ids)), key=lambda i: tr_ids[i])
    model = fit_forest(x_tr[order], y_tr[order], params, task=args.task,
                       seed=args.seed, n_jobs=args.threads,
                       schema_fingerprint=fingerprint_names(names_tr))

    artifacts = ["report.json"]
    calibration_rows = []
    reliability_gap = None
    groups_doc = {}
    if args.task == "classify":
        scores_te = predict_proba(model, x_te)
        calib = calibration_curve(scores_te, y_te, bins=args.bins)
        reliability_gap = calib.reliability_gap
        for b in calib.bins:
            calibration_rows.append({
                "lo": b.lo, "hi": b.hi, "count": b.count,
                "mean_score": b.mean_score,
                "positive_fraction": b.positive_fraction,
            })
        _write_csv(
            _out(args, "calibration.csv"),
            ["bin_lo", "bin_hi", "count", "mean_score", "positive_fraction"],
            ([b.lo, b.hi, b.count, b.mean_score, b.positive_fraction]
             for b in calib.bins),
        )
        artifacts.append("calibration.csv")
        pts = roc_points(scores_te, y_te)
        _write_csv(_out(args, "roc_points.csv"),
                   ["fpr", "tpr", "threshold"], pts)
        artifacts.append("roc_points.csv")
        by_id = _records_by_id(ds_te)
        te_records = [by_id[i] for i in te_ids]
        for grouping in GROUPINGS:
            g = group_metrics(te_records, scores_te, grouping,
                              threshold=args.threshold)
            groups_doc[grouping] = {"groups": g.groups, "excluded": g.excluded}

    report = {
        "meta": _meta(args),
        "task": args.task,
        "params": params.to_dict(),
        "folds": list(cv.folds),
        "cv_summary": {"k": cv.k, "mean": cv.mean, "sd": cv.sd,
                       "sd_kind": "population"},
        "bootstrap": {
            "repeats": boot.repeats,
            "ci_method": boot.ci_method,
            "metrics": boot.metrics,
        },
        "calibration": calibration_rows,
        "reliability_gap": reliability_gap,
        "groups": groups_doc,
    }
    _write_json(_out(args, "report.json"), report)
    _emit_manifest(args, artifacts)
    print(f"wrote report.json ({args.folds}-fold CV, {args.repeats} bootstrap repeats)")
    return 0


def cmd_tune(args) -> int:
    ids, x, names = read_features_csv(args.features)
    ds = load_dataset(args.data, args.format)
    field = "diagnosis" if args.task == "classify" else "mmse"
    y = _labels_for(ids, ds, field)
    space = (ParamSpace.default_classify() if args.task == "classify"
             else ParamSpace.default_regress())
    result = random_search(ids, x, y, space, budget=args.budget,
                           task=args.task, k=args.folds, seed=args.seed,
                           n_jobs=args.threads)
    doc = {
        "meta": _meta(args),
        "task": args.task,
        "metric": result.metric,
        "maximize": result.maximize,
        "budget": args.budget,
        "folds": args.folds,
        "best_score": result.best_score,
        "best_params": result.best_params.to_dict(),
        "trials": list(result.trials),
    }
    _write_json(_out(args, "search.json"), doc)
    _write_json(_out(args, "best_params.json"),
                {"best_params": result.best_params.to_dict(),
                 "best_score": result.best_score,
                 "metric": result.metric})
    _emit_manifest(args, ["search.json", "best_params.json"])
    print(f"best {result.metric}: {result.best_score:.4f} "
          f"({'max' if result.maximize else 'min'} over {args.budget} draws)")
    return 0


def _read_predictions(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty predictions file") from None
        if "id" not in header or "score" not in header:
            raise DataError(
                f"{path}: need 'id' and 'score' columns (classification predictions)"
            )
        id_col = header.index("id")
        score_col = header.index("score")
        ids, scores = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            ids.append(row[id_col])
            try:
                scores.append(float(row[score_col]))
            except ValueError:
                raise DataError(f"{path} line {lineno}: non-numeric score") from None
    return ids, np.array(scores, dtype=np.float64)


def cmd_stratify(args) -> int:
    ids, scores = _read_predictions(args.predictions)
    fixed = args.green is not None or args.amber is not None
    if fixed and (args.green is None or args.amber is None):
        raise UsageError("--green and --amber must be given together")

    dataset = load_dataset(args.data, args.format) if args.data else None
    labels = None
    records = None
    if dataset is not None:
        by_id = _records_by_id(dataset)
        missing = [i for i in ids if i not in by_id]
        if missing:
            raise DataError(
                f"id {missing[0]!r} from the predictions file is not in the data file"
            )
        records = [by_id[i] for i in ids]
        if all(r.diagnosis is not None for r in records):
            labels = np.array([r.diagnosis for r in records], dtype=np.int64)

    artifacts = []
    if fixed:
        thresholds = RiskThresholds(green_upper=args.green, amber_upper=args.amber)
        bands = bands_of(scores, thresholds)
    else:
        if labels is None:
            raise UsageError(
                "threshold search needs --data with a diagnosis for every id"
            )
        if args.folds >= 2:
            thresholds, per_fold = search_thresholds_cv(
                ids, scores, labels, k=args.folds, seed=args.seed,
                resolution=args.resolution, min_coverage=args.min_coverage)
            trace_name = None
            fold_pairs = [[t.green_upper, t.amber_upper] for t in per_fold]
        else:
            thresholds, trace = search_thresholds(
                scores, labels, resolution=args.resolution,
                min_coverage=args.min_coverage)
            trace_name = "threshold_trace.csv"
            fold_pairs = None
            _write_csv(
                _out(args, trace_name),
                ["green_upper", "amber_upper", "feasible", "reason",
                 "coverage", "n_green", "n_amber", "n_red",
                 "sensitivity", "specificity", "youden", "retained_auc"],
                ([c.green_upper, c.amber_upper, c.feasible, c.reason,
                  c.coverage, c.n_green, c.n_amber, c.n_red,
                  c.sensitivity, c.specificity, c.youden, c.retained_auc]
                 for c in trace),
            )
            artifacts.append(trace_name)
        sel = selective_metrics(scores, labels, thresholds)
        doc = {
            "meta": _meta(args),
            "green_upper": thresholds.green_upper,
            "amber_upper": thresholds.amber_upper,
            "resolution": args.resolution,
            "min_coverage": args.min_coverage,
            "objective": "youden_j",
            "trace_path": trace_name,
            "selective": {
                "coverage": sel.coverage,
                "n_green": sel.n_green,
                "n_amber": sel.n_amber,
                "n_red": sel.n_red,
                "sensitivity": sel.metrics.sensitivity,
                "specificity": sel.metrics.specificity,
                "accuracy": sel.metrics.accuracy,
                "roc_auc": sel.metrics.roc_auc,
                "youden_j": sel.youden,
            },
        }
        if fold_pairs is not None:
            doc["per_fold"] = fold_pairs
        _write_json(_out(args, "thresholds.json"), doc)
        artifacts.append("thresholds.json")
        bands = bands_of(scores, thresholds)

    _write_csv(_out(args, "bands.csv"), ["id", "score", "band"],
               ([i, s, b.value] for i, s, b in zip(ids, scores, bands)))
    artifacts.append("bands.csv")

    if not fixed and records is not None and any(r.mmse is not None for r in records):
        rows, excluded = risk_by_severity(records, scores, bands)
        _write_csv(
            _out(args, "risk_by_severity.csv"),
            ["group", "n", "mean_score", "green", "amber", "red"],
            ([r["group"], r["n"], r["mean_score"], r["green"], r["amber"],
              r["red"]] for r in rows),
        )
        artifacts.append("risk_by_severity.csv")
    _emit_manifest(args, artifacts)
    print(f"wrote {', '.join(sorted(artifacts))}")
    return 0


# ------------------------------------------------------------------ parser


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="root random seed (default 0)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads; never changes results")
    common.add_argument("--config", default=None,
                        help="INI file with option defaults")
    common.add_argument("--out-dir", dest="out_dir", default=".",
                        help="directory for artifacts (default .)")

    parser = argparse.ArgumentParser(
        prog="lexiscreen",
        description="Transcript screening: interpretable features, forest "
                    "models, risk bands, and per-prediction explanations.",
    )
    parser.add_argument("--version", action="version",
                        version=f"lexiscreen {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    subparsers = {}

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func, command=name)
        subparsers[name] = p
        return p

    p = add("synth", cmd_synth, "generate a synthetic labeled corpus")
    p.add_argument("--n-pos", type=int, required=True)
    p.add_argument("--n-neg", type=int, required=True)
    p.add_argument("--zero-gap", action="store_true",
                   help="draw both classes from one distribution")
    p.add_argument("--out", default="transcripts.jsonl")

    p = add("extract", cmd_extract, "extract features from transcripts")
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default=None)
    p.add_argument("--lexicon", default=None, help="category dictionary path")
    p.add_argument("--pos", default=None, help="part-of-speech lexicon path")
    p.add_argument("--schema", default=None, help="feature schema path")
    p.add_argument("--skip-bad", action="store_true",
                   help="skip unextractable records instead of failing")
    p.add_argument("--out", default="features.csv")

    def add_param_flags(p):
        p.add_argument("--n-trees", type=int, default=None)
        p.add_argument("--max-depth", type=int, default=None)
        p.add_argument("--min-samples-split", type=int, default=None)
        p.add_argument("--min-samples-leaf", type=int, default=None)
        p.add_argument("--features-per-split", type=int, default=None)
        p.add_argument("--params-file", default=None,
                       help="JSON parameter file (e.g. from tune)")

    p = add("train", cmd_train, "fit a forest and cross-validate")
    p.add_argument("--features", required=True)
    p.add_argument("--data", required=True, help="transcripts with labels")
    p.add_argument("--format", choices=("jsonl", "csv"), default=None)
    p.add_argument("--task", choices=("classify", "regress"), default="classify")
    p.add_argument("--folds", type=int, default=10,
                   help="CV folds for the training report; below 2 skips CV")
    add_param_flags(p)

    p = add("predict", cmd_predict, "score transcripts with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)

    p = add("explain", cmd_explain, "per-prediction SHAP attributions")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)

    p = add("evaluate", cmd_evaluate,
            "full harness: CV, bootstrap CIs, calibration, subgroups")
    p.add_argument("--train-features", required=True)
    p.add_argument("--train-data", required=True)
    p.add_argument("--test-features", required=True)
    p.add_argument("--test-data", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default=None)
    p.add_argument("--task", choices=("classify", "regress"), default="classify")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--threshold", type=float, default=0.5)
    add_param_flags(p)

    p = add("tune", cmd_tune, "random hyperparameter search")
    p.add_argument("--features", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default=None)
    p.add_argument("--task", choices=("classify", "regress"), default="classify")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--folds", type=int, default=10)

    p = add("stratify", cmd_stratify, "band scores into Green/Amber/Red")
    p.add_argument("--predictions", required=True)
    p.add_argument("--data", default=None,
                   help="transcripts with labels; needed to search thresholds")
    p.add_argument("--format", choices=("jsonl", "csv"), default=None)
    p.add_argument("--green", type=float, default=None,
                   help="fixed green upper bound (with --amber)")
    p.add_argument("--amber", type=float, default=None,
                   help="fixed amber upper bound (with --green)")
    p.add_argument("--resolution", type=float, default=0.1)
    p.add_argument("--min-coverage", type=float, default=0.5)
    p.add_argument("--folds", type=int, default=0,
                   help="CV folds for modal threshold selection; 0 searches once")

    return parser, subparsers


def _apply_config(parser, subparsers, path):
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    cfg = configparser.ConfigParser()
    try:
        cfg.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise UsageError(f"config file {path}: {e}") from None

    def convert(action, key, value):
        if isinstance(action, argparse._StoreTrueAction):
            lowered = value.strip().lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise UsageError(f"config: boolean expected for {key!r}, got {value!r}")
        if action.type is not None:
            try:
                return action.type(value)
            except (TypeError, ValueError):
                raise UsageError(f"config: bad value for {key!r}: {value!r}") from None
        return value

    for section in cfg.sections():
        if section == "lexiscreen":
            targets = list(subparsers.values())
        elif section in subparsers:
            targets = [subparsers[section]]
        else:
            raise UsageError(f"config: unknown section [{section}]")
        for raw_key, value in cfg.items(section):
            key = raw_key.replace("-", "_")
            applied = False
            for p in targets:
                for action in p._actions:
                    if action.dest != key:
                        continue
                    p.set_defaults(**{key: convert(action, key, value)})
                    action.required = False  # config satisfies required options
                    applied = True
                    break
            if not applied:
                raise UsageError(f"config: unknown option {raw_key!r} in [{section}]")


class _Missing:
    pass


_MISSING = _Missing()


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = _build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _rest = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(parser, subparsers, known.config)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 3
    except ModelError as e:
        print(f"model error: {e}", file=sys.stderr)
        return 4
    except LexiscreenError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 5
    except OSError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 3
    except Exception:  # pragma: no cover - defensive
        import traceback

        traceback.print_exc()
        return 5
