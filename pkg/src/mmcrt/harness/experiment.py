"""Experiment runner: config-driven multi-seed nested cross-validation
producing a method-comparison report with significance tests.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import numpy as np

from mmcrt.errors import InputValidationError
from mmcrt.dataset.augment import AugmentParams
from mmcrt.dataset.io import load_cohort
from mmcrt.dataset.synth import SynthConfig, generate_cohort
from mmcrt.harness.nested import GridSpec, TrainOptions, nested_cv
from mmcrt.harness.metrics import confusion, metrics
from mmcrt.harness.splits import derive_seed
from mmcrt.harness.stats import paired_ttest

SCHEMA_VERSION = 1

# Comparisons are single-view MMDL inference against the same-view baseline,
# paired per outer fold (and per seed when several seeds run).
TTEST_PAIRS = (("mmdl", "view_a", "baseline_a"), ("mmdl", "view_b", "baseline_b"))


def _field(cfg: dict, path: str, default=None, required=False):
    node = cfg
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise InputValidationError(f"config field '{path}' is required")
            return default
        node = node[part]
    return node


def parse_config(cfg: dict) -> dict:
    """Validate a config mapping; raises with the offending field path."""
    if not isinstance(cfg, dict):
        raise InputValidationError("config root must be an object")
    out = {}
    has_cohort = "cohort" in cfg
    has_synth = "synth" in cfg
    if has_cohort == has_synth:
        raise InputValidationError("config needs exactly one of 'cohort' (path) or 'synth'")
    out["cohort_path"] = _field(cfg, "cohort")
    if has_synth:
        synth = dict(_field(cfg, "synth"))
        try:
            out["synth"] = SynthConfig(**{**synth, "seed": synth.get("seed", 0)})
            out["synth_seed_fixed"] = "seed" in synth
        except TypeError as exc:
            raise InputValidationError(f"config field 'synth': {exc}") from exc
    methods = _field(cfg, "methods", default=["mmdl"])
    if not isinstance(methods, list) or not methods:
        raise InputValidationError("config field 'methods' must be a non-empty list")
    out["methods"] = tuple(methods)

    grid_cfg = _field(cfg, "grid", default={})
    try:
        out["grid"] = GridSpec(**{k: tuple(v) for k, v in grid_cfg.items()})
    except TypeError as exc:
        raise InputValidationError(f"config field 'grid': {exc}") from exc

    train_cfg = dict(_field(cfg, "train", default={}))
    if "augment" in train_cfg:
        aug = train_cfg["augment"]
        train_cfg["augment"] = None if aug is None else AugmentParams(**aug)
    try:
        out["opts"] = TrainOptions(**train_cfg)
    except TypeError as exc:
        raise InputValidationError(f"config field 'train': {exc}") from exc

    seeds = _field(cfg, "seeds")
    if seeds is None:
        seeds = [_field(cfg, "seed", default=0)]
    if not isinstance(seeds, list) or not all(isinstance(s, int) for s in seeds):
        raise InputValidationError("config field 'seeds' must be a list of integers")
    out["seeds"] = seeds
    out["folds"] = int(_field(cfg, "folds", default=5))
    out["inner_folds"] = int(_field(cfg, "inner_folds", default=5))
    if out["folds"] < 2 or out["inner_folds"] < 2:
        raise InputValidationError("config fields 'folds'/'inner_folds' must be >= 2")
    out["report_path"] = _field(cfg, "report")
    return out


def load_config(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputValidationError(f"cannot parse config {path}: {exc}") from exc
    return parse_config(raw)


def _cohort_for_seed(parsed: dict, seed: int):
    if parsed.get("cohort_path"):
        return load_cohort(parsed["cohort_path"])
    synth: SynthConfig = parsed["synth"]
    if not parsed.get("synth_seed_fixed"):
        synth = SynthConfig(**{**synth.__dict__, "seed": derive_seed(seed, 0xC0)})
    cohort, _ = generate_cohort(synth)
    return cohort


def _pool_across_runs(runs: list, method: str, mode: str) -> dict | None:
    labels, preds = [], []
    for run in runs:
        block = run["methods"].get(method)
        if block is None:
            return None
        modes = block["modes"]
        if mode not in modes:
            return None
        conf = modes[mode]["confusion"]
        labels += [1] * (conf["tp"] + conf["fn"]) + [0] * (conf["tn"] + conf["fp"])
        preds += ([1] * conf["tp"] + [0] * conf["fn"] + [0] * conf["tn"] + [1] * conf["fp"])
    conf = confusion(labels, preds)
    return {"confusion": conf.as_dict(), "metrics": metrics(conf).as_dict(),
            "n_pooled": conf.total}


def _fold_baccs(runs: list, method: str, mode: str) -> list:
    out = []
    for run in runs:
        out += run["methods"][method]["modes"][mode]["fold_bacc"]
    return out


def run_experiment(parsed: dict) -> dict:
    """Execute the configured runs and assemble the comparison report."""
    t0 = time.time()
    runs = []
    for seed in parsed["seeds"]:
        cohort = _cohort_for_seed(parsed, seed)
        runs.append(nested_cv(cohort, parsed["grid"], folds=parsed["folds"],
                              inner_folds=parsed["inner_folds"], seed=seed,
                              methods=parsed["methods"], opts=parsed["opts"]))

    aggregate = {}
    for method in parsed["methods"]:
        mode_names = ("fused", "view_a", "view_b") if method == "mmdl" else ("single",)
        aggregate[method] = {mode: _pool_across_runs(runs, method, mode)
                             for mode in mode_names}

    ttests = []
    for method, mode, baseline in TTEST_PAIRS:
        if method in parsed["methods"] and baseline in parsed["methods"]:
            a = _fold_baccs(runs, method, mode)
            b = _fold_baccs(runs, baseline, "single")
            result = paired_ttest(a, b, confidence=0.99)
            ttests.append({"comparison": f"{method}_{mode}_vs_{baseline}",
                           "mean_bacc_a": round(float(np.mean(a)), 4),
                           "mean_bacc_b": round(float(np.mean(b)), 4),
                           "pairs": len(a), **result.as_dict()})

    report = {
        "schema_version": SCHEMA_VERSION,
        "seeds": parsed["seeds"],
        "folds": parsed["folds"],
        "inner_folds": parsed["inner_folds"],
        "methods": list(parsed["methods"]),
        "runs": runs,
        "aggregate": aggregate,
        "ttests": ttests,
        "wall_clock_sec": round(time.time() - t0, 3),
    }
    return report


def write_report(report: dict, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment_file(config_path, report_path=None) -> dict:
    parsed = load_config(config_path)
    report = run_experiment(parsed)
    target = report_path or parsed.get("report_path")
    if target:
        write_report(report, target)
    return report
