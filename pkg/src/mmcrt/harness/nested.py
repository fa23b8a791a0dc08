"""Nested cross-validation with grid search over the DCCA and SVM
hyperparameters, plus the single-view baselines.

Outer folds estimate performance; inner folds (stratified splits of the outer
training set) pick hyperparameters by mean fused-prediction balanced accuracy.
The winning configuration is retrained on the full outer training set and the
outer test predictions are pooled across folds. Outer-test subjects never
influence encoder training, projection fitting, standardization, SVM training,
or hyperparameter choice for their own fold.
"""

from __future__ import annotations

import itertools
import multiprocessing as mp
from dataclasses import dataclass, field

import numpy as np
import torch

from mmcrt.errors import InputValidationError
from mmcrt.cca import CcaConfig, TrainConfig, train_dcca
from mmcrt.cca.train import project_cohort
from mmcrt.classify import (FusionConfig, Standardizer, SvmConfig, decision_values,
                            fit_classifier, svm_decision, svm_train)
from mmcrt.dataset.augment import AugmentParams
from mmcrt.dataset.types import PairedCohort, View
from mmcrt.harness.baseline import baseline_decision, train_baseline_cnn
from mmcrt.harness.metrics import bacc_from_predictions, confusion, metrics
from mmcrt.harness.splits import derive_seed, stratified_kfold

PAPER_K_GRID = (5, 10, 15, 20, 25, 30, 35)
PAPER_LR_GRID = (0.01, 0.001, 0.0001)
PAPER_GAMMA_GRID = (0.1, 0.01, 0.001, 0.0001)
PAPER_C_GRID = (1.0, 10.0, 100.0, 1000.0)

MMDL_MODES = ("fused", "view_a", "view_b")
METHODS = ("mmdl", "baseline_a", "baseline_b")


def _check_subset(name, values, allowed):
    values = tuple(values)
    if not values or any(v not in allowed for v in values):
        raise InputValidationError(
            f"grid.{name} must be a non-empty subset of {allowed}, got {values}")
    return values


@dataclass(frozen=True)
class GridSpec:
    """Hyperparameter grids; values must come from the reference grids, and are
    subsettable for desk-scale runs."""

    k_dcca: tuple = PAPER_K_GRID
    lr: tuple = PAPER_LR_GRID
    gamma: tuple = PAPER_GAMMA_GRID
    C: tuple = PAPER_C_GRID
    baseline_lr: tuple = None   # defaults to lr

    def __post_init__(self):
        object.__setattr__(self, "k_dcca", _check_subset("k_dcca", self.k_dcca, PAPER_K_GRID))
        object.__setattr__(self, "lr", _check_subset("lr", self.lr, PAPER_LR_GRID))
        object.__setattr__(self, "gamma", _check_subset("gamma", self.gamma, PAPER_GAMMA_GRID))
        object.__setattr__(self, "C", _check_subset(
            "C", tuple(float(c) for c in self.C), PAPER_C_GRID))
        lr = self.lr if self.baseline_lr is None else self.baseline_lr
        object.__setattr__(self, "baseline_lr", _check_subset("baseline_lr", lr, PAPER_LR_GRID))


@dataclass(frozen=True)
class TrainOptions:
    """Desk-scale budget knobs; reference values are 500-epoch DCCA training
    and 200-epoch baselines."""

    dcca_epochs: int = 500
    refit_epochs: int = 0       # 0 = same as dcca_epochs
    batch: int = 10
    batch_r: float = 0.5
    r: float = 1e-3
    baseline_epochs: int = 200
    baseline_batch: int = 16
    augment: AugmentParams | None = field(default_factory=AugmentParams)
    svm_tol: float = 1e-3
    workers: int = 1

    @property
    def effective_refit_epochs(self) -> int:
        return self.refit_epochs or self.dcca_epochs


def _fused_features(dcca, cohort, fusion: FusionConfig):
    v1 = project_cohort(dcca, cohort, View.A)
    v2 = project_cohort(dcca, cohort, View.B)
    return fusion.alpha * v1 + fusion.beta * v2


def _signed(labels: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(labels) > 0, 1.0, -1.0)


def _run_mmdl_fold(cohort, grid: GridSpec, opts: TrainOptions, seed: int, fold: int,
                   train_idx, test_idx, inner_folds: int) -> dict:
    fusion = FusionConfig()
    outer_train = cohort.subset(train_idx)
    outer_test = cohort.subset(test_idx)
    inner_splits = stratified_kfold(outer_train.labels, inner_folds,
                                    derive_seed(seed, fold, 101))

    scores = {cand: [] for cand in itertools.product(grid.k_dcca, grid.lr,
                                                     grid.gamma, grid.C)}
    single_cell = (len(grid.k_dcca) == 1 and len(grid.lr) == 1
                   and len(grid.gamma) == 1 and len(grid.C) == 1)
    if not single_cell:
        for ci, (k, lr) in enumerate(itertools.product(grid.k_dcca, grid.lr)):
            for ii, (itr_idx, ival_idx) in enumerate(inner_splits):
                itr = outer_train.subset(itr_idx)
                ival = outer_train.subset(ival_idx)
                dcca = train_dcca(itr, CcaConfig(k, opts.r),
                                  TrainConfig(lr, opts.dcca_epochs, opts.batch, opts.batch_r),
                                  derive_seed(seed, fold, ci, ii))
                fused_tr = _fused_features(dcca, itr, fusion)
                fused_val = _fused_features(dcca, ival, fusion)
                std = Standardizer.fit(fused_tr)
                xtr, xval = std.apply(fused_tr), std.apply(fused_val)
                ytr = _signed(itr.labels)
                for gamma, c in itertools.product(grid.gamma, grid.C):
                    svm = svm_train(xtr, ytr, SvmConfig(gamma, c), tol=opts.svm_tol)
                    preds = (svm_decision(svm, xval) >= 0).astype(int)
                    scores[(k, lr, gamma, c)].append(
                        bacc_from_predictions(ival.labels, preds))

    if single_cell:
        k, lr, gamma, c = (grid.k_dcca[0], grid.lr[0], grid.gamma[0], grid.C[0])
        best = {"k": k, "lr": lr, "gamma": gamma, "C": c, "inner_bacc": None}
    else:
        # ties: higher mean BACC, then smaller k, larger gamma, smaller C, larger lr
        ranked = sorted(scores.items(),
                        key=lambda kv: (-np.mean(kv[1]), kv[0][0], -kv[0][2],
                                        kv[0][3], -kv[0][1]))
        (k, lr, gamma, c), cell_scores = ranked[0]
        best = {"k": k, "lr": lr, "gamma": gamma, "C": c,
                "inner_bacc": float(np.mean(cell_scores))}

    dcca = train_dcca(outer_train, CcaConfig(best["k"], opts.r),
                      TrainConfig(best["lr"], opts.effective_refit_epochs,
                                  opts.batch, opts.batch_r),
                      derive_seed(seed, fold, 0x5EF1))
    bundle = fit_classifier(dcca, outer_train, SvmConfig(best["gamma"], best["C"]),
                            fusion, tol=opts.svm_tol)

    predictions = {}
    for mode in MMDL_MODES:
        dec = decision_values(bundle, outer_test, mode if mode == "fused" else View.parse(mode[-1]))
        preds = (dec >= 0).astype(np.int64)
        predictions[mode] = {
            "ids": [s.subject_id for s in outer_test.subjects],
            "labels": outer_test.labels.tolist(),
            "preds": preds.tolist(),
            "decisions": [round(float(d), 10) for d in dec],
        }
    return {"fold": fold, "method": "mmdl", "choice": best, "predictions": predictions}


def _run_baseline_fold(cohort, view: View, grid: GridSpec, opts: TrainOptions,
                       seed: int, fold: int, train_idx, test_idx,
                       inner_folds: int) -> dict:
    outer_train = cohort.subset(train_idx)
    outer_test = cohort.subset(test_idx)
    method = f"baseline_{view.value.lower()}"

    if len(grid.baseline_lr) == 1:
        best = {"lr": grid.baseline_lr[0], "inner_bacc": None}
    else:
        inner_splits = stratified_kfold(outer_train.labels, inner_folds,
                                        derive_seed(seed, fold, 202))
        scores = {lr: [] for lr in grid.baseline_lr}
        for ci, lr in enumerate(grid.baseline_lr):
            for ii, (itr_idx, ival_idx) in enumerate(inner_splits):
                itr = outer_train.subset(itr_idx)
                ival = outer_train.subset(ival_idx)
                model = train_baseline_cnn(itr, view, lr,
                                           derive_seed(seed, fold, 300 + ci, ii),
                                           epochs=opts.baseline_epochs,
                                           batch=opts.baseline_batch,
                                           augment_params=opts.augment)
                preds = (baseline_decision(model, ival) >= 0).astype(int)
                scores[lr].append(bacc_from_predictions(ival.labels, preds))
        ranked = sorted(scores.items(), key=lambda kv: (-np.mean(kv[1]), -kv[0]))
        lr, cell_scores = ranked[0]
        best = {"lr": lr, "inner_bacc": float(np.mean(cell_scores))}

    model = train_baseline_cnn(outer_train, view, best["lr"],
                               derive_seed(seed, fold, 0xBA5E),
                               epochs=opts.baseline_epochs, batch=opts.baseline_batch,
                               augment_params=opts.augment)
    dec = baseline_decision(model, outer_test)
    preds = (dec >= 0).astype(np.int64)
    return {"fold": fold, "method": method, "choice": best,
            "predictions": {"single": {
                "ids": [s.subject_id for s in outer_test.subjects],
                "labels": outer_test.labels.tolist(),
                "preds": preds.tolist(),
                "decisions": [round(float(d), 10) for d in dec],
            }}}


_WORKER_COHORT = None


def _worker_init(cohort):
    global _WORKER_COHORT
    _WORKER_COHORT = cohort
    torch.set_num_threads(1)


def _run_job(args):
    grid, opts, seed, fold, method, train_idx, test_idx, inner_folds = args
    cohort = _WORKER_COHORT
    if method == "mmdl":
        return _run_mmdl_fold(cohort, grid, opts, seed, fold, train_idx, test_idx,
                              inner_folds)
    view = View.A if method == "baseline_a" else View.B
    return _run_baseline_fold(cohort, view, grid, opts, seed, fold, train_idx,
                              test_idx, inner_folds)


def _pool_results(fold_results: list, folds: int) -> dict:
    """Reduce per-fold prediction records into pooled metrics, in fold order."""
    by_method = {}
    for rec in sorted(fold_results, key=lambda r: (r["method"], r["fold"])):
        m = by_method.setdefault(rec["method"], {"folds": {}, "choices": {}})
        m["folds"][rec["fold"]] = rec["predictions"]
        m["choices"][rec["fold"]] = rec["choice"]

    out = {}
    for method, data in by_method.items():
        modes = {}
        mode_names = MMDL_MODES if method == "mmdl" else ("single",)
        for mode in mode_names:
            ids, labels, preds, decisions, fold_bacc = [], [], [], [], []
            for fold in range(folds):
                p = data["folds"][fold][mode]
                ids += p["ids"]
                labels += p["labels"]
                preds += p["preds"]
                decisions += p["decisions"]
                fold_bacc.append(bacc_from_predictions(p["labels"], p["preds"]))
            if len(set(ids)) != len(ids):
                raise InputValidationError("pooled predictions contain duplicate subjects")
            conf = confusion(labels, preds)
            modes[mode] = {"confusion": conf.as_dict(),
                           "metrics": metrics(conf).as_dict(),
                           "fold_bacc": [round(b, 4) for b in fold_bacc],
                           "n_pooled": conf.total}
        out[method] = {"modes": modes,
                       "fold_choices": [data["choices"][f] for f in range(folds)]}
    return out


def nested_cv(cohort: PairedCohort, grid: GridSpec, folds: int = 5,
              inner_folds: int = 5, seed: int = 0,
              methods=("mmdl",), opts: TrainOptions = TrainOptions()) -> dict:
    """One full nested cross-validation run; returns the per-seed report dict."""
    for m in methods:
        if m not in METHODS:
            raise InputValidationError(f"unknown method {m!r}; expected subset of {METHODS}")
    splits = stratified_kfold(cohort.labels, folds, seed)
    jobs = [(grid, opts, seed, fold, method, train_idx, test_idx, inner_folds)
            for fold, (train_idx, test_idx) in enumerate(splits)
            for method in methods]

    if opts.workers > 1:
        # long jobs first and chunksize 1 keep the workers balanced
        order = sorted(range(len(jobs)), key=lambda i: jobs[i][4] != "mmdl")
        ctx = mp.get_context("fork")
        with ctx.Pool(processes=opts.workers, initializer=_worker_init,
                      initargs=(cohort,)) as pool:
            mapped = pool.map(_run_job, [jobs[i] for i in order], chunksize=1)
        results = [None] * len(jobs)
        for pos, res in zip(order, mapped):
            results[pos] = res
    else:
        _worker_init(cohort)
        results = [_run_job(j) for j in jobs]

    report = {"seed": seed, "folds": folds, "inner_folds": inner_folds,
              "n_subjects": len(cohort),
              "methods": _pool_results(results, folds)}
    return report
