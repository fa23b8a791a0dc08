from mmcrt.harness.metrics import Confusion, Metrics, bacc_from_predictions, confusion, metrics
from mmcrt.harness.splits import derive_seed, stratified_kfold
from mmcrt.harness.stats import TtestResult, paired_ttest
from mmcrt.harness.baseline import (BaselineModel, baseline_decision, baseline_predict,
                                    train_baseline_cnn)
from mmcrt.harness.nested import (GridSpec, TrainOptions, nested_cv,
                                  PAPER_C_GRID, PAPER_GAMMA_GRID, PAPER_K_GRID,
                                  PAPER_LR_GRID)
from mmcrt.harness.experiment import (load_config, parse_config, run_experiment,
                                      run_experiment_file, write_report)

__all__ = [
    "Confusion", "Metrics", "bacc_from_predictions", "confusion", "metrics",
    "derive_seed", "stratified_kfold",
    "TtestResult", "paired_ttest",
    "BaselineModel", "baseline_decision", "baseline_predict", "train_baseline_cnn",
    "GridSpec", "TrainOptions", "nested_cv",
    "PAPER_C_GRID", "PAPER_GAMMA_GRID", "PAPER_K_GRID", "PAPER_LR_GRID",
    "load_config", "parse_config", "run_experiment", "run_experiment_file",
    "write_report",
]
