from mmcrt.cca.linear import (CcaConfig, cca_gradient, cca_objective,
                              holdout_cca_correlations, linear_cca)
from mmcrt.cca.train import DccaModel, TrainConfig, project, train_dcca

__all__ = [
    "CcaConfig", "cca_gradient", "cca_objective", "holdout_cca_correlations",
    "linear_cca",
    "DccaModel", "TrainConfig", "project", "train_dcca",
]
