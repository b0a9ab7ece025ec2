from .base import (
    ANNConfig,
    ELMConfig,
    LRConfig,
    ModelKind,
    SVMConfig,
    TrainedModel,
    default_config,
    load_model,
    save_model,
)
from .poly import poly_expand
from .training import (
    FoldPlan,
    cross_validate,
    evaluate_model,
    fit_model,
    kfold,
    train_ann,
    train_elm,
    train_lr,
    train_svm,
)

__all__ = [
    "ANNConfig",
    "ELMConfig",
    "FoldPlan",
    "LRConfig",
    "ModelKind",
    "SVMConfig",
    "TrainedModel",
    "cross_validate",
    "default_config",
    "evaluate_model",
    "fit_model",
    "kfold",
    "load_model",
    "poly_expand",
    "save_model",
    "train_ann",
    "train_elm",
    "train_lr",
    "train_svm",
]
