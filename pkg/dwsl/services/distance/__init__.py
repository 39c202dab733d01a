"""
Distance-distribution models, soft-minimum estimators and the distance-to-return map.
"""

from dwsl.services.distance.checkpoints import (
    distance_model_record,
    load_distance_model,
    save_distance_model,
)
from dwsl.services.distance.fitting import (
    REGRESSION_MODES,
    fit_tabular,
    train_classifier,
    train_regression,
)
from dwsl.services.distance.models import (
    STATISTICS,
    CategoricalDistance,
    CategoricalDistanceModel,
    ClassifierDistanceModel,
    DistanceModel,
    RegressionDistanceModel,
    TabularDistanceModel,
    expectation_distance,
    limit_temperature,
    logsumexp_distance,
    mean_distance,
    soft_minimum,
)
from dwsl.services.distance.returns import distance_to_return

__all__ = [
    "REGRESSION_MODES",
    "STATISTICS",
    "CategoricalDistance",
    "CategoricalDistanceModel",
    "ClassifierDistanceModel",
    "DistanceModel",
    "RegressionDistanceModel",
    "TabularDistanceModel",
    "distance_model_record",
    "distance_to_return",
    "expectation_distance",
    "fit_tabular",
    "limit_temperature",
    "load_distance_model",
    "logsumexp_distance",
    "mean_distance",
    "save_distance_model",
    "soft_minimum",
    "train_classifier",
    "train_regression",
]
