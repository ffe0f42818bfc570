"""Clark measures, model spaces and operators intertwined with Clark unitaries."""
from ._kernels import BACKEND
from .asymptotics import (
    PowerNormReport,
    block_inverse_bound,
    certify,
    cesaro_asymptote,
    contracting_return_times,
    power_sweep,
    return_norm_identities,
    return_time_limit,
)
from .blaschke import FiniteBlaschke, clark_measure, from_clark_measure, monomial, sup_distance
from .errors import ClarkError, HypothesisError, ReturnTimeError
from .measure import AtomicMeasure, find_return_times, fourier_coefficient, normalize, weight_transform
from .model_space import ModelSpace, ModelVector
from .scenarios import (
    Instance,
    example_clark_weight,
    example_crofoot,
    reduction_pipeline,
    random_instance,
    verify_instance,
)

__version__ = "0.1.0"
