"""Two-step Gaussian-process emulation of simulators whose response
surfaces contain discontinuities.

A probabilistic boundary classifier (EP-based GP classification,
one-versus-rest) segments the input domain, a GP regressor emulates the
surface inside the valid region, and active-learning loops choose the
training points for both. Input-parameter uncertainty can be propagated
through the trained emulator to a distribution over the output
biomarker.
"""

from .active import (
    ClassifierALConfig,
    PSOSettings,
    SurfaceALConfig,
    active_learn_classifier,
    active_learn_surface,
    conditional_entropy,
    entropy_from_variance,
    pso_minimize,
)
from .classification import (
    BinaryGPClassifier,
    OVRClassifier,
    certainty_from_probabilities,
)
from .emulator import (
    BiomarkerDistribution,
    EmulatorPrediction,
    EmulatorPredictions,
    LUTInterpolator,
    TwoStepConfig,
    TwoStepEmulator,
    boundary_error,
    learning_curve,
    mean_absolute_surface_error,
    misclassification_rate,
    surface_error,
    train_two_step,
)
from .errors import (
    ConfigError,
    EmptyDistributionError,
    GpemuError,
    IngestionError,
    NumericalError,
    OptimizationError,
    SimulationError,
)
from .kernels import FITCStructure, RationalQuadratic, SquaredExponential
from .regression import GPRegressor, optimize_hyperparameters
from .simulators import (
    HillParams,
    LabeledSet,
    PoolSimulator,
    SimResult,
    SyntheticSurface,
    hill_scaling,
    percent_block,
    read_dataset,
    sample_inputs,
    write_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "BiomarkerDistribution",
    "BinaryGPClassifier",
    "ClassifierALConfig",
    "ConfigError",
    "EmptyDistributionError",
    "EmulatorPrediction",
    "EmulatorPredictions",
    "FITCStructure",
    "GPRegressor",
    "GpemuError",
    "HillParams",
    "IngestionError",
    "LUTInterpolator",
    "LabeledSet",
    "NumericalError",
    "OVRClassifier",
    "OptimizationError",
    "PSOSettings",
    "PoolSimulator",
    "RationalQuadratic",
    "SimResult",
    "SimulationError",
    "SquaredExponential",
    "SurfaceALConfig",
    "SyntheticSurface",
    "TwoStepConfig",
    "TwoStepEmulator",
    "active_learn_classifier",
    "active_learn_surface",
    "boundary_error",
    "certainty_from_probabilities",
    "conditional_entropy",
    "entropy_from_variance",
    "hill_scaling",
    "learning_curve",
    "mean_absolute_surface_error",
    "misclassification_rate",
    "optimize_hyperparameters",
    "percent_block",
    "pso_minimize",
    "read_dataset",
    "sample_inputs",
    "surface_error",
    "train_two_step",
    "write_dataset",
]
