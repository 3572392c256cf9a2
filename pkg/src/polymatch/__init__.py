"""Feature-free correspondence by higher-order matching of minimal-problem polynomials."""

from .errors import (
    BehindCamera,
    DegenerateConfiguration,
    DegreeTooLow,
    EmptyTensor,
    InsufficientPoints,
    PolymatchError,
    ZeroPolynomial,
)
from .geometry import Camera, MinimalProblemKind, p3p_quartic, three_plus_one_quartic, up2p_quadratic
from .matching import accuracy, discretize, power_iteration_dense, power_iteration_sparse, solve
from .polynomials import Polynomial, normalize, resultant_magnitude, sylvester
from .sim import ExperimentConfig, ProblemInstance, generate_instance, run_experiment
from .tensor import SparseAffinityTensor, build_tensor, edge_affinity, sample_hyperedges

__version__ = "0.1.0"

__all__ = [
    "BehindCamera", "DegenerateConfiguration", "DegreeTooLow", "EmptyTensor", "InsufficientPoints",
    "PolymatchError", "ZeroPolynomial",
    "Camera", "MinimalProblemKind", "p3p_quartic", "three_plus_one_quartic", "up2p_quadratic",
    "accuracy", "discretize", "power_iteration_dense", "power_iteration_sparse", "solve",
    "Polynomial", "normalize", "resultant_magnitude", "sylvester",
    "ExperimentConfig", "ProblemInstance", "generate_instance", "run_experiment",
    "SparseAffinityTensor", "build_tensor", "edge_affinity", "sample_hyperedges",
]
