"""Compare quantum and random-variable distributions of composite observables."""

__version__ = "0.1.0"

from .classical import (
    dependent_combine,
    distance,
    independent_combine,
    pushforward,
    rv_moment,
    sample_oracle,
    total_variation,
    variance,
    wasserstein1,
)
from .classifier import (
    Branch,
    CaseLabel,
    ComparisonReport,
    Relation,
    Tolerances,
    UnclassifiedError,
    classify,
    detect_functional_dependence,
    run_comparison,
    trace_form_moments,
)
from .distribution import DiscreteDistribution
from .linalg import State, commutator_norm, expectation, hermitian_eig, multiply, svd, tensor_product
from .quantum import (
    SchmidtDecomposition,
    marginal_distribution,
    observable_distribution,
    qm_distribution_of_function,
    qm_free_particle_variance,
    qm_moment,
    schmidt,
)
from .spectral import (
    ScalarFunction,
    SpectralDecomposition,
    decompose,
    joint_function_projectors,
    operator_function,
)
