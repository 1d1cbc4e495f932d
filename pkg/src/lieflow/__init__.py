"""Linear flows of derivations on finite-dimensional Lie algebras and
their simply connected nilpotent groups."""

__version__ = "0.1.0"

from .lie_core import (LieAlgebra, bracket, is_nilpotent, lower_central_series,
                       validate_jacobi)
from .spectral import (Derivation, SpectralDecomposition, grading_check, is_hyperbolic,
                       is_semisimple_on, spectral_decompose, validate_leibniz)
from .matrix_flow import (LinearFlow, adapted_form, contraction_constants, expansion_constants,
                          expm, flow_linear)
from .nilpotent_group import (GroupElement, attractor_test, bch, flow_group, gauge, inverse,
                              multiply, split_plus_minus)
from .conjugacy import (EuclideanConjugacy, FlowSystem, GroupConjugacy, build_group_conjugacy,
                        crossing_time, evaluate_pi, evaluate_pi_inverse, evaluate_zeta,
                        verify_conjugacy)
from .stability import (Verdict, classify_identity_stability, lyapunov_estimate,
                        lyapunov_exact)
from .systemfile import load_system, parse_system

__all__ = [
    "LieAlgebra", "bracket", "is_nilpotent", "lower_central_series", "validate_jacobi",
    "Derivation", "SpectralDecomposition", "grading_check", "is_hyperbolic", "is_semisimple_on",
    "spectral_decompose", "validate_leibniz", "LinearFlow", "adapted_form",
    "contraction_constants", "expansion_constants", "expm", "flow_linear", "GroupElement",
    "attractor_test", "bch", "flow_group", "gauge", "inverse", "multiply", "split_plus_minus",
    "EuclideanConjugacy", "FlowSystem", "GroupConjugacy", "build_group_conjugacy",
    "crossing_time", "evaluate_pi", "evaluate_pi_inverse", "evaluate_zeta", "verify_conjugacy",
    "Verdict", "classify_identity_stability", "lyapunov_estimate", "lyapunov_exact",
    "load_system", "parse_system",
]
