"""Numerical certification of E_f additivity for two antisymmetric 3x3 states."""

from .antisym import AntisymState, lemma1_unitary, theta_map, wedge_action
from .bounds import BoundReport, entanglement_of_psi_prime
from .eof import Budget, Ensemble, EofEstimate, eof_lower_range, eof_upper, reduce_to_psi_prime, verify_additivity
from .tensor_core import DensityMatrix, StateVector, partial_trace, schmidt, von_neumann_entropy
from .xi_spectrum import ProbabilityTriple, analytic_spectrum, build_psi_prime, build_xi

__all__ = [
    "AntisymState", "lemma1_unitary", "theta_map", "wedge_action",
    "BoundReport", "entanglement_of_psi_prime",
    "Budget", "Ensemble", "EofEstimate", "eof_lower_range", "eof_upper",
    "reduce_to_psi_prime", "verify_additivity",
    "DensityMatrix", "StateVector", "partial_trace", "schmidt", "von_neumann_entropy",
    "ProbabilityTriple", "analytic_spectrum", "build_psi_prime", "build_xi",
]
