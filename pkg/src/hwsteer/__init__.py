"""Steering inequalities for d-outcome measurements from Heisenberg-Weyl operators.

Construction of the functional and its reference realization, quantum-bound
certification (eigenvalue + SOS), classical LHS bounds by deterministic-
strategy search, landscape scans of the qutrit solution families, and
self-certification checks.
"""

from .algebra import (alice_observable, alice_power, dag, hw_power,
                      max_entangled, observable_to_povm, omega, pauli_x, pauli_z)
from .classical import (Assignment, ScanResult, brute_force_bound,
                        deterministic_behavior, deterministic_value, scan,
                        scan_to_csv, separable_bound)
from .config import DEFAULT_TOLS, Config, ConfigError, Tolerances, load_config
from .phases import (GammaTensor, PhaseSet, SolutionFamily, SolveOutcome,
                     check_orthogonality, gamma, orthogonality_residual,
                     qutrit_family, solve_phases_numeric, wrap_angle)
from .reference import ReferenceSet, b_bar, b_bar_n, verify_reference
from .reporting import Check, Report
from .selftest import (RecoveryOutcome, equivalence_recovery,
                       maximal_violation_relations, projectivity_probe,
                       run_verify_suite, stabilizer_suite)
from .steering import (Behavior, Realization, ancilla_realization, b_tilde,
                       born_behavior, build_steering_operator, conjugate_bob,
                       functional_from_behavior, max_eigenvalue, quantum_value,
                       reference_realization, sos_gap, validate_realization)

__all__ = [
    "Assignment", "Behavior", "Check", "Config", "ConfigError", "DEFAULT_TOLS",
    "GammaTensor", "PhaseSet", "Realization", "RecoveryOutcome", "ReferenceSet",
    "Report", "ScanResult", "SolutionFamily", "SolveOutcome", "Tolerances",
    "alice_observable", "alice_power", "ancilla_realization", "b_bar", "b_bar_n",
    "b_tilde", "born_behavior", "brute_force_bound", "build_steering_operator",
    "check_orthogonality", "conjugate_bob", "dag", "deterministic_behavior",
    "deterministic_value", "equivalence_recovery", "functional_from_behavior",
    "gamma", "hw_power", "load_config", "max_eigenvalue", "max_entangled",
    "maximal_violation_relations", "observable_to_povm", "omega",
    "orthogonality_residual", "pauli_x", "pauli_z", "projectivity_probe",
    "quantum_value", "qutrit_family", "reference_realization", "run_verify_suite",
    "scan", "scan_to_csv", "separable_bound", "solve_phases_numeric", "sos_gap",
    "stabilizer_suite", "validate_realization", "verify_reference", "wrap_angle",
]

__version__ = "0.1.0"
