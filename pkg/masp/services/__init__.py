"""
Services module initialization.
"""

from .parser import parse_instance, parse_program, parse_program_with_diagnostics
from .printer import format_formula, print_program
from .sm_transform import phi, phi_minus, sm, star
from .evaluator import answer_sets, classical_models, evaluate, naive_stable_models
from .model_checker import ModelChecker
from .analysis import alpha_normalize, dependency_graph, flatten, is_coherent, is_tight, sccs
from .reductions import circumscribe, clark_normal_form, completion, extract_denials, reduce_choice
from .equivalence import replace, same_answer_sets, strong_equiv_bounded

__all__ = [
    "parse_instance",
    "parse_program",
    "parse_program_with_diagnostics",
    "format_formula",
    "print_program",
    "phi",
    "phi_minus",
    "sm",
    "star",
    "answer_sets",
    "classical_models",
    "evaluate",
    "naive_stable_models",
    "ModelChecker",
    "alpha_normalize",
    "dependency_graph",
    "flatten",
    "is_coherent",
    "is_tight",
    "sccs",
    "circumscribe",
    "clark_normal_form",
    "completion",
    "extract_denials",
    "reduce_choice",
    "replace",
    "same_answer_sets",
    "strong_equiv_bounded",
]
