"""Structural identifiability analysis for nonlinear networks on directed acyclic graphs."""

from .engine import Report, Status, Verdict, Witness, WitnessKind, analyze
from .errors import NetidentError
from .funclib import EdgeFunction, monomial, random_function_set, validate_class
from .graph import Dag, topological_order
from .patterns import IdentificationPattern, check_necessary, enumerate_valid_patterns
from .simkit import ExcitationSchedule, response_equal, simulate

__version__ = "0.1.0"

__all__ = [
    "Dag",
    "EdgeFunction",
    "ExcitationSchedule",
    "IdentificationPattern",
    "NetidentError",
    "Report",
    "Status",
    "Verdict",
    "Witness",
    "WitnessKind",
    "analyze",
    "check_necessary",
    "enumerate_valid_patterns",
    "monomial",
    "random_function_set",
    "response_equal",
    "simulate",
    "topological_order",
    "validate_class",
]
