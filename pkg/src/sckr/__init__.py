"""Reasoning with simple contextualized knowledge repositories and justifiable exceptions."""
from .engine import (AnswerSet, CostVector, GroundProgram, answer_sets, cautious_entails,
                     cost, ground, optimal_answer_sets)
from .estimator import CKRReasoner
from .frontend import parse, parse_query, serialize
from .model import SCKR, ContextStructure, NormalAxiom, QueryAtom, make_sckr, validate
from .oracle import (CasModel, ClashingAssumption, check_model, entails, enumerate_justified,
                     herbrand, is_connector, least_model, preferred)
from .program import emit_text, parse_program
from .translator import translate

__version__ = "0.1.0"

__all__ = [
    "AnswerSet", "CKRReasoner", "CasModel", "ClashingAssumption", "ContextStructure",
    "CostVector", "GroundProgram", "NormalAxiom", "QueryAtom", "SCKR", "answer_sets",
    "cautious_entails", "check_model", "cost", "emit_text", "entails", "enumerate_justified",
    "ground", "herbrand", "is_connector", "least_model", "make_sckr", "optimal_answer_sets",
    "parse", "parse_program", "parse_query", "preferred", "serialize", "translate", "validate",
]
