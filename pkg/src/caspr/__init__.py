"""Goal-directed answer set programming for reading-comprehension QA."""
from .defaults import DefaultSpec, PreferenceSpec, augment, compile_all, compile_default, load_defaults, parse_defaults
from .ingest import extract_relations, ingest, load_dependency_triples, load_patterns, translate_question
from .kb import ContextProfile, compile_kb, disambiguate, load_senses, load_triples
from .oracle import brave_entails, ground, stable_models
from .parser import ParseError, parse_literal, parse_program, parse_query, parse_rule, to_text
from .qa import QAContext, answer_question, match, run_batch, score_run
from .solver import Justification, SolveOutcome, SolverConfig, oracle_solve, replay, solve
from .terms import Atom, Compound, Constant, Integer, Literal, Program, Rule, Variable, unify

__all__ = [
    "Atom", "Compound", "Constant", "ContextProfile", "DefaultSpec", "Integer", "Justification",
    "Literal", "ParseError", "PreferenceSpec", "Program", "QAContext", "Rule", "SolveOutcome",
    "SolverConfig", "Variable", "answer_question", "augment", "brave_entails", "compile_all",
    "compile_default", "compile_kb", "disambiguate", "extract_relations", "ground", "ingest",
    "load_defaults", "load_dependency_triples", "load_patterns", "load_senses", "load_triples",
    "match", "oracle_solve", "parse_defaults", "parse_literal", "parse_program", "parse_query",
    "parse_rule", "replay", "run_batch", "score_run", "solve", "stable_models", "to_text",
    "translate_question", "unify",
]
