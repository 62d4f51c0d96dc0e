"""Confluence analysis of layered term rewriting systems via cyclic unification."""
from .analysis import CONFLUENT, MAYBE, NON_CONFLUENT, Analysis, AnalysisConfig, analyze
from .terms import App, Var
from .trs import Rule, Trs, TrsError, load_trs, parse_term, parse_trs

__all__ = [
    "App", "Var", "Rule", "Trs", "TrsError", "parse_trs", "parse_term", "load_trs",
    "AnalysisConfig", "Analysis", "analyze", "CONFLUENT", "NON_CONFLUENT", "MAYBE",
]
__version__ = "0.1.0"
