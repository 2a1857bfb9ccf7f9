"""Decision procedures for involutive and bi-lattice Gödel modal logics."""

from .formula import Formula, Logic, desugar, parse, to_text
from .kripke import FModel, Model, ValuePair, eval_fmodel, eval_standard, load_model, save_model
from .tableau import SearchConfig, is_valid, search

__all__ = [
    "Formula", "Logic", "parse", "to_text", "desugar",
    "Model", "FModel", "ValuePair", "eval_standard", "eval_fmodel", "load_model", "save_model",
    "SearchConfig", "search", "is_valid",
]
