"""Quasi-morphisms on free groups, free products and metric groups."""
from .kernels import BACKEND
from .qm_core import SyllableQM
from .sequences import FiniteTable, Periodic, Sign
from .words import Alphabet, Word, parse_word

__all__ = ["Alphabet", "BACKEND", "FiniteTable", "Periodic", "SyllableQM", "Sign", "Word", "parse_word"]
__version__ = "0.1.0"
