"""Kripke semantics toolkit with the TQBF and single-variable reductions for logics between K and KTB."""

from .formula import (
    FALSUM,
    TOP,
    And,
    Box,
    Diamond,
    Falsum,
    Formula,
    Implies,
    Not,
    Or,
    Var,
    parse,
    to_text,
)
from .kripke import Frame, FrameClass, Model, is_in_class, model_check

__version__ = "0.1.0"

__all__ = [
    "FALSUM",
    "TOP",
    "And",
    "Box",
    "Diamond",
    "Falsum",
    "Formula",
    "Implies",
    "Not",
    "Or",
    "Var",
    "parse",
    "to_text",
    "Frame",
    "FrameClass",
    "Model",
    "is_in_class",
    "model_check",
]
