"""Compile first-order logic to executable Narsese and validate labelled reasoning benchmarks."""

from .compiler import CompileReport, CompileUnit, UnsupportedPattern, compile_query, compile_unit
from .fol import parse_fol
from .labels import Label
from .narsese import NarseseProgram, parse_narsese, serialize

__all__ = [
    "CompileReport",
    "CompileUnit",
    "Label",
    "NarseseProgram",
    "UnsupportedPattern",
    "compile_query",
    "compile_unit",
    "parse_fol",
    "parse_narsese",
    "serialize",
]
