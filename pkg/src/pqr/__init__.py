"""Type checker and interpreter for a quantum circuit description language with width-bounding types."""

from .circuit import Circuit, LabelContext, LabelSupply
from .index import Index
from .parser import ParseError, parse, parse_expr, parse_index, parse_judgment, parse_type
from .printer import pretty
from .solver import Refuted, Unknown, Valid, check_eq, check_leq
from .typechecker import TypeCheckError, check_program

__all__ = [
    "Circuit",
    "Index",
    "LabelContext",
    "LabelSupply",
    "ParseError",
    "Refuted",
    "TypeCheckError",
    "Unknown",
    "Valid",
    "check_eq",
    "check_leq",
    "check_program",
    "parse",
    "parse_expr",
    "parse_index",
    "parse_judgment",
    "parse_type",
    "pretty",
]
