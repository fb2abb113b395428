"""Exact symbolic calculus over Q[x1..xn] (x) Lambda(c1..cm) and friends."""

from .core import Element, Monomial, RingSpec, Substitution, body, gmul, grade, soul, substitute, z2_grade
from .derivations import GradedDerivation, superbracket
from .errors import (ContractError, GradecalcError, IntegrityError, ParseError, StructureError,
                     TruncationError, ValidationError)
from .forms import Form, exterior_d, interior, lie_derivative, wedge
from .parser import parse, parse_derivation, parse_operator

__version__ = "0.1.0"

__all__ = [
    "ContractError", "Element", "Form", "GradecalcError", "GradedDerivation", "IntegrityError", "Monomial",
    "ParseError", "RingSpec", "StructureError", "Substitution", "TruncationError", "ValidationError", "body",
    "exterior_d", "gmul", "grade", "interior", "lie_derivative", "parse", "parse_derivation", "parse_operator",
    "soul", "substitute", "superbracket", "wedge", "z2_grade",
]
