"""Contact projective structures at desk scale: graded algebras, flat models,
chains, curvature transfer and the Kostant calculus behind normality."""

from .algebra import (
    AlgebraDescriptor,
    AlgebraMismatchError,
    Family,
    GradedElement,
    SymplecticForm,
    basis,
    bracket,
    grade_project,
    grading_element,
    killing_pair,
    sl_projective,
    sp_contact,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraDescriptor",
    "AlgebraMismatchError",
    "Family",
    "GradedElement",
    "SymplecticForm",
    "basis",
    "bracket",
    "grade_project",
    "grading_element",
    "killing_pair",
    "sl_projective",
    "sp_contact",
    "__version__",
]
