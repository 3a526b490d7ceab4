"""Heights, Siegel bases and points of small height outside unions of varieties."""

from .avoid import VarietyUnion, VContainedInVariety, solve, subspace_avoidance
from .certified import CertifiedReal, UnresolvedComparison, certified_compare
from .fields import FieldDescriptor, QuadraticElement, RationalFunction, arith, field_invariants
from .heights import height_H, height_cal_H, height_h, weil_height
from .linalg import BudgetExhausted
from .polynomial import MultivariatePolynomial
from .siegel import siegel_basis
from .subspaces import SubspaceBasis, dual_form, grassmann, subspace_height

__version__ = "0.1.0"

__all__ = [
    "CertifiedReal",
    "UnresolvedComparison",
    "certified_compare",
    "FieldDescriptor",
    "QuadraticElement",
    "RationalFunction",
    "arith",
    "field_invariants",
    "height_H",
    "height_cal_H",
    "height_h",
    "weil_height",
    "SubspaceBasis",
    "grassmann",
    "dual_form",
    "subspace_height",
    "siegel_basis",
    "MultivariatePolynomial",
    "VarietyUnion",
    "VContainedInVariety",
    "solve",
    "subspace_avoidance",
    "BudgetExhausted",
]
