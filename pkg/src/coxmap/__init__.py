"""Rational maps between toric varieties in Cox coordinates.

The package represents a rational map by the tuple of multi-valued
sections it pulls the target coordinates back to.  On top of that sit
checkers for homogeneity and relevance, a completion procedure that
repairs non-complete descriptions divisor by divisor, a constructor
that rebuilds a description from character data, and a numerical
sampling oracle used to cross-check every exact computation.
"""

from coxmap._kernel import BACKEND as kernel_backend
from coxmap.abelian import (
    DimensionMismatch,
    FGAbelianGroup,
    GroupElement,
    IntMatrix,
    SmithDecomposition,
    cokernel,
    hermite_normal_form,
    saturated_kernel,
    smith_normal_form,
    solve_rational,
)
from coxmap.fan import (
    Cone,
    ConeNotInFan,
    Fan,
    StarFan,
    ValidationFailure,
    cone_contains,
    irrelevant_monomials,
    minimal_cone_containing,
    orthogonal_character_basis,
    ray_projection_map,
    star_fan,
    validate_fan,
)
from coxmap.coxring import (
    HomogeneousWitness,
    MPoly,
    ParseError,
    ToricCoxRing,
    build_cox_ring,
    exact_divide,
    format_poly,
    homogeneous_degree,
    order_along,
    parse_poly,
)
from coxmap.sections import (
    FactoredSection,
    InhomogeneousFactor,
    PulledBackSection,
    RadicalScalar,
    expand,
    fractional_part,
    order_along_section,
    root_order,
    section_degree,
    section_div,
    section_mul,
    section_pow,
)
from coxmap.descriptions import (
    CharacterMap,
    CompletionEntry,
    CoxDescription,
    DivisorDiagnosis,
    DivisorStatus,
    HomogeneityFailure,
    IncompleteDescription,
    InconsistentCharacterData,
    InhomogeneousImage,
    NonIntegralL,
    NotInKernel,
    RegularityReport,
    ZeroConeNotInFan,
    candidate_divisors,
    check_homogeneity,
    check_relevance,
    complete,
    construct_description,
    divisor_status,
    induced_character_map,
    pullback_polynomial,
    regularity_report,
    twist_description,
    validate_description,
    verify_ideal_vanishing,
)
from coxmap.oracle import (
    AgreementReport,
    IrrelevantPoint,
    OnPole,
    evaluate_description,
    evaluate_section,
    orbit_equal,
    sample_agreement,
)

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "DimensionMismatch",
    "FGAbelianGroup",
    "GroupElement",
    "IntMatrix",
    "SmithDecomposition",
    "cokernel",
    "hermite_normal_form",
    "saturated_kernel",
    "smith_normal_form",
    "solve_rational",
    "Cone",
    "ConeNotInFan",
    "Fan",
    "StarFan",
    "ValidationFailure",
    "cone_contains",
    "irrelevant_monomials",
    "minimal_cone_containing",
    "orthogonal_character_basis",
    "ray_projection_map",
    "star_fan",
    "validate_fan",
    "HomogeneousWitness",
    "MPoly",
    "ParseError",
    "ToricCoxRing",
    "build_cox_ring",
    "exact_divide",
    "format_poly",
    "homogeneous_degree",
    "order_along",
    "parse_poly",
    "FactoredSection",
    "InhomogeneousFactor",
    "PulledBackSection",
    "RadicalScalar",
    "expand",
    "fractional_part",
    "order_along_section",
    "root_order",
    "section_degree",
    "section_div",
    "section_mul",
    "section_pow",
    "CharacterMap",
    "CompletionEntry",
    "CoxDescription",
    "DivisorDiagnosis",
    "DivisorStatus",
    "HomogeneityFailure",
    "IncompleteDescription",
    "InconsistentCharacterData",
    "InhomogeneousImage",
    "NonIntegralL",
    "NotInKernel",
    "RegularityReport",
    "ZeroConeNotInFan",
    "candidate_divisors",
    "check_homogeneity",
    "check_relevance",
    "complete",
    "construct_description",
    "divisor_status",
    "induced_character_map",
    "pullback_polynomial",
    "regularity_report",
    "twist_description",
    "validate_description",
    "verify_ideal_vanishing",
    "AgreementReport",
    "IrrelevantPoint",
    "OnPole",
    "evaluate_description",
    "evaluate_section",
    "orbit_equal",
    "sample_agreement",
]
