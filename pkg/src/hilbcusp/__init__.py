"""Cusps, toroidal fans and q-expansion data for Hilbert modular varieties over real quadratic fields."""
from .cusps import (COMPOSANTES, POINTES, CuspModule, CuspRecord, LevelContext, component_isomorphic,
                    cusp_count_formula, cusp_invariants, enumerate_cusps_bruteforce, gamma_membership)
from .errors import (HilbcuspError, InvalidArgumentError, InvalidFieldError, LatticeViolationError,
                     NoFundamentalUnitError, NoSolutionError, ResourceLimitError,
                     UnsupportedConfigurationError)
from .fans import (HULL, HULL_SMOOTH, Cone2, Fan, build_admissible_fan, check_admissible,
                   cone_hilbert_basis, hilbert_basis, refine_smooth)
from .field import FieldElement, NumberField, make_field, parse_element
from .ideals import Ideal, ResidueRing, factor_rational_prime
from .mumford import integrality_scale, mumford_generators, polarization_check, torsion_structure
from .qexp import (boundary_components, constant_term_constraint, koecher_divergence, qexp_descriptor,
                   solve_xi_star, uniformization_twist)
from .units import (GM, RESGM, UnitSubgroup, congruence_unit_index, cusp_unit_data, fundamental_unit,
                    totally_positive_unit)

__all__ = [
    "COMPOSANTES", "Cone2", "CuspModule", "CuspRecord", "Fan", "FieldElement", "GM", "HULL",
    "HULL_SMOOTH", "HilbcuspError", "Ideal", "InvalidArgumentError", "InvalidFieldError",
    "LatticeViolationError", "LevelContext", "NoFundamentalUnitError", "NoSolutionError",
    "NumberField", "POINTES", "RESGM", "ResidueRing", "ResourceLimitError", "UnitSubgroup",
    "UnsupportedConfigurationError", "boundary_components", "build_admissible_fan",
    "check_admissible", "component_isomorphic", "cone_hilbert_basis", "congruence_unit_index",
    "constant_term_constraint", "cusp_count_formula", "cusp_invariants", "cusp_unit_data",
    "enumerate_cusps_bruteforce", "factor_rational_prime", "fundamental_unit", "gamma_membership",
    "hilbert_basis", "integrality_scale", "koecher_divergence", "make_field", "mumford_generators",
    "parse_element", "polarization_check", "qexp_descriptor", "refine_smooth", "solve_xi_star",
    "torsion_structure", "totally_positive_unit", "uniformization_twist",
]

__version__ = "0.1.0"
