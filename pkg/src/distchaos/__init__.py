"""Distributionally irregular entire and harmonic functions, built and checked at finite horizons."""

__version__ = "0.1.0"

from ._errors import (BudgetError, ContractError, DistChaosError, ParameterError, RangeError,
                      SingularityError)
from .series import (EntireSeries, GrowthEnvelope, OrbitNorms, critical_exponent, differentiate,
                     exp_type_estimate, integrate, m2_norm, mp_norm, orbit_norms, sup_norm,
                     translate)
from .harmonic import (MultiIndexPoly, antiderivative_alpha, antiderivative_coord, c_coeff,
                       cN_constant, dim_harmonic, harmonic_basis, is_harmonic, laplacian,
                       translation_constant, m2_sphere, poisson_integral, sup_norm_sphere,
                       translate_harmonic)
from .density import (DensityProfile, IndexSet, build_blocks, density_profile,
                      distribution_functions, partial_density)
from .constructors import (ConstructionParams, WeightSchedule, WitnessTailBound,
                           build_irregular_entire, build_irregular_harmonic, build_periodic_point,
                           build_weight_star, choose_block_parameters, growth_constants)
from .verifier import (Certificate, absolutely_cesaro_check, barnes_series_check,
                       certify_distributionally_unbounded, certify_near_zero,
                       cesaro_average_check, check_growth_envelope, frechet_distance,
                       lower_bound_average_check)
