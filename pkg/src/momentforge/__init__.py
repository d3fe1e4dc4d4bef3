"""momentforge: exact reconstruction of measures on finite abelian groups
from their surjection moments, with certified rational brackets.

Every closed-form count in the package is paired with an independent
brute-force oracle, and truncated inversion always returns a two-sided
exact-rational interval rather than a point estimate.
"""

from .budget import Budget, budget_from_env
from .errors import (
    BudgetExceededError,
    ConsistencyError,
    InfeasibleMomentsError,
    InputError,
    MomentforgeError,
)
from .finab import (
    ExtensionTable,
    FinAbGroup,
    Measure,
    aut_bruteforce,
    aut_count,
    count_surjective_matrices,
    enumerate_groups,
    extension_class_count,
    extension_table,
    hom_count,
    hom_count_bruteforce,
    kernel_pair_count,
    semisimplify,
    sur_bruteforce,
    sur_count,
    surjection_kernel_profile,
)
from .inversion import Bracket, MomentTable, invert_zero, multi_invert_zero, partial_sum
from .localize import (
    ModuleMomentTable,
    localized_moments,
    mu_local_direct,
    reconstruct_probability,
)
from .nonab_oracle import hom_a5_count, sur_a5_bruteforce
from .qseries import Rational, SimpleType, inversion_coefficient, q_binomial, q_pochhammer
from .sampler import SamplerConfig, convergence_report, empirical_moments, sample_cokernel
from .surjcount import MultiIndex, TypeBasis, sur_product, sur_single

__all__ = [
    "Budget",
    "budget_from_env",
    "MomentforgeError",
    "InputError",
    "InfeasibleMomentsError",
    "ConsistencyError",
    "BudgetExceededError",
    "Rational",
    "SimpleType",
    "q_pochhammer",
    "q_binomial",
    "inversion_coefficient",
    "TypeBasis",
    "MultiIndex",
    "sur_single",
    "sur_product",
    "FinAbGroup",
    "Measure",
    "ExtensionTable",
    "enumerate_groups",
    "hom_count",
    "hom_count_bruteforce",
    "aut_count",
    "aut_bruteforce",
    "sur_bruteforce",
    "sur_count",
    "semisimplify",
    "surjection_kernel_profile",
    "kernel_pair_count",
    "extension_class_count",
    "extension_table",
    "count_surjective_matrices",
    "hom_a5_count",
    "sur_a5_bruteforce",
    "MomentTable",
    "Bracket",
    "partial_sum",
    "invert_zero",
    "multi_invert_zero",
    "ModuleMomentTable",
    "localized_moments",
    "mu_local_direct",
    "reconstruct_probability",
    "SamplerConfig",
    "sample_cokernel",
    "empirical_moments",
    "convergence_report",
]
