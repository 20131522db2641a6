"""Squarefree values of integer quartics: local root counts, densities, exact counts."""
from .congruence import (
    NAMED,
    QuarticPoly,
    RootSet,
    as_poly,
    classify_prime,
    classify_quadratic,
    cyclotomic_poly,
    cyclotomic_splitting,
    discriminant,
    eval_mod,
    fixed_divisor,
    in_support,
    is_separable,
    quartic_residue_3,
    rho,
    rho_fast,
    roots_mod_p,
    roots_mod_pk,
)
from .counting import (
    CountReport,
    EmpiricalDensity,
    Interval,
    ScanRow,
    count_by_divisor,
    count_exact,
    count_sieve,
    empirical_density,
    exact_report,
    rows_to_csv,
    scan_error,
)
from .density import (
    DensityEstimate,
    LocalFactor,
    density_variants,
    euler_product,
    euler_product_restricted,
    local_factor,
)
from .modarith import (
    ConsistencyError,
    ExplicitBoundRequired,
    QfRep,
    RangeLimitError,
    SingularRootError,
    UnsupportedRamifiedError,
    cornacchia,
    crt_combine,
    factorize,
    hensel_lift,
    int_sqrt,
    is_prime,
    is_squarefree,
    jacobi,
    mul_mod,
    pow_mod,
    primes_in_ap,
    quartic_residue,
    sqrt_mod,
)

__version__ = "0.1.0"
