"""Exact linear algebra, Fourier analysis and search for l-Oddtown set families."""

from ._accel import backend, set_backend
from .admissible import (
    count_bounded_square_sum,
    greedy_admissible_submatrix,
    is_admissible,
    lemma42_bound,
)
from .errors import (
    BudgetExceededError,
    DomainError,
    DuplicateColumnsError,
    InvalidFamilyError,
    InvalidInstanceError,
    InvalidModulusError,
    OtlabError,
)
from .fourier import (
    Pmf,
    Spectrum,
    centered_inner,
    dft,
    lemma41_probability,
    pmf_of_linear_image,
    prop43_check,
    sigma_stat,
)
from .modlinalg import (
    ModMatrix,
    OrthoInstance,
    all_columns_matrix,
    block_construction,
    count_01_in_rowspace,
    lemma21_verify,
    rank_mod_p,
    row_space_normalize,
    rref_mod_p,
)
from .numtheory import (
    NOT_APPLICABLE,
    BoundReport,
    Factorization,
    binary_entropy,
    bound_table,
    epsilon_of,
    factorize,
)
from .oddtown import (
    Certificate,
    SetFamily,
    certify,
    classify_primes,
    dedup_columns,
    incidence_matrix,
    singleton_family,
    split,
    support_reduce,
    verify_family,
)
from .solver import SolveResult, build_graph, max_oddtown

__version__ = "0.1.0"
