"""Exact desk-scale simulation of hidden-shift algorithms over quadratic characters.

The package splits into integer-side number theory, finite-field arithmetic,
an arbitrary-dimension statevector simulator, query-counting shift oracles,
the end-to-end solvers with their exact verifiers, and a batch CLI.
"""

from .algorithms import (
    DistributionComparison,
    SolveReport,
    best_convergent_denominator,
    best_convergent_fraction,
    prepare_character_state,
    repeated_sampling_comparison,
    sjsp_attempt_analysis,
    slsp_attempt_analysis,
    solve_sjsp,
    solve_sjsp_unknown_n,
    solve_slsp,
    solve_sqcp,
    sqcp_attempt_analysis,
    tft_matrix_deviation,
    verify_jacobi_qft_lemma,
)
from .finite_field import (
    FieldElement,
    FieldSpec,
    element_from_index,
    element_to_index,
    ff_arith,
    ff_neg,
    ff_pow,
    format_poly,
    is_irreducible,
    make_element,
    make_field,
    one,
    parse_element,
    parse_poly,
    quadratic_character,
    trace,
    trace_coordinates,
    trace_coordinates_inverse,
    zero,
)
from .number_theory import (
    FactoredOddSquarefree,
    GaussSum,
    GaussSumSpec,
    convergents,
    crt_compose,
    crt_split,
    euler_phi,
    factor_trial,
    gauss_sum_bruteforce,
    gauss_sum_closed_form,
    is_prime,
    jacobi,
    legendre,
)
from .oracles import (
    ShiftOracle,
    discard_result_register,
    field_oracle,
    jacobi_oracle,
    jacobi_unknown_oracle,
    legendre_oracle,
    result_is_zero,
    result_sign_phase,
)
from .qsim import (
    RegisterLayout,
    StateVector,
    apply_phase,
    basis_state,
    distribution,
    equal_up_to_global_phase,
    format_state_dump,
    measure,
    measure_predicate,
    normalized,
    permute_basis,
    project,
    qft,
    qft_factor,
    trace_fourier_transform,
)

__version__ = "0.1.0"
