"""End-to-end solvers for the four shifted-character problems.

Each solver is Las-Vegas: candidates recovered from the final measurement are
verified against classical oracle probes and wrong ones are retried, so a
returned shift is always correct and only the attempt count is random.  The
module also provides exact, sampling-free verifiers for the transform
identity behind the composite-modulus solver and for the relation between
Fourier-sampling a short register and its repetition on a larger one.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import finite_field as ff
from .errors import (
    DomainTooLarge,
    EvenInput,
    ModulusTooLargeForM,
    NotSquareFree,
    NoValidConvergent,
    RetriesExhausted,
)
from .number_theory import (
    FactoredOddSquarefree,
    GaussSumSpec,
    convergents,
    crt_compose,
    euler_phi,
    factor_trial,
    gauss_sum_closed_form,
    jacobi,
    legendre,
)
from .oracles import (
    RESULT_DIM,
    VARIANT_FIELD,
    VARIANT_JACOBI,
    VARIANT_JACOBI_UNKNOWN,
    VARIANT_LEGENDRE,
    ShiftOracle,
    discard_result_register,
    result_is_zero,
    result_sign_phase,
)
from .qsim import (
    RegisterLayout,
    StateVector,
    apply_phase,
    basis_state,
    distribution,
    measure,
    normalized,
    permute_basis,
    project,
    qft,
    qft_factor,
    trace_fourier_transform,
)

MAX_ATTEMPTS = 64
PERIOD_PROBES = 20

# Exact distributions and transcripts are only recorded up to this dimension.
_ANALYSIS_DIM_LIMIT = 4096


@dataclass
class SolveReport:
    """Bookkeeping for one solver run.

    coherent_queries and classical_queries are deltas of the oracle counters
    over the run.  zero_branch_probability is the exact chance that one
    state-preparation attempt measures a zero function value.  When the final
    register is desk-sized, exact_distribution holds the noiseless outcome
    distribution of the successful attempt's final measurement and
    exact_success_probability its value at the correct outcome.
    """

    variant: str
    recovered_shift: object
    recovered_modulus: int | None
    attempts: int
    coherent_queries: int
    classical_queries: int
    zero_branch_probability: float | None = None
    exact_success_probability: float | None = None
    exact_distribution: np.ndarray | None = None
    candidate_moduli: list = field(default_factory=list)
    transcript: list | None = None


@dataclass(frozen=True)
class DistributionComparison:
    """Reduced-fraction vs continued-fraction sampling distributions."""

    n: int
    big_m: int
    shift: int
    rf_distribution: dict
    cf_distribution: dict
    l1_distance: float
    bound: float


# ---------------------------------------------------------------------------
# shared state preparation


def prepare_character_state(oracle: ShiftOracle, dim: int, rng):
    """One preparation attempt for the phase state c * sum f(x)|x>.

    Builds the uniform superposition, evaluates the oracle coherently, and
    measures whether the computed value is zero.  Returns a triple
    (accepted, state, zero_probability):

    - accepted: the nonzero branch was measured; the sign of each branch has
      been written into the phase, the register uncomputed with a second
      coherent query, and the register discarded.  Slots beyond the oracle
      domain are dummy positions that keep amplitude with phase +1.
    - rejected: state is the collapsed zero-value branch, register attached.
    """
    state = qft(basis_state(dim, 0))
    state = oracle.value_query_superposed(state)
    zero_prob, zero_state = project(state, result_is_zero)
    if rng.random() < zero_prob:
        return False, zero_state, zero_prob
    _, state = project(state, lambda x: not result_is_zero(x))
    state = result_sign_phase(state)
    state = oracle.value_query_superposed(state, entangled=True)
    return True, discard_result_register(state), zero_prob


def _prepare_exact(oracle: ShiftOracle, dim: int):
    """Deterministic variant: always take the accepted branch by projection."""
    state = qft(basis_state(dim, 0))
    state = oracle.value_query_superposed(state)
    zero_prob, _ = project(state, result_is_zero)
    _, state = project(state, lambda x: not result_is_zero(x))
    state = result_sign_phase(state)
    state = oracle.value_query_superposed(state, entangled=True)
    return zero_prob, discard_result_register(state)


# ---------------------------------------------------------------------------
# Fourier stages


def _legendre_stage(state: StateVector, p: int, transcript=None) -> StateVector:
    """Transform, divide out the unshifted symbol, transform back."""
    state = qft(state)
    if transcript is not None:
        transcript.append(("transformed", state))
    state = apply_phase(state, lambda y: 1.0 if y == 0 else float(legendre(y, p)))
    return qft(state, inverse=True)


def _sjsp_stage(state: StateVector, moduli: FactoredOddSquarefree, transcript=None):
    """Split into prime-power registers and run the prime stage on each."""
    layout = RegisterLayout(moduli.factors)
    state = permute_basis(
        state, lambda x: layout.index(tuple(x % pj for pj in moduli.factors))
    )
    for axis in range(len(moduli.factors)):
        state = qft_factor(state, layout, axis)
    if transcript is not None:
        transcript.append(("transformed", state))

    def unshifted_symbol(index: int) -> float:
        out = 1.0
        for c, pj in zip(layout.coords(index), moduli.factors):
            if c:
                out *= legendre(c, pj)
        return out

    state = apply_phase(state, unshifted_symbol)
    for axis in range(len(moduli.factors)):
        state = qft_factor(state, layout, axis, inverse=True)
    return state, layout


@lru_cache(maxsize=None)
def _char_table(fld: ff.FieldSpec) -> tuple[int, ...]:
    return tuple(
        ff.quadratic_character(fld, ff.element_from_index(fld, i))
        for i in range(fld.q)
    )


def _sqcp_stage(state: StateVector, fld: ff.FieldSpec, transcript=None) -> StateVector:
    """Trace-transform, strip character phases, fold the dummy slot onto |0>."""
    q = fld.q
    state = trace_fourier_transform(state, fld)
    if transcript is not None:
        transcript.append(("transformed", state))
    # chi(0) = 0 guarantees an empty |0> slot; the dummy amplitude lands there.
    assert abs(state.amps[0]) <= 1e-9, "slot y=0 unexpectedly occupied"
    chi = _char_table(fld)
    state = apply_phase(state, lambda y: float(chi[y]) if 0 < y < q else 1.0)
    unit = gauss_sum_closed_form(GaussSumSpec.for_field(fld)).unit
    state = permute_basis(state, lambda y: {0: q, q: 0}.get(y, y))
    state = apply_phase(
        state, lambda y: unit if y == 0 else (unit.conjugate() if y == q else 1.0)
    )
    return trace_fourier_transform(state, fld, inverse=True)


# ---------------------------------------------------------------------------
# candidate verification against classical probes


def _verify_legendre(oracle: ShiftOracle, p: int, cand: int, rng) -> bool:
    # The symbol vanishes at exactly one point, so the zero probe is decisive;
    # the second probe is an independent consistency check.
    if oracle.query((-cand) % p) != 0:
        return False
    x = int(rng.integers(p))
    return oracle.query(x) == legendre(x + cand, p)


def _verify_field(oracle: ShiftOracle, fld: ff.FieldSpec, cand, rng) -> bool:
    if oracle.query(ff.element_to_index(fld, ff.ff_neg(fld, cand))) != 0:
        return False
    x = ff.element_from_index(fld, int(rng.integers(fld.q)))
    expected = ff.quadratic_character(fld, ff.ff_arith(fld, x, cand, "add"))
    return oracle.query(ff.element_to_index(fld, x)) == expected


def _verify_jacobi(oracle: ShiftOracle, n: int, cand: int) -> bool:
    # For a composite modulus no fixed pair of probes separates every wrong
    # shift, so compare one full period; n is desk-scale.
    return all(oracle.query(x) == jacobi(x + cand, n) for x in range(n))


# ---------------------------------------------------------------------------
# solvers


def solve_slsp(p: int, oracle: ShiftOracle, rng, keep_transcript: bool = False) -> SolveReport:
    """Recover the shift of a Legendre-symbol oracle over Z_p.

    Each attempt spends exactly two coherent queries.  A measured zero value
    (chance 1/p) reveals the shift directly; otherwise the collapsed phase
    state goes through the Fourier stage, whose final distribution puts mass
    (p-1)/p on the negated shift.
    """
    if oracle.variant != VARIANT_LEGENDRE or oracle.domain_size != p:
        raise ValueError("oracle does not match the requested prime")
    q0, c0 = oracle.phase_query_count, oracle.query_count
    for attempt in range(1, MAX_ATTEMPTS + 1):
        transcript = [] if keep_transcript and p <= _ANALYSIS_DIM_LIMIT else None
        accepted, state, zero_prob = prepare_character_state(oracle, p, rng)
        final = None
        if accepted:
            if transcript is not None:
                transcript.append(("prepared", state))
            final = _legendre_stage(state, p, transcript)
            if transcript is not None:
                transcript.append(("final", final))
            index, _ = measure(final, rng)
            cand = (-index) % p
        else:
            index, _ = measure(state, rng)
            cand = (-(index // RESULT_DIM)) % p
        if _verify_legendre(oracle, p, cand, rng):
            dist = prob = None
            if final is not None and p <= _ANALYSIS_DIM_LIMIT:
                dist = distribution(final)
                prob = float(dist[(-cand) % p])
            return SolveReport(
                variant=VARIANT_LEGENDRE,
                recovered_shift=cand,
                recovered_modulus=None,
                attempts=attempt,
                coherent_queries=oracle.phase_query_count - q0,
                classical_queries=oracle.query_count - c0,
                zero_branch_probability=zero_prob,
                exact_success_probability=prob,
                exact_distribution=dist,
                transcript=transcript,
            )
    raise RetriesExhausted(f"no verified shift in {MAX_ATTEMPTS} attempts")


def solve_sjsp(
    moduli: FactoredOddSquarefree, oracle: ShiftOracle, rng, keep_transcript: bool = False
) -> SolveReport:
    """Recover the shift of a Jacobi-symbol oracle with known square-free n.

    The zero branch of the preparation measurement carries no shift
    information for composite n, so it is simply retried; its acceptance
    probability is phi(n)/n.  After the Chinese-remainder relabeling the
    prime stage runs on every factor register and the negated per-factor
    outcomes recompose to the shift.
    """
    n = moduli.n
    if oracle.variant not in (VARIANT_JACOBI, VARIANT_JACOBI_UNKNOWN):
        raise ValueError("oracle is not a Jacobi-symbol instance")
    if oracle.domain_size < n:
        raise ValueError("oracle domain smaller than the modulus")
    q0, c0 = oracle.phase_query_count, oracle.query_count
    for attempt in range(1, MAX_ATTEMPTS + 1):
        transcript = [] if keep_transcript and n <= _ANALYSIS_DIM_LIMIT else None
        accepted, state, zero_prob = prepare_character_state(oracle, n, rng)
        if not accepted:
            continue
        if transcript is not None:
            transcript.append(("prepared", state))
        final, layout = _sjsp_stage(state, moduli, transcript)
        if transcript is not None:
            transcript.append(("final", final))
        index, _ = measure(final, rng)
        cand = crt_compose(
            tuple((-c) % pj for c, pj in zip(layout.coords(index), moduli.factors)),
            moduli,
        )
        if _verify_jacobi(oracle, n, cand):
            dist = prob = None
            if n <= _ANALYSIS_DIM_LIMIT:
                dist = distribution(final)
                correct = layout.index(tuple((-cand) % pj for pj in moduli.factors))
                prob = float(dist[correct])
            return SolveReport(
                variant=oracle.variant,
                recovered_shift=cand,
                recovered_modulus=None,
                attempts=attempt,
                coherent_queries=oracle.phase_query_count - q0,
                classical_queries=oracle.query_count - c0,
                zero_branch_probability=zero_prob,
                exact_success_probability=prob,
                exact_distribution=dist,
                transcript=transcript,
            )
    raise RetriesExhausted(f"no verified shift in {MAX_ATTEMPTS} attempts")


def best_convergent_fraction(i: int, big_m: int, max_den: int | None = None) -> Fraction:
    """The largest-denominator convergent of i/M with denominator <= sqrt(M)."""
    if max_den is None:
        max_den = math.isqrt(big_m)
    best = Fraction(0, 1)
    for frac in convergents(i, big_m):
        if frac.denominator <= max_den:
            best = frac
        else:
            break
    return best


def best_convergent_denominator(i: int, big_m: int) -> int:
    return best_convergent_fraction(i, big_m).denominator


def _period_holds(oracle: ShiftOracle, period: int, rng, probes: int = PERIOD_PROBES) -> bool:
    top = oracle.domain_size - period
    for _ in range(probes):
        x = int(rng.integers(top))
        if oracle.query(x) != oracle.query(x + period):
            return False
    return True


def solve_sjsp_unknown_n(big_m: int, oracle: ShiftOracle, rng) -> SolveReport:
    """Recover both the hidden modulus and the shift from a Z_M oracle.

    Fourier-samples the repeated phase state over Z_M, reads a modulus
    candidate off the continued-fraction expansion of outcome/M, validates it
    with periodicity probes and square-freeness, and hands the oracle to the
    known-modulus solver.  Invalid candidates are resampled; a candidate that
    passes the probes but still is not the true period can only burn the
    sub-solver's retries, never return a wrong answer.
    """
    if oracle.variant != VARIANT_JACOBI_UNKNOWN or oracle.domain_size != big_m:
        raise ValueError("oracle does not match the requested domain size")
    if math.isqrt(big_m) < 3:
        raise NoValidConvergent(f"no odd modulus >= 3 fits below sqrt({big_m})")
    q0, c0 = oracle.phase_query_count, oracle.query_count
    candidates = []
    zero_prob = None
    for attempt in range(1, MAX_ATTEMPTS + 1):
        accepted, state, zero_prob = prepare_character_state(oracle, big_m, rng)
        if not accepted:
            continue
        index, _ = measure(qft(state), rng)
        den = best_convergent_denominator(index, big_m)
        candidates.append(den)
        if den < 3 or den * den >= big_m:
            continue
        try:
            moduli = factor_trial(den)
        except (EvenInput, NotSquareFree):
            continue
        if not _period_holds(oracle, den, rng):
            continue
        try:
            sub = solve_sjsp(moduli, oracle, rng)
        except RetriesExhausted:
            continue
        return SolveReport(
            variant=VARIANT_JACOBI_UNKNOWN,
            recovered_shift=sub.recovered_shift,
            recovered_modulus=den,
            attempts=attempt,
            coherent_queries=oracle.phase_query_count - q0,
            classical_queries=oracle.query_count - c0,
            zero_branch_probability=zero_prob,
            exact_success_probability=sub.exact_success_probability,
            exact_distribution=sub.exact_distribution,
            candidate_moduli=candidates,
        )
    raise RetriesExhausted(f"no verified modulus in {MAX_ATTEMPTS} attempts")


def solve_sqcp(
    fld: ff.FieldSpec, oracle: ShiftOracle, rng, keep_transcript: bool = False
) -> SolveReport:
    """Recover the shift of a quadratic-character oracle over F_q.

    The register has one extra dummy slot so the preparation succeeds with
    probability q/(q+1); the complementary branch reveals the shift outright.
    On the accepted branch the exact closed-form Gauss-sum unit folds the
    dummy amplitude onto |0>, making the conditional final distribution
    one-hot at the negated shift.
    """
    if oracle.variant != VARIANT_FIELD or oracle.domain_size != fld.q:
        raise ValueError("oracle does not match the requested field")
    q0, c0 = oracle.phase_query_count, oracle.query_count
    dim = fld.q + 1
    for attempt in range(1, MAX_ATTEMPTS + 1):
        transcript = [] if keep_transcript and dim <= _ANALYSIS_DIM_LIMIT else None
        accepted, state, zero_prob = prepare_character_state(oracle, dim, rng)
        final = None
        if accepted:
            if transcript is not None:
                transcript.append(("prepared", state))
            final = _sqcp_stage(state, fld, transcript)
            if transcript is not None:
                transcript.append(("final", final))
            index, _ = measure(final, rng)
            if index >= fld.q:  # rounding noise on the emptied dummy slot
                continue
            cand = ff.ff_neg(fld, ff.element_from_index(fld, index))
        else:
            index, _ = measure(state, rng)
            cand = ff.ff_neg(fld, ff.element_from_index(fld, index // RESULT_DIM))
        if _verify_field(oracle, fld, cand, rng):
            dist = prob = None
            if final is not None and dim <= _ANALYSIS_DIM_LIMIT:
                dist = distribution(final)
                prob = float(dist[ff.element_to_index(fld, ff.ff_neg(fld, cand))])
            return SolveReport(
                variant=VARIANT_FIELD,
                recovered_shift=cand,
                recovered_modulus=None,
                attempts=attempt,
                coherent_queries=oracle.phase_query_count - q0,
                classical_queries=oracle.query_count - c0,
                zero_branch_probability=zero_prob,
                exact_success_probability=prob,
                exact_distribution=dist,
                transcript=transcript,
            )
    raise RetriesExhausted(f"no verified shift in {MAX_ATTEMPTS} attempts")


# ---------------------------------------------------------------------------
# exact per-attempt analysis (no sampling; consumes two coherent queries)


def slsp_attempt_analysis(p: int, oracle: ShiftOracle):
    """(zero-branch probability, conditional final outcome distribution)."""
    zero_prob, state = _prepare_exact(oracle, p)
    return zero_prob, distribution(_legendre_stage(state, p))


def sjsp_attempt_analysis(moduli: FactoredOddSquarefree, oracle: ShiftOracle):
    """Same, with the distribution over the factored register layout."""
    zero_prob, state = _prepare_exact(oracle, moduli.n)
    final, layout = _sjsp_stage(state, moduli)
    return zero_prob, distribution(final), layout


def sqcp_attempt_analysis(fld: ff.FieldSpec, oracle: ShiftOracle):
    """(zero-branch probability, conditional final outcome distribution)."""
    zero_prob, state = _prepare_exact(oracle, fld.q + 1)
    return zero_prob, distribution(_sqcp_stage(state, fld))


# ---------------------------------------------------------------------------
# verifiers


def tft_matrix_deviation(fld: ff.FieldSpec) -> tuple[float, float]:
    """Compare the composed trace transform against its literal kernel.

    Returns (max entrywise deviation from q^(-1/2)[w_p^Tr(xy)], max deviation
    of U*U from the identity).  Columns are built by transforming every basis
    state, so this exercises the permutation + factor-transform composition.
    """
    q = fld.q
    composed = np.empty((q, q), dtype=np.complex128)
    for x in range(q):
        composed[:, x] = trace_fourier_transform(basis_state(q, x), fld).amps
    omega = np.exp(2j * np.pi / fld.p)
    kernel = np.empty((q, q), dtype=np.complex128)
    for x in range(q):
        ex = ff.element_from_index(fld, x)
        for y in range(q):
            ey = ff.element_from_index(fld, y)
            kernel[y, x] = omega ** ff.trace(fld, ff.ff_arith(fld, ex, ey, "mul"))
    kernel /= math.sqrt(q)
    matrix_dev = float(np.max(np.abs(composed - kernel)))
    unitary_dev = float(np.max(np.abs(composed.conj().T @ composed - np.eye(q))))
    return matrix_dev, unitary_dev


def verify_jacobi_qft_lemma(moduli: FactoredOddSquarefree, shift: int) -> float:
    """Max amplitude deviation between the transformed character state and
    its closed form i^((n-1)^2/4) * sum w_n^(-sy) (y/n) |y> / sqrt(phi(n))."""
    n = moduli.n
    phi = euler_phi(moduli)
    vals = np.array([jacobi(x + shift, n) for x in range(n)], dtype=np.float64)
    after = qft(StateVector(vals / math.sqrt(phi)))
    unit = 1j ** (((n - 1) ** 2 // 4) % 4)
    ys = np.arange(n, dtype=np.int64)
    symbols = np.array([jacobi(y, n) for y in range(n)], dtype=np.float64)
    rhs = unit * np.exp(-2j * np.pi / n * ((shift * ys) % n)) * symbols / math.sqrt(phi)
    return float(np.max(np.abs(after.amps - rhs)))


def repeated_sampling_comparison(
    moduli: FactoredOddSquarefree, shift: int, big_m: int
) -> DistributionComparison:
    """Exact L1 distance between fraction-valued sampling distributions.

    The short register's outcomes reduce to y/n in lowest terms; the
    repeated register's outcomes map through the bounded-denominator
    convergent rule.  Both distributions are computed from noiseless
    statevectors, with n/sqrt(M) reported as the reference scale.
    """
    n = moduli.n
    if big_m > 1 << 16:
        raise DomainTooLarge(f"M = {big_m} exceeds the exact-computation cap 2^16")
    if n * n >= big_m:
        raise ModulusTooLargeForM(f"need n^2 < M but {n}^2 >= {big_m}")
    phi = euler_phi(moduli)

    vals = np.array([jacobi(x + shift, n) for x in range(n)], dtype=np.float64)
    rf: dict = {}
    for y, prob in enumerate(distribution(qft(StateVector(vals / math.sqrt(phi))))):
        frac = Fraction(y, n)
        rf[frac] = rf.get(frac, 0.0) + float(prob)

    reps = np.array([jacobi(x + shift, n) for x in range(big_m)], dtype=np.float64)
    max_den = math.isqrt(big_m)
    cf: dict = {}
    for i, prob in enumerate(distribution(qft(normalized(reps)))):
        frac = best_convergent_fraction(i, big_m, max_den)
        cf[frac] = cf.get(frac, 0.0) + float(prob)

    l1 = sum(abs(rf.get(k, 0.0) - cf.get(k, 0.0)) for k in set(rf) | set(cf))
    return DistributionComparison(
        n=n,
        big_m=big_m,
        shift=shift,
        rf_distribution=rf,
        cf_distribution=cf,
        l1_distance=float(l1),
        bound=n / math.sqrt(big_m),
    )
