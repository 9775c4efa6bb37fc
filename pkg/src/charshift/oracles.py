"""Query-counting black boxes for the four shifted-character problem variants.

An oracle hides its shift (and, for the unknown-modulus variant, the modulus
itself) behind a counting surface: query() evaluates one point classically,
phase_query() multiplies a whole superposition by the hidden function, and
value_query_superposed() entangles a three-valued result register the way a
reversible circuit would, so that applying it twice uncomputes the register.

Result register encoding: a function value v in {-1, 0, +1} is stored as the
digit v mod 3 at the fast end of the index, i.e. composite index = x*3 + digit.
The coherent update is digit <- (v - digit) mod 3, an involution that computes
from a cleared register and clears a computed one.
"""

import threading

import numpy as np

from . import finite_field as ff
from .errors import (
    DomainViolation,
    EvenCharacteristic,
    ModulusTooLargeForM,
    NotOddPrime,
    ShiftOutOfRange,
)
from .number_theory import factor_trial, is_prime, jacobi, legendre
from .qsim import StateVector

RESULT_DIM = 3

VARIANT_LEGENDRE = "legendre"
VARIANT_JACOBI = "jacobi"
VARIANT_JACOBI_UNKNOWN = "jacobi-unknown"
VARIANT_FIELD = "field"


def result_digit(index: int) -> int:
    """The result-register digit of a composite index."""
    return index % RESULT_DIM


def result_is_zero(index: int) -> bool:
    """Predicate for measuring whether the computed function value was 0."""
    return index % RESULT_DIM == 0


class ShiftOracle:
    """A hidden-shift function with classical and coherent query counters."""

    def __init__(self, variant, domain_size, point_fn, shift, modulus=None, field=None):
        self.variant = variant
        self.domain_size = domain_size
        self._point_fn = point_fn
        self._shift = shift
        self._modulus = modulus
        self._field = field
        self._table = None
        self._lock = threading.Lock()
        self._query_count = 0
        self._phase_query_count = 0

    # -- counters ----------------------------------------------------------

    @property
    def query_count(self) -> int:
        return self._query_count

    @property
    def phase_query_count(self) -> int:
        return self._phase_query_count

    @property
    def field_spec(self):
        """The field model for the field variant; public problem data."""
        return self._field

    def _bump(self, counter: str):
        with self._lock:
            setattr(self, counter, getattr(self, counter) + 1)

    # -- privileged accessors, for tests and verification reports only ------

    def peek_shift(self):
        """Test-only: the hidden shift."""
        return self._shift

    def peek_modulus(self):
        """Test-only: the hidden modulus of the unknown-modulus variant."""
        return self._modulus

    # -- classical surface ---------------------------------------------------

    def query(self, x) -> int:
        """Evaluate the hidden function at one point; counts one classical query."""
        if self.variant == VARIANT_FIELD and isinstance(x, tuple):
            x = ff.element_to_index(self._field, ff.make_element(self._field, x))
        if not isinstance(x, (int, np.integer)) or not 0 <= x < self.domain_size:
            raise DomainViolation(f"{x!r} outside domain of size {self.domain_size}")
        self._bump("_query_count")
        return self._point_fn(int(x))

    # -- coherent surface ----------------------------------------------------

    def _values(self, base_dim: int) -> np.ndarray:
        # Hidden function tabulated over a register of base_dim slots; slots at
        # or beyond the domain are dummy positions and evaluate to +1.
        if self._table is None:
            self._table = np.fromiter(
                (self._point_fn(x) for x in range(self.domain_size)),
                dtype=np.int8,
                count=self.domain_size,
            )
        out = np.ones(base_dim, dtype=np.int8)
        upto = min(base_dim, self.domain_size)
        out[:upto] = self._table[:upto]
        return out

    def phase_query(self, state: StateVector, zero_policy: str = "as-plus-one") -> StateVector:
        """Multiply amplitudes by the hidden function values.

        zero_policy "as-plus-one" leaves zero-valued positions untouched;
        "reject" refuses states with support where the function vanishes.
        Dummy slots beyond the domain always pass through unchanged.
        """
        if zero_policy not in ("as-plus-one", "reject"):
            raise ValueError(f"unknown zero policy {zero_policy!r}")
        values = self._values(state.dim).astype(np.float64)
        if zero_policy == "reject":
            occupied = np.abs(state.amps) > 1e-12
            if np.any(occupied & (values == 0)):
                raise DomainViolation("state has support where the function is zero")
        signs = np.where(values == 0, 1.0, values)
        self._bump("_phase_query_count")
        return StateVector(state.amps * signs)

    def value_query_superposed(self, state: StateVector, entangled: bool = False) -> StateVector:
        """Coherently evaluate into the result register (one coherent query).

        With entangled=False the input ranges over plain domain indices and a
        fresh cleared register is attached, tripling the dimension.  With
        entangled=True the input already carries the register and the update
        digit <- (value - digit) mod 3 is applied, so a second call uncomputes
        the first.
        """
        if entangled:
            if state.dim % RESULT_DIM:
                raise DomainViolation("entangled state dimension must be a multiple of 3")
            base = state.dim // RESULT_DIM
            digits = self._values(base) % RESULT_DIM
            out = np.empty_like(state.amps)
            idx = np.arange(state.dim)
            xs, vs = idx // RESULT_DIM, idx % RESULT_DIM
            out[xs * RESULT_DIM + (digits[xs] - vs) % RESULT_DIM] = state.amps
        else:
            base = state.dim
            digits = self._values(base) % RESULT_DIM
            out = np.zeros(base * RESULT_DIM, dtype=np.complex128)
            out[np.arange(base) * RESULT_DIM + digits] = state.amps
        self._bump("_phase_query_count")
        return StateVector(out)


def result_sign_phase(state: StateVector) -> StateVector:
    """Flip the sign of branches whose result register holds -1.

    Register-local and oracle-free: the phase is read off the already
    computed digit, with the zero digit treated as +1.
    """
    if state.dim % RESULT_DIM:
        raise DomainViolation("state dimension must be a multiple of 3")
    signs = np.ones(state.dim)
    signs[2::RESULT_DIM] = -1.0
    return StateVector(state.amps * signs)


def discard_result_register(state: StateVector) -> StateVector:
    """Drop a result register that has been uncomputed back to the zero digit."""
    if state.dim % RESULT_DIM:
        raise DomainViolation("state dimension must be a multiple of 3")
    col0 = np.array(state.amps[0::RESULT_DIM])
    mass = float(np.sum(np.abs(col0) ** 2))
    if abs(mass - 1.0) > 1e-9:
        raise DomainViolation(f"result register still carries mass {1 - mass!r}")
    return StateVector(col0 / np.sqrt(mass))


def _draw_or_check(value, size, rng, label):
    if value is None:
        if rng is None:
            raise ValueError(f"either an explicit {label} or an rng is required")
        return int(rng.integers(size))
    if not 0 <= value < size:
        raise ShiftOutOfRange(f"{label} {value} outside [0, {size})")
    return int(value)


def legendre_oracle(p: int, shift=None, rng=None) -> ShiftOracle:
    """f(x) = legendre(x + s, p) on Z_p with hidden s."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise NotOddPrime(f"{p} is not an odd prime")
    s = _draw_or_check(shift, p, rng, "shift")
    return ShiftOracle(VARIANT_LEGENDRE, p, lambda x: legendre(x + s, p), s)


def jacobi_oracle(n: int, shift=None, rng=None) -> ShiftOracle:
    """f(x) = jacobi(x + s, n) on Z_n for odd square-free n with hidden s."""
    factor_trial(n)  # rejects even and non-square-free moduli
    s = _draw_or_check(shift, n, rng, "shift")
    return ShiftOracle(VARIANT_JACOBI, n, lambda x: jacobi(x + s, n), s, modulus=n)


def jacobi_unknown_oracle(n: int, big_m: int, shift=None, rng=None) -> ShiftOracle:
    """f(x) = jacobi(x + s, n) repeated over Z_M, hiding both s and n.

    The wrap at the domain edge follows the period: f(x) depends only on
    x + s modulo n, for every x in Z_M.
    """
    factor_trial(n)
    if n * n >= big_m:
        raise ModulusTooLargeForM(f"need n^2 < M but {n}^2 >= {big_m}")
    s = _draw_or_check(shift, n, rng, "shift")
    return ShiftOracle(
        VARIANT_JACOBI_UNKNOWN, big_m, lambda x: jacobi(x + s, n), s, modulus=n
    )


def field_oracle(fld: ff.FieldSpec, shift=None, rng=None) -> ShiftOracle:
    """f(x) = chi(x + s) on F_q with hidden s, for odd characteristic."""
    if fld.p == 2:
        raise EvenCharacteristic("character oracles need odd characteristic")
    if shift is None:
        if rng is None:
            raise ValueError("either an explicit shift or an rng is required")
        s = ff.element_from_index(fld, int(rng.integers(fld.q)))
    else:
        s = ff.make_element(fld, shift)

    def point(x: int) -> int:
        elem = ff.element_from_index(fld, x)
        return ff.quadratic_character(fld, ff.ff_arith(fld, elem, s, "add"))

    return ShiftOracle(VARIANT_FIELD, fld.q, point, s, field=fld)
