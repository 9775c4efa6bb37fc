import math

import numpy as np
import pytest

from charshift.errors import (
    DomainViolation,
    EvenCharacteristic,
    ModulusTooLargeForM,
    NotOddPrime,
    NotSquareFree,
    ShiftOutOfRange,
)
from charshift.finite_field import make_field
from charshift.number_theory import jacobi, legendre
from charshift.oracles import (
    discard_result_register,
    field_oracle,
    jacobi_oracle,
    jacobi_unknown_oracle,
    legendre_oracle,
    result_is_zero,
    result_sign_phase,
)
from charshift.qsim import basis_state, distribution, normalized, project, qft


def test_legendre_oracle_examples():
    oracle = legendre_oracle(7, shift=3)
    assert oracle.query(0) == -1  # (3/7)
    assert oracle.query(4) == 0  # 7 divides 4 + 3
    assert sum(1 for x in range(7) if oracle.query(x) == 0) == 1


def test_jacobi_oracle_zero_shift():
    oracle = jacobi_oracle(15, shift=0)
    for x in range(15):
        assert oracle.query(x) == jacobi(x, 15)


def test_construction_errors():
    with pytest.raises(NotOddPrime):
        legendre_oracle(9, shift=0)
    with pytest.raises(ShiftOutOfRange):
        legendre_oracle(7, shift=7)
    with pytest.raises(NotSquareFree):
        jacobi_oracle(45, shift=0)
    with pytest.raises(ModulusTooLargeForM):
        jacobi_unknown_oracle(15, 224, shift=0)  # 15^2 = 225 > 224
    jacobi_unknown_oracle(15, 226, shift=0)
    with pytest.raises(EvenCharacteristic):
        field_oracle(make_field(2, 2), shift=(0, 0))
    with pytest.raises(ValueError):
        legendre_oracle(7)  # no shift and no rng


def test_random_shift_draw_is_seeded():
    a = legendre_oracle(13, rng=np.random.default_rng(5))
    b = legendre_oracle(13, rng=np.random.default_rng(5))
    assert a.peek_shift() == b.peek_shift()


def test_unknown_modulus_periodicity():
    oracle = jacobi_unknown_oracle(15, 2000, shift=2)
    for x in range(2000 - 15):
        assert oracle.query(x) == oracle.query(x + 15)
    assert oracle.query(2) == 1 and oracle.query(17) == 1


def test_unknown_modulus_periodicity_large():
    oracle = jacobi_unknown_oracle(105, 2 * 10**4, shift=11)
    for x in range(0, 2 * 10**4 - 105, 7):
        assert oracle.query(x) == oracle.query(x + 105)


def test_zero_sets():
    oracle = legendre_oracle(11, shift=4)
    zeros = [x for x in range(11) if oracle.query(x) == 0]
    assert zeros == [(-4) % 11]
    oracle = jacobi_oracle(15, shift=2)
    zeros = {x for x in range(15) if oracle.query(x) == 0}
    assert zeros == {x for x in range(15) if math.gcd(x + 2, 15) > 1}
    gf9 = make_field(3, 2)
    oracle = field_oracle(gf9, shift=(2, 1))
    zeros = [x for x in range(9) if oracle.query(x) == 0]
    assert len(zeros) == 1


def test_field_oracle_accepts_elements_and_indices():
    gf9 = make_field(3, 2)
    oracle = field_oracle(gf9, shift=(0, 0))
    assert oracle.query(1) == 1  # chi(1)
    assert oracle.query((1, 0)) == 1
    with pytest.raises(DomainViolation):
        oracle.query(9)


def test_query_counters():
    oracle = legendre_oracle(7, shift=0)
    assert oracle.query_count == 0
    oracle.query(1)
    oracle.query(2)
    assert oracle.query_count == 2
    state = qft(basis_state(7, 0))
    oracle.phase_query(state)
    assert oracle.phase_query_count == 1
    oracle.value_query_superposed(state)
    assert oracle.phase_query_count == 2
    assert oracle.query_count == 2  # coherent calls don't touch the classical counter


def test_secrecy_of_public_surface():
    oracle = jacobi_unknown_oracle(15, 400, shift=7)
    public = {k: v for k, v in vars(oracle).items() if not k.startswith("_")}
    assert set(public) == {"variant", "domain_size"}
    assert public["domain_size"] == 400
    assert oracle.peek_modulus() == 15 and oracle.peek_shift() == 7


def test_phase_query_sign_table():
    oracle = legendre_oracle(7, shift=0)
    out = oracle.phase_query(qft(basis_state(7, 0)))
    want = np.array([1, 1, 1, -1, 1, -1, -1]) / math.sqrt(7)  # squares mod 7: {1,2,4}
    assert np.max(np.abs(out.amps - want)) < 1e-12


def test_phase_query_on_basis_state():
    oracle = legendre_oracle(7, shift=3)
    for x in range(7):
        out = oracle.phase_query(basis_state(7, x))
        expected = legendre(x + 3, 7) or 1  # zero kept with phase +1
        assert out.amps[x] == pytest.approx(expected)


def test_phase_query_zero_policies():
    oracle = legendre_oracle(7, shift=0)
    support_off_zero = normalized([0, 1, 1, 1, 0, 0, 0])
    a = oracle.phase_query(support_off_zero, zero_policy="as-plus-one")
    b = oracle.phase_query(support_off_zero, zero_policy="reject")
    assert np.allclose(a.amps, b.amps)
    with pytest.raises(DomainViolation):
        oracle.phase_query(qft(basis_state(7, 0)), zero_policy="reject")
    with pytest.raises(ValueError):
        oracle.phase_query(basis_state(7, 1), zero_policy="maybe")


def test_phase_query_leaves_dummy_slots():
    gf9 = make_field(3, 2)
    oracle = field_oracle(gf9, shift=(0, 0))
    padded = qft(basis_state(10, 0))
    out = oracle.phase_query(padded)
    assert out.amps[9] == padded.amps[9]


def test_value_query_nonzero_mass():
    oracle = jacobi_oracle(15, shift=0)
    tagged = oracle.value_query_superposed(qft(basis_state(15, 0)))
    prob, _ = project(tagged, lambda idx: not result_is_zero(idx))
    assert prob == pytest.approx(8 / 15)  # phi(15)/15


def test_value_query_on_basis_state():
    oracle = legendre_oracle(7, shift=3)
    for x in range(7):
        tagged = oracle.value_query_superposed(basis_state(7, x))
        digit = legendre(x + 3, 7) % 3
        assert tagged.amps[x * 3 + digit] == 1


def test_value_query_involution_uncomputes():
    oracle = jacobi_oracle(15, shift=4)
    state = qft(basis_state(15, 0))
    tagged = oracle.value_query_superposed(state)
    untagged = oracle.value_query_superposed(tagged, entangled=True)
    recovered = discard_result_register(untagged)
    assert np.max(np.abs(recovered.amps - state.amps)) < 1e-12


def test_discard_requires_cleared_register():
    oracle = legendre_oracle(7, shift=3)
    tagged = oracle.value_query_superposed(qft(basis_state(7, 0)))
    with pytest.raises(DomainViolation):
        discard_result_register(tagged)


def test_result_sign_phase():
    oracle = legendre_oracle(7, shift=0)
    tagged = oracle.value_query_superposed(qft(basis_state(7, 0)))
    signed = result_sign_phase(tagged)
    for x in range(7):
        digit = legendre(x, 7) % 3
        sign = -1 if digit == 2 else 1
        assert signed.amps[x * 3 + digit] == pytest.approx(sign / math.sqrt(7))


def test_value_query_dummy_slot_reads_plus_one():
    gf9 = make_field(3, 2)
    oracle = field_oracle(gf9, shift=(1, 0))
    tagged = oracle.value_query_superposed(qft(basis_state(10, 0)))
    # the padding slot behaves like a +1 value: digit 1
    assert abs(tagged.amps[9 * 3 + 1]) == pytest.approx(1 / math.sqrt(10))
    prob, _ = project(tagged, result_is_zero)
    assert prob == pytest.approx(1 / 10)


def test_query_domain_checks():
    oracle = legendre_oracle(7, shift=0)
    with pytest.raises(DomainViolation):
        oracle.query(7)
    with pytest.raises(DomainViolation):
        oracle.query(-1)
    oracle = jacobi_unknown_oracle(15, 400, shift=0)
    assert oracle.query(399) in (-1, 0, 1)
    with pytest.raises(DomainViolation):
        oracle.query(400)


def test_value_query_distribution_sums():
    oracle = jacobi_oracle(33, shift=5)
    tagged = oracle.value_query_superposed(qft(basis_state(33, 0)))
    assert abs(distribution(tagged).sum() - 1) < 1e-9
