import math

import numpy as np
import pytest

from charshift.errors import DimensionMismatch, NonUnitPhase, NotBijective
from charshift.finite_field import make_field
from charshift.qsim import (
    RegisterLayout,
    StateVector,
    _qft_bluestein,
    _qft_direct,
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


def random_state(dim, seed=0):
    rng = np.random.default_rng(seed)
    return normalized(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def test_basis_state():
    s = basis_state(5, 0)
    assert s.dim == 5 and s.amps[0] == 1
    assert basis_state(7, 3).amps[3] == 1
    assert basis_state(1, 0).amps[0] == 1  # degenerate single-slot register
    with pytest.raises(ValueError):
        basis_state(5, 5)


def test_state_norm_enforced():
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        normalized(np.zeros(4))
    assert abs(distribution(random_state(50)).sum() - 1) < 1e-9


def test_qft_uniform_from_origin():
    for dim in (2, 5, 15, 16):
        out = qft(basis_state(dim, 0))
        assert np.allclose(out.amps, np.full(dim, 1 / math.sqrt(dim)), atol=1e-12)


def test_qft_dim2_by_hand():
    out = qft(basis_state(2, 1))
    assert np.allclose(out.amps, [1 / math.sqrt(2), -1 / math.sqrt(2)], atol=1e-12)


@pytest.mark.parametrize("dim", [1, 2, 3, 7, 12, 100, 101])
def test_qft_inverse_roundtrip(dim):
    state = random_state(dim, seed=dim)
    back = qft(qft(state), inverse=True)
    assert np.max(np.abs(back.amps - state.amps)) < 1e-9


def test_qft_unitary_exhaustive_small():
    for dim in range(1, 65):
        cols = np.stack([qft(basis_state(dim, x)).amps for x in range(dim)], axis=1)
        assert np.max(np.abs(cols.conj().T @ cols - np.eye(dim))) < 1e-9


@pytest.mark.parametrize("dim", [4095, 4096, 4097])
def test_qft_paths_agree_at_crossover(dim):
    amps = random_state(dim, seed=dim).amps
    for sign in (1, -1):
        a = _qft_direct(amps, sign)
        b = _qft_bluestein(amps, sign)
        assert np.max(np.abs(a - b)) < 1e-9


def test_apply_phase():
    state = random_state(9, seed=3)
    assert np.allclose(apply_phase(state, lambda x: 1.0).amps, state.amps)
    flipped = apply_phase(state, lambda x: -1.0)
    assert equal_up_to_global_phase(flipped, state, tol=1e-12)
    # a linear phase on the uniform state is a shifted-transform state
    uniform = qft(basis_state(5, 0))
    shifted = apply_phase(uniform, lambda x: np.exp(2j * np.pi * x / 5))
    assert np.max(np.abs(shifted.amps - qft(basis_state(5, 1)).amps)) < 1e-12
    with pytest.raises(NonUnitPhase):
        apply_phase(state, lambda x: 0.5)


def test_apply_phase_ignores_unoccupied_slots():
    state = basis_state(4, 2)
    out = apply_phase(state, lambda x: 1.0 if x == 2 else 0.0)
    assert np.allclose(out.amps, state.amps)


def test_permute_basis():
    state = random_state(15, seed=1)
    assert np.allclose(permute_basis(state, lambda x: x).amps, state.amps)
    # relabeling by residues: index 7 -> (1, 2) -> 1*5 + 2 = 7 under (3, 5)
    layout = RegisterLayout((3, 5))
    crt = lambda x: layout.index((x % 3, x % 5))
    assert crt(7) == 7
    moved = permute_basis(basis_state(15, 7), crt)
    assert moved.amps[7] == 1
    # swapping two equal registers is an involution
    sw_layout = RegisterLayout((4, 4))
    swap = lambda x: sw_layout.index(tuple(reversed(sw_layout.coords(x))))
    state16 = random_state(16, seed=5)
    twice = permute_basis(permute_basis(state16, swap), swap)
    assert np.allclose(twice.amps, state16.amps)
    # amplitude magnitudes survive any relabeling
    perm = permute_basis(state, lambda x: (x * 7 + 3) % 15)
    assert sorted(np.abs(perm.amps)) == pytest.approx(sorted(np.abs(state.amps)))
    with pytest.raises(NotBijective):
        permute_basis(state, lambda x: 0)
    with pytest.raises(NotBijective):
        permute_basis(state, lambda x: x + 1)


def test_distribution():
    assert np.allclose(distribution(basis_state(4, 1)), [0, 1, 0, 0])
    assert np.allclose(distribution(qft(basis_state(8, 0))), np.full(8, 1 / 8))


def test_measure_collapses():
    rng = np.random.default_rng(0)
    idx, collapsed = measure(basis_state(6, 4), rng)
    assert idx == 4 and collapsed.amps[4] == 1


def test_measure_never_hits_empty_slots():
    rng = np.random.default_rng(1)
    state = normalized([1, 0, 1, 0])
    for _ in range(200):
        idx, _ = measure(state, rng)
        assert idx in (0, 2)


def test_measure_frequencies_uniform():
    rng = np.random.default_rng(7)
    state = qft(basis_state(4, 0))
    counts = np.zeros(4)
    draws = 10_000
    for _ in range(draws):
        idx, _ = measure(state, rng)
        counts[idx] += 1
    sigma = math.sqrt(draws * 0.25 * 0.75)
    assert np.all(np.abs(counts - draws * 0.25) < 3 * sigma)


def test_project_and_measure_predicate():
    state = random_state(10, seed=9)
    prob, kept = project(state, lambda x: True)
    assert prob == pytest.approx(1.0) and np.allclose(kept.amps, state.amps)
    rng = np.random.default_rng(3)
    outcome, collapsed = measure_predicate(basis_state(5, 2), lambda x: x == 2, rng)
    assert outcome is True and collapsed.amps[2] == 1
    outcome, collapsed = measure_predicate(basis_state(5, 1), lambda x: x == 2, rng)
    assert outcome is False and collapsed.amps[1] == 1
    prob, _ = project(qft(basis_state(8, 0)), lambda x: x % 2 == 0)
    assert prob == pytest.approx(0.5)


def test_register_layout():
    layout = RegisterLayout((3, 5, 7))
    assert layout.total == 105
    for idx in range(105):
        assert layout.index(layout.coords(idx)) == idx
    assert layout.index((1, 2, 3)) == 1 * 35 + 2 * 7 + 3
    with pytest.raises(ValueError):
        layout.index((3, 0, 0))
    with pytest.raises(ValueError):
        RegisterLayout(())


def test_qft_factor_matches_plain_qft():
    state = random_state(7, seed=2)
    via_factor = qft_factor(state, RegisterLayout((7,)), 0)
    assert np.max(np.abs(via_factor.amps - qft(state).amps)) < 1e-12
    # factor transforms on distinct axes commute
    layout = RegisterLayout((3, 5))
    state15 = random_state(15, seed=4)
    ab = qft_factor(qft_factor(state15, layout, 0), layout, 1)
    ba = qft_factor(qft_factor(state15, layout, 1), layout, 0)
    assert np.max(np.abs(ab.amps - ba.amps)) < 1e-12
    back = qft_factor(ab, layout, 0, inverse=True)
    back = qft_factor(back, layout, 1, inverse=True)
    assert np.max(np.abs(back.amps - state15.amps)) < 1e-9
    with pytest.raises(DimensionMismatch):
        qft_factor(state15, RegisterLayout((3, 4)), 0)


def test_tft_uniform_from_origin():
    gf9 = make_field(3, 2)
    out = trace_fourier_transform(basis_state(9, 0), gf9)
    assert np.allclose(out.amps, np.full(9, 1 / 3), atol=1e-12)


def test_tft_roundtrip_and_dummy_slots():
    gf9 = make_field(3, 2)
    state = random_state(9, seed=11)
    back = trace_fourier_transform(trace_fourier_transform(state, gf9), gf9, inverse=True)
    assert np.max(np.abs(back.amps - state.amps)) < 1e-9
    # a 10th slot rides along untouched
    padded = random_state(10, seed=12)
    out = trace_fourier_transform(padded, gf9)
    assert out.amps[9] == padded.amps[9]
    back = trace_fourier_transform(out, gf9, inverse=True)
    assert np.max(np.abs(back.amps - padded.amps)) < 1e-9
    with pytest.raises(DimensionMismatch):
        trace_fourier_transform(basis_state(8, 0), gf9)


@pytest.mark.parametrize("p,r", [(3, 2), (5, 2), (3, 3), (7, 2)])
def test_tft_matches_literal_kernel(p, r):
    from charshift.algorithms import tft_matrix_deviation

    matrix_dev, unitary_dev = tft_matrix_deviation(make_field(p, r))
    assert matrix_dev < 1e-9
    assert unitary_dev < 1e-9


def test_equal_up_to_global_phase():
    state = random_state(6, seed=8)
    assert equal_up_to_global_phase(state, state)
    assert equal_up_to_global_phase(state, StateVector(1j * state.amps))
    assert not equal_up_to_global_phase(basis_state(2, 0), basis_state(2, 1))


def test_norm_preserved_through_pipeline():
    state = random_state(21, seed=13)
    state = qft(state)
    state = apply_phase(state, lambda x: -1.0 if x % 2 else 1.0)
    state = permute_basis(state, lambda x: (x * 8) % 21)
    state = qft(state, inverse=True)
    assert abs(distribution(state).sum() - 1) < 1e-9


def test_format_state_dump():
    amps = np.zeros(6, dtype=complex)
    amps[1] = 1 / math.sqrt(2)
    amps[4] = -1j / math.sqrt(2)
    amps[5] = 1e-14  # below threshold, omitted
    text = format_state_dump(normalized(amps))
    lines = text.splitlines()
    assert len(lines) == 2
    idx, re_part, im_part = lines[0].split("\t")
    assert idx == "1" and float(re_part) == pytest.approx(1 / math.sqrt(2))
    assert lines[1].startswith("4\t")
