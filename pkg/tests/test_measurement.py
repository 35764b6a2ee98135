import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmamp.groups import make_group
from qmamp.hilbert import StateVector, leg_space
from qmamp.measurement import (
    MeasurementError,
    clock_rep,
    couple,
    instrument,
    joint_probability,
    make_spectral_rep,
    outcome,
    outcome_probability,
    sigma_z_rep,
    verify_instrument_equals_coupled_expectation,
)

SZ = np.diag([1.0, -1.0]).astype(complex)


def spin_state(a, b):
    v = np.array([a, b], dtype=complex)
    return StateVector(leg_space(("sys", 2)), v / np.linalg.norm(v))


def char_of(rep, projection):
    return next(
        chi for chi, p in rep.projections.items() if np.allclose(p, projection)
    )


def test_make_spectral_rep_validation():
    g = make_group([2])
    chars = g.characters()
    with pytest.raises(MeasurementError):  # not idempotent
        make_spectral_rep(g, 2, [(chars[0], 2 * np.eye(2))])
    with pytest.raises(MeasurementError):  # incomplete
        make_spectral_rep(g, 2, [(chars[0], np.diag([1.0, 0.0]))])
    with pytest.raises(MeasurementError):  # overlapping supports
        make_spectral_rep(
            g, 2, [(chars[0], np.eye(2)), (chars[1], np.diag([1.0, 0.0]))]
        )
    with pytest.raises(MeasurementError):  # not hermitian
        make_spectral_rep(g, 2, [(chars[0], np.array([[1, 1], [0, 0]], dtype=float))])


def test_sigma_z_rep_unitary_family():
    rep = sigma_z_rep()
    nontrivial = next(u for u in rep.group.elements() if u != rep.group.identity)
    assert np.allclose(rep.unitary(nontrivial), SZ)
    assert np.allclose(rep.unitary(rep.group.identity), np.eye(2))


def test_clock_rep_spectrum():
    rep = clock_rep(3)
    u1 = rep.unitary((1,))
    omega = np.exp(2j * np.pi / 3)
    ev = np.linalg.eigvals(u1)
    expected = np.array([1, omega, omega**2])
    key = lambda a: np.sort(np.round(np.angle(a), 9) % (2 * np.pi))
    assert np.allclose(key(ev), key(expected))
    assert np.allclose(np.linalg.matrix_power(u1, 3), np.eye(3), atol=1e-12)


def test_instrument_up_state():
    rep = sigma_z_rep()
    chi_up = char_of(rep, np.diag([1.0, 0.0]))
    res = instrument(rep, outcome([chi_up]), spin_state(1, 0), SZ)
    assert res.probability == pytest.approx(1.0)
    assert res.conditional_expectation == pytest.approx(1.0)
    assert np.allclose(res.post_state, np.diag([1.0, 0.0]))


def test_instrument_superposition_probabilities():
    rep = sigma_z_rep()
    chi_up = char_of(rep, np.diag([1.0, 0.0]))
    chi_dn = char_of(rep, np.diag([0.0, 1.0]))
    xi = spin_state(np.sqrt(0.3), np.sqrt(0.7))
    assert outcome_probability(rep, outcome([chi_up]), xi) == pytest.approx(0.3)
    assert outcome_probability(rep, outcome([chi_dn]), xi) == pytest.approx(0.7)
    assert outcome_probability(rep, outcome([chi_up, chi_dn]), xi) == pytest.approx(1.0)
    # conditioning on a singleton collapses onto that eigenvector; the
    # expectation is unnormalized, so it carries the outcome probability
    res = instrument(rep, outcome([chi_dn]), xi, SZ)
    assert res.conditional_expectation == pytest.approx(-0.7)
    assert res.conditional_expectation / res.probability == pytest.approx(-1.0)
    assert np.allclose(res.post_state, np.diag([0.0, 1.0]), atol=1e-12)


def test_instrument_zero_probability_outcome():
    rep = sigma_z_rep()
    chi_dn = char_of(rep, np.diag([0.0, 1.0]))
    res = instrument(rep, outcome([chi_dn]), spin_state(1, 0), SZ)
    assert res.probability == pytest.approx(0.0)
    assert res.post_state is None


def test_instrument_full_outcome_is_nonselective():
    # summing over all outcomes reproduces the unconditional expectation
    rep = clock_rep(3)
    rng = np.random.default_rng(2)
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    xi = StateVector(leg_space(("sys", 3)), v / np.linalg.norm(v))
    b = rng.standard_normal((3, 3))
    b = b + b.T
    full = instrument(rep, outcome(rep.group.characters()), xi, b)
    assert full.probability == pytest.approx(1.0)
    dephased = sum(
        p @ np.outer(xi.amplitudes, xi.amplitudes.conj()) @ p
        for p in rep.projections.values()
    )
    assert full.conditional_expectation == pytest.approx(np.trace(b @ dephased).real)


def test_instrument_rejects_unnormalized_state():
    rep = sigma_z_rep()
    chi = next(iter(rep.projections))
    bad = StateVector(leg_space(("sys", 2)), np.array([1.0, 1.0]))
    with pytest.raises(MeasurementError):
        instrument(rep, outcome([chi]), bad, SZ)


def test_couple_copies_eigenstate_labels():
    rep = sigma_z_rep()
    chi_up = char_of(rep, np.diag([1.0, 0.0]))
    coupled = couple(rep, spin_state(1, 0))
    # probe pointer lands on the character carried by the system eigenstate
    assert joint_probability(rep, coupled, chi_up, chi_up) == pytest.approx(1.0)


def test_couple_perfect_correlation_superposition():
    rep = sigma_z_rep()
    chi_up = char_of(rep, np.diag([1.0, 0.0]))
    chi_dn = char_of(rep, np.diag([0.0, 1.0]))
    xi = spin_state(np.sqrt(0.3), np.sqrt(0.7))
    coupled = couple(rep, xi)
    assert joint_probability(rep, coupled, chi_up, chi_up) == pytest.approx(0.3)
    assert joint_probability(rep, coupled, chi_dn, chi_dn) == pytest.approx(0.7)
    assert joint_probability(rep, coupled, chi_up, chi_dn) == pytest.approx(0.0)
    assert joint_probability(rep, coupled, chi_dn, chi_up) == pytest.approx(0.0)


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 4]))
def test_projective_equals_coupled_picture(seed, n):
    rng = np.random.default_rng(seed)
    rep = clock_rep(n) if n > 2 else sigma_z_rep()
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    xi = StateVector(leg_space(("sys", n)), v / np.linalg.norm(v))
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    b = b + b.conj().T
    chars = rep.group.characters()
    for delta in (outcome([chars[0]]), outcome(chars[:2]), outcome(chars)):
        res = verify_instrument_equals_coupled_expectation(rep, delta, xi, b)
        assert res <= 1e-10
