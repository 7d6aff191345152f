import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from app.dilation import (
    JTAU_MAX,
    DilationParams,
    control_sector_terms,
    equal_up_to_phase,
    extract_kraus,
    gauge_fixed,
    hamiltonian_sd,
    jtau_for_strength,
    total_hamiltonian,
    total_unitary,
    unitary_sd,
)
from app.errors import LabelError, NotUnitaryError, ParameterError
from app.measurement import X_AXIS, Z_AXIS, Branch, kraus_pair
from app.qcore import LABEL_ORDER, PAULI_Y, Op, herm_eig, max_abs_diff
from tests.strategies import axes, strengths

jtaus = st.floats(min_value=0.0, max_value=float(JTAU_MAX), allow_nan=False)
taus = st.floats(min_value=0.25, max_value=4.0, allow_nan=False)


def test_interaction_time_must_be_positive():
    with pytest.raises(ParameterError):
        DilationParams(J=0.1, tau=0.0, axis=X_AXIS)


def test_jtau_outside_quarter_pi():
    with pytest.raises(ParameterError):
        DilationParams(J=1.0, tau=1.0, axis=X_AXIS)


@given(g=strengths)
@settings(max_examples=50, deadline=None)
def test_strength_round_trip(g):
    params = DilationParams.from_strength(g, X_AXIS, tau=2.0)
    assert params.strength == pytest.approx(g, abs=1e-12)
    assert params.jtau == pytest.approx(jtau_for_strength(g), abs=1e-15)


def test_strength_endpoints():
    assert DilationParams.from_jtau(0.0, Z_AXIS).strength == pytest.approx(1.0, abs=1e-15)
    assert DilationParams.from_jtau(JTAU_MAX, Z_AXIS).strength == pytest.approx(0.0, abs=1e-15)


@given(jtau=jtaus, tau=taus, axis=axes())
@settings(max_examples=40, deadline=None)
def test_factorized_unitary_matches_expm(jtau, tau, axis):
    params = DilationParams.from_jtau(jtau, axis, tau)
    exact = expm(-1j * hamiltonian_sd(params).m * tau)
    assert max_abs_diff(exact, unitary_sd(params)) <= 1e-12


@given(g=strengths, axis=axes(), tau=taus)
@settings(max_examples=60, deadline=None)
def test_extracted_kraus_equal_weak_measurement(g, axis, tau):
    k_plus, k_minus = extract_kraus(unitary_sd(DilationParams.from_strength(g, axis, tau)))
    expected = kraus_pair(g, axis)
    assert max_abs_diff(k_plus, expected.l_plus) <= 1e-12
    assert max_abs_diff(k_minus, expected.l_minus) <= 1e-12


def test_extract_kraus_rejects_non_unitary():
    with pytest.raises(NotUnitaryError):
        extract_kraus(Op(("A", "D_A"), 2.0 * np.eye(4)))


def test_extract_kraus_needs_two_qubits():
    with pytest.raises(LabelError):
        extract_kraus(Op(("A",), np.eye(2)))


def test_total_unitary_shape_and_labels():
    u = total_unitary(Branch(X_AXIS, Z_AXIS), Branch(Z_AXIS, X_AXIS), 0.3)
    assert u.labels == LABEL_ORDER
    assert u.m.shape == (32, 32)
    assert u.is_unitary()


@given(jtau=jtaus, tau=taus, a0=axes(), b0=axes(), a1=axes(), b1=axes())
@settings(max_examples=15, deadline=None)
def test_total_unitary_is_exponential_of_total_hamiltonian(jtau, tau, a0, b0, a1, b1):
    branch0, branch1 = Branch(a0, b0), Branch(a1, b1)
    term0, term1 = control_sector_terms(branch0, branch1, jtau, tau)
    assert max_abs_diff(term0.m @ term1.m, term1.m @ term0.m) <= 1e-12
    exact = expm(-1j * total_hamiltonian(branch0, branch1, jtau, tau).m * tau)
    assert max_abs_diff(exact, total_unitary(branch0, branch1, jtau, tau)) <= 1e-10


def test_branch_specific_strengths():
    u = total_unitary(Branch(X_AXIS, X_AXIS), Branch(Z_AXIS, Z_AXIS), (0.1, 0.4))
    assert u.is_unitary()
    same = total_unitary(Branch(X_AXIS, X_AXIS), Branch(Z_AXIS, Z_AXIS), 0.1)
    assert max_abs_diff(u, same) > 1e-3


def test_gauge_fixing_removes_global_phase(rng):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rotated = np.exp(1.234j) * m
    assert max_abs_diff(gauge_fixed(m), gauge_fixed(rotated)) <= 1e-14
    assert equal_up_to_phase(m, rotated, 1e-12)
    assert not equal_up_to_phase(m, m.conj(), 1e-6)


def test_hamiltonian_without_coupling_acts_on_minus_branch_only():
    h = hamiltonian_sd(DilationParams(J=0.0, tau=1.0, axis=Z_AXIS))
    expected = (np.pi / 2.0) * np.kron(np.diag([0.0, 1.0]), PAULI_Y)
    assert max_abs_diff(h, expected) <= 1e-15


def test_hamiltonian_at_symmetric_point():
    tau = 2.0
    h = hamiltonian_sd(DilationParams.from_jtau(np.pi / 4.0, Z_AXIS, tau))
    expected = (np.pi / (4.0 * tau)) * np.kron(np.eye(2), PAULI_Y)
    assert max_abs_diff(h, expected) <= 1e-15


@given(jtau=jtaus, tau=taus, axis=axes())
@settings(max_examples=40, deadline=None)
def test_hamiltonian_spectrum(jtau, tau, axis):
    params = DilationParams.from_jtau(jtau, axis, tau)
    other = np.pi / (2.0 * tau) - params.J
    values, _ = herm_eig(hamiltonian_sd(params))
    expected = sorted([params.J, -params.J, other, -other], reverse=True)
    assert values.real == pytest.approx(expected, abs=1e-10)
