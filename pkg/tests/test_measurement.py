import numpy as np
import pytest
from hypothesis import given, settings

from app.errors import NotNormalizedError, ParameterError
from app.measurement import (
    READOUTS,
    X_AXIS,
    Z_AXIS,
    MeasurementAxis,
    born_prob,
    colinearity,
    eigenstate,
    is_colinear,
    is_eigenstate,
    joint_prob,
    kraus_pair,
    projector,
    readout_bit,
    sector_name,
    strength_coefficients,
)
from app.qcore import Ket, basis_ket, max_abs_diff, plus_ket, random_ket
from tests.strategies import axes, open_strengths, seeds, strengths


def test_axis_must_be_unit():
    with pytest.raises(ParameterError):
        MeasurementAxis((1.0, 1.0, 0.0))


def test_axis_from_vector_normalizes():
    axis = MeasurementAxis.from_vector((0.0, 3.0, 4.0))
    assert axis.n == pytest.approx((0.0, 0.6, 0.8), abs=1e-15)


def test_negated_axis_swaps_projectors():
    assert max_abs_diff(projector(-Z_AXIS, +1), projector(Z_AXIS, -1)) <= 1e-15


def test_readout_labels():
    assert [readout_bit(s) for s in READOUTS] == [0, 1]
    assert sector_name(+1, -1) == "pm"


@given(axis=axes())
@settings(max_examples=20, deadline=None)
def test_projector_is_idempotent(axis):
    for s in READOUTS:
        pi = projector(axis, s).m
        assert max_abs_diff(pi @ pi, pi) <= 1e-12
    assert max_abs_diff(projector(axis, +1).m + projector(axis, -1).m, np.eye(2)) <= 1e-12


def test_strength_outside_domain():
    with pytest.raises(ParameterError):
        kraus_pair(1.2, X_AXIS)
    with pytest.raises(ParameterError):
        strength_coefficients(-0.1)


@given(g=strengths, axis=axes())
@settings(max_examples=80, deadline=None)
def test_kraus_completeness(g, axis):
    assert kraus_pair(g, axis).completeness_error() <= 1e-12


@given(g=strengths, axis=axes())
@settings(max_examples=50, deadline=None)
def test_kraus_commute_with_projectors(g, axis):
    pair = kraus_pair(g, axis)
    for s in READOUTS:
        pi = projector(axis, s).m
        for readout in READOUTS:
            k = pair[readout].m
            assert max_abs_diff(k @ pi, pi @ k) <= 1e-12


def test_projective_limit_gives_projectors():
    pair = kraus_pair(1.0, Z_AXIS)
    assert max_abs_diff(pair[+1], projector(Z_AXIS, +1)) <= 1e-15
    assert max_abs_diff(pair[-1], projector(Z_AXIS, -1)) <= 1e-15


def test_zero_strength_is_uninformative():
    pair = kraus_pair(0.0, X_AXIS)
    assert max_abs_diff(pair[+1].m, np.eye(2) / np.sqrt(2.0)) <= 1e-15
    assert born_prob(basis_ket("A", 0), pair[+1]) == pytest.approx(0.5, abs=1e-15)


def test_born_prob_weak_x_measurement():
    pair = kraus_pair(0.6, X_AXIS)
    # (1 + g <sigma_x>) / 2 with <sigma_x> = 1 on |+>
    assert born_prob(plus_ket("A"), pair[+1]) == pytest.approx(0.8, abs=1e-12)
    assert born_prob(plus_ket("A"), pair[-1]) == pytest.approx(0.2, abs=1e-12)


def test_born_prob_requires_normalized_input():
    with pytest.raises(NotNormalizedError):
        born_prob(Ket(("A",), np.array([1.0, 1.0])), kraus_pair(0.5, X_AXIS)[+1])


@given(g=strengths, axis_a=axes(), axis_b=axes(), seed=seeds)
@settings(max_examples=50, deadline=None)
def test_joint_probability_factorizes(g, axis_a, axis_b, seed):
    rng = np.random.default_rng(seed)
    phi_a, phi_b = random_ket(("A",), rng), random_ket(("B",), rng)
    pair_a, pair_b = kraus_pair(g, axis_a, "A"), kraus_pair(g, axis_b, "B")
    total = 0.0
    for i in READOUTS:
        for j in READOUTS:
            joint = joint_prob(phi_a, phi_b, pair_a[i], pair_b[j])
            assert joint == pytest.approx(born_prob(phi_a, pair_a[i]) * born_prob(phi_b, pair_b[j]), abs=1e-12)
            total += joint
    assert total == pytest.approx(1.0, abs=1e-12)


def test_colinearity_statistic():
    assert colinearity(np.array([1.0, 2.0]), np.array([2.0, 4.0])) == pytest.approx(0.0, abs=1e-15)
    assert colinearity(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(1.0, abs=1e-15)
    assert colinearity(np.zeros(2), np.array([0.0, 1.0])) == 0.0
    assert is_colinear(np.array([1.0, 1j]), np.array([2j, -2.0]))


@given(g=open_strengths, axis=axes(), seed=seeds)
@settings(max_examples=80, deadline=None)
def test_readout_vectors_colinear_only_for_eigenstates(g, axis, seed):
    phi = random_ket(("A",), np.random.default_rng(seed))
    pair = kraus_pair(g, axis)
    colinear = is_colinear(pair[+1].m @ phi.amp, pair[-1].m @ phi.amp)
    assert colinear == is_eigenstate(phi, axis)


@given(g=open_strengths, axis=axes())
@settings(max_examples=40, deadline=None)
def test_eigenstate_inputs_give_colinear_readout_vectors(g, axis):
    pair = kraus_pair(g, axis)
    for sign in READOUTS:
        phi = eigenstate(axis, sign)
        assert is_eigenstate(phi, axis)
        assert is_colinear(pair[+1].m @ phi.amp, pair[-1].m @ phi.amp)
        assert max_abs_diff(axis.sigma() @ phi.amp, sign * phi.amp) <= 1e-12
