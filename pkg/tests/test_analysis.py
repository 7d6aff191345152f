import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.analysis import (
    bell_basis,
    bell_basis_components,
    bell_boundary,
    bell_boundary_bisect,
    canonical_sampler,
    concurrence,
    concurrence_avg_closed,
    concurrence_pure,
    correlation_matrix,
    correlation_matrix_closed,
    crossover_angle,
    gamma_closed,
    horodecki,
    nu_closed,
    purity,
    purity_product_probe,
    random_sampler,
    sector_concurrence,
    spin_flip,
    to_bell_basis,
    wootters_lambdas,
    wootters_lambdas_closed,
)
from app.errors import NotDensityError, ParameterError
from app.protocol import ProtocolConfig, averaged_state, conditional_states_kraus
from app.qcore import Op, bell_ket, herm_eig, max_abs_diff, plus_ket, random_ket, tensor

grid_strengths = st.floats(min_value=0.02, max_value=1.0, allow_nan=False)
grid_angles = st.floats(min_value=0.05, max_value=np.pi, allow_nan=False)
boundary_strengths = st.floats(min_value=0.01, max_value=1.0, allow_nan=False)


def averaged(g: float, theta: float) -> Op:
    return averaged_state(conditional_states_kraus(ProtocolConfig.canonical(g, theta)))


def werner(p: float) -> Op:
    singlet = bell_ket("psi-").dm().m
    return Op(("A", "B"), p * singlet + (1.0 - p) * np.eye(4) / 4.0, density=True)


@pytest.mark.parametrize("name", ["phi+", "phi-", "psi+", "psi-"])
def test_bell_states_are_maximally_entangled(name):
    ket = bell_ket(name)
    assert concurrence(ket.dm()) == pytest.approx(1.0, abs=1e-12)
    assert concurrence_pure(ket) == pytest.approx(1.0, abs=1e-15)
    assert max_abs_diff(spin_flip(ket.dm()), ket.dm()) <= 1e-15


def test_product_state_has_zero_concurrence(rng):
    product = tensor(random_ket(("A",), rng), random_ket(("B",), rng))
    assert concurrence(product.dm()) <= 1e-12
    assert concurrence_pure(product) <= 1e-15


def test_werner_state_concurrence():
    assert concurrence(werner(0.5)) == pytest.approx(0.25, abs=1e-12)
    assert concurrence(werner(0.3)) == 0.0


def test_concurrence_needs_unit_trace():
    with pytest.raises(NotDensityError):
        concurrence(bell_ket("phi+").scaled(0.5).dm())


def test_wootters_lambdas_are_descending():
    lambdas = wootters_lambdas(werner(0.8))
    assert np.all(np.diff(lambdas) <= 0.0)


def test_purity_limits():
    assert purity(bell_ket("phi+").dm()) == pytest.approx(1.0, abs=1e-15)
    assert purity(werner(0.0)) == pytest.approx(0.25, abs=1e-15)


def test_bell_basis_is_unitary():
    basis = bell_basis()
    assert max_abs_diff(basis.conj().T @ basis, np.eye(4)) <= 1e-15
    assert max_abs_diff(basis[:, 1], bell_ket("phi-").amp) <= 1e-15
    assert max_abs_diff(basis[:, 3], bell_ket("psi-").amp) <= 1e-15


def test_closed_concurrence_example():
    assert concurrence_avg_closed(0.6, np.pi / 2) == pytest.approx(0.36 / 6.84, abs=1e-15)
    assert concurrence(averaged(0.6, np.pi / 2)) == pytest.approx(0.0526316, abs=1e-7)


def test_closed_concurrence_limits():
    assert concurrence_avg_closed(0.0, 1.0) == 0.0
    assert concurrence_avg_closed(0.5, np.pi) == pytest.approx(0.0, abs=1e-15)
    assert concurrence_avg_closed(1.0, 0.05) >= 0.49
    assert concurrence_avg_closed(1.0, 1e-9) == pytest.approx(0.5, abs=1e-12)


@given(g=grid_strengths, theta=grid_angles)
@settings(max_examples=150, deadline=None)
def test_closed_concurrence_matches_wootters(g, theta):
    rho = averaged(g, theta)
    closed = concurrence_avg_closed(g, theta)
    assert abs(closed - concurrence(rho)) <= 1e-9
    assert closed <= 0.5 + 1e-9


@given(g=grid_strengths, theta=grid_angles)
@settings(max_examples=60, deadline=None)
def test_bell_basis_components_match_numeric_state(g, theta):
    rho = averaged(g, theta)
    parts = bell_basis_components(g, theta)
    assert max_abs_diff(parts.matrix(), to_bell_basis(rho)) <= 1e-12
    assert max_abs_diff(parts.density(), rho) <= 1e-12


@given(g=grid_strengths, theta=grid_angles)
@settings(max_examples=60, deadline=None)
def test_closed_wootters_lambdas(g, theta):
    numeric = wootters_lambdas(averaged(g, theta))
    closed = sorted(wootters_lambdas_closed(g, theta), reverse=True)
    assert numeric[:2] == pytest.approx(closed, abs=1e-9)
    assert numeric[2:] == pytest.approx([0.0, 0.0], abs=1e-9)


def test_sector_concurrence_of_empty_sector_is_none():
    sectors = conditional_states_kraus(ProtocolConfig.canonical(1.0, np.pi / 2))
    by_name = {s.name: s for s in sectors}
    assert by_name["mm"].is_degenerate
    assert sector_concurrence(by_name["mm"]) is None
    assert sector_concurrence(by_name["pp"]) == pytest.approx(1.0, abs=1e-12)


def test_horodecki_example_point():
    report = horodecki(averaged(1.0, np.pi / 2))
    assert report.gamma == pytest.approx(5.0 / 9.0, abs=1e-12)
    assert gamma_closed(1.0, np.pi / 2) == pytest.approx(5.0 / 9.0, abs=1e-15)
    assert not report.violating
    assert report.b_max == pytest.approx(2.0 * np.sqrt(5.0 / 9.0), abs=1e-12)


def test_horodecki_bell_state_violates():
    report = horodecki(bell_ket("phi+").dm())
    assert report.gamma == pytest.approx(2.0, abs=1e-12)
    assert report.b_max == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-12)
    assert report.violating


@given(g=grid_strengths, theta=grid_angles)
@settings(max_examples=100, deadline=None)
def test_closed_gamma_matches_correlation_matrix(g, theta):
    rho = averaged(g, theta)
    assert max_abs_diff(correlation_matrix_closed(g, theta), correlation_matrix(rho)) <= 1e-12
    assert abs(gamma_closed(g, theta) - horodecki(rho).gamma) <= 1e-9
    nu1, nu2, nu3 = nu_closed(g, theta)
    if nu3 >= nu2:
        assert nu1 + nu3 <= 1.0 + 1e-12


def test_crossover_and_boundary_at_projective_limit():
    assert crossover_angle(1.0) == pytest.approx(1.9106332362490186, abs=1e-12)
    assert np.cos(crossover_angle(1.0)) == pytest.approx(-1.0 / 3.0, abs=1e-15)
    assert bell_boundary(1.0) == pytest.approx(0.9045568943023813, abs=1e-12)
    assert np.cos(bell_boundary(1.0)) == pytest.approx((np.sqrt(5.0) - 1.0) / 2.0, abs=1e-15)


@given(g=boundary_strengths)
@settings(max_examples=60, deadline=None)
def test_boundary_is_gamma_level_set(g):
    theta_b = bell_boundary(g)
    assert abs(gamma_closed(g, theta_b) - 1.0) <= 1e-9
    assert theta_b < crossover_angle(g)
    assert bell_boundary_bisect(g) == pytest.approx(theta_b, abs=1e-9)


def test_violation_region_lies_below_boundary():
    theta_b = bell_boundary(0.8)
    assert horodecki(averaged(0.8, 0.5 * theta_b)).violating
    assert not horodecki(averaged(0.8, min(2.0 * theta_b, np.pi))).violating


def test_boundary_needs_positive_strength():
    with pytest.raises(ParameterError):
        bell_boundary(0.0)
    with pytest.raises(ParameterError):
        bell_boundary_bisect(0.0)


def test_probe_on_canonical_family(rng):
    report = purity_product_probe(canonical_sampler, 200, rng, concurrence_bound=0.5, family="canonical")
    assert report.passed
    assert report.trials == 200
    assert 0.0 < report.max_concurrence <= 0.5 + 1e-9


def test_probe_on_random_family(rng):
    report = purity_product_probe(random_sampler, 200, rng, family="random")
    assert report.passed
    assert report.max_off_diagonal_gamma >= 0.0


def test_probe_flags_concurrence_above_bound(rng):
    def fixed_sampler(rng):
        return ProtocolConfig(g=0.5, input_a=plus_ket("A"), input_b=plus_ket("B"))

    report = purity_product_probe(fixed_sampler, 3, rng, concurrence_bound=0.0, family="bounded")
    assert not report.passed
    assert all(v.reason == "concurrence exceeds 0.0" for v in report.violations)


def test_probe_needs_trials(rng):
    with pytest.raises(ParameterError):
        purity_product_probe(canonical_sampler, 0, rng)


def test_nu3_branch_stays_below_one_on_grid():
    dominant = 0
    for g in np.linspace(0.02, 1.0, 40):
        for theta in np.linspace(0.05, np.pi, 40):
            nu1, nu2, nu3 = nu_closed(g, theta)
            if nu3 >= nu2:
                dominant += 1
                assert nu1 + nu3 <= 1.0 + 1e-12
    assert dominant > 0


def test_nu2_branch_can_exceed_one_at_small_angle():
    nu1, nu2, nu3 = nu_closed(0.38, 0.05)
    assert nu2 > nu3
    assert nu1 + nu3 > 1.0


def test_violation_region_is_below_boundary_on_grid():
    for g in np.linspace(0.02, 1.0, 40):
        theta_b = bell_boundary(g)
        for theta in np.linspace(0.05, np.pi, 40):
            if abs(theta - theta_b) <= 1e-6:
                continue
            gamma = gamma_closed(g, theta)
            if theta < theta_b:
                assert gamma > 1.0
            else:
                assert gamma <= 1.0 + 1e-12


@given(g=grid_strengths, theta=st.floats(min_value=0.2, max_value=np.pi - 0.2, allow_nan=False))
@settings(max_examples=40, deadline=None)
def test_bell_sectors_are_maximally_nonlocal(g, theta):
    for sector in conditional_states_kraus(ProtocolConfig.canonical(g, theta)):
        if sector.i == sector.j and not sector.is_degenerate:
            assert horodecki(sector.psi.normalized().dm()).gamma == pytest.approx(2.0, abs=1e-9)


@given(g=grid_strengths, theta=grid_angles)
@settings(max_examples=60, deadline=None)
def test_wootters_lambdas_of_averaged_state_are_ordered(g, theta):
    lambdas = wootters_lambdas(averaged(g, theta))
    assert np.all(np.diff(lambdas) <= 1e-12)
    assert lambdas[-1] >= -1e-12


def test_correlation_spectrum_at_projective_right_angle():
    v = correlation_matrix(averaged(1.0, np.pi / 2))
    nu, _ = herm_eig(v.T @ v)
    assert nu.real == pytest.approx([4.0 / 9.0, 1.0 / 9.0, 0.0], abs=1e-12)
