"""Invariant suites behind the `verify` command

Every suite draws from its own generator seeded with (seed, suite index),
so a report depends only on the seed and the trial count.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from app.analysis import (
    bell_basis_components,
    bell_boundary,
    bell_boundary_bisect,
    canonical_sampler,
    concurrence,
    concurrence_avg_closed,
    concurrence_pure,
    correlation_matrix,
    correlation_matrix_closed,
    gamma_closed,
    horodecki,
    nu_closed,
    purity_product_probe,
    random_sampler,
    sector_concurrence,
    to_bell_basis,
    wootters_lambdas,
)
from app.config import get_settings
from app.dilation import (
    DilationParams,
    control_sector_terms,
    extract_kraus,
    hamiltonian_sd,
    total_hamiltonian,
    total_unitary,
    unitary_sd,
)
from app.errors import DegeneratePostselectionError, ParameterError
from app.measurement import (
    READOUTS,
    Branch,
    MeasurementAxis,
    colinearity,
    eigenstate,
    is_colinear,
    is_eigenstate,
    joint_prob,
    kraus_pair,
)
from app.protocol import (
    ProtocolConfig,
    SectorResult,
    averaged_state,
    complement_state,
    conditional_states_dilation,
    conditional_states_kraus,
    control_traced_state,
    p_bell,
    postselection_probability,
    sector_weight_closed,
)
from app.qcore import (
    bell_ket,
    fidelity,
    herm_eig,
    max_abs_diff,
    partial_trace,
    psd_sqrt,
    random_density,
    random_hermitian,
    random_ket,
    tensor,
)

logger = logging.getLogger(__name__)

ClosedForm = Callable[[float, float], float]
Suite = Callable[["SuiteResult", np.random.Generator], None]

GRID_SIZE = 50
GRID_G = (0.02, 1.0)
GRID_THETA = (0.05, np.pi)
BELL_SECTOR_SAMPLES = 20
PROBE_FACTOR = 20
EXPM_SAMPLES = 5


def _num(value: float) -> str:
    return f"{value:.17g}"


def _random_axis(rng: np.random.Generator) -> MeasurementAxis:
    return MeasurementAxis.from_vector(rng.normal(size=3))


@dataclass
class SuiteResult:
    """Outcome of one suite: number of checks and failure details"""

    name: str
    checks: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, condition: bool, detail: Callable[[], str]) -> None:
        self.checks += 1
        if not condition:
            self.failures.append(detail())

    def line(self) -> str:
        if self.passed:
            return f"PASS {self.name} ({self.checks} checks)"
        more = f" (+{len(self.failures) - 1} more)" if len(self.failures) > 1 else ""
        return f"FAIL {self.name}: {self.failures[0]}{more}"


@dataclass
class VerificationReport:
    seed: int
    trials: int
    suites: List[SuiteResult]

    @property
    def passed(self) -> bool:
        return all(suite.passed for suite in self.suites)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def failed_suites(self) -> List[str]:
        return [suite.name for suite in self.suites if not suite.passed]

    def render(self) -> str:
        lines = [suite.line() for suite in self.suites]
        ok = len(self.suites) - len(self.failed_suites())
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"{verdict}: {ok}/{len(self.suites)} suites passed (seed={self.seed}, trials={self.trials})")
        return "\n".join(lines) + "\n"


class VerificationService:
    """Service for running every invariant suite

    `closed_form` is the averaged-concurrence formula under test; swapping
    in a wrong one must make `closed_form_concurrence` fail.
    """

    def __init__(
        self,
        seed: Optional[int] = None,
        trials: Optional[int] = None,
        closed_form: ClosedForm = concurrence_avg_closed,
        grid_size: int = GRID_SIZE,
    ):
        self.seed = get_settings().DEFAULT_SEED if seed is None else int(seed)
        self.trials = get_settings().DEFAULT_TRIALS if trials is None else int(trials)
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        if grid_size < 2:
            raise ParameterError(f"grid size must be >= 2, got {grid_size}")
        self.closed_form = closed_form
        self.grid_size = grid_size
        self._grid: Optional[List[Tuple[float, float, Tuple[SectorResult, ...]]]] = None

    @property
    def suites(self) -> List[Tuple[str, Suite]]:
        return [
            ("qcore_invariants", self._qcore_invariants),
            ("measurement_invariants", self._measurement_invariants),
            ("dilation_equivalence", self._dilation_equivalence),
            ("bell_sectors", self._bell_sectors),
            ("closed_form_concurrence", self._closed_form_concurrence),
            ("p_bell_formula", self._p_bell_formula),
            ("horodecki_consistency", self._horodecki_consistency),
            ("purity_product_probe", self._purity_product_probe),
            ("probability_completeness", self._probability_completeness),
            ("schmidt_rank_criterion", self._schmidt_rank_criterion),
        ]

    def run(self, only: Optional[Sequence[str]] = None) -> VerificationReport:
        if only is not None:
            known = [name for name, _ in self.suites]
            unknown = sorted(set(only) - set(known))
            if unknown:
                raise ParameterError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(known)}")
        logger.info(f"🚀 Starting verification (seed={self.seed}, trials={self.trials})")
        results = []
        for index, (name, suite) in enumerate(self.suites):
            if only is not None and name not in only:
                continue
            result = SuiteResult(name)
            rng = np.random.default_rng([self.seed, index])
            try:
                suite(result, rng)
            except Exception as e:
                logger.error(f"Suite {name} raised: {e}", exc_info=get_settings().DEBUG)
                result.failures.append(f"raised {type(e).__name__}: {e}")
            if result.passed:
                logger.info(f"✅ {name}: {result.checks} checks")
            else:
                logger.error(f"❌ {name}: {len(result.failures)} of {result.checks} checks failed")
            results.append(result)

        report = VerificationReport(self.seed, self.trials, results)
        logger.info(f"Verification finished: {'all suites passed' if report.passed else 'failures found'}")
        return report

    # Shared grid

    def grid(self) -> List[Tuple[float, float, Tuple[SectorResult, ...]]]:
        """Canonical sectors on the g x theta grid, computed once"""
        if self._grid is None:
            self._grid = [
                (float(g), float(theta), conditional_states_kraus(ProtocolConfig.canonical(g, theta)))
                for g in np.linspace(*GRID_G, self.grid_size)
                for theta in np.linspace(*GRID_THETA, self.grid_size)
            ]
        return self._grid

    # Suites

    def _qcore_invariants(self, result: SuiteResult, rng: np.random.Generator) -> None:
        for _ in range(self.trials):
            a = random_density(("A",), rng)
            b = random_density(("B",), rng)
            c = random_density(("C",), rng)
            left, right = tensor(tensor(a, b), c), tensor(a, tensor(b, c))
            result.check(
                max_abs_diff(left, right) <= 1e-12,
                lambda: f"tensor product is not associative (diff {max_abs_diff(left, right):.3e})",
            )

            bc = random_density(("B", "C"), rng)
            reduced = partial_trace(tensor(a, bc), ("A",))
            result.check(
                max_abs_diff(reduced, a) <= 1e-12,
                lambda: f"partial trace of a product does not recover the factor (diff {max_abs_diff(reduced, a):.3e})",
            )

            h = random_hermitian(4, rng)
            values, vectors = herm_eig(h)
            residual = max_abs_diff(h @ vectors, vectors * values)
            unitarity = max_abs_diff(vectors.conj().T @ vectors, np.eye(4))
            result.check(
                residual <= 1e-10 and unitarity <= 1e-10 and bool(np.all(np.diff(values.real) <= 0.0)),
                lambda: f"herm_eig residual {residual:.3e}, unitarity {unitarity:.3e}",
            )

            rho = random_density(("A", "B"), rng, rank=int(rng.integers(1, 5)))
            root = psd_sqrt(rho).m
            result.check(
                max_abs_diff(root @ root, rho.m) <= 1e-9,
                lambda: f"psd_sqrt squared differs from input by {max_abs_diff(root @ root, rho.m):.3e}",
            )

    def _measurement_invariants(self, result: SuiteResult, rng: np.random.Generator) -> None:
        for _ in range(self.trials):
            g = float(rng.uniform(0.05, 1.0))
            axis_a, axis_b = _random_axis(rng), _random_axis(rng)
            pair_a, pair_b = kraus_pair(g, axis_a, "A"), kraus_pair(g, axis_b, "B")
            result.check(
                pair_a.completeness_error() <= 1e-12,
                lambda: f"L_+^H L_+ + L_-^H L_- != I at g={_num(g)} (error {pair_a.completeness_error():.3e})",
            )

            phi_a, phi_b = random_ket(("A",), rng), random_ket(("B",), rng)
            for i in READOUTS:
                for j in READOUTS:
                    joint = joint_prob(phi_a, phi_b, pair_a[i], pair_b[j])
                    single_a = float(np.linalg.norm(pair_a[i].m @ phi_a.amp) ** 2)
                    single_b = float(np.linalg.norm(pair_b[j].m @ phi_b.amp) ** 2)
                    result.check(
                        abs(joint - single_a * single_b) <= 1e-12,
                        lambda: f"joint probability does not factorize at g={_num(g)}, sector ({i}, {j})",
                    )

            for sign in READOUTS:
                pi = 0.5 * (np.eye(2) + sign * axis_a.sigma())
                for readout in READOUTS:
                    k = pair_a[readout].m
                    result.check(
                        max_abs_diff(k @ pi, pi @ k) <= 1e-12,
                        lambda: f"Kraus operator does not commute with its projector at g={_num(g)}",
                    )

            stat = colinearity(pair_a[+1].m @ phi_a.amp, pair_a[-1].m @ phi_a.amp)
            result.check(
                is_eigenstate(phi_a, axis_a) or stat >= 1e-9,
                lambda: f"non-eigenstate input gave colinear readout vectors at g={_num(g)} (stat {stat:.3e})",
            )
            special = eigenstate(axis_a, int(rng.choice(READOUTS)), "A")
            result.check(
                is_eigenstate(special, axis_a)
                and is_colinear(pair_a[+1].m @ special.amp, pair_a[-1].m @ special.amp),
                lambda: f"eigenstate input gave noncolinear readout vectors at g={_num(g)}",
            )

    def _dilation_equivalence(self, result: SuiteResult, rng: np.random.Generator) -> None:
        for _ in range(self.trials):
            g = float(rng.uniform(0.0, 1.0))
            params = DilationParams.from_strength(g, _random_axis(rng), tau=float(rng.uniform(0.5, 2.0)))
            k_plus, k_minus = extract_kraus(unitary_sd(params))
            expected = kraus_pair(g, params.axis)
            error = max(max_abs_diff(k_plus, expected.l_plus), max_abs_diff(k_minus, expected.l_minus))
            result.check(error <= 1e-12, lambda: f"extracted Kraus differ from L_pm at g={_num(g)} by {error:.3e}")

        for _ in range(EXPM_SAMPLES):
            jtau = float(rng.uniform(0.0, np.pi / 4))
            tau = float(rng.uniform(0.5, 2.0))
            params = DilationParams.from_jtau(jtau, _random_axis(rng), tau)
            exact = expm(-1j * hamiltonian_sd(params).m * tau)
            result.check(
                max_abs_diff(exact, unitary_sd(params)) <= 1e-12,
                lambda: f"factorized U_SD differs from expm at J*tau={_num(jtau)}",
            )

            branch0 = Branch(_random_axis(rng), _random_axis(rng))
            branch1 = Branch(_random_axis(rng), _random_axis(rng))
            term0, term1 = control_sector_terms(branch0, branch1, jtau, tau)
            result.check(
                max_abs_diff(term0.m @ term1.m, term1.m @ term0.m) <= 1e-12,
                lambda: f"control-sector terms do not commute at J*tau={_num(jtau)}",
            )
            exact = expm(-1j * total_hamiltonian(branch0, branch1, jtau, tau).m * tau)
            result.check(
                max_abs_diff(exact, total_unitary(branch0, branch1, jtau, tau)) <= 1e-10,
                lambda: f"controlled unitary differs from expm(-i H_tot tau) at J*tau={_num(jtau)}",
            )

        for _ in range(self.trials):
            cfg = random_sampler(rng)
            for kraus, dilated in zip(conditional_states_kraus(cfg), conditional_states_dilation(cfg)):
                result.check(
                    abs(kraus.weight - dilated.weight) <= 1e-12,
                    lambda: f"sector {kraus.name} weights differ ({_num(kraus.weight)} vs {_num(dilated.weight)}) for {cfg.describe()}",
                )
                if not (kraus.is_degenerate or dilated.is_degenerate):
                    overlap = fidelity(kraus.psi, dilated.psi)
                    result.check(
                        overlap >= 1.0 - 1e-10,
                        lambda: f"sector {kraus.name} phase fidelity {_num(overlap)} for {cfg.describe()}",
                    )

            traced = concurrence(control_traced_state(cfg))
            result.check(
                traced < 1e-9,
                lambda: f"control-traced state is entangled (C={_num(traced)}) for {cfg.describe()}",
            )

    def _bell_sectors(self, result: SuiteResult, rng: np.random.Generator) -> None:
        target = bell_ket("phi-")
        for _ in range(BELL_SECTOR_SAMPLES):
            g = float(rng.uniform(0.05, 1.0))
            theta = float(rng.uniform(0.2, np.pi - 0.2))
            sectors = conditional_states_kraus(ProtocolConfig.canonical(g, theta))
            for sector in sectors:
                if sector.i != sector.j or sector.is_degenerate:
                    continue
                c = concurrence_pure(sector.psi)
                overlap = fidelity(sector.psi, target)
                result.check(
                    abs(c - 1.0) <= 1e-10 and overlap >= 1.0 - 1e-10,
                    lambda: f"sector {sector.name} at g={_num(g)}, theta={_num(theta)}: C={_num(c)}, fidelity={_num(overlap)}",
                )
                gamma = horodecki(sector.psi.normalized().dm()).gamma
                result.check(
                    abs(gamma - 2.0) <= 1e-9,
                    lambda: f"sector {sector.name} at g={_num(g)}, theta={_num(theta)}: gamma={_num(gamma)}, expected 2",
                )
                closed = sector_weight_closed(g, theta, sector.j)
                result.check(
                    abs(sector.weight - closed) <= 1e-12,
                    lambda: f"sector {sector.name} weight {_num(sector.weight)} != {_num(closed)} at g={_num(g)}, theta={_num(theta)}",
                )

    def _closed_form_concurrence(self, result: SuiteResult, rng: np.random.Generator) -> None:
        largest = 0.0
        for g, theta, sectors in self.grid():
            rho = averaged_state(sectors)
            closed = self.closed_form(g, theta)
            numeric = concurrence(rho)
            lambdas = wootters_lambdas(rho)
            result.check(
                bool(np.all(np.diff(lambdas) <= 1e-12)) and lambdas[-1] >= -1e-12,
                lambda: f"Wootters lambdas {lambdas} are not descending and non-negative at g={_num(g)}, theta={_num(theta)}",
            )
            largest = max(largest, closed)
            result.check(
                abs(closed - numeric) <= 1e-9,
                lambda: f"C_closed={_num(closed)} vs C_numeric={_num(numeric)} at g={_num(g)}, theta={_num(theta)}",
            )
            parts = bell_basis_components(g, theta)
            error = max_abs_diff(parts.matrix(), to_bell_basis(rho))
            result.check(
                error <= 1e-12,
                lambda: f"Bell-basis matrix differs by {error:.3e} at g={_num(g)}, theta={_num(theta)}",
            )

        result.check(largest <= 0.5 + 1e-9, lambda: f"grid maximum {_num(largest)} exceeds 1/2")
        corner = self.closed_form(1.0, 0.05)
        result.check(corner >= 0.49, lambda: f"C(1, 0.05) = {_num(corner)} is below 0.49")

    def _p_bell_formula(self, result: SuiteResult, rng: np.random.Generator) -> None:
        for g, theta, sectors in self.grid():
            weights = {sector.name: sector.weight for sector in sectors}
            total = weights["pp"] + weights["mm"]
            closed = p_bell(g, theta)
            result.check(
                abs(closed - total) <= 1e-12,
                lambda: f"P_Bell={_num(closed)} vs P_++ + P_--={_num(total)} at g={_num(g)}, theta={_num(theta)}",
            )
            norm = bell_basis_components(g, theta).norm
            probability = postselection_probability(sectors)
            result.check(
                abs(norm - probability) <= 1e-12,
                lambda: f"postselection probability {_num(probability)} != N={_num(norm)} at g={_num(g)}, theta={_num(theta)}",
            )

        spot = p_bell(1.0, np.pi / 2)
        result.check(abs(spot - 0.125) <= 1e-12, lambda: f"P_Bell(1, pi/2) = {_num(spot)}, expected 0.125")
        pp, mm = sector_weight_closed(1.0, np.pi / 2, +1), sector_weight_closed(1.0, np.pi / 2, -1)
        result.check(
            abs(pp - 0.125) <= 1e-12 and abs(mm) <= 1e-12,
            lambda: f"P_++(1, pi/2) = {_num(pp)}, P_--(1, pi/2) = {_num(mm)}",
        )

    def _horodecki_consistency(self, result: SuiteResult, rng: np.random.Generator) -> None:
        nu3_dominant = 0
        for g, theta, sectors in self.grid():
            rho = averaged_state(sectors)
            report = horodecki(rho)
            closed = gamma_closed(g, theta)
            result.check(
                abs(closed - report.gamma) <= 1e-9,
                lambda: f"gamma_closed={_num(closed)} vs gamma_numeric={_num(report.gamma)} at g={_num(g)}, theta={_num(theta)}",
            )
            v_error = max_abs_diff(correlation_matrix_closed(g, theta), correlation_matrix(rho))
            result.check(
                v_error <= 1e-12,
                lambda: f"correlation matrix differs by {v_error:.3e} at g={_num(g)}, theta={_num(theta)}",
            )
            nu1, nu2, nu3 = nu_closed(g, theta)
            if nu3 >= nu2:
                nu3_dominant += 1
                result.check(
                    nu1 + nu3 <= 1.0 + 1e-12,
                    lambda: f"nu_1 + nu_3 = {_num(nu1 + nu3)} exceeds 1 at g={_num(g)}, theta={_num(theta)}",
                )
            spectrum = np.sort(np.array([nu1, nu2, nu3]))[::-1]
            result.check(
                max_abs_diff(spectrum, report.nu) <= 1e-9,
                lambda: f"nu spectrum differs at g={_num(g)}, theta={_num(theta)}",
            )

        for g in np.linspace(*GRID_G, self.grid_size):
            g = float(g)
            theta_b = bell_boundary(g)
            gamma_b = gamma_closed(g, theta_b)
            result.check(
                abs(gamma_b - 1.0) <= 1e-9,
                lambda: f"gamma(g, theta_B) = {_num(gamma_b)} at g={_num(g)}",
            )
            root = bell_boundary_bisect(g)
            result.check(
                abs(root - theta_b) <= 1e-9,
                lambda: f"closed boundary {_num(theta_b)} vs bisection {_num(root)} at g={_num(g)}",
            )
            for theta in np.linspace(*GRID_THETA, self.grid_size):
                theta = float(theta)
                if abs(theta - theta_b) <= 1e-6:
                    continue
                gamma = gamma_closed(g, theta)
                result.check(
                    gamma > 1.0 if theta < theta_b else gamma <= 1.0 + 1e-12,
                    lambda: f"gamma={_num(gamma)} on the wrong side of theta_B={_num(theta_b)} at g={_num(g)}, theta={_num(theta)}",
                )

        result.check(nu3_dominant > 0, lambda: "no grid point has nu_3 >= nu_2")

    def _purity_product_probe(self, result: SuiteResult, rng: np.random.Generator) -> None:
        samples = PROBE_FACTOR * self.trials
        for family, sampler, bound in (
            ("canonical", canonical_sampler, 0.5),
            ("random", random_sampler, None),
        ):
            report = purity_product_probe(sampler, samples, rng, concurrence_bound=bound, family=family)
            logger.info(
                f"Probe {family}: max C={report.max_concurrence:.6f}, "
                f"max off-diagonal gamma={report.max_off_diagonal_gamma:.6f}, skipped={report.skipped}"
            )
            result.checks += report.trials
            for violation in report.violations:
                result.failures.append(
                    f"{family}: {violation.reason} (purity={_num(violation.purity)}, "
                    f"C={_num(violation.concurrence)}) for {violation.config}"
                )

        for _ in range(self.trials):
            cfg = self._eigenstate_config(rng)
            try:
                c = concurrence(averaged_state(conditional_states_kraus(cfg)))
            except DegeneratePostselectionError:
                continue
            result.check(
                c < 1e-10,
                lambda: f"eigenstate input on B does not factorize (C={_num(c)}) for {cfg.describe()}",
            )

    @staticmethod
    def _eigenstate_config(rng: np.random.Generator) -> ProtocolConfig:
        """Random config whose B input is an eigenstate of the shared B axis"""
        axis_b = _random_axis(rng)
        amplitudes = random_ket(("C",), rng).amp
        return ProtocolConfig(
            g=float(rng.uniform(0.05, 1.0)),
            alpha=amplitudes[0],
            beta=amplitudes[1],
            control_post=random_ket(("C",), rng),
            input_a=random_ket(("A",), rng),
            input_b=eigenstate(axis_b, int(rng.choice(READOUTS)), "B"),
            branches=(Branch(_random_axis(rng), axis_b), Branch(_random_axis(rng), axis_b)),
        )

    def _probability_completeness(self, result: SuiteResult, rng: np.random.Generator) -> None:
        configs = [random_sampler(rng) for _ in range(self.trials)]
        configs += [canonical_sampler(rng) for _ in range(self.trials)]
        for cfg in configs:
            other = cfg.with_control_post(complement_state(cfg.control_post))
            total = postselection_probability(conditional_states_kraus(cfg))
            total += postselection_probability(conditional_states_kraus(other))
            result.check(
                abs(total - 1.0) <= 1e-12,
                lambda: f"total probability {_num(total)} for {cfg.describe()}",
            )

    def _schmidt_rank_criterion(self, result: SuiteResult, rng: np.random.Generator) -> None:
        configs = [random_sampler(rng) for _ in range(self.trials)]
        configs += [self._eigenstate_config(rng) for _ in range(self.trials)]
        for cfg in configs:
            branch0, branch1 = cfg.resolved_branches
            k_a, k_b = kraus_pair(cfg.g, branch0.axis_a, "A"), kraus_pair(cfg.g, branch0.axis_b, "B")
            m_a, m_b = kraus_pair(cfg.g, branch1.axis_a, "A"), kraus_pair(cfg.g, branch1.axis_b, "B")
            for sector in conditional_states_kraus(cfg):
                c = sector_concurrence(sector)
                if c is None:
                    continue
                local_a = not is_colinear(k_a[sector.i].m @ cfg.input_a.amp, m_a[sector.i].m @ cfg.input_a.amp)
                local_b = not is_colinear(k_b[sector.j].m @ cfg.input_b.amp, m_b[sector.j].m @ cfg.input_b.amp)
                result.check(
                    (c > 1e-8) == (local_a and local_b),
                    lambda: f"sector {sector.name}: C={_num(c)} but noncolinear A={local_a}, B={local_b} for {cfg.describe()}",
                )
