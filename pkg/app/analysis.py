"""Entanglement and CHSH nonlocality of two-qubit states

Numeric routines take any normalized two-qubit density; the *_closed
functions evaluate the closed forms for the canonical example
(|++> input, |+>_C prepared, |->_C postselected, tilted axes at angle
theta) and are cross-checked against the numeric ones.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from app.config import tolerances
from app.errors import DegeneratePostselectionError, NotDensityError, ParameterError
from app.measurement import Branch, MeasurementAxis, check_strength
from app.protocol import (
    ProtocolConfig,
    SectorResult,
    averaged_state,
    check_theta,
    conditional_states_kraus,
)
from app.qcore import PAULI_Y, PAULIS, Ket, Op, herm_eig, psd_sqrt, random_ket

logger = logging.getLogger(__name__)

SIGMA_YY = np.kron(PAULI_Y, PAULI_Y)

# Columns: Phi+, Phi-, Psi+, Psi- in the computational basis
BELL_BASIS = np.array([
    [1, 1, 0, 0],
    [0, 0, 1, 1],
    [0, 0, 1, -1],
    [1, -1, 0, 0],
], dtype=complex) / np.sqrt(2.0)

PURE_STATE_PURITY = 1.0 - 1e-10
ENTANGLED_CONCURRENCE = 1e-8


def _two_qubit_density(rho: Op) -> Op:
    if not isinstance(rho, Op) or len(rho.labels) != 2:
        raise NotDensityError("expected a two-qubit density operator")
    if not rho.density:
        rho = Op(rho.labels, rho.m, density=True)
    if abs(rho.weight - 1.0) > tolerances.trace:
        raise NotDensityError(f"density must have unit trace, got {rho.weight:.15g}")
    return rho


# Wootters concurrence

def spin_flip(rho: Op) -> Op:
    """(sigma_y sigma_y) rho* (sigma_y sigma_y)"""
    return Op(rho.labels, SIGMA_YY @ rho.m.conj() @ SIGMA_YY)


def wootters_lambdas(rho: Op) -> np.ndarray:
    """Square roots of the eigenvalues of rho rho~, descending

    They are the singular values of sqrt(rho) (sy sy) sqrt(rho)*, whose
    Gram matrix is the Hermitian similarity sqrt(rho) rho~ sqrt(rho).
    """
    rho = _two_qubit_density(rho)
    root = psd_sqrt(rho).m
    return np.linalg.svd(root @ SIGMA_YY @ root.conj(), compute_uv=False)


def concurrence(rho: Op) -> float:
    """max(0, l1 - l2 - l3 - l4)"""
    lambdas = wootters_lambdas(rho)
    value = lambdas[0] - lambdas[1:].sum()
    return float(min(max(value, 0.0), 1.0))


def concurrence_pure(psi: Ket) -> float:
    """|<psi|sy sy|psi*>| / <psi|psi> for a (possibly unnormalized) pure state"""
    weight = psi.weight()
    if weight <= tolerances.degenerate_weight:
        raise DegeneratePostselectionError(weight)
    return float(min(abs(psi.amp @ SIGMA_YY @ psi.amp) / weight, 1.0))


def sector_concurrence(sector: SectorResult) -> Optional[float]:
    """Concurrence of the normalized sector state, None for an empty sector"""
    if sector.is_degenerate:
        return None
    return concurrence_pure(sector.psi)


def purity(rho: Op) -> float:
    return float(np.real(np.trace(rho.m @ rho.m)))


def bell_basis() -> np.ndarray:
    """Unitary whose columns are Phi+, Phi-, Psi+, Psi-"""
    return BELL_BASIS.copy()


def to_bell_basis(rho: Op) -> np.ndarray:
    """Matrix elements in the (Phi+, Phi-, Psi+, Psi-) basis"""
    return BELL_BASIS.conj().T @ rho.m @ BELL_BASIS


# Closed forms for the canonical example

def _root(g: float) -> float:
    """sqrt(1 - g^2)"""
    return float(np.sqrt(1.0 - g * g))


def concurrence_avg_closed(g: float, theta: float) -> float:
    """g^2 (1 + cos) / [4 (1 + sqrt(1 - g^2)) - g^2 (1 - cos)]"""
    g, theta = check_strength(g), check_theta(theta)
    c = np.cos(theta)
    return float(g * g * (1.0 + c) / (4.0 * (1.0 + _root(g)) - g * g * (1.0 - c)))


@dataclass(frozen=True)
class BellBasisComponents:
    """Entries x, y, z, w and normalization N of the averaged state"""

    x: float
    y: float
    z: float
    w: float
    norm: float

    def matrix(self) -> np.ndarray:
        """Normalized density in the (Phi+, Phi-, Psi+, Psi-) basis"""
        x, y, z, w = self.x, self.y, self.z, self.w
        raw = np.array([
            [x, 0, x, y],
            [0, z, 0, 0],
            [x, 0, x, y],
            [y, 0, y, w],
        ], dtype=complex)
        if self.norm <= tolerances.degenerate_weight:
            raise DegeneratePostselectionError(self.norm)
        return raw / (16.0 * self.norm)

    def density(self, labels: Tuple[str, str] = ("A", "B")) -> Op:
        """Same state in the computational basis"""
        return Op(labels, BELL_BASIS @ self.matrix() @ BELL_BASIS.conj().T, density=True, weight=1.0)


def bell_basis_components(g: float, theta: float) -> BellBasisComponents:
    g, theta = check_strength(g), check_theta(theta)
    c, s, r = np.cos(theta), np.sin(theta), _root(g)
    g2 = g * g
    return BellBasisComponents(
        x=float(g2 * (1.0 - c) ** 2),
        y=float(-g2 * (1.0 - c) * s),
        z=float((4.0 * (1.0 - r) - g2) * s * s),
        w=float(g2 * s * s),
        norm=float((g2 * (1.0 - c) ** 2 + 2.0 * (1.0 - r) * s * s) / 8.0),
    )


def wootters_lambdas_closed(g: float, theta: float) -> Tuple[float, float]:
    """(lambda_1, lambda_2); lambda_3 = lambda_4 = 0"""
    parts = bell_basis_components(g, theta)
    if parts.norm <= tolerances.degenerate_weight:
        raise DegeneratePostselectionError(parts.norm)
    scale = 16.0 * parts.norm
    return parts.z / scale, parts.w / scale


# Horodecki criterion

@dataclass(frozen=True, eq=False)
class HorodeckiReport:
    """Correlation matrix and CHSH figures of merit"""

    V: np.ndarray
    nu: np.ndarray
    gamma: float
    b_max: float
    violating: bool


def correlation_matrix(rho: Op) -> np.ndarray:
    """V_mn = Tr[rho (sigma_m (x) sigma_n)], rows index A, columns B"""
    rho = _two_qubit_density(rho)
    return np.array([
        [float(np.real(np.trace(rho.m @ np.kron(sm, sn)))) for sn in PAULIS]
        for sm in PAULIS
    ])


def horodecki(rho: Op) -> HorodeckiReport:
    v = correlation_matrix(rho)
    nu, _ = herm_eig(v.T @ v)
    nu = nu.real
    gamma = float(nu[0] + nu[1])
    return HorodeckiReport(
        V=v,
        nu=nu,
        gamma=gamma,
        b_max=float(2.0 * np.sqrt(max(gamma, 0.0))),
        violating=gamma > 1.0,
    )


def correlation_matrix_closed(g: float, theta: float) -> np.ndarray:
    """[[t, 0, r], [0, u, 0], [-r, 0, u]]"""
    g, theta = check_strength(g), check_theta(theta)
    c, s, r = np.cos(theta), np.sin(theta), _root(g)
    g2 = g * g
    denominator = g2 * (1.0 - c) ** 2 + 2.0 * (1.0 - r) * s * s
    if denominator <= tolerances.degenerate_weight:
        raise DegeneratePostselectionError(denominator / 8.0)
    t = (g2 * (1.0 - c) ** 2 - 2.0 * (1.0 - r) * s * s) / denominator
    rr = g2 * (1.0 - c) * s / denominator
    u = (1.0 - r) ** 2 * s * s / denominator
    return np.array([[t, 0.0, rr], [0.0, u, 0.0], [-rr, 0.0, u]])


def nu_closed(g: float, theta: float) -> Tuple[float, float, float]:
    """Eigenvalues of V^T V (unsorted between nu_2 and nu_3)"""
    g, theta = check_strength(g), check_theta(theta)
    c, r = np.cos(theta), _root(g)
    denominator = (3.0 + r + c - r * c) ** 2
    nu1 = 4.0 * (1.0 + c) ** 2 / denominator
    nu2 = (1.0 - r) ** 2 * (1.0 + c) ** 2 / denominator
    nu3 = 4.0 * (r - c) ** 2 / denominator
    return float(nu1), float(nu2), float(nu3)


def gamma_closed(g: float, theta: float) -> float:
    """nu_1 + max(nu_2, nu_3)"""
    nu1, nu2, nu3 = nu_closed(g, theta)
    return nu1 + (nu2 if nu2 >= nu3 else nu3)


def crossover_angle(g: float) -> float:
    """theta* where nu_2 = nu_3: cos theta* = (3s - 1) / (3 - s)"""
    r = _root(check_strength(g))
    return float(np.arccos((3.0 * r - 1.0) / (3.0 - r)))


def bell_boundary(g: float) -> float:
    """theta_B(g); the averaged state violates CHSH for 0 < theta < theta_B"""
    g = check_strength(g)
    if g <= 0.0:
        raise ParameterError("the Bell boundary is defined for g in (0, 1]")
    r = _root(g)
    k = np.sqrt(4.0 + (1.0 - r) ** 2)
    argument = (3.0 + r - k) / (k - 1.0 + r)
    if abs(argument) > 1.0 + tolerances.arccos_clamp:
        raise ParameterError(f"boundary arccos argument {argument:.15g} is outside [-1, 1]")
    return float(np.arccos(np.clip(argument, -1.0, 1.0)))


def bell_boundary_bisect(g: float) -> float:
    """Root of gamma_closed(g, .) - 1 on [0, theta*] by bisection"""
    g = check_strength(g)
    if g <= 0.0:
        raise ParameterError("the Bell boundary is defined for g in (0, 1]")
    return float(bisect(lambda theta: gamma_closed(g, theta) - 1.0, 0.0, crossover_angle(g), xtol=1e-15, maxiter=200))


# Purity versus product probe

@dataclass(frozen=True)
class ProbeViolation:
    reason: str
    purity: float
    concurrence: float
    config: dict


@dataclass(frozen=True)
class ProbeReport:
    family: str
    trials: int
    skipped: int
    violations: Tuple[ProbeViolation, ...]
    max_concurrence: float
    max_off_diagonal_gamma: float

    @property
    def passed(self) -> bool:
        return not self.violations


Sampler = Callable[[np.random.Generator], ProtocolConfig]


def canonical_sampler(rng: np.random.Generator) -> ProtocolConfig:
    """Canonical example at random (g, theta)"""
    return ProtocolConfig.canonical(g=rng.uniform(0.0, 1.0), theta=rng.uniform(0.0, 2.0 * np.pi))


def _random_axis(rng: np.random.Generator) -> MeasurementAxis:
    return MeasurementAxis.from_vector(rng.normal(size=3))


def random_sampler(rng: np.random.Generator) -> ProtocolConfig:
    """Random axes, inputs, strength, amplitudes and control postselection"""
    amplitudes = random_ket(("C",), rng).amp
    return ProtocolConfig(
        g=rng.uniform(0.0, 1.0),
        alpha=amplitudes[0],
        beta=amplitudes[1],
        control_post=random_ket(("C",), rng),
        input_a=random_ket(("A",), rng),
        input_b=random_ket(("B",), rng),
        branches=(
            Branch(_random_axis(rng), _random_axis(rng)),
            Branch(_random_axis(rng), _random_axis(rng)),
        ),
    )


def purity_product_probe(
    sampler: Sampler,
    trials: int,
    rng: np.random.Generator,
    concurrence_bound: Optional[float] = None,
    family: str = "custom",
) -> ProbeReport:
    """Check that no readout-averaged state is both pure and entangled"""
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")

    violations: List[ProbeViolation] = []
    skipped = 0
    max_concurrence = 0.0
    max_off_gamma = 0.0

    for _ in range(trials):
        cfg = sampler(rng)
        sectors = conditional_states_kraus(cfg)
        try:
            rho = averaged_state(sectors)
        except DegeneratePostselectionError:
            skipped += 1
            continue

        c = concurrence(rho)
        p = purity(rho)
        max_concurrence = max(max_concurrence, c)

        if p > PURE_STATE_PURITY and c >= ENTANGLED_CONCURRENCE:
            violations.append(ProbeViolation("pure averaged state is entangled", p, c, cfg.describe()))
        if concurrence_bound is not None and c > concurrence_bound + 1e-9:
            violations.append(ProbeViolation(f"concurrence exceeds {concurrence_bound}", p, c, cfg.describe()))

        for sector in sectors:
            if sector.i != sector.j and not sector.is_degenerate:
                gamma = horodecki(sector.psi.normalized().dm()).gamma
                max_off_gamma = max(max_off_gamma, gamma)

    logger.debug(f"Probe {family}: {trials} trials, {skipped} skipped, {len(violations)} violations")
    return ProbeReport(
        family=family,
        trials=trials,
        skipped=skipped,
        violations=tuple(violations),
        max_concurrence=max_concurrence,
        max_off_diagonal_gamma=max_off_gamma,
    )
