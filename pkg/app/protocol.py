"""Coherently controlled two-branch measurement protocol

The control qubit C is prepared in alpha|0> + beta|1> and selects which
pair of local measurements acts on (A, B). After the detectors are read
out the control is postselected, so within each readout sector (i, j)
the two branches add coherently while different sectors add incoherently.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from app.config import tolerances
from app.dilation import jtau_for_strength, total_unitary
from app.errors import DegeneratePostselectionError, LabelError, ParameterError
from app.measurement import (
    SECTORS,
    X_AXIS,
    Branch,
    MeasurementAxis,
    check_strength,
    kraus_pair,
    readout_bit,
    sector_name,
)
from app.qcore import (
    LABEL_ORDER,
    Ket,
    Op,
    apply,
    basis_ket,
    minus_ket,
    partial_trace,
    plus_ket,
    reorder,
    tensor,
)

logger = logging.getLogger(__name__)

SYSTEM_LABELS = ("A", "B")
TWO_PI = 2.0 * np.pi


def check_theta(theta: float) -> float:
    """Validate theta in [0, 2 pi]"""
    theta = float(theta)
    if not -tolerances.parameter <= theta <= TWO_PI + tolerances.parameter:
        raise ParameterError(f"theta must lie in [0, 2 pi], got {theta}")
    return theta


def canonical_branches(theta: float) -> Tuple[Branch, Branch]:
    """Branch 0 measures (x, n0), branch 1 measures (n1, x)"""
    theta = check_theta(theta)
    n0 = MeasurementAxis((np.cos(theta), 0.0, -np.sin(theta)))
    n1 = MeasurementAxis((np.cos(theta), 0.0, np.sin(theta)))
    return Branch(X_AXIS, n0), Branch(n1, X_AXIS)


def _one_qubit(ket: Ket, label: str, what: str) -> Ket:
    if ket.labels != (label,):
        raise LabelError(f"{what} must live on ({label!r},), got {ket.labels}")
    return ket.require_normalized(what)


@dataclass(frozen=True, eq=False)
class ProtocolConfig:
    """Everything needed to run one experiment

    `branches` defaults to the canonical tilted-axis pair for `theta`.
    """

    g: float
    theta: float = np.pi / 2
    alpha: complex = 1 / np.sqrt(2.0)
    beta: complex = 1 / np.sqrt(2.0)
    control_post: Ket = field(default_factory=lambda: minus_ket("C"))
    input_a: Ket = field(default_factory=lambda: plus_ket("A"))
    input_b: Ket = field(default_factory=lambda: plus_ket("B"))
    branches: Optional[Tuple[Branch, Branch]] = None

    def __post_init__(self):
        object.__setattr__(self, "g", check_strength(self.g))
        object.__setattr__(self, "theta", check_theta(self.theta))
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        total = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(total - 1.0) > tolerances.norm:
            raise ParameterError(f"|alpha|^2 + |beta|^2 must be 1, got {total:.15g}")
        _one_qubit(self.control_post, "C", "control postselection state")
        _one_qubit(self.input_a, "A", "input state on A")
        _one_qubit(self.input_b, "B", "input state on B")

    @classmethod
    def canonical(cls, g: float, theta: float) -> "ProtocolConfig":
        return cls(g=g, theta=theta)

    @property
    def resolved_branches(self) -> Tuple[Branch, Branch]:
        if self.branches is not None:
            return self.branches
        return canonical_branches(self.theta)

    @property
    def jtau(self) -> float:
        return jtau_for_strength(self.g)

    def with_control_post(self, ket: Ket) -> "ProtocolConfig":
        return replace(self, control_post=ket)

    def describe(self) -> Dict[str, object]:
        """Plain summary used in failure reports"""
        b0, b1 = self.resolved_branches
        return {
            "g": self.g,
            "theta": self.theta,
            "alpha": self.alpha,
            "beta": self.beta,
            "branch0": (b0.axis_a.n, b0.axis_b.n),
            "branch1": (b1.axis_a.n, b1.axis_b.n),
            "input_a": tuple(self.input_a.amp),
            "input_b": tuple(self.input_b.amp),
            "control_post": tuple(self.control_post.amp),
        }


@dataclass(frozen=True, eq=False)
class SectorResult:
    """Unnormalized conditional state of one readout sector"""

    i: int
    j: int
    psi: Ket
    weight: float

    def __post_init__(self):
        if self.weight < -tolerances.degenerate_weight:
            raise ParameterError(f"sector weight cannot be negative, got {self.weight}")
        if abs(self.weight - self.psi.weight()) > tolerances.trace:
            raise ParameterError("sector weight must equal the squared norm of its state")

    @property
    def name(self) -> str:
        return sector_name(self.i, self.j)

    @property
    def is_degenerate(self) -> bool:
        return self.weight <= tolerances.degenerate_weight


def complement_state(ket: Ket) -> Ket:
    """The one-qubit state orthogonal to `ket`"""
    if len(ket.labels) != 1:
        raise LabelError(f"complement_state needs a single qubit, got {ket.labels}")
    c0, c1 = ket.amp
    return Ket(ket.labels, np.array([-np.conj(c1), np.conj(c0)]))


def branch_amplitudes(cfg: ProtocolConfig) -> Tuple[complex, complex]:
    """(alpha <post|0>, beta <post|1>)"""
    post = cfg.control_post.amp
    return cfg.alpha * np.conj(post[0]), cfg.beta * np.conj(post[1])


def _sector(i: int, j: int, amp: np.ndarray) -> SectorResult:
    psi = Ket(SYSTEM_LABELS, amp)
    return SectorResult(i, j, psi, psi.weight())


def conditional_states_kraus(cfg: ProtocolConfig) -> Tuple[SectorResult, ...]:
    """|psi_ij> = alpha' (K_i (x) K_j)|phi_A phi_B> + beta' (M_i (x) M_j)|phi_A phi_B>"""
    branch0, branch1 = cfg.resolved_branches
    k_a, k_b = kraus_pair(cfg.g, branch0.axis_a, "A"), kraus_pair(cfg.g, branch0.axis_b, "B")
    m_a, m_b = kraus_pair(cfg.g, branch1.axis_a, "A"), kraus_pair(cfg.g, branch1.axis_b, "B")
    alpha_p, beta_p = branch_amplitudes(cfg)
    psi_in = tensor(cfg.input_a, cfg.input_b)

    sectors = []
    for i, j in SECTORS:
        first = apply(tensor(k_a[i], k_b[j]), psi_in)
        second = apply(tensor(m_a[i], m_b[j]), psi_in)
        sectors.append(_sector(i, j, alpha_p * first.amp + beta_p * second.amp))
    return tuple(sectors)


def _dilated_output(cfg: ProtocolConfig) -> Ket:
    branch0, branch1 = cfg.resolved_branches
    u = total_unitary(branch0, branch1, cfg.jtau)
    control_in = Ket(("C",), np.array([cfg.alpha, cfg.beta]))
    psi_in = reorder(
        tensor(control_in, cfg.input_a, cfg.input_b, basis_ket("D_A", 0), basis_ket("D_B", 0)),
        LABEL_ORDER,
    )
    return Ket(LABEL_ORDER, u.m @ psi_in.amp)


def conditional_states_dilation(cfg: ProtocolConfig) -> Tuple[SectorResult, ...]:
    """Same sectors obtained by running U_tot and projecting control and detectors"""
    out = _dilated_output(cfg).amp.reshape((2,) * len(LABEL_ORDER))
    projected = np.tensordot(cfg.control_post.amp.conj(), out, axes=(0, 0))

    sectors = []
    for i, j in SECTORS:
        amp = projected[:, :, readout_bit(i), readout_bit(j)].reshape(-1)
        sectors.append(_sector(i, j, amp))
    return tuple(sectors)


def control_traced_state(cfg: ProtocolConfig) -> Op:
    """Reduced (A, B) state when control and detectors are discarded"""
    rho = _dilated_output(cfg).dm()
    return partial_trace(rho, SYSTEM_LABELS).normalized()


def postselection_probability(sectors: Sequence[SectorResult]) -> float:
    return float(sum(s.weight for s in sectors))


def averaged_state(sectors: Sequence[SectorResult]) -> Op:
    """Readout-averaged, normalized density sum_ij |psi_ij><psi_ij| / sum_ij P_ij"""
    total = postselection_probability(sectors)
    if total <= tolerances.degenerate_weight:
        raise DegeneratePostselectionError(total)
    labels = sectors[0].psi.labels
    m = sum(np.outer(s.psi.amp, s.psi.amp.conj()) for s in sectors) / total
    return Op(labels, m, density=True, weight=1.0)


def sector_weight_closed(g: float, theta: float, j: int) -> float:
    """P_jj = (1 + j g)(1 - sqrt(1 - g^2)) sin^2(theta) / 16"""
    g, theta = check_strength(g), check_theta(theta)
    return float((1.0 + j * g) * (1.0 - np.sqrt(1.0 - g * g)) * np.sin(theta) ** 2 / 16.0)


def p_bell(g: float, theta: float) -> float:
    """Total probability of a Bell-state outcome, P_++ + P_--"""
    g, theta = check_strength(g), check_theta(theta)
    return float((1.0 - np.sqrt(1.0 - g * g)) * np.sin(theta) ** 2 / 8.0)
