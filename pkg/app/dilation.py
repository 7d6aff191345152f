"""Microscopic system-detector model

Each system qubit couples to its own detector qubit through
H = J Pi_+ (x) sigma_y + (pi/(2 tau) - J) Pi_- (x) sigma_y; the control
qubit selects which axis is used on A and on B. Reading the detectors in
the computational basis reproduces the Kraus pairs of app.measurement
with g = cos(2 J tau), which makes this module an independent check of
the Kraus-level protocol.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from app.config import tolerances
from app.errors import LabelError, NotUnitaryError, ParameterError
from app.measurement import Branch, MeasurementAxis, check_strength, projector
from app.qcore import LABEL_ORDER, PAULI_Y, Op, basis_ket, embed, max_abs_diff, reorder, tensor

logger = logging.getLogger(__name__)

JTAU_MAX = np.pi / 4
SYSTEM_DETECTOR = (("A", "D_A"), ("B", "D_B"))


@dataclass(frozen=True)
class DilationParams:
    """Coupling J, interaction time tau and measured axis"""

    J: float
    tau: float
    axis: MeasurementAxis

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ParameterError(f"interaction time must be positive, got {self.tau}")
        jtau = self.J * self.tau
        if not -tolerances.parameter <= jtau <= JTAU_MAX + tolerances.parameter:
            raise ParameterError(f"J*tau must lie in [0, pi/4], got {jtau}")

    @property
    def jtau(self) -> float:
        return min(max(self.J * self.tau, 0.0), JTAU_MAX)

    @property
    def strength(self) -> float:
        """g = cos(2 J tau)"""
        return float(np.cos(2.0 * self.jtau))

    @classmethod
    def from_jtau(cls, jtau: float, axis: MeasurementAxis, tau: float = 1.0) -> "DilationParams":
        return cls(J=jtau / tau, tau=tau, axis=axis)

    @classmethod
    def from_strength(cls, g: float, axis: MeasurementAxis, tau: float = 1.0) -> "DilationParams":
        return cls.from_jtau(jtau_for_strength(g), axis, tau)


def jtau_for_strength(g: float) -> float:
    """Inverse of g = cos(2 J tau) on [0, pi/4]"""
    return float(np.arccos(check_strength(g)) / 2.0)


def _rotation_y(angle: float) -> np.ndarray:
    """exp(-i angle sigma_y)"""
    return np.cos(angle) * np.eye(2) - 1j * np.sin(angle) * PAULI_Y


def hamiltonian_sd(p: DilationParams, system: str = "A", detector: str = "D_A") -> Op:
    """Conditional system-detector interaction H_SD(n)"""
    pi_plus = projector(p.axis, +1, system).m
    pi_minus = projector(p.axis, -1, system).m
    m = p.J * np.kron(pi_plus, PAULI_Y) + (np.pi / (2.0 * p.tau) - p.J) * np.kron(pi_minus, PAULI_Y)
    return Op((system, detector), m)


def unitary_sd(p: DilationParams, system: str = "A", detector: str = "D_A") -> Op:
    """exp(-i H_SD tau) in its factorized form"""
    pi_plus = projector(p.axis, +1, system).m
    pi_minus = projector(p.axis, -1, system).m
    m = np.kron(pi_plus, _rotation_y(p.jtau)) + np.kron(pi_minus, _rotation_y(np.pi / 2.0 - p.jtau))
    return Op((system, detector), m)


def extract_kraus(u: Op) -> Tuple[Op, Op]:
    """K_+ = <0|U|0>_D, K_- = <1|U|0>_D for U on (system, detector)"""
    if len(u.labels) != 2:
        raise LabelError(f"extract_kraus expects (system, detector) labels, got {u.labels}")
    if not u.is_unitary():
        raise NotUnitaryError("extract_kraus needs a unitary system-detector operator")
    system = u.labels[0]
    blocks = u.m.reshape(2, 2, 2, 2)
    k_plus = Op((system,), blocks[:, 0, :, 0])
    k_minus = Op((system,), blocks[:, 1, :, 0])
    return k_plus, k_minus


def _branch_jtaus(jtau: Union[float, Tuple[float, float]]) -> Tuple[float, float]:
    if isinstance(jtau, (tuple, list)):
        return float(jtau[0]), float(jtau[1])
    return float(jtau), float(jtau)


def _control_projector(bit: int) -> Op:
    ket = basis_ket("C", bit)
    return Op(("C",), np.outer(ket.amp, ket.amp.conj()))


def total_unitary(
    branch0: Branch,
    branch1: Branch,
    jtau: Union[float, Tuple[float, float]],
    tau: float = 1.0,
) -> Op:
    """Controlled evolution on (C, A, B, D_A, D_B)"""
    total: Optional[Op] = None
    for bit, (branch, branch_jtau) in enumerate(zip((branch0, branch1), _branch_jtaus(jtau))):
        u_a = unitary_sd(DilationParams.from_jtau(branch_jtau, branch.axis_a, tau), "A", "D_A")
        u_b = unitary_sd(DilationParams.from_jtau(branch_jtau, branch.axis_b, tau), "B", "D_B")
        term = reorder(tensor(_control_projector(bit), u_a, u_b), LABEL_ORDER)
        total = term if total is None else total + term
    logger.debug(f"Assembled controlled unitary for J*tau={jtau}")
    return total


def control_sector_terms(
    branch0: Branch,
    branch1: Branch,
    jtau: Union[float, Tuple[float, float]],
    tau: float = 1.0,
) -> Tuple[Op, Op]:
    """|b><b|_C (x) (H_A + H_B) for b = 0, 1"""
    local_labels = ("A", "D_A", "B", "D_B")
    terms = []
    for bit, (branch, branch_jtau) in enumerate(zip((branch0, branch1), _branch_jtaus(jtau))):
        h_a = hamiltonian_sd(DilationParams.from_jtau(branch_jtau, branch.axis_a, tau), "A", "D_A")
        h_b = hamiltonian_sd(DilationParams.from_jtau(branch_jtau, branch.axis_b, tau), "B", "D_B")
        local = embed(h_a, local_labels) + embed(h_b, local_labels)
        terms.append(reorder(tensor(_control_projector(bit), local), LABEL_ORDER))
    return terms[0], terms[1]


def total_hamiltonian(
    branch0: Branch,
    branch1: Branch,
    jtau: Union[float, Tuple[float, float]],
    tau: float = 1.0,
) -> Op:
    """H_tot; exp(-i H_tot tau) equals total_unitary"""
    term0, term1 = control_sector_terms(branch0, branch1, jtau, tau)
    return term0 + term1


def gauge_fixed(m: np.ndarray, index: Optional[Tuple[int, ...]] = None) -> np.ndarray:
    """Remove the global phase: entry at `index` (default: largest) becomes real positive"""
    m = np.asarray(m, dtype=complex)
    if index is None:
        index = np.unravel_index(np.argmax(np.abs(m)), m.shape)
    pivot = m[index]
    if abs(pivot) == 0.0:
        return m
    return m * (abs(pivot) / pivot)


def equal_up_to_phase(a, b, tol: float) -> bool:
    """Max-norm equality after fixing both gauges on a's largest entry"""
    left = a.m if isinstance(a, Op) else np.asarray(a, dtype=complex)
    right = b.m if isinstance(b, Op) else np.asarray(b, dtype=complex)
    index = np.unravel_index(np.argmax(np.abs(left)), left.shape)
    return max_abs_diff(gauge_fixed(left, index), gauge_fixed(right, index)) <= tol
