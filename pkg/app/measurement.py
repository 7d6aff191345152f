"""Generalized single-qubit measurements: projectors, Kraus pairs, Born rule"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from app.config import tolerances
from app.errors import LabelError, ParameterError
from app.qcore import PAULIS, Ket, Op, tensor

logger = logging.getLogger(__name__)

# Readout i = +1 is detector bit 0, i = -1 is detector bit 1
READOUTS: Tuple[int, int] = (+1, -1)
SECTORS: Tuple[Tuple[int, int], ...] = ((+1, +1), (+1, -1), (-1, +1), (-1, -1))


def readout_bit(sign: int) -> int:
    """Detector computational outcome for readout sign"""
    if sign not in READOUTS:
        raise ParameterError(f"readout must be +1 or -1, got {sign}")
    return 0 if sign == +1 else 1


def sector_name(i: int, j: int) -> str:
    return f"{'p' if i > 0 else 'm'}{'p' if j > 0 else 'm'}"


@dataclass(frozen=True)
class MeasurementAxis:
    """Unit 3-vector n defining sigma_n = n . sigma"""

    n: Tuple[float, float, float]

    def __post_init__(self):
        n = tuple(float(c) for c in self.n)
        if len(n) != 3:
            raise ParameterError(f"axis needs 3 components, got {len(n)}")
        norm = float(np.linalg.norm(n))
        if abs(norm - 1.0) > tolerances.axis_norm:
            raise ParameterError(f"axis must be a unit vector (norm {norm:.15g})")
        object.__setattr__(self, "n", n)

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "MeasurementAxis":
        v = np.asarray(vector, dtype=float)
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise ParameterError("cannot build an axis from the zero vector")
        return cls(tuple(v / norm))

    @classmethod
    def from_angles(cls, polar: float, azimuth: float) -> "MeasurementAxis":
        return cls.from_vector((
            np.sin(polar) * np.cos(azimuth),
            np.sin(polar) * np.sin(azimuth),
            np.cos(polar),
        ))

    def __neg__(self) -> "MeasurementAxis":
        return MeasurementAxis(tuple(-c for c in self.n))

    def as_array(self) -> np.ndarray:
        return np.array(self.n)

    def sigma(self) -> np.ndarray:
        """n . sigma as a 2x2 matrix"""
        return sum(c * p for c, p in zip(self.n, PAULIS))


X_AXIS = MeasurementAxis((1.0, 0.0, 0.0))
Y_AXIS = MeasurementAxis((0.0, 1.0, 0.0))
Z_AXIS = MeasurementAxis((0.0, 0.0, 1.0))


@dataclass(frozen=True)
class Branch:
    """Measurement axes used on A and on B by one control branch"""

    axis_a: MeasurementAxis
    axis_b: MeasurementAxis


def projector(axis: MeasurementAxis, sign: int, label: str = "A") -> Op:
    """Projector onto the sigma_n eigenstate with eigenvalue `sign`"""
    if sign not in READOUTS:
        raise ParameterError(f"projector sign must be +1 or -1, got {sign}")
    return Op((label,), 0.5 * (np.eye(2) + sign * axis.sigma()))


def strength_coefficients(g: float) -> Tuple[float, float]:
    """a = sqrt((1+g)/2), b = sqrt((1-g)/2)"""
    g = check_strength(g)
    return float(np.sqrt((1.0 + g) / 2.0)), float(np.sqrt((1.0 - g) / 2.0))


def check_strength(g: float) -> float:
    """Validate g in [0, 1], snapping round-off at the ends"""
    g = float(g)
    if not -tolerances.parameter <= g <= 1.0 + tolerances.parameter:
        raise ParameterError(f"measurement strength g must lie in [0, 1], got {g}")
    return min(max(g, 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class KrausPair:
    """L_+(g, n), L_-(g, n) on one qubit"""

    g: float
    axis: MeasurementAxis
    l_plus: Op
    l_minus: Op

    def __getitem__(self, sign: int) -> Op:
        if sign == +1:
            return self.l_plus
        if sign == -1:
            return self.l_minus
        raise ParameterError(f"readout must be +1 or -1, got {sign}")

    def completeness_error(self) -> float:
        total = self.l_plus.m.conj().T @ self.l_plus.m + self.l_minus.m.conj().T @ self.l_minus.m
        return float(np.max(np.abs(total - np.eye(2))))


def kraus_pair(g: float, axis: MeasurementAxis, label: str = "A") -> KrausPair:
    """L_pm = a Pi_pm + b Pi_mp"""
    a, b = strength_coefficients(g)
    pi_plus = projector(axis, +1, label)
    pi_minus = projector(axis, -1, label)
    l_plus = Op((label,), a * pi_plus.m + b * pi_minus.m)
    l_minus = Op((label,), a * pi_minus.m + b * pi_plus.m)
    return KrausPair(check_strength(g), axis, l_plus, l_minus)


def born_prob(phi: Ket, k: Op) -> float:
    """<phi|K^H K|phi> for a normalized one-qubit input"""
    phi.require_normalized("born_prob input")
    if k.labels != phi.labels:
        raise LabelError(f"Kraus labels {k.labels} do not match state labels {phi.labels}")
    out = k.m @ phi.amp
    return float(np.vdot(out, out).real)


def joint_prob(phi_a: Ket, phi_b: Ket, k_a: Op, k_b: Op) -> float:
    """p_ij for a product input under product Kraus operators"""
    phi_a.require_normalized("joint_prob input")
    phi_b.require_normalized("joint_prob input")
    psi = tensor(phi_a, phi_b)
    k = tensor(k_a, k_b)
    if k.labels != psi.labels:
        raise LabelError(f"Kraus labels {k.labels} do not match state labels {psi.labels}")
    out = k.m @ psi.amp
    return float(np.vdot(out, out).real)


def _vector(u: Union[Ket, np.ndarray]) -> np.ndarray:
    return u.amp if isinstance(u, Ket) else np.asarray(u, dtype=complex)


def colinearity(u: Union[Ket, np.ndarray], v: Union[Ket, np.ndarray]) -> float:
    """|u0 v1 - u1 v0| / (|u| |v|); 0 means colinear"""
    u, v = _vector(u), _vector(v)
    scale = float(np.linalg.norm(u) * np.linalg.norm(v))
    if scale == 0.0:
        return 0.0
    return float(abs(u[0] * v[1] - u[1] * v[0]) / scale)


def is_colinear(u: Union[Ket, np.ndarray], v: Union[Ket, np.ndarray]) -> bool:
    return colinearity(u, v) < tolerances.colinearity


def eigenstate(axis: MeasurementAxis, sign: int, label: str = "A") -> Ket:
    """Normalized sigma_n eigenstate with eigenvalue `sign`"""
    pi = projector(axis, sign, label).m
    column = pi[:, int(np.argmax(np.linalg.norm(pi, axis=0)))]
    return Ket((label,), column / np.linalg.norm(column))


def is_eigenstate(phi: Ket, axis: MeasurementAxis) -> bool:
    """True when phi lies (numerically) in one sigma_n eigenspace"""
    unit = phi.normalized()
    best = 0.0
    for sign in READOUTS:
        pi = projector(axis, sign, phi.labels[0])
        best = max(best, float(np.vdot(unit.amp, pi.m @ unit.amp).real))
    return best >= 1.0 - tolerances.eigenstate_overlap
