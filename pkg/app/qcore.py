"""Dense complex linear algebra over labelled qubits

Every state and operator carries an ordered tuple of qubit labels; the
matrix index is big-endian over that order. Across the package the global
order is LABEL_ORDER = (C, A, B, D_A, D_B).
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from app.config import tolerances
from app.errors import (
    LabelError,
    NotHermitianError,
    NotNormalizedError,
    NotPSDError,
    NotDensityError,
    ShapeError,
)

logger = logging.getLogger(__name__)

LABEL_ORDER: Tuple[str, ...] = ("C", "A", "B", "D_A", "D_B")
MAX_QUBITS = len(LABEL_ORDER)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

_BELL_AMPLITUDES = {
    "phi+": (1, 0, 0, 1),
    "phi-": (1, 0, 0, -1),
    "psi+": (0, 1, 1, 0),
    "psi-": (0, 1, -1, 0),
}


def _check_labels(labels: Iterable[str]) -> Tuple[str, ...]:
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise LabelError(f"duplicate qubit label in {labels}")
    if len(labels) > MAX_QUBITS:
        raise LabelError(f"at most {MAX_QUBITS} qubits are supported, got {len(labels)}")
    return labels


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Ket:
    """State vector over ordered qubit labels (may be unnormalized)"""

    labels: Tuple[str, ...]
    amp: np.ndarray

    def __post_init__(self):
        labels = _check_labels(self.labels)
        amp = _frozen(self.amp).reshape(-1)
        if amp.shape != (2 ** len(labels),):
            raise ShapeError(f"ket over {labels} needs {2 ** len(labels)} amplitudes, got {amp.size}")
        if np.isnan(amp).any():
            raise ShapeError("ket amplitudes contain NaN")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amp", amp)

    @property
    def dim(self) -> int:
        return self.amp.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def weight(self) -> float:
        """Squared norm <k|k>"""
        return float(np.vdot(self.amp, self.amp).real)

    def is_normalized(self) -> bool:
        return abs(self.norm() - 1.0) <= tolerances.norm

    def require_normalized(self, what: str = "state") -> "Ket":
        if not self.is_normalized():
            raise NotNormalizedError(f"{what} must be normalized (norm {self.norm():.15g})")
        return self

    def normalized(self) -> "Ket":
        norm = self.norm()
        if norm == 0.0:
            raise NotNormalizedError("cannot normalize the zero vector")
        return Ket(self.labels, self.amp / norm)

    def inner(self, other: "Ket") -> complex:
        """<self|other> (labels must match exactly)"""
        if other.labels != self.labels:
            raise LabelError(f"label mismatch: {self.labels} vs {other.labels}")
        return complex(np.vdot(self.amp, other.amp))

    def scaled(self, factor: complex) -> "Ket":
        return Ket(self.labels, factor * self.amp)

    def __add__(self, other: "Ket") -> "Ket":
        if other.labels != self.labels:
            raise LabelError(f"label mismatch: {self.labels} vs {other.labels}")
        return Ket(self.labels, self.amp + other.amp)

    def dm(self) -> "Op":
        """Projector |k><k| flagged as a density with weight <k|k>"""
        return Op(self.labels, np.outer(self.amp, self.amp.conj()), density=True, weight=self.weight())


@dataclass(frozen=True, eq=False)
class Op:
    """Square operator over ordered qubit labels

    A value flagged `density` is validated on construction: Hermitian,
    positive semidefinite and with trace equal to its stored weight.
    """

    labels: Tuple[str, ...]
    m: np.ndarray
    density: bool = False
    weight: Optional[float] = None

    def __post_init__(self):
        labels = _check_labels(self.labels)
        m = _frozen(self.m)
        side = 2 ** len(labels)
        if m.shape != (side, side):
            raise ShapeError(f"operator over {labels} needs shape ({side}, {side}), got {m.shape}")
        if np.isnan(m).any():
            raise ShapeError("operator entries contain NaN")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "m", m)
        if self.density:
            object.__setattr__(self, "weight", self._validated_weight())

    def _validated_weight(self) -> float:
        deviation = hermitian_deviation(self.m)
        if deviation > tolerances.hermitian:
            raise NotDensityError(f"density is not Hermitian (deviation {deviation:.3e})")
        lowest = float(np.linalg.eigvalsh(self.m).min()) if self.m.size else 0.0
        if lowest < -tolerances.psd_clamp:
            raise NotDensityError(f"density is not PSD (eigenvalue {lowest:.3e})")
        trace = float(np.trace(self.m).real)
        if self.weight is None:
            return trace
        if abs(trace - self.weight) > tolerances.trace:
            raise NotDensityError(f"density trace {trace:.15g} differs from weight {self.weight:.15g}")
        return float(self.weight)

    @property
    def dim(self) -> int:
        return self.m.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.m))

    def dag(self) -> "Op":
        return Op(self.labels, self.m.conj().T)

    def normalized(self) -> "Op":
        """Unit-trace density with the same shape"""
        trace = self.trace().real
        if trace <= 0.0:
            raise NotDensityError(f"cannot normalize an operator with trace {trace:.3e}")
        return Op(self.labels, self.m / trace, density=True, weight=1.0)

    def is_unitary(self, tol: Optional[float] = None) -> bool:
        tol = tolerances.unitary if tol is None else tol
        return max_abs_diff(self.m.conj().T @ self.m, np.eye(self.dim)) <= tol

    def _same_labels(self, other: "Op") -> None:
        if other.labels != self.labels:
            raise LabelError(f"label mismatch: {self.labels} vs {other.labels}")

    def __add__(self, other: "Op") -> "Op":
        self._same_labels(other)
        return Op(self.labels, self.m + other.m)

    def __sub__(self, other: "Op") -> "Op":
        self._same_labels(other)
        return Op(self.labels, self.m - other.m)

    def __matmul__(self, other: "Op") -> "Op":
        self._same_labels(other)
        return Op(self.labels, self.m @ other.m)

    def scaled(self, factor: complex) -> "Op":
        return Op(self.labels, factor * self.m)


State = Union[Ket, Op]


def hermitian_deviation(m: np.ndarray) -> float:
    """max |M - M^H|"""
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def fidelity(u: Ket, v: Ket) -> float:
    """|<u|v>|^2 / (<u|u> <v|v>), insensitive to norm and global phase"""
    scale = u.weight() * v.weight()
    if scale == 0.0:
        raise NotNormalizedError("fidelity is undefined for a zero vector")
    return float(abs(u.inner(v)) ** 2 / scale)


def max_abs_diff(a, b) -> float:
    """Max-norm distance between two Kets, Ops or arrays"""
    left = a.amp if isinstance(a, Ket) else a.m if isinstance(a, Op) else np.asarray(a)
    right = b.amp if isinstance(b, Ket) else b.m if isinstance(b, Op) else np.asarray(b)
    if left.shape != right.shape:
        raise ShapeError(f"shape mismatch: {left.shape} vs {right.shape}")
    if left.size == 0:
        return 0.0
    return float(np.max(np.abs(left - right)))


# Constructors

def basis_ket(label: str, bit: int) -> Ket:
    if bit not in (0, 1):
        raise ShapeError(f"basis bit must be 0 or 1, got {bit}")
    amp = np.zeros(2, dtype=complex)
    amp[bit] = 1.0
    return Ket((label,), amp)


def plus_ket(label: str) -> Ket:
    return Ket((label,), np.array([1.0, 1.0]) / np.sqrt(2.0))


def minus_ket(label: str) -> Ket:
    return Ket((label,), np.array([1.0, -1.0]) / np.sqrt(2.0))


def bell_ket(name: str, labels: Sequence[str] = ("A", "B")) -> Ket:
    """One of phi+, phi-, psi+, psi-"""
    try:
        amp = np.array(_BELL_AMPLITUDES[name], dtype=complex) / np.sqrt(2.0)
    except KeyError:
        raise ShapeError(f"unknown Bell state {name!r}") from None
    return Ket(tuple(labels), amp)


def identity(labels: Sequence[str]) -> Op:
    labels = _check_labels(labels)
    return Op(labels, np.eye(2 ** len(labels)))


def pauli(label: str, which: str) -> Op:
    matrices = {"i": PAULI_I, "x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}
    return Op((label,), matrices[which])


# Label plumbing

def _permutation(current: Tuple[str, ...], target: Tuple[str, ...]) -> list:
    if len(target) != len(current) or set(target) != set(current):
        raise LabelError(f"{target} is not a permutation of {current}")
    return [current.index(label) for label in target]


def reorder(x: State, labels: Sequence[str]) -> State:
    """Permute the tensor factors of a Ket or Op into `labels` order"""
    labels = _check_labels(labels)
    if labels == x.labels:
        return x
    perm = _permutation(x.labels, labels)
    n = len(labels)
    if isinstance(x, Ket):
        amp = x.amp.reshape((2,) * n).transpose(perm).reshape(-1)
        return Ket(labels, amp)
    axes = perm + [p + n for p in perm]
    m = x.m.reshape((2,) * (2 * n)).transpose(axes).reshape(2 ** n, 2 ** n)
    return Op(labels, m, density=x.density, weight=x.weight)


def tensor(first: State, second: State, *rest: State) -> State:
    """Kronecker product with concatenated label order"""
    factors = (first, second) + rest
    if all(isinstance(f, Ket) for f in factors):
        labels = _check_labels(label for f in factors for label in f.labels)
        return Ket(labels, reduce(np.kron, (f.amp for f in factors)))
    if all(isinstance(f, Op) for f in factors):
        labels = _check_labels(label for f in factors for label in f.labels)
        m = reduce(np.kron, (f.m for f in factors))
        if all(f.density for f in factors):
            weight = float(np.prod([f.weight for f in factors]))
            return Op(labels, m, density=True, weight=weight)
        return Op(labels, m)
    raise ShapeError("tensor factors must be all kets or all operators")


def embed(op: Op, labels: Sequence[str]) -> Op:
    """Extend `op` by identities to act on `labels`, in that order"""
    labels = _check_labels(labels)
    missing = [label for label in op.labels if label not in labels]
    if missing:
        raise LabelError(f"operator labels {missing} are not in {labels}")
    extra = tuple(label for label in labels if label not in op.labels)
    full = tensor(op, identity(extra)) if extra else op
    return reorder(full, labels)


def apply(op: Op, ket: Ket) -> Ket:
    """op|ket>, embedding `op` into the ket's labels"""
    full = embed(op, ket.labels)
    return Ket(ket.labels, full.m @ ket.amp)


def partial_trace(rho: Op, keep: Iterable[str]) -> Op:
    """Trace out every label not in `keep`; kept labels stay in rho's order"""
    keep = set(keep)
    if not keep <= set(rho.labels):
        raise LabelError(f"keep {sorted(keep)} is not a subset of {rho.labels}")
    kept = tuple(label for label in rho.labels if label in keep)
    traced = tuple(label for label in rho.labels if label not in keep)
    if not traced:
        return rho
    ordered = reorder(rho, kept + traced)
    dk, dt = 2 ** len(kept), 2 ** len(traced)
    m = np.einsum("ijkj->ik", ordered.m.reshape(dk, dt, dk, dt))
    return Op(kept, m, density=rho.density, weight=rho.weight)


# Spectral tools

def herm_eig(h: Union[Op, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvector columns"""
    m = h.m if isinstance(h, Op) else np.asarray(h, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"herm_eig needs a square matrix, got shape {m.shape}")
    deviation = hermitian_deviation(m)
    if deviation > tolerances.herm_eig_input:
        raise NotHermitianError(f"matrix is not Hermitian (deviation {deviation:.3e})")
    values, vectors = np.linalg.eigh(0.5 * (m + m.conj().T))
    return values[::-1].copy(), vectors[:, ::-1].copy()


def psd_sqrt(rho: Union[Op, np.ndarray]) -> Union[Op, np.ndarray]:
    """Principal square root of a positive semidefinite Hermitian matrix"""
    values, vectors = herm_eig(rho)
    lowest = float(values.min()) if values.size else 0.0
    if lowest < -tolerances.not_psd:
        raise NotPSDError(f"not PSD: eigenvalue {lowest:.3e}")
    if lowest < -tolerances.psd_clamp:
        logger.debug(f"Clamping eigenvalue {lowest:.3e} to zero")
    clipped = np.clip(values, 0.0, None)
    clipped[clipped <= tolerances.eigen_floor] = 0.0
    root = (vectors * np.sqrt(clipped)) @ vectors.conj().T
    if isinstance(rho, Op):
        return Op(rho.labels, root)
    return root


# Sampling helpers for randomized checks

def random_ket(labels: Sequence[str], rng: np.random.Generator) -> Ket:
    labels = _check_labels(labels)
    dim = 2 ** len(labels)
    amp = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return Ket(labels, amp / np.linalg.norm(amp))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (raw + raw.conj().T)


def random_density(labels: Sequence[str], rng: np.random.Generator, rank: Optional[int] = None) -> Op:
    """Unit-trace density drawn from the induced (Ginibre) measure"""
    labels = _check_labels(labels)
    dim = 2 ** len(labels)
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return Op(labels, m / np.trace(m).real, density=True, weight=1.0)
