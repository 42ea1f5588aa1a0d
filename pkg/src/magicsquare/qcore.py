"""Dense statevector and unitary engine for small qubit registers.

Qubit 0 is the leftmost label of a ket and the most significant bit of the
basis index, so ``|q0 q1 ... q(n-1)>`` has index ``q0*2**(n-1) + ... + q(n-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

MAX_QUBITS = 8
UNITARY_TOL = 1e-10
NORM_TOL = 1e-12
EQUALITY_TOL = 1e-9


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def _qubits_for(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of ``n_qubits`` qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        _qubits_for(amps.size)
        if not np.all(np.isfinite(amps)):
            raise ValueError("state amplitudes must be finite")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state from a bit string such as ``"0110"``."""
        amps = np.zeros(1 << len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


@dataclass(frozen=True, eq=False)
class GateMatrix:
    """Unitary acting on ``n_qubits`` qubits.

    Unitarity is checked on construction unless ``check=False`` is passed,
    which is reserved for deliberately broken matrices in tests.
    """

    entries: np.ndarray
    check: bool = True

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"gate matrix must be square, got shape {m.shape}")
        _qubits_for(m.shape[0])
        if not np.all(np.isfinite(m)):
            raise ValueError("gate entries must be finite")
        if self.check:
            err = np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))
            if err > UNITARY_TOL:
                raise ValueError(f"matrix is not unitary (max deviation {err:.3e})")
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def n_qubits(self) -> int:
        return self.entries.shape[0].bit_length() - 1

    @property
    def dagger(self) -> "GateMatrix":
        return GateMatrix(self.entries.conj().T, check=self.check)

    def __matmul__(self, other: "GateMatrix") -> "GateMatrix":
        if not isinstance(other, GateMatrix):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot multiply gates of different sizes")
        return GateMatrix(self.entries @ other.entries, check=self.check and other.check)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class ProbabilityTable:
    """Measurement distribution over ``kept_qubits``.

    Keys of ``probabilities`` are bit strings ordered like ``kept_qubits``.
    Every pattern is present, including those with zero probability.
    """

    kept_qubits: tuple[int, ...]
    probabilities: dict[str, float]

    def __getitem__(self, pattern: str) -> float:
        return self.probabilities[pattern]

    def nonzero(self, tol: float = 1e-12) -> dict[str, float]:
        return {k: p for k, p in self.probabilities.items() if p > tol}

    def as_array(self) -> np.ndarray:
        """Probabilities indexed by the integer value of the pattern."""
        return np.array([self.probabilities[k] for k in sorted(self.probabilities)])


Operand = Union[GateMatrix, StateVector]


def tensor_product(a: Operand, b: Operand) -> Operand:
    """Kronecker product; ``a`` supplies the more significant qubits."""
    if isinstance(a, GateMatrix) and isinstance(b, GateMatrix):
        return GateMatrix(np.kron(a.entries, b.entries), check=a.check and b.check)
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes))
    raise TypeError("tensor_product needs two gates or two states")


def _check_targets(targets: Sequence[int], n: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubits {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise IndexError(f"qubit index {t} out of range for {n} qubits")
    return targets


def apply_matrix(amplitudes: np.ndarray, matrix: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Raw kernel behind :func:`embed_apply`; no validation, returns a new array.

    ``amplitudes`` may carry trailing batch axes, e.g. the columns of a unitary.
    """
    n = amplitudes.shape[0].bit_length() - 1
    k = len(targets)
    psi = amplitudes.reshape((2,) * n + amplitudes.shape[1:])
    psi = np.moveaxis(psi, targets, range(k))
    shape = psi.shape
    psi = (matrix @ psi.reshape(1 << k, -1)).reshape(shape)
    return np.moveaxis(psi, range(k), targets).reshape(amplitudes.shape)


def embed_apply(state: StateVector, gate: GateMatrix, targets: Sequence[int]) -> StateVector:
    """Apply ``gate`` to the listed qubits of ``state``.

    ``targets[i]`` receives the i-th (most significant first) qubit of the
    gate, so a CNOT on targets ``(3, 1)`` uses qubit 3 as control.
    """
    targets = _check_targets(targets, state.n_qubits)
    if gate.n_qubits != len(targets):
        raise ValueError(
            f"{gate.n_qubits}-qubit gate given {len(targets)} targets"
        )
    return StateVector(apply_matrix(state.amplitudes, gate.entries, targets))


def marginal_distribution(state: StateVector, keep: Iterable[int]) -> ProbabilityTable:
    """Computational-basis distribution of the ``keep`` qubits, others summed out."""
    n = state.n_qubits
    keep = _check_targets(list(keep), n)
    if not keep:
        raise ValueError("keep must name at least one qubit")
    probs = (np.abs(state.amplitudes) ** 2).reshape((2,) * n)
    traced = tuple(q for q in range(n) if q not in keep)
    probs = probs.sum(axis=traced)
    # summed array keeps the remaining axes in ascending qubit order
    order = [sorted(keep).index(q) for q in keep]
    probs = np.transpose(probs, order).reshape(-1)
    width = len(keep)
    table = {format(i, f"0{width}b"): float(p) for i, p in enumerate(probs)}
    return ProbabilityTable(keep, table)


def equal_up_to_global_phase(
    u: GateMatrix | np.ndarray,
    v: GateMatrix | np.ndarray,
    tol: float = EQUALITY_TOL,
) -> tuple[bool, complex]:
    """Test ``u == c * v`` for some unit-modulus ``c``.

    Returns ``(equal, c)``. The phase is read off the largest-modulus entry of
    ``v``, which avoids dividing by entries near zero.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch {u.shape} vs {v.shape}")
    idx = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    ratio = u[idx] / v[idx]
    if ratio == 0:
        return False, 1.0 + 0j
    c = complex(ratio / abs(ratio))
    return bool(np.max(np.abs(u - c * v)) <= tol), c
