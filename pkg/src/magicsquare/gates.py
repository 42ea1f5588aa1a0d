"""One- and two-qubit gates, the players' decompositions, and the convention resolver.

Rotation matrices come in several sign conventions. :class:`Convention`
captures the three independent choices, and :func:`resolve_convention` picks
the one under which the stored decompositions multiply out to the players'
target matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .qcore import EQUALITY_TOL, GateMatrix, equal_up_to_global_phase

PI = np.pi
SQRT1_2 = 1 / np.sqrt(2)

ONE_QUBIT_TAGS = ("I", "H", "Rx", "Ry", "Rz")
TWO_QUBIT_TAGS = ("CNOT12", "CNOT21", "CZ", "CP", "SWAP")
ANGLE_TAGS = ("Rx", "Ry", "Rz", "CP")


@dataclass(frozen=True)
class GateKind:
    """A gate tag plus its angle in radians (``None`` for fixed gates)."""

    tag: str
    theta: float | None = None

    def __post_init__(self):
        if self.tag not in ONE_QUBIT_TAGS + TWO_QUBIT_TAGS:
            raise ValueError(f"unknown gate tag {self.tag!r}")
        if self.tag in ANGLE_TAGS:
            if self.theta is None or not np.isfinite(self.theta):
                raise ValueError(f"{self.tag} needs a finite angle")
        elif self.theta is not None:
            raise ValueError(f"{self.tag} takes no angle")

    @property
    def n_qubits(self) -> int:
        return 1 if self.tag in ONE_QUBIT_TAGS else 2

    def __str__(self):
        return self.tag if self.theta is None else f"{self.tag}({self.theta:.6g})"


IDENTITY = GateKind("I")
HAD = GateKind("H")
CNOT12 = GateKind("CNOT12")
CNOT21 = GateKind("CNOT21")
CZ = GateKind("CZ")
SWAP = GateKind("SWAP")


def Rx(theta: float) -> GateKind:
    return GateKind("Rx", float(theta))


def Ry(theta: float) -> GateKind:
    return GateKind("Ry", float(theta))


def Rz(theta: float) -> GateKind:
    return GateKind("Rz", float(theta))


def CP(theta: float) -> GateKind:
    return GateKind("CP", float(theta))


@dataclass(frozen=True)
class Convention:
    """Sign conventions for the three rotation gates.

    rx_sign: ``"+"`` puts ``+i sin(t/2)`` on the Rx off-diagonal, ``"-"`` the
        usual ``-i sin(t/2)``.
    ry_layout: ``"transposed"`` is ``[[c, s], [-s, c]]``; ``"standard"`` is
        ``[[c, -s], [s, c]]``.
    rz_sign: ``"+"`` gives ``diag(e^{it/2}, e^{-it/2})``, ``"-"`` the reverse.
    """

    rx_sign: str = "+"
    ry_layout: str = "transposed"
    rz_sign: str = "+"

    def __post_init__(self):
        if self.rx_sign not in "+-" or len(self.rx_sign) != 1:
            raise ValueError(f"rx_sign must be '+' or '-', got {self.rx_sign!r}")
        if self.ry_layout not in ("transposed", "standard"):
            raise ValueError(f"unknown ry_layout {self.ry_layout!r}")
        if self.rz_sign not in "+-" or len(self.rz_sign) != 1:
            raise ValueError(f"rz_sign must be '+' or '-', got {self.rz_sign!r}")

    def label(self) -> str:
        return f"rx{self.rx_sign}i/ry-{self.ry_layout}/rz{self.rz_sign}"

    def as_dict(self) -> dict[str, str]:
        return {"rx_sign": self.rx_sign, "ry_layout": self.ry_layout, "rz_sign": self.rz_sign}


ALL_CONVENTIONS = tuple(
    Convention(rx, ry, rz)
    for rx, ry, rz in itertools.product("+-", ("transposed", "standard"), "+-")
)

# Selected by resolve_convention; tests/test_gates.py pins this.
DEFAULT_CONVENTION = Convention("+", "transposed", "+")


def _matrix(kind: GateKind, conv: Convention) -> np.ndarray:
    t = kind.theta
    tag = kind.tag
    if tag == "I":
        return np.eye(2)
    if tag == "H":
        return SQRT1_2 * np.array([[1, 1], [1, -1]])
    if tag == "Rx":
        c, s = np.cos(t / 2), np.sin(t / 2)
        k = 1j if conv.rx_sign == "+" else -1j
        return np.array([[c, k * s], [k * s, c]])
    if tag == "Ry":
        c, s = np.cos(t / 2), np.sin(t / 2)
        if conv.ry_layout == "transposed":
            return np.array([[c, s], [-s, c]])
        return np.array([[c, -s], [s, c]])
    if tag == "Rz":
        e = np.exp(0.5j * t)
        if conv.rz_sign == "+":
            return np.diag([e, e.conjugate()])
        return np.diag([e.conjugate(), e])
    if tag == "CNOT12":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    if tag == "CNOT21":
        return np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])
    if tag == "CZ":
        return np.diag([1, 1, 1, -1])
    if tag == "CP":
        return np.diag([1, 1, 1, np.exp(1j * t)])
    if tag == "SWAP":
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    raise AssertionError(tag)


def make_gate(kind: GateKind, convention: Convention = DEFAULT_CONVENTION) -> GateMatrix:
    """Matrix of ``kind``; only the rotations depend on ``convention``.

    >>> make_gate(CP(np.pi)).entries.diagonal().real.round(12).tolist()
    [1.0, 1.0, 1.0, -1.0]
    """
    return GateMatrix(_matrix(kind, convention))


# ---------------------------------------------------------------------------
# Decompositions of the players' operations


class Factor(NamedTuple):
    """One factor of a decomposition.

    ``qubit`` is 1 or 2 for single-qubit rotations and ``None`` for the CNOTs.
    """

    kind: GateKind
    qubit: int | None = None


@dataclass(frozen=True)
class Decomposition:
    """``exp(i*phase)`` times a product of factors.

    ``factors`` is stored in written order: the last factor acts first.
    """

    phase: float
    factors: tuple[Factor, ...]

    def execution_order(self) -> tuple[Factor, ...]:
        return self.factors[::-1]

    def matrix(self, convention: Convention = DEFAULT_CONVENTION, *, with_phase: bool = True) -> np.ndarray:
        u = np.exp(1j * self.phase) * np.eye(4) if with_phase else np.eye(4, dtype=complex)
        for f in self.factors:
            m = _matrix(f.kind, convention)
            if f.qubit == 1:
                m = np.kron(m, np.eye(2))
            elif f.qubit == 2:
                m = np.kron(np.eye(2), m)
            u = u @ m
        return u

    def cnot_count(self) -> int:
        return sum(f.kind.tag in ("CNOT12", "CNOT21") for f in self.factors)


def _rot(tag: str, qubit: int, angle: float) -> Factor:
    return Factor(GateKind(tag, angle), qubit)


DECOMPOSITIONS: dict[tuple[str, int], Decomposition] = {
    ("A", 1): Decomposition(-7 * PI / 8, (
        _rot("Rz", 1, PI / 4), Factor(CNOT21), _rot("Rz", 2, 7 * PI / 4),
        _rot("Rx", 2, PI / 2), _rot("Rz", 1, 7 * PI / 4), Factor(CNOT21),
        _rot("Rz", 1, PI / 2), _rot("Ry", 1, PI), _rot("Rz", 2, 3 * PI / 2),
        _rot("Ry", 2, PI),
    )),
    ("A", 2): Decomposition(0.0, (
        _rot("Ry", 1, PI / 2), _rot("Rz", 2, PI), Factor(CNOT12),
        _rot("Rz", 1, PI / 2), _rot("Ry", 1, PI), _rot("Rz", 2, PI),
        _rot("Ry", 2, PI / 2), _rot("Rz", 2, 3 * PI / 2),
    )),
    ("A", 3): Decomposition(0.0, (
        _rot("Rz", 1, PI), _rot("Ry", 1, PI / 2), Factor(CNOT12),
        _rot("Ry", 1, PI / 2), _rot("Rz", 1, PI), _rot("Ry", 2, PI),
    )),
    ("B", 1): Decomposition(7 * PI / 8, (
        _rot("Rx", 2, 3 * PI / 2), _rot("Ry", 2, 3 * PI / 4), Factor(CNOT12),
        _rot("Rz", 1, PI / 4), _rot("Ry", 1, 3 * PI / 2), _rot("Ry", 2, 3 * PI / 2),
        Factor(CNOT12), _rot("Rz", 1, 2 * PI), _rot("Rz", 2, 3 * PI / 2),
        _rot("Ry", 2, PI),
    )),
    ("B", 2): Decomposition(PI, (
        _rot("Ry", 1, PI / 2), _rot("Ry", 2, PI / 2), _rot("Rz", 2, 3 * PI / 2),
        Factor(CNOT12), _rot("Rz", 1, 3 * PI / 2), _rot("Rz", 2, PI),
    )),
    ("B", 3): Decomposition(0.0, (
        _rot("Ry", 1, PI / 2), _rot("Rz", 2, PI), _rot("Ry", 2, PI), Factor(CNOT12),
        _rot("Ry", 1, PI / 2), _rot("Rz", 1, PI), _rot("Ry", 2, PI / 2),
    )),
}


# ---------------------------------------------------------------------------
# Convention resolution


@dataclass(frozen=True)
class DecompositionCheck:
    passed: bool
    max_error: float
    phase: complex
    # product = D @ target with D diagonal: same computational-basis statistics
    diagonal_residual: bool


@dataclass
class ResolutionReport:
    """Outcome of trying every convention on every decomposition."""

    checks: dict[Convention, dict[tuple[str, int], DecompositionCheck]] = field(default_factory=dict)
    tol: float = EQUALITY_TOL

    @property
    def matches(self) -> list[Convention]:
        """Conventions under which every decomposition reproduces its target."""
        return [c for c, res in self.checks.items() if all(r.passed for r in res.values())]

    def score(self, convention: Convention) -> tuple[int, int]:
        res = self.checks[convention].values()
        return sum(r.passed for r in res), sum(r.passed or r.diagonal_residual for r in res)

    @property
    def best(self) -> Convention:
        # max() keeps the first of equal scores, i.e. enumeration order
        return max(self.checks, key=self.score)

    def failures(self, convention: Convention | None = None) -> list[tuple[str, int]]:
        convention = convention or self.best
        return [k for k, r in self.checks[convention].items() if not r.passed]

    def all_passed(self) -> bool:
        return bool(self.matches)


def _diagonal_residual(u: np.ndarray, target: np.ndarray, tol: float) -> bool:
    d = u @ target.conj().T
    off = d - np.diag(np.diag(d))
    return bool(np.max(np.abs(off)) <= tol)


def resolve_convention(
    decompositions: Mapping[tuple[str, int], Decomposition] = DECOMPOSITIONS,
    targets: Mapping[tuple[str, int], np.ndarray | GateMatrix] | None = None,
    tol: float = EQUALITY_TOL,
) -> ResolutionReport:
    """Multiply out every decomposition under all 8 conventions and compare.

    ``targets`` defaults to the players' operations from
    :func:`magicsquare.game.player_matrices`. A decomposition passes when its
    product (prefactor included) equals the target up to a global phase.
    """
    if targets is None:
        from .game import player_matrices

        targets = player_matrices()
    report = ResolutionReport(tol=tol)
    for conv in ALL_CONVENTIONS:
        row = {}
        for key, dec in decompositions.items():
            target = np.asarray(targets[key], dtype=complex)
            u = dec.matrix(conv)
            ok, phase = equal_up_to_global_phase(u, target, tol)
            row[key] = DecompositionCheck(
                passed=ok,
                max_error=float(np.max(np.abs(u - phase * target))),
                phase=phase,
                diagonal_residual=_diagonal_residual(u, target, tol),
            )
        report.checks[conv] = row
    return report
