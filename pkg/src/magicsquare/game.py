"""Magic Square game: shared state, player circuits, parity completion, scoring.

Registers
---------
The logical register is ``(alice_1, alice_2, bob_1, bob_2)``. The extended
register interleaves one ancillary photon per player::

    0: alice_1   1: photon_A   2: alice_2   3: bob_1   4: photon_B   5: bob_2

Imperfect controlled-phase gates are modelled by swapping every CZ of the
extended circuits (SWAP expansions included) for ``CP(pi - theta)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .gates import (
    CNOT12,
    CNOT21,
    CZ,
    DECOMPOSITIONS,
    DEFAULT_CONVENTION,
    HAD,
    CP,
    Convention,
    Decomposition,
    Factor,
    GateKind,
    _matrix,
)
from .qcore import (
    GateMatrix,
    ProbabilityTable,
    StateVector,
    apply_matrix,
    embed_apply,
    marginal_distribution,
)

PLAYERS = ("A", "B")
LOGICAL_QUBITS = (0, 2, 3, 5)
ANCILLA_QUBITS = (1, 4)
EXTENDED_LAYOUT = ("alice_1", "photon_A", "alice_2", "bob_1", "photon_B", "bob_2")


@dataclass(frozen=True)
class RoundInput:
    """Row ``a`` for Alice and column ``b`` for Bob, both 1-based."""

    a: int
    b: int

    def __post_init__(self):
        for name, v in (("a", self.a), ("b", self.b)):
            if v not in (1, 2, 3):
                raise ValueError(f"{name} must be 1, 2 or 3, got {v!r}")


ALL_ROUNDS = tuple(RoundInput(a, b) for a in (1, 2, 3) for b in (1, 2, 3))


def _round(r: RoundInput | Sequence[int]) -> RoundInput:
    return r if isinstance(r, RoundInput) else RoundInput(*r)


def _player(player: str) -> str:
    p = player.strip().upper()[:1]
    if p not in PLAYERS:
        raise ValueError(f"unknown player {player!r}")
    return p


def check_theta(theta: float) -> float:
    theta = float(theta)
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    return theta


# ---------------------------------------------------------------------------
# States and target operations

_S2 = 1 / np.sqrt(2)

_PLAYER_MATRICES = {
    ("A", 1): _S2 * np.array([[1j, 0, 0, 1], [0, -1j, 1, 0], [0, 1j, 1, 0], [1, 0, 0, 1j]]),
    ("A", 2): 0.5 * np.array([[1j, 1, 1, 1j], [-1j, 1, -1, 1j], [1j, 1, -1, -1j], [-1j, 1, 1, -1j]]),
    ("A", 3): 0.5 * np.array([[-1, -1, -1, 1], [1, 1, -1, 1], [1, -1, 1, 1], [1, -1, -1, -1]]),
    ("B", 1): 0.5 * np.array([[1j, -1j, 1, 1], [-1j, -1j, 1, -1], [1, 1, -1j, 1j], [-1j, 1j, 1, 1]]),
    ("B", 2): 0.5 * np.array([[-1, 1j, 1, 1j], [1, 1j, 1, -1j], [1, -1j, 1, 1j], [-1, -1j, 1, -1j]]),
    ("B", 3): _S2 * np.array([[1, 0, 0, 1], [-1, 0, 0, 1], [0, 1, 1, 0], [0, 1, -1, 0]]),
}


def player_matrices() -> dict[tuple[str, int], GateMatrix]:
    """The six two-qubit operations, keyed ``("A", a)`` and ``("B", b)``."""
    return {k: GateMatrix(m) for k, m in _PLAYER_MATRICES.items()}


def initial_state() -> StateVector:
    """(|0011> + |1100> - |0110> - |1001>) / 2 on (alice_1, alice_2, bob_1, bob_2)."""
    amps = np.zeros(16, dtype=complex)
    for bits, sign in (("0011", 1), ("1100", 1), ("0110", -1), ("1001", -1)):
        amps[int(bits, 2)] = 0.5 * sign
    return StateVector(amps)


def extended_initial_state(photon_holds_logical: bool = False) -> StateVector:
    """Shared state on the 6-qubit extended register, photons in |0>.

    With ``photon_holds_logical`` the qubit that each player's opening SWAP
    would move onto the photon (Alice's first, Bob's second) starts there
    instead, and the vacated spin is |0>.
    """
    phi = initial_state().amplitudes
    amps = np.zeros(64, dtype=complex)
    for k in np.flatnonzero(phi):
        a1, a2, b1, b2 = (k >> 3) & 1, (k >> 2) & 1, (k >> 1) & 1, k & 1
        if photon_holds_logical:
            bits = (0, a1, a2, b1, b2, 0)
        else:
            bits = (a1, 0, a2, b1, 0, b2)
        amps[int("".join(map(str, bits)), 2)] = phi[k]
    return StateVector(amps)


# ---------------------------------------------------------------------------
# Circuits


@dataclass(frozen=True)
class Op:
    kind: GateKind
    targets: tuple[int, ...]


@dataclass(frozen=True)
class Circuit:
    """Gate list in execution order with a global phase ``exp(i*phase)``.

    ``cz_tags`` indexes the CZ ops that become ``CP(pi - theta)`` when the
    circuit is realized with imperfect gates.
    """

    n_qubits: int
    ops: tuple[Op, ...]
    phase: float = 0.0
    cz_tags: tuple[int, ...] = ()

    def __post_init__(self):
        for i in self.cz_tags:
            if self.ops[i].kind != CZ:
                raise ValueError(f"tagged op {i} is {self.ops[i].kind}, not CZ")
        for op in self.ops:
            if len(op.targets) != op.kind.n_qubits:
                raise ValueError(f"{op.kind} given targets {op.targets}")
            if any(not 0 <= t < self.n_qubits for t in op.targets):
                raise IndexError(f"{op.kind} targets {op.targets} outside {self.n_qubits} qubits")

    @property
    def cz_count(self) -> int:
        return len(self.cz_tags)

    def realized(self, theta: float = 0.0) -> "Circuit":
        """Copy with every tagged CZ replaced by ``CP(pi - theta)``."""
        if theta == 0.0 or not self.cz_tags:
            return self
        imperfect = CP(np.pi - theta)
        ops = list(self.ops)
        for i in self.cz_tags:
            ops[i] = Op(imperfect, ops[i].targets)
        return Circuit(self.n_qubits, tuple(ops), self.phase)

    def without_phase(self) -> "Circuit":
        return Circuit(self.n_qubits, self.ops, 0.0, self.cz_tags)

    def remap(self, qubits: Sequence[int], n_qubits: int) -> "Circuit":
        """Place this circuit's qubit ``i`` on qubit ``qubits[i]`` of a larger register."""
        ops = tuple(Op(op.kind, tuple(qubits[t] for t in op.targets)) for op in self.ops)
        return Circuit(n_qubits, ops, self.phase, self.cz_tags)

    def __add__(self, other: "Circuit") -> "Circuit":
        """``self`` followed by ``other``."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("circuits act on different registers")
        shift = len(self.ops)
        return Circuit(
            self.n_qubits,
            self.ops + other.ops,
            self.phase + other.phase,
            self.cz_tags + tuple(i + shift for i in other.cz_tags),
        )

    def run(
        self,
        state: StateVector,
        theta: float = 0.0,
        convention: Convention = DEFAULT_CONVENTION,
        qubits: Sequence[int] | None = None,
    ) -> StateVector:
        """Apply the circuit gate by gate; ``qubits`` places it inside ``state``."""
        qubits = range(self.n_qubits) if qubits is None else qubits
        circ = self.realized(theta)
        for op in circ.ops:
            gate = GateMatrix(_matrix(op.kind, convention))
            state = embed_apply(state, gate, [qubits[t] for t in op.targets])
        return StateVector(np.exp(1j * circ.phase) * state.amplitudes)

    def unitary(self, theta: float = 0.0, convention: Convention = DEFAULT_CONVENTION) -> GateMatrix:
        circ = self.realized(theta)
        u = np.eye(1 << self.n_qubits, dtype=complex)
        for op in circ.ops:
            u = apply_matrix(u, _matrix(op.kind, convention), op.targets)
        return GateMatrix(np.exp(1j * circ.phase) * u)


def _cnot_block(kind: GateKind) -> list[Op]:
    # CNOT = H(target) . CZ . H(target)
    target = 1 if kind == CNOT12 else 0
    return [Op(HAD, (target,)), Op(CZ, (0, 1)), Op(HAD, (target,))]


def circuit_from_decomposition(dec: Decomposition) -> Circuit:
    ops: list[Op] = []
    for factor in dec.execution_order():
        if factor.kind in (CNOT12, CNOT21):
            ops.extend(_cnot_block(factor.kind))
        else:
            ops.append(Op(factor.kind, (factor.qubit - 1,)))
    tags = tuple(i for i, op in enumerate(ops) if op.kind == CZ)
    return Circuit(2, tuple(ops), dec.phase, tags)


def decomposed_sequence(
    player: str,
    index: int,
    decompositions: Mapping[tuple[str, int], Decomposition] = DECOMPOSITIONS,
) -> Circuit:
    """Two-qubit circuit for ``A_index`` or ``B_index`` with CNOTs as H.CZ.H."""
    key = (_player(player), int(index))
    if key not in decompositions:
        raise ValueError(f"no decomposition for {key}")
    return circuit_from_decomposition(decompositions[key])


def swap_circuit() -> Circuit:
    """SWAP as CNOT12 . CNOT21 . CNOT12, each CNOT expanded around a CZ."""
    return circuit_from_decomposition(
        Decomposition(0.0, (Factor(CNOT12), Factor(CNOT21), Factor(CNOT12)))
    )


def extended_circuit(
    player: str,
    index: int,
    include_initial_swap: bool = True,
    decompositions: Mapping[tuple[str, int], Decomposition] = DECOMPOSITIONS,
) -> Circuit:
    """Three-qubit (spin, photon, spin) realization of a player's operation.

    Alice swaps the photon with her first spin and runs her two-qubit circuit
    on (photon, spin 2); Bob swaps it with his second spin and runs his on
    (spin 1, photon). Each SWAP is undone at the end. Dropping the initial
    SWAP keeps the closing one.
    """
    p = _player(player)
    core = decomposed_sequence(p, index, decompositions)
    if p == "A":
        swap_qubits, core_qubits = (0, 1), (1, 2)
    else:
        swap_qubits, core_qubits = (1, 2), (0, 1)
    swap = swap_circuit().remap(swap_qubits, 3)
    circ = core.remap(core_qubits, 3) + swap
    if include_initial_swap:
        circ = swap + circ
    return circ


# ---------------------------------------------------------------------------
# Scoring


def parity_complete(bits: Sequence[int], role: str) -> tuple[int, int, int]:
    """Append the bit that makes a row even (Alice) or a column odd (Bob)."""
    b1, b2 = (int(b) for b in bits)
    if b1 not in (0, 1) or b2 not in (0, 1):
        raise ValueError(f"bits must be binary, got {tuple(bits)}")
    third = b1 ^ b2 if _player(role) == "A" else b1 ^ b2 ^ 1
    return (b1, b2, third)


def win(row: Sequence[int], col: Sequence[int], round: RoundInput | Sequence[int]) -> bool:
    """Players win when Alice's entry in column b equals Bob's entry in row a."""
    r = _round(round)
    return row[r.b - 1] == col[r.a - 1]


@dataclass(frozen=True)
class Backend:
    """How a round is simulated.

    ``reference`` applies the target matrices directly and ignores theta.
    ``extended`` runs the spin-photon-spin circuits with imperfect CZs. When
    ``include_initial_swap`` is False the opening SWAP is dropped; with
    ``photon_holds_logical`` the displaced logical qubit is prepared on the
    photon, otherwise the spin register is used unchanged.
    """

    kind: str = "extended"
    include_initial_swap: bool = True
    photon_holds_logical: bool = True

    def __post_init__(self):
        if self.kind not in ("reference", "extended"):
            raise ValueError(f"unknown backend kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "reference":
            return "reference"
        if self.include_initial_swap:
            return "extended"
        if self.photon_holds_logical:
            return "extended-no-first-swap"
        return "extended-no-first-swap-literal"

    @classmethod
    def from_label(cls, label: str) -> "Backend":
        for b in BACKENDS:
            if b.label == label:
                return b
        raise ValueError(f"unknown backend {label!r}")


REFERENCE = Backend("reference")
EXTENDED = Backend("extended")
EXTENDED_NO_FIRST_SWAP = Backend("extended", include_initial_swap=False)
EXTENDED_NO_FIRST_SWAP_LITERAL = Backend("extended", False, photon_holds_logical=False)
BACKENDS = (REFERENCE, EXTENDED, EXTENDED_NO_FIRST_SWAP, EXTENDED_NO_FIRST_SWAP_LITERAL)


@lru_cache(maxsize=None)
def _player_circuit(player: str, index: int, include_initial_swap: bool, drop_phases: bool) -> Circuit:
    circ = extended_circuit(player, index, include_initial_swap)
    return circ.without_phase() if drop_phases else circ


def final_state(
    round: RoundInput | Sequence[int],
    theta: float = 0.0,
    backend: Backend = EXTENDED,
    convention: Convention = DEFAULT_CONVENTION,
    *,
    drop_phases: bool = False,
    decompositions: Mapping[tuple[str, int], Decomposition] | None = None,
) -> StateVector:
    """State just before measurement: 4 qubits for reference, 6 for extended."""
    r = _round(round)
    theta = check_theta(theta)
    if backend.kind == "reference":
        mats = _PLAYER_MATRICES
        state = embed_apply(initial_state(), GateMatrix(mats[("A", r.a)]), (0, 1))
        return embed_apply(state, GateMatrix(mats[("B", r.b)]), (2, 3))
    on_photon = not backend.include_initial_swap and backend.photon_holds_logical
    state = extended_initial_state(photon_holds_logical=on_photon)
    for player, idx, qubits in (("A", r.a, (0, 1, 2)), ("B", r.b, (3, 4, 5))):
        if decompositions is None:
            circ = _player_circuit(player, idx, backend.include_initial_swap, drop_phases)
        else:
            circ = extended_circuit(player, idx, backend.include_initial_swap, decompositions)
            circ = circ.without_phase() if drop_phases else circ
        state = embed_apply(state, circ.unitary(theta, convention), qubits)
    return state


def outcome_distribution(
    round: RoundInput | Sequence[int],
    theta: float = 0.0,
    backend: Backend = EXTENDED,
    convention: Convention = DEFAULT_CONVENTION,
    *,
    drop_phases: bool = False,
    decompositions: Mapping[tuple[str, int], Decomposition] | None = None,
) -> ProbabilityTable:
    """Distribution of the measured bits ``alice_1 alice_2 bob_1 bob_2``."""
    state = final_state(
        round, theta, backend, convention, drop_phases=drop_phases, decompositions=decompositions
    )
    keep = (0, 1, 2, 3) if backend.kind == "reference" else LOGICAL_QUBITS
    return marginal_distribution(state, keep)


def outcome_triples(pattern: str) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    """Completed (row, column) for a 4-bit measurement pattern."""
    bits = [int(c) for c in pattern]
    return parity_complete(bits[:2], "A"), parity_complete(bits[2:], "B")


def round_success(
    round: RoundInput | Sequence[int],
    theta: float = 0.0,
    backend: Backend = EXTENDED,
    convention: Convention = DEFAULT_CONVENTION,
    *,
    decompositions: Mapping[tuple[str, int], Decomposition] | None = None,
) -> float:
    r = _round(round)
    dist = outcome_distribution(r, theta, backend, convention, decompositions=decompositions)
    total = 0.0
    for pattern, p in dist.probabilities.items():
        row, col = outcome_triples(pattern)
        if win(row, col, r):
            total += p
    return total
