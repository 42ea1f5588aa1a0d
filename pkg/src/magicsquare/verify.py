"""Build self-checks behind the ``verify`` command.

Each check returns a :class:`CheckResult`. Status is ``PASS``, ``FAIL`` or
``WARN``; a WARN documents a known discrepancy that does not break the game
(for instance a decomposition that only matches its target up to a diagonal
phase applied after it, which measurement cannot see).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .game import (
    ALL_ROUNDS,
    ANCILLA_QUBITS,
    EXTENDED,
    EXTENDED_NO_FIRST_SWAP,
    EXTENDED_NO_FIRST_SWAP_LITERAL,
    REFERENCE,
    final_state,
    outcome_distribution,
    outcome_triples,
    parity_complete,
    player_matrices,
    round_success,
    win,
)
from .gates import (
    DECOMPOSITIONS,
    Decomposition,
    Factor,
    ResolutionReport,
    resolve_convention,
)
from .qcore import marginal_distribution

TOL = 1e-9

# Outcomes of round (2, 3) as (Alice bits, Bob bits), instances i to viii.
TABLE_INSTANCES = {
    "i": ((0, 0), (0, 0)),
    "ii": ((0, 1), (0, 1)),
    "iii": ((0, 0), (1, 0)),
    "iv": ((0, 1), (1, 1)),
    "v": ((1, 0), (0, 1)),
    "vi": ((1, 0), (1, 1)),
    "vii": ((1, 1), (0, 0)),
    "viii": ((1, 1), (1, 0)),
}


@dataclass
class CheckResult:
    name: str
    status: str
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "FAIL"


@dataclass
class VerifyReport:
    checks: list[CheckResult]
    resolution: ResolutionReport
    unity: dict[str, dict[str, float]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def first_failure(self) -> CheckResult | None:
        return next((c for c in self.checks if not c.ok), None)


def corrupt_decomposition(
    key: tuple[str, int],
    delta: float = np.pi / 2,
    decompositions: Mapping[tuple[str, int], Decomposition] = DECOMPOSITIONS,
) -> dict[tuple[str, int], Decomposition]:
    """Copy of ``decompositions`` with one rotation angle of ``key`` shifted.

    The shifted rotation is the one applied first (last written), so the
    error is not a trailing diagonal phase that measurement would hide.
    """
    out = dict(decompositions)
    dec = out[key]
    factors = list(dec.factors)
    for i in reversed(range(len(factors))):
        f = factors[i]
        if f.kind.theta is not None:
            kind = dataclasses.replace(f.kind, theta=f.kind.theta + delta)
            factors[i] = Factor(kind, f.qubit)
            break
    out[key] = Decomposition(dec.phase, tuple(factors))
    return out


def _check_resolution(res: ResolutionReport) -> CheckResult:
    best = res.best
    if res.matches:
        return CheckResult("decompositions", "PASS", f"all six reproduce their targets under {best.label()}")
    failing = res.failures(best)
    hidden = [k for k in failing if res.checks[best][k].diagonal_residual]
    names = ", ".join(f"{p}{i}" for p, i in failing)
    detail = f"best convention {best.label()}; mismatched: {names}"
    if hidden:
        detail += "; differ only by a trailing diagonal phase: " + ", ".join(f"{p}{i}" for p, i in hidden)
    return CheckResult("decompositions", "WARN", detail)


def run_checks(decompositions: Mapping[tuple[str, int], Decomposition] = DECOMPOSITIONS) -> VerifyReport:
    """Run every build self-check against ``decompositions``."""
    res = resolve_convention(decompositions, player_matrices())
    conv = res.best
    custom = None if decompositions is DECOMPOSITIONS else decompositions
    checks = [_check_resolution(res)]

    unity = {"reference": {}, "extended": {}}
    worst_eq = 0.0
    worst_unity = 0.0
    for r in ALL_ROUNDS:
        ref = outcome_distribution(r, 0.0, REFERENCE, conv).as_array()
        ext = outcome_distribution(r, 0.0, EXTENDED, conv, decompositions=custom).as_array()
        worst_eq = max(worst_eq, float(np.max(np.abs(ref - ext))))
        for label, backend in (("reference", REFERENCE), ("extended", EXTENDED)):
            p = round_success(r, 0.0, backend, conv, decompositions=custom)
            unity[label][f"{r.a}{r.b}"] = p
            worst_unity = max(worst_unity, abs(p - 1.0))
    checks.append(CheckResult(
        "unity", "PASS" if worst_unity <= TOL else "FAIL",
        f"max |P_s - 1| over 9 rounds and both backends = {worst_unity:.3e}",
    ))
    checks.append(CheckResult(
        "backend_equivalence", "PASS" if worst_eq <= TOL else "FAIL",
        f"max outcome difference reference vs extended at theta=0 = {worst_eq:.3e}",
    ))

    worst_anc = 0.0
    for r in ALL_ROUNDS:
        state = final_state(r, 0.0, EXTENDED, conv, decompositions=custom)
        worst_anc = max(worst_anc, abs(marginal_distribution(state, ANCILLA_QUBITS)["00"] - 1.0))
    checks.append(CheckResult(
        "ancilla_restoration", "PASS" if worst_anc <= TOL else "FAIL",
        f"max |P(ancillas=00) - 1| = {worst_anc:.3e}",
    ))

    bad = [
        (role, bits) for role, want in (("A", 0), ("B", 1))
        for bits in ((0, 0), (0, 1), (1, 0), (1, 1))
        if sum(parity_complete(bits, role)) % 2 != want
    ]
    checks.append(CheckResult("parity", "FAIL" if bad else "PASS", f"violations: {bad}" if bad else "8 completions"))

    problems = []
    for r in ALL_ROUNDS:
        dist = outcome_distribution(r, 0.0, EXTENDED, conv, decompositions=custom).nonzero(TOL)
        losing = [k for k in dist if not win(*outcome_triples(k), r)]
        if len(dist) != 8 or losing or any(abs(p - 0.125) > TOL for p in dist.values()):
            problems.append(f"{r.a}{r.b}")
    checks.append(CheckResult(
        "win_structure", "FAIL" if problems else "PASS",
        f"rounds off: {problems}" if problems else "8 winning outcomes of 1/8 in every round",
    ))

    dist = outcome_distribution((2, 3), 0.0, EXTENDED, conv, decompositions=custom)
    expected = {"".join(map(str, a + b)) for a, b in TABLE_INSTANCES.values()}
    got = set(dist.nonzero(TOL))
    checks.append(CheckResult(
        "table_instances", "PASS" if got == expected else "FAIL",
        "round (2,3) outcomes match instances i-viii" if got == expected else f"got {sorted(got)}",
    ))

    literal = min(
        round_success(r, 0.0, EXTENDED_NO_FIRST_SWAP_LITERAL, conv, decompositions=custom) for r in ALL_ROUNDS
    )
    rehomed = min(
        round_success(r, 0.0, EXTENDED_NO_FIRST_SWAP, conv, decompositions=custom) for r in ALL_ROUNDS
    )
    checks.append(CheckResult(
        "no_first_swap", "PASS" if abs(rehomed - 1) <= TOL else "FAIL",
        f"photon-prepared variant min P_s(theta=0) = {rehomed:.12g}",
    ))
    checks.append(CheckResult(
        "no_first_swap_literal", "WARN" if abs(literal - 1) > TOL else "PASS",
        f"spin-prepared variant min P_s(theta=0) = {literal:.12g}; excluded from analysis",
    ))
    return VerifyReport(checks, res, unity)
