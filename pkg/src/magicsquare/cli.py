"""Command-line interface: ``magicsquare <command> [options]``.

Exit codes: 0 success, 1 check or computation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analysis, cavity
from .game import (
    BACKENDS,
    EXTENDED,
    Backend,
    RoundInput,
    outcome_distribution,
    outcome_triples,
    round_success,
    win,
)
from .gates import DEFAULT_CONVENTION
from .output import Report, Table, render
from .verify import corrupt_decomposition, run_checks

OUTPUT_DIR_ENV = "MAGICSQUARE_OUTPUT_DIR"
RNG_NAME = "numpy.random.PCG64"
CLASSICAL_LIMIT = Fraction(8, 9)
SWEEP_HEADER = ["theta", "ps_11", "ps_12", "ps_13", "ps_21", "ps_22", "ps_23", "ps_31", "ps_32", "ps_33", "mean"]


class UsageError(Exception):
    pass


class ComputationError(Exception):
    pass


# ---------------------------------------------------------------------------
# Commands


def run_verify(corrupt: str | None = None) -> tuple[int, Report]:
    decompositions = None
    if corrupt:
        key = (corrupt[0].upper(), int(corrupt[1:]))
        decompositions = corrupt_decomposition(key)
    rep = run_checks(decompositions) if decompositions else run_checks()
    res = rep.resolution
    checks = Table(["check", "status", "detail"], [[c.name, c.status, c.detail] for c in rep.checks])
    unity = Table(
        ["a", "b", "ps_reference", "ps_extended"],
        [[k[0], k[1], rep.unity["reference"][k], rep.unity["extended"][k]] for k in sorted(rep.unity["reference"])],
    )
    conv_rows = []
    for conv, row in res.checks.items():
        for (p, i), chk in row.items():
            conv_rows.append([conv.label(), f"{p}{i}", chk.passed, chk.max_error, chk.diagonal_residual])
    resolution = Table(["convention", "decomposition", "match", "max_error", "diagonal_residual"], conv_rows)
    failure = rep.first_failure()
    result = {
        "passed": rep.passed,
        "first_failure": failure.name if failure else None,
        "resolved_convention": res.best.as_dict(),
        "all_six_conventions": [c.as_dict() for c in res.matches],
        "checks": [{"name": c.name, "status": c.status, "detail": c.detail} for c in rep.checks],
        "unity": rep.unity,
        "resolution": [dict(zip(resolution.header, r)) for r in conv_rows],
    }
    report = Report("verify", result, [checks, unity, resolution], res.best)
    return (0 if rep.passed else 1), report


def run_play(
    a: int,
    b: int,
    theta: float,
    backend: Backend = EXTENDED,
    shots: int | None = None,
    seed: int | None = None,
) -> tuple[int, Report]:
    rnd = RoundInput(a, b)
    dist = outcome_distribution(rnd, theta, backend)
    success = round_success(rnd, theta, backend)
    patterns = sorted(dist.probabilities)
    probs = np.array([dist[k] for k in patterns])
    counts = None
    samples = []
    if shots is not None:
        rng = np.random.Generator(np.random.PCG64(seed))
        p = np.clip(probs, 0.0, None)
        draws = rng.choice(len(patterns), size=shots, p=p / p.sum())
        counts = np.bincount(draws, minlength=len(patterns))
        for d in draws:
            row, col = outcome_triples(patterns[d])
            samples.append({"outcome": patterns[d], "row": row, "column": col, "win": win(row, col, rnd)})

    outcomes = []
    rows = []
    for i, k in enumerate(patterns):
        row, col = outcome_triples(k)
        w = win(row, col, rnd)
        entry = {"outcome": k, "alice_bits": k[:2], "bob_bits": k[2:], "row": row, "column": col,
                 "win": w, "probability": dist[k]}
        line = [k, k[:2], k[2:], row, col, w, dist[k]]
        if counts is not None:
            entry["count"] = int(counts[i])
            line.append(int(counts[i]))
        outcomes.append(entry)
        rows.append(line)
    header = ["outcome", "alice_bits", "bob_bits", "row", "column", "win", "probability"]
    if counts is not None:
        header.append("count")

    summary = [["a", a], ["b", b], ["theta", theta], ["backend", backend.label], ["success", success]]
    result = {"a": a, "b": b, "theta": theta, "backend": backend.label, "success": success, "outcomes": outcomes}
    if counts is not None:
        empirical = sum(s["win"] for s in samples) / shots
        summary += [["shots", shots], ["seed", seed], ["rng", RNG_NAME], ["empirical_success", empirical]]
        result.update(shots=shots, seed=seed, rng=RNG_NAME, empirical_success=empirical, samples=samples)
    tables = [Table(["key", "value"], summary), Table(header, rows)]
    return 0, Report("play", result, tables, DEFAULT_CONVENTION, {"backend": backend.label})


def run_sweep(theta_min: float, theta_max: float, steps: int, backend: Backend = EXTENDED) -> tuple[int, Report]:
    res = analysis.sweep(theta_min, theta_max, steps, backend)
    rows = [[p.theta, *p.table.row_major(), p.mean] for p in res.points]
    result = {"backend": backend.label, "rows": [dict(zip(SWEEP_HEADER, r)) for r in rows]}
    return 0, Report("sweep", result, [Table(SWEEP_HEADER, rows)], DEFAULT_CONVENTION, {"backend": backend.label})


def run_classical() -> tuple[int, Report]:
    opt = analysis.classical_optimum()
    ex = opt.example
    result = {
        "max_wins": opt.max_wins,
        "rounds": opt.rounds,
        "probability": str(opt.probability),
        "probability_decimal": float(opt.probability),
        "optimal_pairs": opt.n_optimal,
        "pairs_examined": opt.pairs_examined,
        "example": {"alice_rows": ex.alice_map, "bob_columns": ex.bob_map},
    }
    rows = [
        ["probability", str(opt.probability)],
        ["probability_decimal", float(opt.probability)],
        ["max_wins", opt.max_wins],
        ["rounds", opt.rounds],
        ["optimal_pairs", opt.n_optimal],
        ["pairs_examined", opt.pairs_examined],
    ]
    rows += [[f"alice_row_{i + 1}", t] for i, t in enumerate(ex.alice_map)]
    rows += [[f"bob_column_{i + 1}", t] for i, t in enumerate(ex.bob_map)]
    return 0, Report("classical", result, [Table(["key", "value"], rows)])


def run_bias(theta: float, backend: Backend = EXTENDED) -> tuple[int, Report]:
    table = analysis.success_table(theta, backend)
    referee = analysis.referee_best_response(table)
    uniform = table.mean
    biased = referee.expected_win(table)
    limit = float(CLASSICAL_LIMIT)
    cells = [(a, b) for a in (1, 2, 3) for b in (1, 2, 3)]
    rows = [[a, b, table[a, b], float(referee.weights[a - 1, b - 1])] for a, b in cells]
    summary = [
        ["theta", theta],
        ["backend", backend.label],
        ["uniform_win", uniform],
        ["biased_win", biased],
        ["classical_limit", limit],
        ["uniform_advantage", uniform > limit],
        ["biased_advantage", biased > limit],
    ]
    result = {
        "theta": theta,
        "backend": backend.label,
        "success_table": table.values,
        "referee": referee.weights,
        "uniform_win": uniform,
        "biased_win": biased,
        "classical_limit": limit,
        "uniform_advantage": uniform > limit,
        "biased_advantage": biased > limit,
    }
    tables = [Table(["key", "value"], summary), Table(["a", "b", "success", "referee_weight"], rows)]
    return 0, Report("bias", result, tables, DEFAULT_CONVENTION, {"backend": backend.label})


def run_cavity(params: cavity.CavityParams, shifter: bool = True) -> tuple[int, Report]:
    try:
        gate = cavity.spin_photon_gate(params, shifter)
    except cavity.SingularParametersError as exc:
        raise ComputationError(str(exc)) from exc
    refl = gate.reflection
    regime = "resonant" if params.is_resonant else "model extrapolation (off resonance)"
    diag = np.diag(gate.matrix.entries)
    rows = [[k, getattr(params, k)] for k in ("omega_p", "omega_c", "omega_0", "kappa", "gamma", "g")]
    for name, r in (("r", refl.r_coupled), ("r0", refl.r_uncoupled)):
        rows += [[f"{name}_re", r.real], [f"{name}_im", r.imag], [f"{name}_abs", abs(r)]]
    rows += [
        ["phi", refl.phi],
        ["phi_0", refl.phi_0],
        ["coupling_check", cavity.coupling_check(params)],
        ["coupling_threshold", cavity.COUPLING_FACTOR * math.sqrt(params.kappa * params.gamma)],
        ["pi_shifter", shifter],
        ["effective_theta", gate.effective_theta],
        ["regime", regime],
    ]
    for i, label in enumerate(("R+", "R-", "L+", "L-")):
        rows += [[f"gate_{label}_re", diag[i].real], [f"gate_{label}_im", diag[i].imag]]
    result = {
        "params": {k: getattr(params, k) for k in ("omega_p", "omega_c", "omega_0", "kappa", "gamma", "g")},
        "r": {"re": refl.r_coupled.real, "im": refl.r_coupled.imag, "abs": abs(refl.r_coupled), "arg": refl.phi},
        "r0": {"re": refl.r_uncoupled.real, "im": refl.r_uncoupled.imag, "abs": abs(refl.r_uncoupled), "arg": refl.phi_0},
        "coupling_check": cavity.coupling_check(params),
        "pi_shifter": shifter,
        "gate": [[[z.real, z.imag] for z in row] for row in gate.matrix.entries],
        "effective_theta": gate.effective_theta,
        "regime": regime,
    }
    return 0, Report("cavity", result, [Table(["key", "value"], rows)])


# ---------------------------------------------------------------------------
# Argument handling


def _add_common(p: argparse.ArgumentParser, backend: bool = False) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", help="write here instead of standard output")
    if backend:
        p.add_argument("--backend", choices=[b.label for b in BACKENDS], default="extended")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magicsquare", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the build self-checks")
    _add_common(p)
    p.add_argument("--corrupt", metavar="KEY", help=argparse.SUPPRESS)

    p = sub.add_parser("play", help="exact outcome distribution for one round")
    _add_common(p, backend=True)
    p.add_argument("--a", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--b", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--degrees", action="store_true", help="angles are given in degrees")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, help="unsigned 64-bit seed, required with --shots")

    p = sub.add_parser("sweep", help="success table over a theta grid")
    _add_common(p, backend=True)
    p.add_argument("--theta-min", type=float, default=0.0)
    p.add_argument("--theta-max", type=float, default=math.pi)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--degrees", action="store_true", help="angles are given in degrees")

    p = sub.add_parser("classical", help="best classical strategy by brute force")
    _add_common(p)

    p = sub.add_parser("bias", help="referee best response against the players' setup")
    _add_common(p, backend=True)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--degrees", action="store_true", help="angles are given in degrees")

    p = sub.add_parser("cavity", help="reflection coefficients and the spin-photon gate")
    _add_common(p)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--g", type=float, default=5.0)
    p.add_argument("--omega-p", type=float, default=0.0)
    p.add_argument("--omega-c", type=float, default=None, help="defaults to omega-p")
    p.add_argument("--omega-0", type=float, default=None, help="defaults to omega-p")
    p.add_argument("--no-shifter", action="store_true", help="omit the pi phase shifter")
    return parser


def _angle(args, value: float) -> float:
    return math.radians(value) if getattr(args, "degrees", False) else value


def _theta(args, value: float) -> float:
    theta = _angle(args, value)
    if not 0.0 <= theta <= math.pi:
        raise UsageError(f"theta must lie in [0, pi] radians, got {theta}")
    return theta


def dispatch(args) -> tuple[int, Report]:
    cmd = args.command
    if cmd == "verify":
        return run_verify(args.corrupt)
    if cmd == "play":
        if args.shots is not None:
            if args.shots < 1:
                raise UsageError("--shots must be >= 1")
            if args.seed is None:
                raise UsageError("--seed is required with --shots")
            if not 0 <= args.seed < 2**64:
                raise UsageError("--seed must be an unsigned 64-bit integer")
        return run_play(args.a, args.b, _theta(args, args.theta), Backend.from_label(args.backend),
                        args.shots, args.seed)
    if cmd == "sweep":
        lo, hi = _angle(args, args.theta_min), _angle(args, args.theta_max)
        if not 0.0 <= lo < hi <= math.pi or args.steps < 2:
            raise UsageError("need 0 <= theta-min < theta-max <= pi and steps >= 2")
        return run_sweep(lo, hi, args.steps, Backend.from_label(args.backend))
    if cmd == "classical":
        return run_classical()
    if cmd == "bias":
        return run_bias(_theta(args, args.theta), Backend.from_label(args.backend))
    if cmd == "cavity":
        wc = args.omega_p if args.omega_c is None else args.omega_c
        w0 = args.omega_p if args.omega_0 is None else args.omega_0
        try:
            params = cavity.CavityParams(args.omega_p, wc, w0, args.kappa, args.gamma, args.g)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return run_cavity(params, not args.no_shifter)
    raise UsageError(f"unknown command {cmd}")


def _output_path(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, report = dispatch(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = render(report, args.format)
    if args.output:
        path = _output_path(args.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    if code and report.command == "verify":
        print(f"verify failed: {report.result['first_failure']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
