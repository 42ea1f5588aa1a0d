"""Imperfection sweeps, the classical baseline, and the adversarial referee."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .game import (
    ALL_ROUNDS,
    EXTENDED,
    Backend,
    RoundInput,
    check_theta,
    round_success,
    win,
)
from .gates import DEFAULT_CONVENTION, Convention

TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SuccessTable:
    """P_s(a, b) stored at ``values[a-1, b-1]``."""

    values: np.ndarray
    theta: float
    backend: str

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (3, 3):
            raise ValueError(f"success table must be 3x3, got {v.shape}")
        if np.any(v < -1e-12) or np.any(v > 1 + 1e-12):
            raise ValueError("success probabilities must lie in [0, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, ab: tuple[int, int]) -> float:
        a, b = ab
        return float(self.values[a - 1, b - 1])

    @property
    def mean(self) -> float:
        return float(self.values.sum() / 9)

    @property
    def minimum(self) -> float:
        return float(self.values.min())

    def row_major(self) -> list[float]:
        return [float(x) for x in self.values.reshape(-1)]


def success_table(
    theta: float,
    backend: Backend = EXTENDED,
    convention: Convention = DEFAULT_CONVENTION,
) -> SuccessTable:
    theta = check_theta(theta)
    values = np.empty((3, 3))
    for r in ALL_ROUNDS:
        values[r.a - 1, r.b - 1] = round_success(r, theta, backend, convention)
    return SuccessTable(values, theta, backend.label)


@dataclass(frozen=True)
class SweepPoint:
    theta: float
    table: SuccessTable
    mean: float


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    backend: str

    def __len__(self):
        return len(self.points)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([p.theta for p in self.points])

    @property
    def means(self) -> np.ndarray:
        return np.array([p.mean for p in self.points])


def sweep(
    theta_min: float,
    theta_max: float,
    steps: int,
    backend: Backend = EXTENDED,
    convention: Convention = DEFAULT_CONVENTION,
) -> SweepResult:
    """Success tables on ``steps`` evenly spaced angles, endpoints included."""
    if not 0.0 <= theta_min < theta_max <= np.pi:
        raise ValueError(f"need 0 <= theta_min < theta_max <= pi, got [{theta_min}, {theta_max}]")
    if int(steps) != steps or steps < 2:
        raise ValueError(f"steps must be an integer >= 2, got {steps!r}")
    grid = np.linspace(theta_min, theta_max, int(steps))
    points = []
    for theta in grid:
        table = success_table(float(theta), backend, convention)
        points.append(SweepPoint(float(theta), table, table.mean))
    return SweepResult(tuple(points), backend.label)


@dataclass(frozen=True)
class OrderingCheck:
    """How a table compares with the expected imperfection ordering.

    ``min_margin`` is how far (1,1) sits below every other cell; ``edge_max``
    and ``inner_min`` are the largest entry with a=1 or b=1 and the smallest
    entry with a, b in {2, 3}.
    """

    theta: float
    min_margin: float
    edge_max: float
    inner_min: float

    def corner_is_strict_min(self, margin: float = 1e-6) -> bool:
        return self.min_margin >= margin

    def edges_below_inner(self, slack: float = 1e-9) -> bool:
        return self.edge_max <= self.inner_min + slack


def ordering_check(table: SuccessTable) -> OrderingCheck:
    v = table.values
    others = np.delete(v.reshape(-1), 0)
    edge = np.concatenate([v[0, :], v[1:, 0]])
    return OrderingCheck(
        theta=table.theta,
        min_margin=float(others.min() - v[0, 0]),
        edge_max=float(edge.max()),
        inner_min=float(v[1:, 1:].min()),
    )


# ---------------------------------------------------------------------------
# Classical baseline

EVEN_TRIPLES = tuple(t for t in itertools.product((0, 1), repeat=3) if sum(t) % 2 == 0)
ODD_TRIPLES = tuple(t for t in itertools.product((0, 1), repeat=3) if sum(t) % 2 == 1)


@dataclass(frozen=True)
class ClassicalStrategy:
    """Deterministic answers: ``alice_map[a-1]`` is row a, ``bob_map[b-1]`` column b."""

    alice_map: tuple[tuple[int, int, int], ...]
    bob_map: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if any(sum(t) % 2 for t in self.alice_map) or any(sum(t) % 2 == 0 for t in self.bob_map):
            raise ValueError("rows need even parity and columns odd parity")

    def wins(self) -> int:
        return sum(
            win(self.alice_map[r.a - 1], self.bob_map[r.b - 1], r) for r in ALL_ROUNDS
        )


@dataclass(frozen=True)
class ClassicalOptimum:
    max_wins: int
    rounds: int
    n_optimal: int
    pairs_examined: int
    example: ClassicalStrategy

    @property
    def probability(self) -> Fraction:
        return Fraction(self.max_wins, self.rounds)


def classical_optimum() -> ClassicalOptimum:
    """Best deterministic strategy pair by exhaustive search.

    Shared randomness mixes deterministic pairs, and a mixture never beats its
    best component, so this is also the optimum over classical strategies.
    """
    best, count, examined, example = -1, 0, 0, None
    for alice in itertools.product(EVEN_TRIPLES, repeat=3):
        for bob in itertools.product(ODD_TRIPLES, repeat=3):
            examined += 1
            wins = sum(alice[r.a - 1][r.b - 1] == bob[r.b - 1][r.a - 1] for r in ALL_ROUNDS)
            if wins > best:
                best, count, example = wins, 1, (alice, bob)
            elif wins == best:
                count += 1
    return ClassicalOptimum(best, len(ALL_ROUNDS), count, examined, ClassicalStrategy(*example))


# ---------------------------------------------------------------------------
# Referee


@dataclass(frozen=True, eq=False)
class RefereeStrategy:
    """Probability of asking round (a, b), stored at ``weights[a-1, b-1]``."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (3, 3) or np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise ValueError("referee weights must be a nonnegative 3x3 distribution")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls) -> "RefereeStrategy":
        return cls(np.full((3, 3), 1 / 9))

    def support(self) -> list[RoundInput]:
        return [r for r in ALL_ROUNDS if self.weights[r.a - 1, r.b - 1] > 0]

    def expected_win(self, table: SuccessTable) -> float:
        return float((self.weights * table.values).sum())


def referee_best_response(table: SuccessTable) -> RefereeStrategy:
    """Spread evenly over the cells where the players are weakest."""
    v = table.values
    worst = v <= v.min() + TIE_TOL
    return RefereeStrategy(worst / worst.sum())


# ---------------------------------------------------------------------------
# Threshold


def threshold_theta(
    target: float,
    backend: Backend = EXTENDED,
    statistic: str = "mean",
    tol: float = 1e-6,
    scan_points: int = 64,
    convention: Convention = DEFAULT_CONVENTION,
) -> float | None:
    """Smallest theta at which the success statistic drops to ``target``.

    A coarse scan over [0, pi] brackets the first crossing, then bisection
    narrows it to ``tol``. ``statistic`` is ``"mean"`` (uniform referee) or
    ``"min"`` (best-responding referee). Returns None if there is no crossing.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must lie in (0, 1), got {target!r}")
    stat: Callable[[SuccessTable], float]
    if statistic == "mean":
        stat = lambda t: t.mean  # noqa: E731
    elif statistic == "min":
        stat = lambda t: t.minimum  # noqa: E731
    else:
        raise ValueError(f"unknown statistic {statistic!r}")

    def f(theta: float) -> float:
        return stat(success_table(theta, backend, convention))

    if f(0.0) < target:
        raise ValueError(f"success at theta=0 is already below {target}")
    grid = np.linspace(0.0, np.pi, scan_points + 1)
    lo = 0.0
    for theta in grid[1:]:
        if f(float(theta)) <= target:
            hi = float(theta)
            break
        lo = float(theta)
    else:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi
