import itertools
from fractions import Fraction

import numpy as np
import pytest

from magicsquare.analysis import (
    EVEN_TRIPLES,
    ODD_TRIPLES,
    ClassicalStrategy,
    RefereeStrategy,
    SuccessTable,
    classical_optimum,
    ordering_check,
    referee_best_response,
    success_table,
    sweep,
    threshold_theta,
)
from magicsquare.game import EXTENDED, REFERENCE

from oracles import win_oracle

# Frozen from the first run of the simulation (bisection tolerance 1e-6).
THRESHOLD_MEAN = 0.3975369634902053
THRESHOLD_MIN = 0.29543511236685016
CLASSICAL_MAXIMIZERS = 144
TABLE_04 = np.array([
    [0.809738, 0.858418, 0.898229],
    [0.927251, 0.908127, 0.912679],
    [0.870844, 0.930324, 0.873523],
])


@pytest.fixture(scope="module")
def table04():
    return success_table(0.4)


# --- success_table ----------------------------------------------------------


@pytest.mark.parametrize("backend", [REFERENCE, EXTENDED], ids=lambda b: b.label)
def test_table_unity_at_zero(backend):
    t = success_table(0.0, backend)
    assert np.max(np.abs(t.values - 1)) <= 1e-9


def test_table_regression_at_04(table04):
    assert np.max(np.abs(table04.values - TABLE_04)) <= 5e-7


def test_table_corner_is_strict_min(table04):
    others = np.delete(table04.values.reshape(-1), 0)
    assert table04[1, 1] < others.min() - 1e-6


def test_inner_cells_not_equal(table04):
    # seven imperfect gates each, yet the four cells differ
    inner = table04.values[1:, 1:]
    assert inner.max() - inner.min() > 0.05


def test_table_indexing(table04):
    assert table04[2, 3] == table04.values[1, 2]
    assert table04.row_major()[5] == table04[2, 3]
    assert table04.mean == pytest.approx(TABLE_04.mean(), abs=1e-6)


def test_table_entries_in_unit_interval():
    for theta in np.linspace(0, np.pi, 7):
        t = success_table(float(theta))
        assert np.all(t.values >= -1e-12) and np.all(t.values <= 1 + 1e-12)


def test_table_rejects_bad_values():
    with pytest.raises(ValueError):
        SuccessTable(np.full((3, 3), 1.5), 0.0, "extended")
    with pytest.raises(ValueError):
        SuccessTable(np.ones((2, 3)), 0.0, "extended")


def test_ordering_check_on_synthetic_table():
    v = np.array([[0.5, 0.6, 0.6], [0.6, 0.9, 0.9], [0.6, 0.9, 0.8]])
    oc = ordering_check(SuccessTable(v, 0.1, "x"))
    assert oc.min_margin == pytest.approx(0.1)
    assert oc.edge_max == pytest.approx(0.6)
    assert oc.inner_min == pytest.approx(0.8)
    assert oc.corner_is_strict_min() and oc.edges_below_inner()


# --- sweep ------------------------------------------------------------------


def test_sweep_endpoints():
    res = sweep(0.0, np.pi, 2)
    assert len(res) == 2
    assert res.means[0] == pytest.approx(1.0, abs=1e-9)
    assert res.thetas[-1] == np.pi
    assert res.means[-1] == pytest.approx(4 / 9, abs=1e-9)


def test_sweep_row_count_and_grid():
    res = sweep(0.1, 0.5, 5)
    assert len(res) == 5
    assert np.allclose(res.thetas, np.linspace(0.1, 0.5, 5))
    assert np.all(np.diff(res.thetas) > 0)


def test_sweep_mean_is_table_mean():
    res = sweep(0.0, 1.0, 3)
    for p in res.points:
        assert p.mean == pytest.approx(p.table.values.mean(), abs=1e-15)


def test_sweep_monotone_on_half_range():
    means = sweep(0.0, np.pi / 2, 50).means
    assert np.all(np.diff(means) <= 1e-12)


@pytest.mark.parametrize(
    "lo, hi, steps",
    [(0.5, 0.5, 3), (-0.1, 1.0, 3), (0.0, 4.0, 3), (0.0, 1.0, 1), (0.0, 1.0, 2.5)],
)
def test_sweep_rejects(lo, hi, steps):
    with pytest.raises(ValueError):
        sweep(lo, hi, steps)


# --- classical --------------------------------------------------------------


def test_parity_triples():
    assert len(EVEN_TRIPLES) == 4 and len(ODD_TRIPLES) == 4


def test_classical_optimum():
    opt = classical_optimum()
    assert opt.probability == Fraction(8, 9)
    assert opt.max_wins == 8 and opt.rounds == 9
    assert opt.pairs_examined == 4096
    assert opt.n_optimal == CLASSICAL_MAXIMIZERS
    assert opt.example.wins() == 8


def test_classical_optimum_independent_count():
    counts = {}
    for alice in itertools.product(EVEN_TRIPLES, repeat=3):
        for bob in itertools.product(ODD_TRIPLES, repeat=3):
            w = sum(
                win_oracle(alice[a - 1], bob[b - 1], a, b) for a in (1, 2, 3) for b in (1, 2, 3)
            )
            counts[w] = counts.get(w, 0) + 1
    assert max(counts) == 8
    assert 9 not in counts
    assert counts[8] == CLASSICAL_MAXIMIZERS


def test_classical_strategy_parity_enforced():
    with pytest.raises(ValueError):
        ClassicalStrategy(((1, 0, 0),) * 3, ((0, 0, 1),) * 3)


# --- referee ----------------------------------------------------------------


def test_referee_uniform_on_tie():
    strat = referee_best_response(success_table(0.0, REFERENCE))
    assert np.allclose(strat.weights, 1 / 9)
    assert len(strat.support()) == 9


def test_referee_point_mass_at_05():
    strat = referee_best_response(success_table(0.5))
    assert [(r.a, r.b) for r in strat.support()] == [(1, 1)]
    assert strat.weights[0, 0] == 1.0


@pytest.mark.parametrize("theta", [0.0, 0.3, 0.9, 2.0, np.pi])
def test_referee_never_helps_players(theta):
    t = success_table(theta)
    best = referee_best_response(t).expected_win(t)
    assert best <= RefereeStrategy.uniform().expected_win(t) + 1e-15
    assert best == pytest.approx(t.minimum)


def test_referee_rejects_bad_weights():
    with pytest.raises(ValueError):
        RefereeStrategy(np.full((3, 3), 0.2))


# --- threshold --------------------------------------------------------------


def test_threshold_regression():
    theta = threshold_theta(8 / 9)
    assert 0 < theta < np.pi
    assert abs(theta - THRESHOLD_MEAN) <= 1e-6


def test_threshold_brackets_target():
    theta = threshold_theta(8 / 9)
    assert success_table(theta).mean <= 8 / 9
    assert success_table(theta - 2e-6).mean > 8 / 9


def test_threshold_min_not_above_mean():
    t_min = threshold_theta(8 / 9, statistic="min")
    assert abs(t_min - THRESHOLD_MIN) <= 1e-6
    assert t_min <= THRESHOLD_MEAN


def test_threshold_near_one():
    assert threshold_theta(1 - 1e-12) < 1e-5


def test_threshold_no_crossing():
    assert threshold_theta(8 / 9, backend=REFERENCE) is None


@pytest.mark.parametrize("target", [0.0, 1.0, 1.2])
def test_threshold_rejects_target(target):
    with pytest.raises(ValueError):
        threshold_theta(target)


def test_threshold_rejects_statistic():
    with pytest.raises(ValueError):
        threshold_theta(0.9, statistic="median")
