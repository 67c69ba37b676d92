import numpy as np
import pytest

from lawn_isac.baselines import (GaOptions, ga_maximize, random_baseline_summary, solve_baseline)
from lawn_isac.game import IsacGame, QuadraticGame, Strategy


class FixedCapacityGame(QuadraticGame):
    def box(self, player, s):
        return {"bs": (0.0, 2.0), "ris": (0.0, 1.0), "att": (0.0, 4e-14)}[player]


def test_average_is_box_midpoint():
    s, _ = solve_baseline("Average", FixedCapacityGame())
    assert s == Strategy(1.0, 0.5, 2e-14)


def test_average_lambda_uses_current_capacity(default_game):
    s, _ = solve_baseline("Average", default_game)
    assert s.g == 0.5
    assert s.lambda_rate == pytest.approx(0.5 * default_game.gamma_sense(s.g, s.sigma_att_w))


def test_random_reproducible_and_in_box(default_game):
    a = solve_baseline("Random", default_game, np.random.default_rng(3))
    b = solve_baseline("Random", default_game, np.random.default_rng(3))
    assert a == b
    s = a[0]
    assert 0 <= s.g <= 1 and 0 <= s.lambda_rate <= default_game.gamma_sense(s.g, s.sigma_att_w)


def test_ga_on_quadratic():
    x, fx = ga_maximize(lambda x: -(x - 2) ** 2, 0.0, 5.0, np.random.default_rng(0))
    assert x == pytest.approx(2.0, abs=1e-2)


def test_ga_respects_bounds():
    x, _ = ga_maximize(lambda x: x, 0.0, 1.0, np.random.default_rng(1), GaOptions(generations=20))
    assert 0.0 <= x <= 1.0 and x > 0.95


def test_ga_game_baseline_near_equilibrium():
    game = QuadraticGame()
    s, u = solve_baseline("GA", game, np.random.default_rng(0), GaOptions(rounds=4))
    assert np.allclose(s.as_tuple(), game.equilibrium().as_tuple(), atol=2e-2)


def test_unknown_kind():
    with pytest.raises(ValueError):
        solve_baseline("Annealing", QuadraticGame())


def test_random_summary_median_vs_mean(default_game):
    med = random_baseline_summary(default_game, np.random.default_rng(5), 500)
    again = random_baseline_summary(default_game, np.random.default_rng(5), 500)
    assert med == again
    mean = random_baseline_summary(default_game, np.random.default_rng(5), 500, statistic="mean")
    # the age of a random profile is heavy tailed: the mean sits far above the median
    assert mean.aaoi > med.aaoi
    with pytest.raises(ValueError):
        random_baseline_summary(default_game, np.random.default_rng(5), 0)
