"""Reference strategies the equilibrium is compared against.

* Average: every decision at the middle of its box.
* Random: every decision drawn uniformly from its box.
* GA: each player runs a small real-coded genetic algorithm on its own
  utility, in the same BS -> RIS -> attacker order as the equilibrium solver.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import PLAYERS, BoxGame, Evaluation, Strategy, UtilityTriple

KINDS = ("Average", "Random", "GA")


@dataclass(frozen=True)
class GaOptions:
    population: int = 50
    generations: int = 100
    tournament: int = 3
    crossover_rate: float = 0.8
    mutation_rate: float = 0.1
    mutation_scale: float = 0.05   # fraction of the box width
    blend_alpha: float = 0.5
    rounds: int = 3


def ga_maximize(f, lo: float, hi: float, rng: np.random.Generator,
                opts: GaOptions = GaOptions()) -> tuple[float, float]:
    """Maximise a scalar ``f`` on ``[lo, hi]``; returns (best x, best f).

    Tournament selection, blend (BLX-alpha) crossover, Gaussian mutation and
    single-individual elitism.
    """
    if not lo < hi:
        raise ValueError(f"invalid bracket [{lo}, {hi}]")
    width = hi - lo
    pop = rng.uniform(lo, hi, opts.population)
    fit = np.array([f(x) for x in pop])
    for _ in range(opts.generations):
        elite = pop[np.argmax(fit)]
        picks = rng.integers(0, opts.population, (opts.population, opts.tournament))
        parents = pop[picks[np.arange(opts.population), np.argmax(fit[picks], axis=1)]]
        mates = rng.permutation(parents)
        cross = rng.random(opts.population) < opts.crossover_rate
        u = rng.uniform(-opts.blend_alpha, 1.0 + opts.blend_alpha, opts.population)
        children = np.where(cross, parents + u * (mates - parents), parents)
        mutate = rng.random(opts.population) < opts.mutation_rate
        children = children + mutate * rng.normal(0.0, opts.mutation_scale * width, opts.population)
        children = np.clip(children, lo, hi)
        children[0] = elite
        pop = children
        fit = np.array([f(x) for x in pop])
    best = int(np.argmax(fit))
    return float(pop[best]), float(fit[best])


def average_strategy(game: BoxGame) -> Strategy:
    return game.initial_strategy()


def random_strategy(game: BoxGame, rng: np.random.Generator) -> Strategy:
    return game.random_strategy(rng)


def ga_strategy(game: BoxGame, rng: np.random.Generator, opts: GaOptions = GaOptions(),
                initial: Strategy | None = None) -> Strategy:
    s = game.clamp(initial if initial is not None else game.initial_strategy())
    for _ in range(opts.rounds):
        for p in PLAYERS:
            s = game.clamp(s)
            lo, hi = game.search_interval(p, s)
            base = s

            def fitness(t, p=p, base=base):
                return game.evaluate(base.with_(p, game.decode(p, t, base))).utilities.of(p)

            t_best, _ = ga_maximize(fitness, lo, hi, rng, opts)
            s = base.with_(p, game.decode(p, t_best, base))
    return game.clamp(s)


def solve_baseline(kind: str, game: BoxGame, rng: np.random.Generator | None = None,
                   ga_options: GaOptions = GaOptions()) -> tuple[Strategy, UtilityTriple]:
    if kind not in KINDS:
        raise ValueError(f"unknown baseline {kind!r}; expected one of {KINDS}")
    if rng is None:
        rng = np.random.default_rng(0)
    if kind == "Average":
        s = average_strategy(game)
    elif kind == "Random":
        s = random_strategy(game, rng)
    else:
        s = ga_strategy(game, rng, ga_options)
    return s, game.evaluate(s).utilities


def random_baseline_summary(game: BoxGame, rng: np.random.Generator, n_draws: int = 10_000,
                            statistic: str = "median") -> Evaluation:
    """Summary of utilities, age and SINR over independent random strategies.

    With lambda uniform on [0, gamma] the age has an infinite mean (1/lambda is
    not integrable at 0), so sample means are dominated by the single smallest
    draw.  The per-quantity median is the default summary for that reason.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    if statistic not in ("median", "mean"):
        raise ValueError("statistic must be 'median' or 'mean'")
    reduce = np.median if statistic == "median" else np.mean
    evals = [game.evaluate(random_strategy(game, rng)) for _ in range(n_draws)]
    u = reduce(np.array([e.utilities.as_tuple() for e in evals]), axis=0)
    return Evaluation(utilities=UtilityTriple(*map(float, u)),
                      aaoi=float(reduce([e.aaoi for e in evals])),
                      asinr=float(reduce([e.asinr for e in evals])),
                      gamma_sense=float(reduce([e.gamma_sense for e in evals])))
