"""Three-player game between the channel-access attacker, the RIS drone and the BS.

Players and their scalar decisions:

* ``bs``  - sensing-data generation rate ``lambda_rate`` in [0, gamma_sense(g, sigma)]
* ``ris`` - amplification gain ``g`` in [0, g_max]
* ``att`` - injected noise power ``sigma_att_w`` in [0, nu * sigma^2]

The sequential solver updates the BS, then the RIS, then the attacker inside
each outer iteration; every update is a GSSPI line search followed by a
rollback test.  The solver only needs a :class:`BoxGame`, so the same code
also runs the synthetic reference games used in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import aoi
from .channels import ChannelSet
from .config import ScenarioConfig
from .gsspi import gsspi_minimize
from .isac import LinkMetrics, link_metrics

PLAYERS = ("bs", "ris", "att")
COORD = {"bs": "lambda_rate", "ris": "g", "att": "sigma_att_w"}
AOI_PENALTY_S = 1e9
LAMBDA_DECADES = 12.0
TIE_SLACK = 1e-12


@dataclass(frozen=True)
class Strategy:
    lambda_rate: float
    g: float
    sigma_att_w: float

    def get(self, player: str) -> float:
        return getattr(self, COORD[player])

    def with_(self, player: str, value: float) -> "Strategy":
        return replace(self, **{COORD[player]: float(value)})

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.lambda_rate, self.g, self.sigma_att_w)


@dataclass(frozen=True)
class UtilityTriple:
    u_bs: float
    u_ris: float
    u_att: float

    def of(self, player: str) -> float:
        return getattr(self, "u_" + player)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.u_bs, self.u_ris, self.u_att)


@dataclass(frozen=True)
class Evaluation:
    utilities: UtilityTriple
    aaoi: float = math.nan
    asinr: float = math.nan
    gamma_sense: float = math.nan


@dataclass(frozen=True)
class StageRecord:
    iteration: int
    player: str
    incumbent_utility: float
    candidate_utility: float
    accepted_utility: float
    accepted: bool


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    strategy: Strategy
    evaluation: Evaluation

    @property
    def utilities(self) -> UtilityTriple:
        return self.evaluation.utilities


@dataclass
class GameTrace:
    rows: list[IterationRecord] = field(default_factory=list)
    stages: list[StageRecord] = field(default_factory=list)
    termination: str = ""
    initial: Strategy | None = None

    @property
    def final(self) -> IterationRecord:
        if not self.rows:
            raise ValueError("empty trace")
        return self.rows[-1]

    def accepted_series(self, player: str) -> list[float]:
        return [s.accepted_utility for s in self.stages if s.player == player]


# --- games -----------------------------------------------------------------

class BoxGame:
    """Interface the solvers use.  Coordinates are searched linearly in their box."""

    def box(self, player: str, s: Strategy) -> tuple[float, float]:
        raise NotImplementedError

    def evaluate(self, s: Strategy) -> Evaluation:
        raise NotImplementedError

    def initial_strategy(self) -> Strategy:
        lo_hi = {p: self.box(p, Strategy(0.0, 0.0, 0.0)) for p in ("ris", "att")}
        s = Strategy(0.0, 0.5 * sum(lo_hi["ris"]), 0.5 * sum(lo_hi["att"]))
        return s.with_("bs", 0.5 * sum(self.box("bs", s)))

    def random_strategy(self, rng: np.random.Generator) -> Strategy:
        s = Strategy(0.0, 0.0, 0.0)
        for p in ("ris", "att", "bs"):
            lo, hi = self.box(p, s)
            s = s.with_(p, rng.uniform(lo, hi))
        return s

    # search coordinates; subclasses may warp them
    def search_interval(self, player: str, s: Strategy) -> tuple[float, float]:
        return self.box(player, s)

    def decode(self, player: str, t: float, s: Strategy) -> float:
        lo, hi = self.box(player, s)
        return min(max(t, lo), hi)

    def line_tol(self, player: str, s: Strategy, tol: float) -> float:
        lo, hi = self.box(player, s)
        return tol * max(hi - lo, 1e-300)

    def scale(self, player: str) -> float:
        """Normalisation used when measuring strategy distances."""
        return 1.0

    def clamp(self, s: Strategy) -> Strategy:
        for p in ("ris", "att", "bs"):
            lo, hi = self.box(p, s)
            s = s.with_(p, min(max(s.get(p), lo), hi))
        return s


def strategy_distance(game: BoxGame, a: Strategy, b: Strategy) -> float:
    """Max over players of the coordinate gap divided by the game's scale."""
    out = 0.0
    for p in PLAYERS:
        if p == "bs":
            den = max(abs(a.lambda_rate), abs(b.lambda_rate), 1e-300)
        else:
            den = game.scale(p)
        out = max(out, abs(a.get(p) - b.get(p)) / den)
    return out


class IsacGame(BoxGame):
    """The network game on one or more fixed channel realizations."""

    def __init__(self, cfg: ScenarioConfig, channels: ChannelSet | Sequence[ChannelSet],
                 aoi_fn=None):
        self.cfg = cfg
        self.channels = [channels] if isinstance(channels, ChannelSet) else list(channels)
        if not self.channels:
            raise ValueError("at least one channel realization is required")
        self.aoi_fn = aoi_fn or (lambda lam, gam: aoi.aaoi_value(lam, gam, cfg.aoi_model))
        self._cache: dict[tuple[float, float], tuple[float, float, np.ndarray]] = {}

    # link metrics only depend on (g, sigma); the BS line search reuses them
    def link(self, g: float, sigma: float) -> tuple[float, float, np.ndarray]:
        key = (float(g), float(sigma))
        hit = self._cache.get(key)
        if hit is None:
            ms: list[LinkMetrics] = [link_metrics(ch, g, sigma, self.cfg) for ch in self.channels]
            sinrs = np.mean([m.sinrs for m in ms], axis=0)
            hit = (float(np.mean([m.asinr for m in ms])),
                   float(np.mean([m.gamma_sense for m in ms])), sinrs)
            if len(self._cache) > 200_000:
                self._cache.clear()
            self._cache[key] = hit
        return hit

    def gamma_sense(self, g: float, sigma: float) -> float:
        return self.link(g, sigma)[1]

    def box(self, player: str, s: Strategy) -> tuple[float, float]:
        if player == "bs":
            return 0.0, self.gamma_sense(s.g, s.sigma_att_w)
        if player == "ris":
            return 0.0, self.cfg.g_max
        return 0.0, self.cfg.sigma_att_max_w

    def scale(self, player: str) -> float:
        return self.cfg.g_max if player == "ris" else self.cfg.sigma_att_max_w

    # lambda is searched on a log scale: the box spans many decades
    def search_interval(self, player, s):
        if player != "bs":
            return 0.0, 1.0
        gam = self.gamma_sense(s.g, s.sigma_att_w)
        if not gam > 0:
            return -1.0, 0.0
        top = math.log(gam)
        return top - LAMBDA_DECADES * math.log(10.0), top

    def decode(self, player, t, s):
        lo, hi = self.box(player, s)
        if player == "bs":
            return min(math.exp(t), hi) if hi > 0 else 0.0
        return min(max(lo + t * (hi - lo), lo), hi)

    def line_tol(self, player, s, tol):
        return tol

    def aaoi(self, lam: float, gam: float) -> float:
        if not (lam > 0 and lam < gam):
            return AOI_PENALTY_S
        try:
            value = self.aoi_fn(lam, gam)
        except (ZeroDivisionError, aoi.UtilizationError):
            return AOI_PENALTY_S
        return value if math.isfinite(value) else AOI_PENALTY_S

    def evaluate(self, s: Strategy) -> Evaluation:
        cfg = self.cfg
        asinr, gam, sinrs = self.link(s.g, s.sigma_att_w)
        age = self.aaoi(s.lambda_rate, gam)
        common = -cfg.zeta1 * age + cfg.zeta2 * asinr
        pen_follow = pen_att = 0.0
        if cfg.sinr_penalty > 0:
            thr = cfg.sinr_thresh
            pen_follow = cfg.sinr_penalty * float(np.sum(np.maximum(thr - sinrs, 0.0)))
            pen_att = cfg.sinr_penalty * float(np.sum(np.maximum(sinrs - thr, 0.0)))
        u = UtilityTriple(
            u_bs=common - cfg.cost_bs * s.lambda_rate - pen_follow,
            u_ris=common - cfg.cost_ris * s.g - pen_follow,
            u_att=-common - cfg.cost_att * s.sigma_att_w - pen_att,
        )
        return Evaluation(utilities=u, aaoi=age, asinr=asinr, gamma_sense=gam)


class QuadraticGame(BoxGame):
    """Reference game u_i = -(x_i - a_i - c * sum_{j != i} x_j)^2 - cost_i x_i on fixed boxes.

    With ``cost = 0`` and interior targets, the sequential (and simultaneous)
    best-response fixed point solves x = a + c (S - x) with S the coordinate sum.
    """

    def __init__(self, targets=(0.3, 0.6, 0.2), coupling=0.05,
                 boxes=((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)), costs=(0.0, 0.0, 0.0)):
        self.targets = dict(zip(PLAYERS, targets))
        self.coupling = coupling
        self.boxes = dict(zip(PLAYERS, boxes))
        self.costs = dict(zip(PLAYERS, costs))

    def box(self, player, s):
        return self.boxes[player]

    def scale(self, player):
        lo, hi = self.boxes[player]
        return hi - lo

    def equilibrium(self) -> Strategy:
        a = np.array([self.targets[p] for p in PLAYERS])
        c = self.coupling
        total = a.sum() / (1.0 - 2.0 * c)
        return Strategy(*((a + c * total) / (1.0 + c)))

    def evaluate(self, s):
        x = dict(zip(PLAYERS, s.as_tuple()))
        total = sum(x.values())
        u = [-(x[p] - self.targets[p] - self.coupling * (total - x[p])) ** 2 - self.costs[p] * x[p]
             for p in PLAYERS]
        return Evaluation(utilities=UtilityTriple(*u))


# --- solvers -----------------------------------------------------------------

def best_response(game: BoxGame, player: str, s: Strategy, tol: float, iter_max: int) -> Strategy:
    """GSSPI line search of ``player``'s own utility with the others held fixed."""
    lo, hi = game.search_interval(player, s)

    def neg_u(t: float) -> float:
        return -game.evaluate(s.with_(player, game.decode(player, t, s))).utilities.of(player)

    t_opt, _, _ = gsspi_minimize(neg_u, lo, hi, tol=game.line_tol(player, s, tol), iter_max=iter_max)
    return s.with_(player, game.decode(player, t_opt, s))


def _solver_params(cfg: ScenarioConfig | None, tol, iter_inner, iter_outer):
    if cfg is not None:
        tol = cfg.tol if tol is None else tol
        iter_inner = cfg.iter_max_inner if iter_inner is None else iter_inner
        iter_outer = cfg.iter_max_outer if iter_outer is None else iter_outer
    return (1e-6 if tol is None else tol, 25 if iter_inner is None else iter_inner,
            25 if iter_outer is None else iter_outer)


def solve_stackelberg(game: BoxGame, cfg: ScenarioConfig | None = None, initial: Strategy | None = None,
                      tol: float | None = None, iter_max_inner: int | None = None,
                      iter_max_outer: int | None = None, rollback: str | None = None) -> GameTrace:
    """Sequential best responses BS -> RIS -> attacker with a rollback test per stage.

    ``rollback="incumbent"`` keeps a candidate only if it does not lower the
    player's utility relative to its previous strategy against the current
    opponents.  ``rollback="record"`` compares against the utility the player
    recorded at its last update instead.
    """
    tol, iter_inner, iter_outer = _solver_params(cfg, tol, iter_max_inner, iter_max_outer)
    rollback = rollback or (cfg.rollback if cfg is not None else "incumbent")
    if rollback not in ("incumbent", "record"):
        raise ValueError(f"unknown rollback mode {rollback!r}")

    s = game.clamp(initial if initial is not None else game.initial_strategy())
    trace = GameTrace(initial=s)
    record = {p: game.evaluate(s).utilities.of(p) for p in PLAYERS}

    for it in range(1, iter_outer + 1):
        prev = s
        for p in PLAYERS:
            s = game.clamp(s)
            incumbent = game.evaluate(s).utilities.of(p)
            cand = best_response(game, p, s, tol, iter_inner)
            u_cand = game.evaluate(cand).utilities.of(p)
            reference = incumbent if rollback == "incumbent" else record[p]
            # ties within round-off count as "not decreased"
            accepted = u_cand >= reference - TIE_SLACK * max(1.0, abs(reference))
            if accepted:
                s = cand
                record[p] = u_cand
            elif rollback == "incumbent":
                record[p] = incumbent
            accepted_u = record[p]
            trace.stages.append(StageRecord(it, p, incumbent, u_cand, accepted_u, accepted))
        s = game.clamp(s)
        trace.rows.append(IterationRecord(it, s, game.evaluate(s)))
        if strategy_distance(game, prev, s) <= tol:
            trace.termination = "converged"
            return trace
    trace.termination = "iter_max"
    return trace


def solve_nash(game: BoxGame, cfg: ScenarioConfig | None = None, initial: Strategy | None = None,
               tol: float | None = None, iter_max_inner: int | None = None,
               iter_max_outer: int | None = None) -> GameTrace:
    """Simultaneous (Jacobi) best responses against the previous iterate."""
    tol, iter_inner, iter_outer = _solver_params(cfg, tol, iter_max_inner, iter_max_outer)
    s = game.clamp(initial if initial is not None else game.initial_strategy())
    trace = GameTrace(initial=s)
    for it in range(1, iter_outer + 1):
        prev = s
        moves = {p: best_response(game, p, prev, tol, iter_inner).get(p) for p in PLAYERS}
        s = game.clamp(Strategy(moves["bs"], moves["ris"], moves["att"]))
        trace.rows.append(IterationRecord(it, s, game.evaluate(s)))
        if strategy_distance(game, prev, s) <= tol:
            trace.termination = "converged"
            return trace
    trace.termination = "iter_max"
    return trace


@dataclass(frozen=True)
class UniquenessReport:
    starts: list[Strategy]
    finals: list[Strategy]
    utilities: list[UtilityTriple]
    max_strategy_distance: float
    max_utility_gap: float
    threshold: float
    offending: tuple[int, int] | None

    @property
    def unique(self) -> bool:
        return self.max_strategy_distance <= self.threshold


def uniqueness_probe(game: BoxGame, cfg: ScenarioConfig | None, n_starts: int,
                     rng: np.random.Generator, tol: float | None = None) -> UniquenessReport:
    """Solve from ``n_starts`` random initial strategies and compare the end points."""
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    tol = _solver_params(cfg, tol, None, None)[0]
    starts, finals, utils = [], [], []
    for _ in range(n_starts):
        start = game.random_strategy(rng)
        tr = solve_stackelberg(game, cfg, initial=start, tol=tol)
        starts.append(start)
        finals.append(tr.final.strategy)
        utils.append(tr.final.utilities)
    worst, pair, ugap = 0.0, None, 0.0
    for i in range(n_starts):
        for j in range(i + 1, n_starts):
            d = strategy_distance(game, finals[i], finals[j])
            if d > worst:
                worst, pair = d, (i, j)
            ugap = max(ugap, max(abs(x - y) for x, y in zip(utils[i].as_tuple(), utils[j].as_tuple())))
    return UniquenessReport(starts, finals, utils, worst, ugap, 100.0 * tol,
                            pair if worst > 100.0 * tol else None)
