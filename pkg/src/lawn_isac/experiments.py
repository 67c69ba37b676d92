"""Experiment drivers that turn solver runs into flat, deterministic tables.

Every table is a list of dicts with a fixed column order; :func:`write_table`
serialises it as comma-separated text with floats in round-trip ``repr`` form,
plus an optional JSON sidecar with the config echo and the code version.
"""
from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .aoi import aaoi_value
from .baselines import GaOptions, random_baseline_summary, solve_baseline
from .channels import draw_channel_realizations
from .config import ConfigError, ScenarioConfig, config_to_dict
from .game import (Evaluation, IsacGame, Strategy, solve_nash, solve_stackelberg,
                   uniqueness_probe)
from .queue_sim import simulate_aoi

SCHEMES = ("stackelberg", "nash", "average", "random", "ga")
RANDOM_DRAWS = 10_000

TRACE_COLUMNS = ("iter", "lambda_rate", "g", "sigma_att_w", "u_bs", "u_ris", "u_att", "aaoi", "asinr")
SCHEME_COLUMNS = ("scheme", "lambda_rate", "g", "sigma_att_w", "u_bs", "u_ris", "u_att", "aaoi", "asinr")
SWEEP_COLUMNS = ("parameter", "value", "scheme", "runs", "u_bs", "u_ris", "u_att", "aaoi", "asinr")
AOI_COLUMNS = ("model", "rho", "closed_form", "simulated", "half_width_95", "rel_error", "tolerance", "status")
UNIQ_COLUMNS = ("start", "start_lambda_rate", "start_g", "start_sigma_att_w",
                "lambda_rate", "g", "sigma_att_w", "u_bs", "u_ris", "u_att")


@dataclass(frozen=True)
class SweepParam:
    name: str
    config_key: str
    cast: type


SWEEP_PARAMS = {
    "ris_elements": SweepParam("ris_elements", "p_elements", int),
    "tx_antennas": SweepParam("tx_antennas", "m_antennas", int),
    "epsilon_si": SweepParam("epsilon_si", "epsilon_si", float),
    "user_radius": SweepParam("user_radius", "user_radius", float),
    "sigma_att_bound": SweepParam("sigma_att_bound", "nu", float),
}


def version_string() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             cwd=Path(__file__).resolve().parent, capture_output=True,
                             text=True, timeout=10)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def build_game(cfg: ScenarioConfig) -> IsacGame:
    return IsacGame(cfg, draw_channel_realizations(cfg))


def _eval_row(s: Strategy | None, ev: Evaluation) -> dict:
    u = ev.utilities
    row = {"u_bs": u.u_bs, "u_ris": u.u_ris, "u_att": u.u_att, "aaoi": ev.aaoi, "asinr": ev.asinr}
    if s is not None:
        row.update(lambda_rate=s.lambda_rate, g=s.g, sigma_att_w=s.sigma_att_w)
    return row


# --- tables --------------------------------------------------------------------

def converge_table(cfg: ScenarioConfig):
    game = build_game(cfg)
    trace = solve_stackelberg(game, cfg)
    rows = [{"iter": r.iteration, **_eval_row(r.strategy, r.evaluation)} for r in trace.rows]
    return rows, trace


def scheme_results(cfg: ScenarioConfig, schemes: Sequence[str] = SCHEMES,
                   random_draws: int = RANDOM_DRAWS, ga_options: GaOptions = GaOptions(),
                   game: IsacGame | None = None) -> dict[str, tuple[Strategy | None, Evaluation]]:
    """One evaluation per scheme.  ``random`` is the per-quantity median over ``random_draws`` draws."""
    game = game or build_game(cfg)
    out = {}
    for name in schemes:
        if name == "stackelberg":
            f = solve_stackelberg(game, cfg).final
            out[name] = (f.strategy, f.evaluation)
        elif name == "nash":
            f = solve_nash(game, cfg).final
            out[name] = (f.strategy, f.evaluation)
        elif name == "average":
            s, _ = solve_baseline("Average", game)
            out[name] = (s, game.evaluate(s))
        elif name == "random":
            out[name] = (None, random_baseline_summary(game, cfg.rng(1), random_draws))
        elif name == "ga":
            s, _ = solve_baseline("GA", game, cfg.rng(2), ga_options)
            out[name] = (s, game.evaluate(s))
        else:
            raise ConfigError(f"unknown scheme {name!r}; expected one of {SCHEMES}", "scheme")
    return out


def baselines_table(cfg: ScenarioConfig, schemes: Sequence[str] = SCHEMES, **kw):
    res = scheme_results(cfg, schemes, **kw)
    rows = []
    for name in schemes:
        s, ev = res[name]
        row = {"scheme": name, **_eval_row(s, ev)}
        if s is None:
            row.update(lambda_rate=float("nan"), g=float("nan"), sigma_att_w=float("nan"))
        rows.append(row)
    return rows


def parse_sweep_values(param: str, text: str) -> list:
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter {param!r}; expected one of {sorted(SWEEP_PARAMS)}",
                          "param")
    sweep = SWEEP_PARAMS[param]
    values = []
    for item in (t.strip() for t in text.split(",")):
        if not item:
            continue
        try:
            number = float(item)
        except ValueError:
            raise ConfigError(f"invalid value {item!r} for {param}", param) from None
        if sweep.cast is int:
            if number != int(number):
                raise ConfigError(f"invalid value {item!r} for {param}: expected an integer", param)
            number = int(number)
        values.append(number)
    if not values:
        raise ConfigError(f"empty value list for {param}", param)
    return values


def sweep_table(cfg: ScenarioConfig, param: str, values: Iterable, runs: int = 1,
                schemes: Sequence[str] = SCHEMES, **kw):
    """Scheme results averaged over ``runs`` seeds (``seed``, ``seed + 1``, ...) per value."""
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter {param!r}", "param")
    if runs < 1:
        raise ConfigError("runs must be >= 1", "runs")
    key = SWEEP_PARAMS[param].config_key
    rows = []
    for value in values:
        try:
            point_cfg = cfg.replace(**{key: value})
        except ConfigError as exc:
            raise ConfigError(f"invalid value {value!r} for {param}: {exc}", param) from exc
        acc = {name: [] for name in schemes}
        for r in range(runs):
            res = scheme_results(point_cfg.replace(seed=(cfg.seed + r) % 2**64), schemes, **kw)
            for name in schemes:
                acc[name].append(_eval_row(None, res[name][1]))
        for name in schemes:
            mean = {c: float(np.mean([row[c] for row in acc[name]]))
                    for c in ("u_bs", "u_ris", "u_att", "aaoi", "asinr")}
            rows.append({"parameter": param, "value": value, "scheme": name, "runs": runs, **mean})
    order = {name: i for i, name in enumerate(SCHEMES)}
    rows.sort(key=lambda r: (r["value"], order.get(r["scheme"], 99)))
    return rows


AOI_TOLERANCE = {"MM1": 0.02, "DM1": 0.02, "MD1": 0.03}


def aoi_validation_table(rhos=(0.2, 0.5, 0.8), models=("MM1", "DM1", "MD1"),
                         n_deliveries: int = 1_000_000, seed: int = 2025,
                         wrong_formula: bool = False):
    """Closed form against the simulator at service rate 1.

    ``wrong_formula`` is a negative control: it scores the M/M/1 expression for
    every model, which must fail for the deterministic disciplines.
    """
    rows = []
    for i, model in enumerate(models):
        for j, rho in enumerate(rhos):
            closed = aaoi_value(rho, 1.0, "MM1" if wrong_formula else model)
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i, j)))
            sim = simulate_aoi(model, rho, 1.0, n_deliveries, rng)
            rel = abs(closed - sim.aaoi_est_s) / sim.aaoi_est_s
            tol = AOI_TOLERANCE[model]
            rows.append({"model": model, "rho": rho, "closed_form": closed,
                         "simulated": sim.aaoi_est_s, "half_width_95": sim.half_width_95,
                         "rel_error": rel, "tolerance": tol, "status": "PASS" if rel <= tol else "FAIL"})
    return rows


def uniqueness_table(cfg: ScenarioConfig, n_starts: int = 10):
    game = build_game(cfg)
    report = uniqueness_probe(game, cfg, n_starts, cfg.rng(3))
    rows = []
    for i, (s0, s1, u) in enumerate(zip(report.starts, report.finals, report.utilities)):
        rows.append({"start": i, "start_lambda_rate": s0.lambda_rate, "start_g": s0.g,
                     "start_sigma_att_w": s0.sigma_att_w, "lambda_rate": s1.lambda_rate, "g": s1.g,
                     "sigma_att_w": s1.sigma_att_w, "u_bs": u.u_bs, "u_ris": u.u_ris, "u_att": u.u_att})
    return rows, report


# --- serialisation ---------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def format_table(rows: Sequence[dict], columns: Sequence[str]) -> str:
    lines = [",".join(columns)]
    lines += [",".join(_fmt(row[c]) for c in columns) for row in rows]
    return "\n".join(lines) + "\n"


def metadata(cfg: ScenarioConfig | None, command: str, extra: dict | None = None) -> str:
    doc = {"command": command, "version": version_string()}
    if cfg is not None:
        doc["config"] = config_to_dict(cfg)
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True, default=_fmt) + "\n"


def write_table(path: str | Path, rows, columns, meta: str | None = None) -> None:
    path = Path(path)
    path.write_text(format_table(rows, columns))
    if meta is not None:
        path.with_name(path.name + ".meta.json").write_text(meta)
