"""Scenario parameters for the RIS-assisted low-altitude ISAC network.

A :class:`ScenarioConfig` is immutable once built. Text documents are flat JSON
objects whose keys are exactly the field names; absent keys take the defaults
below and unknown keys are rejected.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

AOI_MODELS = ("MM1", "DM1", "MD1")
RIS_PHASE_MODES = ("aligned", "identity")
ROLLBACK_MODES = ("incumbent", "record")


class ConfigError(ValueError):
    """Raised for malformed documents or out-of-range values."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class ScenarioConfig:
    # geometry and array sizes (Table 1)
    m_antennas: int = 4
    n_users: int = 2
    p_elements: int = 16
    pos_bs: tuple[float, float, float] = (0.0, 0.0, 1.5)
    pos_ris: tuple[float, float, float] = (5.0, 10.0, 1.5)
    pos_target: tuple[float, float, float] = (0.0, 60.0, 1.5)
    pos_user_centroid: tuple[float, float, float] = (30.0, 10.0, 1.5)
    user_radius: float = 10.0

    # propagation
    carrier_freq_hz: float = 3e9
    bandwidth_hz: float = 1e7
    beta1: float = 2.2
    beta2_db: float = 32.45
    beta3: float = 2.0
    beta4_db_std: float = 0.0
    rician_k: float = 10.0
    corr_bs: float = 0.0
    corr_ris: float = 0.0
    rcs_m2: float = 1e7
    ris_phase: str = "aligned"

    # radio front end
    epsilon_si: float = 0.1
    noise_psd_dbm_hz: float = -174.0
    p_trans_w: float = 0.9
    sensing_power_fraction: float = 0.5

    # game
    g_max: float = 1.0
    nu: float = 1.0
    sinr_thresh_db: float = 5.0
    sinr_penalty: float = 0.0
    zeta1: float = 0.2
    zeta2: float = 1.0
    cost_bs: float = 1.0
    cost_ris: float = 1.0
    cost_att: float = 1e13
    aoi_model: str = "MM1"
    rollback: str = "incumbent"

    # solver
    iter_max_inner: int = 25
    iter_max_outer: int = 25
    tol: float = 1e-6
    seed: int = 2025
    channel_realizations: int = 1

    def __post_init__(self):
        for name in ("pos_bs", "pos_ris", "pos_target", "pos_user_centroid"):
            value = tuple(float(v) for v in getattr(self, name))
            if len(value) != 3 or not all(math.isfinite(v) for v in value):
                raise ConfigError(f"{name} must be three finite coordinates", name)
            object.__setattr__(self, name, value)

        for name in ("m_antennas", "n_users", "p_elements", "iter_max_inner",
                     "iter_max_outer", "channel_realizations"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}", name)
            object.__setattr__(self, name, int(value))

        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) \
                or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}", "seed")
        object.__setattr__(self, "seed", int(self.seed))

        for f in dataclasses.fields(self):
            if f.type == "float":
                value = getattr(self, f.name)
                if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                    raise ConfigError(f"{f.name} must be a number, got {value!r}", f.name)
                value = float(value)
                if not math.isfinite(value):
                    raise ConfigError(f"{f.name} must be finite", f.name)
                object.__setattr__(self, f.name, value)

        positive = ("user_radius", "carrier_freq_hz", "bandwidth_hz", "p_trans_w",
                    "g_max", "nu", "tol", "zeta1", "zeta2", "cost_bs", "cost_ris", "cost_att")
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be strictly positive", name)
        for name in ("rcs_m2", "beta4_db_std", "rician_k", "sinr_penalty"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative", name)
        for name in ("epsilon_si", "sensing_power_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]", name)
        for name in ("corr_bs", "corr_ris"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ConfigError(f"{name} must lie in [0, 1)", name)

        if self.aoi_model not in AOI_MODELS:
            raise ConfigError(f"aoi_model must be one of {AOI_MODELS}", "aoi_model")
        if self.ris_phase not in RIS_PHASE_MODES:
            raise ConfigError(f"ris_phase must be one of {RIS_PHASE_MODES}", "ris_phase")
        if self.rollback not in ROLLBACK_MODES:
            raise ConfigError(f"rollback must be one of {ROLLBACK_MODES}", "rollback")

        if not math.isfinite(self.noise_power_w) or self.noise_power_w <= 0:
            raise ConfigError("noise_psd_dbm_hz and bandwidth_hz give a non-finite noise power",
                              "noise_psd_dbm_hz")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq_hz

    @property
    def noise_power_w(self) -> float:
        return noise_power_w(self)

    @property
    def sigma_att_max_w(self) -> float:
        """Upper end of the attacker's noise-power box."""
        return self.nu * self.noise_power_w

    @property
    def sinr_thresh(self) -> float:
        return 10.0 ** (self.sinr_thresh_db / 10.0)

    def replace(self, **changes: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def rng(self, *key: int) -> np.random.Generator:
        """Generator seeded from ``seed`` plus an optional integer path."""
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=tuple(key)))


def noise_power_w(cfg: ScenarioConfig) -> float:
    """In-band noise power in watts: PSD (dBm/Hz) times bandwidth."""
    return 10.0 ** ((cfg.noise_psd_dbm_hz - 30.0) / 10.0) * cfg.bandwidth_hz


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}


def config_from_dict(values: dict[str, Any]) -> ScenarioConfig:
    unknown = sorted(set(values) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}", unknown[0])
    try:
        return ScenarioConfig(**values)
    except TypeError as exc:  # e.g. comparisons on strings where numbers are expected
        raise ConfigError(str(exc)) from exc


def load_config(source: str) -> ScenarioConfig:
    """Parse a flat JSON document; an empty document yields the defaults."""
    if not source.strip():
        return ScenarioConfig()
    try:
        values = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc
    if not isinstance(values, dict):
        raise ConfigError("config document must be a flat key/value object")
    for key, value in values.items():
        if isinstance(value, dict):
            raise ConfigError(f"{key}: nested objects are not allowed", key)
    return config_from_dict(values)


def load_config_file(path: str | Path) -> ScenarioConfig:
    return load_config(Path(path).read_text())


def config_to_dict(cfg: ScenarioConfig) -> dict[str, Any]:
    out = dataclasses.asdict(cfg)
    for key, value in out.items():
        if isinstance(value, tuple):
            out[key] = list(value)
    return out


def dump_config(cfg: ScenarioConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n"
