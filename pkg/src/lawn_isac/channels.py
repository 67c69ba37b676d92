"""Stochastic channel realizations for the BS, RIS drone, users and target.

Conventions
-----------
* ``H`` is the P x M BS-to-RIS matrix, ``h1[i]`` the length-P RIS-to-user
  vector and ``h2[i]`` the length-M BS-to-user vector of user ``i``.  A user
  receives ``h1[i]^H Phi H s + h2[i]^H s``.
* Angles are the azimuth ``atan2(dy, dx)`` of the vector pointing from an
  array towards the far end of the link; both arrays are uniform linear
  arrays with half-wavelength spacing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ScenarioConfig

R0_M = 1.0
F0_HZ = 1e9


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelSet:
    H: np.ndarray            # (P, M)
    h1: np.ndarray           # (N, P)
    h2: np.ndarray           # (N, M)
    T: np.ndarray            # (P, P)
    beta5: float
    ris_phases: np.ndarray   # (P,) unit-modulus RIS phase profile
    a3: np.ndarray           # (P,) target steering vector at the RIS

    @property
    def dims(self) -> tuple[int, int, int]:
        """(P, M, N)."""
        return self.H.shape[0], self.H.shape[1], self.h1.shape[0]


def path_loss_db(distance_m: float, freq_hz: float, beta1: float, beta2_db: float,
                 beta3: float, shadowing_db: float = 0.0) -> float:
    """Large-scale loss 10 b1 log10(r/r0) + b2 + 10 b3 log10(f/f0) + b4 in dB."""
    if not distance_m >= R0_M:
        raise ValueError(f"distance {distance_m} m is below the 1 m reference distance")
    if freq_hz <= 0:
        raise ValueError("frequency must be positive")
    return (10.0 * beta1 * math.log10(distance_m / R0_M) + beta2_db
            + 10.0 * beta3 * math.log10(freq_hz / F0_HZ) + shadowing_db)


def db_to_gain(loss_db: float) -> float:
    return 10.0 ** (-loss_db / 10.0)


def array_response(angle_rad: float, n_elements: int, spacing_over_wavelength: float = 0.5) -> np.ndarray:
    """ULA steering vector with entries exp(-j 2 pi d k sin(theta))."""
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    k = np.arange(n_elements)
    return np.exp(-2j * np.pi * spacing_over_wavelength * k * np.sin(angle_rad))


def sensing_amplitude(wavelength_m: float, rcs_m2: float, range_m: float) -> float:
    """Monostatic radar amplitude sqrt(w^2 S / ((4 pi)^3 R^4))."""
    if not range_m > 0:
        raise ValueError("range must be positive")
    return math.sqrt(wavelength_m**2 * rcs_m2 / ((4.0 * math.pi) ** 3 * range_m**4))


def azimuth(src, dst) -> float:
    d = np.asarray(dst, dtype=float) - np.asarray(src, dtype=float)
    if np.linalg.norm(d) == 0.0:
        raise GeometryError(f"coincident positions {tuple(src)} and {tuple(dst)}")
    return math.atan2(d[1], d[0])


def distance(src, dst) -> float:
    d = float(np.linalg.norm(np.asarray(dst, dtype=float) - np.asarray(src, dtype=float)))
    if d == 0.0:
        raise GeometryError(f"coincident positions {tuple(src)} and {tuple(dst)}")
    return d


def exp_correlation(n: int, r: float) -> np.ndarray:
    idx = np.arange(n)
    return r ** np.abs(idx[:, None] - idx[None, :])


def crandn(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """Standard circularly-symmetric complex normal samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def draw_user_positions(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniform draws on the disc of radius ``user_radius`` around the centroid."""
    r = cfg.user_radius * np.sqrt(rng.random(cfg.n_users))
    phi = 2.0 * np.pi * rng.random(cfg.n_users)
    pos = np.tile(np.asarray(cfg.pos_user_centroid), (cfg.n_users, 1))
    pos[:, 0] += r * np.cos(phi)
    pos[:, 1] += r * np.sin(phi)
    return pos


def _link_gain(cfg: ScenarioConfig, d: float, rng: np.random.Generator) -> float:
    shadow = rng.normal(0.0, cfg.beta4_db_std) if cfg.beta4_db_std > 0 else 0.0
    return db_to_gain(path_loss_db(max(d, R0_M), cfg.carrier_freq_hz, cfg.beta1,
                                   cfg.beta2_db, cfg.beta3, shadow))


def rician_matrix(cfg: ScenarioConfig, rng: np.random.Generator,
                  theta_bs: float, theta_ris: float) -> np.ndarray:
    """Unit-gain Rician BS-to-RIS matrix (LoS a2 a1^H plus Kronecker-coloured NLoS)."""
    M, P = cfg.m_antennas, cfg.p_elements
    los = np.outer(array_response(theta_ris, P), array_response(theta_bs, M).conj())
    nlos = crandn(rng, P, M)
    if cfg.corr_ris > 0:
        nlos = np.linalg.cholesky(exp_correlation(P, cfg.corr_ris)) @ nlos
    if cfg.corr_bs > 0:
        nlos = nlos @ np.linalg.cholesky(exp_correlation(M, cfg.corr_bs)).T
    k = cfg.rician_k
    return math.sqrt(k / (1.0 + k)) * los + math.sqrt(1.0 / (1.0 + k)) * nlos


def draw_channels(cfg: ScenarioConfig, rng: np.random.Generator | None = None) -> ChannelSet:
    """One realization of every link.

    Each link draws from its own child stream of ``rng`` so that changing
    one dimension (e.g. the RIS size) leaves the other links untouched.
    """
    if rng is None:
        rng = cfg.rng()
    rng_users, rng_h2, rng_h, rng_h1 = rng.spawn(4)
    M, N, P = cfg.m_antennas, cfg.n_users, cfg.p_elements

    theta1 = azimuth(cfg.pos_bs, cfg.pos_ris)
    theta2 = azimuth(cfg.pos_ris, cfg.pos_bs)
    theta3 = azimuth(cfg.pos_ris, cfg.pos_target)

    users = draw_user_positions(cfg, rng_users)
    h2 = np.empty((N, M), dtype=complex)
    for i in range(N):
        gain = _link_gain(cfg, distance(cfg.pos_bs, users[i]), rng_h2)
        h2[i] = math.sqrt(gain) * crandn(rng_h2, M)

    gain_h = _link_gain(cfg, distance(cfg.pos_bs, cfg.pos_ris), rng_h)
    H = math.sqrt(gain_h) * rician_matrix(cfg, rng_h, theta1, theta2)

    h1 = np.empty((N, P), dtype=complex)
    for i in range(N):
        gain = _link_gain(cfg, distance(cfg.pos_ris, users[i]), rng_h1)
        h1[i] = math.sqrt(gain) * crandn(rng_h1, P)

    a2 = array_response(theta2, P)
    a3 = array_response(theta3, P)
    beta5 = sensing_amplitude(cfg.wavelength_m, cfg.rcs_m2, distance(cfg.pos_ris, cfg.pos_target))
    T = beta5 * np.outer(a3, a3.conj())
    if cfg.ris_phase == "aligned":
        phases = a3 * a2.conj()
    else:
        phases = np.ones(P, dtype=complex)
    return ChannelSet(H=H, h1=h1, h2=h2, T=T, beta5=beta5, ris_phases=phases, a3=a3)


def draw_channel_realizations(cfg: ScenarioConfig, rng: np.random.Generator | None = None
                              ) -> list[ChannelSet]:
    if rng is None:
        rng = cfg.rng()
    return [draw_channels(cfg, child) for child in rng.spawn(cfg.channel_realizations)]


# --- text dump -------------------------------------------------------------
# One header line "# lawn-isac channels P M N beta5", then one row per entry:
#   name,row,col,real,imag
# with name in {H, h1, h2, T, phases, a3}; vectors use col = 0.

def save_channels(ch: ChannelSet, path: str | Path) -> None:
    P, M, N = ch.dims
    lines = [f"# lawn-isac channels {P} {M} {N} {float(ch.beta5)!r}", "name,row,col,real,imag"]
    for name, arr in (("H", ch.H), ("h1", ch.h1), ("h2", ch.h2), ("T", ch.T),
                      ("phases", ch.ris_phases[:, None]), ("a3", ch.a3[:, None])):
        for (r, c), z in np.ndenumerate(arr):
            lines.append(f"{name},{r},{c},{float(z.real)!r},{float(z.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_channels(path: str | Path) -> ChannelSet:
    text = Path(path).read_text().splitlines()
    head = text[0].split()
    if head[:3] != ["#", "lawn-isac", "channels"]:
        raise ValueError("not a channel dump file")
    P, M, N = (int(v) for v in head[3:6])
    beta5 = float(head[6])
    arrays = {"H": np.zeros((P, M), complex), "h1": np.zeros((N, P), complex),
              "h2": np.zeros((N, M), complex), "T": np.zeros((P, P), complex),
              "phases": np.zeros((P, 1), complex), "a3": np.zeros((P, 1), complex)}
    for line in text[2:]:
        if not line:
            continue
        name, r, c, re, im = line.split(",")
        arrays[name][int(r), int(c)] = complex(float(re), float(im))
    return ChannelSet(H=arrays["H"], h1=arrays["h1"], h2=arrays["h2"], T=arrays["T"], beta5=beta5,
                      ris_phases=arrays["phases"][:, 0], a3=arrays["a3"][:, 0])
