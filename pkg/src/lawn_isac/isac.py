"""ISAC beamforming, communication SINR and sensing SINR / service rate.

All noise quantities are in-band powers in watts; the attacker's injected
noise power ``sigma_att_w`` adds to every noise term it touches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .channels import ChannelSet
from .config import ScenarioConfig


class DegenerateChannelError(ValueError):
    pass


@dataclass(frozen=True)
class RisPhase:
    """Common amplification gain ``g`` applied on top of a unit-modulus phase profile."""

    g: float
    phases: np.ndarray | None = None

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("RIS gain must be nonnegative")

    def matrix(self, p_elements: int) -> np.ndarray:
        phases = np.ones(p_elements) if self.phases is None else self.phases
        return np.diag(self.g * phases)


@dataclass(frozen=True)
class Beamformer:
    B_r: np.ndarray   # (M, M)
    B_c: np.ndarray   # (M, N)

    @property
    def R(self) -> np.ndarray:
        return self.B_r @ self.B_r.conj().T + self.B_c @ self.B_c.conj().T

    def R_user(self, i: int) -> np.ndarray:
        b = self.B_c[:, i]
        return np.outer(b, b.conj())


def ris_for(channels: ChannelSet, g: float) -> RisPhase:
    return RisPhase(g=g, phases=channels.ris_phases)


def equivalent_channels(channels: ChannelSet, ris: RisPhase) -> np.ndarray:
    """Rows are h_i = H^H Phi^H h1_i + h2_i, so user i receives h_i^H s."""
    P = channels.H.shape[0]
    Phi = ris.matrix(P)
    reflected = (channels.h1.conj() @ Phi @ channels.H).conj()
    return reflected + channels.h2


def build_beamformer(channels: ChannelSet, ris: RisPhase, cfg: ScenarioConfig) -> Beamformer:
    """Isotropic sensing part plus per-user maximum-ratio beams.

    ``sensing_power_fraction`` of ``p_trans_w`` goes to ``B_r``; the rest is
    split evenly over the users, so ``trace(R) == p_trans_w``.
    """
    M, N = cfg.m_antennas, cfg.n_users
    rho_r = cfg.sensing_power_fraction
    rho_c = 1.0 - rho_r
    B_r = math.sqrt(rho_r * cfg.p_trans_w / M) * np.eye(M, dtype=complex)
    h = equivalent_channels(channels, ris)
    norms = np.linalg.norm(h, axis=1)
    for i, n in enumerate(norms):
        if not n > 0:
            raise DegenerateChannelError(f"user {i} has a zero equivalent channel")
    B_c = math.sqrt(rho_c * cfg.p_trans_w / N) * (h / norms[:, None]).T
    return Beamformer(B_r=B_r, B_c=B_c)


def comm_sinr(channels: ChannelSet, bf: Beamformer, ris: RisPhase, sigma_att_w: float,
              cfg: ScenarioConfig) -> np.ndarray:
    """Per-user SINR, one entry per user."""
    if sigma_att_w < 0:
        raise ValueError("attack power must be nonnegative")
    noise = cfg.noise_power_w
    h = equivalent_channels(channels, ris)
    R = bf.R
    P = channels.H.shape[0]
    Phi = ris.matrix(P)
    out = np.empty(cfg.n_users)
    for i in range(cfg.n_users):
        hi = h[i]
        signal = abs(np.vdot(hi, bf.B_c[:, i])) ** 2
        total = np.real(np.vdot(hi, R @ hi))
        relay = np.real(np.vdot(channels.h1[i], Phi @ Phi.conj().T @ channels.h1[i]))
        denom = (total - signal) + (noise + sigma_att_w) * relay + (sigma_att_w + noise)
        out[i] = signal / denom
    return out


def average_sinr(sinrs) -> float:
    sinrs = np.asarray(sinrs, dtype=float)
    if sinrs.size == 0:
        raise ValueError("average of an empty SINR list")
    return float(sinrs.mean())


def _hermitian(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.conj().T)


def sensing_matrices(channels: ChannelSet, ris: RisPhase, cfg: ScenarioConfig):
    """Return (F, X, C): target response, target-path noise map and SI map."""
    H, T = channels.H, channels.T
    Phi = ris.matrix(H.shape[0])
    HH = H.conj().T
    X = HH @ Phi.conj().T @ T @ Phi
    F = X @ H
    C = cfg.epsilon_si * HH @ Phi @ H
    return F, X, C


def sensing_covariance_J(channels: ChannelSet, bf: Beamformer, ris: RisPhase, sigma_att_w: float,
                         cfg: ScenarioConfig) -> np.ndarray:
    """Interference-plus-noise covariance J = Z + C R C^H at the BS."""
    H, T = channels.H, channels.T
    M = H.shape[1]
    Phi = ris.matrix(H.shape[0])
    PhiH = Phi.conj().T
    HH = H.conj().T
    ris_noise = cfg.noise_power_w + sigma_att_w
    bs_noise = cfg.noise_power_w + sigma_att_w
    F, X, C = sensing_matrices(channels, ris, cfg)

    Z = ris_noise * (HH @ Phi @ PhiH @ T @ Phi @ H + HH @ PhiH @ T @ Phi @ PhiH @ H)
    Z = Z + ris_noise * X @ X.conj().T + 2.0 * ris_noise * HH @ PhiH @ Phi @ H
    Z = _hermitian(Z) + bs_noise * np.eye(M)
    R = bf.R
    return _hermitian(Z + C @ R @ C.conj().T)


def sensing_trace(channels: ChannelSet, bf: Beamformer, ris: RisPhase, sigma_att_w: float,
                  cfg: ScenarioConfig) -> complex:
    """Raw complex value of Tr(F R F^H J^-1)."""
    F, _, _ = sensing_matrices(channels, ris, cfg)
    J = sensing_covariance_J(channels, bf, ris, sigma_att_w, cfg)
    S = F @ bf.R @ F.conj().T
    try:
        factor = scipy.linalg.cho_factor(J)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("sensing covariance J is numerically singular") from exc
    return complex(np.trace(scipy.linalg.cho_solve(factor, S)))


def sensing_sinr(channels: ChannelSet, bf: Beamformer, ris: RisPhase, sigma_att_w: float,
                 cfg: ScenarioConfig) -> float:
    """Real part of the sensing trace; exactly zero when g = 0 (F vanishes)."""
    return max(sensing_trace(channels, bf, ris, sigma_att_w, cfg).real, 0.0)


def sensing_rate(sinr: float, bandwidth_hz: float) -> float:
    return bandwidth_hz * math.log2(1.0 + sinr)


def sensing_sinr_and_rate(channels: ChannelSet, bf: Beamformer, ris: RisPhase, sigma_att_w: float,
                          cfg: ScenarioConfig) -> tuple[float, float]:
    sinr = sensing_sinr(channels, bf, ris, sigma_att_w, cfg)
    return sinr, sensing_rate(sinr, cfg.bandwidth_hz)


@dataclass(frozen=True)
class LinkMetrics:
    sinrs: np.ndarray
    asinr: float
    sensing_sinr: float
    gamma_sense: float


def link_metrics(channels: ChannelSet, g: float, sigma_att_w: float, cfg: ScenarioConfig) -> LinkMetrics:
    """Everything the utilities need that does not depend on the data rate."""
    ris = ris_for(channels, g)
    bf = build_beamformer(channels, ris, cfg)
    sinrs = comm_sinr(channels, bf, ris, sigma_att_w, cfg)
    s, rate = sensing_sinr_and_rate(channels, bf, ris, sigma_att_w, cfg)
    return LinkMetrics(sinrs=sinrs, asinr=average_sinr(sinrs), sensing_sinr=s, gamma_sense=rate)
