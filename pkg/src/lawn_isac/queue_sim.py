"""Monte Carlo FCFS queue used as an independent check on the AoI closed forms.

Each run draws inter-arrival gaps and service times, pushes them through the
Lindley recursion and integrates the age sawtooth exactly, one trapezoid per
inter-departure interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .aoi import UtilizationError

# arrival kind, service kind
DISCIPLINES = {
    "MM1": ("exp", "exp"),
    "DM1": ("det", "exp"),
    "MD1": ("exp", "det"),
    "DD1": ("det", "det"),
}
MAX_DELIVERIES = 50_000_000
N_BATCHES = 30
WARMUP_FRACTION = 0.01


@dataclass(frozen=True)
class SimResult:
    aaoi_est_s: float
    deliveries: int
    half_width_95: float


def _as_rng(rng_state) -> np.random.Generator:
    if isinstance(rng_state, np.random.Generator):
        return rng_state
    return np.random.default_rng(rng_state)


def _check(model: str, lambda_rate: float, service_rate: float, n: int) -> tuple[str, str]:
    if model not in DISCIPLINES:
        raise ValueError(f"unknown queue model {model!r}")
    if not (lambda_rate > 0 and service_rate > 0):
        raise UtilizationError("rates must be positive")
    if lambda_rate >= service_rate:
        raise UtilizationError(f"utilization {lambda_rate / service_rate:.6g} >= 1 (queue unstable)")
    if n > MAX_DELIVERIES:
        raise OverflowError(f"{n} deliveries exceeds the {MAX_DELIVERIES} event guard")
    return DISCIPLINES[model]


def _draw(kind: str, rate: float, n: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "det":
        return np.full(n, 1.0 / rate)
    return rng.exponential(1.0 / rate, n)


def lindley_waits(gaps: np.ndarray, service: np.ndarray) -> np.ndarray:
    """Waiting times U_n = max(0, U_{n-1} + S_{n-1} - B_n), with U_0 = 0.

    Vectorised as U_n = X_n - min_{k<=n} X_k where X is the running sum of
    S_{k-1} - B_k.
    """
    steps = np.empty_like(service)
    steps[0] = 0.0
    steps[1:] = service[:-1] - gaps[1:]
    x = np.cumsum(steps)
    return x - np.minimum.accumulate(x)


def _sample_path(model, lambda_rate, service_rate, n, rng):
    arr_kind, srv_kind = _check(model, lambda_rate, service_rate, n)
    gaps = _draw(arr_kind, lambda_rate, n, rng)
    service = _draw(srv_kind, service_rate, n, rng)
    waits = lindley_waits(gaps, service)
    gen = np.cumsum(gaps)
    dep = gen + waits + service
    return gen, dep, waits, service


def simulate_aoi(model: str, lambda_rate: float, service_rate: float, n_deliveries: int,
                 rng_state=None) -> SimResult:
    """Time-average age from ``n_deliveries`` simulated updates.

    The first 1% of deliveries is discarded as warm-up; the confidence
    half-width comes from 30 batch means of the area/time ratio.
    """
    n = int(n_deliveries)
    if n < N_BATCHES * 10:
        raise ValueError(f"need at least {N_BATCHES * 10} deliveries")
    gen, dep, _, _ = _sample_path(model, lambda_rate, service_rate, n, _as_rng(rng_state))

    # age just after departure i-1 is dep[i-1] - gen[i-1]; it then grows linearly to dep[i]
    start_age = dep[:-1] - gen[:-1]
    width = np.diff(dep)
    area = width * (start_age + 0.5 * width)

    first = int(math.ceil(WARMUP_FRACTION * area.size))
    area, width = area[first:], width[first:]
    estimate = float(area.sum() / width.sum())

    batches = np.array_split(np.arange(area.size), N_BATCHES)
    means = np.array([area[b].sum() / width[b].sum() for b in batches])
    t = stats.t.ppf(0.975, N_BATCHES - 1)
    half = float(t * means.std(ddof=1) / math.sqrt(N_BATCHES))
    return SimResult(aaoi_est_s=estimate, deliveries=int(area.size), half_width_95=half)


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted samples plus a thinned quantile table."""

    samples: np.ndarray
    levels: np.ndarray
    quantiles: np.ndarray

    def at(self, x) -> np.ndarray:
        return np.searchsorted(self.samples, x, side="right") / self.samples.size

    def before(self, x) -> np.ndarray:
        return np.searchsorted(self.samples, x, side="left") / self.samples.size

    def ks_statistic(self, cdf) -> float:
        """Largest CDF gap evaluated at the table points, both sides of each jump.

        ``cdf`` must be vectorised. Any jump of the reference law is assumed
        to sit at 0 (the idle-server atom of a waiting time).
        """
        x = np.unique(self.quantiles)
        ref = np.asarray(cdf(x), dtype=float)
        ref_left = np.where(x > 0, ref, 0.0)
        gaps = np.maximum(np.abs(self.at(x) - ref), np.abs(self.before(x) - ref_left))
        return float(gaps.max())


def waiting_time_cdf_empirical(model: str, lambda_rate: float, service_rate: float, n_samples: int,
                               rng_state=None, quantity: str = "wait",
                               n_levels: int = 2000) -> EmpiricalCdf:
    """Empirical law of the waiting time (``quantity="wait"``) or system time (``"system"``)."""
    if quantity not in ("wait", "system"):
        raise ValueError("quantity must be 'wait' or 'system'")
    n = int(n_samples)
    _, _, waits, service = _sample_path(model, lambda_rate, service_rate, n, _as_rng(rng_state))
    first = int(math.ceil(WARMUP_FRACTION * n))
    values = waits if quantity == "wait" else waits + service
    samples = np.sort(values[first:])
    levels = (np.arange(n_levels) + 0.5) / n_levels
    quantiles = np.quantile(samples, levels, method="inverted_cdf")
    return EmpiricalCdf(samples=samples, levels=levels, quantiles=quantiles)
