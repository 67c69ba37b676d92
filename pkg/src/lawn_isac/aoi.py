"""Closed-form average age of information for FCFS M/M/1, D/M/1 and M/D/1 queues.

Arrivals are sensing-data generations at rate ``lambda_rate``; the server is the
sensing link with service rate ``service_rate`` (the sensing transmission rate).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

MODELS = ("MM1", "DM1", "MD1")
_INV_E = math.exp(-1.0)


class UtilizationError(ValueError):
    """Raised when the queue is unstable (arrival rate >= service rate)."""


@dataclass(frozen=True)
class QueueParams:
    lambda_rate: float
    service_rate: float
    model: str = "MM1"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown queue model {self.model!r}")
        if not (self.lambda_rate > 0 and self.service_rate > 0):
            raise UtilizationError("rates must be positive")
        if self.lambda_rate >= self.service_rate:
            raise UtilizationError(
                f"utilization {self.lambda_rate / self.service_rate:.6g} >= 1 (queue unstable)")

    @property
    def rho(self) -> float:
        return self.lambda_rate / self.service_rate


@dataclass(frozen=True)
class AoiResult:
    aaoi_s: float
    rho: float
    delta: float | None = None
    model: str = "MM1"


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function by Halley iteration.

    Starting guesses: branch-point series for x < -0.25, log1p(x) up to e,
    and log(x) - log(log(x)) beyond.
    """
    x = float(x)
    if x < -_INV_E:
        if x < -_INV_E * (1.0 + 1e-14):
            raise ValueError(f"lambert_w0 is undefined for x < -1/e (got {x})")
        return -1.0
    if x == 0.0:
        return 0.0
    if x < -0.25:
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    elif x < math.e:
        w = math.log1p(x)
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= 1e-16 * (1.0 + abs(w)):
            break
    return w


def dm1_delta(rho: float) -> float:
    """Smaller root of delta = exp(-(1 - delta) / rho) via Lambert W."""
    if not 0.0 < rho < 1.0:
        raise UtilizationError(f"utilization {rho} outside (0, 1)")
    z = -math.exp(-1.0 / rho) / rho
    return -rho * lambert_w0(z)


def dm1_delta_fixed_point(rho: float, tol: float = 1e-15, max_iter: int = 1_000_000) -> float:
    """Same root by plain fixed-point iteration from zero (monotone, converges for rho < 1)."""
    if not 0.0 < rho < 1.0:
        raise UtilizationError(f"utilization {rho} outside (0, 1)")
    d = 0.0
    for _ in range(max_iter):
        nxt = math.exp(-(1.0 - d) / rho)
        if abs(nxt - d) <= tol:
            return nxt
        d = nxt
    raise RuntimeError("fixed-point iteration for delta did not converge")


def aaoi_mm1(q: QueueParams) -> AoiResult:
    lam, mu = q.lambda_rate, q.service_rate
    value = (1.0 / mu) * (1.0 + mu / lam + lam**2 / (mu * (mu - lam)))
    return AoiResult(aaoi_s=value, rho=q.rho, model="MM1")


def aaoi_dm1(q: QueueParams) -> AoiResult:
    lam, mu = q.lambda_rate, q.service_rate
    delta = dm1_delta(q.rho)
    value = (1.0 / mu) * (mu / (2.0 * lam) + 1.0 / (1.0 - delta))
    return AoiResult(aaoi_s=value, rho=q.rho, delta=delta, model="DM1")


# --- M/D/1 -----------------------------------------------------------------

def md1_mean_wait(rho: float, service_time: float) -> float:
    """Pollaczek-Khinchine mean waiting time for deterministic service."""
    return service_time * rho / (2.0 * (1.0 - rho))


def md1_decay_rate(rho: float) -> float:
    """Positive root x of rho (e^x - 1) = x: the waiting-time tail decays like e^{-x u / D}."""
    lo, hi = 1e-12, 1.0
    f = lambda x: rho * math.expm1(x) - x
    while f(hi) < 0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def md1_waiting_cdf(u, rho: float, service_time: float = 1.0):
    """Stationary FCFS M/D/1 waiting-time CDF (Erlang alternating-sum form).

    P(U <= u) = (1 - rho) sum_{i=0}^{floor(u/D)} (rho (i - u/D))^i / i! e^{-rho (i - u/D)}.
    The alternating sum cancels catastrophically in floating point, so it is
    evaluated with mpmath at a working precision that grows with ``rho u / D``.
    Accepts a scalar or an array of ``u``.
    """
    if not 0.0 < rho < 1.0:
        raise UtilizationError(f"utilization {rho} outside (0, 1)")
    arr = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.array([_md1_cdf_scalar(float(v) / service_time, rho) for v in arr])
    return out if np.ndim(u) else float(out[0])


def _md1_cdf_scalar(x: float, rho: float) -> float:
    if x < 0:
        return 0.0
    k = int(math.floor(x))
    digits = 20 + int(rho * x / math.log(10.0)) + int(math.log10(k + 2.0)) + 5
    with mpmath.workdps(digits):
        r = mpmath.mpf(rho)
        xm = mpmath.mpf(x)
        total = mpmath.mpf(0)
        for i in range(k + 1):
            a = r * (i - xm)
            total += a**i / mpmath.factorial(i) * mpmath.exp(-a)
        value = float((1 - r) * total)
    return min(max(value, 0.0), 1.0)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@lru_cache(maxsize=256)
def _md1_cross_moment(rho: float, service_time: float) -> float:
    """E[U_i B_i] for exponential inter-arrivals B and the M/D/1 wait U.

    Uses E[U | B=b] = E[U] + D - b + chi(b >= D) int_0^{b-D} Theta(u) du, which
    after exchanging the order of integration gives

        E[UB] = (E[U] + D)/lam - 2/lam^2 + int_0^inf Theta(u) e^{-lam (u+D)} (u + D + 1/lam) du.

    The last integral is done interval by interval on [kD, (k+1)D] with
    Gauss-Legendre nodes until 1 - Theta drops below 1e-16; the remaining tail
    is added in closed form with Theta = 1.
    """
    D = service_time
    lam = rho / D
    mean_wait = md1_mean_wait(rho, D)
    weight = lambda u: np.exp(-lam * (u + D)) * (u + D + 1.0 / lam)

    integral = 0.0
    k = 0
    theta_decay = md1_decay_rate(rho)
    while True:
        lo = k * D
        nodes = lo + 0.5 * D * (_GL_NODES + 1.0)
        cdf = md1_waiting_cdf(nodes, rho, D)
        integral += 0.5 * D * float(np.dot(_GL_WEIGHTS, cdf * weight(nodes)))
        k += 1
        upper = k * D
        if 1.0 - cdf[-1] < 1e-16 or math.exp(-theta_decay * k) < 1e-17:
            break
        tail_weight = math.exp(-lam * (upper + D)) * (upper + D + 2.0 / lam) / lam
        if tail_weight < 1e-18 * max(integral, 1e-300):
            break
        if k > 100_000:
            raise RuntimeError("M/D/1 quadrature did not converge")
    integral += math.exp(-lam * (upper + D)) * (upper + D + 2.0 / lam) / lam
    return (mean_wait + D) / lam - 2.0 / lam**2 + integral


def aaoi_md1(q: QueueParams) -> AoiResult:
    lam = q.lambda_rate
    D = 1.0 / q.service_rate
    cross = _md1_cross_moment(q.rho, D)
    value = lam * cross + D + 1.0 / lam
    return AoiResult(aaoi_s=value, rho=q.rho, model="MD1")


_DISPATCH = {"MM1": aaoi_mm1, "DM1": aaoi_dm1, "MD1": aaoi_md1}


def aaoi(q: QueueParams) -> AoiResult:
    return _DISPATCH[q.model](q)


def aaoi_value(lambda_rate: float, service_rate: float, model: str = "MM1") -> float:
    return aaoi(QueueParams(lambda_rate, service_rate, model)).aaoi_s
