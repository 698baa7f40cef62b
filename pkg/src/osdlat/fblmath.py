"""Finite-blocklength rate math for the binary-input AWGN channel.

Capacity and dispersion are the mean and variance of the information
density of equiprobable BPSK input over Gaussian noise, evaluated with
Gauss-Hermite quadrature.  The information density is computed in nats
(so the dispersion is in nats^2) and the second-order rate expression
applies an explicit log2(e) factor, reporting rates in bits per channel
use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

LOG2E = math.log2(math.e)


class InfeasibleError(ValueError):
    """The requested operating point cannot be met at any finite SNR."""


@dataclass(frozen=True)
class Snr:
    """Signal-to-noise ratio.  Stored in dB; noise variance is 1/linear."""

    db: float

    def __post_init__(self):
        if not math.isfinite(self.db):
            raise ValueError(f"SNR must be finite, got {self.db} dB")

    @property
    def linear(self) -> float:
        return 10.0 ** (self.db / 10.0)

    @classmethod
    def from_db(cls, db: float) -> "Snr":
        return cls(float(db))

    @classmethod
    def from_linear(cls, rho: float) -> "Snr":
        if not rho > 0:
            raise ValueError(f"linear SNR must be positive, got {rho}")
        return cls(10.0 * math.log10(rho))


@dataclass(frozen=True)
class NormalApproxConfig:
    """Numerical settings for the second-order rate approximation.

    quadrature_nodes: Gauss-Hermite node count for the capacity and
        dispersion integrals.
    drop_o1n_term: drop the O(1/n) refinement (default); when False the
        +log2(n)/(2n) term is included.
    """

    quadrature_nodes: int = 128
    drop_o1n_term: bool = True

    def __post_init__(self):
        if self.quadrature_nodes < 32:
            raise ValueError("quadrature_nodes must be at least 32")


DEFAULT_APPROX = NormalApproxConfig()


def validate_epsilon(epsilon: float) -> float:
    """Validate a codeword error probability target."""
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"error probability must be in (0, 1), got {epsilon}")
    return epsilon


def validate_rate(rate: float) -> float:
    """Validate a code rate in bits per channel use."""
    rate = float(rate)
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"code rate must be in (0, 1], got {rate}")
    return rate


def q_func(x: float) -> float:
    """Gaussian tail probability Q(x) = P(Z > x) for standard normal Z."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"q_func argument must be finite, got {x}")
    p = float(special.ndtr(-x))
    # keep the result strictly inside (0, 1) even in the far tails
    tiny = 5e-324
    return min(max(p, tiny), 1.0 - 2.0**-53)


@lru_cache(maxsize=4096)
def q_inv(p: float) -> float:
    """Inverse of q_func, by bracketing bisection plus Newton polish."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"q_inv argument must be in (0, 1), got {p}")
    lo, hi = -40.0, 40.0
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if q_func(mid) > p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(4):
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if pdf <= 0.0:
            break
        step = (q_func(x) - p) / pdf
        if not math.isfinite(step):
            break
        x += step
    return x


@lru_cache(maxsize=64)
def _hermgauss(nodes: int):
    x, w = special.roots_hermite(nodes)
    return x, w


@lru_cache(maxsize=200_000)
def _info_density_stats(rho: float, nodes: int) -> tuple[float, float]:
    """Mean (nats) and variance (nats^2) of the BPSK information density.

    With noise z ~ N(0, 1/rho) and transmitted symbol +1, the density is
    ln 2 - ln(1 + exp(-2 rho - 2 sqrt(rho) Z)) for standard normal Z; the
    distribution is the same for either input by symmetry.
    """
    x, w = _hermgauss(nodes)
    z = math.sqrt(2.0) * x
    arg = -2.0 * rho - 2.0 * math.sqrt(rho) * z
    g = np.logaddexp(0.0, arg)
    norm = 1.0 / math.sqrt(math.pi)
    mean_g = float(np.dot(w, g)) * norm
    mean_g2 = float(np.dot(w, g * g)) * norm
    c_nats = max(math.log(2.0) - mean_g, 0.0)
    v_nats2 = max(mean_g2 - mean_g * mean_g, 0.0)
    return c_nats, v_nats2


def biawgn_capacity(snr: Snr, config: NormalApproxConfig = DEFAULT_APPROX) -> float:
    """BI-AWGN channel capacity in bits per channel use."""
    c_nats, _ = _info_density_stats(snr.linear, config.quadrature_nodes)
    return c_nats * LOG2E


def biawgn_dispersion(snr: Snr, config: NormalApproxConfig = DEFAULT_APPROX) -> float:
    """BI-AWGN channel dispersion in nats^2 per channel use."""
    _, v = _info_density_stats(snr.linear, config.quadrature_nodes)
    return v


def normal_approx_rate(
    n: int,
    epsilon: float,
    snr: Snr,
    config: NormalApproxConfig = DEFAULT_APPROX,
) -> float:
    """Second-order achievable rate at blocklength n, clamped below at 0.

    Returns max(0, C - sqrt(V/n) Qinv(eps) log2(e)); a clamped 0 marks the
    operating point infeasible at this SNR.
    """
    if n < 1:
        raise ValueError(f"blocklength must be >= 1, got {n}")
    epsilon = validate_epsilon(epsilon)
    c_nats, v = _info_density_stats(snr.linear, config.quadrature_nodes)
    rate = (c_nats - math.sqrt(v / n) * q_inv(epsilon)) * LOG2E
    if not config.drop_o1n_term:
        rate += 0.5 * math.log2(n) / n
    return max(rate, 0.0)


def required_snr(
    n: int,
    epsilon: float,
    rate: float,
    config: NormalApproxConfig = DEFAULT_APPROX,
) -> Snr:
    """Smallest SNR whose normal-approximation rate reaches the target.

    Monotone bisection in dB; raises InfeasibleError for rate >= 1, which
    no finite SNR can reach.
    """
    rate = validate_rate(rate)
    epsilon = validate_epsilon(epsilon)
    if rate >= 1.0:
        raise InfeasibleError("rate 1 is unreachable at finite SNR")
    lo, hi = -60.0, 40.0
    while normal_approx_rate(n, epsilon, Snr(hi), config) < rate:
        hi += 20.0
        if hi > 400.0:
            raise InfeasibleError(f"no SNR below 400 dB reaches rate {rate}")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if normal_approx_rate(n, epsilon, Snr(mid), config) >= rate:
            hi = mid
        else:
            lo = mid
    return Snr(hi)


def power_penalty(
    operating: Snr,
    n: int,
    epsilon: float,
    rate: float,
    config: NormalApproxConfig = DEFAULT_APPROX,
) -> float:
    """Excess of the operating SNR over the normal-approximation SNR, in dB."""
    needed = required_snr(n, epsilon, rate, config)
    delta = operating.db - needed.db
    if delta < -1e-9:
        raise ValueError(
            f"operating point {operating.db:.3f} dB is below the "
            f"normal-approximation requirement {needed.db:.3f} dB"
        )
    return max(delta, 0.0)
