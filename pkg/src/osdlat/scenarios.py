"""Parameter-optimization scenarios for latency-constrained links.

Three sweeps built on the rate math, the OSD complexity model and the
complexity/penalty law:

* max_rate_curve - achievable rate vs SNR once the deadline caps the
  decoding time (the achievability curve shifts right by the penalty).
* maximize_k - most information bits per codeword under a deadline and a
  transmit-power cap, swept over blocklength.
* minimize_latency - shortest total latency for a fixed number of
  information bits under a power cap, swept over blocklength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from osdlat.fblmath import (
    DEFAULT_APPROX,
    NormalApproxConfig,
    Snr,
    normal_approx_rate,
    required_snr,
    validate_epsilon,
)
from osdlat.oscomplexity import LatencyBudget
from osdlat.tradeoff import (
    TradeoffParams,
    complexity_to_penalty,
    params_for_blocklength,
    penalty_to_complexity,
)

CSV_COLUMNS = (
    "n",
    "k",
    "rate",
    "required_snr_db",
    "delta_rho_db",
    "snr_db",
    "c",
    "total_latency_s",
    "feasible",
)


@dataclass(frozen=True)
class ScenarioConfig:
    """Shared inputs of the scenario sweeps.

    power_cap_db is the transmit-power budget P_m (required by maximize_k
    and minimize_latency; may be inf in minimize_latency).  k_fixed is the
    fixed payload of minimize_latency.  params_override pins one parameter
    set for the complexity/penalty law instead of the per-blocklength
    provider.
    """

    budget: LatencyBudget
    epsilon: float
    power_cap_db: float | None = None
    n_range: tuple[int, int] = (2, 1000)
    k_fixed: int | None = None
    n_step: int = 1
    rate_step: float = 0.05
    approx: NormalApproxConfig = DEFAULT_APPROX
    params_extrapolation: str = "power"
    params_override: TradeoffParams | None = None

    def __post_init__(self):
        validate_epsilon(self.epsilon)
        lo, hi = self.n_range
        if lo > hi or lo < 2:
            raise ValueError(f"n_range must be a nonempty range with lo >= 2, got {self.n_range}")
        if self.n_step < 1:
            raise ValueError(f"n_step must be >= 1, got {self.n_step}")
        if not 0.0 < self.rate_step < 1.0:
            raise ValueError(f"rate_step must be in (0, 1), got {self.rate_step}")
        if self.k_fixed is not None and lo < self.k_fixed:
            raise ValueError(
                f"n_range must start at k_fixed={self.k_fixed}, got lo={lo}"
            )

    def law_params(self, n: int) -> TradeoffParams:
        if self.params_override is not None:
            return self.params_override
        return params_for_blocklength(n, self.params_extrapolation)

    def blocklengths(self) -> list[int]:
        lo, hi = self.n_range
        ns = list(range(lo, hi + 1, self.n_step))
        if ns[-1] != hi:
            ns.append(hi)
        return ns


@dataclass(frozen=True)
class SweepPoint:
    """One row of a scenario sweep; None marks inapplicable fields."""

    n: int
    k: int | None = None
    rate: float | None = None
    required_snr_db: float | None = None
    delta_rho_db: float | None = None
    snr_db: float | None = None
    c: float | None = None
    total_latency_s: float | None = None
    feasible: bool = False


@dataclass(frozen=True)
class ScenarioResult:
    scenario: str
    sweep: list[SweepPoint]
    optimum: SweepPoint | None
    config_echo: dict = field(default_factory=dict)


def _config_echo(cfg: ScenarioConfig, **extra) -> dict:
    echo = {
        "deadline_s": cfg.budget.deadline,
        "symbol_time_s": cfg.budget.symbol_time,
        "binop_time_s": cfg.budget.binop_time,
        "epsilon": cfg.epsilon,
        "power_cap_db": cfg.power_cap_db,
        "n_range": list(cfg.n_range),
        "n_step": cfg.n_step,
        "k_fixed": cfg.k_fixed,
        "rate_step": cfg.rate_step,
        "quadrature_nodes": cfg.approx.quadrature_nodes,
        "params_extrapolation": cfg.params_extrapolation,
    }
    echo.update(extra)
    return echo


def _decode_window(n: int, cfg: ScenarioConfig) -> float:
    return cfg.budget.deadline - n * cfg.budget.symbol_time


def max_rate_curve(n: int, cfg: ScenarioConfig) -> ScenarioResult:
    """Deadline-constrained achievable rate across a rate grid at fixed n.

    For every rate the deadline fixes the per-bit complexity allowance,
    the law turns that into a power penalty, and the achievability point
    shifts right by the penalty.  The optimum is the highest feasible
    rate (respecting power_cap_db when set).
    """
    budget = cfg.budget
    if not _decode_window(n, cfg) > 0:
        raise ValueError("deadline must exceed the transmission time n*T_s")
    params = cfg.law_params(n)
    steps = int(math.ceil(1.0 / cfg.rate_step)) - 1
    rates = [i * cfg.rate_step for i in range(1, steps + 1) if i * cfg.rate_step < 1.0]
    sweep = []
    for rate in rates:
        k = math.ceil(rate * n)
        if budget.binop_time == 0:
            c_allowed = math.inf
            latency = n * budget.symbol_time
        else:
            c_allowed = _decode_window(n, cfg) / (k * budget.binop_time)
            latency = budget.deadline
        if c_allowed <= 1.0:
            sweep.append(SweepPoint(n=n, k=k, rate=rate, c=c_allowed, feasible=False))
            continue
        delta = complexity_to_penalty(c_allowed, params)
        req = required_snr(n, cfg.epsilon, rate, cfg.approx)
        sweep.append(
            SweepPoint(
                n=n,
                k=k,
                rate=rate,
                required_snr_db=req.db,
                delta_rho_db=delta,
                snr_db=req.db + delta,
                c=c_allowed,
                total_latency_s=latency,
                feasible=True,
            )
        )
    optimum = None
    for pt in reversed(sweep):
        if pt.feasible and (cfg.power_cap_db is None or pt.snr_db <= cfg.power_cap_db):
            optimum = pt
            break
    return ScenarioResult("max-rate", sweep, optimum, _config_echo(cfg, n=n))


def _max_k_feasible(n: int, k: int, cfg: ScenarioConfig) -> bool:
    rate = k / n
    if rate >= 1.0:
        return False
    budget = cfg.budget
    if budget.binop_time == 0:
        delta = 0.0
    else:
        c_allowed = _decode_window(n, cfg) / (k * budget.binop_time)
        if c_allowed <= 1.0:
            return False
        delta = complexity_to_penalty(c_allowed, cfg.law_params(n))
    snr_left = cfg.power_cap_db - delta
    if math.isinf(snr_left):
        return False
    return normal_approx_rate(n, cfg.epsilon, Snr(snr_left), cfg.approx) >= rate


def maximize_k(cfg: ScenarioConfig) -> ScenarioResult:
    """Most information bits per codeword under deadline and power cap.

    For each blocklength, binary-searches the largest k whose required
    SNR plus the law's penalty for the deadline-allowed complexity stays
    within power_cap_db (feasibility is monotone in k).  The optimum is
    the blocklength maximizing k.
    """
    if cfg.power_cap_db is None or math.isinf(cfg.power_cap_db):
        raise ValueError("maximize_k needs a finite power_cap_db")
    budget = cfg.budget
    sweep = []
    for n in cfg.blocklengths():
        window = _decode_window(n, cfg)
        if window < 0 or (window == 0 and budget.binop_time > 0):
            sweep.append(SweepPoint(n=n, feasible=False))
            continue
        if not _max_k_feasible(n, 1, cfg):
            sweep.append(SweepPoint(n=n, feasible=False))
            continue
        lo, hi = 1, n
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if _max_k_feasible(n, mid, cfg):
                lo = mid
            else:
                hi = mid - 1
        k = lo
        rate = k / n
        req = required_snr(n, cfg.epsilon, rate, cfg.approx)
        if budget.binop_time == 0:
            c_allowed = math.inf
            delta = 0.0
            latency = n * budget.symbol_time
        else:
            c_allowed = window / (k * budget.binop_time)
            delta = complexity_to_penalty(c_allowed, cfg.law_params(n))
            latency = budget.deadline
        sweep.append(
            SweepPoint(
                n=n,
                k=k,
                rate=rate,
                required_snr_db=req.db,
                delta_rho_db=delta,
                snr_db=req.db + delta,
                c=c_allowed,
                total_latency_s=latency,
                feasible=True,
            )
        )
    optimum = None
    for pt in sweep:
        if pt.feasible and (optimum is None or pt.k > optimum.k):
            optimum = pt
    return ScenarioResult("max-k", sweep, optimum, _config_echo(cfg))


def minimize_latency(cfg: ScenarioConfig) -> ScenarioResult:
    """Shortest total latency carrying k_fixed bits under a power cap.

    For each blocklength the spare power above the required SNR buys a
    decoder complexity through the law; total latency is transmission
    plus the implied decoding time.  An infinite power cap drives the
    complexity to the law's floor of 1 and the optimum to n = k.
    """
    if cfg.k_fixed is None:
        raise ValueError("minimize_latency needs k_fixed")
    if cfg.power_cap_db is None:
        raise ValueError("minimize_latency needs power_cap_db (may be inf)")
    k = cfg.k_fixed
    budget = cfg.budget
    unconstrained = math.isinf(cfg.power_cap_db)
    sweep = []
    for n in cfg.blocklengths():
        rate = k / n
        if unconstrained:
            c_req = 1.0
            latency = n * budget.symbol_time + k * c_req * budget.binop_time
            sweep.append(
                SweepPoint(
                    n=n, k=k, rate=rate, snr_db=cfg.power_cap_db,
                    c=c_req, total_latency_s=latency, feasible=True,
                )
            )
            continue
        if rate >= 1.0:
            sweep.append(SweepPoint(n=n, k=k, rate=rate, feasible=False))
            continue
        req = required_snr(n, cfg.epsilon, rate, cfg.approx)
        avail = cfg.power_cap_db - req.db
        if avail <= 0:
            sweep.append(
                SweepPoint(n=n, k=k, rate=rate, required_snr_db=req.db, feasible=False)
            )
            continue
        c_req = max(penalty_to_complexity(avail, cfg.law_params(n)), 1.0)
        latency = n * budget.symbol_time + k * c_req * budget.binop_time
        sweep.append(
            SweepPoint(
                n=n,
                k=k,
                rate=rate,
                required_snr_db=req.db,
                delta_rho_db=avail,
                snr_db=cfg.power_cap_db,
                c=c_req,
                total_latency_s=latency,
                feasible=True,
            )
        )
    optimum = None
    for pt in sweep:
        if pt.feasible and (optimum is None or pt.total_latency_s < optimum.total_latency_s):
            optimum = pt
    return ScenarioResult("min-latency", sweep, optimum, _config_echo(cfg))


def csv_rows(result: ScenarioResult) -> list[tuple]:
    """Sweep rows as value tuples matching CSV_COLUMNS."""
    return [tuple(getattr(pt, col) for col in CSV_COLUMNS) for pt in result.sweep]


def point_as_dict(pt: SweepPoint | None) -> dict | None:
    if pt is None:
        return None
    return {col: getattr(pt, col) for col in CSV_COLUMNS}


def summary_doc(result: ScenarioResult) -> dict:
    """Summary document with the optimum and the configuration echo."""
    return {
        "scenario": result.scenario,
        "config": result.config_echo,
        "optimum": point_as_dict(result.optimum),
    }
