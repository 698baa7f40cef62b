"""Command-line front end.

Five sub-commands: rate (normal-approximation tables), complexity (OSD
cost/latency tables), tradeoff (the complexity/penalty law: evaluation
and fitting), simulate (Monte Carlo BLER / required SNR), and scenario
(the three optimization sweeps).  All commands are deterministic given
their flags and seed; CSV goes to --out or stdout, the JSON sidecar or
summary to <out>.json (or stderr when printing to stdout).  Exit codes:
0 success, 2 usage error, 3 domain or construction error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from pathlib import Path

from osdlat import codecsim, ioutil, scenarios, tradeoff
from osdlat.fblmath import (
    NormalApproxConfig,
    Snr,
    biawgn_capacity,
    biawgn_dispersion,
    normal_approx_rate,
)
from osdlat.oscomplexity import (
    LatencyBudget,
    complexity_report,
    max_order,
    total_latency,
)

DEFAULT_SEED = 12345
WORKERS_ENV = "OSDLAT_WORKERS"


def _workers() -> int:
    return max(int(os.environ.get(WORKERS_ENV, "1")), 1)


def _parse_range(spec: str) -> list[float]:
    """Inclusive numeric range 'start:stop:step'."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must look like start:stop:step, got {spec!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"range needs stop >= start and step > 0, got {spec!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def _parse_int_pair(spec: str) -> tuple[int, int]:
    parts = spec.split(":")
    if len(parts) != 2:
        raise ValueError(f"expected lo:hi, got {spec!r}")
    return int(parts[0]), int(parts[1])


def _parse_code(spec: str) -> codecsim.CodeSpec:
    match = re.fullmatch(r"(\d+)x(\d+)", spec)
    if not match:
        raise ValueError(f"code must look like 64x36, got {spec!r}")
    return codecsim.build_ebch(int(match.group(1)), int(match.group(2)))


def _law_params(args) -> tradeoff.TradeoffParams | None:
    if getattr(args, "params_file", None):
        return tradeoff.params_from_json(Path(args.params_file).read_text(encoding="utf-8"))
    return None


def _emit(args, csv_text: str, sidecar: dict | None) -> None:
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
        if sidecar is not None:
            Path(args.out + ".json").write_text(ioutil.json_text(sidecar), encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
        if sidecar is not None:
            sys.stderr.write(ioutil.json_text(sidecar))


def cmd_rate(args) -> int:
    config = NormalApproxConfig(quadrature_nodes=args.nodes)
    rows = []
    for snr_db in _parse_range(args.snr_db_range):
        snr = Snr(snr_db)
        rows.append(
            (
                snr_db,
                biawgn_capacity(snr, config),
                biawgn_dispersion(snr, config),
                normal_approx_rate(args.n, args.eps, snr, config),
            )
        )
    _emit(args, ioutil.csv_text(("snr_db", "capacity", "dispersion", "rate"), rows), None)
    return 0


def cmd_complexity(args) -> int:
    lo, hi = _parse_int_pair(args.orders)
    budget = None
    if args.dm is not None:
        budget = LatencyBudget(deadline=args.dm, symbol_time=args.ts, binop_time=args.tb)
    rows = []
    for s in range(lo, hi + 1):
        report = complexity_report(args.n, args.k, s)
        latency = meets = None
        if budget is not None:
            latency = total_latency(args.n, args.k, report.c_exact, budget)
            meets = latency <= budget.deadline
        rows.append(
            (s, report.c_exact, report.c_bound, report.dominant_term, latency, meets)
        )
    sidecar = None
    if budget is not None:
        s_approx, s_star = max_order(args.n, args.k, budget)
        sidecar = {
            "n": args.n,
            "k": args.k,
            "deadline_s": budget.deadline,
            "symbol_time_s": budget.symbol_time,
            "binop_time_s": budget.binop_time,
            "s_approx": None if math.isnan(s_approx) else s_approx,
            "s_star": s_star,
        }
    header = ("s", "c_exact", "c_bound", "dominant_term", "total_latency_s", "meets_deadline")
    _emit(args, ioutil.csv_text(header, rows), sidecar)
    return 0


def cmd_tradeoff(args) -> int:
    if args.fit:
        points = []
        text = Path(args.fit).read_text(encoding="utf-8").strip().splitlines()
        for line in text[1:]:
            drho, c = (float(v) for v in line.split(","))
            points.append(tradeoff.PenaltyPoint(delta_rho_db=drho, c=c))
        result = tradeoff.fit_params(points, n_anchor=args.n_anchor)
        doc = {
            "n_anchor": result.params.n_anchor,
            "a": result.params.a,
            "b": result.params.b,
            "gamma_fit": result.params.gamma_fit,
            "rms_residual": result.rms_residual,
        }
        text_out = ioutil.json_text(doc)
        if args.out:
            Path(args.out).write_text(text_out, encoding="utf-8")
        else:
            sys.stdout.write(text_out)
        return 0
    params = _law_params(args) or tradeoff.params_for_blocklength(args.n, args.extrapolation)
    rows = []
    for drho in _parse_range(args.delta_rho_range):
        c = tradeoff.penalty_to_complexity(drho, params)
        rows.append((drho, math.log2(c), c))
    _emit(args, ioutil.csv_text(("delta_rho_db", "log2_c", "c"), rows), None)
    return 0


def cmd_simulate(args) -> int:
    code = _parse_code(args.code)
    if args.snr_db is None and args.eps is None:
        raise ValueError("simulate needs --snr-db or --eps")
    workers = _workers()
    sidecar = {
        "code": args.code,
        "n": code.n,
        "k": code.k,
        "d_min": code.d_min,
        "order": args.order,
        "seed": args.seed,
        "min_errors": args.min_errors,
        "max_trials": args.max_trials,
        "workers": workers,
    }
    if args.snr_db is not None:
        est = codecsim.estimate_bler(
            code,
            args.order,
            Snr(args.snr_db),
            min_errors=args.min_errors,
            max_trials=args.max_trials,
            seed=args.seed,
            workers=workers,
        )
        rows = [(args.snr_db, args.order, est.trials, est.errors, est.bler, est.ci95_halfwidth)]
        sidecar.update({"snr_db": args.snr_db, "bler_upper_bound": est.upper_bound})
    else:
        thr = codecsim.required_snr_sim(
            code,
            args.order,
            args.eps,
            grid_db=args.grid_db,
            min_errors=args.min_errors,
            max_trials=args.max_trials,
            seed=args.seed,
            workers=workers,
        )
        rows = codecsim.sweep_csv_rows(thr.sweep)
        sidecar.update(
            {
                "eps": args.eps,
                "grid_db": args.grid_db,
                "required_snr_db": thr.snr_db if thr.reached else None,
                "reached": thr.reached,
            }
        )
    _emit(args, ioutil.csv_text(codecsim.SWEEP_CSV_COLUMNS, rows), sidecar)
    return 0


def cmd_scenario(args) -> int:
    budget = LatencyBudget(deadline=args.dm, symbol_time=args.ts, binop_time=args.tb)
    override = _law_params(args)
    common = dict(
        budget=budget,
        epsilon=args.eps,
        power_cap_db=args.pm_db,
        rate_step=args.rate_step,
        n_step=args.n_step,
        params_extrapolation=args.extrapolation,
        params_override=override,
    )
    if args.which == "max-rate":
        if args.n is None:
            raise ValueError("max-rate needs --n")
        cfg = scenarios.ScenarioConfig(n_range=(2, max(args.n, 2)), **common)
        result = scenarios.max_rate_curve(args.n, cfg)
    elif args.which == "max-k":
        if args.pm_db is None:
            raise ValueError("max-k needs --pm-db")
        n_range = _parse_int_pair(args.n_range) if args.n_range else (
            2,
            int(args.dm / args.ts),
        )
        cfg = scenarios.ScenarioConfig(n_range=n_range, **common)
        result = scenarios.maximize_k(cfg)
    else:
        if args.k is None or args.pm_db is None:
            raise ValueError("min-latency needs --k and --pm-db")
        n_range = _parse_int_pair(args.n_range) if args.n_range else (args.k, 1000)
        cfg = scenarios.ScenarioConfig(n_range=n_range, k_fixed=args.k, **common)
        result = scenarios.minimize_latency(cfg)
    _emit(
        args,
        ioutil.csv_text(scenarios.CSV_COLUMNS, scenarios.csv_rows(result)),
        scenarios.summary_doc(result),
    )
    return 0


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="osdlat",
        description="Latency- and complexity-aware short-packet link tools",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    registry = {}

    def common(sub):
        sub.add_argument("--out", help="CSV output path (default stdout)")
        sub.add_argument("--config", help="JSON file whose values override flags")

    rate = subs.add_parser("rate", help="normal-approximation rate table")
    rate.add_argument("--n", type=int, required=True)
    rate.add_argument("--eps", type=float, required=True)
    rate.add_argument("--snr-db-range", required=True, help="start:stop:step in dB")
    rate.add_argument("--nodes", type=int, default=128)
    common(rate)
    rate.set_defaults(func=cmd_rate)
    registry["rate"] = rate

    comp = subs.add_parser("complexity", help="OSD complexity and latency table")
    comp.add_argument("--n", type=int, required=True)
    comp.add_argument("--k", type=int, required=True)
    comp.add_argument("--orders", default="0:2", help="lo:hi decoder orders")
    comp.add_argument("--dm", type=float, help="latency deadline in seconds")
    comp.add_argument("--ts", type=float, default=1e-6, help="symbol time in seconds")
    comp.add_argument("--tb", type=float, default=1e-9, help="binary-operation time in seconds")
    common(comp)
    comp.set_defaults(func=cmd_complexity)
    registry["complexity"] = comp

    trd = subs.add_parser("tradeoff", help="complexity/penalty law evaluation or fit")
    trd.add_argument("--n", type=float, default=128)
    trd.add_argument("--delta-rho-range", default="0:10:0.5", help="start:stop:step in dB")
    trd.add_argument("--extrapolation", choices=("power", "clamp"), default="power")
    trd.add_argument("--params-file", help="JSON law-parameter document")
    trd.add_argument("--fit", help="CSV of delta_rho_db,c points to fit")
    trd.add_argument("--n-anchor", type=int, default=128, help="blocklength tag for --fit")
    common(trd)
    trd.set_defaults(func=cmd_tradeoff)
    registry["tradeoff"] = trd

    sim = subs.add_parser("simulate", help="Monte Carlo BLER / required SNR")
    sim.add_argument("--code", required=True, help="eBCH code as NxK, e.g. 64x36")
    sim.add_argument("--order", type=int, required=True)
    sim.add_argument("--snr-db", type=float, help="estimate BLER at this SNR")
    sim.add_argument("--eps", type=float, help="sweep SNR until BLER reaches this target")
    sim.add_argument("--grid-db", type=float, default=0.25)
    sim.add_argument("--min-errors", type=int, default=100)
    sim.add_argument("--max-trials", type=int, default=10**6)
    sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common(sim)
    sim.set_defaults(func=cmd_simulate)
    registry["simulate"] = sim

    scn = subs.add_parser("scenario", help="optimization sweeps")
    scn.add_argument("--which", choices=("max-rate", "max-k", "min-latency"), required=True)
    scn.add_argument("--eps", type=float, default=1e-3)
    scn.add_argument("--dm", type=float, default=math.inf, help="deadline in seconds")
    scn.add_argument("--ts", type=float, default=1e-6)
    scn.add_argument("--tb", type=float, default=1e-9)
    scn.add_argument("--pm-db", type=float, help="power cap in dB (inf allowed)")
    scn.add_argument("--n", type=int, help="blocklength for max-rate")
    scn.add_argument("--k", type=int, help="payload bits for min-latency")
    scn.add_argument("--n-range", help="lo:hi blocklength sweep bounds")
    scn.add_argument("--n-step", type=int, default=1)
    scn.add_argument("--rate-step", type=float, default=0.05)
    scn.add_argument("--extrapolation", choices=("power", "clamp"), default="power")
    scn.add_argument("--params-file", help="JSON law-parameter document applied to all n")
    common(scn)
    scn.set_defaults(func=cmd_scenario)
    registry["scenario"] = scn

    return parser, registry


def _apply_config(parser, sub, args) -> None:
    if not getattr(args, "config", None):
        return
    doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        parser.error("--config must contain a JSON object")
    allowed = {a.dest for a in sub._actions} - {"help", "config"}
    unknown = set(doc) - allowed
    if unknown:
        parser.error(f"unknown config keys: {sorted(unknown)}")
    for key, value in doc.items():
        setattr(args, key, value)


def main(argv=None) -> int:
    parser, registry = build_parser()
    args = parser.parse_args(argv)
    _apply_config(parser, registry[args.command], args)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
