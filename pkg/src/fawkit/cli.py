"""Command-line surface: analytics, game solver, sweeps, simulation, fixtures.

Every subcommand wraps exactly one library operation (or a sweep of one) and
emits plot-ready JSON, CSV, or an aligned key/value table. Exit codes: 0 on
success, 1 on validation errors (the message names the violated constraint),
2 when an iterative solve did not converge (the best-effort result is still
emitted with converged=false).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from importlib import resources

from . import bounds as bounds_mod
from . import game as game_mod
from . import multi_pool
from . import simulator
from . import single_pool
from .errors import FawError, UnknownFixture
from .scenarios import (
    GameScenario,
    MultiPoolScenario,
    SinglePoolScenario,
    load_scenario,
    rer,
    scenario_to_dict,
    validate,
)

SCHEMA_VERSION = simulator.SCHEMA_VERSION
DEFAULT_SEED_ENV = "FAW_SEED"


# --- small helpers -----------------------------------------------------------

def parse_range(text: str) -> list[float]:
    """A float, or start:stop:step inclusive of stop when it lies on the grid."""
    parts = text.split(":")
    if len(parts) == 1:
        return [float(text)]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected FLOAT or START:STOP:STEP, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0.0:
        raise argparse.ArgumentTypeError("range step must be positive")
    values = []
    i = 0
    while True:
        v = start + i * step
        if v > stop + 1e-12:
            break
        values.append(v)
        i += 1
    if not values:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return values


def parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(",") if p.strip() != "")


def _tau_arg(text: str):
    return text if text == "auto" else float(text)


def _default_seed() -> int:
    return int(os.environ.get(DEFAULT_SEED_ENV, "42"))


def _flatten(doc, prefix=""):
    flat = {}
    for key, value in doc.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def emit(doc: dict, fmt: str, dest) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    if fmt == "json":
        text = json.dumps(doc, indent=2) + "\n"
    elif fmt == "csv":
        flat = _flatten(doc)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(flat))
        writer.writerow([json.dumps(v) if isinstance(v, (list, tuple)) else v
                         for v in flat.values()])
        text = buf.getvalue()
    else:  # table
        flat = _flatten(doc)
        width = max(len(k) for k in flat)
        text = "".join(
            f"{k:<{width}}  {json.dumps(v) if isinstance(v, (list, tuple)) else v}\n"
            for k, v in flat.items()
        )
    _write(text, dest)


def _write(text: str, dest) -> None:
    if dest in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(dest, "w") as fh:
            fh.write(text)


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise FawError(f"missing required flag --{name.replace('_', '-')}")


def _single_from_args(args, tau: float) -> SinglePoolScenario:
    if args.scenario:
        s = load_scenario(args.scenario)
        if not isinstance(s, SinglePoolScenario):
            raise FawError(f"scenario file holds a {type(s).__name__}, need SinglePoolScenario")
        return s
    _require(args, "alpha", "beta", "c")
    return validate(SinglePoolScenario(args.alpha, args.beta, tau, args.c))


def _multi_powers(args) -> tuple[float, tuple[float, ...]]:
    if args.preset:
        return multi_pool.preset_attack(args.preset)
    if args.alpha is None or args.betas is None:
        raise FawError("need --alpha and --betas (or --preset)")
    return args.alpha, args.betas


# --- subcommand handlers ------------------------------------------------------

def cmd_reward_single(args) -> int:
    if args.scenario:
        s = _single_from_args(args, 0.0)
        tau_doc = {"tau": s.tau, "tau_method": "given"}
    elif args.optimal_tau or args.tau == "auto":
        _require(args, "alpha", "beta", "c")
        res = single_pool.optimal_tau(args.alpha, args.beta, args.c)
        s = validate(SinglePoolScenario(args.alpha, args.beta, res.tau_bar, args.c))
        tau_doc = {"tau": res.tau_bar, "tau_method": res.method,
                   "tau_discrepancy": res.discrepancy}
    else:
        if args.tau is None:
            raise FawError("need --tau (or --optimal-tau / --tau auto)")
        s = _single_from_args(args, args.tau)
        tau_doc = {"tau": s.tau, "tau_method": "given"}
    attacker = single_pool.reward_single(s)
    victim = single_pool.victim_reward(s)
    emit({
        "scenario": scenario_to_dict(s),
        **tau_doc,
        "attacker_reward": attacker,
        "pool_reward": victim,
        "rer_pct": rer(attacker, s.alpha),
        "pool_rer_pct": rer(victim, s.beta + s.tau * s.alpha),
    }, args.format, args.output)
    return 0


def cmd_optimal_tau(args) -> int:
    res = single_pool.optimal_tau(args.alpha, args.beta, args.c)
    emit({
        "alpha": args.alpha, "beta": args.beta, "c": args.c,
        "tau_bar": res.tau_bar,
        "method": res.method,
        "numeric_tau": res.numeric_tau,
        "closed_form_tau": res.closed_form_tau,
        "discrepancy": res.discrepancy,
        "reward_at_optimum": res.reward_at_optimum,
        "rer_pct": rer(res.reward_at_optimum, args.alpha),
    }, args.format, args.output)
    return 0


def cmd_reward_multi(args) -> int:
    if args.scenario:
        s = load_scenario(args.scenario)
        if not isinstance(s, MultiPoolScenario):
            raise FawError(f"scenario file holds a {type(s).__name__}, need MultiPoolScenario")
    else:
        alpha, betas = _multi_powers(args)
        if args.taus is None:
            raise FawError("need --taus (or use optimize-alloc)")
        s = validate(MultiPoolScenario(alpha, betas, args.taus, args.c))
    reward = multi_pool.reward_npool(s)
    emit({
        "scenario": scenario_to_dict(s),
        "reward": reward,
        "rer_pct": rer(reward, s.alpha),
    }, args.format, args.output)
    return 0


def cmd_optimize_alloc(args) -> int:
    alpha, betas = _multi_powers(args)
    res = multi_pool.optimize_allocation(alpha, betas, args.c, budget=args.budget)
    emit({
        "alpha": alpha, "betas": list(betas), "c": args.c, "budget": args.budget,
        "taus": list(res.taus),
        "reward": res.reward,
        "rer_pct": res.rer_pct,
        "evaluations": res.evaluations,
        "converged": res.converged,
    }, args.format, args.output)
    return 0 if res.converged else 2


def _game_cs(args):
    if args.c is not None:
        return args.c, args.c, args.c / 2.0, args.c / 2.0
    missing = [n for n in ("c1", "c2", "c1p", "c2p") if getattr(args, n) is None]
    if missing:
        raise FawError(f"need --c (symmetric) or all of --c1/--c2/--c1p/--c2p; missing --{missing[0]}")
    return args.c1, args.c2, args.c1p, args.c2p


def cmd_game_solve(args) -> int:
    c1, c2, c1p, c2p = _game_cs(args)
    res = game_mod.solve_equilibrium(args.alpha1, args.alpha2, c1, c2, c1p, c2p,
                                     tol=args.tol, max_iter=args.max_iter)
    emit({
        "alpha1": args.alpha1, "alpha2": args.alpha2,
        "c1": c1, "c2": c2, "c1p": c1p, "c2p": c2p,
        "f1_star": res.f1_star, "f2_star": res.f2_star,
        "r1": res.r1, "r2": res.r2,
        "net1": res.net1, "net2": res.net2,
        "rer1_pct": res.rer1_pct, "rer2_pct": res.rer2_pct,
        "winner": game_mod.classify_winner(res.rer1_pct, res.rer2_pct),
        "iterations": res.iterations,
        "converged": res.converged,
        "deviation_gain": res.deviation_gain,
    }, args.format, args.output)
    return 0 if res.converged else 2


def cmd_game_sweep(args) -> int:
    sweep = game_mod.sweep_regions_assumed_c if args.assumed_c else game_mod.sweep_regions
    cells = sweep(args.alpha1, args.alpha2, args.c, tol=args.tol)
    if args.format == "json":
        emit({"alpha1": args.alpha1, "assumed_c": bool(args.assumed_c),
              "cells": [vars(c) | {} for c in cells]}, "json", args.output)
    else:
        _write(game_mod.write_sweep_csv(cells), args.output)
    return 0 if all(c.converged for c in cells) else 2


def _run_sim(args, scenario) -> int:
    cfg = simulator.SimConfig(rounds=args.rounds, seed=args.seed,
                              scenario=scenario, workers=args.workers)
    out = simulator.simulate(cfg)
    if args.format == "csv":
        header, values = out.csv_row()
        _write(",".join(map(str, header)) + "\n" + ",".join(map(str, values)) + "\n",
               args.output)
    else:
        emit(out.to_json_dict(), args.format, args.output)
    return 0


def cmd_sim_single(args) -> int:
    if args.scenario:
        scenario = load_scenario(args.scenario)
    else:
        _require(args, "alpha", "beta", "c")
        tau = args.tau
        if tau == "auto" or tau is None:
            tau = single_pool.optimal_tau(args.alpha, args.beta, args.c).tau_bar
        scenario = validate(SinglePoolScenario(args.alpha, args.beta, tau, args.c))
    return _run_sim(args, scenario)


def cmd_sim_multi(args) -> int:
    if args.scenario:
        scenario = load_scenario(args.scenario)
    else:
        alpha, betas = _multi_powers(args)
        if args.taus is None or (isinstance(args.taus, str) and args.taus == "auto"):
            taus = multi_pool.optimize_allocation(alpha, betas, args.c).taus
        else:
            taus = args.taus
        scenario = validate(MultiPoolScenario(alpha, betas, taus, args.c))
    return _run_sim(args, scenario)


def cmd_sim_game(args) -> int:
    if args.scenario:
        scenario = load_scenario(args.scenario)
    else:
        _require(args, "alpha1", "alpha2")
        c1, c2, c1p, c2p = _game_cs(args)
        f1, f2 = args.f1, args.f2
        if args.equilibrium:
            res = game_mod.solve_equilibrium(args.alpha1, args.alpha2, c1, c2, c1p, c2p)
            f1, f2 = res.f1_star, res.f2_star
        if f1 is None or f2 is None:
            raise FawError("need --f1 and --f2 (or --equilibrium)")
        scenario = validate(GameScenario(args.alpha1, args.alpha2, f1, f2, c1, c2, c1p, c2p))
    return _run_sim(args, scenario)


def cmd_bounds(args) -> int:
    what = args.what
    doc: dict
    if what == "c-max":
        dist = bounds_mod.HonestPowerDistribution(args.shares or (), args.atomized)
        value = bounds_mod.c_max_single(args.alpha, args.beta, dist)
        doc = {"what": what, "alpha": args.alpha, "beta": args.beta,
               "shares": list(dist.shares), "atomized_remainder": dist.atomized_remainder,
               "c_max": value}
    elif what == "c-min":
        doc = {"what": what, "alpha": args.alpha, "beta": args.beta,
               "c_min": bounds_mod.c_min_rational(args.alpha, args.beta)}
    elif what == "c-from-gamma":
        doc = {"what": what, "gamma": args.gamma, "alpha": args.alpha, "beta": args.beta,
               "c": bounds_mod.c_from_gamma(args.gamma, args.alpha, args.beta)}
    elif what == "selfish-threshold":
        doc = {"what": what, "gamma": args.gamma,
               "threshold": bounds_mod.selfish_mining_threshold(args.gamma)}
    else:  # gamma-bound
        dist = bounds_mod.HonestPowerDistribution(args.shares or (), args.atomized)
        doc = {"what": what, "alpha": args.alpha, "shares": list(dist.shares),
               "atomized_remainder": dist.atomized_remainder,
               "gamma_bound": bounds_mod.gamma_upper_bound(dist, args.alpha)}
    emit(doc, args.format, args.output)
    return 0


def cmd_counter(args) -> int:
    what = args.what
    if what == "detection":
        value = bounds_mod.detection_resilient_reward(args.alpha, args.beta, args.tau,
                                                      args.c, args.identities)
        doc = {"what": what, "alpha": args.alpha, "beta": args.beta, "tau": args.tau,
               "c": args.c, "L": args.identities, "reward_lower_bound": value,
               "rer_pct": rer(value, args.alpha),
               "note": bounds_mod.GAMMA_AS_TAU_NOTE}
    elif what == "honeypot":
        value = bounds_mod.honeypot_bwh_bound(args.alpha, args.beta, args.tau, args.identities)
        doc = {"what": what, "alpha": args.alpha, "beta": args.beta, "tau": args.tau,
               "L": args.identities, "reward_lower_bound": value,
               "rer_pct": rer(value, args.alpha),
               "note": bounds_mod.GAMMA_AS_TAU_NOTE}
    elif what == "bonus":
        value = bounds_mod.bonus_scheme_reward(args.alpha, args.beta, args.tau, args.c, args.t)
        doc = {"what": what, "alpha": args.alpha, "beta": args.beta, "tau": args.tau,
               "c": args.c, "t": args.t, "reward": value,
               "rer_pct": rer(value, args.alpha)}
    else:  # bonus-threshold
        value = bounds_mod.safe_bonus_threshold(args.pool_power, args.c_max)
        doc = {"what": what, "pool_power": args.pool_power, "c_max": args.c_max,
               "threshold": value,
               "feasible": bounds_mod.bonus_threshold_feasible(value)}
    emit(doc, args.format, args.output)
    return 0


# --- reproduction fixtures ----------------------------------------------------

FIXTURE_NAMES = ("table1", "case4", "changing-c", "borderline-c1", "cmax-0914", "selfish-009")


def load_fixture(name: str) -> dict:
    if name not in FIXTURE_NAMES:
        raise UnknownFixture(f"no fixture {name!r}; built-ins: {', '.join(FIXTURE_NAMES)}")
    path = resources.files("fawkit").joinpath("fixtures", f"{name}.json")
    return json.loads(path.read_text())


def _check(rows, name, expected, actual, ok):
    rows.append({"check": name, "expected": expected, "actual": actual, "ok": bool(ok)})


def _reproduce_table1(fx, rows):
    tol = fx["tolerance_pp"]
    for ci, c in enumerate(fx["cs"]):
        for ai, alpha in enumerate(fx["alphas"]):
            res = single_pool.optimal_tau(alpha, fx["beta"], c)
            got = rer(res.reward_at_optimum, alpha)
            want = fx["expected_rer_pct"][ci][ai]
            _check(rows, f"rer(alpha={alpha}, c={c})", want, round(got, 4),
                   abs(got - want) <= tol)


def _reproduce_case4(fx, rows):
    tol = fx["tolerances"]
    bwh = multi_pool.optimize_allocation(fx["alpha"], fx["betas"], 0.0)
    faw = multi_pool.optimize_allocation(fx["alpha"], fx["betas"], 1.0)
    improvement = (faw.rer_pct - bwh.rer_pct) / bwh.rer_pct * 100.0
    exp = fx["expected"]
    _check(rows, "bwh_rer_pct", exp["bwh_rer_pct"], round(bwh.rer_pct, 4),
           abs(bwh.rer_pct - exp["bwh_rer_pct"]) <= tol["rer_pp"])
    _check(rows, "faw_rer_pct", exp["faw_rer_pct"], round(faw.rer_pct, 4),
           abs(faw.rer_pct - exp["faw_rer_pct"]) <= tol["rer_pp"])
    _check(rows, "improvement_pct", exp["improvement_pct"], round(improvement, 4),
           abs(improvement - exp["improvement_pct"]) <= tol["improvement_pp"])


def _reproduce_changing_c(fx, rows):
    tol = fx["tolerances"]
    planned = fx["planned_taus"]
    bwh = multi_pool.fixed_tau_reward_mismatched_c(fx["alpha"], fx["betas"], planned, 0.0)
    mis = multi_pool.fixed_tau_reward_mismatched_c(fx["alpha"], fx["betas"], planned,
                                                   fx["c_actual"])
    bwh_rer = rer(bwh, fx["alpha"])
    mis_rer = rer(mis, fx["alpha"])
    improvement = (mis_rer - bwh_rer) / bwh_rer * 100.0
    exp = fx["expected"]
    _check(rows, "rer_pct", exp["rer_pct"], round(mis_rer, 4),
           abs(mis_rer - exp["rer_pct"]) <= tol["rer_pp"])
    _check(rows, "improvement_pct", exp["improvement_pct"], round(improvement, 4),
           abs(improvement - exp["improvement_pct"]) <= tol["improvement_pp"])


def _reproduce_borderline(fx, rows):
    ax = fx["alpha2_axis"]
    axis = parse_range(f"{ax['start']}:{ax['stop']}:{ax['step']}")
    cells = game_mod.sweep_regions(fx["alpha1"], axis, [fx["c"]])
    flip = None
    for prev, cell in zip(cells, cells[1:]):
        if prev.winner == game_mod.WINNER_POOL1 and cell.winner != game_mod.WINNER_POOL1:
            flip = 0.5 * (prev.alpha2 + cell.alpha2)
            break
    want = fx["expected_crossing_alpha2"]
    tol = fx["tolerance_cells"] * ax["step"]
    _check(rows, "crossing_alpha2", want, None if flip is None else round(flip, 6),
           flip is not None and abs(flip - want) <= tol + 1e-12)
    off_diag = [c for c in cells if abs(c.alpha2 - fx["alpha1"]) > ax["step"] + 1e-12]
    larger_wins = all(
        (c.winner == game_mod.WINNER_POOL1) == (fx["alpha1"] > c.alpha2)
        for c in off_diag
    )
    _check(rows, "larger_pool_wins_everywhere", True, larger_wins, larger_wins)


def _reproduce_cmax(fx, rows):
    dist = bounds_mod.HonestPowerDistribution(fx["honest_shares"], fx["atomized_remainder"])
    got = bounds_mod.c_max_single(fx["alpha"], fx["beta"], dist)
    _check(rows, "c_max", fx["expected_c_max"], round(got, 6),
           abs(got - fx["expected_c_max"]) <= fx["tolerance"])


def _reproduce_selfish(fx, rows):
    got = bounds_mod.selfish_mining_threshold(fx["gamma"])
    lo, hi = fx["expected_threshold_range"]
    _check(rows, "selfish_threshold", f"[{lo}, {hi}]", round(got, 6), lo <= got <= hi)
    gb = fx["gamma_bound"]
    dist = bounds_mod.HonestPowerDistribution(gb["honest_shares"], gb["atomized_remainder"])
    got_gb = bounds_mod.gamma_upper_bound(dist, gb["alpha"])
    _check(rows, "gamma_upper_bound", gb["expected"], got_gb,
           abs(got_gb - gb["expected"]) <= gb["tolerance"])


_REPRODUCERS = {
    "table1": _reproduce_table1,
    "case4": _reproduce_case4,
    "changing-c": _reproduce_changing_c,
    "borderline-c1": _reproduce_borderline,
    "cmax-0914": _reproduce_cmax,
    "selfish-009": _reproduce_selfish,
}


def reproduce(name: str) -> tuple[bool, list[dict]]:
    """Run one built-in fixture; returns (all_passed, per-check rows)."""
    fx = load_fixture(name)
    rows: list[dict] = []
    _REPRODUCERS[name](fx, rows)
    return all(r["ok"] for r in rows), rows


def cmd_reproduce(args) -> int:
    ok, rows = reproduce(args.fixture)
    if args.format == "json":
        emit({"fixture": args.fixture, "passed": ok, "checks": rows}, "json", args.output)
    else:
        lines = [f"fixture: {args.fixture}"]
        for r in rows:
            status = "PASS" if r["ok"] else "FAIL"
            lines.append(f"  [{status}] {r['check']}: expected {r['expected']}, got {r['actual']}")
        lines.append(f"result: {'PASS' if ok else 'FAIL'} ({sum(r['ok'] for r in rows)}/{len(rows)})")
        _write("\n".join(lines) + "\n", args.output)
    return 0 if ok else 1


# --- parser -------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--output", default=None, help="destination path (default stdout)")


def _add_scenario_opt(p):
    p.add_argument("--scenario", default=None, help="JSON scenario file instead of inline flags")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="faw", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reward-single", help="closed-form single-pool attacker reward")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--tau", type=_tau_arg, default=None, help="infiltration fraction, or 'auto'")
    p.add_argument("--optimal-tau", action="store_true", help="use the optimal infiltration fraction")
    _add_scenario_opt(p)
    _add_common(p)
    p.set_defaults(func=cmd_reward_single)

    p = sub.add_parser("optimal-tau", help="optimal infiltration fraction for one pool")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_optimal_tau)

    p = sub.add_parser("reward-multi", help="closed-form n-pool attacker reward")
    p.add_argument("--alpha", type=float)
    p.add_argument("--betas", type=parse_floats)
    p.add_argument("--taus", type=parse_floats)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--preset", choices=sorted(multi_pool.POOL_PRESETS))
    _add_scenario_opt(p)
    _add_common(p)
    p.set_defaults(func=cmd_reward_multi)

    p = sub.add_parser("optimize-alloc", help="optimal infiltration split over n pools")
    p.add_argument("--alpha", type=float)
    p.add_argument("--betas", type=parse_floats)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--budget", type=float, default=1.0)
    p.add_argument("--preset", choices=sorted(multi_pool.POOL_PRESETS))
    _add_common(p)
    p.set_defaults(func=cmd_optimize_alloc)

    p = sub.add_parser("game-solve", help="two-pool game equilibrium")
    p.add_argument("--alpha1", type=float, required=True)
    p.add_argument("--alpha2", type=float, required=True)
    p.add_argument("--c", type=float, default=None, help="symmetric model: c_i=c, c_i'=c/2")
    p.add_argument("--c1", type=float, default=None)
    p.add_argument("--c2", type=float, default=None)
    p.add_argument("--c1p", type=float, default=None)
    p.add_argument("--c2p", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=10000)
    _add_common(p)
    p.set_defaults(func=cmd_game_solve)

    p = sub.add_parser("game-sweep", help="winner-region sweep over (alpha2, c)")
    p.add_argument("--alpha1", type=float, required=True)
    p.add_argument("--alpha2", type=parse_range, required=True, help="FLOAT or START:STOP:STEP")
    p.add_argument("--c", type=parse_range, required=True, help="FLOAT or START:STOP:STEP")
    p.add_argument("--assumed-c", action="store_true",
                   help="plan strategies at c = alpha1+alpha2, evaluate at the axis c")
    p.add_argument("--tol", type=float, default=1e-7)
    _add_common(p)
    p.set_defaults(func=cmd_game_sweep, format="csv")

    for kind in ("single", "multi", "game"):
        p = sub.add_parser(f"sim-{kind}", help=f"Monte Carlo {kind} run")
        if kind == "single":
            p.add_argument("--alpha", type=float)
            p.add_argument("--beta", type=float)
            p.add_argument("--c", type=float)
            p.add_argument("--tau", type=_tau_arg, default=None, help="fraction or 'auto'")
            p.set_defaults(func=cmd_sim_single)
        elif kind == "multi":
            p.add_argument("--alpha", type=float)
            p.add_argument("--betas", type=parse_floats)
            p.add_argument("--taus", type=parse_floats, default=None)
            p.add_argument("--c", type=float, default=0.0)
            p.add_argument("--preset", choices=sorted(multi_pool.POOL_PRESETS))
            p.set_defaults(func=cmd_sim_multi)
        else:
            p.add_argument("--alpha1", type=float)
            p.add_argument("--alpha2", type=float)
            p.add_argument("--f1", type=float, default=None)
            p.add_argument("--f2", type=float, default=None)
            p.add_argument("--c", type=float, default=None)
            p.add_argument("--c1", type=float, default=None)
            p.add_argument("--c2", type=float, default=None)
            p.add_argument("--c1p", type=float, default=None)
            p.add_argument("--c2p", type=float, default=None)
            p.add_argument("--equilibrium", action="store_true",
                           help="simulate at the solved equilibrium point")
            p.set_defaults(func=cmd_sim_game)
        p.add_argument("--rounds", type=int, required=True)
        p.add_argument("--seed", type=int, default=_default_seed(),
                       help=f"default 42, overridable via ${DEFAULT_SEED_ENV}")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                       help="worker threads; results do not depend on this")
        _add_scenario_opt(p)
        _add_common(p)

    p = sub.add_parser("bounds", help="fork-win probability bounds and related thresholds")
    p.add_argument("what", choices=("c-max", "c-min", "c-from-gamma",
                                    "selfish-threshold", "gamma-bound"))
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--shares", type=parse_floats, default=None)
    p.add_argument("--atomized", type=float, default=0.0)
    _add_common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("counter", help="countermeasure economics")
    p.add_argument("what", choices=("detection", "honeypot", "bonus", "bonus-threshold"))
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("-L", "--identities", type=int, default=1)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--pool-power", type=float, default=0.0)
    p.add_argument("--c-max", type=float, default=0.0, dest="c_max")
    _add_common(p)
    p.set_defaults(func=cmd_counter)

    p = sub.add_parser("reproduce", help="run a built-in golden fixture")
    p.add_argument("fixture", choices=FIXTURE_NAMES)
    _add_common(p)
    p.set_defaults(func=cmd_reproduce, format="table")

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FawError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ZeroDivisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
