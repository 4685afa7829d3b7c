"""Command-line front end.

Subcommands: gen, analyze, frustration, simulate-ct, simulate-dt, sweep-ct,
sweep-dt, ensemble, run. Every subcommand accepts --config pointing at a JSON
file (schema 1) whose keys mirror the flag names; explicitly passed flags win
over config values. `run` reads the mode from the config itself.

Exit codes: 0 success, 2 configuration/input errors, 3 numeric failures.
Outputs are canonical JSON/CSV (17 significant digits) so reruns are
byte-identical apart from the timestamp field.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

import numpy as np

from . import dynamics_ct, dynamics_dt, sweep as sweep_mod
from .errors import ConfigError, SignedDynError, TooLargeForExact
from .frustration import frustration_exact, frustration_heuristic, check_pi1_bounds
from .graph import (
    SignedGraph,
    load_graph_csv,
    load_graph_json,
    random_signed_graph,
    regularize_degrees,
    save_graph_json,
    is_structurally_balanced,
)
from .nonlinearity import make_profile
from .serialize import write_json
from .spectra import thresholds

SCHEMA_VERSION = 1
JOBS_ENV_VAR = "SIGNEDDYN_JOBS"


def _timestamp() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV_VAR, "1")))
    except ValueError:
        return 1


def _load_graph(path: str) -> SignedGraph:
    if not os.path.exists(path):
        raise ConfigError(f"graph file not found: {path}")
    if path.endswith(".csv"):
        return load_graph_csv(path)
    return load_graph_json(path)


def _profile_from_args(args) -> "make_profile":
    params = {}
    if args.psi_params:
        try:
            params = json.loads(args.psi_params)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--psi-params is not valid JSON: {exc}") from exc
    return make_profile(args.psi, params)


def _x0_from_args(args, G: SignedGraph, pi: float) -> np.ndarray:
    choice = args.x0
    if choice == "zero":
        return np.zeros(G.n)
    if choice == "random":
        rng = np.random.default_rng(args.x0_seed)
        return dynamics_ct.sample_l1_ball(rng, G.n, pi * G.n)
    if not os.path.exists(choice):
        raise ConfigError(f"--x0 must be 'zero', 'random', or a JSON file; got {choice}")
    with open(choice) as fh:
        data = json.load(fh)
    x0 = np.asarray(data, dtype=float).ravel()
    if x0.size != G.n:
        raise ConfigError(f"x0 file has length {x0.size}, graph has n={G.n}")
    return x0


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Overlay config-file values under explicitly passed flags (flags win)."""
    if not getattr(args, "config", None):
        return
    path = args.config
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    if cfg.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"{path}: expected \"schema\": {SCHEMA_VERSION}")
    for key, value in cfg.items():
        if key in ("schema", "mode"):
            continue
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ConfigError(f"{path}: unknown config key {key!r} for this mode")
        if getattr(args, dest) == parser.get_default(dest):
            setattr(args, dest, value)


# -- handlers -------------------------------------------------------------------


def _cmd_gen(args) -> int:
    G = random_signed_graph(
        args.n,
        args.p,
        args.beta,
        weight_low=args.wlow,
        weight_high=args.whigh,
        seed=args.seed,
    )
    if args.regularize is not None:
        G = regularize_degrees(G, target_degree=args.regularize)
    save_graph_json(G, args.out)
    print(f"wrote {args.out}: n={G.n}, edges={G.edge_count}")
    return 0


def _analysis_record(
    G: SignedGraph,
    eps_step: Optional[float],
    exact_cap: int,
    restarts: int,
    seed: Optional[int],
) -> dict:
    summary = thresholds(G, eps_step=eps_step)
    balanced, signature = is_structurally_balanced(G)
    try:
        fr = frustration_exact(G, cap=exact_cap)
    except TooLargeForExact:
        fr = frustration_heuristic(G, restarts=restarts, seed=seed)
    bound = check_pi1_bounds(G, fr)
    record = {
        "n": G.n,
        "edges": G.edge_count,
        "balanced": balanced,
        "balancing_signature": signature.tolist() if signature is not None else None,
        "thresholds": summary.to_dict(),
        "frustration": {
            "value": fr.value,
            "exact": fr.exact,
            "restarts": fr.restarts_used,
        },
        "pi1_bound": {
            "cap": bound.cap,
            "upper": bound.upper if bound.upper != float("inf") else None,
            "holds": bound.holds,
            "symmetric_L": bound.symmetric_L,
        },
    }
    if eps_step is not None:
        record["first_bifurcation"] = dynamics_dt.classify_first_bifurcation(summary)
    return record


def _cmd_analyze(args) -> int:
    G = _load_graph(args.graph)
    record = _analysis_record(
        G, args.eps_step, args.exact_cap, args.restarts, args.frustration_seed
    )
    th = record["thresholds"]
    lam = " ".join(format(v, ".6g") for v in th["lambda"])
    print(f"graph: n={record['n']} edges={record['edges']} balanced={record['balanced']}")
    print(f"spectrum(normalized laplacian): {lam}")
    pi2 = th["pi2"] if th["pi2"] is not None else "inf"
    print(f"thresholds: pi1={th['pi1']:.6g} pi2={pi2 if pi2 == 'inf' else format(pi2, '.6g')}", end="")
    if th["pi1d"] is not None:
        print(f" pi1d={th['pi1d']:.6g} (eps_step={th['eps_step']:.6g})", end="")
    print()
    fr = record["frustration"]
    print(f"frustration: {fr['value']:.6g} ({'exact' if fr['exact'] else 'heuristic'})")
    pb = record["pi1_bound"]
    print(f"pi1 bound: 1 <= pi1 <= min(n/(n-2eps)={pb['cap']:.6g}, pi2) holds={pb['holds']}"
          f" symmetric_L={pb['symmetric_L']}")
    if "first_bifurcation" in record:
        print(f"first discrete bifurcation: {record['first_bifurcation']}")
    if args.out:
        write_json(args.out, {"schema": SCHEMA_VERSION, "mode": "analyze",
                              "timestamp": _timestamp(), "result": record})
    return 0


def _cmd_frustration(args) -> int:
    G = _load_graph(args.graph)
    if args.exact:
        fr = frustration_exact(G, cap=args.exact_cap)
    else:
        fr = frustration_heuristic(G, restarts=args.restarts, seed=args.seed)
    payload = {
        "value": fr.value,
        "signature": fr.signature.tolist(),
        "exact": fr.exact,
        "restarts": fr.restarts_used,
    }
    print(f"frustration={fr.value:.12g} exact={fr.exact}")
    if args.out:
        write_json(args.out, {"schema": SCHEMA_VERSION, "mode": "frustration",
                              "timestamp": _timestamp(), "result": payload})
    return 0


def _cmd_simulate_ct(args) -> int:
    G = _load_graph(args.graph)
    profile = _profile_from_args(args)
    x0 = _x0_from_args(args, G, args.pi)
    traj = dynamics_ct.integrate(
        G, profile, args.pi, x0,
        horizon=args.horizon, step=args.step,
        adaptive=args.adaptive, stop_tol=args.stop_tol,
    )
    terminal = traj.terminal
    print(f"integrated to t={traj.times[-1]:.6g} converged={traj.converged} "
          f"|x|_inf={np.max(np.abs(terminal)):.6g}")
    if args.out_csv:
        traj.to_csv(args.out_csv)
    if args.out_json:
        write_json(args.out_json, {
            "schema": SCHEMA_VERSION, "mode": "simulate-ct", "timestamp": _timestamp(),
            "pi": args.pi, "converged": traj.converged,
            "terminal": terminal.tolist(),
        })
    return 0


def _cmd_simulate_dt(args) -> int:
    G = _load_graph(args.graph)
    profile = _profile_from_args(args)
    x0 = _x0_from_args(args, G, args.pi)
    outcome = dynamics_dt.simulate(
        G, profile, args.pi, args.eps_step, x0, max_iters=args.iters, tol=args.tol
    )
    print(f"outcome={outcome.kind} iterations={outcome.iterations} "
          f"amplitude={outcome.amplitude:.6g}")
    if args.out_csv:
        states = dynamics_dt.iterate_map(
            G, profile, args.pi, args.eps_step, x0, outcome.iterations
        )
        from .serialize import write_csv
        write_csv(
            args.out_csv,
            ["t"] + [f"x{i+1}" for i in range(G.n)],
            [[float(k)] + row.tolist() for k, row in enumerate(states)],
        )
    if args.out_json:
        payload = {
            "schema": SCHEMA_VERSION, "mode": "simulate-dt", "timestamp": _timestamp(),
            "pi": args.pi, "eps_step": args.eps_step, "kind": outcome.kind,
            "iterations": outcome.iterations,
        }
        if outcome.state is not None:
            payload["state"] = outcome.state.tolist()
        if outcome.pair is not None:
            payload["pair"] = [outcome.pair[0].tolist(), outcome.pair[1].tolist()]
            payload["amplitude"] = outcome.amplitude
        write_json(args.out_json, payload)
    return 0


def _grid(args) -> np.ndarray:
    if args.pi_max <= args.pi_min or args.pi_step <= 0:
        raise ConfigError("need pi-min < pi-max and pi-step > 0")
    return np.arange(args.pi_min, args.pi_max + 0.5 * args.pi_step, args.pi_step)


def _cmd_sweep_ct(args) -> int:
    G = _load_graph(args.graph)
    profile = _profile_from_args(args)
    result = sweep_mod.sweep_ct(
        G, profile, _grid(args), seeds_per_point=args.seeds_per_point, seed=args.seed
    )
    print(f"sweep-ct over {len(result.grid)} cells; onsets={result.onsets}")
    if args.out_csv:
        result.to_csv(args.out_csv)
    if args.out_json:
        write_json(args.out_json, {"schema": SCHEMA_VERSION, "mode": "sweep-ct",
                                   "timestamp": _timestamp(), **result.to_dict()})
    return 0


def _cmd_sweep_dt(args) -> int:
    G = _load_graph(args.graph)
    profile = _profile_from_args(args)
    result = sweep_mod.sweep_dt(
        G, profile, _grid(args), args.eps_step,
        seeds_per_point=args.seeds_per_point, seed=args.seed, max_iters=args.iters,
    )
    print(f"sweep-dt over {len(result.grid)} cells; onsets={result.onsets}")
    if args.out_csv:
        result.to_csv(args.out_csv)
    if args.out_json:
        write_json(args.out_json, {"schema": SCHEMA_VERSION, "mode": "sweep-dt",
                                   "timestamp": _timestamp(), **result.to_dict()})
    return 0


def _ensemble_member(payload: tuple) -> dict:
    (n, p, beta, wlow, whigh, seed, eps_step, exact_cap, restarts) = payload
    G = random_signed_graph(n, p, beta, weight_low=wlow, weight_high=whigh, seed=seed)
    record = _analysis_record(G, eps_step, exact_cap, restarts, seed)
    record["seed"] = seed
    return record


def _cmd_ensemble(args) -> int:
    payloads = [
        (args.n, args.p, args.beta, args.wlow, args.whigh, args.seed + k,
         args.eps_step, args.exact_cap, args.restarts)
        for k in range(args.count)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_ensemble_member, payloads))
    else:
        records = [_ensemble_member(p) for p in payloads]
    holds = sum(1 for r in records if r["pi1_bound"]["holds"])
    print(f"ensemble: {len(records)} graphs, pi1 bound holds on {holds}/{len(records)}")
    if args.out:
        write_json(args.out, {"schema": SCHEMA_VERSION, "mode": "ensemble",
                              "timestamp": _timestamp(), "members": records})
    return 0


def _cmd_run(args) -> int:
    if not args.config:
        raise ConfigError("run requires --config")
    with open(args.config) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{args.config}: invalid JSON at line {exc.lineno}: {exc.msg}"
            ) from exc
    mode = cfg.get("mode")
    if mode in (None, "run"):
        raise ConfigError("config for `run` must carry a \"mode\" other than run")
    return main([str(mode), "--config", args.config])


# -- parser ----------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser, graph: bool = True) -> None:
    sub.add_argument("--config", default=None, help="JSON config file (schema 1)")
    if graph:
        sub.add_argument("--graph", default=None, help="graph file (.json or .csv)")


def _add_profile_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--psi", default="tanh", choices=["tanh", "rational"],
                     help="nonlinearity family")
    sub.add_argument("--psi-params", default=None,
                     help='JSON parameters for the family, e.g. {"p": 2}')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signeddyn",
        description="Decision dynamics on signed networks: spectra, frustration, bifurcations",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    g = subs.add_parser("gen", help="generate a random signed graph file")
    _add_common(g, graph=False)
    g.add_argument("--n", type=int, default=20)
    g.add_argument("--p", type=float, default=0.5)
    g.add_argument("--beta", type=float, default=0.5)
    g.add_argument("--wlow", type=float, default=0.0)
    g.add_argument("--whigh", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--regularize", type=float, default=None,
                   help="rescale |A| to this constant row sum")
    g.add_argument("--out", required=True)
    g.set_defaults(handler=_cmd_gen, _parser=g)

    a = subs.add_parser("analyze", help="thresholds, balance, frustration, bound check")
    _add_common(a)
    a.add_argument("--eps-step", type=float, default=None)
    a.add_argument("--exact-cap", type=int, default=24)
    a.add_argument("--restarts", type=int, default=50)
    a.add_argument("--frustration-seed", type=int, default=0)
    a.add_argument("--out", default=None)
    a.set_defaults(handler=_cmd_analyze, _parser=a)

    f = subs.add_parser("frustration", help="frustration index of a graph")
    _add_common(f)
    f.add_argument("--exact", action="store_true")
    f.add_argument("--exact-cap", type=int, default=24)
    f.add_argument("--restarts", type=int, default=50)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out", default=None)
    f.set_defaults(handler=_cmd_frustration, _parser=f)

    sc = subs.add_parser("simulate-ct", help="integrate the continuous-time model")
    _add_common(sc)
    _add_profile_flags(sc)
    sc.add_argument("--pi", type=float, required=True)
    sc.add_argument("--horizon", type=float, default=100.0)
    sc.add_argument("--step", type=float, default=0.05)
    sc.add_argument("--adaptive", action="store_true")
    sc.add_argument("--stop-tol", type=float, default=1e-9)
    sc.add_argument("--x0", default="random", help="zero | random | JSON file")
    sc.add_argument("--x0-seed", type=int, default=0)
    sc.add_argument("--out-csv", default=None)
    sc.add_argument("--out-json", default=None)
    sc.set_defaults(handler=_cmd_simulate_ct, _parser=sc)

    sd = subs.add_parser("simulate-dt", help="iterate the discrete-time map")
    _add_common(sd)
    _add_profile_flags(sd)
    sd.add_argument("--pi", type=float, required=True)
    sd.add_argument("--eps-step", type=float, default=0.3)
    sd.add_argument("--iters", type=int, default=20000)
    sd.add_argument("--tol", type=float, default=1e-9)
    sd.add_argument("--x0", default="random", help="zero | random | JSON file")
    sd.add_argument("--x0-seed", type=int, default=0)
    sd.add_argument("--out-csv", default=None)
    sd.add_argument("--out-json", default=None)
    sd.set_defaults(handler=_cmd_simulate_dt, _parser=sd)

    wc = subs.add_parser("sweep-ct", help="equilibrium branches over a pi grid")
    _add_common(wc)
    _add_profile_flags(wc)
    wc.add_argument("--pi-min", type=float, default=0.005)
    wc.add_argument("--pi-max", type=float, default=4.0)
    wc.add_argument("--pi-step", type=float, default=0.005)
    wc.add_argument("--seeds-per-point", type=int, default=20)
    wc.add_argument("--seed", type=int, default=0)
    wc.add_argument("--out-csv", default=None)
    wc.add_argument("--out-json", default=None)
    wc.set_defaults(handler=_cmd_sweep_ct, _parser=wc)

    wd = subs.add_parser("sweep-dt", help="discrete attractor branches over a pi grid")
    _add_common(wd)
    _add_profile_flags(wd)
    wd.add_argument("--pi-min", type=float, default=0.01)
    wd.add_argument("--pi-max", type=float, default=3.0)
    wd.add_argument("--pi-step", type=float, default=0.01)
    wd.add_argument("--eps-step", type=float, default=0.3)
    wd.add_argument("--iters", type=int, default=20000)
    wd.add_argument("--seeds-per-point", type=int, default=6)
    wd.add_argument("--seed", type=int, default=0)
    wd.add_argument("--out-csv", default=None)
    wd.add_argument("--out-json", default=None)
    wd.set_defaults(handler=_cmd_sweep_dt, _parser=wd)

    e = subs.add_parser("ensemble", help="bulk analysis of random graphs")
    _add_common(e, graph=False)
    e.add_argument("--count", type=int, default=10)
    e.add_argument("--n", type=int, default=20)
    e.add_argument("--p", type=float, default=0.5)
    e.add_argument("--beta", type=float, default=0.5)
    e.add_argument("--wlow", type=float, default=0.0)
    e.add_argument("--whigh", type=float, default=1.0)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--eps-step", type=float, default=None)
    e.add_argument("--exact-cap", type=int, default=16)
    e.add_argument("--restarts", type=int, default=50)
    e.add_argument("--jobs", type=int, default=_default_jobs(),
                   help=f"worker processes (env {JOBS_ENV_VAR})")
    e.add_argument("--out", default=None)
    e.set_defaults(handler=_cmd_ensemble, _parser=e)

    r = subs.add_parser("run", help="execute a config file (mode taken from it)")
    r.add_argument("--config", required=True)
    r.set_defaults(handler=_cmd_run, _parser=r)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.handler is not _cmd_run:
            _apply_config(args, args._parser)
            if hasattr(args, "graph") and args.graph is None:
                raise ConfigError("a graph file is required (--graph or config)")
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SignedDynError as exc:
        print(f"numeric failure [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
