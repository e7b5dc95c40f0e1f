"""Command-line entry point: ``aqtwireless run|check|sweep|gadget|search``.

Exit codes: 0 success, 1 input error, 2 bound violation (or a failed
equivalence check), 3 inadmissible trace.

Scenario bundles are directories holding ``network.txt``, ``schedule.txt``,
``trace.txt``, ``witness.txt`` and ``config.txt``.  Config files are flat
``key = value`` lines; command-line flags override them.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence

from aqtwireless.adversary import (
    AdversaryBudget,
    find_witness,
    read_schedule,
    read_trace,
    read_witness,
    uniform_witness,
    verify_witness,
    write_schedule,
    write_trace,
    write_witness,
)
from aqtwireless.core import ParseError, read_network, write_network
from aqtwireless.engine import SAME_SLOT, NEXT_SLOT, WIRELESS, WIRELINE, run
from aqtwireless.metrics import BoundReport, delay_stats, stability_report
from aqtwireless.policies import PolicyKind, SelectorKind, parse_assignments
from aqtwireless.scenarios import (
    GadgetParams,
    ScenarioBundle,
    ScenarioError,
    build_gadget,
    equivalence_check,
    fact1_check,
    gadget_trace,
    random_scenario,
    search_adversary,
    wireless_simulation_bundle,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BOUND = 2
EXIT_INADMISSIBLE = 3

ELIGIBILITY_KEY = "eligibility.injection"
BUNDLE_FILES = ("network.txt", "schedule.txt", "trace.txt", "witness.txt", "config.txt")


class InputError(Exception):
    pass


# ------------------------------------------------------------------ config

def read_config(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, "expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def write_config(cfg: dict[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in sorted(cfg.items()))


def _load_config(args) -> dict[str, str]:
    cfg: dict[str, str] = {}
    bundle = getattr(args, "bundle", None)
    if bundle and os.path.exists(os.path.join(bundle, "config.txt")):
        cfg.update(_parse_file(os.path.join(bundle, "config.txt"), read_config))
    if getattr(args, "config", None):
        cfg.update(_parse_file(args.config, read_config))
    for key in ("seed", "horizon", "mode", "b", "r", "d"):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = str(value)
    if getattr(args, "eligibility", None):
        cfg[ELIGIBILITY_KEY] = args.eligibility
    return cfg


def _parse_file(path: str, parser, *extra):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return parser(text, *extra)
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _get(cfg, key, conv, default=None):
    if key not in cfg:
        if default is None:
            raise InputError(f"missing required setting {key!r}")
        return default
    try:
        return conv(cfg[key])
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad value for {key!r}: {cfg[key]!r}") from None


def _budget(cfg) -> AdversaryBudget:
    try:
        return AdversaryBudget(_get(cfg, "b", int), _get(cfg, "r", Fraction))
    except ValueError as exc:
        raise InputError(str(exc)) from None


# ----------------------------------------------------------------- bundles

def load_bundle(directory: str, cfg: dict[str, str]) -> ScenarioBundle:
    net = _parse_file(os.path.join(directory, "network.txt"), read_network)
    trace = _parse_file(os.path.join(directory, "trace.txt"), read_trace)
    horizon = _get(cfg, "horizon", int, trace.horizon)
    if "d" in cfg:
        net = net.with_max_hops(_get(cfg, "d", int))
    schedule = _parse_file(os.path.join(directory, "schedule.txt"), read_schedule, horizon)
    witness = None
    if os.path.exists(os.path.join(directory, "witness.txt")):
        witness = _parse_file(os.path.join(directory, "witness.txt"), read_witness, horizon)
    return _bundle_from(net, schedule, trace, witness, cfg, horizon)


def _bundle_from(net, schedule, trace, witness, cfg, horizon) -> ScenarioBundle:
    items = list(cfg.items())
    try:
        policies = parse_assignments(items, net.num_nodes, "policy", PolicyKind, "FIFO")
        selectors = parse_assignments(items, net.num_nodes, "selector", SelectorKind,
                                      SelectorKind.OLDEST_HEAD_OF_LINE.value)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return ScenarioBundle(net, schedule, trace, witness, _budget(cfg), net.max_path_hops,
                          policies, selectors, _get(cfg, "seed", int, 0), horizon)


def save_bundle(bundle: ScenarioBundle, directory: str, cfg: dict[str, str]) -> None:
    os.makedirs(directory, exist_ok=True)
    cfg = dict(cfg)
    cfg.setdefault("seed", str(bundle.seed))
    cfg["b"] = str(bundle.budget.b)
    cfg["r"] = str(bundle.budget.r)
    cfg["d"] = str(bundle.d)
    cfg["horizon"] = str(bundle.horizon or bundle.trace.horizon)
    for i, p in enumerate(bundle.policies):
        cfg[f"policy.{i}"] = PolicyKind(p).value
    for i, s in enumerate(bundle.selectors):
        cfg[f"selector.{i}"] = SelectorKind(s).value
    texts = (write_network(bundle.network), write_schedule(bundle.schedule),
             write_trace(bundle.trace),
             write_witness(bundle.witness) if bundle.witness is not None else None,
             write_config(cfg))
    for name, text in zip(BUNDLE_FILES, texts):
        if text is not None:
            _write(os.path.join(directory, name), text)


def generated_bundle(cfg: dict[str, str]) -> ScenarioBundle:
    """Random scenario from generator settings (``n``, ``density`` ...)."""
    if "seed" not in cfg:
        raise InputError("a seed is required to generate a scenario")
    budget = _budget(cfg)
    horizon = _get(cfg, "horizon", int, 200)
    try:
        return random_scenario(
            _get(cfg, "n", int, 6), _get(cfg, "d", int, 3), _get(cfg, "density", float, 0.4),
            budget, _get(cfg, "seed", int), horizon,
            rate_mode=cfg.get("rate_mode", "constant-one"),
            max_degree=_get(cfg, "max_degree", int, 0) or None,
            num_paths=_get(cfg, "paths", int, 0) or None,
            intensity=_get(cfg, "intensity", float, 0.5),
            inject_until=_get(cfg, "inject_until", int) if "inject_until" in cfg else None,
            granularity=_get(cfg, "granularity", int, 8))
    except (ScenarioError, ValueError) as exc:
        raise InputError(str(exc)) from None


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _modes(cfg):
    mode = cfg.get("mode", WIRELESS)
    eligibility = cfg.get(ELIGIBILITY_KEY, SAME_SLOT)
    if mode not in (WIRELESS, WIRELINE):
        raise InputError(f"unknown mode {mode!r}")
    if eligibility not in (SAME_SLOT, NEXT_SLOT):
        raise InputError(f"unknown eligibility {eligibility!r}")
    return mode, eligibility


def simulate(bundle: ScenarioBundle, horizon: int, mode: str, eligibility: str):
    config = bundle.config(horizon, mode, eligibility)
    try:
        log, _ = run(config)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return log, stability_report(log, bundle.network, bundle.budget, bundle.d)


# ---------------------------------------------------------------- commands

def cmd_run(args) -> int:
    cfg = _load_config(args)
    bundle = load_bundle(args.bundle, cfg) if args.bundle else generated_bundle(cfg)
    horizon = _get(cfg, "horizon", int, bundle.horizon or bundle.trace.horizon)
    mode, eligibility = _modes(cfg)
    log, report = simulate(bundle, horizon, mode, eligibility)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    if not args.bundle:
        save_bundle(bundle, os.path.join(out, "scenario"), cfg)
    _write(os.path.join(out, "log.csv"), log.to_csv())
    _write(os.path.join(out, "delays.txt"), delay_stats(log).to_text())
    _write(os.path.join(out, "report.txt"), f"seed = {bundle.seed}\n" + report.to_text())
    _write(os.path.join(out, "report.csv"),
           BoundReport.CSV_HEADER + "\n" + report.to_csv_row() + "\n")
    sys.stdout.write(report.to_text())
    if args.assert_bounds and report.compliant is False:
        print("bound violated", file=sys.stderr)
        return EXIT_BOUND
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _load_config(args)
    src = args.bundle
    net_path = args.network or (src and os.path.join(src, "network.txt"))
    trace_path = args.trace or (src and os.path.join(src, "trace.txt"))
    sched_path = args.schedule or (src and os.path.join(src, "schedule.txt"))
    if not (net_path and trace_path and sched_path):
        raise InputError("need a network, a trace and a schedule (or --bundle)")
    net = _parse_file(net_path, read_network)
    trace = _parse_file(trace_path, read_trace)
    horizon = _get(cfg, "horizon", int, trace.horizon)
    if horizon < trace.horizon:
        raise InputError("horizon is shorter than the trace")
    trace = type(trace)(trace.events, horizon)
    schedule = _parse_file(sched_path, read_schedule, horizon)
    budget = _budget(cfg)
    try:
        trace.validate(net)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    witness_path = args.witness
    if witness_path is None and src and os.path.exists(os.path.join(src, "witness.txt")):
        witness_path = os.path.join(src, "witness.txt")
    if witness_path:
        witness = _parse_file(witness_path, read_witness, horizon)
        verdict = verify_witness(net, trace, schedule, budget, witness)
        if verdict:
            print("admissible: witness verified")
            return EXIT_OK
        print(f"inadmissible: {verdict.violation}")
        return EXIT_INADMISSIBLE
    witness = find_witness(net, trace, schedule, budget)
    if witness is None:
        # no certificate exists; show where the uniform split breaks
        verdict = verify_witness(net, trace, schedule, budget, uniform_witness(net, horizon))
        detail = f" (uniform fractions fail on {verdict.violation})" if verdict.violation else ""
        print("inadmissible: no fractions satisfy every window" + detail)
        return EXIT_INADMISSIBLE
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "witness.txt")
    _write(path, write_witness(witness))
    print(f"admissible: witness written to {path}")
    return EXIT_OK


def _flag_regions(r: Fraction, d: int) -> tuple[bool, bool]:
    return r * d < 1, r * (d - 1) <= 1


def _sweep_trial(job) -> str:
    cfg, r, index, trial, seed, out = job
    cfg = dict(cfg, r=str(r), seed=str(seed))
    d = _get(cfg, "d", int, 3)
    theorem, optimistic = _flag_regions(r, d)
    prefix = f"{r.numerator}/{r.denominator},{trial},{seed},{str(theorem).lower()}," \
             f"{str(optimistic).lower()}"
    try:
        bundle = generated_bundle(cfg)
        mode, eligibility = _modes(cfg)
        log, report = simulate(bundle, bundle.horizon, mode, eligibility)
    except InputError as exc:
        return prefix + ",error," + ",".join(["na"] * 10) + f"  # {exc}"
    trial_dir = os.path.join(out, f"r{index}_t{trial}")
    os.makedirs(trial_dir, exist_ok=True)
    _write(os.path.join(trial_dir, "report.txt"), f"seed = {seed}\n" + report.to_text())
    return prefix + ",ok," + report.to_csv_row()


SWEEP_HEADER = "rate,trial,seed,theorem_region,optimistic_region,status," + BoundReport.CSV_HEADER


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    cfg.pop("r", None)
    try:
        rs = [Fraction(v) for v in args.rates.split(",")]
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad r list {args.rates!r}") from None
    if any(b <= a for a, b in zip(rs, rs[1:])):
        raise InputError("r values must be strictly increasing")
    base_seed = _get(cfg, "seed", int, 0)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    jobs = [(cfg, r, k, m, base_seed + k * args.trials + m, out)
            for k, r in enumerate(rs) for m in range(args.trials)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_sweep_trial, jobs))
    else:
        rows = [_sweep_trial(j) for j in jobs]
    _write(os.path.join(out, "sweep.csv"), SWEEP_HEADER + "\n" + "\n".join(rows) + "\n")
    bad = [row for row in rows if row.split(",")[3] == "true" and ",false," in row]
    print(f"{len(rows)} trials, {len(bad)} bound violations in the r < 1/d region")
    if args.assert_bounds and bad:
        return EXIT_BOUND
    return EXIT_OK


def cmd_gadget(args) -> int:
    cfg = _load_config(args)
    try:
        params = GadgetParams(args.h, args.k, args.J)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    gadget = build_gadget(params)
    if not fact1_check(gadget.network):
        raise InputError("gadget violates the single-successor property")
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    _write(os.path.join(out, "network.txt"), write_network(gadget.network))
    _write(os.path.join(out, "blocks.txt"), gadget.manifest())
    seed = _get(cfg, "seed", int, 0)
    horizon = _get(cfg, "horizon", int, 100)
    cfg.setdefault("b", "1")
    cfg.setdefault("r", str(Fraction(1, 2 * params.h)))
    budget = _budget(cfg)
    trace, witness = gadget_trace(gadget, budget, seed, horizon, paths=args.paths)
    bundle = wireless_simulation_bundle(gadget, budget, trace, witness)
    bundle.seed, bundle.horizon = seed, horizon
    save_bundle(bundle, os.path.join(out, "bundle"), {"seed": str(seed)})
    print(f"{len(gadget.blocks)} blocks, {gadget.network.num_nodes} nodes")
    if args.equivalence:
        verdict = equivalence_check(bundle, horizon)
        if not verdict:
            print(f"wireless and wireline runs differ: {verdict.diff}")
            return EXIT_BOUND
        print(f"wireless and wireline logs identical over {horizon} slots")
    return EXIT_OK


def cmd_search(args) -> int:
    cfg = _load_config(args)
    if args.bundle:
        net = _parse_file(os.path.join(args.bundle, "network.txt"), read_network)
    elif args.network:
        net = _parse_file(args.network, read_network)
    else:
        raise InputError("need --network or --bundle")
    budget = _budget(cfg)
    d = _get(cfg, "d", int, net.max_path_hops)
    horizon = _get(cfg, "horizon", int, 100)
    seed = _get(cfg, "seed", int, 0)
    trace, q = search_adversary(net, budget, d, horizon, args.budget, seed)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    _write(os.path.join(out, "trace.txt"), write_trace(trace))
    _write(os.path.join(out, "search.txt"), f"seed = {seed}\nQ = {q}\n")
    print(f"Q = {q}")
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file")
    common.add_argument("--seed", type=int)
    common.add_argument("--horizon", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--assert-bounds", action="store_true")
    common.add_argument("--eligibility", choices=[SAME_SLOT, NEXT_SLOT])
    common.add_argument("--mode", choices=[WIRELESS, WIRELINE])
    common.add_argument("--b", type=int, help="burstiness")
    common.add_argument("--r", dest="r", help="injection rate, e.g. 1/5")
    common.add_argument("--d", type=int, help="maximum path length")

    parser = argparse.ArgumentParser(prog="aqtwireless")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="simulate one scenario")
    p.add_argument("bundle", nargs="?", help="scenario bundle directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", parents=[common], help="admissibility of a trace")
    p.add_argument("--bundle")
    p.add_argument("--network")
    p.add_argument("--trace")
    p.add_argument("--schedule")
    p.add_argument("--witness")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", parents=[common], help="bound compliance over a list of rates")
    p.add_argument("--rates", required=True, help="comma-separated rates, increasing")
    p.add_argument("--trials", type=int, default=5)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gadget", parents=[common], help="emit a building-block network")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--paths", type=int, default=12, help="traffic templates used by the trace")
    p.add_argument("--equivalence", action="store_true")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("search", parents=[common], help="hill-climb for a bad admissible trace")
    p.add_argument("--bundle")
    p.add_argument("--network")
    p.add_argument("--budget", type=int, default=50, help="number of mutation steps")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
