"""Command-line front end: sweeps, single runs, paired comparisons,
SVG plots, and theory-check suites.

Exit codes: 0 success, 1 usage error, 2 runtime error, 3 a validation
suite ran and failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .dynamics import (CYCLE, FIXED_POINT, compare_sbrd_indd, run_indd,
                       run_sbrd)
from .errors import ArityError, CapacityError, ConfigError, GamedynError
from .experiment import (ALGORITHMS, SBRD, SPGD, SweepConfig, _random_start,
                         aggregate, derive_seed, read_records, run_sweep)
from .game_model import GameSpec, profile_to_index, sample_game
from .presets import PRESETS, grid_by_name, preset_config
from .spgd import SpgdConfig, run_spgd
from .svgplot import METRICS, PlotSpec, render_line_plot
from .validation import SUITES


class UsageError(Exception):
    pass


def _parse_seed(text: str) -> int:
    try:
        value = int(text, 16) if text.lower().startswith("0x") else int(text)
    except ValueError:
        raise UsageError(f"seed {text!r} is not a decimal or 0x-hex integer")
    if not 0 <= value < 2 ** 64:
        raise UsageError("seed must fit in an unsigned 64-bit integer")
    return value


def _parse_grid(text: str) -> tuple[float, ...]:
    if text in ("coarse21", "fine7"):
        return grid_by_name(text)
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"grid {text!r} is neither a named grid nor a "
                         f"comma list of reals")


def _parse_algos(text: str) -> tuple[str, ...]:
    tokens = [a.strip() for a in text.split(",") if a.strip()]
    bad = [a for a in tokens if a.upper() not in ALGORITHMS]
    if bad:
        raise UsageError(f"unknown algorithm(s) {', '.join(bad)}; choose "
                         f"from {','.join(a.lower() for a in ALGORITHMS)}")
    return tuple(a.upper() for a in tokens)


def _default_threads() -> str:
    return os.environ.get("GAMEDYN_THREADS", "1")


def _parse_threads(text: str):
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"threads must be an integer or 'auto', got "
                         f"{text!r}")


def _spgd_cfg(args) -> SpgdConfig:
    return SpgdConfig(learning_rate=args.eta, max_iters=args.max_iters,
                      gap_tol=args.gap_tol, record_every=args.record_every)


def _add_spgd_flags(p: argparse.ArgumentParser):
    p.add_argument("--eta", type=float, default=0.5,
                   help="gradient ascent learning rate")
    p.add_argument("--max-iters", type=int, default=10 ** 5)
    p.add_argument("--gap-tol", type=float, default=1e-3,
                   help="deviation-gap convergence threshold")
    p.add_argument("--record-every", type=int, default=1,
                   help="trajectory payoff sampling stride")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamedyn",
        description="Dynamics on random games with correlated payoffs")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over a "
                                     "correlation grid, writes CSV")
    p.add_argument("--preset", choices=sorted(PRESETS),
                   help="named experiment; other flags override its fields")
    p.add_argument("--players", type=int)
    p.add_argument("--actions", type=int)
    p.add_argument("--grid", help="coarse21, fine7, or comma list")
    p.add_argument("--samples", type=int)
    p.add_argument("--algo", help="comma list from sbrd,indd,spgd")
    p.add_argument("--seed", default="0")
    p.add_argument("--start", choices=("fixed", "random"), default="fixed")
    p.add_argument("--threads", default=None)
    p.add_argument("--max-steps", type=int, default=None,
                   help="best-response step cap (default: profiles + 1)")
    p.add_argument("--out", required=True)
    p.add_argument("--no-timing", action="store_true",
                   help="write timing columns as 0 for byte-stable output")
    _add_spgd_flags(p)

    p = sub.add_parser("run", help="one game, one algorithm")
    p.add_argument("--players", type=int, default=2)
    p.add_argument("--actions", type=int, default=50)
    p.add_argument("--correlation", type=float, default=1.0)
    p.add_argument("--seed", default="0")
    p.add_argument("--algo", default="sbrd")
    p.add_argument("--start", choices=("fixed", "random"), default="fixed")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--trace", action="store_true",
                   help="print the visited profiles")
    _add_spgd_flags(p)

    p = sub.add_parser("compare", help="paired runs on shared games")
    p.add_argument("--with", dest="against", choices=("indd", "spgd"),
                   required=True)
    p.add_argument("--players", type=int, default=2)
    p.add_argument("--actions", type=int, default=50)
    p.add_argument("--correlation", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", default="0")
    p.add_argument("--start", choices=("fixed", "random"), default="fixed")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--out", help="optional per-sample CSV")
    _add_spgd_flags(p)

    p = sub.add_parser("plot", help="render an SVG from a sweep CSV")
    p.add_argument("--in", dest="csv_in", required=True)
    p.add_argument("--metric", required=True, choices=METRICS)
    p.add_argument("--out", required=True)
    p.add_argument("--series", help="comma list of algorithms")
    p.add_argument("--x-label", default="correlation")
    p.add_argument("--y-label", default=None)
    p.add_argument("--title", default=None)

    p = sub.add_parser("validate", help="run a theory-check suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--seed", default="0")
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--actions", type=int, default=None)

    sub.add_parser("presets", help="list named experiments")
    return parser


def _cmd_sweep(args) -> int:
    seed = _parse_seed(args.seed)
    threads = _parse_threads(args.threads if args.threads is not None
                             else _default_threads())
    try:
        if args.preset:
            overrides = {}
            if args.players:
                overrides["n"] = args.players
            if args.actions:
                overrides["m"] = args.actions
            if args.grid:
                overrides["lambda_grid"] = _parse_grid(args.grid)
            if args.algo:
                overrides["algorithms"] = _parse_algos(args.algo)
            if args.max_steps:
                overrides["sbrd_max_steps"] = args.max_steps
            if args.start == "random":
                overrides["start_mode"] = "random"
            cfg = preset_config(args.preset, master_seed=seed,
                                samples=args.samples, threads=threads,
                                spgd_cfg=_spgd_cfg(args), **overrides)
        else:
            missing = [f for f, v in (("--players", args.players),
                                      ("--actions", args.actions),
                                      ("--grid", args.grid),
                                      ("--samples", args.samples)) if not v]
            if missing:
                raise UsageError("without --preset, required: "
                                 + " ".join(missing))
            cfg = SweepConfig(
                n=args.players, m=args.actions,
                lambda_grid=_parse_grid(args.grid),
                samples_per_point=args.samples,
                algorithms=_parse_algos(args.algo) if args.algo else (SBRD,),
                master_seed=seed, sbrd_max_steps=args.max_steps,
                spgd_cfg=_spgd_cfg(args),
                start_mode="random" if args.start == "random" else
                "fixed_zero", threads=threads)
    except (ConfigError, ValueError) as exc:
        raise UsageError(str(exc))
    rows = run_sweep(cfg, args.out, no_timing=args.no_timing,
                     preset=args.preset)
    print(f"wrote {args.out} "
          f"({len(cfg.lambda_grid) * cfg.samples_per_point} games x "
          f"{len(cfg.algorithms)} algorithms)")
    print("grid_index lambda    algo  count  p_ne   p_2cycle  mean_steps")
    for r in rows:
        print(f"{r.grid_index:10d} {r.lam:<9.4g} {r.algorithm:<5s} "
              f"{r.count:6d} {r.p_ne.point:6.3f} {r.p_two_cycle.point:9.3f} "
              f"{r.mean_steps.mean:10.2f}")
    return 0


def _run_one_game(args):
    seed = _parse_seed(args.seed)
    spec = GameSpec(args.players, args.actions, args.correlation, seed)
    game = sample_game(spec)
    if args.start == "random":
        start = _random_start(seed, args.players, args.actions)
    else:
        start = (0,) * args.players
    return game, start


def _cmd_run(args) -> int:
    algo = args.algo.upper()
    if algo not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {args.algo!r}")
    game, start = _run_one_game(args)
    if algo == SPGD:
        if args.trace:
            raise UsageError("--trace applies to sbrd/indd trajectories")
        out = run_spgd(game, cfg=_spgd_cfg(args))
        print(f"spgd: converged={out.converged} iters={out.iters} "
              f"gap={out.ne_gap:.3g}")
        print(f"rounded profile: {out.rounded_profile} "
              f"(pure nash: {out.rounded_is_nash})")
        payoffs = ", ".join(format(v, ".6g")
                            for v in out.terminal_expected_payoffs)
        print(f"terminal expected payoffs: {payoffs}")
        print(f"trajectory mean payoff: {out.trajectory_mean_payoff:.6g}")
        return 0
    runner = run_sbrd if algo == SBRD else run_indd
    out = runner(game, start, args.max_steps, keep_trajectory=args.trace)
    print(f"{algo.lower()}: {out.kind} after {out.steps_to_terminal} steps "
          f"from {start}")
    if out.kind == FIXED_POINT:
        print(f"fixed point: {out.terminal_profile}")
    elif out.kind == CYCLE:
        print(f"cycle length {out.cycle_length}: "
              f"{' -> '.join(map(str, out.cycle_members))}")
    if args.trace:
        for t, prof in enumerate(out.trajectory):
            print(f"  t={t}: {prof}")
    return 0


def _cmd_compare(args) -> int:
    seed = _parse_seed(args.seed)
    against = args.against
    if against == "indd" and args.players != 2:
        raise UsageError("indd comparison needs --players 2")
    lines = []
    coincide = 0
    sbrd_steps, other_steps = [], []
    for i in range(args.samples):
        s = derive_seed(seed, 0, i)
        game = sample_game(GameSpec(args.players, args.actions,
                                    args.correlation, s))
        if args.start == "random":
            start = _random_start(s, args.players, args.actions)
        else:
            start = (0,) * args.players
        if against == "indd":
            rep = compare_sbrd_indd(game, start, args.max_steps)
            coincide += rep.coincide
            sbrd_steps.append(rep.sbrd_outcome.steps_to_terminal)
            other_steps.append(rep.indd_termination_time)
            lines.append(",".join(map(str, (
                i, s, int(rep.coincide),
                "NA" if rep.divergence_time is None else rep.divergence_time,
                rep.indd_termination_time,
                rep.sbrd_outcome.kind, rep.sbrd_outcome.steps_to_terminal,
                rep.indd_outcome.kind,
                rep.indd_outcome.steps_to_terminal))))
        else:
            sb = run_sbrd(game, start, args.max_steps)
            sp = run_spgd(game, cfg=_spgd_cfg(args))
            sbrd_steps.append(sb.steps_to_terminal)
            other_steps.append(sp.iters)
            term = "NA"
            if sb.kind == FIXED_POINT:
                idx = profile_to_index(sb.terminal_profile, game.num_actions)
                term = format(sum(t[idx] for t in game.tables)
                              / game.num_players, ".17g")
            lines.append(",".join(map(str, (
                i, s, sb.kind, sb.steps_to_terminal, term,
                int(sp.converged), sp.iters,
                format(float(sp.terminal_expected_payoffs.mean()), ".17g"),
                format(sp.trajectory_mean_payoff, ".17g")))))
    if against == "indd":
        header = ("sample_index,seed,coincide,divergence_time,"
                  "indd_termination_time,sbrd_kind,sbrd_steps,indd_kind,"
                  "indd_steps")
        print(f"coincide: {coincide}/{args.samples} "
              f"({coincide / args.samples:.3f})")
    else:
        header = ("sample_index,seed,sbrd_kind,sbrd_steps,"
                  "sbrd_terminal_payoff,spgd_converged,spgd_iters,"
                  "spgd_terminal_payoff,spgd_traj_payoff")
    med = sorted(sbrd_steps)[len(sbrd_steps) // 2]
    med_o = sorted(other_steps)[len(other_steps) // 2]
    print(f"median sbrd steps: {med}; median "
          f"{'indd steps' if against == 'indd' else 'spgd iters'}: {med_o}")
    if args.out:
        Path(args.out).write_text(header + "\n" + "\n".join(lines) + "\n",
                                  encoding="utf-8")
        print(f"wrote {args.out}")
    return 0


def _cmd_plot(args) -> int:
    try:
        records = read_records(args.csv_in)
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv_in}: {exc}")
    except ValueError as exc:
        raise UsageError(str(exc))
    if not records:
        raise UsageError(f"{args.csv_in}: no records to plot")
    series = None
    if args.series:
        series = _parse_algos(args.series)
    spec = PlotSpec(csv_path=args.csv_in, metric=args.metric,
                    out_path=args.out, series=series, x_label=args.x_label,
                    y_label=args.y_label, title=args.title)
    try:
        svg = render_line_plot(spec, aggregate(records))
    except ValueError as exc:
        raise UsageError(str(exc))
    Path(args.out).write_text(svg, encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


def _cmd_validate(args) -> int:
    suite = SUITES[args.suite]
    kwargs = {"seed": _parse_seed(args.seed)}
    if args.runs is not None:
        kwargs["runs"] = args.runs
    if args.actions is not None:
        if args.suite == "gradcheck":
            raise UsageError("gradcheck chooses its own game sizes")
        kwargs["m"] = args.actions
    ok, details = suite(**kwargs)
    print(f"suite {args.suite}: {'PASS' if ok else 'FAIL'}")
    for k, v in details.items():
        print(f"  {k} = {v}")
    if not ok:
        json.dump({"suite": args.suite, "ok": False, "details": details},
                  sys.stderr)
        sys.stderr.write("\n")
        return 3
    return 0


def _cmd_presets(args) -> int:
    for name in sorted(PRESETS):
        p = PRESETS[name]
        algos = ",".join(p["algorithms"])
        print(f"{name}  n={p['n']} m={p['m']} grid={p['grid']} "
              f"samples={p['samples']} algos={algos}  # {p['note']}")
    return 0


_COMMANDS = {
    "sweep": _cmd_sweep,
    "run": _cmd_run,
    "compare": _cmd_compare,
    "plot": _cmd_plot,
    "validate": _cmd_validate,
    "presets": _cmd_presets,
}


def cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ArityError, ConfigError, CapacityError, ValueError) as exc:
        # parameters the library refuses are misuse, not crashes
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GamedynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli())


if __name__ == "__main__":
    main()
