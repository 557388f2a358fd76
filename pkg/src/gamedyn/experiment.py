"""Monte Carlo sweeps over correlation grids, with deterministic CSV output.

One fresh game per (grid point, sample); every selected algorithm runs on
that same game from the same start, which is what makes paired comparisons
meaningful.  Each sample's seed is derived independently from
(master_seed, grid_index, sample_index), so results never depend on how
work is scheduled across workers, and the writer sorts records into
(grid_index, sample_index, algorithm) order before touching the disk.
"""

from __future__ import annotations

import multiprocessing
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from . import __version__
from .dynamics import (CYCLE, FIXED_POINT, cross_profiles_are_nash,
                       default_max_steps, run_indd, run_sbrd)
from .errors import ConfigError
from .game_model import Game, GameSpec, payoff, sample_game
from .rng import MIX_C1, MIX_C2, mix64, uniforms_block
from .spgd import SpgdConfig, run_spgd
from .stats import IntervalEstimate, SummaryStat, clopper_pearson, mean_and_se

SBRD = "SBRD"
INDD = "INDD"
SPGD = "SPGD"
ALGORITHMS = (SBRD, INDD, SPGD)

COARSE21 = tuple(0.05 * i for i in range(21))
FINE7 = tuple(0.85 + 0.025 * i for i in range(7))

CSV_HEADER = ("grid_index,lambda,n,m,sample_index,seed,algorithm,"
              "terminal_kind,cycle_length,steps_or_iters,wall_ns,"
              "total_wall_ns,cross_nash,terminal_mean_payoff,"
              "trajectory_mean_payoff,rounded_is_nash")

_MASK = (1 << 64) - 1


def derive_seed(master: int, grid_index: int, sample_index: int) -> int:
    """Per-sample seed: finalizer over master xor index-scaled constants.

    Pure and collision-free across the sweep ranges used here, so samples
    can run in any order on any number of workers.
    """
    z = master ^ ((grid_index * MIX_C1) & _MASK) ^ ((sample_index * MIX_C2)
                                                    & _MASK)
    return mix64(z)


@dataclass(frozen=True)
class SweepConfig:
    """Full description of a sweep; every run is a pure function of this."""

    n: int
    m: int
    lambda_grid: tuple[float, ...]
    samples_per_point: int
    algorithms: tuple[str, ...] = (SBRD,)
    master_seed: int = 0
    sbrd_max_steps: Optional[int] = None
    spgd_cfg: SpgdConfig = field(default_factory=SpgdConfig)
    start_mode: str = "fixed_zero"
    threads: Union[int, str] = 1

    def __post_init__(self):
        if self.n < 2 or self.m < 2:
            raise ConfigError("need n >= 2 and m >= 2")
        grid = tuple(float(v) for v in self.lambda_grid)
        if not grid:
            raise ConfigError("lambda grid is empty")
        if any(not 0.0 <= v <= 1.0 for v in grid):
            raise ConfigError("lambda grid values must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("lambda grid must be strictly increasing")
        object.__setattr__(self, "lambda_grid", grid)
        if self.samples_per_point < 1:
            raise ConfigError("samples_per_point must be at least 1")
        algos = tuple(a.upper() for a in self.algorithms)
        if not algos or any(a not in ALGORITHMS for a in algos):
            raise ConfigError(f"algorithms must be a nonempty subset of "
                              f"{ALGORITHMS}")
        if len(set(algos)) != len(algos):
            raise ConfigError("duplicate algorithm")
        object.__setattr__(self, "algorithms", algos)
        if INDD in algos and self.n != 2:
            raise ConfigError("INDD requires exactly two players")
        if INDD in algos and self.m < 3:
            raise ConfigError("INDD requires at least 3 actions")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError("master_seed must fit in 64 bits")
        if self.sbrd_max_steps is not None and self.sbrd_max_steps < 1:
            raise ConfigError("sbrd_max_steps must be at least 1")
        if self.start_mode not in ("fixed_zero", "random"):
            raise ConfigError("start_mode must be fixed_zero or random")
        if self.threads != "auto":
            if not isinstance(self.threads, int) or self.threads < 1:
                raise ConfigError("threads must be a positive integer or "
                                  "'auto'")

    def resolved_threads(self) -> int:
        if self.threads == "auto":
            return os.cpu_count() or 1
        return self.threads


# terminal_kind values in the CSV
KIND_NE = "NE"
KIND_CYCLE = "CYCLE"
KIND_TRUNCATED = "TRUNCATED"
KIND_SPGD_CONVERGED = "SPGD_CONVERGED"
KIND_SPGD_MAXITER = "SPGD_MAXITER"


@dataclass(frozen=True)
class SampleRecord:
    """One CSV row: one algorithm's run on one sampled game."""

    grid_index: int
    lam: float
    n: int
    m: int
    sample_index: int
    seed: int
    algorithm: str
    terminal_kind: str
    cycle_length: int
    steps_or_iters: int
    wall_ns: int
    total_wall_ns: int
    cross_nash: Optional[bool]
    terminal_mean_payoff: Optional[float]
    trajectory_mean_payoff: Optional[float]
    rounded_is_nash: Optional[bool]


def _fmt_real(v: Optional[float]) -> str:
    return "NA" if v is None else format(v, ".17g")


def _fmt_flag(v: Optional[bool]) -> str:
    return "NA" if v is None else str(int(v))


def record_to_row(rec: SampleRecord, no_timing: bool = False) -> str:
    wall = 0 if no_timing else rec.wall_ns
    total = 0 if no_timing else rec.total_wall_ns
    return ",".join((
        str(rec.grid_index), _fmt_real(rec.lam), str(rec.n), str(rec.m),
        str(rec.sample_index), str(rec.seed), rec.algorithm,
        rec.terminal_kind, str(rec.cycle_length), str(rec.steps_or_iters),
        str(wall), str(total), _fmt_flag(rec.cross_nash),
        _fmt_real(rec.terminal_mean_payoff),
        _fmt_real(rec.trajectory_mean_payoff),
        _fmt_flag(rec.rounded_is_nash)))


def _parse_opt_real(s: str) -> Optional[float]:
    return None if s == "NA" else float(s)


def _parse_opt_flag(s: str) -> Optional[bool]:
    return None if s == "NA" else bool(int(s))


def row_to_record(row: str) -> SampleRecord:
    p = row.split(",")
    if len(p) != 16:
        raise ValueError(f"malformed record row: {row!r}")
    return SampleRecord(
        grid_index=int(p[0]), lam=float(p[1]), n=int(p[2]), m=int(p[3]),
        sample_index=int(p[4]), seed=int(p[5]), algorithm=p[6],
        terminal_kind=p[7], cycle_length=int(p[8]), steps_or_iters=int(p[9]),
        wall_ns=int(p[10]), total_wall_ns=int(p[11]),
        cross_nash=_parse_opt_flag(p[12]),
        terminal_mean_payoff=_parse_opt_real(p[13]),
        trajectory_mean_payoff=_parse_opt_real(p[14]),
        rounded_is_nash=_parse_opt_flag(p[15]))


def read_records(path) -> list[SampleRecord]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: not a sweep CSV (bad or missing header)")
    return [row_to_record(line) for line in lines[1:] if line]


def _random_start(seed: int, n: int, m: int) -> tuple[int, ...]:
    # start-profile draws live just past the payoff blocks of the stream
    offset = (n + 1) * m ** n
    u = uniforms_block(seed, offset, n)
    return tuple(min(int(v * m), m - 1) for v in u)


def _mean_profile_payoff(game: Game, profile) -> float:
    vals = [payoff(game, i, profile) for i in range(game.num_players)]
    return sum(vals) / len(vals)


def run_sample(cfg: SweepConfig, grid_index: int,
               sample_index: int) -> list[SampleRecord]:
    """All selected algorithms on one freshly sampled game."""
    lam = cfg.lambda_grid[grid_index]
    seed = derive_seed(cfg.master_seed, grid_index, sample_index)
    t0 = time.perf_counter_ns()
    game = sample_game(GameSpec(cfg.n, cfg.m, lam, seed))
    gen_ns = time.perf_counter_ns() - t0
    if cfg.start_mode == "random":
        start = _random_start(seed, cfg.n, cfg.m)
    else:
        start = (0,) * cfg.n
    max_steps = cfg.sbrd_max_steps or default_max_steps(game)
    common = dict(grid_index=grid_index, lam=lam, n=cfg.n, m=cfg.m,
                  sample_index=sample_index, seed=seed)
    records = []
    for algo in cfg.algorithms:
        t1 = time.perf_counter_ns()
        if algo == SPGD:
            out = run_spgd(game, cfg=cfg.spgd_cfg)
            wall = time.perf_counter_ns() - t1
            records.append(SampleRecord(
                algorithm=SPGD,
                terminal_kind=KIND_SPGD_CONVERGED if out.converged
                else KIND_SPGD_MAXITER,
                cycle_length=0, steps_or_iters=out.iters, wall_ns=wall,
                total_wall_ns=gen_ns + wall, cross_nash=None,
                terminal_mean_payoff=float(
                    out.terminal_expected_payoffs.mean()),
                trajectory_mean_payoff=out.trajectory_mean_payoff,
                rounded_is_nash=out.rounded_is_nash, **common))
            continue
        runner = run_sbrd if algo == SBRD else run_indd
        out = runner(game, start, max_steps)
        wall = time.perf_counter_ns() - t1
        if out.kind == FIXED_POINT:
            kind = KIND_NE
            terminal = _mean_profile_payoff(game, out.terminal_profile)
        elif out.kind == CYCLE:
            kind = KIND_CYCLE
            terminal = None
        else:
            kind = KIND_TRUNCATED
            terminal = None
        cross = None
        if cfg.n == 2 and out.cycle_length == 2:
            cross = cross_profiles_are_nash(game, out)
        records.append(SampleRecord(
            algorithm=algo, terminal_kind=kind,
            cycle_length=out.cycle_length,
            steps_or_iters=out.steps_to_terminal, wall_ns=wall,
            total_wall_ns=gen_ns + wall, cross_nash=cross,
            terminal_mean_payoff=terminal, trajectory_mean_payoff=None,
            rounded_is_nash=None, **common))
    return records


@dataclass(frozen=True)
class AggregateRow:
    """Per-(grid point, algorithm) summary used by plots and reports.

    p_ne counts NE terminals (gap-converged runs for the gradient
    dynamic); p_two_cycle counts cycles of length exactly 2.  Payoff
    summaries are None when no record in the group carries that metric.
    """

    grid_index: int
    lam: float
    algorithm: str
    count: int
    p_ne: IntervalEstimate
    p_two_cycle: IntervalEstimate
    mean_steps: SummaryStat
    mean_wall: SummaryStat
    mean_terminal_payoff: Optional[SummaryStat]
    mean_traj_payoff: Optional[SummaryStat]


def aggregate(records: Iterable[SampleRecord],
              confidence: float = 0.995) -> list[AggregateRow]:
    """Group records by (grid point, algorithm) and summarize each group."""
    groups: dict[tuple[int, str], list[SampleRecord]] = {}
    for rec in records:
        groups.setdefault((rec.grid_index, rec.algorithm), []).append(rec)
    if not groups:
        raise ValueError("no records to aggregate")
    rows = []
    for (gi, algo) in sorted(groups):
        recs = groups[(gi, algo)]
        count = len(recs)
        ne = sum(r.terminal_kind in (KIND_NE, KIND_SPGD_CONVERGED)
                 for r in recs)
        two = sum(r.terminal_kind == KIND_CYCLE and r.cycle_length == 2
                  for r in recs)
        term = [r.terminal_mean_payoff for r in recs
                if r.terminal_mean_payoff is not None]
        traj = [r.trajectory_mean_payoff for r in recs
                if r.trajectory_mean_payoff is not None]
        rows.append(AggregateRow(
            grid_index=gi, lam=recs[0].lam, algorithm=algo, count=count,
            p_ne=clopper_pearson(ne, count, confidence),
            p_two_cycle=clopper_pearson(two, count, confidence),
            mean_steps=mean_and_se([r.steps_or_iters for r in recs]),
            mean_wall=mean_and_se([r.wall_ns for r in recs]),
            mean_terminal_payoff=mean_and_se(term) if term else None,
            mean_traj_payoff=mean_and_se(traj) if traj else None))
    return rows


# sweep config for pool workers, set once per worker by the initializer so
# task payloads stay small
_worker_cfg: Optional[SweepConfig] = None


def _init_worker(cfg: SweepConfig):
    global _worker_cfg
    _worker_cfg = cfg


def _run_pair(args) -> list[SampleRecord]:
    gi, si = args
    return run_sample(_worker_cfg, gi, si)


def _meta_lines(cfg: SweepConfig, no_timing: bool,
                preset: Optional[str]) -> list[str]:
    lines = [
        f"version={__version__}",
        f"preset={preset or ''}",
        f"n={cfg.n}",
        f"m={cfg.m}",
        f"lambda_grid={','.join(format(v, '.17g') for v in cfg.lambda_grid)}",
        f"samples_per_point={cfg.samples_per_point}",
        f"algorithms={','.join(cfg.algorithms)}",
        f"master_seed={cfg.master_seed}",
        f"sbrd_max_steps={cfg.sbrd_max_steps if cfg.sbrd_max_steps else ''}",
        f"start_mode={cfg.start_mode}",
        f"threads={cfg.threads}",
        f"spgd_learning_rate={format(cfg.spgd_cfg.learning_rate, '.17g')}",
        f"spgd_max_iters={cfg.spgd_cfg.max_iters}",
        f"spgd_gap_tol={format(cfg.spgd_cfg.gap_tol, '.17g')}",
        f"spgd_record_every={cfg.spgd_cfg.record_every}",
        f"no_timing={int(no_timing)}",
    ]
    return lines


def run_sweep(cfg: SweepConfig, out_path, no_timing: bool = False,
              preset: Optional[str] = None) -> list[AggregateRow]:
    """Execute the sweep, write CSV + .meta sidecar, return the aggregates.

    The CSV body is byte-deterministic for a fixed cfg regardless of the
    worker count; with no_timing the timing columns are written as 0 so
    whole files compare equal.  Output is written atomically and removed
    on failure.
    """
    tasks = [(gi, si)
             for gi in range(len(cfg.lambda_grid))
             for si in range(cfg.samples_per_point)]
    workers = cfg.resolved_threads()
    records: list[SampleRecord] = []
    if workers <= 1:
        for gi, si in tasks:
            records.extend(run_sample(cfg, gi, si))
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        with multiprocessing.Pool(workers, initializer=_init_worker,
                                  initargs=(cfg,)) as pool:
            for recs in pool.imap_unordered(_run_pair, tasks, chunk):
                records.extend(recs)
    records.sort(key=lambda r: (r.grid_index, r.sample_index, r.algorithm))

    out_path = Path(out_path)
    tmp = out_path.with_name(out_path.name + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            for rec in records:
                fh.write(record_to_row(rec, no_timing) + "\n")
        os.replace(tmp, out_path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    meta_path = out_path.with_suffix(".meta")
    meta_path.write_text("\n".join(_meta_lines(cfg, no_timing, preset))
                         + "\n", encoding="utf-8")
    return aggregate(records)
