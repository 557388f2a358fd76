"""Pure-strategy dynamics: synchronous best response and the two-player
independent dynamic, with exact cycle detection.

Both dynamics walk profile indices on the flat tables and detect
termination with a first-visit map: the first time T a previously seen
profile recurs, the run ends; with s its first visit, T - s = 1 means a
fixed point, anything longer is a cycle of length T - s.  Trajectories
include the revisit, so `trajectory[s:T]` are exactly the cycle members.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ._kernels import get_backend
from .errors import ArityError, EligibleSetEmptyError
from .game_model import (ActionProfile, Game, _check_profile,
                         index_to_profile, is_pure_nash, profile_to_index)

FIXED_POINT = "fixed_point"
CYCLE = "cycle"
TRUNCATED = "truncated"

MAX_STEPS_CAP = 10 ** 5


@dataclass(frozen=True)
class InddHistory:
    """Per-player action sequences of an independent-dynamic run.

    On a shared-table (potential) game each list holds distinct actions
    except that its final entry may repeat the entry two periods earlier,
    which is the move that closes the terminal two-cycle.
    """

    actions_played: tuple[tuple[int, ...], ...]
    time: int


@dataclass(frozen=True)
class DynOutcome:
    """Result of a dynamics run.

    kind is one of `FIXED_POINT`, `CYCLE`, `TRUNCATED`.  steps_to_terminal
    is the revisit time T (for truncated runs, the number of executed
    steps).  first_visit_time is the revisit target s, so the cycle length
    is T - s.  trajectory is x^0..x^T including the revisit and is retained
    only on request; cycle_members are always retained for cycles.
    """

    kind: str
    steps_to_terminal: int
    terminal_profile: Optional[ActionProfile] = None
    cycle_members: Optional[tuple[ActionProfile, ...]] = None
    first_visit_time: Optional[int] = None
    trajectory: Optional[tuple[ActionProfile, ...]] = None
    indd_history: Optional[InddHistory] = None

    @property
    def cycle_length(self) -> int:
        return len(self.cycle_members) if self.cycle_members else 0


@dataclass(frozen=True)
class AgreementReport:
    """Period-by-period comparison of SBRD against INDD on one game."""

    coincide: bool
    divergence_time: Optional[int]
    indd_termination_time: int
    sbrd_outcome: DynOutcome
    indd_outcome: DynOutcome


def default_max_steps(game: Game) -> int:
    # a revisit is guaranteed within num_profiles + 1 synchronous steps;
    # the cap bounds trajectory memory for big games
    return min(game.num_profiles + 1, MAX_STEPS_CAP)


def _resolve_start(game: Game, start) -> ActionProfile:
    if start is None:
        return (0,) * game.num_players
    return _check_profile(game, start)


def _wrap_outcome(game: Game, status, first_visit, traj_idx,
                  keep_trajectory: bool,
                  history: Optional[InddHistory] = None) -> DynOutcome:
    kern = get_backend()
    n, m = game.num_players, game.num_actions
    steps = len(traj_idx) - 1
    trajectory = None
    if keep_trajectory:
        trajectory = tuple(index_to_profile(int(i), n, m) for i in traj_idx)
    if status == kern.STATUS_FIXED_POINT:
        return DynOutcome(FIXED_POINT, steps,
                          terminal_profile=index_to_profile(
                              int(traj_idx[-1]), n, m),
                          first_visit_time=int(first_visit),
                          trajectory=trajectory, indd_history=history)
    if status == kern.STATUS_CYCLE:
        s = int(first_visit)
        members = tuple(index_to_profile(int(i), n, m)
                        for i in traj_idx[s:steps])
        return DynOutcome(CYCLE, steps, cycle_members=members,
                          first_visit_time=s, trajectory=trajectory,
                          indd_history=history)
    if status == kern.STATUS_EXHAUSTED:
        raise EligibleSetEmptyError(
            "a player ran out of eligible actions before termination")
    return DynOutcome(TRUNCATED, steps, trajectory=trajectory,
                      indd_history=history)


def run_sbrd(game: Game, start: Optional[Sequence[int]] = None,
             max_steps: Optional[int] = None,
             keep_trajectory: bool = False) -> DynOutcome:
    """Synchronous best-response walk until a profile recurs.

    Every player simultaneously best-responds to the previous profile,
    ties to the lowest action index.  Deterministic given (game, start).
    """
    start = _resolve_start(game, start)
    if max_steps is None:
        max_steps = default_max_steps(game)
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    kern = get_backend()
    status, first_visit, traj = kern.sbrd_path(
        list(game.tables), game.num_actions,
        profile_to_index(start, game.num_actions), max_steps)
    return _wrap_outcome(game, status, first_visit, traj, keep_trajectory)


def run_indd(game: Game, start: Optional[Sequence[int]] = None,
             max_steps: Optional[int] = None,
             keep_trajectory: bool = False) -> DynOutcome:
    """Two-player independent dynamic until a profile recurs.

    Each period both players best-respond over their eligible set: any
    action never played before, plus the action they played two periods
    ago; in period 1 only the start action is barred.  Requires n = 2 and
    m >= 3.  On a shared-table game the terminal is always a two-cycle.
    """
    if game.num_players != 2:
        raise ArityError("the independent dynamic is defined for two players")
    if game.num_actions < 3:
        raise ValueError("the independent dynamic needs at least 3 actions")
    start = _resolve_start(game, start)
    if max_steps is None:
        max_steps = default_max_steps(game)
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    kern = get_backend()
    status, first_visit, traj = kern.indd_path(
        game.tables[0], game.tables[1], game.num_actions,
        start[0], start[1], max_steps)
    m = game.num_actions
    history = InddHistory(
        actions_played=(tuple(int(i) // m for i in traj),
                        tuple(int(i) % m for i in traj)),
        time=len(traj) - 1)
    return _wrap_outcome(game, status, first_visit, traj, keep_trajectory,
                         history)


def cross_profiles_are_nash(game: Game, outcome: DynOutcome) -> bool:
    """For a two-cycle {(a,b), (a',b')}, check that the cross profiles
    (a,b') and (a',b) are both pure Nash equilibria."""
    if game.num_players != 2:
        raise ArityError("cross-profile check is defined for two players")
    if outcome.cycle_length != 2:
        raise ArityError("cross-profile check needs a cycle of length 2")
    (a, b), (a2, b2) = outcome.cycle_members
    return is_pure_nash(game, (a, b2)) and is_pure_nash(game, (a2, b))


def _sbrd_profile_at(outcome: DynOutcome, t: int) -> ActionProfile:
    """Profile of the synchronous walk at period t, extending past its
    revisit by cycle arithmetic."""
    traj = outcome.trajectory
    if t < len(traj):
        return traj[t]
    if outcome.kind == FIXED_POINT:
        return traj[-1]
    if outcome.kind == CYCLE:
        s = outcome.first_visit_time
        length = outcome.cycle_length
        return traj[s + (t - s) % length]
    raise ValueError("truncated walk has no profile beyond its horizon")


def compare_sbrd_indd(game: Game, start: Optional[Sequence[int]] = None,
                      max_steps: Optional[int] = None) -> AgreementReport:
    """Run both dynamics from one start and compare period by period.

    coincide is true iff the profiles agree at every period up to and
    including the independent dynamic's termination time.  A synchronous
    walk that reaches a fixed point always diverges: the independent
    dynamic cannot repeat the immediately preceding action profile.
    """
    if game.num_players != 2:
        raise ArityError("comparison is defined for two players")
    sbrd = run_sbrd(game, start, max_steps, keep_trajectory=True)
    indd = run_indd(game, start, max_steps, keep_trajectory=True)
    horizon = indd.steps_to_terminal
    divergence = None
    for t in range(horizon + 1):
        if _sbrd_profile_at(sbrd, t) != indd.trajectory[t]:
            divergence = t
            break
    return AgreementReport(coincide=divergence is None,
                           divergence_time=divergence,
                           indd_termination_time=horizon,
                           sbrd_outcome=sbrd, indd_outcome=indd)
