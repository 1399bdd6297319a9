"""Competition harness: exclusion-based match scheduling, match execution,
and the results directory (replays, per-match CSV, summary tables).

The overflow scheme mirrors the 9-bots-into-8-slots matchmaking: when the
field exceeds the per-match capacity, each of the first `n` matches excludes
one player in turn; the remaining matches exclude the worst-performing
players so far. "Worst" is lowest cumulative frags, ties broken by more
deaths, then by higher player id.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .bots import make_brain
from .deathmatch import MatchRunner
from .fixmath import mix_seed
from .replay import ReplayWriter
from .scenario import ScenarioConfig
from .sim import Counters
from .stats import PlayerStats, add_counters, emit_csv, emit_markdown

DEFAULT_MATCH_TICS = 21000  # 10 minutes at 35 tics/s


class ScheduleError(ValueError):
    pass


@dataclass
class MatchSchedule:
    """Match rosters; None marks a second-phase match whose exclusions await
    standings (resolve_phase2)."""

    n_players: int
    capacity: int
    worst_exclude: int
    matches: list[list[int] | None]
    phase_boundary: int  # matches before this index are fixed up front

    def resolved(self) -> bool:
        return all(m is not None for m in self.matches)


def schedule(n_players: int, capacity: int, n_matches: int,
             worst_exclude: int) -> MatchSchedule:
    if n_players < 2:
        raise ScheduleError("need at least 2 players")
    if capacity < 2:
        raise ScheduleError("capacity must be at least 2")
    everyone = list(range(n_players))
    if n_players <= capacity:
        matches: list[list[int] | None] = [list(everyone) for _ in range(n_matches)]
        return MatchSchedule(n_players, capacity, worst_exclude, matches, n_matches)

    if n_players - worst_exclude > capacity:
        raise ScheduleError(
            f"{n_players} players minus {worst_exclude} excluded exceeds capacity {capacity}")
    matches = []
    boundary = min(n_players, n_matches)
    for i in range(boundary):
        matches.append([p for p in everyone if p != i])
    matches.extend(None for _ in range(n_matches - boundary))
    return MatchSchedule(n_players, capacity, worst_exclude, matches, boundary)


def rank_standings(cumulative: list[Counters]) -> list[int]:
    """Player ids best to worst: frags desc, fewer deaths, lower id."""
    def key(pid: int):
        c = cumulative[pid]
        return (-(c.kills - c.suicides), c.deaths, pid)
    return sorted(range(len(cumulative)), key=key)


def resolve_phase2(sched: MatchSchedule, cumulative: list[Counters]) -> None:
    """Fill pending matches: exclude the `worst_exclude` lowest-ranked."""
    order = rank_standings(cumulative)
    worst = set(order[len(order) - sched.worst_exclude:]) if sched.worst_exclude else set()
    roster = [p for p in range(sched.n_players) if p not in worst]
    for i, m in enumerate(sched.matches):
        if m is None:
            sched.matches[i] = list(roster)


@dataclass
class MatchReport:
    index: int
    participants: list[int]
    final_tic: int
    counters: dict[int, Counters]  # by tournament player id
    replay_path: Path | None
    end_reason: str


@dataclass
class TournamentResult:
    names: list[str]
    cumulative: list[Counters]
    reports: list[MatchReport]
    out_dir: Path | None
    summary_csv: str = ""
    summary_md: str = ""


def run_match(participants: list[str], cfg: ScenarioConfig,
              duration_tics: int = DEFAULT_MATCH_TICS,
              replay_path: str | Path | None = None,
              collect_hashes: bool = False):
    """Host one in-process match between built-in bots; returns the runner's
    MatchResult (external agents join through the netplay host instead)."""
    if not 2 <= len(participants) <= 16:
        raise ScheduleError("a match needs 2..16 participants")
    writer = None
    fh = None
    if replay_path is not None:
        fh = open(replay_path, "wb")
        writer = ReplayWriter(fh)
    try:
        runner = MatchRunner.from_bots(cfg, participants, recorder=writer,
                                       collect_hashes=collect_hashes)
        result = runner.run(duration_tics)
    finally:
        if fh is not None:
            fh.close()
    return result


def run_tournament(cfg: ScenarioConfig, bot_specs: list[str], n_matches: int,
                   capacity: int = 8, worst_exclude: int = 2,
                   duration_tics: int = DEFAULT_MATCH_TICS,
                   out_dir: str | Path | None = None,
                   seed: int | None = None) -> TournamentResult:
    n = len(bot_specs)
    names = [f"{spec.partition(':')[0]}_{i}" for i, spec in enumerate(bot_specs)]
    sched = schedule(n, capacity, n_matches, worst_exclude)
    base_seed = cfg.seed if seed is None else seed
    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)

    cumulative = [Counters() for _ in range(n)]
    reports: list[MatchReport] = []
    for mi in range(n_matches):
        if sched.matches[mi] is None:
            resolve_phase2(sched, cumulative)
        roster = sched.matches[mi]
        specs = [bot_specs[pid] for pid in roster]
        mcfg = cfg.copy()
        mcfg.seed = mix_seed(base_seed, mi + 1)
        replay_path = out_path / f"match_{mi:02d}.vzr" if out_path else None
        result = run_match(specs, mcfg, duration_tics, replay_path)
        by_pid = {pid: result.counters[slot] for slot, pid in enumerate(roster)}
        for pid, c in by_pid.items():
            cumulative[pid] = add_counters(cumulative[pid], c)
        reports.append(MatchReport(mi, list(roster), result.final_tic, by_pid,
                                   replay_path, result.end_reason))
        if out_path is not None:
            rows = [PlayerStats(names[pid], c) for pid, c in by_pid.items()]
            (out_path / f"match_{mi:02d}.csv").write_text(emit_csv(rows))

    rows = [PlayerStats(names[pid], cumulative[pid]) for pid in range(n)]
    summary_csv = emit_csv(rows)
    summary_md = emit_markdown(rows, title="Tournament summary")
    if out_path is not None:
        (out_path / "summary.csv").write_text(summary_csv)
        (out_path / "summary.md").write_text(summary_md)
    return TournamentResult(names, cumulative, reports, out_path, summary_csv, summary_md)
