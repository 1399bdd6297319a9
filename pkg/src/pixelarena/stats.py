"""Match statistics: frag arithmetic, speed conversion, precision ratios,
and the tournament result tables (CSV + Markdown).

Frags are kills minus suicides. The F/D ratio is truncated toward zero at
two decimals, computed in integer arithmetic so that table values reproduce
exactly (e.g. 142/497 -> 0.28, not 0.29; -130/315 -> -0.41).
"""
from __future__ import annotations

from dataclasses import dataclass

from .sim import Counters

CSV_HEADER = (
    "place,bot,frags,fd_ratio,kills,suicides,deaths,avg_speed_kmh,attacks,"
    "shooting_precision,detection_precision,hits_taken,damage_taken,"
    "ammo_picked,medikits_picked,armors_picked"
)

TICS_PER_SECOND = 35
UNITS_PER_CELL = 128
METERS_PER_CELL = 3.0


def frags(kills: int, suicides: int) -> int:
    return kills - suicides


def fd_ratio(frag_count: int, deaths: int) -> float:
    """frags / max(deaths, 1), truncated toward zero at 2 decimals."""
    d = max(deaths, 1)
    hundredths = (100 * abs(frag_count)) // d
    value = hundredths / 100.0
    return -value if frag_count < 0 else value


def avg_speed_kmh(distance_units_fx: int, alive_tics: int) -> float:
    """Average speed in km/h from a raw fixed-point distance and the time
    spent alive (128 game units = 3 m, 35 tics = 1 s)."""
    if alive_tics <= 0:
        return 0.0
    units = distance_units_fx / 65536.0
    units_per_second = units * TICS_PER_SECOND / alive_tics
    m_per_second = units_per_second * METERS_PER_CELL / UNITS_PER_CELL
    return m_per_second * 3.6


def precisions(c: Counters) -> tuple[float, float]:
    """(shooting, detection) precision percentages, one decimal; both zero
    when no attacks were made."""
    if c.attacks == 0:
        return 0.0, 0.0
    shooting = round(100.0 * c.attacks_damaging / c.attacks, 1)
    detection = round(100.0 * c.attacks_visible / c.attacks, 1)
    return shooting, detection


def add_counters(a: Counters, b: Counters) -> Counters:
    out = Counters()
    for name in Counters.__slots__:
        setattr(out, name, getattr(a, name) + getattr(b, name))
    return out


@dataclass
class PlayerStats:
    """Everything one results-table row needs, derived from Counters alone."""

    name: str
    counters: Counters

    @property
    def frags(self) -> int:
        return frags(self.counters.kills, self.counters.suicides)

    @property
    def fd(self) -> float:
        return fd_ratio(self.frags, self.counters.deaths)

    @property
    def speed_kmh(self) -> float:
        return round(avg_speed_kmh(self.counters.distance_units, self.counters.alive_tics), 2)

    @property
    def shooting_precision(self) -> float:
        return precisions(self.counters)[0]

    @property
    def detection_precision(self) -> float:
        return precisions(self.counters)[1]


def rank_rows(rows: list[PlayerStats]) -> list[PlayerStats]:
    """Total frags decide places; ties break by F/D ratio, then by name."""
    return sorted(rows, key=lambda r: (-r.frags, -r.fd, r.name))


def _row_values(place: int, r: PlayerStats) -> list[str]:
    c = r.counters
    return [
        str(place), r.name, str(r.frags), f"{r.fd:.2f}", str(c.kills),
        str(c.suicides), str(c.deaths), f"{r.speed_kmh:.2f}", str(c.attacks),
        f"{r.shooting_precision:.1f}", f"{r.detection_precision:.1f}",
        str(c.hits_taken), str(c.damage_taken_hp), str(c.picked_ammo),
        str(c.picked_medikits), str(c.picked_armors),
    ]


def emit_csv(rows: list[PlayerStats]) -> str:
    ranked = rank_rows(rows)
    lines = [CSV_HEADER]
    for place, r in enumerate(ranked, start=1):
        lines.append(",".join(_row_values(place, r)))
    return "\n".join(lines) + "\n"


def emit_markdown(rows: list[PlayerStats], title: str = "Results") -> str:
    ranked = rank_rows(rows)
    cols = CSV_HEADER.split(",")
    out = [f"# {title}", "", "| " + " | ".join(cols) + " |",
           "|" + "|".join(["---"] * len(cols)) + "|"]
    for place, r in enumerate(ranked, start=1):
        out.append("| " + " | ".join(_row_values(place, r)) + " |")
    return "\n".join(out) + "\n"


def emit_tables(rows: list[PlayerStats], title: str = "Results") -> tuple[str, str]:
    return emit_csv(rows), emit_markdown(rows, title)
