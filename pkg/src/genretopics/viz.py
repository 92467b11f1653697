"""Chart rendering: genre doughnuts, stacked timeline areas, report JSON.

SVG is built from strings with fixed decimal formatting and a
lexicographically ordered palette, so the same inputs always serialize
to the same bytes on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping
from xml.sax.saxutils import escape, quoteattr

from .errors import TimelineTooShort, UnknownGenre
from .interpret import GenreDistribution, GenreTimeline
from .util import SCHEMA_VERSION, dumps_canonical

# colorblind-safe muted qualitative scheme
BASE_COLORS = (
    "#332288",
    "#88ccee",
    "#44aa99",
    "#117733",
    "#999933",
    "#ddcc77",
    "#cc6677",
    "#882255",
    "#aa4499",
    "#888888",
)

GTZAN_GENRES = (
    "blues",
    "classical",
    "country",
    "disco",
    "hiphop",
    "jazz",
    "metal",
    "pop",
    "reggae",
    "rock",
)

MIN_ARC_PROPORTION = 0.001


@dataclass(frozen=True)
class Palette:
    """Genre -> hex color, held in lexicographic genre order."""

    colors: Mapping[str, str]

    def __post_init__(self):
        items = dict(sorted(self.colors.items()))
        if not items:
            raise ValueError("palette needs at least one genre")
        for genre, color in items.items():
            if not (
                len(color) == 7
                and color[0] == "#"
                and all(c in "0123456789abcdef" for c in color[1:])
            ):
                raise ValueError(f"{genre!r}: color must be lowercase #rrggbb")
        if len(set(items.values())) != len(items):
            raise ValueError("palette colors must be distinct")
        object.__setattr__(self, "colors", items)

    def __contains__(self, genre: str) -> bool:
        return genre in self.colors

    def __getitem__(self, genre: str) -> str:
        return self.colors[genre]

    @property
    def genres(self) -> tuple[str, ...]:
        return tuple(self.colors)

    @classmethod
    def for_genres(cls, genres, base=BASE_COLORS) -> "Palette":
        ordered = sorted(set(genres))
        if len(ordered) > len(base):
            raise ValueError(f"only {len(base)} colors available for {len(ordered)} genres")
        return cls(dict(zip(ordered, base)))


DEFAULT_PALETTE = Palette(dict(zip(GTZAN_GENRES, BASE_COLORS)))


def _fmt(x: float, decimals: int = 4) -> str:
    s = f"{x:.{decimals}f}"
    # never emit "-0.0000"; sign of a rounded-away value is noise
    return s.lstrip("-") if float(s) == 0 else s


def _require_known(genres, palette: Palette) -> None:
    for genre in genres:
        if genre not in palette:
            raise UnknownGenre(f"genre {genre!r} has no palette color")


def _ring_point(cx: float, cy: float, r: float, angle_deg: float) -> tuple[float, float]:
    # angle measured clockwise from 12 o'clock
    rad = math.radians(angle_deg)
    return cx + r * math.sin(rad), cy - r * math.cos(rad)


def _annular_path(cx, cy, r_out, r_in, a0, a1) -> str:
    """Ring segment from a0 to a1 degrees. Arcs longer than 180 degrees
    are emitted as two commands so a full circle still renders."""
    mids = [a0 + (a1 - a0) / 2, a1] if a1 - a0 > 180 else [a1]
    x0, y0 = _ring_point(cx, cy, r_out, a0)
    d = [f"M {_fmt(x0)} {_fmt(y0)}"]
    for a in mids:
        x, y = _ring_point(cx, cy, r_out, a)
        d.append(f"A {_fmt(r_out)} {_fmt(r_out)} 0 0 1 {_fmt(x)} {_fmt(y)}")
    xi, yi = _ring_point(cx, cy, r_in, a1)
    d.append(f"L {_fmt(xi)} {_fmt(yi)}")
    for a in reversed([a0] + mids[:-1]):
        x, y = _ring_point(cx, cy, r_in, a)
        d.append(f"A {_fmt(r_in)} {_fmt(r_in)} 0 0 0 {_fmt(x)} {_fmt(y)}")
    d.append("Z")
    return " ".join(d)


def doughnut_svg(
    distribution: GenreDistribution,
    palette: Palette = DEFAULT_PALETTE,
    size_px: int = 320,
    title: str | None = None,
) -> str:
    """Annular chart: one segment per genre, sweep angle proportional,
    clockwise from 12 o'clock in palette order, legend at the right.

    Proportions under 0.001 are dropped and the rest renormalized, so
    every drawn arc has nonzero width. Each segment carries data-genre
    and data-sweep attributes for machine checking.
    """
    if size_px <= 0:
        raise ValueError("size_px must be positive")
    _require_known(distribution.genres, palette)

    kept = {
        g: float(w)
        for g, w in distribution.weights.items()
        if float(w) >= MIN_ARC_PROPORTION
    }
    total = sum(kept.values())
    shares = [(g, kept[g] / total) for g in palette.genres if g in kept]

    cx = cy = size_px / 2
    r_out = size_px * 0.48
    r_in = size_px * 0.28
    legend_w = 170
    row_h = 18

    parts = []
    angle = 0.0
    for genre, share in shares:
        sweep = share * 360.0
        path = _annular_path(cx, cy, r_out, r_in, angle, angle + sweep)
        parts.append(
            f'<path d="{path}" fill={quoteattr(palette[genre])}'
            f" data-genre={quoteattr(genre)}"
            f' data-sweep="{sweep:.9f}" data-proportion="{share:.9f}"/>'
        )
        angle += sweep

    legend_x = size_px + 12
    legend_y = size_px / 2 - row_h * len(shares) / 2
    for i, (genre, share) in enumerate(shares):
        y = legend_y + i * row_h
        parts.append(
            f'<rect x="{_fmt(legend_x)}" y="{_fmt(y)}" width="12" height="12"'
            f" fill={quoteattr(palette[genre])}/>"
        )
        parts.append(
            f'<text x="{_fmt(legend_x + 18)}" y="{_fmt(y + 10)}"'
            f' font-family="sans-serif" font-size="12">'
            f"{escape(genre)} {share * 100:.1f}%</text>"
        )
    if title:
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy + 4)}" text-anchor="middle"'
            f' font-family="sans-serif" font-size="14">{escape(title)}</text>'
        )

    width = size_px + legend_w
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}"'
        f' height="{size_px}" viewBox="0 0 {width} {size_px}">\n'
        + "\n".join(parts)
        + "\n</svg>\n"
    )


def timeline_svg(
    timeline: GenreTimeline,
    palette: Palette = DEFAULT_PALETTE,
    width_px: int = 640,
    height_px: int = 240,
    title: str | None = None,
) -> str:
    """Stacked area chart of genre proportions over time.

    Bands stack bottom-up in palette order; at every x the stacked
    heights fill the plot exactly because proportions sum to 1. The time
    axis is labeled in seconds.
    """
    if len(timeline) < 2:
        raise TimelineTooShort(f"need >= 2 entries, got {len(timeline)}")
    present = timeline.genres
    _require_known(present, palette)
    order = [g for g in palette.genres if g in present]

    ml, mr, mt, mb = 46, 14, 14, 34
    plot_w = width_px - ml - mr
    plot_h = height_px - mt - mb
    if plot_w <= 0 or plot_h <= 0:
        raise ValueError("canvas too small for the fixed margins")

    times = [t for t, _ in timeline]
    t0, t1 = times[0], times[-1]
    span = t1 - t0
    xs = [ml + (t - t0) / span * plot_w for t in times]

    # cumulative proportions per entry, bottom of stack first
    values = [[float(dist.get(g, 0)) for _, dist in timeline] for g in order]
    parts = []
    lower = [0.0] * len(times)
    for g, row in zip(order, values):
        upper = [lo + v for lo, v in zip(lower, row)]
        pts = [
            f"{_fmt(x, 3)},{_fmt(mt + plot_h * (1 - u), 3)}" for x, u in zip(xs, upper)
        ]
        pts += [
            f"{_fmt(x, 3)},{_fmt(mt + plot_h * (1 - lo), 3)}"
            for x, lo in zip(reversed(xs), reversed(lower))
        ]
        parts.append(
            f'<polygon points="{" ".join(pts)}" fill={quoteattr(palette[g])}'
            f" data-genre={quoteattr(g)}/>"
        )
        lower = upper

    axis_y = mt + plot_h
    parts.append(
        f'<line x1="{ml}" y1="{axis_y}" x2="{ml + plot_w}" y2="{axis_y}"'
        ' stroke="#000000" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{axis_y}"'
        ' stroke="#000000" stroke-width="1"/>'
    )
    for i in range(5):
        t = t0 + span * i / 4
        x = ml + plot_w * i / 4
        parts.append(
            f'<line x1="{_fmt(x, 3)}" y1="{axis_y}" x2="{_fmt(x, 3)}"'
            f' y2="{axis_y + 4}" stroke="#000000" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x, 3)}" y="{axis_y + 18}" text-anchor="middle"'
            f' font-family="sans-serif" font-size="11">{t:.1f} s</text>'
        )
    for frac, label in ((0.0, "0"), (0.5, "0.5"), (1.0, "1")):
        y = mt + plot_h * (1 - frac)
        parts.append(
            f'<text x="{ml - 6}" y="{_fmt(y + 4, 3)}" text-anchor="end"'
            f' font-family="sans-serif" font-size="11">{label}</text>'
        )
    if title:
        parts.append(
            f'<text x="{ml}" y="{mt - 3}" font-family="sans-serif"'
            f' font-size="12">{escape(title)}</text>'
        )

    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px}"'
        f' height="{height_px}" viewBox="0 0 {width_px} {height_px}">\n'
        + "\n".join(parts)
        + "\n</svg>\n"
    )


def export_report_json(
    bucket_id: int,
    topics: Mapping[int, GenreDistribution],
    docs: Mapping[str, GenreDistribution],
    terms: Mapping[int, GenreDistribution],
    table,
) -> str:
    """Machine-readable bucket report; sorted keys, 12 significant
    digits, so identical inputs give identical bytes."""
    obj = {
        "schema_version": SCHEMA_VERSION,
        "bucket_id": bucket_id,
        "topics": {str(k): d.as_floats() for k, d in topics.items()},
        "documents": {str(s): d.as_floats() for s, d in docs.items()},
        "terms": {str(w): d.as_floats() for w, d in terms.items()},
        "accuracy_table": table.to_json_obj(),
    }
    return dumps_canonical(obj)
