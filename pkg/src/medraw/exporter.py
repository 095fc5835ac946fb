"""Timeline JSON and animated SVG output.

Floats are written with Python's shortest round-trip repr. Output is
byte-stable for a fixed input, and reading it back gives bit-identical values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from xml.sax.saxutils import quoteattr

from .geometry import point_at
from .graphgen import LayoutError, LayoutGraph, _parse_json
from .scheduler import (
    EdgeMotion,
    MorphingGroup,
    MorphParams,
    Schedule,
    crossing_catalog,
    morphing_groups,
)

FORMATS = ("svg-animated", "svg-static-ped", "svg-static-ced")


@dataclass(frozen=True)
class Style:
    stub_color: str = "#222222"
    stroke_width: float = 1.5
    node_color: str = "#333333"
    node_radius: float = 4.0
    highlight_color: str = "#ff8c00"
    highlight: frozenset = field(default_factory=frozenset)
    background: str = "#ffffff"
    margin: float = 20.0


def timeline_dict(layout: LayoutGraph, schedule: Schedule) -> dict:
    p = schedule.params
    tracks = [
        {
            "edge": m.edge,
            "length": m.length,
            "eff_speed": m.eff_speed,
            "t_s": m.t_s,
            "d1": m.d1,
            "delta": p.delta,
            "eta": p.eta,
        }
        for m in schedule.motions()
    ]
    return {
        "period_s": schedule.period,
        "params": {"delta": p.delta, "eta": p.eta, "speed": p.speed, "min_travel_s": p.min_travel_s},
        "tracks": tracks,
        "groups": [list(g.edges) for g, _ in schedule.groups],
    }


def export_timeline_json(layout: LayoutGraph, schedule: Schedule) -> bytes:
    return (json.dumps(timeline_dict(layout, schedule), indent=1) + "\n").encode("utf-8")


def _field(obj, key, where, kind=(int, float)):
    if not isinstance(obj, dict) or key not in obj:
        raise LayoutError(f"{where}.{key}: missing")
    val = obj[key]
    if not isinstance(val, kind) or isinstance(val, bool):
        raise LayoutError(f"{where}.{key}: expected {'integer' if kind is int else 'number'}, got {val!r}")
    return val


def load_timeline(data, layout: LayoutGraph | None = None) -> Schedule:
    """Parse a timeline document.

    With ``layout`` the groups also get their crossing lists rebuilt from the
    geometry; otherwise they carry edge ids only.
    """
    doc = _parse_json(data)
    if not isinstance(doc, dict):
        raise LayoutError("top level: expected an object")
    period = float(_field(doc, "period_s", "timeline"))
    pd = doc.get("params")
    params = MorphParams(
        delta=float(_field(pd, "delta", "params")),
        eta=float(_field(pd, "eta", "params")),
        speed=float(_field(pd, "speed", "params")),
        min_travel_s=float(_field(pd, "min_travel_s", "params")),
    )
    raw_tracks = doc.get("tracks")
    if not isinstance(raw_tracks, list):
        raise LayoutError("field 'tracks': expected a list")
    motions = {}
    for i, tr in enumerate(raw_tracks):
        where = f"tracks[{i}]"
        e = _field(tr, "edge", where, int)
        if e in motions:
            raise LayoutError(f"{where}.edge: duplicate edge {e}")
        motions[e] = EdgeMotion(
            e,
            float(_field(tr, "length", where)),
            float(_field(tr, "eff_speed", where)),
            float(_field(tr, "d1", where)),
            float(_field(tr, "t_s", where)),
        )
    raw_groups = doc.get("groups")
    if not isinstance(raw_groups, list) or not all(isinstance(g, list) for g in raw_groups):
        raise LayoutError("field 'groups': expected a list of edge-id lists")
    listed = [e for g in raw_groups for e in g]
    if sorted(listed) != sorted(motions):
        raise LayoutError("groups must partition the track edges")
    if layout is not None and sorted(motions) != list(range(layout.n_edges)):
        raise LayoutError(f"timeline has {len(motions)} tracks, layout has {layout.n_edges} edges")

    by_edge = {}
    if layout is not None:
        for g in morphing_groups(layout, crossing_catalog(layout, params), params):
            for e in g.edges:
                by_edge[e] = g
    groups = []
    for ids in raw_groups:
        ids = tuple(ids)
        src = by_edge.get(ids[0]) if ids else None
        if src is not None and src.edges == tuple(sorted(ids)):
            g = src
        else:
            g = MorphingGroup(ids, (), {e: frozenset() for e in ids})
        groups.append((g, {e: motions[e] for e in ids}))
    return Schedule(tuple(groups), period, params)


# --- SVG ---------------------------------------------------------------------


def _num(x: float) -> str:
    s = repr(float(x))
    if s.endswith(".0"):
        s = s[:-2]
    return "0" if s == "-0" else s


def _frac(x: float) -> str:
    return format(x, ".12g")


def _keyframes(m: EdgeMotion, period: float):
    """(time fraction, ratio selector) pairs; selector 0 = rest, 1 = peak."""
    frames = []
    if m.t_s > 0:
        frames.append((0.0, 0))
    frames += [(m.t_s / period, 0), (m.t_peak / period, 1), (min(m.t_end / period, 1.0), 0)]
    if frames[-1][0] < 1.0:
        frames.append((1.0, 0))
    return frames


def _open(layout, style):
    xs = [p.x for p in layout.positions]
    ys = [p.y for p in layout.positions]
    x0, y0 = min(xs) - style.margin, min(ys) - style.margin
    w, h = max(xs) - min(xs) + 2 * style.margin, max(ys) - min(ys) + 2 * style.margin
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_num(x0)} {_num(y0)} {_num(w)} {_num(h)}" width="{_num(w)}" height="{_num(h)}">',
        f'<rect x="{_num(x0)}" y="{_num(y0)}" width="{_num(w)}" height="{_num(h)}" fill={quoteattr(style.background)}/>',
        f'<g id="edges" stroke={quoteattr(style.stub_color)} stroke-width="{_num(style.stroke_width)}" '
        'stroke-linecap="butt" fill="none">',
    ]


def _close(layout, style):
    out = ["</g>", f'<g id="nodes" fill={quoteattr(style.node_color)}>']
    for i, p in enumerate(layout.positions):
        fill = f" fill={quoteattr(style.highlight_color)}" if i in style.highlight else ""
        out.append(f'<circle id="n{i}" cx="{_num(p.x)}" cy="{_num(p.y)}" r="{_num(style.node_radius)}"{fill}/>')
    out += ["</g>", "</svg>", ""]
    return "\n".join(out).encode("utf-8")


def _line(ident, a, b, children=()):
    attrs = f'id="{ident}" x1="{_num(a.x)}" y1="{_num(a.y)}" x2="{_num(b.x)}" y2="{_num(b.y)}"'
    if not children:
        return [f"<line {attrs}/>"]
    return [f"<line {attrs}>", *children, "</line>"]


def export_static_svg(layout: LayoutGraph, ratio: float | None, style: Style | None = None) -> bytes:
    """Still drawing: a symmetric PED with stub ratio ``ratio``, or the CED when None."""
    style = style or Style()
    out = _open(layout, style)
    for e in range(layout.n_edges):
        seg = layout.segment(e)
        if ratio is None or ratio >= 0.5:
            out += _line(f"e{e}", seg.a, seg.b)
        else:
            out += _line(f"e{e}a", seg.a, point_at(seg, ratio))
            out += _line(f"e{e}b", seg.b, point_at(seg, 1.0 - ratio))
    return "\n".join(out).encode("utf-8") + b"\n" + _close(layout, style)


def export_animated_svg(layout: LayoutGraph, schedule: Schedule, style: Style | None = None) -> bytes:
    """Looping SVG in which every stub tip follows its edge's ratio tent."""
    style = style or Style()
    p = schedule.params
    if p.is_static or schedule.period <= 0:
        return export_static_svg(layout, None, style)
    period = schedule.period
    dur = f"{_num(period)}s"
    out = _open(layout, style)
    for m in schedule.motions():
        seg = layout.segment(m.edge)
        frames = _keyframes(m, period)
        key_times = ";".join(_frac(f) for f, _ in frames)
        for side, (anchor, rest, peak) in (
            ("a", (seg.a, point_at(seg, p.delta), point_at(seg, p.eta))),
            ("b", (seg.b, point_at(seg, 1.0 - p.delta), point_at(seg, 1.0 - p.eta))),
        ):
            anims = []
            for attr, coord in (("x2", 0), ("y2", 1)):
                values = ";".join(_num((rest, peak)[k][coord]) for _, k in frames)
                anims.append(
                    f'<animate attributeName="{attr}" dur="{dur}" repeatCount="indefinite" '
                    f'calcMode="linear" keyTimes="{key_times}" values="{values}"/>'
                )
            out += _line(f"e{m.edge}{side}", anchor, rest, anims)
    return "\n".join(out).encode("utf-8") + b"\n" + _close(layout, style)
