"""Independent check that a schedule never lets two stubs meet in a blank area.

The check only uses the layout geometry and each edge's tent-shaped ratio
function. It does not look at forbidden intervals or at the scheduler's
crossing catalog.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import segment_intersection
from .graphgen import LayoutGraph
from .scheduler import Schedule

COVER_TOL = 1e-9


@dataclass
class VerifyReport:
    ok: bool
    violations: list = field(default_factory=list)
    schedulable_crossings: int = 0
    inevitable_crossings: int = 0
    samples: int = 0
    period: float = 0.0
    dt: float = 0.0
    overruns: list = field(default_factory=list)

    def to_json(self, limit: int = 20) -> bytes:
        first = self.violations[0] if self.violations else None
        doc = {
            "ok": self.ok,
            "period_s": self.period,
            "dt_s": self.dt,
            "samples": self.samples,
            "schedulable_crossings": self.schedulable_crossings,
            "inevitable_crossings": self.inevitable_crossings,
            "violation_count": len(self.violations),
            "first_violation": None if first is None else {"t": first[0], "e": first[1], "c": first[2]},
            "violations": [{"t": t, "e": e, "c": c} for t, e, c in self.violations[:limit]],
            "period_overruns": self.overruns,
        }
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _ratio(t, t_s, slope, d1, delta, eta):
    t = np.asarray(t, dtype=float)
    up = delta + (t - t_s) * slope
    down = eta - (t - t_s - d1) * slope
    r = np.where(t <= t_s + d1, up, down)
    return np.where((t <= t_s) | (t > t_s + 2.0 * d1), delta, r)


def verify_no_crossings(layout: LayoutGraph, schedule: Schedule, dt: float = 1e-3) -> VerifyReport:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    p = schedule.params
    delta, eta = p.delta, p.eta
    period = schedule.period
    motions = {m.edge: m for m in schedule.motions()}
    if sorted(motions) != list(range(layout.n_edges)):
        raise ValueError("schedule does not cover exactly the layout's edges")

    kin = {}
    overruns = []
    for e, m in motions.items():
        length = layout.edge_lengths[e]
        slope = m.eff_speed / length
        d1 = (eta - delta) / slope if eta > delta else 0.0
        kin[e] = (m.t_s, slope, d1)
        if m.t_s < -COVER_TOL or m.t_s + 2.0 * d1 > period + COVER_TOL:
            overruns.append(e)

    grid = np.arange(int(math.floor(period / dt + 1e-9)) + 1) * dt

    segs = layout.segments()
    pairs = []
    inevitable = 0
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            hit = segment_intersection(segs[i], segs[j])
            if hit is None:
                continue
            if delta < hit.u1 < 1.0 - delta and delta < hit.u2 < 1.0 - delta:
                pairs.append((i, j, hit.u1, hit.u2))
            else:
                inevitable += 1

    cache = {}

    def ratio_on_grid(e):
        if e not in cache:
            t_s, slope, d1 = kin[e]
            cache[e] = _ratio(grid, t_s, slope, d1, delta, eta)
        return cache[e]

    def events(e, dist):
        t_s, slope, d1 = kin[e]
        if dist > eta or d1 == 0.0:
            return []
        off = (dist - delta) / slope
        return [t_s + off, t_s + 2.0 * d1 - off]

    violations = []
    for i, j, ui, uj in pairs:
        di, dj = min(ui, 1.0 - ui), min(uj, 1.0 - uj)
        both = (ratio_on_grid(i) - di > COVER_TOL) & (ratio_on_grid(j) - dj > COVER_TOL)
        hits = set(grid[both].tolist())
        ev = sorted(events(i, di) + events(j, dj))
        extra = ev + [(a + b) / 2.0 for a, b in zip(ev, ev[1:])]
        if extra:
            ts = np.array(extra)
            ri = _ratio(ts, *kin[i], delta, eta)
            rj = _ratio(ts, *kin[j], delta, eta)
            hits.update(ts[(ri - di > COVER_TOL) & (rj - dj > COVER_TOL)].tolist())
        violations.extend((t, i, j) for t in hits)
    violations.sort()

    return VerifyReport(
        ok=not violations and not overruns,
        violations=violations,
        schedulable_crossings=len(pairs),
        inevitable_crossings=inevitable,
        samples=len(grid),
        period=period,
        dt=dt,
        overruns=overruns,
    )
