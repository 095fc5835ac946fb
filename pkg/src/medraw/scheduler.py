"""Crossing-free morphing schedules for symmetric morphing edge drawings.

Every edge rests as a pair of stubs of ratio ``delta``. During one morphing
cycle its stub tips travel outward at constant speed until the ratio reaches
``eta`` and then travel back. Start times are chosen so that no two edges
whose blank areas cross ever cover their common crossing point at the same
time, and so that independent edges morph in parallel.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import CollinearOverlap, Segment, StubSet, gamma, segment_intersection
from .graphgen import LayoutError, LayoutGraph

DEFAULT_DELTA = 0.25
DEFAULT_ETA = 0.5
DEFAULT_MIN_TRAVEL_S = 0.3
DEFAULT_PX_PER_CM = 37.8


@dataclass(frozen=True)
class MorphParams:
    """Shared morphing parameters.

    ``delta == eta`` is accepted and means the edges never move.
    """

    delta: float = DEFAULT_DELTA
    eta: float = DEFAULT_ETA
    speed: float = 100.0
    min_travel_s: float = DEFAULT_MIN_TRAVEL_S

    def __post_init__(self):
        if not 0.0 <= self.delta <= self.eta <= 0.5:
            raise ValueError(f"need 0 <= delta <= eta <= 1/2, got delta={self.delta}, eta={self.eta}")
        if not self.speed > 0:
            raise ValueError(f"speed must be positive, got {self.speed}")
        if not self.min_travel_s >= 0:
            raise ValueError(f"min_travel_s must be >= 0, got {self.min_travel_s}")

    @property
    def is_static(self) -> bool:
        return self.delta >= self.eta


@dataclass(frozen=True)
class EdgeMotion:
    edge: int
    length: float
    eff_speed: float
    d1: float
    t_s: float = 0.0

    @property
    def t_peak(self) -> float:
        return self.t_s + self.d1

    @property
    def t_end(self) -> float:
        return self.t_s + 2.0 * self.d1


@dataclass(frozen=True)
class Crossing:
    e: int
    c: int
    u_e: float
    u_c: float
    schedulable: bool


@dataclass(frozen=True)
class ForbiddenInterval:
    """Start times ``[r1, r2)`` at which an edge would collide with a neighbour."""

    r1: float
    r2: float

    @property
    def empty(self) -> bool:
        return self.r1 >= self.r2

    def __contains__(self, t: float) -> bool:
        return self.r1 <= t < self.r2


@dataclass(frozen=True)
class MorphingGroup:
    edges: tuple[int, ...]
    crossings: tuple[Crossing, ...]
    neighbors: dict = field(hash=False, compare=True)

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class Schedule:
    groups: tuple[tuple[MorphingGroup, dict], ...]
    period: float
    params: MorphParams
    crossings: tuple[Crossing, ...] = ()

    def motions(self) -> list[EdgeMotion]:
        """Motions of all edges, indexed by edge id."""
        out = {}
        for _, motions in self.groups:
            out.update(motions)
        return [out[e] for e in sorted(out)]

    def group_of(self) -> dict[int, int]:
        return {e: gi for gi, (g, _) in enumerate(self.groups) for e in g.edges}


# --- kinematics --------------------------------------------------------------


def effective_speed(length: float, params: MorphParams) -> float:
    """Tip speed for an edge, slowed so a one-way trip lasts at least ``min_travel_s``."""
    if not length > 0:
        raise ValueError(f"edge length must be positive, got {length}")
    if params.min_travel_s <= 0 or params.is_static:
        return params.speed
    return min(params.speed, (params.eta - params.delta) * length / params.min_travel_s)


def make_motion(edge: int, length: float, params: MorphParams, t_s: float = 0.0) -> EdgeMotion:
    s = effective_speed(length, params)
    d1 = (params.eta - params.delta) * length / s
    return EdgeMotion(edge, length, s, d1, t_s)


def visual_angle_speed(deg_per_s: float, view_dist_cm: float, px_per_cm: float = DEFAULT_PX_PER_CM) -> float:
    """Screen speed (px/s) of a stimulus moving at ``deg_per_s`` of visual angle."""
    if deg_per_s < 0 or view_dist_cm <= 0 or px_per_cm <= 0:
        raise ValueError("visual angle speed needs non-negative angle and positive distance/density")
    return math.tan(math.radians(deg_per_s)) * view_dist_cm * px_per_cm


def rho(motion: EdgeMotion, params: MorphParams, t: float) -> float:
    """Stub-edge ratio of an edge at time ``t``: a tent from delta up to eta and back."""
    t0 = motion.t_s
    if t <= t0 or t > t0 + 2.0 * motion.d1:
        return params.delta
    slope = motion.eff_speed / motion.length
    if t <= t0 + motion.d1:
        return params.delta + (t - t0) * slope
    return params.eta - (t - t0 - motion.d1) * slope


def rho_array(motion: EdgeMotion, params: MorphParams, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    t0, d1 = motion.t_s, motion.d1
    slope = motion.eff_speed / motion.length
    rise = params.delta + (t - t0) * slope
    fall = params.eta - (t - t0 - d1) * slope
    out = np.where(t <= t0 + d1, rise, fall)
    return np.where((t <= t0) | (t > t0 + 2.0 * d1), params.delta, out)


def drawn_set(layout: LayoutGraph, motion: EdgeMotion, params: MorphParams, t: float) -> StubSet:
    r = rho(motion, params, t)
    return gamma(layout.segment(motion.edge), r, 1.0 - r)


def _reach(length, u, params):
    d = min(u, 1.0 - u) * length
    if not d > params.delta * length:
        raise ValueError(f"crossing at u={u} lies inside the rest stub (delta={params.delta})")
    if d > params.eta * length:
        return None
    return d


def t_pass(motion: EdgeMotion, u: float, params: MorphParams) -> float | None:
    """Seconds after start at which the growing stub tip reaches parameter ``u``.

    ``None`` if the stub never gets that far.
    """
    d = _reach(motion.length, u, params)
    if d is None:
        return None
    return (d - params.delta * motion.length) / motion.eff_speed


def t_return(motion: EdgeMotion, u: float, params: MorphParams) -> float | None:
    """Seconds after start at which the shrinking stub tip passes ``u`` again."""
    d = _reach(motion.length, u, params)
    if d is None:
        return None
    l = motion.length
    return ((params.eta - params.delta) * l + (params.eta * l - d)) / motion.eff_speed


# --- crossings and groups ----------------------------------------------------


def crossing_catalog(layout: LayoutGraph, params: MorphParams) -> list[Crossing]:
    """Every proper crossing, once per direction, sorted by ``(e, c)``."""
    segs: list[Segment] = layout.segments()
    lo, hi = params.delta, 1.0 - params.delta
    out = []
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            try:
                hit = segment_intersection(segs[i], segs[j])
            except CollinearOverlap as exc:
                raise LayoutError(f"edges {i} and {j} overlap collinearly") from exc
            if hit is None:
                continue
            ok = lo < hit.u1 < hi and lo < hit.u2 < hi
            out.append(Crossing(i, j, hit.u1, hit.u2, ok))
            out.append(Crossing(j, i, hit.u2, hit.u1, ok))
    out.sort(key=lambda x: (x.e, x.c))
    return out


def _reachable(crossing, params):
    return all(min(u, 1.0 - u) <= params.eta for u in (crossing.u_e, crossing.u_c))


def morphing_groups(
    layout: LayoutGraph,
    catalog: list[Crossing],
    params: MorphParams | None = None,
    drop_unreachable: bool = False,
) -> list[MorphingGroup]:
    """Connected components of the blank-area crossing graph.

    With ``drop_unreachable`` a crossing that some stub can never reach (only
    possible when ``eta < 1/2``) does not link its edges.
    """
    n = layout.n_edges
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    links = [x for x in catalog if x.schedulable]
    if drop_unreachable:
        if params is None:
            raise ValueError("drop_unreachable needs params")
        links = [x for x in links if _reachable(x, params)]
    for x in links:
        a, b = find(x.e), find(x.c)
        if a != b:
            parent[max(a, b)] = min(a, b)

    members: dict[int, list[int]] = {}
    for e in range(n):
        members.setdefault(find(e), []).append(e)
    by_root: dict[int, list[Crossing]] = {}
    for x in links:
        by_root.setdefault(find(x.e), []).append(x)

    groups = []
    for root in sorted(members, key=lambda r: members[r][0]):
        edges = tuple(members[root])
        xs = tuple(by_root.get(root, ()))
        nbrs = {e: set() for e in edges}
        for x in xs:
            nbrs[x.e].add(x.c)
        groups.append(MorphingGroup(edges, xs, {e: frozenset(s) for e, s in nbrs.items()}))
    return groups


# --- start times -------------------------------------------------------------


def forbidden_interval(e: EdgeMotion, c: EdgeMotion, crossing: Crossing, params: MorphParams) -> ForbiddenInterval:
    """Start times of ``e`` that would overlap ``c``'s coverage of their crossing.

    ``c`` must already carry its start time. Returns an empty interval when
    either stub never reaches the crossing point.
    """
    if crossing.e != e.edge or crossing.c != c.edge:
        raise ValueError(f"crossing {crossing.e}x{crossing.c} does not match edges {e.edge}, {c.edge}")
    tp_e, tr_e = t_pass(e, crossing.u_e, params), t_return(e, crossing.u_e, params)
    tp_c, tr_c = t_pass(c, crossing.u_c, params), t_return(c, crossing.u_c, params)
    if tp_e is None or tp_c is None:
        return ForbiddenInterval(0.0, 0.0)
    return ForbiddenInterval(c.t_s + tp_c - tr_e, c.t_s + tr_c - tp_e)


def earliest_space(intervals) -> float:
    """Smallest ``t >= 0`` outside every half-open ``[r1, r2)``."""
    t = 0.0
    for iv in sorted(intervals, key=lambda iv: (iv.r1, iv.r2)):
        if iv.r2 < t:
            continue
        if t < iv.r1:
            return t
        t = iv.r2
    return t


def length_order(edges, layout: LayoutGraph) -> list[int]:
    return sorted(edges, key=lambda e: (-layout.edge_lengths[e], e))


def find_start_times(group: MorphingGroup, layout: LayoutGraph, params: MorphParams) -> dict[int, EdgeMotion]:
    """Greedy start times, longest edge first."""
    by_pair = {(x.e, x.c): x for x in group.crossings}
    done: dict[int, EdgeMotion] = {}
    for e in length_order(group.edges, layout):
        cand = make_motion(e, layout.edge_lengths[e], params)
        forbidden = [
            forbidden_interval(cand, done[c], by_pair[(e, c)], params)
            for c in sorted(group.neighbors.get(e, ()))
            if c in done
        ]
        done[e] = make_motion(e, cand.length, params, earliest_space(forbidden))
    return {e: done[e] for e in sorted(done)}


def round_up_ms(t: float) -> float:
    # tolerate representation noise just above a whole millisecond
    return math.ceil(t * 1000.0 - 1e-6) / 1000.0


def build_schedule(
    layout: LayoutGraph,
    params: MorphParams,
    workers: int = 1,
    drop_unreachable: bool = False,
) -> Schedule:
    catalog = crossing_catalog(layout, params)
    groups = morphing_groups(layout, catalog, params, drop_unreachable)
    if params.is_static:
        per_group = [{e: make_motion(e, layout.edge_lengths[e], params) for e in g.edges} for g in groups]
    elif workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_group = list(pool.map(lambda g: find_start_times(g, layout, params), groups))
    else:
        per_group = [find_start_times(g, layout, params) for g in groups]
    ends = [m.t_end for motions in per_group for m in motions.values()]
    period = round_up_ms(max(ends, default=0.0))
    return Schedule(tuple(zip(groups, per_group)), period, params, tuple(catalog))


def makespan(motions: dict) -> float:
    return max((m.t_end for m in motions.values()), default=0.0)


def sequential_makespan(motions: dict) -> float:
    """Length of the one-edge-at-a-time baseline for the same group."""
    return sum(2.0 * m.d1 for m in motions.values())
