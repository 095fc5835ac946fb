"""Graph and layout model, JSON I/O, and the stimulus pipeline.

Randomness always comes from numpy's PCG64 bit generator seeded with the
caller's integer seed, so generated graphs and layouts are reproducible
across platforms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Point, Segment

FR_CONSTANT = 0.9
FR_ITERATIONS = 500


class LayoutError(ValueError):
    """Invalid graph or layout input. ``problems`` lists every offence found."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


@dataclass(frozen=True)
class Graph:
    node_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        problems = graph_problems(self.node_count, self.edges)
        if problems:
            raise LayoutError(problems)


def graph_problems(node_count, edges):
    problems = []
    if node_count < 1:
        problems.append(f"node_count must be >= 1, got {node_count}")
    seen = {}
    for i, (u, v) in enumerate(edges):
        for w in (u, v):
            if not 0 <= w < node_count:
                problems.append(f"edge {i} ({u},{v}): node {w} out of range")
        if u == v:
            problems.append(f"edge {i} ({u},{v}): self-loop")
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            j = seen[key]
            problems.append(f"duplicate edge: edge {j} {edges[j]} and edge {i} ({u},{v})")
        else:
            seen[key] = i
    return problems


@dataclass(frozen=True)
class LayoutGraph:
    """A straight-line drawing: node positions plus cached edge lengths."""

    graph: Graph
    positions: tuple[Point, ...]
    edge_lengths: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        pos = tuple(Point(float(x), float(y)) for x, y in self.positions)
        object.__setattr__(self, "positions", pos)
        problems = layout_problems(self.graph, pos)
        if problems:
            raise LayoutError(problems)
        lengths = tuple(
            math.hypot(pos[v].x - pos[u].x, pos[v].y - pos[u].y) for u, v in self.graph.edges
        )
        object.__setattr__(self, "edge_lengths", lengths)

    @property
    def n_edges(self) -> int:
        return len(self.graph.edges)

    def segment(self, e: int) -> Segment:
        u, v = self.graph.edges[e]
        return Segment(self.positions[u], self.positions[v])

    def segments(self) -> list[Segment]:
        return [self.segment(e) for e in range(self.n_edges)]


def layout_problems(graph, positions):
    problems = []
    if len(positions) != graph.node_count:
        return [f"expected {graph.node_count} positions, got {len(positions)}"]
    for i, p in enumerate(positions):
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            problems.append(f"node {i}: non-finite position ({p.x}, {p.y})")
    first_at = {}
    for i, p in enumerate(positions):
        if p in first_at:
            problems.append(f"nodes {first_at[p]} and {i} coincide at ({p.x}, {p.y})")
        else:
            first_at[p] = i
    for i, (u, v) in enumerate(graph.edges):
        if positions[u] == positions[v]:
            problems.append(f"edge {i} ({u},{v}): zero length")
    return problems


def generate_ba(n: int, m: int, seed: int) -> Graph:
    """Barabasi-Albert graph grown from a K_{m+1} seed clique.

    Each new node attaches to ``m`` distinct existing nodes drawn with
    probability proportional to degree. Produces ``m(m+1)/2 + m(n-m-1)``
    edges, so ``n=50, m=3`` gives 144.
    """
    if m < 1 or n < m + 1:
        raise LayoutError(f"generate_ba needs n >= m+1 >= 2, got n={n}, m={m}")
    rng = make_rng(seed)
    edges = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    # every node appears once per incident edge
    repeated = [w for e in edges for w in e]
    for v in range(m + 1, n):
        targets: list[int] = []
        while len(targets) < m:
            w = repeated[int(rng.integers(len(repeated)))]
            if w not in targets:
                targets.append(w)
        for w in targets:
            edges.append((w, v))
            repeated.extend((w, v))
    return Graph(n, tuple(edges))


def fr_layout(
    g: Graph,
    width: float,
    height: float,
    iterations: int = FR_ITERATIONS,
    seed: int = 0,
    c: float = FR_CONSTANT,
) -> LayoutGraph:
    """Fruchterman-Reingold placement inside a ``width`` x ``height`` frame."""
    if width <= 0 or height <= 0 or iterations < 1:
        raise LayoutError("fr_layout needs width, height > 0 and iterations >= 1")
    n = g.node_count
    if n == 1:
        return LayoutGraph(g, [(width / 2.0, height / 2.0)])

    rng = make_rng(seed)
    pos = rng.uniform(0.0, 1.0, size=(n, 2)) * np.array([width, height])
    k = c * math.sqrt(width * height / n)
    edges = np.array(g.edges, dtype=np.int64).reshape(-1, 2)
    temp0 = 0.1 * min(width, height)
    floor = 1e-6 * k

    for it in range(iterations):
        temp = temp0 * (1.0 - it / iterations)
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.maximum(np.hypot(delta[..., 0], delta[..., 1]), floor)
        np.fill_diagonal(dist, np.inf)
        disp = np.einsum("ijk,ij->ik", delta, k * k / dist**2)
        if len(edges):
            d = pos[edges[:, 0]] - pos[edges[:, 1]]
            dl = np.maximum(np.hypot(d[:, 0], d[:, 1]), floor)
            pull = d * (dl / k)[:, None]
            np.subtract.at(disp, edges[:, 0], pull)
            np.add.at(disp, edges[:, 1], pull)
        mag = np.maximum(np.hypot(disp[:, 0], disp[:, 1]), floor)
        pos += disp * (np.minimum(mag, temp) / mag)[:, None]
        np.clip(pos[:, 0], 0.0, width, out=pos[:, 0])
        np.clip(pos[:, 1], 0.0, height, out=pos[:, 1])

    return LayoutGraph(g, _separate(pos, width, height, rng))


def _separate(pos, width, height, rng, eps=1e-6):
    """Break degeneracies left by the frame clamp.

    Nodes pinned to the frame border move inward by a random 0.05-0.1% of
    the frame size, since two border nodes on one line would make collinear
    edges. Coincident nodes are then jittered apart.
    """
    pos = pos.copy()
    for axis, size in ((0, width), (1, height)):
        col = pos[:, axis]
        for i in np.flatnonzero((col <= 0.0) | (col >= size)):
            step = rng.uniform(0.5, 1.0) * 1e-3 * size
            col[i] = step if col[i] <= 0.0 else size - step
    pts = [tuple(p) for p in pos]
    seen = set()
    for i, p in enumerate(pts):
        while p in seen:
            p = (
                min(max(p[0] + rng.uniform(-eps, eps) * width, 0.0), width),
                min(max(p[1] + rng.uniform(-eps, eps) * height, 0.0), height),
            )
        seen.add(p)
        pts[i] = p
    return pts


# --- JSON --------------------------------------------------------------------


def _parse_json(data):
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise LayoutError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _dump(obj) -> bytes:
    return (json.dumps(obj, separators=(",", ":")) + "\n").encode("utf-8")


def _edge_list(doc):
    raw = doc.get("edges")
    if not isinstance(raw, list):
        raise LayoutError("field 'edges': expected a list of [u, v] pairs")
    edges, problems = [], []
    for i, e in enumerate(raw):
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(w, int) and not isinstance(w, bool) for w in e)
        ):
            problems.append(f"edges[{i}]: expected [u, v] integer pair, got {e!r}")
        else:
            edges.append(tuple(e))
    if problems:
        raise LayoutError(problems)
    return edges


def save_graph(g: Graph) -> bytes:
    return _dump({"node_count": g.node_count, "edges": [list(e) for e in g.edges]})


def load_graph(data) -> Graph:
    doc = _parse_json(data)
    if not isinstance(doc, dict):
        raise LayoutError("top level: expected an object")
    if "nodes" in doc:
        return load_layout(data).graph
    n = doc.get("node_count")
    if not isinstance(n, int) or isinstance(n, bool):
        raise LayoutError("field 'node_count': expected an integer")
    return Graph(n, _edge_list(doc))


def save_layout(layout: LayoutGraph) -> bytes:
    nodes = [{"id": i, "x": p.x, "y": p.y} for i, p in enumerate(layout.positions)]
    return _dump({"nodes": nodes, "edges": [list(e) for e in layout.graph.edges]})


def load_layout(data) -> LayoutGraph:
    doc = _parse_json(data)
    if not isinstance(doc, dict):
        raise LayoutError("top level: expected an object")
    raw = doc.get("nodes")
    if not isinstance(raw, list):
        raise LayoutError("field 'nodes': expected a list of {id, x, y} objects")
    problems = []
    by_id = {}
    for i, node in enumerate(raw):
        if not isinstance(node, dict):
            problems.append(f"nodes[{i}]: expected an object")
            continue
        nid = node.get("id")
        if not isinstance(nid, int) or isinstance(nid, bool):
            problems.append(f"nodes[{i}].id: expected an integer")
            continue
        coords = []
        for key in ("x", "y"):
            val = node.get(key)
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                problems.append(f"nodes[{i}].{key}: expected a number")
            else:
                coords.append(float(val))
        if nid in by_id:
            problems.append(f"nodes[{i}].id: duplicate id {nid}")
        elif len(coords) == 2:
            by_id[nid] = Point(*coords)
    missing = sorted(set(range(len(raw))) - set(by_id))
    if not problems and missing:
        problems.append(f"node ids must be dense 0..{len(raw) - 1}; missing {missing}")
    if problems:
        raise LayoutError(problems)
    edges = _edge_list(doc)
    n = len(raw)
    problems = graph_problems(n, edges)
    if problems:
        raise LayoutError(problems)
    return LayoutGraph(Graph(n, tuple(edges)), [by_id[i] for i in range(n)])
