"""Finite truncations (balls) of lazily generated infinite graphs."""
from __future__ import annotations

import json
import math
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

SCHEMA_VERSION = 1
DEFAULT_MAX_VERTICES = 2_000_000


class TruncationTooLarge(RuntimeError):
    pass


class UnknownVertex(KeyError):
    pass


# ---------------------------------------------------------------------------
# Integer vertex ids.  Every generator maps structural keys (tuples of ints)
# to non-negative integers through these bijections so that ids are stable
# across truncations.


def zigzag(n: int) -> int:
    """Bijection Z -> N: 0, -1, 1, -2, 2, ... -> 0, 1, 2, 3, 4, ..."""
    return 2 * n if n >= 0 else -2 * n - 1


def unzigzag(m: int) -> int:
    return m // 2 if m % 2 == 0 else -(m + 1) // 2


def pair(a: int, b: int) -> int:
    """Szudzik's elegant pairing N x N -> N."""
    return a * a + a + b if a >= b else b * b + a


def unpair(z: int) -> tuple[int, int]:
    s = math.isqrt(z)
    r = z - s * s
    return (r, s) if r < s else (s, r - s)


def pack(values: Iterable[int]) -> int:
    """Injective map from fixed-length tuples of naturals to N (left fold of ``pair``)."""
    values = list(values)
    acc = values[0]
    for v in values[1:]:
        acc = pair(acc, v)
    return acc


def unpack(z: int, length: int) -> tuple[int, ...]:
    out = []
    for _ in range(length - 1):
        z, last = unpair(z)
        out.append(last)
    out.append(z)
    return tuple(reversed(out))


# ---------------------------------------------------------------------------


class GraphGenerator:
    """Lazy description of a (possibly infinite) connected graph.

    Subclasses set ``family``, ``parameters``, ``root`` and ``max_degree`` and
    implement :meth:`neighbors`, which returns one entry per incident
    edge-endpoint (a loop at ``v`` lists ``v`` twice).
    """

    family: str = "abstract"
    parameters: dict = {}
    root: int = 0
    max_degree: int = 0

    def neighbors(self, v: int) -> list[int]:
        raise NotImplementedError

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))


@dataclass(frozen=True, eq=False)
class GraphView:
    """Finite graph with interior/boundary marking and fixed edge orientation.

    Vertex functions are numpy arrays aligned with ``vertices``; edge
    functions are arrays aligned with ``edges`` (edge id == position).
    """

    family: str
    parameters: dict
    radius: int
    root: int
    vertices: tuple[int, ...]
    boundary: tuple[bool, ...]
    tails: tuple[int, ...]
    heads: tuple[int, ...]
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.vertices) != len(self.boundary):
            raise ValueError("vertices and boundary flags differ in length")
        if len(self.tails) != len(self.heads):
            raise ValueError("tails and heads differ in length")
        index = {v: i for i, v in enumerate(self.vertices)}
        if len(index) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        for t, h in zip(self.tails, self.heads):
            if t not in index or h not in index:
                raise ValueError(f"edge ({t}, {h}) leaves the vertex set")
            if t > h:
                raise ValueError(f"edge ({t}, {h}) must point from smaller to larger id")
        object.__setattr__(self, "index", index)
        t = np.fromiter((index[v] for v in self.tails), dtype=np.int64, count=len(self.tails))
        h = np.fromiter((index[v] for v in self.heads), dtype=np.int64, count=len(self.heads))
        deg = np.zeros(len(self.vertices), dtype=np.int64)
        np.add.at(deg, t, 1)
        np.add.at(deg, h, 1)
        for arr in (t, h, deg):
            arr.flags.writeable = False
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_h", h)
        object.__setattr__(self, "_deg", deg)

    @classmethod
    def from_edges(cls, vertices, edges, boundary=(), family="custom",
                   parameters=None, radius=-1, root=None):
        """Build a view from ``(u, v)`` pairs, orienting each from smaller to larger id."""
        vertices = tuple(int(v) for v in vertices)
        bset = set(boundary)
        pairs = sorted((min(u, v), max(u, v)) for u, v in edges)
        return cls(
            family=family,
            parameters=dict(parameters or {}),
            radius=radius,
            root=vertices[0] if root is None else int(root),
            vertices=vertices,
            boundary=tuple(v in bset for v in vertices),
            tails=tuple(p[0] for p in pairs),
            heads=tuple(p[1] for p in pairs),
        )

    # -- basic queries -----------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.tails)

    def idx(self, v: int) -> int:
        try:
            return self.index[v]
        except KeyError:
            raise UnknownVertex(v) from None

    def __contains__(self, v) -> bool:
        return v in self.index

    @property
    def tail_idx(self) -> np.ndarray:
        return self._t

    @property
    def head_idx(self) -> np.ndarray:
        return self._h

    def degrees(self) -> np.ndarray:
        return self._deg

    def interior_mask(self) -> np.ndarray:
        return ~np.asarray(self.boundary, dtype=bool)

    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        """vertex id -> list of (edge id, other endpoint)."""
        adj: dict[int, list[tuple[int, int]]] = {v: [] for v in self.vertices}
        for e, (t, h) in enumerate(zip(self.tails, self.heads)):
            adj[t].append((e, h))
            if t != h:
                adj[h].append((e, t))
            else:
                adj[t].append((e, t))
        return adj

    def edge_lookup(self) -> dict[tuple[int, int], int]:
        return {(t, h): e for e, (t, h) in enumerate(zip(self.tails, self.heads))}

    def distances(self, source: int | None = None) -> dict[int, int]:
        """BFS distances inside the view."""
        source = self.root if source is None else source
        adj = self.adjacency()
        dist = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for _, w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "family": self.family,
            "parameters": self.parameters,
            "radius": self.radius,
            "root": self.root,
            "vertices": [{"id": v, "boundary": b} for v, b in zip(self.vertices, self.boundary)],
            "edges": [{"id": e, "tail": t, "head": h}
                      for e, (t, h) in enumerate(zip(self.tails, self.heads))],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: dict) -> "GraphView":
        edges = sorted(doc["edges"], key=lambda e: e["id"])
        if [e["id"] for e in edges] != list(range(len(edges))):
            raise ValueError("edge ids must be 0..E-1")
        verts = doc["vertices"]
        return cls(
            family=doc["family"],
            parameters=doc.get("parameters", {}),
            radius=int(doc["radius"]),
            root=int(doc.get("root", verts[0]["id"])),
            vertices=tuple(int(v["id"]) for v in verts),
            boundary=tuple(bool(v["boundary"]) for v in verts),
            tails=tuple(int(e["tail"]) for e in edges),
            heads=tuple(int(e["head"]) for e in edges),
        )

    @classmethod
    def from_json(cls, text: str) -> "GraphView":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, GraphView):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    __hash__ = None


def max_vertices_cap() -> int:
    return int(os.environ.get("SURFLAB_MAX_VERTICES", DEFAULT_MAX_VERTICES))


def build_truncation(gen: GraphGenerator, radius: int, max_vertices: int | None = None) -> GraphView:
    """Ball of the given graph-distance radius around ``gen.root``.

    Boundary vertices sit at distance ``radius`` and have a generator
    neighbor outside the ball; everything else is interior.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    cap = max_vertices_cap() if max_vertices is None else max_vertices
    root = gen.root
    dist = {root: 0}
    order = [root]
    nbrs: dict[int, list[int]] = {}
    frontier = [root]
    for d in range(radius + 1):
        nxt = []
        for v in frontier:
            nv = gen.neighbors(v)
            nbrs[v] = nv
            if d == radius:
                continue
            for w in nv:
                if w not in dist:
                    dist[w] = d + 1
                    order.append(w)
                    nxt.append(w)
                    if len(order) > cap:
                        raise TruncationTooLarge(
                            f"ball of radius {radius} exceeds {cap} vertices")
        frontier = nxt

    vertices = sorted(order, key=lambda v: (dist[v], v))
    boundary = []
    edges = []
    for v in vertices:
        nv = nbrs[v]
        boundary.append(dist[v] == radius and any(w not in dist for w in nv))
        loops = 0
        for w in nv:
            if w == v:
                loops += 1
            elif w > v and w in dist:
                edges.append((v, w))
        edges.extend([(v, v)] * (loops // 2))
    edges.sort()
    return GraphView(
        family=gen.family,
        parameters=dict(gen.parameters),
        radius=radius,
        root=root,
        vertices=tuple(vertices),
        boundary=tuple(boundary),
        tails=tuple(e[0] for e in edges),
        heads=tuple(e[1] for e in edges),
    )


def degree(view: GraphView, v: int) -> int:
    """Incident edge-endpoints of ``v``; a loop counts twice."""
    i = view.idx(v)
    return int(view.degrees()[i])


def boundary_shell(view: GraphView) -> set[int]:
    return {v for v, b in zip(view.vertices, view.boundary) if b}


def is_connected(view: GraphView) -> bool:
    return len(view.distances(view.vertices[0])) == view.n_vertices if view.n_vertices else True
