"""Lazy generators for the graph families used in the type problem.

Vertex ids
----------
* ``z1/z2/z3``: coordinates are zigzag-encoded and folded with Szudzik
  pairing, so the origin is 0.
* ``t2``: vertex ``v`` of the base grid becomes ``2v`` (the N/E vertex
  ``v_a``) and ``2v + 1`` (the S/W vertex ``v_b``).
* ``t3``: vertex ``v`` becomes ``4v + i`` for the path ``x1..x4`` (``i = 0..3``).
* ``trivalent``: heap numbering; root 0 has children 1, 2, 3 and a vertex
  ``n >= 1`` has children ``2n + 2`` and ``2n + 3``.
* ``gm-flute`` and ``flute-tree``: ``4 * pack(key) + tag`` over a structural
  key tuple (see the classes below).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .graph_core import GraphGenerator, GraphView, pack, unpack, unzigzag, zigzag


class WrongBaseFamily(ValueError):
    pass


class MalformedSpec(ValueError):
    pass


# ---------------------------------------------------------------------------
# Integer lattices


def encode_point(coords: Sequence[int]) -> int:
    return pack(zigzag(c) for c in coords)


def decode_point(v: int, dim: int) -> tuple[int, ...]:
    return tuple(unzigzag(c) for c in unpack(v, dim))


@dataclass(frozen=True)
class Grid(GraphGenerator):
    dimension: int

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise ValueError(f"unsupported dimension {self.dimension}")

    @property
    def family(self):
        return f"z{self.dimension}"

    @property
    def parameters(self):
        return {"dimension": self.dimension}

    root = 0

    @property
    def max_degree(self):
        return 2 * self.dimension

    def neighbors(self, v):
        p = decode_point(v, self.dimension)
        out = []
        for axis in range(self.dimension):
            for step in (1, -1):
                q = list(p)
                q[axis] += step
                out.append(encode_point(q))
        return out

    def vertex(self, coords) -> int:
        return encode_point(coords)

    def coords(self, v) -> tuple[int, ...]:
        return decode_point(v, self.dimension)


def grid(dimension: int) -> Grid:
    return Grid(dimension)


# ---------------------------------------------------------------------------
# Grid-to-pants-graph transforms.
#
# Directions are signed axes: +1/-1 for x, +2/-2 for y, +3/-3 for z.  The
# canonical orientation of a grid edge is the positive coordinate direction.
#
# T2: North (+2) and East (+1) attach to v_a, South (-2) and West (-1) to v_b;
# the new edge joins v_a and v_b.
T2_PORT = {+1: 0, +2: 0, -1: 1, -2: 1}

# T3: each vertex becomes the path x1 -f- x2 -g- x3 -h- x4.  The six grid
# edges e1..e6 of a vertex are e1 = +x, e2 = +y, e3 = +z (outgoing) and
# e4 = -x, e5 = -y, e6 = -z (incoming); they attach as
#   e5, e6 at x1;  e4 at x2;  e3 at x3;  e1, e2 at x4.
# With f: x1->x2, g: x2->x3, h: x3->x4 this gives zero divergence at x1, x2,
# x3 and the full grid divergence at x4 once u(f), u(g), u(h) are set from
# the grid values (see flows.t3_cluster_values).
T3_PORT = {+1: 3, +2: 3, +3: 2, -1: 1, -2: 0, -3: 0}
T3_EDGE_LABEL = {+1: "e1", +2: "e2", +3: "e3", -1: "e4", -2: "e5", -3: "e6"}
T3_INTERNAL = (("f", 0, 1), ("g", 1, 2), ("h", 2, 3))

CONVENTION_TABLE = {
    "t2": {
        "cluster_size": 2,
        "ports": {"+x": "a", "+y": "a", "-x": "b", "-y": "b"},
        "internal": [{"name": "e", "tail": "a", "head": "b"}],
    },
    "t3": {
        "cluster_size": 4,
        "ports": {"+x": "x4", "+y": "x4", "+z": "x3", "-x": "x2", "-y": "x1", "-z": "x1"},
        "labels": {"+x": "e1", "+y": "e2", "+z": "e3", "-x": "e4", "-y": "e5", "-z": "e6"},
        "internal": [{"name": "f", "tail": "x1", "head": "x2"},
                     {"name": "g", "tail": "x2", "head": "x3"},
                     {"name": "h", "tail": "x3", "head": "x4"}],
        "canonical_grid_orientation": "positive coordinate direction",
    },
}


def _step(coords, direction):
    q = list(coords)
    q[abs(direction) - 1] += 1 if direction > 0 else -1
    return tuple(q)


@dataclass(frozen=True)
class Transformed(GraphGenerator):
    """Pants graph obtained by replacing each grid vertex with a cluster."""

    base: Grid
    kind: str  # "t2" or "t3"

    def __post_init__(self):
        want = {"t2": 2, "t3": 3}.get(self.kind)
        if want is None:
            raise ValueError(f"unknown transform {self.kind!r}")
        if not isinstance(self.base, Grid) or self.base.dimension != want:
            raise WrongBaseFamily(f"{self.kind} needs the {want}-dimensional grid")

    @property
    def size(self) -> int:
        return 2 if self.kind == "t2" else 4

    @property
    def ports(self) -> dict:
        return T2_PORT if self.kind == "t2" else T3_PORT

    @property
    def family(self):
        return f"{self.base.family}-{self.kind}"

    @property
    def parameters(self):
        return {"dimension": self.base.dimension, "transform": self.kind}

    @property
    def root(self):
        # t2: v_a of the origin; t3: x4 of the origin (the cluster vertex
        # that carries the grid divergence).
        return self.cluster_vertex(self.base.root, self.size - 1 if self.kind == "t3" else 0)

    max_degree = 3

    def cluster_vertex(self, base_v: int, slot: int) -> int:
        return self.size * base_v + slot

    def split(self, v: int) -> tuple[int, int]:
        return divmod(v, self.size)

    def neighbors(self, v):
        base_v, slot = self.split(v)
        out = []
        if slot > 0:
            out.append(v - 1)
        if slot < self.size - 1:
            out.append(v + 1)
        p = self.base.coords(base_v)
        for direction, port in self.ports.items():
            if port != slot:
                continue
            q = _step(p, direction)
            out.append(self.cluster_vertex(self.base.vertex(q), self.ports[-direction]))
        return out

    def edge_role(self, tail: int, head: int):
        """Classify a transformed edge.

        Returns ``("internal", base_v, name)`` or
        ``("grid", base_from, base_to, axis)`` where ``base_from -> base_to``
        is the positive coordinate direction along ``axis`` (1-based).
        """
        bt, st = self.split(tail)
        bh, sh = self.split(head)
        if bt == bh:
            lo, hi = sorted((st, sh))
            if hi != lo + 1:
                raise ValueError(f"({tail}, {head}) is not a cluster edge")
            name = "e" if self.kind == "t2" else T3_INTERNAL[lo][0]
            return ("internal", bt, name)
        pt, ph = self.base.coords(bt), self.base.coords(bh)
        diff = [b - a for a, b in zip(pt, ph)]
        nz = [i for i, d in enumerate(diff) if d != 0]
        if len(nz) != 1 or abs(diff[nz[0]]) != 1:
            raise ValueError(f"({tail}, {head}) joins non-adjacent clusters")
        axis = nz[0] + 1
        direction = axis if diff[nz[0]] > 0 else -axis
        if self.ports[direction] != st or self.ports[-direction] != sh:
            raise ValueError(f"({tail}, {head}) attaches to the wrong cluster ports")
        if direction > 0:
            return ("grid", bt, bh, axis)
        return ("grid", bh, bt, axis)


def transform_t2(base: GraphGenerator) -> Transformed:
    if not isinstance(base, Grid) or base.dimension != 2:
        raise WrongBaseFamily("transform_t2 needs grid(2)")
    return Transformed(base, "t2")


def transform_t3(base: GraphGenerator) -> Transformed:
    if not isinstance(base, Grid) or base.dimension != 3:
        raise WrongBaseFamily("transform_t3 needs grid(3)")
    return Transformed(base, "t3")


def transform_view(view: GraphView, kind: str) -> GraphView:
    """Apply T2/T3 to a finite patch of the grid (induced edges only)."""
    dim = {"t2": 2, "t3": 3}[kind]
    if view.family != f"z{dim}":
        raise WrongBaseFamily(f"{kind} needs a z{dim} view, got {view.family}")
    gen = Transformed(Grid(dim), kind)
    verts, edges, bnd = [], [], []
    for v, b in zip(view.vertices, view.boundary):
        cluster = [gen.cluster_vertex(v, s) for s in range(gen.size)]
        verts.extend(cluster)
        edges.extend(zip(cluster[:-1], cluster[1:]))
        if b:
            bnd.extend(cluster)
    for t, h in zip(view.tails, view.heads):
        pt, ph = gen.base.coords(t), gen.base.coords(h)
        axis = next(i for i in range(dim) if pt[i] != ph[i]) + 1
        lo, hi = (t, h) if ph[axis - 1] > pt[axis - 1] else (h, t)
        edges.append((gen.cluster_vertex(lo, gen.ports[axis]), gen.cluster_vertex(hi, gen.ports[-axis])))
    return GraphView.from_edges(verts, edges, bnd, family=gen.family,
                                parameters=gen.parameters, radius=view.radius,
                                root=gen.cluster_vertex(view.root, gen.size - 1 if kind == "t3" else 0))


# ---------------------------------------------------------------------------
# Trivalent tree


def tree_children(n: int) -> list[int]:
    return [1, 2, 3] if n == 0 else [2 * n + 2, 2 * n + 3]


def tree_parent(n: int) -> int | None:
    if n == 0:
        return None
    return 0 if n <= 3 else (n - 2) // 2


def tree_depth(n: int) -> int:
    d = 0
    while n:
        n = tree_parent(n)
        d += 1
    return d


@dataclass(frozen=True)
class TrivalentTree(GraphGenerator):
    family = "trivalent"
    parameters = {}
    root = 0
    max_degree = 3

    def neighbors(self, v):
        p = tree_parent(v)
        return ([] if p is None else [p]) + tree_children(v)


def trivalent_tree() -> TrivalentTree:
    return TrivalentTree()


# ---------------------------------------------------------------------------
# Geyer-Merenkov style flute graph.
#
# Stage 1.  The trivalent tree above, embedded in the plane with the children
#   of every vertex in left-to-right order (root: 1, 2, 3 counterclockwise).
#   Each corner between consecutive children opens one complementary face:
#     root corners (1,2), (2,3), (3,1) are faces 0, 1, 2;
#     the corner between the two children of n >= 1 is face n + 2.
#   A face with corner vertex v between children A (left) and B (right) has
#   the bi-infinite boundary path indexed by k in Z:
#     k = 0: v;  k >= 1: A followed by k-1 right-child (c1) descents;
#     k <= -1: B followed by |k|-1 left-child (c0) descents.
# Stage 2.  A half-plane square grid {(k, j): k in Z, j >= 0} is glued to each
#   face with row j = 0 identified with the boundary path.
# Stage 3.  Every grid square (k, j) gets the diagonal (k, j)-(k+1, j+1),
#   splitting it into the lower triangle L = {(k,j), (k+1,j), (k+1,j+1)} and
#   the upper triangle U = {(k,j), (k+1,j+1), (k,j+1)}.  Each triangle gets a
#   barycenter vertex joined to its three corners and to the barycenters of
#   the (up to three) edge-adjacent triangles; all old edges are removed.
#
# Keys: tree vertex ("t", n); grid vertex ("g", face, k, j) with j >= 1;
# barycenter ("b", face, k, j, s) with s = 0 for L and 1 for U.

ROOT_FACES = {0: (1, 2), 1: (2, 3), 2: (3, 1)}
_FACE_BY_A = {1: 0, 2: 1, 3: 2}
_FACE_BY_B = {2: 0, 3: 1, 1: 2}


def face_sides(f: int) -> tuple[int, int, int]:
    """(corner vertex, left child A, right child B) of face ``f``."""
    if f in ROOT_FACES:
        a, b = ROOT_FACES[f]
        return 0, a, b
    v = f - 2
    return v, 2 * v + 2, 2 * v + 3


def face_boundary(f: int, k: int) -> int:
    v, a, b = face_sides(f)
    if k == 0:
        return v
    if k > 0:
        n = a
        for _ in range(k - 1):
            n = 2 * n + 3
        return n
    n = b
    for _ in range(-k - 1):
        n = 2 * n + 2
    return n


def tree_corners(n: int) -> list[tuple[int, int]]:
    """The three (face, position) corners of tree vertex ``n``."""
    if n == 0:
        return [(0, 0), (1, 0), (2, 0)]
    out = [(n + 2, 0)]
    # A-side: climb while the current vertex is a right child of a non-root vertex.
    a, k = n, 1
    while tree_parent(a) != 0 and a % 2 == 1:
        a, k = tree_parent(a), k + 1
    out.append((_FACE_BY_A[a] if tree_parent(a) == 0 else tree_parent(a) + 2, k))
    # B-side: climb while the current vertex is a left child of a non-root vertex.
    b, k = n, 1
    while tree_parent(b) != 0 and b % 2 == 0:
        b, k = tree_parent(b), k + 1
    out.append((_FACE_BY_B[b] if tree_parent(b) == 0 else tree_parent(b) + 2, -k))
    return out


def _tri_corners(f, k, j, s):
    if s == 0:
        return [(f, k, j), (f, k + 1, j), (f, k + 1, j + 1)]
    return [(f, k, j), (f, k + 1, j + 1), (f, k, j + 1)]


@dataclass(frozen=True)
class GMFlute(GraphGenerator):
    family = "gm-flute"
    parameters = {"tree": "trivalent", "diagonal": "(k,j)-(k+1,j+1)"}
    max_degree = 9

    # -- key <-> id -----------------------------------------------------

    @staticmethod
    def encode(key) -> int:
        tag = key[0]
        if tag == "t":
            return 4 * key[1]
        if tag == "g":
            _, f, k, j = key
            return 4 * pack((f, zigzag(k), j)) + 1
        _, f, k, j, s = key
        return 4 * (2 * pack((f, zigzag(k), j)) + s) + 2

    @staticmethod
    def decode(v: int):
        z, tag = divmod(v, 4)
        if tag == 0:
            return ("t", z)
        if tag == 1:
            f, k, j = unpack(z, 3)
            return ("g", f, unzigzag(k), j)
        if tag == 2:
            z, s = divmod(z, 2)
            f, k, j = unpack(z, 3)
            return ("b", f, unzigzag(k), j, s)
        raise ValueError(f"{v} is not a gm-flute vertex id")

    @property
    def root(self):
        return self.encode(("t", 0))

    # -- geometry -----------------------------------------------------

    @staticmethod
    def old_key(f, k, j):
        return ("t", face_boundary(f, k)) if j == 0 else ("g", f, k, j)

    def _bottom_partner(self, f, k):
        """Triangle across the tree edge (f, k)-(f, k+1) in the neighboring face."""
        p, w = face_boundary(f, k), face_boundary(f, k + 1)
        child = w if tree_parent(w) == p else p
        for face, pos in tree_corners(child)[1:]:
            sq = pos - 1 if pos > 0 else pos
            if face == f and sq == k:
                continue
            return ("b", face, sq, 0, 0)
        raise AssertionError("tree edge without a second face")

    def _bary_neighbors(self, f, k, j, s):
        out = [self.old_key(*c) for c in _tri_corners(f, k, j, s)]
        if s == 0:
            out.append(("b", f, k, j, 1))
            out.append(("b", f, k + 1, j, 1))
            out.append(("b", f, k, j - 1, 1) if j >= 1 else self._bottom_partner(f, k))
        else:
            out.append(("b", f, k, j, 0))
            out.append(("b", f, k - 1, j, 0))
            out.append(("b", f, k, j + 1, 0))
        return out

    @staticmethod
    def _old_triangles(f, k, j):
        tris = [("b", f, k, j, 0), ("b", f, k - 1, j, 0), ("b", f, k, j, 1)]
        if j >= 1:
            tris += [("b", f, k - 1, j - 1, 0), ("b", f, k - 1, j - 1, 1), ("b", f, k, j - 1, 1)]
        return tris

    def neighbors(self, v):
        key = self.decode(v)
        if key[0] == "b":
            nk = self._bary_neighbors(*key[1:])
        elif key[0] == "g":
            nk = self._old_triangles(*key[1:])
        else:
            nk = []
            for f, k in tree_corners(key[1]):
                nk.extend(self._old_triangles(f, k, 0))
        return [self.encode(x) for x in nk]


def gm_flute_graph() -> GMFlute:
    return GMFlute()


# ---------------------------------------------------------------------------
# Flute trees: finitely many rays from the root, each carrying finite trees
# (and optionally sub-rays, giving a countable end hierarchy).
#
# A finite tree is a nested list of children: [] is a single vertex,
# [[], []] a cherry.  A ray spec is a dict
#   {"attach": [<attachment list>, ...]}        periodic along the ray
#   {"pendant_path": {"cap": c}}                path of length min(n, c)
#   {"subray": <ray spec>}                      an infinite ray at every vertex
# where an attachment list holds the finite trees hung at one ray vertex
# (each joined by an edge).  "attach" and "subray" may be combined.
#
# Keys are tuples (ray-path..., kind...), encoded as
#   4 * pack((len(path), pack(path))) + tag.


def _tree_size(t) -> int:
    return 1 + sum(_tree_size(c) for c in t)


def _tree_height(t) -> int:
    return 0 if not t else 1 + max(_tree_height(c) for c in t)


def _check_tree(t, where):
    if not isinstance(t, list):
        raise MalformedSpec(f"{where}: finite tree must be a nested list")
    for c in t:
        _check_tree(c, where)


def _check_ray(ray, where="ray"):
    if not isinstance(ray, dict):
        raise MalformedSpec(f"{where}: ray spec must be an object")
    unknown = set(ray) - {"attach", "pendant_path", "subray"}
    if unknown:
        raise MalformedSpec(f"{where}: unknown keys {sorted(unknown)}")
    if "attach" in ray and "pendant_path" in ray:
        raise MalformedSpec(f"{where}: use either attach or pendant_path")
    if "attach" in ray:
        pattern = ray["attach"]
        if not isinstance(pattern, list) or not pattern:
            raise MalformedSpec(f"{where}: attach must be a non-empty list")
        for i, trees in enumerate(pattern):
            if not isinstance(trees, list):
                raise MalformedSpec(f"{where}.attach[{i}] must be a list of trees")
            for t in trees:
                _check_tree(t, f"{where}.attach[{i}]")
    if "pendant_path" in ray:
        cap = ray["pendant_path"].get("cap") if isinstance(ray["pendant_path"], dict) else None
        if not isinstance(cap, int) or cap < 1:
            raise MalformedSpec(f"{where}: pendant_path needs an integer cap >= 1")
    if "subray" in ray:
        _check_ray(ray["subray"], where + ".subray")


def _path_tree(length):
    t = []
    for _ in range(length):
        t = [t]
    return t


def ray_attachments(ray: dict, position: int) -> list:
    """Finite trees hung at ray vertex ``position`` (>= 1)."""
    if "attach" in ray:
        pattern = ray["attach"]
        return pattern[(position - 1) % len(pattern)]
    if "pendant_path" in ray:
        return [_path_tree(min(position, ray["pendant_path"]["cap"]) - 1)]
    return []


def ray_max_attachment_height(ray: dict) -> int:
    if "attach" in ray:
        hs = [1 + _tree_height(t) for trees in ray["attach"] for t in trees]
        return max(hs, default=0)
    if "pendant_path" in ray:
        return ray["pendant_path"]["cap"]
    return 0


@dataclass(frozen=True, eq=False)
class FluteTree(GraphGenerator):
    """Tree with ``len(rays)`` infinite rays leaving the root.

    Vertex keys (tuples of naturals):
      ray vertex    (i, n)                 ray i, position n >= 1
      sub-ray vtx   (i, n, m, ...)         nested: sub-ray at ray vertex n, position m
      attachment    ray-key + (a, local)   a-th finite tree at that vertex,
                                            ``local`` its preorder index
    Every key is prefixed by its ray-nesting depth, and the tag
    distinguishes root (0), ray vertices (1) and attachment vertices (2).
    """

    spec: tuple  # tuple of JSON strings, one per ray
    family = "flute-tree"
    max_degree = 0

    def __post_init__(self):
        if not self.spec:
            raise MalformedSpec("flute tree needs at least one ray")
        for i, r in enumerate(self.rays):
            _check_ray(r, f"rays[{i}]")
        object.__setattr__(self, "max_degree", self._max_degree())

    @property
    def rays(self) -> list[dict]:
        return [json.loads(s) for s in self.spec]

    @property
    def parameters(self):
        return {"rays": self.rays}

    root = 0

    def _max_degree(self):
        best = len(self.spec)

        def tree_deg(t, has_parent):
            d = len(t) + has_parent
            return max([d] + [tree_deg(c, True) for c in t])

        def ray_deg(ray):
            extra = 1 if "subray" in ray else 0
            if "pendant_path" in ray:
                atts = [[_path_tree(ray["pendant_path"]["cap"] - 1)]]
            else:
                atts = ray.get("attach", [[]])
            d = max(2 + extra + len(trees) for trees in atts)
            for trees in atts:
                for t in trees:
                    d = max(d, tree_deg(t, True))
            if "subray" in ray:
                d = max(d, ray_deg(ray["subray"]))
            return d

        for r in self.rays:
            best = max(best, ray_deg(r))
        return best

    # keys ------------------------------------------------------------------

    @staticmethod
    def encode(key) -> int:
        tag, body = key
        if tag == 0:
            return 0
        return 4 * pack((len(body), pack(body))) + tag

    @staticmethod
    def decode(v: int):
        if v == 0:
            return (0, ())
        z, tag = divmod(v, 4)
        length, inner = unpack(z, 2)
        return (tag, unpack(inner, length))

    def ray_spec_at_depth(self, i, depth):
        ray = self.rays[i]
        for _ in range(depth):
            ray = ray["subray"]
        return ray

    def _vertex_ray(self, path):
        # path = (i, n1, n2, ..., nd): ray vertex on nesting level d-1
        return self.ray_spec_at_depth(path[0], len(path) - 2)

    def ray_vertex_neighbors(self, path):
        ray = self._vertex_ray(path)
        n = path[-1]
        out = []
        if n == 1:
            out.append((0, ()) if len(path) == 2 else (1, path[:-1]))
        else:
            out.append((1, path[:-1] + (n - 1,)))
        out.append((1, path[:-1] + (n + 1,)))
        if "subray" in ray:
            out.append((1, path + (1,)))
        for a, _ in enumerate(ray_attachments(ray, n)):
            out.append((2, path + (a, 0)))
        return out

    def _attachment_tree(self, path, a):
        return ray_attachments(self._vertex_ray(path), path[-1])[a]

    def attachment_neighbors(self, body):
        path, a, local = body[:-2], body[-2], body[-1]
        tree = self._attachment_tree(path, a)
        # preorder walk to find parent and children of ``local``
        parent_of, children_of, counter = {}, {}, [0]

        def walk(t, parent):
            me = counter[0]
            counter[0] += 1
            parent_of[me] = parent
            children_of[me] = []
            for c in t:
                children_of[me].append(counter[0])
                walk(c, me)

        walk(tree, None)
        if local not in parent_of:
            raise ValueError("attachment vertex out of range")
        out = []
        p = parent_of[local]
        out.append((1, path) if p is None else (2, path + (a, p)))
        out.extend((2, path + (a, c)) for c in children_of[local])
        return out

    def neighbors(self, v):
        tag, body = self.decode(v)
        if tag == 0:
            keys = [(1, (i, 1)) for i in range(len(self.spec))]
        elif tag == 1:
            keys = self.ray_vertex_neighbors(body)
        elif tag == 2:
            keys = self.attachment_neighbors(body)
        else:
            raise ValueError(f"{v} is not a flute-tree vertex id")
        return [self.encode(k) for k in keys]


def flute_tree(rays: list[dict]) -> FluteTree:
    if not isinstance(rays, list):
        raise MalformedSpec("flute tree spec must be a list of ray specs")
    return FluteTree(tuple(json.dumps(r, sort_keys=True) for r in rays))


# ---------------------------------------------------------------------------
# A finite graph given as a view (e.g. loaded from a graph file).


@dataclass(frozen=True, eq=False)
class FiniteGraph(GraphGenerator):
    view: GraphView
    _adj: dict = field(init=False, repr=False)

    def __post_init__(self):
        adj = {v: [] for v in self.view.vertices}
        for t, h in zip(self.view.tails, self.view.heads):
            adj[t].append(h)
            adj[h].append(t)
        object.__setattr__(self, "_adj", adj)

    @property
    def family(self):
        return self.view.family

    @property
    def parameters(self):
        return self.view.parameters

    @property
    def root(self):
        return self.view.root

    @property
    def max_degree(self):
        return max((len(a) for a in self._adj.values()), default=0)

    def neighbors(self, v):
        return list(self._adj[v])


def single_vertex() -> FiniteGraph:
    return FiniteGraph(GraphView.from_edges([0], [], family="point"))


FAMILIES = ("z1", "z2", "z3", "trivalent", "gm-flute", "flute-tree")


def make_generator(family: str, transform: str = "none", flute_spec=None) -> GraphGenerator:
    if family in ("z1", "z2", "z3"):
        gen = grid(int(family[1]))
    elif family == "trivalent":
        gen = trivalent_tree()
    elif family == "gm-flute":
        gen = gm_flute_graph()
    elif family == "flute-tree":
        gen = flute_tree(flute_spec if flute_spec is not None else [{}])
    else:
        raise ValueError(f"unknown family {family!r}")
    if transform == "t2":
        return transform_t2(gen)
    if transform == "t3":
        return transform_t3(gen)
    if transform not in ("none", None):
        raise ValueError(f"unknown transform {transform!r}")
    return gen
