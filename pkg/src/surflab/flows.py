"""Explicit flows: harmonic base flows, the T3 lift, the T2 projection and tree flows."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .generators import (
    GMFlute,
    Grid,
    Transformed,
    grid,
    tree_corners,
    tree_depth,
    tree_parent,
    trivalent_tree,
)
from .graph_core import GraphGenerator, GraphView, boundary_shell, build_truncation
from .potential_theory import divergence, net_inflow, solve_dirichlet


class OrientationMismatch(ValueError):
    pass


class NotDivergenceFree(ValueError):
    pass


def base_flow(gen: GraphGenerator, radius: int, tol: float = 1e-12):
    """Unit current from the root to the radius-``radius`` shell.

    Returns ``(view, flow, r_eff)``; ``flow`` is the Dirichlet current, so its
    energy equals ``r_eff``.
    """
    if radius < 2:
        raise ValueError("radius must be >= 2")
    view = build_truncation(gen, radius)
    sol = solve_dirichlet(view, gen.root, boundary_shell(view), tol=tol)
    return view, sol.current, sol.r_eff


def _check_divergence_free(view, flow, source, tol):
    div = divergence(view, flow)
    mask = view.interior_mask()
    mask[view.idx(source)] = False
    worst = float(np.max(np.abs(div[mask]))) if mask.any() else 0.0
    if worst > tol:
        raise NotDivergenceFree(f"base flow divergence {worst:.3e} exceeds {tol:.1e}")


def _canonical_getter(grid_gen: Grid, view: GraphView, flow):
    """Value of a grid edge in its positive coordinate direction."""
    lookup = view.edge_lookup()

    def value(lo: int, hi: int) -> float:
        key = (min(lo, hi), max(lo, hi))
        if key not in lookup:
            raise KeyError(f"grid edge {key} is not covered by the base view")
        v = flow[lookup[key]]
        return v if key[0] == lo else -v

    return value


# ---------------------------------------------------------------------------
# T3


def t3_cluster_values(e3, e4, e5, e6):
    """Values on the new edges (f, g, h) of a T3 cluster from its grid edges.

    ``e4, e5, e6`` are the incoming -x, -y, -z edges and ``e3`` the outgoing
    +z edge, all measured in the positive coordinate direction.
    """
    f = e6 + e5
    g = f + e4
    h = g - e3
    return f, g, h


def lift_flow_t3(base_view: GraphView, flow, t3_view: GraphView, tol: float = 1e-9,
                 source: int | None = None) -> np.ndarray:
    """Lift a grid(3) edge function to a truncation of the T3 pants graph."""
    gen = Transformed(grid(3), "t3")
    if t3_view.family != gen.family:
        raise OrientationMismatch(f"expected a {gen.family} view, got {t3_view.family}")
    source = base_view.root if source is None else source
    _check_divergence_free(base_view, flow, source, tol)
    base = gen.base
    value = _canonical_getter(base, base_view, flow)
    step = lambda p, axis, s: base.vertex(tuple(c + (s if i == axis else 0) for i, c in enumerate(p)))

    cache: dict[int, tuple] = {}

    def cluster(bv):
        if bv not in cache:
            p = base.coords(bv)
            e3 = value(bv, step(p, 2, +1))
            e4 = value(step(p, 0, -1), bv)
            e5 = value(step(p, 1, -1), bv)
            e6 = value(step(p, 2, -1), bv)
            f, g, h = t3_cluster_values(e3, e4, e5, e6)
            cache[bv] = {"f": f, "g": g, "h": h}
        return cache[bv]

    out = np.empty(t3_view.n_edges)
    for e, (t, h) in enumerate(zip(t3_view.tails, t3_view.heads)):
        try:
            role = gen.edge_role(t, h)
        except ValueError as exc:
            raise OrientationMismatch(str(exc)) from None
        if role[0] == "internal":
            out[e] = cluster(role[1])[role[2]]
        else:
            _, lo, hi, _axis = role
            canon = value(lo, hi)
            # canonical direction runs from cluster ``lo`` to cluster ``hi``
            out[e] = canon if gen.split(t)[0] == lo else -canon
    return out


# ---------------------------------------------------------------------------
# T2


def lift_flow_t2(base_view: GraphView, flow, t2_view: GraphView) -> np.ndarray:
    """Natural reverse of :func:`project_flow_t2`: grid values are copied and
    each connecting edge ``v_a -> v_b`` carries what balances ``v_b``, so any
    grid divergence lands on ``v_a`` (the T2 root slot)."""
    gen = Transformed(grid(2), "t2")
    base = gen.base
    value = _canonical_getter(base, base_view, flow)
    out = np.empty(t2_view.n_edges)
    for e, (t, h) in enumerate(zip(t2_view.tails, t2_view.heads)):
        role = gen.edge_role(t, h)
        if role[0] == "internal":
            bv = role[1]
            p = base.coords(bv)
            west = value(base.vertex((p[0] - 1, p[1])), bv)
            south = value(base.vertex((p[0], p[1] - 1)), bv)
            out[e] = -(west + south)
        else:
            _, lo, hi, _ = role
            canon = value(lo, hi)
            out[e] = canon if gen.split(t)[0] == lo else -canon
    return out


@dataclass
class ConsistencyReport:
    clusters: list = field(default_factory=list)
    flagged: list = field(default_factory=list)
    max_interior_divergence: float = 0.0
    source_flux: float = 0.0

    def to_dict(self):
        return {
            "flagged": self.flagged,
            "checked_clusters": len(self.clusters),
            "max_interior_divergence": self.max_interior_divergence,
            "source_flux": self.source_flux,
        }


def project_flow_t2(t2_view: GraphView, pants_flow, source: int | None = None,
                    tol: float = 1e-9):
    """Push a T2 edge function down to the square grid.

    Returns ``(grid_view, grid_flow, report)``.  Each grid edge gets the value
    of its image; the report lists, per fully interior cluster, the
    imbalance at its two vertices (the connecting-edge relation) and flags
    clusters whose non-source vertices are out of balance.
    """
    gen = Transformed(grid(2), "t2")
    source = t2_view.root if source is None else source
    pants_flow = np.asarray(pants_flow, dtype=float)
    inflow = net_inflow(t2_view, pants_flow)
    interior = dict(zip(t2_view.vertices, t2_view.interior_mask()))

    clusters: dict[int, list[int]] = {}
    for v in t2_view.vertices:
        clusters.setdefault(gen.split(v)[0], []).append(v)

    grid_edges = {}
    for e, (t, h) in enumerate(zip(t2_view.tails, t2_view.heads)):
        role = gen.edge_role(t, h)
        if role[0] == "grid":
            _, lo, hi, _ = role
            canon = pants_flow[e] if gen.split(t)[0] == lo else -pants_flow[e]
            a, b = min(lo, hi), max(lo, hi)
            grid_edges[(a, b)] = canon if a == lo else -canon

    report = ConsistencyReport()
    full_interior = set()
    for bv, members in sorted(clusters.items()):
        if len(members) < 2 or not all(interior[m] for m in members):
            continue
        full_interior.add(bv)
        res = {m: float(inflow[t2_view.idx(m)]) for m in members}
        bad = any(abs(r) > tol for m, r in res.items() if m != source)
        entry = {"cluster": bv, "residuals": {str(m): r for m, r in res.items()},
                 "contains_source": source in members, "ok": not bad}
        report.clusters.append(entry)
        if bad:
            report.flagged.append(bv)

    verts = sorted(clusters)
    bnd = [v for v in verts if v not in full_interior]
    grid_view = GraphView.from_edges(verts, list(grid_edges), bnd, family="z2",
                                     parameters={"dimension": 2}, radius=-1,
                                     root=gen.split(source)[0])
    lookup = grid_view.edge_lookup()
    grid_flow = np.zeros(grid_view.n_edges)
    for key, val in grid_edges.items():
        grid_flow[lookup[key]] = val

    gdiv = divergence(grid_view, grid_flow)
    mask = grid_view.interior_mask()
    s = grid_view.idx(grid_view.root)
    mask[s] = False
    report.max_interior_divergence = float(np.max(np.abs(gdiv[mask]))) if mask.any() else 0.0
    report.source_flux = float(-net_inflow(grid_view, grid_flow)[s])
    return grid_view, grid_flow, report


# ---------------------------------------------------------------------------
# Trees


def tree_edge_value(level: int, exact: bool = False):
    """Uniform flow on an edge entering tree level ``level >= 1``."""
    if exact:
        return Fraction(1, 3 * 2 ** (level - 1))
    return 1.0 / (3 * 2 ** (level - 1))


def uniform_tree_flow(radius: int, exact: bool = False):
    """Root sends 1 split evenly over 3 edges; each vertex halves to its children.

    Returns ``(view, flow)``; with ``exact=True`` the values are Fractions.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    view = build_truncation(trivalent_tree(), radius)
    vals = [tree_edge_value(tree_depth(h), exact) for h in view.heads]
    flow = np.array(vals, dtype=object if exact else float)
    return view, flow


def gm_flute_tree_flow(radius: int):
    """Uniform tree flow rerouted through the gm-flute graph.

    A tree edge p -> w with value x becomes the two paths p -> b -> w through
    the barycenters of the two bottom triangles on that edge, each carrying
    x / 2.  Energy per tree edge is unchanged (4 * (x/2)^2 = x^2).
    """
    gen = GMFlute()
    view = build_truncation(gen, radius)
    lookup = view.edge_lookup()
    flow = np.zeros(view.n_edges)
    for v in view.vertices:
        key = gen.decode(v)
        if key[0] != "t" or key[1] == 0:
            continue
        w = key[1]
        p = tree_parent(w)
        x = tree_edge_value(tree_depth(w))
        for face, pos in tree_corners(w)[1:]:
            sq = pos - 1 if pos > 0 else pos
            b = gen.encode(("b", face, sq, 0, 0))
            for a, c in ((gen.encode(("t", p)), b), (b, v)):
                k = (min(a, c), max(a, c))
                if k in lookup:
                    flow[lookup[k]] += x / 2 if k[0] == a else -x / 2
    return view, flow
