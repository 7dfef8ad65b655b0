"""Recurrence/transience verdicts: resistance profiles, flow certificates, tree ends."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .generators import FluteTree, Transformed, ray_attachments, transform_view
from .graph_core import GraphGenerator, GraphView, boundary_shell, build_truncation
from .potential_theory import divergence, net_inflow, solve_dirichlet

log = logging.getLogger(__name__)

RECURRENT, TRANSIENT, INCONCLUSIVE = "Recurrent", "Transient", "Inconclusive"
DEFAULT_TOL = 0.02
MIN_R2 = 0.99
MIN_DOUBLINGS = 3


class ProfileTooShort(ValueError):
    pass


class NotATree(ValueError):
    pass


class InconsistentEndSpec(ValueError):
    pass


@dataclass
class TypeVerdict:
    verdict: str
    method: str
    evidence: dict = field(default_factory=dict)

    @property
    def definite(self) -> bool:
        return self.verdict != INCONCLUSIVE

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "method": self.method, "evidence": self.evidence}


# ---------------------------------------------------------------------------
# Resistance profiles


def truncate(gen: GraphGenerator, radius: int, exhaustion: str = "auto") -> GraphView:
    """Finite piece of ``gen`` at scale ``radius``.

    ``ball`` is the graph-distance ball.  ``cluster`` (transformed grids only)
    replaces every vertex of the base-grid ball by its cluster, so the radius
    is measured in grid units.  ``auto`` picks ``cluster`` for transformed
    grids and ``ball`` otherwise.
    """
    if exhaustion == "auto":
        exhaustion = "cluster" if isinstance(gen, Transformed) else "ball"
    if exhaustion == "ball":
        return build_truncation(gen, radius)
    if exhaustion == "cluster":
        if not isinstance(gen, Transformed):
            raise ValueError("cluster exhaustion needs a transformed grid")
        return transform_view(build_truncation(gen.base, radius), gen.kind)
    raise ValueError(f"unknown exhaustion {exhaustion!r}")


def resolve_exhaustion(gen, exhaustion="auto") -> str:
    if exhaustion == "auto":
        return "cluster" if isinstance(gen, Transformed) else "ball"
    return exhaustion


def resistance_profile(gen: GraphGenerator, radii, exhaustion: str = "auto",
                       tol: float = 1e-12) -> list[tuple[int, float]]:
    """Effective resistance from the root to the boundary shell at each radius."""
    radii = [int(r) for r in radii]
    if not radii or radii[0] < 1 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing and >= 1")
    out = []
    for r in radii:
        view = truncate(gen, r, exhaustion)
        sol = solve_dirichlet(view, view.root, boundary_shell(view), tol=tol)
        log.info("radius %d: %d vertices, r_eff %.8f", r, view.n_vertices, sol.r_eff)
        out.append((r, sol.r_eff))
    for (r0, a), (r1, b) in zip(out, out[1:]):
        if b < a - 1e-9 * max(1.0, abs(a)):
            raise AssertionError(f"resistance dropped from {a} at {r0} to {b} at {r1}")
    return out


def log_fit(radii, values) -> dict:
    """Least-squares fit values = a + b ln(radius)."""
    x = np.log(np.asarray(radii, dtype=float))
    y = np.asarray(values, dtype=float)
    b, a = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (a + b * x)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return {"model": "a + b*ln(R)", "intercept": float(a), "slope": float(b), "r2": r2}


def classify(profile, tol: float = DEFAULT_TOL) -> TypeVerdict:
    """Numerical verdict from a resistance profile over roughly doubling radii."""
    if len(profile) < 3:
        raise ProfileTooShort(f"need at least 3 radii, got {len(profile)}")
    radii = [float(r) for r, _ in profile]
    vals = [float(v) for _, v in profile]
    ratios = [b / a for a, b in zip(radii, radii[1:])]
    if any(not 1.5 <= q <= 2.5 for q in ratios):
        raise ValueError(f"radii must roughly double, got ratios {ratios}")
    inc = [b - a for a, b in zip(vals, vals[1:])]
    rel_last = inc[-1] / vals[-1] if vals[-1] > 0 else float("inf")
    fit = log_fit(radii, vals)
    ev = {
        "profile": [[r, v] for r, v in profile],
        "increments": inc,
        "relative_last_increment": rel_last,
        "tol": tol,
        "fit": fit,
        "numerical": True,
    }
    if rel_last < tol:
        ev["reason"] = "last per-doubling increment below tol * r_eff"
        return TypeVerdict(TRANSIENT, "resistance-profile", ev)
    # per-doubling floor: half the fitted increment over that doubling
    floor = [0.5 * fit["slope"] * np.log(q) for q in ratios]
    ev["increment_floor"] = floor
    if (len(ratios) >= MIN_DOUBLINGS and fit["slope"] > 0 and fit["r2"] >= MIN_R2
            and all(d >= f for d, f in zip(inc, floor))):
        ev["reason"] = "logarithmic growth with increments bounded below"
        return TypeVerdict(RECURRENT, "resistance-profile", ev)
    ev["reason"] = "neither the transience nor the log-growth test fired"
    return TypeVerdict(INCONCLUSIVE, "resistance-profile", ev)


# ---------------------------------------------------------------------------
# Flow certificates


def partial_energies(view: GraphView, flow, source: int) -> list[float]:
    """E_r = energy of the flow on edges with both ends within distance r of ``source``."""
    dist = view.distances(source)
    big = max(dist.values()) + 1
    reach = np.array([max(dist.get(t, big), dist.get(h, big))
                      for t, h in zip(view.tails, view.heads)], dtype=np.int64)
    sq = np.array([float(x) * float(x) for x in flow])
    per = np.bincount(reach, weights=sq, minlength=big + 1)
    return list(np.cumsum(per)[1:big])


def geometric_tail(increments, max_lag: int = 4, q_max: float = 0.9):
    """Bound on the sum of the unseen increments when the tail decays geometrically.

    For each lag L the last half of the increments must satisfy
    d[r + L] <= q d[r] with a common q <= q_max; the unseen tail is then at
    most (sum of the last L increments) * q / (1 - q).  Returns
    ``(bound, q, lag)`` or ``None``.
    """
    d = np.asarray(increments, dtype=float)
    for lag in range(1, max_lag + 1):
        start = len(d) // 2
        pairs = [(d[r], d[r + lag]) for r in range(start, len(d) - lag)]
        if len(pairs) < 2:
            continue
        if any(a <= 0 for a, _ in pairs):
            continue
        q = max(b / a for a, b in pairs)
        if q <= q_max:
            tail = float(np.sum(d[-lag:])) * q / (1 - q)
            return tail, float(q), lag
    return None


def verify_flow_certificate(gen: GraphGenerator | None, flow, source: int, radius: int | None = None,
                            tol: float = 1e-10, energy_bound: float | None = None,
                            view: GraphView | None = None) -> TypeVerdict:
    """Check a flow witnessing transience on a truncation.

    The flow lives on ``view`` (built as the ``radius`` ball of ``gen`` when
    not given).  Transient needs zero divergence at interior non-source
    vertices, nonzero source flux, and sub-ball energies that either decay
    geometrically or stay below ``energy_bound`` (per unit source flux).
    Otherwise the verdict is Inconclusive.
    """
    if view is None:
        if gen is None or radius is None:
            raise ValueError("need a view or a generator and radius")
        view = build_truncation(gen, radius)
    flow = np.asarray(flow)
    if len(flow) != view.n_edges:
        raise ValueError(f"flow has {len(flow)} values, view has {view.n_edges} edges")
    exact = flow.dtype == object and any(isinstance(x, Fraction) for x in flow)
    if not exact:
        flow = flow.astype(float)
        if np.any(~np.isfinite(flow)):
            raise ValueError("flow is not defined on every edge")

    s = view.idx(source)
    div = divergence(view, flow)
    mask = view.interior_mask()
    mask[s] = False
    if exact:
        worst = max((abs(x) for x in div[mask]), default=Fraction(0))
        div_ok = worst == 0
        worst = float(worst)
    else:
        worst = float(np.max(np.abs(div[mask]))) if mask.any() else 0.0
        div_ok = worst <= tol
    flux = -net_inflow(view, flow)[s]
    flux_f = float(flux)
    energies = partial_energies(view, flow, source)
    inc = [b - a for a, b in zip([0.0] + energies[:-1], energies)]
    ev = {
        "radius": view.radius,
        "source": source,
        "max_interior_divergence": worst,
        "divergence_ok": bool(div_ok),
        "source_flux": flux_f,
        "exact": exact,
        "partial_energies": energies,
    }
    if not div_ok:
        ev["reason"] = "flow is not divergence free away from the source"
        return TypeVerdict(INCONCLUSIVE, "flow-certificate", ev)
    if abs(flux_f) <= tol:
        ev["reason"] = "zero source flux"
        return TypeVerdict(INCONCLUSIVE, "flow-certificate", ev)
    unit = energies[-1] / flux_f ** 2 if energies else 0.0
    ev["unit_flux_energy"] = unit
    if energy_bound is not None:
        ev["energy_bound_supplied"] = energy_bound
        if all(e / flux_f ** 2 <= energy_bound * (1 + 1e-12) for e in energies):
            ev["energy_bound"] = energy_bound
            ev["reason"] = "divergence free, nonzero flux, energy capped by the supplied bound"
            return TypeVerdict(TRANSIENT, "flow-certificate", ev)
    tail = geometric_tail(inc)
    if tail is not None:
        bound, q, lag = tail
        ev.update(decay_ratio=q, decay_lag=lag, tail_bound=bound / flux_f ** 2,
                  energy_bound=unit + bound / flux_f ** 2)
        ev["reason"] = "divergence free, nonzero flux, geometrically decaying energy"
        return TypeVerdict(TRANSIENT, "flow-certificate", ev)
    ev["reason"] = "energy increments neither decay geometrically nor respect a bound"
    return TypeVerdict(INCONCLUSIVE, "flow-certificate", ev)


# ---------------------------------------------------------------------------
# Tree ends: zero propagation for l2 flows with a single source.
#
# A trace is a list of steps.  Each step forces edges to zero from edges
# already known to be zero:
#   {"rule": "leaf", "vertex": y, "edge": [y, z]}
#       every other edge at y (a non-source vertex) is zero, so the last one
#       is too (divergence at y vanishes);
#   {"rule": "ray", "vertices": [...], "edges": [[a, b], ...], "level": d}
#       each listed vertex has exactly two nonzero edges, both on the ray, so
#       |u| is constant along the whole ray; constant and square summable
#       means zero.  Premises are checked at ray vertices inside the view;
#       a sub-ray hanging off a shell vertex lists no vertices and only its
#       first edge.


def _edge(a, b):
    return (a, b) if a <= b else (b, a)


def _check_tree(view: GraphView):
    if view.n_edges != view.n_vertices - 1 or any(t == h for t, h in zip(view.tails, view.heads)):
        raise NotATree("truncation has a cycle")
    if len(view.distances(view.vertices[0])) != view.n_vertices:
        raise NotATree("truncation is disconnected")


def _explore(gen, start, avoid):
    """All vertices of the finite branch at ``start`` hanging away from ``avoid``."""
    order, parent = [start], {start: avoid}
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for w in gen.neighbors(v):
            if w != parent[v]:
                if w in parent:
                    raise NotATree("cycle inside a finite attachment")
                parent[w] = v
                order.append(w)
                if len(order) > 100_000:
                    raise InconsistentEndSpec("attachment is not finite")
    return order, parent


def tree_end_trace(gen: FluteTree, radius: int) -> tuple[GraphView, list[dict]]:
    view = build_truncation(gen, radius)
    _check_tree(view)
    steps: list[dict] = []
    source = gen.root

    # 1. finite attachments at every visible ray vertex, leaves first
    ray_vertices = []
    for v in view.vertices:
        tag, body = gen.decode(v)
        if tag == 1:
            ray_vertices.append((len(body), body, v))
    for _, body, v in sorted(ray_vertices):
        for a, _t in enumerate(ray_attachments(gen._vertex_ray(body), body[-1])):
            start = gen.encode((2, body + (a, 0)))
            order, parent = _explore(gen, start, v)
            for y in reversed(order):
                steps.append({"rule": "leaf", "vertex": y, "edge": list(_edge(y, parent[y]))})

    # 2. rays, innermost nesting level first
    rays: dict[tuple, list] = {}
    for depth, body, v in ray_vertices:
        rays.setdefault(body[:-1], []).append((body[-1], v))
        if "subray" in gen._vertex_ray(body):
            # sub-rays of shell vertices start outside the view
            rays.setdefault(body, [])
    for prefix in sorted(rays, key=lambda p: (-len(p), p)):
        members = sorted(rays[prefix])
        if [n for n, _ in members] != list(range(1, len(members) + 1)):
            raise InconsistentEndSpec(f"ray {prefix} is not a contiguous path")
        base = source if len(prefix) == 1 else gen.encode((1, prefix))
        path = [base] + [v for _, v in members]
        if not members:
            path.append(gen.encode((1, prefix + (1,))))
        steps.append({
            "rule": "ray",
            "ray": list(prefix),
            "level": len(prefix) - 1,
            "vertices": [v for _, v in members],
            "edges": [list(_edge(a, b)) for a, b in zip(path, path[1:])],
        })
    return view, steps


def replay_trace(gen: GraphGenerator, view: GraphView, trace, source: int) -> dict:
    """Re-derive every forcing step; report whether all view edges end up zero."""
    zero: set[tuple[int, int]] = set()
    problems = []

    def nonzero_edges(v):
        return [_edge(v, w) for w in gen.neighbors(v) if _edge(v, w) not in zero]

    for i, st in enumerate(trace):
        if st["rule"] == "leaf":
            y, e = st["vertex"], tuple(st["edge"])
            if y == source:
                problems.append(f"step {i}: leaf rule at the source")
                continue
            if nonzero_edges(y) != [e]:
                problems.append(f"step {i}: {y} has nonzero edges {nonzero_edges(y)}")
                continue
            zero.add(e)
        elif st["rule"] == "ray":
            edges = [tuple(e) for e in st["edges"]]
            ok = True
            for k, v in enumerate(st["vertices"]):
                nz = set(nonzero_edges(v))
                on_ray = {edges[k]} | ({edges[k + 1]} if k + 1 < len(edges) else set())
                if v == source or len(nz) != 2 or not on_ray <= nz:
                    problems.append(f"step {i}: ray vertex {v} has nonzero edges {sorted(nz)}")
                    ok = False
                    break
            if ok:
                zero.update(edges)
        else:
            problems.append(f"step {i}: unknown rule {st['rule']!r}")
    edges = {(t, h) for t, h in zip(view.tails, view.heads)}
    left = sorted(edges - zero)
    return {"ok": not problems and not left, "problems": problems,
            "unforced_edges": [list(e) for e in left[:20]], "forced": len(zero & edges),
            "edges": len(edges)}


def tree_end_certificate(gen: GraphGenerator, end_spec=None, radius: int = 8) -> TypeVerdict:
    """Recurrence of a flute tree by zero propagation of l2 unit flows.

    ``end_spec`` (a list of ray specs) must match the generator; it defaults
    to the generator's own spec.  The trace is built on the ``radius`` ball
    and checked by :func:`replay_trace` before the verdict is returned.
    """
    if not isinstance(gen, FluteTree):
        raise InconsistentEndSpec(f"no end structure known for family {gen.family!r}")
    if end_spec is not None:
        canon = [json.loads(json.dumps(r, sort_keys=True)) for r in end_spec]
        if canon != gen.rays:
            raise InconsistentEndSpec("end_spec does not match the generator")
    view, trace = tree_end_trace(gen, radius)
    check = replay_trace(gen, view, trace, gen.root)
    if not check["ok"]:
        raise AssertionError(f"trace failed replay: {check['problems'][:3]}")
    depth = max(_ray_depth(r) for r in gen.rays)
    ev = {
        "radius": radius,
        "ends": len(gen.rays),
        "nesting_depth": depth,
        "steps": len(trace),
        "leaf_steps": sum(s["rule"] == "leaf" for s in trace),
        "ray_steps": sum(s["rule"] == "ray" for s in trace),
        "replay": check,
        "trace": trace,
        "reason": "every edge of the truncation is forced to zero for l2 unit flows",
    }
    return TypeVerdict(RECURRENT, "tree-ends", ev)


def _ray_depth(ray) -> int:
    return 1 + (_ray_depth(ray["subray"]) if "subray" in ray else 0)
