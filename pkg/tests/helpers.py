"""Random finite graphs for property tests."""
import numpy as np

from surflab.graph_core import GraphView


def random_connected_view(seed: int, n: int, extra: int = None, loops: int = 0,
                          boundary_frac: float = 0.2) -> GraphView:
    """Random spanning tree plus extra edges (multi-edges allowed) and loops."""
    rng = np.random.default_rng(seed)
    ids = rng.choice(10 * n + 10, size=n, replace=False)
    edges = [(int(ids[i]), int(ids[rng.integers(0, i)])) for i in range(1, n)]
    extra = n // 2 if extra is None else extra
    for _ in range(extra):
        a, b = rng.integers(0, n, size=2)
        if a != b:
            edges.append((int(ids[a]), int(ids[b])))
    for _ in range(loops):
        a = int(ids[rng.integers(0, n)])
        edges.append((a, a))
    k = max(1, int(boundary_frac * n)) if n > 1 else 0
    bnd = [int(v) for v in rng.choice(ids[1:], size=min(k, n - 1), replace=False)] if n > 1 else []
    return GraphView.from_edges([int(v) for v in ids], edges, bnd, root=int(ids[0]))
