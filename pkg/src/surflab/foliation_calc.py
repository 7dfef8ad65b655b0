"""Dirichlet integrals of the foliation building blocks and collar geometry.

Each piece carries the height function ``v`` whose level sets are the leaves;
the closed forms below are checked against :func:`quadrature_dirichlet`,
which integrates ``|grad v|^2`` with the midpoint rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

KINDS = ("rect", "corner", "parallelogram", "trapezoid")
_ALIASES = {"rectangle": "rect", "cornerrectangle": "corner", "corner_rectangle": "corner"}
_PARAMS = {
    "rect": ("a", "b", "c", "d"),
    "corner": ("a", "b", "c", "d"),
    "parallelogram": ("a", "b", "c"),
    "trapezoid": ("a", "a1", "D"),
}
# below this relative gap the trapezoid is evaluated by its series about a1 = a
_TRAPEZOID_SERIES_GAP = 1e-4


class InvalidPiece(ValueError):
    pass


@dataclass(frozen=True)
class FoliationPiece:
    """A planar piece with its leaf function.

    rect / corner: [a, b] x [c, d]; corner may carry an aspect bound ``C``.
    parallelogram: vertices (0,0), (a,0), (b,c), (b+a,c).
    trapezoid: 0 <= x <= D, 0 <= y <= a + (a1 - a) x / D.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        kind = _ALIASES.get(self.kind.lower(), self.kind.lower())
        if kind not in KINDS:
            raise InvalidPiece(f"unknown piece kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        p = {k: float(v) for k, v in self.params.items()}
        missing = [k for k in _PARAMS[kind] if k not in p]
        if missing:
            raise InvalidPiece(f"{kind} needs parameters {missing}")
        extra = set(p) - set(_PARAMS[kind]) - ({"C"} if kind == "corner" else set())
        if extra:
            raise InvalidPiece(f"unexpected parameters {sorted(extra)} for {kind}")
        if any(not math.isfinite(v) for v in p.values()):
            raise InvalidPiece("parameters must be finite")
        object.__setattr__(self, "params", p)
        self._check()

    def _check(self):
        p = self.params
        if self.kind in ("rect", "corner"):
            if not (p["b"] > p["a"] and p["d"] > p["c"]):
                raise InvalidPiece("need b > a and d > c")
            if self.kind == "corner" and "C" in p and p["C"] < self.aspect:
                raise InvalidPiece(f"aspect bound C={p['C']} below (d-c)/(b-a)={self.aspect}")
        elif self.kind == "parallelogram":
            if not (p["a"] > 0 and p["c"] > 0):
                raise InvalidPiece("need a > 0 and c > 0")
        else:
            if not (p["a"] > 0 and p["D"] > 0):
                raise InvalidPiece("need a > 0 and D > 0")
            if p["a1"] < p["a"]:
                raise InvalidPiece("need a1 >= a")

    @property
    def aspect(self) -> float:
        p = self.params
        return (p["d"] - p["c"]) / (p["b"] - p["a"])

    def area(self) -> float:
        p = self.params
        if self.kind in ("rect", "corner"):
            return (p["b"] - p["a"]) * (p["d"] - p["c"])
        if self.kind == "parallelogram":
            return p["a"] * p["c"]
        return 0.5 * (p["a"] + p["a1"]) * p["D"]


def piece(kind: str, **params) -> FoliationPiece:
    return FoliationPiece(kind, params)


def _require(pc: FoliationPiece, kind: str):
    if pc.kind != kind:
        raise InvalidPiece(f"expected a {kind} piece, got {pc.kind}")


# ---------------------------------------------------------------------------
# Closed forms


def rect_dirichlet(pc: FoliationPiece) -> float:
    """v = y: the energy is the area."""
    _require(pc, "rect")
    return pc.area()


def corner_dirichlet(pc: FoliationPiece) -> tuple[float, float]:
    """v = y - s (x - a) with s = (d-c)/(b-a).

    Returns ``(energy, s)``; ``s`` is the factor by which the transverse
    measure on the top side scales.
    """
    _require(pc, "corner")
    s = pc.aspect
    return (1.0 + s * s) * pc.area(), s


def parallelogram_dirichlet(pc: FoliationPiece) -> float:
    """v = y on the sheared piece: energy a c for every shear b."""
    _require(pc, "parallelogram")
    return pc.params["a"] * pc.params["c"]


def trapezoid_dirichlet(pc: FoliationPiece) -> float:
    """v = a y / (a + s x) with s = (a1 - a)/D.

    Energy a^2 D/(a1-a) ln(a1/a) + a^2 (a1-a)/(3D) ln(a1/a); the first term
    tends to a D as a1 -> a, which is the value returned there.
    """
    _require(pc, "trapezoid")
    a, a1, D = pc.params["a"], pc.params["a1"], pc.params["D"]
    gap = (a1 - a) / a
    log_ratio = math.log1p(gap)
    second = a * a * (a1 - a) / (3 * D) * log_ratio
    if gap < _TRAPEZOID_SERIES_GAP:
        # ln(1+g)/g = 1 - g/2 + g^2/3 - g^3/4 + ...
        first = a * D * (1 - gap / 2 + gap * gap / 3 - gap ** 3 / 4)
    else:
        first = a * a * D / (a1 - a) * log_ratio
    return first + second


def closed_form(pc: FoliationPiece) -> float:
    if pc.kind == "rect":
        return rect_dirichlet(pc)
    if pc.kind == "corner":
        return corner_dirichlet(pc)[0]
    if pc.kind == "parallelogram":
        return parallelogram_dirichlet(pc)
    return trapezoid_dirichlet(pc)


# ---------------------------------------------------------------------------
# Midpoint quadrature of |grad v|^2


def _midpoints(lo, hi, n):
    h = (hi - lo) / n
    return lo + h * (np.arange(n) + 0.5), h


def quadrature_dirichlet(pc: FoliationPiece, grid_n: int = 256) -> float:
    """Midpoint rule on a grid_n x grid_n grid fitted to the piece.

    Rectangles use a plain tensor grid.  The parallelogram is sliced into
    grid_n rows, each an exact horizontal segment; the trapezoid into grid_n
    columns, each an exact vertical segment.  The integrand is evaluated from
    the analytic gradient of v.
    """
    if grid_n < 16:
        raise ValueError("grid_n must be >= 16")
    p = pc.params
    if pc.kind in ("rect", "corner"):
        xs, hx = _midpoints(p["a"], p["b"], grid_n)
        ys, hy = _midpoints(p["c"], p["d"], grid_n)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        s = pc.aspect if pc.kind == "corner" else 0.0
        vx = np.full_like(X, -s)
        vy = np.ones_like(Y)
        return float(np.sum(vx * vx + vy * vy) * hx * hy)
    if pc.kind == "parallelogram":
        a, b, c = p["a"], p["b"], p["c"]
        ys, hy = _midpoints(0.0, c, grid_n)
        total = 0.0
        for y in ys:
            # row from x = b y / c to b y / c + a
            xs, hx = _midpoints(b * y / c, b * y / c + a, grid_n)
            vx, vy = np.zeros_like(xs), np.ones_like(xs)
            total += float(np.sum(vx * vx + vy * vy)) * float(hx) * hy
        return float(total)
    a, a1, D = p["a"], p["a1"], p["D"]
    s = (a1 - a) / D
    xs, hx = _midpoints(0.0, D, grid_n)
    heights = a + s * xs
    u = (np.arange(grid_n) + 0.5) / grid_n
    Y = heights[:, None] * u[None, :]
    H = heights[:, None]
    vx = -a * s * Y / H ** 2
    vy = a / H
    cell = (hx * heights / grid_n)[:, None]
    return float(np.sum((vx * vx + vy * vy) * cell))


def compare(pc: FoliationPiece, grid_n: int = 2048) -> dict:
    cf = closed_form(pc)
    q = quadrature_dirichlet(pc, grid_n)
    out = {
        "piece": pc.kind,
        "params": pc.params,
        "closed_form": cf,
        "quadrature": q,
        "grid_n": grid_n,
        "abs_diff": abs(cf - q),
        "rel_diff": abs(cf - q) / abs(cf) if cf else abs(q),
    }
    if pc.kind == "corner":
        out["transverse_scale"] = pc.aspect
    return out


# ---------------------------------------------------------------------------
# Collar geometry in the upper half-plane


@dataclass(frozen=True)
class CollarGeometry:
    """Band between the geodesics through i and e^l i, seen at distance t from the imaginary axis."""

    length: float
    t: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("length must be positive")
        if not self.t >= 0:
            raise ValueError("t must be nonnegative")

    @property
    def angle(self) -> float:
        return collar_angle(self.t)

    @property
    def strip(self) -> float:
        return strip_length(self.length, self.t)


def collar_angle(t: float) -> float:
    """Euclidean angle at 0 between the imaginary axis and the curve at distance t.

    arccos(1/cosh t), computed as atan(sinh t) to stay accurate near t = 0.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    return math.atan(math.sinh(t)) if t < 700 else math.pi / 2


def strip_length(length: float, t: float) -> float:
    """Hyperbolic length of the equidistant curve inside the band: length * cosh t."""
    if not length > 0:
        raise ValueError("length must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    return length * math.cosh(t)


def strip_length_quadrature(length: float, t: float) -> float:
    """Integrate |dz| / Im z along z(s) = s exp(i (pi/2 - theta)), 1 <= s <= e^length."""
    theta = collar_angle(t)
    direction = complex(math.cos(math.pi / 2 - theta), math.sin(math.pi / 2 - theta))

    def density(s):
        z = s * direction
        return abs(direction) / z.imag

    val, _ = integrate.quad(density, 1.0, math.exp(length), epsabs=0, epsrel=1e-13, limit=200)
    return val
