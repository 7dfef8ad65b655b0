"""Train tracks, switch-respecting weights and l2 tests on them.

Weights may be floats or exact rationals (``fractions.Fraction``; JSON
strings such as ``"1/3"`` are read exactly).  An infinite weight system is a
finite window of explicit weights plus an optional tail description for the
branches beyond the window, enumerated k = N+1, N+2, ... after the N window
branches:

    {"kind": "upper_power", "c": c, "p": p}    w(e_k) <= c k^-p
    {"kind": "lower_power", "c": c, "p": p}    w(e_k) >= c k^-p  (c > 0)
    {"kind": "exact_power", "c": c, "p": p}    w(e_k)  = c k^-p
    {"kind": "geometric",   "c": c, "r": r}    w(e_k) <= c r^k   (0 <= r < 1)
    {"kind": "l2_tail_bound", "c": c, "q": q}  sum_{k>n} w(e_k)^2 <= c n^-q  for n >= N

``complete: true`` states that the window is the whole support.
"""
from __future__ import annotations

import json
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from pathlib import Path

import numpy as np

MEMBER, NON_MEMBER, UNKNOWN = "Member", "NonMember", "Unknown"
FLOAT_TOL = 1e-12
TAIL_KINDS = ("upper_power", "lower_power", "exact_power", "geometric", "l2_tail_bound")


class InvalidTrack(ValueError):
    pass


class MissingWeight(KeyError):
    pass


class SwitchViolation(ValueError):
    def __init__(self, violations):
        super().__init__(f"switch conditions fail at {[v['switch'] for v in violations]}")
        self.violations = violations


class CoverageError(ValueError):
    pass


def parse_number(x):
    """JSON number or "p/q" string -> int/Fraction/float (exact when possible)."""
    if isinstance(x, bool):
        raise TypeError("booleans are not weights")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def _is_exact(x) -> bool:
    return isinstance(x, Rational)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Switch:
    id: str
    side_a: tuple
    side_b: tuple


@dataclass
class TrainTrack:
    """Branches joined at switches; ``open_ends`` lists endpoints cut off by a finite window."""

    branches: list
    switches: list
    valence_bound: int
    open_ends: list = field(default_factory=list)

    def __post_init__(self):
        self.branches = [str(b) for b in self.branches]
        self.switches = [s if isinstance(s, Switch) else
                         Switch(str(s["id"]), tuple(map(str, s["side_a"])), tuple(map(str, s["side_b"])))
                         for s in self.switches]
        self.open_ends = [str(b) for b in self.open_ends]
        self.validate()

    def validate(self):
        known = set(self.branches)
        if len(known) != len(self.branches):
            raise InvalidTrack("duplicate branch ids")
        ends = Counter(self.open_ends)
        ids = set()
        for s in self.switches:
            if s.id in ids:
                raise InvalidTrack(f"duplicate switch id {s.id}")
            ids.add(s.id)
            if not s.side_a or not s.side_b:
                raise InvalidTrack(f"switch {s.id} has an empty side")
            if len(s.side_a) + len(s.side_b) > self.valence_bound:
                raise InvalidTrack(f"switch {s.id} exceeds valence bound {self.valence_bound}")
            for b in s.side_a + s.side_b:
                if b not in known:
                    raise InvalidTrack(f"switch {s.id} names unknown branch {b}")
                ends[b] += 1
        bad = [b for b in self.branches if ends[b] != 2]
        if bad:
            raise InvalidTrack(f"branches without exactly two endpoints: {bad[:10]}")
        unknown = set(self.open_ends) - known
        if unknown:
            raise InvalidTrack(f"open ends on unknown branches {sorted(unknown)[:10]}")

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainTrack":
        return cls(doc["branches"], doc["switches"], int(doc["valence_bound"]),
                   doc.get("open_ends", []))

    def to_dict(self) -> dict:
        return {
            "branches": list(self.branches),
            "switches": [{"id": s.id, "side_a": list(s.side_a), "side_b": list(s.side_b)}
                         for s in self.switches],
            "valence_bound": self.valence_bound,
            "open_ends": list(self.open_ends),
        }


@dataclass
class WeightSystem:
    weights: dict
    tail: dict | None = None
    complete: bool = False

    def __post_init__(self):
        self.weights = {str(k): parse_number(v) for k, v in self.weights.items()}
        for k, v in self.weights.items():
            if v < 0:
                raise ValueError(f"negative weight on branch {k}")
        if self.tail is not None:
            kind = self.tail.get("kind")
            if kind not in TAIL_KINDS:
                raise ValueError(f"unknown tail kind {kind!r}")
            if self.complete:
                raise ValueError("a complete weight system has no tail")

    @property
    def exact(self) -> bool:
        return all(_is_exact(v) for v in self.weights.values())

    @classmethod
    def from_dict(cls, doc: dict) -> "WeightSystem":
        doc = dict(doc)
        tail = doc.pop("tail", None)
        complete = bool(doc.pop("complete", False))
        weights = doc.pop("weights", doc)
        return cls(weights, tail, complete)

    def to_dict(self) -> dict:
        out = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.weights.items()}
        if self.tail is not None:
            out["tail"] = self.tail
        if self.complete:
            out["complete"] = True
        return out

    def scaled(self, c) -> "WeightSystem":
        return WeightSystem({k: c * v for k, v in self.weights.items()})

    def __add__(self, other: "WeightSystem") -> "WeightSystem":
        keys = set(self.weights) | set(other.weights)
        return WeightSystem({k: self.weights.get(k, 0) + other.weights.get(k, 0) for k in keys})


def load_track(path) -> TrainTrack:
    return TrainTrack.from_dict(json.loads(Path(path).read_text()))


def load_weights(path) -> WeightSystem:
    return WeightSystem.from_dict(json.loads(Path(path).read_text()))


def pants_template() -> TrainTrack:
    """Example track on a pair of pants shipped with the package."""
    path = Path(__file__).with_name("data") / "pants_template.json"
    return load_track(path)


# ---------------------------------------------------------------------------
# Switch conditions


def switch_violations(track: TrainTrack, w: WeightSystem) -> list[dict]:
    missing = [b for b in track.branches if b not in w.weights]
    if missing:
        raise MissingWeight(f"no weight for branches {missing[:10]}")
    out = []
    for s in track.switches:
        a = sum((w.weights[b] for b in s.side_a), start=0)
        b = sum((w.weights[b] for b in s.side_b), start=0)
        if _is_exact(a) and _is_exact(b):
            ok = a == b
        else:
            ok = abs(float(a) - float(b)) <= FLOAT_TOL * max(1.0, abs(float(a)), abs(float(b)))
        if not ok:
            out.append({"switch": s.id, "side_a_sum": str(a), "side_b_sum": str(b)})
    return out


def validate_switch_conditions(track: TrainTrack, w: WeightSystem) -> tuple[bool, list[dict]]:
    """(valid, violations); exact for rational weights, 1e-12 relative otherwise."""
    v = switch_violations(track, w)
    return not v, v


# ---------------------------------------------------------------------------
# l2 sums and membership


def l2_partial_sums(w, ordering=None):
    """Partial sums of squared weights along ``ordering``.

    ``w`` is a WeightSystem (``ordering`` lists its branches) or a plain
    sequence of weights.  Exact inputs give a list of Fractions.
    """
    if isinstance(w, WeightSystem):
        if ordering is None:
            ordering = list(w.weights)
        if set(ordering) != set(w.weights) or len(ordering) != len(w.weights):
            raise ValueError("ordering must enumerate every branch exactly once")
        vals = [w.weights[str(b)] for b in ordering]
    else:
        vals = w
    if not isinstance(vals, np.ndarray) and len(vals) and all(_is_exact(v) for v in vals):
        out, acc = [], Fraction(0)
        for v in vals:
            acc += Fraction(v) ** 2
            out.append(acc)
        return out
    arr = np.asarray(vals, dtype=float)
    return np.cumsum(arr * arr)


def _frac(x):
    return Fraction(x) if not isinstance(x, float) else Fraction(x).limit_denominator(10 ** 12)


def _tail_upper_bound(tail: dict, n: int):
    """Upper bound on sum_{k>n} w(e_k)^2, or None when the tail gives none."""
    kind = tail["kind"]
    if kind in ("upper_power", "exact_power"):
        c, p = _frac(tail["c"]), _frac(tail["p"])
        if 2 * p <= 1:
            return None
        # sum_{k>n} k^-2p <= int_n^inf x^-2p dx = n^(1-2p) / (2p - 1)
        return float(c * c) * float(max(n, 1)) ** float(1 - 2 * p) / float(2 * p - 1)
    if kind == "geometric":
        c, r = float(tail["c"]), float(tail["r"])
        if not 0 <= r < 1:
            return None
        return c * c * r ** (2 * (n + 1)) / (1 - r * r)
    if kind == "l2_tail_bound":
        return float(tail["c"]) * float(max(n, 1)) ** (-float(tail["q"]))
    return None


def _tail_diverges(tail: dict) -> bool:
    kind = tail["kind"]
    if kind in ("lower_power", "exact_power"):
        c, p = _frac(tail["c"]), _frac(tail["p"])
        return c > 0 and 2 * p <= 1
    return False


def ml_int_membership(track: TrainTrack, w: WeightSystem, tol: float = FLOAT_TOL) -> dict:
    """Decide whether sum of w(e)^2 over all branches is finite.

    Member for complete finite windows and summable tail bounds, NonMember for
    a tail bounded below by a non-square-summable power, Unknown otherwise.
    """
    ok, viol = validate_switch_conditions(track, w)
    if not ok:
        raise SwitchViolation(viol)
    window = l2_partial_sums(w, track.branches)
    window_sum = window[-1] if len(window) else 0
    n = len(track.branches)
    rep = {"window_branches": n, "window_l2": str(window_sum) if _is_exact(window_sum) else float(window_sum)}
    if w.complete:
        rep.update(result=MEMBER, reason="finite support", l2_upper_bound=rep["window_l2"])
        return rep
    if w.tail is None:
        rep.update(result=UNKNOWN, reason="finitely many samples and no tail bound")
        return rep
    rep["tail"] = w.tail
    if _tail_diverges(w.tail):
        rep.update(result=NON_MEMBER,
                   reason="tail bounded below by c k^-p with 2p <= 1 (harmonic comparison)")
        return rep
    bound = _tail_upper_bound(w.tail, n)
    if bound is not None:
        rep.update(result=MEMBER, reason="tail square sum bounded",
                   tail_l2_upper_bound=bound, l2_upper_bound=float(window_sum) + bound)
        return rep
    rep.update(result=UNKNOWN, reason="tail description decides nothing")
    return rep


def power_sequence(c, p, n: int, exact: bool = False):
    """w_k = c k^-p for k = 1..n."""
    if exact:
        c, p = Fraction(c), Fraction(p)
        if p.denominator != 1:
            raise ValueError("exact power sequences need an integer exponent")
        return [c / Fraction(k) ** int(p) for k in range(1, n + 1)]
    k = np.arange(1, n + 1, dtype=float)
    return float(c) * k ** (-float(p))


# ---------------------------------------------------------------------------
# Curves and intersection proxies


@dataclass
class Curve:
    id: str
    kind: str
    crossed_branches: tuple

    def __post_init__(self):
        if self.kind not in ("alpha", "beta_pants", "beta_hexagon"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        self.id = str(self.id)
        self.crossed_branches = tuple(str(b) for b in self.crossed_branches)


def curves_from_dicts(items) -> list[Curve]:
    return [c if isinstance(c, Curve) else Curve(c["id"], c.get("kind", "alpha"), c["crossed_branches"])
            for c in items]


def intersection_estimate(track: TrainTrack, w: WeightSystem, curve) -> float:
    """Sum of weights over the crossed branches (with multiplicity).

    Equals the intersection number when the curve crosses the track
    efficiently and bounds it from above otherwise.
    """
    curve = curves_from_dicts([curve])[0]
    known = set(track.branches)
    for b in curve.crossed_branches:
        if b not in known:
            raise KeyError(f"curve {curve.id} crosses unknown branch {b}")
    return sum((w.weights[b] for b in curve.crossed_branches), start=0)


def l2_equivalence_check(track: TrainTrack, w: WeightSystem, curves, bound: int | None = None) -> dict:
    """Both square sums over the window and the two Cauchy-Schwarz comparisons.

    With every curve crossing at most B branches and every branch crossed by
    at most B curves (multiplicity counted) and by at least one:
        sum_c i(c)^2 <= B^2 sum_b w(b)^2   and   sum_b w(b)^2 <= B^2 sum_c i(c)^2.
    """
    curves = curves_from_dicts(curves)
    B = track.valence_bound if bound is None else bound
    per_branch = Counter()
    for c in curves:
        if len(c.crossed_branches) > B:
            raise CoverageError(f"curve {c.id} crosses {len(c.crossed_branches)} > {B} branches")
        per_branch.update(c.crossed_branches)
    uncovered = [b for b in track.branches if per_branch[b] == 0]
    if uncovered:
        raise CoverageError(f"branches crossed by no curve: {uncovered[:10]}")
    over = [b for b in track.branches if per_branch[b] > B]
    if over:
        raise CoverageError(f"branches crossed more than {B} times: {over[:10]}")
    inters = [intersection_estimate(track, w, c) for c in curves]
    sw = sum((w.weights[b] ** 2 for b in track.branches), start=0)
    si = sum((x * x for x in inters), start=0)
    exact = _is_exact(sw) and _is_exact(si)
    slack = 0 if exact else 1e-12 * max(1.0, float(sw), float(si))
    upper = si <= B * B * sw + slack
    lower = sw <= B * B * si + slack
    fmt = (lambda x: str(x)) if exact else float
    ratio = (float(si) / float(sw)) if sw else None
    return {
        "B": B,
        "sum_weights_sq": fmt(sw),
        "sum_intersections_sq": fmt(si),
        "ratio_intersections_to_weights": ratio,
        "ratio_bounds": [1 / (B * B), B * B],
        "intersections_le_B2_weights": bool(upper),
        "weights_le_B2_intersections": bool(lower),
        "bounds_hold": bool(upper and lower),
        "exact": exact,
    }


# ---------------------------------------------------------------------------
# Random instances for property tests


def _random_positive(rng: random.Random, max_den: int) -> Fraction:
    return Fraction(rng.randint(1, 4 * max_den), rng.randint(1, max_den))


def random_weights(rng: random.Random, track: TrainTrack, max_den: int = 12) -> WeightSystem:
    """Fresh exact weights satisfying every switch of a layered track.

    Switches must be listed so that each one's side_a is known when it is
    reached (true for :func:`random_weighted_track`).  Incoming strands get
    random rationals; a split divides its input at random rational cuts and
    a merge adds its inputs.
    """
    outputs = {b for s in track.switches for b in s.side_b}
    weights = {b: _random_positive(rng, max_den) for b in track.branches if b not in outputs}
    for s in track.switches:
        total = sum((weights[b] for b in s.side_a), start=Fraction(0))
        k = len(s.side_b)
        cuts = sorted(Fraction(rng.randint(0, max_den), max_den) for _ in range(k - 1))
        parts = [hi - lo for lo, hi in zip([Fraction(0)] + cuts, cuts + [Fraction(1)])]
        for b, part in zip(s.side_b, parts):
            weights[b] = total * part
    return WeightSystem(weights)


def random_weighted_track(rng: random.Random, n_switches: int, valence_bound: int = 3,
                          max_den: int = 12):
    """Layered track built by random splits and merges, with valid exact weights.

    Starts with a few open strands; each switch takes 1..valence_bound-1
    strands in and sends 1..valence_bound-1 strands out, one side being a
    single branch.
    """
    if valence_bound < 2:
        raise ValueError("valence bound must be >= 2")
    branches, switches, open_ends = [], [], []

    def new_branch():
        b = f"b{len(branches)}"
        branches.append(b)
        return b

    strands = []
    for _ in range(rng.randint(1, 3)):
        b = new_branch()
        open_ends.append(b)
        strands.append(b)
    for s in range(n_switches):
        k = rng.randint(1, valence_bound - 1)
        if len(strands) >= k and rng.random() < 0.5:
            rng.shuffle(strands)
            ins, strands = strands[:k], strands[k:]
            out = [new_branch()]
        else:
            ins = [strands.pop(rng.randrange(len(strands)))]
            out = [new_branch() for _ in range(k)]
        switches.append({"id": f"s{s}", "side_a": ins, "side_b": out})
        strands.extend(out)
    open_ends.extend(strands)
    track = TrainTrack(branches, switches, valence_bound, open_ends)
    return track, random_weights(rng, track, max_den)


def random_curves(rng: random.Random, track: TrainTrack, bound: int, extra: int = 0) -> list[Curve]:
    """Curves covering every branch, each crossing <= bound branches and each
    branch crossed <= bound times."""
    bs = list(track.branches)
    rng.shuffle(bs)
    curves, i = [], 0
    load = Counter()
    while i < len(bs):
        size = rng.randint(1, bound)
        chunk = bs[i:i + size]
        i += size
        curves.append(Curve(f"c{len(curves)}", "alpha", chunk))
        load.update(chunk)
    for _ in range(extra):
        size = rng.randint(1, bound)
        pick = [b for b in rng.choices(bs, k=size)]
        trial = load + Counter(pick)
        if all(trial[b] <= bound for b in pick):
            load = trial
            curves.append(Curve(f"c{len(curves)}", rng.choice(["alpha", "beta_pants", "beta_hexagon"]), pick))
    return curves


def harmonic_tail_witness(n: int) -> float:
    """sum_{k<=n} 1/k, the partial sums of (1/sqrt k)^2; exceeds ln(n+1)."""
    return float(np.sum(1.0 / np.arange(1, n + 1)))


def basel_gap(n: int) -> float:
    """pi^2/6 minus sum_{k<=n} 1/k^2, which lies in (1/(n+1), 1/n)."""
    return math.pi ** 2 / 6 - float(np.sum(1.0 / np.arange(1, n + 1, dtype=float) ** 2))
