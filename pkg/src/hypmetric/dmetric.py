"""Hyperbolic-valued metrics and the geometry they induce.

A metric here maps a pair of points to a :class:`~hypmetric.hypnum.Hyp` in
the closed positive cone.  Its two idempotent coordinates are ordinary
(pseudo)metrics ``d1`` and ``d2``, and every order statement about the
distance (ball membership, Cauchy tests, covers) is a conjunction of the
two coordinate statements.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import EmptySet, InvalidInterval, InvalidRadius
from .hypnum import (
    BC,
    ZERO,
    Cone,
    Hyp,
    classify_cone,
    from_array,
    hyp_mod,
    precedes,
    strictly_precedes,
    sup_set,
)

RealMetric = Callable[[Any, Any], float]


class DMetric:
    """A hyperbolic-valued distance ``d(x, y) = d1(x, y)*e1 + d2(x, y)*e2``.

    ``vec`` is an optional batched form for metrics on hyperbolic points:
    it takes two ``(n, 2)`` coordinate arrays and returns the ``(n, 2)``
    array of distance coordinates.  ``axis_aligned`` marks metrics whose
    coordinates are ``|u - u'|`` and ``|v - v'|``, which lets diameters be
    read off coordinate ranges.
    """

    def __init__(self, fn: Callable[[Any, Any], Hyp], name: str = "", vec=None,
                 axis_aligned: bool = False):
        self.fn = fn
        self.name = name or getattr(fn, "__name__", "metric")
        self.vec = vec
        self.axis_aligned = axis_aligned

    def __call__(self, x, y) -> Hyp:
        return self.fn(x, y)

    def d1(self, x, y) -> float:
        return self.fn(x, y).u

    def d2(self, x, y) -> float:
        return self.fn(x, y).v

    def __repr__(self):
        return f"DMetric({self.name!r})"

    def distances(self, xs: Sequence, ys: Sequence) -> np.ndarray:
        """Distances of paired rows, as an ``(n, 2)`` array."""
        if self.vec is not None and _is_coord_array(xs) and _is_coord_array(ys):
            return self.vec(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))
        if self.vec is not None and _all_hyp(xs) and _all_hyp(ys):
            return self.vec(_coords(xs), _coords(ys))
        if _is_coord_array(xs):
            xs = from_array(xs)
        if _is_coord_array(ys):
            ys = from_array(ys)
        out = np.empty((len(xs), 2))
        for i, (x, y) in enumerate(zip(xs, ys)):
            h = self.fn(x, y)
            out[i] = (h.u, h.v)
        return out

    def matrix(self, xs: Sequence) -> tuple[np.ndarray, np.ndarray]:
        """All pairwise distances as two ``(n, n)`` coordinate matrices."""
        n = len(xs)
        if self.vec is not None and (_is_coord_array(xs) or _all_hyp(xs)):
            c = np.asarray(xs, dtype=float) if _is_coord_array(xs) else _coords(xs)
            a = np.repeat(c, n, axis=0)
            b = np.tile(c, (n, 1))
            dd = self.vec(a, b)
            return dd[:, 0].reshape(n, n), dd[:, 1].reshape(n, n)
        m1 = np.zeros((n, n))
        m2 = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                h = self.fn(xs[i], xs[j])
                m1[i, j] = m1[j, i] = h.u
                m2[i, j] = m2[j, i] = h.v
        return m1, m2


def _is_coord_array(xs):
    return isinstance(xs, np.ndarray) and xs.ndim == 2 and xs.shape[1] == 2


def _all_hyp(xs):
    return all(isinstance(x, Hyp) for x in xs)


def _coords(xs):
    return np.array([(x.u, x.v) for x in xs], dtype=float).reshape(-1, 2)


# the three example metrics


def d_canonical(x: Hyp, y: Hyp) -> Hyp:
    """``|u_x - u_y|*e1 + |v_x - v_y|*e2`` on the hyperbolic plane."""
    return Hyp(abs(x.u - y.u), abs(x.v - y.v))


def d_hypmod(x: BC, y: BC) -> Hyp:
    """Hyperbolic modulus of the difference of two bicomplex numbers."""
    return hyp_mod(x - y)


def d_product(d1: RealMetric, d2: RealMetric, x: BC, y: BC) -> Hyp:
    """Two complex-plane metrics glued along the idempotent slots."""
    return Hyp(d1(x.z1, y.z1), d2(x.z2, y.z2))


def euclidean(a: complex, b: complex) -> float:
    return abs(a - b)


def taxicab(a: complex, b: complex) -> float:
    w = a - b
    return abs(w.real) + abs(w.imag)


def discrete(a, b) -> float:
    return 0.0 if a == b else 1.0


REAL_METRICS = {"euclidean": euclidean, "taxicab": taxicab, "discrete": discrete}

CANONICAL = DMetric(d_canonical, "canonical", vec=lambda a, b: np.abs(a - b),
                    axis_aligned=True)
HYPMOD = DMetric(d_hypmod, "hypmod")


def product_metric(d1: RealMetric, d2: RealMetric, name: str = "") -> DMetric:
    if not name:
        name = f"product:{getattr(d1, '__name__', 'd1')},{getattr(d2, '__name__', 'd2')}"
    return DMetric(lambda x, y: d_product(d1, d2, x, y), name)


def _real_line(s: float, t: float) -> Hyp:
    r = abs(float(s) - float(t))
    return Hyp(r, r)


# |s - t| in both slots; used for sampled functions of a real variable.
REAL_LINE = DMetric(_real_line, "real-line")


def component_metric(d: DMetric, slot: int) -> RealMetric:
    """The real (pseudo)metric ``d1`` (``slot=1``) or ``d2`` (``slot=2``)."""
    if slot == 1:
        return d.d1
    if slot == 2:
        return d.d2
    raise ValueError("slot must be 1 or 2")


# axiom checks


@dataclass
class AxiomReport:
    metric: str
    n_points: int
    n_pairs: int
    n_triples: int
    identity_ok: bool = True
    symmetry_ok: bool = True
    triangle_ok: bool = True
    counterexamples: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.identity_ok and self.symmetry_ok and self.triangle_ok


def _slack(x: float, ulps: int) -> float:
    return ulps * math.ulp(x)


def check_axioms(d: DMetric, pts: Sequence, *, triples: Optional[Iterable[tuple]] = None,
                 slack_ulps: int = 4) -> AxiomReport:
    """Check nonnegativity/identity, symmetry and the triangle inequality.

    With ``triples=None`` every ordered pair and triple drawn from ``pts``
    is checked, which is cubic in ``len(pts)``.  Pass explicit ``triples``
    to check a random sample instead; pairs are then the pairs occurring in
    those triples.  Identity and symmetry are exact; the triangle
    inequality allows ``slack_ulps`` ulps of the right-hand side per
    coordinate.  Failures are recorded, never raised; only the first
    counterexample of each clause is kept.
    """
    pts = list(pts)
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    if triples is None:
        triple_list = list(itertools.product(pts, repeat=3))
        pair_list = list(itertools.permutations(pts, 2))
    else:
        triple_list = [tuple(t) for t in triples]
        pair_list = []
        for x, y, z in triple_list:
            pair_list += [(x, y), (x, z), (z, y)]
    rep = AxiomReport(d.name, len(pts), len(pair_list), len(triple_list))

    def fail(clause, attr, witness):
        setattr(rep, attr, False)
        rep.counterexamples.setdefault(clause, witness)

    for p in pts:
        dpp = d(p, p)
        if dpp != ZERO:
            fail("identity", "identity_ok", {"x": p, "y": p, "d": dpp})
    for x, y in pair_list:
        dxy = d(x, y)
        if not classify_cone(dxy).in_d0plus:
            fail("identity", "identity_ok", {"x": x, "y": y, "d": dxy})
        elif (dxy == ZERO) != (x == y):
            fail("identity", "identity_ok", {"x": x, "y": y, "d": dxy})
        dyx = d(y, x)
        if dxy != dyx:
            fail("symmetry", "symmetry_ok", {"x": x, "y": y, "d_xy": dxy, "d_yx": dyx})
    for x, y, z in triple_list:
        lhs = d(x, y)
        rhs = d(x, z) + d(z, y)
        if not (lhs.u <= rhs.u + _slack(rhs.u, slack_ulps)
                and lhs.v <= rhs.v + _slack(rhs.v, slack_ulps)):
            fail("triangle", "triangle_ok", {"x": x, "y": y, "z": z, "lhs": lhs, "rhs": rhs})
    return rep


def is_isometry(f: Callable, pts: Sequence, d: DMetric, rho: DMetric) -> bool:
    """Injective and distance-preserving on the sample ``pts``."""
    return is_embedding(f, pts, d, rho)


def is_embedding(f: Callable, pts: Sequence, d: DMetric, rho: DMetric) -> bool:
    images = [f(p) for p in pts]
    for i, j in itertools.combinations(range(len(pts)), 2):
        if d(pts[i], pts[j]) != rho(images[i], images[j]):
            return False
        if pts[i] != pts[j] and images[i] == images[j]:
            return False
    return True


# balls, spheres, intervals

_BALL_KINDS = ("open", "closed", "sphere")


@dataclass(frozen=True)
class DBall:
    center: Any
    radius: Hyp
    kind: str = "open"

    def __post_init__(self):
        if classify_cone(self.radius).cone is not Cone.POSITIVE_INTERIOR:
            raise InvalidRadius(f"radius {self.radius!r} is not strictly positive in both slots")
        if self.kind not in _BALL_KINDS:
            raise ValueError(f"kind must be one of {_BALL_KINDS}, not {self.kind!r}")


def ball_membership(b: DBall, d: DMetric, x) -> bool:
    """Membership of ``x`` in ``b``.

    A distance incomparable with the radius is never inside the ball.
    """
    r = d(x, b.center)
    if b.kind == "open":
        return strictly_precedes(r, b.radius)
    if b.kind == "closed":
        return precedes(r, b.radius)
    return r == b.radius


def ball_mask(b: DBall, d: DMetric, pts) -> np.ndarray:
    """:func:`ball_membership` for many points at once, as a boolean array.

    ``pts`` may be an ``(n, 2)`` coordinate array when ``d`` is batched.
    """
    n = len(pts)
    if _is_coord_array(pts):
        centers = np.broadcast_to([b.center.u, b.center.v], (n, 2))
    else:
        centers = [b.center] * n
    dist = d.distances(pts, centers)
    r = np.array([b.radius.u, b.radius.v])
    if b.kind == "open":
        return np.all(dist < r, axis=1)
    if b.kind == "closed":
        return np.all(dist <= r, axis=1)
    return np.all(dist == r, axis=1)


def sphere_vertices(center: Hyp, r: Hyp) -> tuple[Hyp, Hyp, Hyp, Hyp]:
    """The four points at canonical distance exactly ``r`` from ``center``.

    Ordered (+,+), (+,-), (-,+), (-,-).  Membership of the returned points is
    exact whenever ``center +/- r`` is representable, e.g. for dyadic inputs.
    """
    if classify_cone(r).cone is not Cone.POSITIVE_INTERIOR:
        raise InvalidRadius(f"radius {r!r} is not strictly positive in both slots")
    cu, cv = center.u, center.v
    return (
        Hyp(cu + r.u, cv + r.v),
        Hyp(cu + r.u, cv - r.v),
        Hyp(cu - r.u, cv + r.v),
        Hyp(cu - r.u, cv - r.v),
    )


def square_bounds(center: Hyp, r: Hyp) -> dict:
    """Coordinate extent of the canonical ball, which is an axis-aligned square."""
    if classify_cone(r).cone is not Cone.POSITIVE_INTERIOR:
        raise InvalidRadius(f"radius {r!r} is not strictly positive in both slots")
    return {"u_min": center.u - r.u, "u_max": center.u + r.u,
            "v_min": center.v - r.v, "v_max": center.v + r.v}


def boundary_witness(center: Hyp, r: Hyp) -> Hyp:
    """A point of the closed canonical ball that is neither in the open ball
    nor on the sphere: the midpoint of the right edge of the square."""
    if classify_cone(r).cone is not Cone.POSITIVE_INTERIOR:
        raise InvalidRadius(f"radius {r!r} is not strictly positive in both slots")
    return Hyp(center.u + r.u, center.v)


@dataclass(frozen=True)
class DInterval:
    lo: Hyp
    hi: Hyp
    kind: str = "closed"

    def __post_init__(self):
        # The endpoints are independent hyperbolic numbers with lo strictly below hi.
        if not strictly_precedes(self.lo, self.hi):
            raise InvalidInterval(f"interval needs lo strictly below hi, got {self.lo!r}, {self.hi!r}")
        if self.kind not in ("open", "closed"):
            raise ValueError(f"kind must be 'open' or 'closed', not {self.kind!r}")


def interval_contains(iv: DInterval, x: Hyp) -> bool:
    if iv.kind == "open":
        return strictly_precedes(iv.lo, x) and strictly_precedes(x, iv.hi)
    return precedes(iv.lo, x) and precedes(x, iv.hi)


# sequences


@dataclass
class SeqReport:
    """Finite-prefix evidence about a sequence.

    ``cauchy_index[i]`` is the least 0-based ``N`` such that every pair of
    terms with index ``>= N`` is strictly within ``eps[i]``, restricted to
    ``N <= len(xs) - min_tail``; ``None`` if no such ``N`` exists.
    ``converge_index`` is the analogous index for ``d(x_n, limit)``.
    """

    eps: list
    cauchy_index: list
    is_cauchy_up_to: list
    min_tail: int
    limit_candidate: Any = None
    tail_distances: list = field(default_factory=list)
    converge_index: list = field(default_factory=list)


def _suffix_diameters(m: np.ndarray) -> np.ndarray:
    # s[N] = max over n, m >= N of m[n, m]; m symmetric with zero diagonal.
    n = m.shape[0]
    row = np.max(np.triu(m), axis=1) if n else np.zeros(0)
    return np.maximum.accumulate(row[::-1])[::-1]


def _default_min_tail(n: int) -> int:
    return min(n, max(2, n // 2))


def _first_index(ok: np.ndarray, last: int) -> Optional[int]:
    # ok is monotone (False...True); least index <= last that is True.
    idx = np.flatnonzero(ok[: last + 1])
    return int(idx[0]) if idx.size else None


def seq_analyze(d: DMetric, xs: Sequence, eps_schedule: Sequence[Hyp],
                limit=None, min_tail: Optional[int] = None) -> SeqReport:
    """Per-tolerance Cauchy (and, given ``limit``, convergence) indices.

    A finite prefix always has a trivially small last term, so a Cauchy
    index only counts if at least ``min_tail`` terms (default: half the
    prefix, at least 2) follow it.
    """
    eps_schedule = list(eps_schedule)
    if not eps_schedule:
        raise ValueError("eps_schedule must be nonempty")
    for e in eps_schedule:
        if classify_cone(e).cone is not Cone.POSITIVE_INTERIOR:
            raise ValueError(f"tolerance {e!r} is not strictly positive")
    n = len(xs)
    if min_tail is None:
        min_tail = _default_min_tail(n)
    m1, m2 = d.matrix(xs)
    s1 = _suffix_diameters(m1)
    s2 = _suffix_diameters(m2)
    last = n - min_tail
    cauchy = []
    for e in eps_schedule:
        ok = np.array([strictly_precedes(Hyp(a, b), e) for a, b in zip(s1, s2)], dtype=bool)
        cauchy.append(_first_index(ok, last) if last >= 0 else None)
    rep = SeqReport(eps_schedule, cauchy, [c is not None for c in cauchy], min_tail)
    if limit is not None:
        rep.limit_candidate = limit
        rep.tail_distances = [d(x, limit) for x in xs]
        t1 = np.array([t.u for t in rep.tail_distances])
        t2 = np.array([t.v for t in rep.tail_distances])
        # tail maxima from the back
        g1 = np.maximum.accumulate(t1[::-1])[::-1]
        g2 = np.maximum.accumulate(t2[::-1])[::-1]
        for e in eps_schedule:
            ok = np.array([strictly_precedes(Hyp(a, b), e) for a, b in zip(g1, g2)], dtype=bool)
            rep.converge_index.append(_first_index(ok, n - 1))
    elif all(rep.is_cauchy_up_to) and n:
        rep.limit_candidate = xs[-1]
    return rep


def seq_analyze_real(dist: RealMetric, xs: Sequence, eps: Sequence[float],
                     min_tail: Optional[int] = None) -> list:
    """Cauchy indices for a real-valued metric, with the same conventions
    as :func:`seq_analyze`."""
    n = len(xs)
    if min_tail is None:
        min_tail = _default_min_tail(n)
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = dist(xs[i], xs[j])
    s = _suffix_diameters(m)
    last = n - min_tail
    return [(_first_index(s < e, last) if last >= 0 else None) for e in eps]


def summable_check(d: DMetric, xs: Sequence, tail_bound: Hyp, cut: Optional[int] = None) -> bool:
    """Finite stand-in for "the series of step distances converges".

    True iff every step distance lies in the closed cone (so partial sums
    are monotone) and the summed steps from ``cut`` (default: the middle
    of the prefix) onward are strictly below ``tail_bound``.
    """
    if classify_cone(tail_bound).cone is not Cone.POSITIVE_INTERIOR:
        raise ValueError(f"tail_bound {tail_bound!r} is not strictly positive")
    n = len(xs)
    if cut is None:
        cut = n // 2
    steps = [d(xs[i], xs[i + 1]) for i in range(n - 1)]
    if not all(classify_cone(s).in_d0plus for s in steps):
        return False
    tail = steps[cut:]
    total = Hyp(math.fsum(s.u for s in tail), math.fsum(s.v for s in tail))
    return strictly_precedes(total, tail_bound)


def diameter(d: DMetric, points: Sequence) -> Hyp:
    """Componentwise supremum of all pairwise distances, a boundedness witness."""
    if len(points) == 0:
        raise EmptySet("diameter of an empty set")
    if d.axis_aligned and (_is_coord_array(points) or _all_hyp(points)):
        c = np.asarray(points, dtype=float) if _is_coord_array(points) else _coords(points)
        span = c.max(axis=0) - c.min(axis=0)
        return Hyp(span[0], span[1])
    m1, m2 = d.matrix(points)
    return Hyp(m1.max(), m2.max())


def cover_greedy(d: DMetric, points: Sequence, eps: Hyp) -> list:
    """Farthest-point cover of ``points`` by open balls of radius ``eps``.

    A point ``x`` lies in the open ball around ``c`` iff its normalized
    score ``max(d1/eps1, d2/eps2)`` is below 1.  Each round adds the
    uncovered point with the largest score against the current centers;
    ties go to the lowest index.  The first center is ``points[0]``.
    """
    if classify_cone(eps).cone is not Cone.POSITIVE_INTERIOR:
        raise InvalidRadius(f"eps {eps!r} is not strictly positive in both slots")
    pts = from_array(points) if _is_coord_array(points) else list(points)
    n = len(pts)
    if n == 0:
        return []
    score = np.full(n, np.inf)
    centers = []
    nxt = 0
    while True:
        c = pts[nxt]
        centers.append(c)
        dist = d.distances(pts, [c] * n)
        s = np.maximum(dist[:, 0] / eps.u, dist[:, 1] / eps.v)
        np.minimum(score, s, out=score)
        uncovered = score >= 1.0
        if not uncovered.any():
            return centers
        nxt = int(np.argmax(np.where(uncovered, score, -np.inf)))


def square_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """``n x n`` tensor grid of ``[lo, hi]`` in both idempotent coordinates.

    Returned as an ``(n*n, 2)`` coordinate array, u-major.
    """
    if n < 1:
        raise ValueError("grid needs at least one point per axis")
    t = np.linspace(lo, hi, n)
    uu, vv = np.meshgrid(t, t, indexing="ij")
    return np.column_stack([uu.ravel(), vv.ravel()])


def grid_step(lo: float, hi: float, n: int) -> float:
    return (hi - lo) / (n - 1) if n > 1 else 0.0
