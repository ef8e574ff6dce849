"""Fixed-point iteration for self-maps of hyperbolic-valued metric spaces.

Every bound is applied per idempotent coordinate.  For a contraction with
constant ``k`` (both coordinates in ``[0, 1)``) the a-priori estimate is

    d(x_n, x*) <= k**n / (1 - k) * d(x_0, T x_0)

and iteration stops once ``d(x_{n-1}, x_n) < tol * (1 - k) / k``, which by
the a-posteriori estimate ``d(x_n, x*) <= k / (1 - k) * d(x_{n-1}, x_n)``
puts the returned point strictly within ``tol`` of the fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np

from .dmetric import CANONICAL, DMetric, grid_step, square_grid
from .errors import (
    DegeneratePair,
    GridTooCoarse,
    NoConvergence,
    NotAContraction,
    NotContractive,
    NotSelfMap,
    PowerFixedPointMismatch,
    ScheduleViolated,
)
from .hypnum import Cone, Hyp, classify_cone, from_array, precedes, to_array


@dataclass
class MapSpec:
    """A self-map, optionally with a declared Lipschitz constant ``k``.

    ``vec`` is an optional batched form on ``(n, 2)`` coordinate arrays,
    used by the grid solver.
    """

    fn: Callable[[Any], Any]
    k: Optional[Hyp] = None
    name: str = ""
    vec: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.k is not None and not classify_cone(self.k).in_d0plus:
            raise ValueError(f"Lipschitz constant {self.k!r} must be nonnegative in both slots")

    def __call__(self, x):
        return self.fn(x)

    def apply_array(self, pts: np.ndarray) -> np.ndarray:
        if self.vec is not None:
            return np.asarray(self.vec(pts), dtype=float)
        return to_array([self.fn(p) for p in from_array(pts)])

    def power(self, n: int, k: Optional[Hyp] = None) -> "MapSpec":
        """The ``n``-fold composite.  ``k`` defaults to ``self.k ** n``."""
        if n < 1:
            raise ValueError("power must be a positive integer")
        if n == 1:
            return replace(self, k=k if k is not None else self.k)
        fn, vec = self.fn, self.vec

        def composite(x):
            for _ in range(n):
                x = fn(x)
            return x

        vcomposite = None
        if vec is not None:
            def vcomposite(p):
                for _ in range(n):
                    p = vec(p)
                return p

        if k is None and self.k is not None:
            k = self.k ** n
        return MapSpec(composite, k, f"{self.name or 'T'}^{n}", vcomposite)


def is_contraction_constant(k: Optional[Hyp]) -> bool:
    # Zero slots are accepted: that coordinate settles after one step.
    return k is not None and 0.0 <= k.u < 1.0 and 0.0 <= k.v < 1.0


@dataclass
class ContractionReport:
    fixed_point: Any
    iterations: int
    residual: Hyp
    apriori_bounds: list = field(default_factory=list)
    trace: Optional[list] = None
    k: Optional[Hyp] = None
    converged: bool = True
    # inexact iteration: distances d(y_n, x*) to the reference fixed point
    errors: Optional[list] = None
    reference: Any = None
    # grid solver
    grid_minimizer: Any = None
    grid_bound: Optional[Hyp] = None
    probe_distances: Optional[list] = None
    power: int = 1


def potential(T: MapSpec, d: DMetric, x) -> Hyp:
    """``d(x, T x) / (1 - k)``: an upper bound on the distance from ``x`` to the fixed point."""
    if not is_contraction_constant(T.k):
        raise NotAContraction(f"{T.k!r} is not a contraction constant")
    return d(x, T(x)) * Hyp(1.0 / (1.0 - T.k.u), 1.0 / (1.0 - T.k.v))


def estimate_lipschitz(T: MapSpec, pairs: Sequence[tuple], d: DMetric) -> Hyp:
    """Componentwise supremum of ``d_i(Tx, Ty) / d_i(x, y)`` over ``pairs``.

    This is a lower estimate of the componentwise-least valid constant.
    """
    if not pairs:
        raise ValueError("need at least one pair")
    ku = kv = 0.0
    for x, y in pairs:
        base = d(x, y)
        if base.u == 0.0 or base.v == 0.0:
            raise DegeneratePair(f"pair ({x!r}, {y!r}) has zero distance in a slot: {base!r}")
        img = d(T(x), T(y))
        ku = max(ku, img.u / base.u)
        kv = max(kv, img.v / base.v)
    return Hyp(ku, kv)


def _stop_thresholds(k: Hyp, tol: Hyp) -> tuple[float, float]:
    tu = math.inf if k.u == 0.0 else tol.u * (1.0 - k.u) / k.u
    tv = math.inf if k.v == 0.0 else tol.v * (1.0 - k.v) / k.v
    return tu, tv


def _require_tol(tol: Hyp):
    if classify_cone(tol).cone is not Cone.POSITIVE_INTERIOR:
        raise ValueError(f"tolerance {tol!r} must be strictly positive in both slots")


def solve_banach(T: MapSpec, x0, d: DMetric, tol: Hyp, max_iter: int = 10_000,
                 keep_trace: bool = True) -> ContractionReport:
    """Picard iteration of a declared contraction, with a-priori bounds.

    ``apriori_bounds[n]`` bounds ``d(x_n, x*)`` for every recorded iterate.
    Raises :class:`NoConvergence` (carrying the partial report) when
    ``max_iter`` steps do not meet the stopping rule.
    """
    k = T.k
    if not is_contraction_constant(k):
        raise NotAContraction(f"declared constant {k!r} is not in [0, 1) in both slots")
    _require_tol(tol)
    thr_u, thr_v = _stop_thresholds(k, tol)
    scale = Hyp(1.0 / (1.0 - k.u), 1.0 / (1.0 - k.v))

    x = x0
    trace = [x0] if keep_trace else None
    bounds = []
    first = None
    ku_n = kv_n = 1.0
    for n in range(1, max_iter + 1):
        y = T(x)
        step = d(x, y)
        if first is None:
            first = step * scale
            bounds.append(first)
        ku_n *= k.u
        kv_n *= k.v
        bounds.append(Hyp(ku_n * first.u, kv_n * first.v))
        if keep_trace:
            trace.append(y)
        x = y
        if step.u < thr_u and step.v < thr_v:
            return ContractionReport(x, n, d(x, T(x)), bounds, trace, k)
    rep = ContractionReport(x, max_iter, d(x, T(x)), bounds, trace, k, converged=False)
    raise NoConvergence(f"no convergence to {tol!r} within {max_iter} iterations", rep)


def _schedule_term(sched, n: int) -> Hyp:
    eps = sched(n) if callable(sched) else sched[n - 1]
    if not classify_cone(eps).in_d0plus:
        raise ValueError(f"schedule term {n} = {eps!r} is not nonnegative")
    return eps


def exact_step(n: int, ty, eps: Hyp):
    """Perturbation that returns ``T(y_n)`` unchanged."""
    return ty


def boundary_step(n: int, ty: Hyp, eps: Hyp) -> Hyp:
    """Worst case on hyperbolic points: push every coordinate by the full ``eps``.

    Rounding can overshoot ``eps``; such a coordinate is pulled back one ulp
    at a time so the step never exceeds the schedule.
    """
    out = []
    for t, e in ((ty.u, eps.u), (ty.v, eps.v)):
        y = t + e
        while abs(y - t) > e:
            y = math.nextafter(y, t)
        out.append(y)
    return Hyp(*out)


def solve_inexact(T: MapSpec, y0, sched: Union[Callable[[int], Hyp], Sequence[Hyp]], d: DMetric,
                  n_max: int, perturbation: Callable = exact_step, *,
                  reference=None, ref_tol: Hyp = Hyp(1e-12, 1e-12),
                  stop_below: Optional[Hyp] = None) -> ContractionReport:
    """Iterate ``y_{n} = perturbation(n, T(y_{n-1}), eps_n)`` for ``n = 1..n_max``.

    Each step must land within ``eps_n`` of ``T(y_{n-1})`` (checked, else
    :class:`ScheduleViolated`).  ``sched`` is either ``n -> eps_n`` with
    ``n`` starting at 1, or a sequence whose first entry is ``eps_1``.  The
    reference fixed point is computed with :func:`solve_banach` unless
    given.  ``errors[n]`` is ``d(y_n, x*)``.  With ``stop_below`` the run
    ends at the first ``y_n`` strictly within that distance of ``x*``.
    """
    if not is_contraction_constant(T.k):
        raise NotAContraction(f"declared constant {T.k!r} is not in [0, 1) in both slots")
    if reference is None:
        reference = solve_banach(T, y0, d, ref_tol, keep_trace=False).fixed_point
    y = y0
    trace = [y0]
    errors = [d(y0, reference)]
    n = 0
    for n in range(1, n_max + 1):
        eps = _schedule_term(sched, n)
        ty = T(y)
        y = perturbation(n, ty, eps)
        gap = d(y, ty)
        if not precedes(gap, eps):
            raise ScheduleViolated(f"step {n}: d(y_n, T y_(n-1)) = {gap!r} exceeds {eps!r}")
        trace.append(y)
        errors.append(d(y, reference))
        if stop_below is not None and errors[-1].u < stop_below.u and errors[-1].v < stop_below.v:
            break
    converged = stop_below is None or (errors[-1].u < stop_below.u and errors[-1].v < stop_below.v)
    return ContractionReport(y, n, d(y, T(y)), [], trace, T.k, converged,
                             errors=errors, reference=reference)


def solve_power(T: MapSpec, N: int, x0, d: DMetric, tol: Hyp, max_iter: int = 10_000, *,
                k_power: Optional[Hyp] = None, pairs: Optional[Sequence[tuple]] = None,
                keep_trace: bool = True) -> ContractionReport:
    """Fixed point of ``T`` through the contraction ``T**N``.

    The constant of ``T**N`` is taken from ``k_power``, else estimated on
    ``pairs``, else ``T.k ** N``.  After solving, ``T(x*)`` is checked to
    agree with ``x*`` within ``tol``.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    if k_power is None and pairs is not None:
        k_power = estimate_lipschitz(T.power(N), pairs, d)
    TN = T.power(N, k_power)
    if TN.k is None:
        raise NotAContraction("no Lipschitz constant declared or estimated for the composite map")
    rep = solve_banach(TN, x0, d, tol, max_iter, keep_trace)
    x = rep.fixed_point
    gap = d(T(x), x)
    if not precedes(gap, tol):
        raise PowerFixedPointMismatch(f"T moves the fixed point of T^{N} by {gap!r}")
    rep.power = N
    return rep


@dataclass(frozen=True)
class Grid:
    """``n x n`` tensor grid on ``[lo, hi]`` in both idempotent coordinates."""

    lo: float
    hi: float
    n: int

    @property
    def h(self) -> float:
        return grid_step(self.lo, self.hi, self.n)

    def points(self) -> np.ndarray:
        return square_grid(self.lo, self.hi, self.n)


def _componentwise_minimizer(P: np.ndarray, psi: np.ndarray) -> np.ndarray:
    # For each slot: the smallest coordinate among points where psi_i is minimal.
    out = np.empty(2)
    for i in range(2):
        at_min = psi[:, i] == psi[:, i].min()
        out[i] = P[at_min, i].min()
    return out


def solve_contractive_compact(T: MapSpec, K: Union[Grid, np.ndarray], d: DMetric = CANONICAL,
                              n_max: int = 10_000, *, h: Optional[float] = None,
                              probe_start: Optional[Hyp] = None, check_pairs: int = 2000,
                              seed: int = 0, tol: Hyp = Hyp(1e-15, 1e-15)) -> ContractionReport:
    """Fixed point of a contractive (not necessarily contraction) map on a grid.

    1. Verify ``T`` maps the bounding box of ``K`` into itself and is
       contractive on sampled pairs: in each slot the distance strictly
       shrinks, or stays zero where it was zero.
    2. Minimize ``psi(x) = d(x, T x)`` over ``K`` slot by slot, taking the
       smallest coordinate among minimizers, and iterate ``T`` from there.
    3. Check the residual against ``2 h`` per slot, else :class:`GridTooCoarse`.
    4. From ``probe_start`` (default: the grid point of largest ``psi``),
       check ``d(T^n x, x*)`` strictly decreases in each slot until it is
       within ``h``, else :class:`NotContractive`.
    """
    if isinstance(K, Grid):
        P = K.points()
        if h is None:
            h = K.h
    else:
        P = to_array(K)
        if h is None:
            raise ValueError("grid resolution h is required for a bare point array")
    if len(P) < 2:
        raise ValueError("grid needs at least two points")
    TP = T.apply_array(P)

    lo, hi = P.min(axis=0), P.max(axis=0)
    slack = 1e-12 * max(1.0, float(np.abs(P).max()))
    outside = np.any((TP < lo - slack) | (TP > hi + slack), axis=1)
    if outside.any():
        i = int(np.flatnonzero(outside)[0])
        raise NotSelfMap(f"T maps {tuple(P[i])} to {tuple(TP[i])}, outside the grid hull")

    rng = np.random.default_rng(seed)
    ii = rng.integers(0, len(P), size=check_pairs)
    jj = rng.integers(0, len(P), size=check_pairs)
    # Pairs sharing one coordinate expose maps that couple the two slots.
    X = np.concatenate([P[ii], P[ii], P[ii]])
    Y = np.concatenate([P[jj], np.column_stack([P[ii, 0], P[jj, 1]]),
                        np.column_stack([P[jj, 0], P[ii, 1]])])
    keep = np.any(X != Y, axis=1)
    X, Y = X[keep], Y[keep]
    base = d.distances(X, Y)
    img = d.distances(T.apply_array(X), T.apply_array(Y))
    coupled = np.any((base == 0) & (img > 0), axis=1)
    bad = coupled | np.any((base > 0) & (img >= base), axis=1)
    if bad.any():
        b = int(np.flatnonzero(coupled if coupled.any() else bad)[0])
        why = "the map couples the two slots: " if coupled[b] else ""
        raise NotContractive(
            f"{why}d(Tx, Ty) = {tuple(img[b].tolist())} does not shrink "
            f"d(x, y) = {tuple(base[b].tolist())} "
            f"for x = {tuple(X[b].tolist())}, y = {tuple(Y[b].tolist())}")

    psi = d.distances(P, TP)
    cand = _componentwise_minimizer(P, psi)
    if not np.any(np.all(P == cand, axis=1)):
        cand = P[int(np.argmin(psi.max(axis=1)))]
    start = Hyp(cand[0], cand[1])

    x = start
    trace = [x]
    n = 0
    for n in range(1, n_max + 1):
        y = T(x)
        step = d(x, y)
        trace.append(y)
        x = y
        if step.u < tol.u and step.v < tol.v:
            break
    residual = d(x, T(x))
    bound = Hyp(2.0 * h, 2.0 * h)
    if not precedes(residual, bound):
        raise GridTooCoarse(f"residual {residual!r} exceeds grid bound {bound!r}")

    if probe_start is None:
        j = int(np.argmax(psi.sum(axis=1)))
        probe_start = Hyp(P[j, 0], P[j, 1])
    probe = probe_start
    dist = d(probe, x)
    probe_distances = [dist]
    for _ in range(n_max):
        if dist.u <= h and dist.v <= h:
            break
        probe = T(probe)
        nd = d(probe, x)
        if (dist.u > h and not nd.u < dist.u) or (dist.v > h and not nd.v < dist.v):
            raise NotContractive(f"d(T^n x, x*) failed to decrease: {dist!r} -> {nd!r}")
        dist = nd
        probe_distances.append(dist)

    return ContractionReport(x, n, residual, [], trace, T.k,
                             grid_minimizer=start, grid_bound=bound,
                             probe_distances=probe_distances)
