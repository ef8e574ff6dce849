"""Functions sampled on finite grids, compared with the hyperbolic sup-metric.

Every supremum over the domain becomes an exact finite maximum, so the
sup-metric, boundedness witnesses and the componentwise extreme values are
computed exactly on the sample.  The grid spacing is carried along so that
continuity probes know the smallest scale they can resolve.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .dmetric import CANONICAL, REAL_LINE, DMetric, diameter
from .errors import DomainMismatch, NotFound
from .hypnum import Cone, Hyp, classify_cone, to_array


def _is_coords(a):
    return isinstance(a, np.ndarray) and a.ndim == 2 and a.shape[1] == 2


class SampledFunction:
    """``f: X -> Y`` given by its values on a finite, ordered domain.

    ``domain`` and ``values`` are sequences of equal length; hyperbolic
    points may also be given as ``(n, 2)`` coordinate arrays, which keeps
    large grids cheap.
    """

    def __init__(self, domain, values, resolution: Optional[float] = None):
        n = len(domain)
        if n < 1:
            raise ValueError("a sampled function needs a nonempty domain")
        if len(values) != n:
            raise ValueError(f"{n} domain points but {len(values)} values")
        if _is_coords(domain):
            srt = domain[np.lexsort((domain[:, 1], domain[:, 0]))]
            distinct = not np.any(np.all(srt[1:] == srt[:-1], axis=1))
        else:
            try:
                distinct = len(set(domain)) == n
            except TypeError:
                distinct = all(domain[i] != domain[j] for i in range(n) for j in range(i))
        if not distinct:
            raise ValueError("domain points must be pairwise distinct")
        self.domain = domain
        self.values = values
        self.resolution = resolution

    def __len__(self):
        return len(self.domain)

    @classmethod
    def sample(cls, f: Callable, domain, resolution: Optional[float] = None,
               vectorized: bool = False) -> "SampledFunction":
        """Evaluate ``f`` on ``domain``; ``vectorized`` passes the whole array at once."""
        if vectorized:
            return cls(domain, np.asarray(f(domain), dtype=float), resolution)
        if _is_coords(domain):
            pts = [Hyp(u, v) for u, v in domain]
            return cls(domain, [f(p) for p in pts], resolution)
        return cls(domain, [f(x) for x in domain], resolution)

    def point(self, i: int):
        if _is_coords(self.domain):
            return Hyp(*self.domain[i])
        return self.domain[i]

    def value(self, i: int):
        if _is_coords(self.values):
            return Hyp(*self.values[i])
        return self.values[i]

    def value_array(self) -> np.ndarray:
        """Values as an ``(n, 2)`` array; only for hyperbolic-valued functions."""
        return self.values if _is_coords(self.values) else to_array(self.values)

    def index_of(self, x) -> int:
        if _is_coords(self.domain):
            hit = np.flatnonzero(np.all(self.domain == (x.u, x.v), axis=1))
            if hit.size:
                return int(hit[0])
        else:
            for i, p in enumerate(self.domain):
                if p == x:
                    return i
        raise KeyError(f"{x!r} is not a domain point")


def _same_domain(f: SampledFunction, g: SampledFunction) -> bool:
    if len(f) != len(g):
        return False
    if _is_coords(f.domain) or _is_coords(g.domain):
        return np.array_equal(np.asarray(to_array(f.domain) if not _is_coords(f.domain) else f.domain),
                              np.asarray(to_array(g.domain) if not _is_coords(g.domain) else g.domain))
    return all(a == b for a, b in zip(f.domain, g.domain))


def _default_domain_metric(f: SampledFunction) -> DMetric:
    x = f.point(0)
    if isinstance(x, Hyp):
        return CANONICAL
    if isinstance(x, numbers.Real):
        return REAL_LINE
    raise ValueError("cannot infer a domain metric; pass d explicitly")


def sigma_sup(f: SampledFunction, g: SampledFunction, rho: DMetric) -> Hyp:
    """Sup-metric: componentwise max over the domain of ``rho(f(x), g(x))``."""
    if not _same_domain(f, g):
        raise DomainMismatch("functions are sampled on different domains")
    dist = rho.distances(f.values, g.values)
    top = dist.max(axis=0)
    return Hyp(top[0], top[1])


def check_bounded(f: SampledFunction, rho: DMetric) -> Hyp:
    """Boundedness witness: the diameter of the range of ``f``."""
    return diameter(rho, f.values)


@dataclass
class EvtReport:
    """Componentwise extreme values of a hyperbolic-valued sample.

    ``attainers`` maps ``"a"``/``"b"``/``"c"``/``"d"`` to domain points with
    ``p1(f(a)) = M.u``, ``p2(f(b)) = M.v``, ``p1(f(c)) = m.u``,
    ``p2(f(d)) = m.v``.  ``jointly_attained`` is true only if some single
    point has ``f = M`` and some single point has ``f = m``.
    """

    M: Hyp
    m: Hyp
    attainers: dict
    attainer_indices: dict
    sup_attained: bool
    inf_attained: bool

    @property
    def jointly_attained(self) -> bool:
        return self.sup_attained and self.inf_attained


def evt_extrema(f: SampledFunction) -> EvtReport:
    vals = f.value_array()
    hi = vals.max(axis=0)
    lo = vals.min(axis=0)
    idx = {
        "a": int(np.argmax(vals[:, 0] == hi[0])),
        "b": int(np.argmax(vals[:, 1] == hi[1])),
        "c": int(np.argmax(vals[:, 0] == lo[0])),
        "d": int(np.argmax(vals[:, 1] == lo[1])),
    }
    sup_hit = bool(np.any((vals[:, 0] == hi[0]) & (vals[:, 1] == hi[1])))
    inf_hit = bool(np.any((vals[:, 0] == lo[0]) & (vals[:, 1] == lo[1])))
    return EvtReport(Hyp(hi[0], hi[1]), Hyp(lo[0], lo[1]),
                     {key: f.point(i) for key, i in idx.items()}, idx, sup_hit, inf_hit)


def _domain_dists(f: SampledFunction, i: int, d: DMetric) -> np.ndarray:
    n = len(f)
    if _is_coords(f.domain):
        return d.distances(f.domain, np.repeat(f.domain[i:i + 1], n, axis=0))
    return d.distances(list(f.domain), [f.domain[i]] * n)


def _value_dists(f: SampledFunction, i: int, rho: DMetric) -> np.ndarray:
    n = len(f)
    if _is_coords(f.values):
        return rho.distances(f.values, np.repeat(f.values[i:i + 1], n, axis=0))
    return rho.distances(list(f.values), [f.values[i]] * n)


def _holds(dx, dy, delta: Hyp, eps: Hyp) -> bool:
    inside = (dx[:, 0] < delta.u) & (dx[:, 1] < delta.v)
    near = (dy[:, 0] < eps.u) & (dy[:, 1] < eps.v)
    return bool(np.all(near[inside]))


def continuity_holds(f: SampledFunction, alpha, delta: Hyp, eps: Hyp,
                     d: Optional[DMetric] = None, rho: DMetric = CANONICAL) -> bool:
    """Every sample point strictly within ``delta`` of ``alpha`` maps strictly
    within ``eps`` of ``f(alpha)``."""
    d = d or _default_domain_metric(f)
    i = f.index_of(alpha)
    return _holds(_domain_dists(f, i, d), _value_dists(f, i, rho), delta, eps)


def _candidates(dx: np.ndarray, resolution: Optional[float], delta0: Optional[float]) -> list:
    if delta0 is None:
        delta0 = float(dx.max()) or 1.0
    floor = resolution
    if floor is None:
        pos = dx[dx > 0]
        floor = float(pos.min()) if pos.size else 0.0
    out = []
    delta = float(delta0)
    while delta > floor and len(out) < 200:
        out.append(Hyp(delta, delta))
        delta /= 2.0
    return out


def dyadic_candidates(f: SampledFunction, alpha, d: Optional[DMetric] = None,
                      delta0: Optional[float] = None) -> list:
    """Candidate radii ``delta0 / 2**j`` that stay above the grid resolution.

    ``delta0`` defaults to the largest distance coordinate from ``alpha``.
    Without a declared resolution the floor is the smallest positive
    distance coordinate from ``alpha`` to another sample point.
    """
    d = d or _default_domain_metric(f)
    return _candidates(_domain_dists(f, f.index_of(alpha), d), f.resolution, delta0)


def continuity_modulus(f: SampledFunction, alpha, eps: Hyp, d: Optional[DMetric] = None,
                       rho: DMetric = CANONICAL, delta0: Optional[float] = None) -> Hyp:
    """Largest dyadic ``delta`` with ``f(B(alpha; delta)) inside B(f(alpha); eps)`` on the grid.

    Raises :class:`NotFound` if no candidate above the grid resolution works,
    i.e. the sample looks discontinuous at ``alpha``.
    """
    if classify_cone(eps).cone is not Cone.POSITIVE_INTERIOR:
        raise ValueError(f"eps {eps!r} must be strictly positive")
    d = d or _default_domain_metric(f)
    i = f.index_of(alpha)
    dx = _domain_dists(f, i, d)
    dy = _value_dists(f, i, rho)
    for delta in _candidates(dx, f.resolution, delta0):
        if _holds(dx, dy, delta, eps):
            return delta
    raise NotFound(f"no radius above the grid resolution keeps f within {eps!r} near {alpha!r}")


@dataclass
class UniformLimitReport:
    """``sigmas[n-1] = sigma(f_n, f)``; ``uniform_index[i]`` is the least 1-based
    ``N`` with ``sigma(f_n, f)`` strictly below ``eps[i]`` for every ``n >= N``
    in the prefix, or ``None``."""

    eps: list
    sigmas: list
    uniform_index: list
    continuous_terms: list = field(default_factory=list)
    continuous_limit: Optional[bool] = None


def uniform_limit_check(fs: Sequence[SampledFunction], f: SampledFunction, rho: DMetric,
                        eps_schedule: Sequence[Hyp], *, d: Optional[DMetric] = None,
                        probe_point: Any = None, probe_eps: Hyp = Hyp(0.1, 0.1)) -> UniformLimitReport:
    """Uniform convergence of ``fs`` to ``f`` on the shared sample, plus a
    continuity probe at ``probe_point`` (default: the middle sample) for
    every term and for the limit."""
    sigmas = [sigma_sup(g, f, rho) for g in fs]
    s = np.array([(x.u, x.v) for x in sigmas]).reshape(-1, 2)
    tail = np.maximum.accumulate(s[::-1], axis=0)[::-1] if len(s) else s
    index = []
    for e in eps_schedule:
        ok = np.flatnonzero((tail[:, 0] < e.u) & (tail[:, 1] < e.v))
        index.append(int(ok[0]) + 1 if ok.size else None)
    rep = UniformLimitReport(list(eps_schedule), sigmas, index)
    d = d or _default_domain_metric(f)
    if probe_point is None:
        probe_point = f.point(len(f) // 2)

    def continuous(g):
        try:
            continuity_modulus(g, probe_point, probe_eps, d, rho)
            return True
        except NotFound:
            return False

    rep.continuous_terms = [continuous(g) for g in fs]
    rep.continuous_limit = continuous(f)
    return rep
