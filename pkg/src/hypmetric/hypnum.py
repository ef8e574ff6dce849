"""Hyperbolic and bicomplex numbers held in idempotent coordinates.

A hyperbolic number ``a1 + k*a2`` (``k*k == 1``) is stored as the pair
``(u, v)`` with ``u = a1 + a2`` and ``v = a1 - a2``, i.e. ``u*e1 + v*e2``.
In this basis every ring operation, the partial order and the sup/inf of
a finite set are componentwise.  A bicomplex number ``w1 + j*w2`` is
stored the same way as ``z1*e1 + z2*e2`` with complex ``z1, z2``.

The partial order is exact: no epsilon is ever applied, because an
``Incomparable`` verdict carries meaning.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable, NamedTuple

import numpy as np

from .errors import EmptySet, HypOverflow, InvalidReal, ZeroDivisorError

__all__ = [
    "Hyp", "BC", "OrderRel", "Cone", "ConeClass",
    "E1", "E2", "K", "ONE", "ZERO",
    "from_canonical", "to_canonical", "add", "mul", "neg", "sub", "inv",
    "p1", "p2", "classify_cone", "partial_cmp", "precedes", "strictly_precedes",
    "sup_set", "inf_set", "bc_from_cartesian", "bc_to_cartesian",
    "bc_add", "bc_sub", "bc_mul", "hyp_mod", "to_array", "from_array",
]

_isfinite = math.isfinite


def _checked(u, v):
    # Result of an arithmetic op: non-finite means overflow, not bad input.
    if not (_isfinite(u) and _isfinite(v)):
        raise HypOverflow(f"hyperbolic result ({u!r}, {v!r}) is not finite")
    h = _new(Hyp)
    _set_u(h, u)
    _set_v(h, v)
    return h


class Hyp:
    """Hyperbolic number ``u*e1 + v*e2``.

    Immutable.  Arithmetic accepts another ``Hyp`` or a real scalar ``c``,
    which is read as ``c*e1 + c*e2``.  The comparison operators implement
    the partial order, so ``a <= b`` and ``b <= a`` may both be false.
    """

    __slots__ = ("u", "v")

    def __init__(self, u: float, v: float):
        u = float(u)
        v = float(v)
        if not (_isfinite(u) and _isfinite(v)):
            raise InvalidReal(f"hyperbolic coordinates must be finite, got ({u!r}, {v!r})")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def __setattr__(self, name, value):
        raise AttributeError("Hyp is immutable")

    def __delattr__(self, name):
        raise AttributeError("Hyp is immutable")

    def __reduce__(self):
        return (Hyp, (self.u, self.v))

    def __repr__(self):
        return f"Hyp({self.u!r}, {self.v!r})"

    def __iter__(self):
        yield self.u
        yield self.v

    def __eq__(self, other):
        if isinstance(other, Hyp):
            return self.u == other.u and self.v == other.v
        return NotImplemented

    def __hash__(self):
        return hash((self.u, self.v))

    # ring operations

    def __add__(self, other):
        if type(other) is Hyp:
            u = self.u + other.u
            v = self.v + other.v
            # x - x is 0 exactly for finite x and nan for inf/nan
            if u - u == 0.0 and v - v == 0.0:
                h = _new(Hyp)
                _set_u(h, u)
                _set_v(h, v)
                return h
            return _checked(u, v)
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _checked(self.u + other.u, self.v + other.v)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is Hyp:
            u = self.u - other.u
            v = self.v - other.v
            # x - x is 0 exactly for finite x and nan for inf/nan
            if u - u == 0.0 and v - v == 0.0:
                h = _new(Hyp)
                _set_u(h, u)
                _set_v(h, v)
                return h
            return _checked(u, v)
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _checked(self.u - other.u, self.v - other.v)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _checked(other.u - self.u, other.v - self.v)

    def __mul__(self, other):
        if type(other) is Hyp:
            u = self.u * other.u
            v = self.v * other.v
            # x - x is 0 exactly for finite x and nan for inf/nan
            if u - u == 0.0 and v - v == 0.0:
                h = _new(Hyp)
                _set_u(h, u)
                _set_v(h, v)
                return h
            return _checked(u, v)
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _checked(self.u * other.u, self.v * other.v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * inv(other)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * inv(self)

    def __neg__(self):
        return _checked(-self.u, -self.v)

    def __pos__(self):
        return self

    def __abs__(self):
        return _checked(abs(self.u), abs(self.v))

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return inv(self) ** -n
        return _checked(self.u ** n, self.v ** n)

    # partial order

    def __le__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.u <= other.u and self.v <= other.v

    def __lt__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.u < other.u and self.v < other.v

    def __ge__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.u >= other.u and self.v >= other.v

    def __gt__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.u > other.u and self.v > other.v

    @property
    def canonical(self):
        """``(a1, a2)`` with ``self == a1 + k*a2``."""
        return to_canonical(self)

    def is_zero_divisor(self):
        return (self.u == 0.0) != (self.v == 0.0)


def _coerce(x):
    if isinstance(x, Hyp):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)) and not isinstance(x, bool):
        return Hyp(x, x)
    return None


_new = object.__new__
_set_u = Hyp.u.__set__
_set_v = Hyp.v.__set__

E1 = Hyp(1.0, 0.0)
E2 = Hyp(0.0, 1.0)
K = Hyp(1.0, -1.0)
ONE = Hyp(1.0, 1.0)
ZERO = Hyp(0.0, 0.0)


def from_canonical(a1: float, a2: float) -> Hyp:
    """Idempotent coordinates of ``a1 + k*a2``."""
    a1 = float(a1)
    a2 = float(a2)
    if not (_isfinite(a1) and _isfinite(a2)):
        raise InvalidReal(f"canonical coordinates must be finite, got ({a1!r}, {a2!r})")
    return _checked(a1 + a2, a1 - a2)


def to_canonical(x: Hyp) -> tuple[float, float]:
    return ((x.u + x.v) / 2.0, (x.u - x.v) / 2.0)


# The module-level ring operations also take (n, 2) coordinate arrays and
# then act row by row.  IEEE + and * are correctly rounded either way, so the
# batched results are bitwise identical to the scalar ones.


def _batched(x, y):
    return isinstance(x, np.ndarray) or isinstance(y, np.ndarray)


def _rows(x):
    # a lone Hyp broadcasts against every row
    return np.array([x.u, x.v]) if isinstance(x, Hyp) else np.asarray(x, dtype=float)


def _finite_rows(a: np.ndarray) -> np.ndarray:
    if not np.isfinite(a).all():
        raise HypOverflow("hyperbolic result is not finite")
    return a


def add(x, y):
    if _batched(x, y):
        with np.errstate(over="ignore", invalid="ignore"):
            return _finite_rows(np.add(_rows(x), _rows(y)))
    return x + y


def sub(x, y):
    if _batched(x, y):
        with np.errstate(over="ignore", invalid="ignore"):
            return _finite_rows(np.subtract(_rows(x), _rows(y)))
    return x - y


def mul(x, y):
    if _batched(x, y):
        with np.errstate(over="ignore", invalid="ignore"):
            return _finite_rows(np.multiply(_rows(x), _rows(y)))
    return x * y


def neg(x):
    if isinstance(x, np.ndarray):
        return np.negative(x)
    return -x


def inv(x: Hyp) -> Hyp:
    """Multiplicative inverse; only defined off the zero-divisor lines."""
    if x.u == 0.0 or x.v == 0.0:
        raise ZeroDivisorError(f"{x!r} is zero or a zero divisor and has no inverse")
    return _checked(1.0 / x.u, 1.0 / x.v)


def p1(x: Hyp) -> float:
    return x.u


def p2(x: Hyp) -> float:
    return x.v


class Cone(enum.Enum):
    POSITIVE_INTERIOR = "PositiveInterior"
    ZERO_DIVISOR_BOUNDARY = "ZeroDivisorBoundary"
    ZERO = "Zero"
    OUTSIDE = "Outside"


class ConeClass(NamedTuple):
    cone: Cone
    in_d0plus: bool


def classify_cone(x: Hyp) -> ConeClass:
    """Locate ``x`` relative to the positive cone.

    ``in_d0plus`` is reported separately because the closed cone is the
    union of the interior and the nonnegative part of the zero divisors.
    """
    u, v = x.u, x.v
    in_d0plus = u >= 0.0 and v >= 0.0
    if u == 0.0 and v == 0.0:
        cone = Cone.ZERO
    elif u == 0.0 or v == 0.0:
        cone = Cone.ZERO_DIVISOR_BOUNDARY
    elif u > 0.0 and v > 0.0:
        cone = Cone.POSITIVE_INTERIOR
    else:
        cone = Cone.OUTSIDE
    return ConeClass(cone, in_d0plus)


class OrderRel(enum.Enum):
    EQUAL = "Equal"
    STRICT_LESS = "StrictLess"
    STRICT_GREATER = "StrictGreater"
    LESS_EQ_NOT_STRICT = "LessEqNotStrict"
    GREATER_EQ_NOT_STRICT = "GreaterEqNotStrict"
    INCOMPARABLE = "Incomparable"


def precedes(x: Hyp, y: Hyp) -> bool:
    """``x`` precedes-or-equals ``y``, i.e. ``y - x`` lies in the closed cone."""
    return x.u <= y.u and x.v <= y.v


def strictly_precedes(x: Hyp, y: Hyp) -> bool:
    return x.u < y.u and x.v < y.v


def partial_cmp(x: Hyp, y: Hyp) -> OrderRel:
    # Mixed outcomes (one coordinate equal, one strict) are never promoted
    # to a strict relation.
    if x.u == y.u and x.v == y.v:
        return OrderRel.EQUAL
    if x.u < y.u and x.v < y.v:
        return OrderRel.STRICT_LESS
    if x.u > y.u and x.v > y.v:
        return OrderRel.STRICT_GREATER
    if x.u <= y.u and x.v <= y.v:
        return OrderRel.LESS_EQ_NOT_STRICT
    if x.u >= y.u and x.v >= y.v:
        return OrderRel.GREATER_EQ_NOT_STRICT
    return OrderRel.INCOMPARABLE


def sup_set(points: Iterable[Hyp], mode: str = "sup") -> Hyp:
    """Componentwise supremum (``mode="sup"``) or infimum (``mode="inf"``).

    The result is generally not a member of the input.
    """
    if mode not in ("sup", "inf"):
        raise ValueError(f"mode must be 'sup' or 'inf', not {mode!r}")
    pick = max if mode == "sup" else min
    it = iter(points)
    try:
        first = next(it)
    except StopIteration:
        raise EmptySet(f"{mode} of an empty set") from None
    u, v = first.u, first.v
    for p in it:
        u = pick(u, p.u)
        v = pick(v, p.v)
    return Hyp(u, v)


def inf_set(points: Iterable[Hyp]) -> Hyp:
    return sup_set(points, mode="inf")


def to_array(points: Iterable[Hyp]) -> np.ndarray:
    """Stack hyperbolic numbers into an ``(n, 2)`` float array of (u, v) rows."""
    if isinstance(points, np.ndarray):
        return np.asarray(points, dtype=float).reshape(-1, 2)
    return np.array([(p.u, p.v) for p in points], dtype=float).reshape(-1, 2)


def from_array(arr) -> list[Hyp]:
    """Inverse of :func:`to_array`; raises :class:`InvalidReal` on non-finite rows."""
    a = np.asarray(arr, dtype=float).reshape(-1, 2)
    if not np.isfinite(a).all():
        bad = a[~np.isfinite(a).all(axis=1)][0]
        raise InvalidReal(f"hyperbolic coordinates must be finite, got {tuple(bad)}")
    return [_checked(u, v) for u, v in a.tolist()]


# bicomplex numbers


def _finite_complex(z):
    return _isfinite(z.real) and _isfinite(z.imag)


def _bc_checked(z1, z2):
    if not (_finite_complex(z1) and _finite_complex(z2)):
        raise HypOverflow(f"bicomplex result ({z1!r}, {z2!r}) is not finite")
    w = object.__new__(BC)
    object.__setattr__(w, "z1", z1)
    object.__setattr__(w, "z2", z2)
    return w


class BC:
    """Bicomplex number ``z1*e1 + z2*e2`` with ``z1, z2`` in C(i)."""

    __slots__ = ("z1", "z2")

    def __init__(self, z1: complex, z2: complex):
        z1 = complex(z1)
        z2 = complex(z2)
        if not (_finite_complex(z1) and _finite_complex(z2)):
            raise InvalidReal(f"bicomplex components must be finite, got ({z1!r}, {z2!r})")
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)

    def __setattr__(self, name, value):
        raise AttributeError("BC is immutable")

    def __reduce__(self):
        return (BC, (self.z1, self.z2))

    def __repr__(self):
        return f"BC({self.z1!r}, {self.z2!r})"

    def __eq__(self, other):
        if isinstance(other, BC):
            return self.z1 == other.z1 and self.z2 == other.z2
        return NotImplemented

    def __hash__(self):
        return hash((self.z1, self.z2))

    def __add__(self, other):
        if not isinstance(other, BC):
            return NotImplemented
        return _bc_checked(self.z1 + other.z1, self.z2 + other.z2)

    def __sub__(self, other):
        if not isinstance(other, BC):
            return NotImplemented
        return _bc_checked(self.z1 - other.z1, self.z2 - other.z2)

    def __mul__(self, other):
        if not isinstance(other, BC):
            return NotImplemented
        return _bc_checked(self.z1 * other.z1, self.z2 * other.z2)

    def __neg__(self):
        return _bc_checked(-self.z1, -self.z2)

    @property
    def cartesian(self):
        return bc_to_cartesian(self)


def bc_from_cartesian(w1: complex, w2: complex) -> BC:
    """``w1 + j*w2`` in idempotent form: ``z1 = w1 - i*w2``, ``z2 = w1 + i*w2``."""
    w1 = complex(w1)
    w2 = complex(w2)
    if not (_finite_complex(w1) and _finite_complex(w2)):
        raise InvalidReal(f"cartesian components must be finite, got ({w1!r}, {w2!r})")
    return _bc_checked(w1 - 1j * w2, w1 + 1j * w2)


def bc_to_cartesian(w: BC) -> tuple[complex, complex]:
    return ((w.z1 + w.z2) / 2, 1j * (w.z1 - w.z2) / 2)


def bc_add(x: BC, y: BC) -> BC:
    return x + y


def bc_sub(x: BC, y: BC) -> BC:
    return x - y


def bc_mul(x: BC, y: BC) -> BC:
    return x * y


def hyp_mod(w: BC) -> Hyp:
    """Hyperbolic modulus ``|z1|*e1 + |z2|*e2``; always in the closed cone."""
    return _checked(abs(w.z1), abs(w.z2))
