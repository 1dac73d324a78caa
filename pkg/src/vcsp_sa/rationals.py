"""Exact rational arithmetic extended with positive infinity.

Finite values are `Q` (gmpy2.mpq when available, else fractions.Fraction);
both are canonical reduced fractions with positive denominator.  `ExtRat`
wraps a finite rational or +infinity: infinity absorbs addition and compares
greater than every finite value.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    Q = Fraction

_INF_HASH = hash(float("inf"))


def rat(num, den=1):
    """Build a finite rational from ints, strings like '3/4', Fraction or mpq."""
    if den != 1:
        return Q(num, den)
    return Q(num)


class ExtRat:
    """A finite rational or +infinity."""

    __slots__ = ("q",)

    def __init__(self, value=0, den=None):
        if isinstance(value, ExtRat):
            self.q = value.q
        elif value is None:
            self.q = None
        elif isinstance(value, str):
            s = value.strip()
            self.q = None if s in ("inf", "+inf", "infinity") else Q(s)
        elif den is not None:
            self.q = Q(value, den)
        else:
            self.q = Q(value)

    @property
    def is_finite(self):
        return self.q is not None

    @property
    def finite(self):
        """The underlying rational; raises on infinity."""
        if self.q is None:
            raise ArithmeticError("value is infinite")
        return self.q

    def _other(self, other):
        if isinstance(other, ExtRat):
            return other.q
        if isinstance(other, (int, Fraction)) or type(other) is type(Q(0)):
            return Q(other)
        return NotImplemented

    def __add__(self, other):
        oq = self._other(other)
        if oq is NotImplemented:
            return NotImplemented
        if self.q is None or oq is None:
            return INF
        return ExtRat(self.q + oq)

    __radd__ = __add__

    def __sub__(self, other):
        oq = self._other(other)
        if oq is NotImplemented:
            return NotImplemented
        if oq is None:
            raise ArithmeticError("cannot subtract infinity")
        if self.q is None:
            return INF
        return ExtRat(self.q - oq)

    def __mul__(self, other):
        oq = self._other(other)
        if oq is NotImplemented:
            return NotImplemented
        if oq is None:
            raise ArithmeticError("multiplication by infinity")
        if self.q is None:
            if oq <= 0:
                raise ArithmeticError("cannot scale infinity by a non-positive factor")
            return INF
        return ExtRat(self.q * oq)

    __rmul__ = __mul__

    def __neg__(self):
        return ExtRat(-self.finite)

    def __eq__(self, other):
        oq = self._other(other)
        if oq is NotImplemented:
            return NotImplemented
        return self.q == oq

    def __lt__(self, other):
        oq = self._other(other)
        if oq is NotImplemented:
            return NotImplemented
        if self.q is None:
            return False
        if oq is None:
            return True
        return self.q < oq

    def __le__(self, other):
        eq = self.__eq__(other)
        lt = self.__lt__(other)
        if eq is NotImplemented or lt is NotImplemented:
            return NotImplemented
        return eq or lt

    def __gt__(self, other):
        le = self.__le__(other)
        return NotImplemented if le is NotImplemented else not le

    def __ge__(self, other):
        lt = self.__lt__(other)
        return NotImplemented if lt is NotImplemented else not lt

    def __hash__(self):
        return _INF_HASH if self.q is None else hash(self.q)

    def __str__(self):
        return "inf" if self.q is None else str(self.q)

    def __repr__(self):
        return f"ExtRat({self})"

    def __bool__(self):
        return self.q is None or self.q != 0


INF = ExtRat(None)
ZERO = ExtRat(0)


def parse_value(token):
    """Parse 'inf', an integer, or 'p/q' into an ExtRat."""
    try:
        return ExtRat(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational value {token!r}") from exc


def format_value(x):
    return str(ExtRat(x))
