"""Exact arithmetic in the quadratic field Q(sqrt(d)).

Used by the exact ("rational") oracle mode so that probabilities at
self-dual points like sqrt(q)/(1+sqrt(q)) can be handled without any
floating-point error.  Elements are ``a + b*sqrt(d)`` with rational a, b.
"""

from __future__ import annotations

import math
from fractions import Fraction


class QSqrt:
    """An element a + b*sqrt(d) of Q(sqrt(d)), d a positive non-square int."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=2):
        if d <= 0 or math.isqrt(d) ** 2 == d:
            raise ValueError("d must be a positive non-square integer")
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    @staticmethod
    def sqrt_of(d):
        """The element sqrt(d); returns a plain Fraction when d is a square."""
        r = math.isqrt(d)
        if r * r == d:
            return Fraction(r)
        return QSqrt(0, 1, d)

    def _coerce(self, other):
        if isinstance(other, QSqrt):
            if other.d != self.d:
                raise ValueError("mixed radicands %d and %d" % (self.d, other.d))
            return other
        if isinstance(other, (int, Fraction)):
            return QSqrt(other, 0, self.d)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt(self.a * o.a + self.d * self.b * o.b,
                     self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # multiply by the conjugate of the denominator
        norm = o.a * o.a - self.d * o.b * o.b
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(%d))" % self.d)
        conj = QSqrt(o.a, -o.b, self.d)
        num = self * conj
        return QSqrt(num.a / norm, num.b / norm, self.d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = QSqrt(1, 0, self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QSqrt):
            return self.d == other.d and self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        diff = self - o
        if diff.a == 0 and diff.b == 0:
            return False
        # sign of a + b*sqrt(d) decided exactly via sign splitting
        a, b = diff.a, diff.b
        if b == 0:
            return a < 0
        if a == 0:
            return b < 0
        if a < 0 and b < 0:
            return True
        if a > 0 and b > 0:
            return False
        # opposite signs: compare a^2 with d*b^2, the larger magnitude wins
        if a > 0:  # b < 0
            return a * a < self.d * b * b
        return a * a > self.d * b * b  # a < 0, b > 0

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o < self

    def __ge__(self, other):
        return self == other or self > other

    def __repr__(self):
        return "QSqrt(%s, %s, d=%d)" % (self.a, self.b, self.d)


def as_exact(x, d=None):
    """Coerce ints/Fractions (and QSqrt) to an exact number, rejecting floats."""
    if isinstance(x, QSqrt):
        return x
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise TypeError("not an exact number: %r" % (x,))
