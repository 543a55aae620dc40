"""Real quadratic fields Q(sqrt D) with exact rational arithmetic.

Elements are stored as a + b*sqrt(D) with Fraction coefficients. The degree-one
field Q is supported as a fallback (b is always zero there).
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import InvalidFieldError


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def _real_sign(a: Fraction, b: Fraction, D: int) -> int:
    # sign of a + b*sqrt(D), exact
    sa, sb = _sign(a), _sign(b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    return sa if a * a > b * b * D else sb


class NumberField:
    """Q (D=None, degree 1) or the real quadratic field Q(sqrt D)."""

    __slots__ = ("degree", "D", "discriminant", "_t", "_s")

    def __init__(self, D: int | None = None):
        if D is None or D == 1:
            self.degree = 1
            self.D = 1
            self.discriminant = 1
            self._t, self._s = 0, 0
            return
        if isinstance(D, bool) or not isinstance(D, int):
            raise InvalidFieldError(f"D must be an integer, got {D!r}")
        if D < 2 or not is_squarefree(D):
            raise InvalidFieldError(f"D must be a squarefree integer > 1, got {D}")
        self.degree = 2
        self.D = D
        if D % 4 == 1:
            self.discriminant = D
            # omega = (1 + sqrt D)/2, omega^2 = omega + (D-1)/4
            self._t, self._s = 1, (D - 1) // 4
        else:
            self.discriminant = 4 * D
            self._t, self._s = 0, D

    def __eq__(self, other):
        return isinstance(other, NumberField) and other.D == self.D

    def __hash__(self):
        return hash(("NumberField", self.D))

    def __repr__(self):
        return "Q" if self.degree == 1 else f"Q(sqrt({self.D}))"

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    @property
    def omega_relation(self) -> tuple[int, int]:
        """(t, s) with omega^2 = t*omega + s."""
        return self._t, self._s

    def __call__(self, a=0, b=0) -> "FieldElement":
        return FieldElement(self, a, b)

    def element(self, a=0, b=0) -> "FieldElement":
        return FieldElement(self, a, b)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def sqrt_d(self) -> "FieldElement":
        if self.degree == 1:
            raise InvalidFieldError("Q has no sqrt(D) generator")
        return FieldElement(self, 0, 1)

    @property
    def omega(self) -> "FieldElement":
        if self.degree == 1:
            return self.one
        if self.D % 4 == 1:
            return FieldElement(self, Fraction(1, 2), Fraction(1, 2))
        return FieldElement(self, 0, 1)

    def integral_basis(self) -> list["FieldElement"]:
        return [self.one] if self.degree == 1 else [self.one, self.omega]

    def from_coords(self, coords) -> "FieldElement":
        """Element with the given coordinates in the integral basis (1, omega)."""
        if self.degree == 1:
            (x,) = coords
            return FieldElement(self, x)
        x, y = coords
        y = Fraction(y)
        if self.D % 4 == 1:
            return FieldElement(self, Fraction(x) + y / 2, y / 2)
        return FieldElement(self, x, y)

    def different_generator(self) -> "FieldElement":
        if self.degree == 1:
            return self.one
        if self.D % 4 == 1:
            return self.sqrt_d
        return 2 * self.sqrt_d

    def coerce(self, x) -> "FieldElement":
        if isinstance(x, FieldElement):
            if x.field != self:
                raise InvalidFieldError(f"element of {x.field} used in {self}")
            return x
        if isinstance(x, (int, Rational)):
            return FieldElement(self, x)
        raise TypeError(f"cannot coerce {x!r} into {self}")


def make_field(D) -> NumberField:
    """Accepts a squarefree integer D > 1, or 1 / None / 'Q' / 'rational' for Q."""
    if isinstance(D, str):
        s = D.strip().lower()
        if s in ("q", "rational", "1"):
            return NumberField(None)
        try:
            D = int(s)
        except ValueError:
            raise InvalidFieldError(f"cannot parse field {D!r}") from None
    return NumberField(D)


class FieldElement:
    __slots__ = ("field", "a", "b")

    def __init__(self, field: NumberField, a=0, b=0):
        self.field = field
        self.a = Fraction(a)
        self.b = Fraction(b)
        if field.degree == 1 and self.b:
            raise InvalidFieldError("Q elements have no sqrt(D) part")

    def _co(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise InvalidFieldError("mixing elements of different fields")
            return other
        if isinstance(other, (int, Rational)):
            return FieldElement(self.field, other)
        return NotImplemented

    def __add__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, -self.a, -self.b)

    def __sub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        D = self.field.D
        return FieldElement(self.field, self.a * o.a + self.b * o.b * D,
                            self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.field.degree == 1:
            return FieldElement(self.field, 1 / self.a)
        c = self.conjugate()
        return FieldElement(self.field, c.a / n, c.b / n)

    def __truediv__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = FieldElement(self.field, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            return self.b == 0 and self.a == other
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.a == other.a and self.b == other.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.field.D, self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def conjugate(self) -> "FieldElement":
        return FieldElement(self.field, self.a, -self.b)

    def trace(self) -> Fraction:
        return self.a if self.field.degree == 1 else 2 * self.a

    def norm(self) -> Fraction:
        if self.field.degree == 1:
            return self.a
        return self.a * self.a - self.b * self.b * self.field.D

    def is_rational(self) -> bool:
        return self.b == 0

    @property
    def coords(self) -> tuple[Fraction, ...]:
        """Coordinates in the integral basis (1, omega)."""
        if self.field.degree == 1:
            return (self.a,)
        if self.field.D % 4 == 1:
            return (self.a - self.b, 2 * self.b)
        return (self.a, self.b)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def sign(self, embedding: int = 0) -> int:
        b = self.b if embedding == 0 else -self.b
        return _real_sign(self.a, b, self.field.D)

    def signs(self) -> tuple[int, ...]:
        return tuple(self.sign(i) for i in range(self.field.degree))

    def is_totally_positive(self) -> bool:
        return all(s > 0 for s in self.signs())

    def embeddings(self) -> tuple[float, ...]:
        if self.field.degree == 1:
            return (float(self.a),)
        r = math.sqrt(self.field.D)
        return (float(self.a) + float(self.b) * r, float(self.a) - float(self.b) * r)

    def floor(self) -> int:
        """Floor of the first real embedding."""
        m = math.floor(self.embeddings()[0])
        while (self - m).sign() < 0:
            m -= 1
        while (self - (m + 1)).sign() >= 0:
            m += 1
        return m

    def __repr__(self):
        if self.field.degree == 1 or self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.field.D})"

    def to_string(self) -> str:
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt{self.field.D}"
        op = "+" if self.b > 0 else "-"
        return f"{self.a} {op} {abs(self.b)}*sqrt{self.field.D}"


def parse_element(field: NumberField, text: str) -> FieldElement:
    """Parses 'a' or 'a:b' (meaning a + b*sqrt D) with rational a, b."""
    text = text.strip()
    try:
        if ":" in text:
            a, b = text.split(":")
            return field(Fraction(a.strip()), Fraction(b.strip()))
        return field(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise InvalidFieldError(f"cannot parse field element {text!r}") from None
