"""Exact scalars over Q and over F_p (p > 3)."""

from dataclasses import dataclass
from fractions import Fraction


class FieldError(ValueError):
    pass


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: ``p == 0`` is Q, otherwise F_p.

    Scalars are plain Python values: ``Fraction``/``int`` over Q and
    canonical residues ``0 <= x < p`` over F_p.
    """

    p: int = 0

    def __post_init__(self):
        if self.p != 0 and (self.p in (2, 3) or not _is_prime(self.p)):
            raise FieldError(f"unsupported characteristic: {self.p}")

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text == "Q":
            return cls(0)
        if text.startswith("Fp:"):
            try:
                p = int(text[3:])
            except ValueError:
                raise FieldError(f"bad field string {text!r}") from None
            return cls(p)
        raise FieldError(f"bad field string {text!r}; expected 'Q' or 'Fp:<p>'")

    @property
    def is_rational(self):
        return self.p == 0

    def __str__(self):
        return "Q" if self.p == 0 else f"Fp:{self.p}"

    # -- scalar arithmetic -------------------------------------------------

    def coerce(self, x):
        x = Fraction(x)
        if self.p:
            if x.denominator % self.p == 0:
                raise FieldError(f"{x} has denominator divisible by {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return x.numerator if x.denominator == 1 else x

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("division by zero")
        if self.p:
            return pow(a, -1, self.p)
        r = 1 / Fraction(a)
        return r.numerator if r.denominator == 1 else r

    def signed(self, a):
        """Symmetric representative, for printing."""
        if self.p and a > self.p // 2:
            return a - self.p
        return a


Q = FieldSpec(0)


def scalar_arith(op, a, b=None, field=Q):
    a = field.coerce(a)
    if b is not None:
        b = field.coerce(b)
    if op == "add":
        return field.add(a, b)
    if op == "mul":
        return field.mul(a, b)
    if op == "neg":
        return field.neg(a)
    if op == "inv":
        return field.inv(a)
    raise ValueError(f"unknown op {op!r}")
