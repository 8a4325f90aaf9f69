"""Exact integer polynomials and truncated power series in one variable t.

Coefficients are Python ints, so binomial growth never overflows.  Index i of
a coefficient tuple holds the coefficient of t^i.
"""

import re
from dataclasses import dataclass

from .errors import ValidationError


def _strip(coeffs):
    coeffs = [int(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(self.coeffs))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __add__(self, other):
        return poly_add(self, other)

    def __sub__(self, other):
        return poly_add(self, negate(other))

    def __mul__(self, other):
        return poly_mul(self, other)

    def __neg__(self):
        return negate(self)

    def __str__(self):
        return format_poly(self)


ZERO = Polynomial(())
ONE = Polynomial((1,))
T = Polynomial((0, 1))


def monomial(k, c=1):
    if k < 0:
        raise ValidationError(f"negative exponent {k}")
    return Polynomial((0,) * k + (c,))


def poly_add(a, b):
    n = max(len(a.coeffs), len(b.coeffs))
    return Polynomial(tuple(a.coeff(i) + b.coeff(i) for i in range(n)))


def negate(a):
    return Polynomial(tuple(-c for c in a.coeffs))


def poly_mul(a, b):
    if a.is_zero() or b.is_zero():
        return ZERO
    out = [0] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, x in enumerate(a.coeffs):
        if x:
            for j, y in enumerate(b.coeffs):
                out[i + j] += x * y
    return Polynomial(out)


def poly_pow(a, k):
    if k < 0:
        raise ValidationError(f"negative power {k}")
    out = ONE
    for _ in range(k):
        out = poly_mul(out, a)
    return out


def shift_poly(a, k):
    """Multiply by t^k."""
    if k < 0:
        raise ValidationError(f"negative shift {k}")
    if a.is_zero():
        return ZERO
    return Polynomial((0,) * k + a.coeffs)


def is_palindromic(a):
    return a.coeffs == a.coeffs[::-1]


def format_poly(a):
    if a.is_zero():
        return "0"
    terms = []
    for i, c in enumerate(a.coeffs):
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append(f"{c}*t")
        else:
            terms.append(f"{c}*t^{i}")
    return " + ".join(terms)


_TERM = re.compile(r"^([+-]?\d*)(\*?t(?:\^(\d+))?)?$")


def parse_poly(text):
    """Inverse of format_poly.  Also accepts '-' between terms and a bare 't'."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValidationError("empty polynomial string")
    if s == "0":
        return ZERO
    s = re.sub(r"(?<=[\dt])-", "+-", s)
    out = {}
    for tok in s.split("+"):
        m = _TERM.match(tok)
        if not tok or not m or (m.group(1) in ("", "+", "-") and not m.group(2)):
            raise ValidationError(f"cannot parse polynomial term {tok!r} in {text!r}")
        num, tpart, exp = m.groups()
        if num in ("", "+"):
            c = 1
        elif num == "-":
            c = -1
        else:
            c = int(num)
        if tpart and tpart.startswith("*") and num in ("", "+", "-"):
            raise ValidationError(f"dangling '*' in {tok!r}")
        if tpart and not tpart.startswith("*") and num not in ("", "+", "-"):
            raise ValidationError(f"missing '*' in {tok!r}")
        k = 0 if not tpart else int(exp) if exp else 1
        out[k] = out.get(k, 0) + c
    n = max(out) + 1
    return Polynomial(tuple(out.get(i, 0) for i in range(n)))


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series known through t^order.  Coefficients past order are dropped."""
    coeffs: tuple
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise ValidationError(f"negative truncation order {self.order}")
        c = [int(x) for x in self.coeffs[: self.order + 1]]
        c += [0] * (self.order + 1 - len(c))
        object.__setattr__(self, "coeffs", tuple(c))

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i <= self.order else 0

    def to_polynomial(self):
        return Polynomial(self.coeffs)

    def __add__(self, other):
        return series_add(self, other)

    def __sub__(self, other):
        return series_add(self, series_scale(other, -1))

    def __mul__(self, other):
        return series_mul(self, other)

    def __str__(self):
        return format_poly(self.to_polynomial()) + f" + O(t^{self.order + 1})"


def series_from_poly(p, order):
    return TruncatedSeries(p.coeffs, order)


def series_geometric(step, order):
    """1/(1 - t^step) through t^order."""
    if step < 1:
        raise ValidationError(f"geometric series step must be >= 1, got {step}")
    if order < 0:
        raise ValidationError(f"negative truncation order {order}")
    return TruncatedSeries(tuple(1 if i % step == 0 else 0 for i in range(order + 1)), order)


def series_add(a, b):
    order = min(a.order, b.order)
    return TruncatedSeries(tuple(a.coeff(i) + b.coeff(i) for i in range(order + 1)), order)


def series_scale(a, k):
    return TruncatedSeries(tuple(k * c for c in a.coeffs), a.order)


def series_mul(a, b):
    order = min(a.order, b.order)
    out = [0] * (order + 1)
    for i in range(order + 1):
        x = a.coeffs[i]
        if x:
            for j in range(order + 1 - i):
                out[i + j] += x * b.coeffs[j]
    return TruncatedSeries(tuple(out), order)


def series_shift(a, k):
    """Multiply by t^k, dropping whatever falls past the truncation order."""
    if k < 0:
        raise ValidationError(f"negative shift {k}")
    return TruncatedSeries((0,) * k + a.coeffs, a.order)


def default_order(complex_dim):
    """Truncation order that keeps every Betti number of a space of the given
    complex dimension strictly inside the window."""
    return 2 * complex_dim + 4
