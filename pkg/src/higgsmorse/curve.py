"""Cohomology bookkeeping on a smooth closed curve of genus g."""

from dataclasses import dataclass
from math import comb

from .algebra import Polynomial, poly_pow
from .errors import ValidationError


@dataclass(frozen=True)
class CurveContext:
    genus: int

    def __post_init__(self):
        if self.genus < 0:
            raise ValidationError(f"genus must be >= 0, got {self.genus}")

    @property
    def canonical_degree(self):
        return 2 * self.genus - 2

    def require_moduli(self):
        """Moduli enumeration needs a hyperbolic curve."""
        if self.genus < 2:
            raise ValidationError(f"genus must be >= 2 for moduli computations, got {self.genus}")
        return self


@dataclass(frozen=True)
class SectionCount:
    """h^0 of a line bundle of fixed degree: exact when lower == upper."""
    lower: int
    upper: int
    generic: int

    @property
    def exact(self):
        return self.lower == self.upper


def chi_bundle(ctx, rank, degree):
    """Riemann-Roch: h^0 - h^1 = degree + rank (1 - g)."""
    if rank < 1:
        raise ValidationError(f"rank must be >= 1, got {rank}")
    return degree + rank * (1 - ctx.genus)


def h0_line_bundle(ctx, degree, special=None):
    """Range of h^0 over all line bundles of the given degree.

    ``special`` picks one named bundle instead: "trivial" (degree 0) or
    "canonical" (degree 2g-2).
    """
    g = ctx.genus
    if special is not None:
        if special == "trivial" and degree == 0:
            return SectionCount(1, 1, 1)
        if special == "canonical" and degree == 2 * g - 2:
            return SectionCount(g, g, g)
        raise ValidationError(f"no special bundle {special!r} in degree {degree} at genus {g}")
    if degree < 0:
        return SectionCount(0, 0, 0)
    if degree > 2 * g - 2:
        v = degree - g + 1
        return SectionCount(v, v, v)
    low = max(0, degree - g + 1)
    # Clifford bound; the trivial and canonical bundles attain it at the ends
    return SectionCount(low, degree // 2 + 1, low)


def h1_line_bundle(ctx, degree):
    """Serre duality: h^1(L) = h^0(K L^-1)."""
    return h0_line_bundle(ctx, 2 * ctx.genus - 2 - degree)


def sym_product_poincare(ctx, m):
    """Poincare polynomial of the m-th symmetric product of the curve.

    This is the q^m coefficient of (1+qt)^{2g} / ((1-q)(1-qt^2)).  Expanding,
    a q^k t^k term of the numerator meets q^{m-k} from the two geometric
    factors, which contribute 1 + t^2 + ... + t^{2(m-k)}.
    """
    if m < 0:
        raise ValidationError(f"symmetric product index must be >= 0, got {m}")
    g = ctx.genus
    out = [0] * (2 * m + 1)
    for k in range(min(m, 2 * g) + 1):
        b = comb(2 * g, k)
        for j in range(m - k + 1):
            out[k + 2 * j] += b
    return Polynomial(out)


def jacobian_poincare(ctx):
    return poly_pow(Polynomial((1, 1)), 2 * ctx.genus)
