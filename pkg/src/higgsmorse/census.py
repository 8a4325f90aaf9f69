"""Connected-component counts and discrete invariants for Sp(2n,R)."""

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .curve import CurveContext
from .errors import ConsistencyError, ValidationError
from .groups import group_datum


class _Unknown:
    """Marker for a count that is only conjectured."""

    def __repr__(self):
        return "UNKNOWN"

    __str__ = __repr__


UNKNOWN = _Unknown()


@dataclass(frozen=True)
class ComponentReport:
    group: object
    genus: int
    toledo: int
    total: object                # int or UNKNOWN
    breakdown: tuple             # (label, count, provenance)

    def __post_init__(self):
        if self.total is not UNKNOWN:
            s = sum(c for _, c, _ in self.breakdown)
            if s != self.total:
                raise ConsistencyError(f"breakdown sums to {s}, total is {self.total}")


@dataclass(frozen=True)
class CayleyDatum:
    rank: int
    degree: int
    sw1_classes: int
    sw2_classes: int
    twisted_side: str            # gamma for d > 0, beta for d < 0

    @property
    def label_space_size(self):
        return self.sw1_classes * self.sw2_classes


def _ctx(g):
    return CurveContext(g).require_moduli()


def milnor_wood(n, g):
    _ctx(g)
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    b = n * (g - 1)
    return (-b, b)


def resolve_toledo(value, n, g):
    """Accept an integer or the keyword 'max' (n(g-1))."""
    if isinstance(value, str):
        v = value.strip().lower()
        if v == "max":
            return milnor_wood(n, g)[1]
        if v in ("min", "-max"):
            return milnor_wood(n, g)[0]
        try:
            return int(v)
        except ValueError:
            raise ValidationError(f"cannot read Toledo invariant {value!r}") from None
    return int(value)


def count_sp2nR_maximal(n, g):
    if n < 3:
        raise ValidationError("n < 3 at maximal Toledo is handled by count_sp4_maximal (n=2) "
                              "or has no exceptional components (n=1)")
    _ctx(g)
    roots = 2 ** (2 * g)
    breakdown = (
        ("M_{w1,w2}", 2 * roots, "Stiefel-Whitney classes of the Cayley partner"),
        ("Hitchin", roots, "square roots of K"),
    )
    return ComponentReport(group_datum("sp", n=n), g, n * (g - 1), 3 * roots, breakdown)


def count_sp4_maximal(g):
    _ctx(g)
    roots = 2 ** (2 * g)
    breakdown = (
        ("M_{w1,w2}, w1 != 0", 2 * (roots - 1), "non-trivial first Stiefel-Whitney class"),
        ("M^0_l, 0 <= l < 2g-2", 2 * g - 2, "Euler class of the SO(2) reduction"),
        ("M_{K^{3/2}}", roots, "square roots of K^3 (Hitchin components)"),
    )
    return ComponentReport(group_datum("sp", n=2), g, 2 * (g - 1), 3 * roots + 2 * g - 4, breakdown)


def count_sp2nR_nonmaximal(n, g, d):
    lo, hi = milnor_wood(n, g)
    if not lo < d < hi:
        raise ValidationError(f"|d| = {abs(d)} is not below the Milnor-Wood bound {hi}")
    grp = group_datum("sp", n=n)
    if n <= 2:
        return ComponentReport(grp, g, d, 1, (("M_d", 1, "connected"),))
    if d == 0:
        return ComponentReport(grp, g, d, 1, (("M_0", 1, "M(n,0) connected"),))
    return ComponentReport(grp, g, d, UNKNOWN, (("M_d", UNKNOWN, "conjectured 1"),))


def census(n, g, d):
    """Dispatch on (n, d) to the right count."""
    lo, hi = milnor_wood(n, g)
    if not lo <= d <= hi:
        raise ValidationError(f"Toledo invariant {d} violates the Milnor-Wood bound |d| <= {hi}")
    if abs(d) < hi:
        return count_sp2nR_nonmaximal(n, g, d)
    if n == 1:
        roots = 2 ** (2 * g)
        return ComponentReport(group_datum("sp", n=1), g, d, roots,
                               (("Hitchin", roots, "square roots of K"),))
    rep = count_sp4_maximal(g) if n == 2 else count_sp2nR_maximal(n, g)
    return ComponentReport(rep.group, g, d, rep.total, rep.breakdown)


def cayley_partner(n, g, d, deg_v):
    bound = milnor_wood(n, g)[1]
    if abs(d) != bound:
        raise ValidationError(f"Cayley partner needs |d| = n(g-1) = {bound}, got {d}: "
                              "neither beta nor gamma is forced to be an isomorphism")
    if deg_v != d:
        raise ValidationError(f"deg V = {deg_v} differs from the Toledo invariant {d}")
    if d > 0:
        return CayleyDatum(n, deg_v - bound, 2 ** (2 * g), 2, "gamma")
    return CayleyDatum(n, deg_v + bound, 2 ** (2 * g), 2, "beta")


@dataclass(frozen=True)
class SigmaPair:
    sigma: Fraction
    v: int
    chamber: object      # int, or "wall"


def sigma_pair_map(d, l, g):
    """Parameter of the stable pair attached to a type-(1,2) stratum.

    sigma = l/2 - d/6 and v = d - l + 2g - 2.  Walls sit where v/2 - sigma is
    an integer; chamber i is the open interval (v/2 - i - 1, v/2 - i).
    """
    _ctx(g)
    sigma = Fraction(l, 2) - Fraction(d, 6)
    v = d - l + 2 * g - 2
    if not 0 <= sigma <= Fraction(v, 2):
        raise ValidationError(f"sigma = {sigma} lies outside [0, v/2] = [0, {Fraction(v, 2)}]")
    x = Fraction(v, 2) - sigma
    if x.denominator == 1:
        return SigmaPair(sigma, v, "wall")
    return SigmaPair(sigma, v, floor(x))


def hitchin_base_dim(n, g):
    """Sum of h^0(K^{2i}), i = 1..n, checked against (g-1)(2n^2+n)."""
    ctx = _ctx(g)
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    table = []
    for i in range(1, n + 1):
        p = 2 * i
        table.append((p, (2 * p - 1) * (ctx.genus - 1)))
    total = sum(h for _, h in table)
    closed = (g - 1) * (2 * n * n + n)
    if total != closed:
        raise ConsistencyError(f"Hitchin base dimension {total} != (g-1)(2n^2+n) = {closed}")
    return total, tuple(table)


def report_to_csv(rep):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group", "g", "d", "label", "count", "provenance"])
    for label, count, prov in rep.breakdown:
        w.writerow([rep.group.name, rep.genus, rep.toledo, label, count, prov])
    w.writerow([rep.group.name, rep.genus, rep.toledo, "total", rep.total, ""])
    return buf.getvalue()
