"""Deformation complexes at Hodge bundles, Morse indices and Poincare assembly.

At a Hodge bundle the deformation complex C_mu: (E_H h^C)_mu -> (E_H m^C)_{mu+1} (x) K
splits by circle weight, and the Morse index counts the mu > 0 pieces.
Component bundles are tracked as (rank, degree, key) triples, where the key
names the summands involved so the genericity of ad(phi) can be checked.
"""

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (Polynomial, TruncatedSeries, poly_add, poly_mul, poly_pow,
                      series_from_poly, series_geometric, series_mul, series_shift,
                      shift_poly)
from .critical import check_hodge_fixed_point
from .curve import (SectionCount, chi_bundle, h0_line_bundle, h1_line_bundle,
                    jacobian_poincare, sym_product_poincare)
from .errors import ValidationError


@dataclass(frozen=True)
class Component:
    rank: int
    degree: int
    key: tuple


@dataclass(frozen=True)
class ComplexPiece:
    weight: Fraction
    source: tuple        # components of (h^C)_mu
    target: tuple        # components of (m^C)_{mu+1} (x) K

    @property
    def source_rank(self):
        return sum(c.rank for c in self.source)

    @property
    def source_degree(self):
        return sum(c.degree for c in self.source)

    @property
    def target_rank(self):
        return sum(c.rank for c in self.target)

    @property
    def target_degree(self):
        return sum(c.degree for c in self.target)


def _hom_components(h):
    """Hom(V_a, V_b) has weight w_b - w_a (ad(phi) raises the weight by one)."""
    out = []
    for a, sa in enumerate(h.summands):
        for b, sb in enumerate(h.summands):
            out.append((sb.weight - sa.weight,
                        Component(sa.rank * sb.rank, sa.rank * sb.degree - sb.rank * sa.degree,
                                  ("hom", a, b))))
    return out


def _sym_components(h):
    """Sym^2 V and Sym^2 V* pieces of m^C for Sp(2n,R)."""
    out = []
    s = h.summands
    for a in range(len(s)):
        for b in range(a, len(s)):
            if a == b:
                rank = s[a].rank * (s[a].rank + 1) // 2
                deg = (s[a].rank + 1) * s[a].degree
            else:
                rank = s[a].rank * s[b].rank
                deg = s[a].rank * s[b].degree + s[b].rank * s[a].degree
            w = s[a].weight + s[b].weight
            out.append((w, Component(rank, deg, ("sym", a, b))))
            out.append((-w, Component(rank, -deg, ("symd", a, b))))
    return out


def _twist(c, ctx):
    return Component(c.rank, c.degree + c.rank * ctx.canonical_degree, c.key)


def deformation_pieces(h, ctx):
    """One piece per weight present in either term; the target already carries K."""
    if not check_hodge_fixed_point(h):
        raise ValidationError("deformation complex needs an S^1-fixed Hodge type")
    fam = h.group.family
    source = _hom_components(h)
    if fam == "gl":
        target = source
    elif fam == "sp":
        target = _sym_components(h)
    else:
        raise ValidationError(f"no deformation complex routing for {h.group.name}")
    weights = sorted({w for w, _ in source} | {w - 1 for w, _ in target})
    pieces = []
    for mu in weights:
        src = tuple(c for w, c in source if w == mu)
        tgt = tuple(_twist(c, ctx) for w, c in target if w == mu + 1)
        if src or tgt:
            pieces.append(ComplexPiece(mu, src, tgt))
    return pieces


def _images(h, key):
    """Target keys reached by ad(phi) from a source component Hom(V_a, V_b)."""
    _, a, b = key
    out = set()
    for r in h.routes:
        if r.tag == "phi":
            if r.source == b:
                out.add(("hom", a, r.target))
            if r.target == a:
                out.add(("hom", r.source, b))
        elif r.tag == "beta":
            ends = (r.source, r.target)
            if a in ends:
                c = ends[1] if ends[0] == a else ends[0]
                out.add(("sym", min(c, b), max(c, b)))
        elif r.tag == "gamma":
            ends = (r.source, r.target)
            if b in ends:
                c = ends[1] if ends[0] == b else ends[0]
                out.add(("symd", min(a, c), max(a, c)))
    return out


def piece_is_generic(h, piece):
    """Every source component maps somewhere and every target component is hit."""
    targets = {c.key for c in piece.target}
    hit = set()
    for c in piece.source:
        im = _images(h, c.key) & targets
        if not im:
            return False
        hit |= im
    return hit == targets


def piece_is_isomorphism(h, piece):
    return (piece.source_rank == piece.target_rank
            and piece.source_degree == piece.target_degree
            and piece_is_generic(h, piece))


@dataclass(frozen=True)
class WeightEntry:
    weight: Fraction
    h1: object           # int, or None when unresolved
    lower: int
    upper: object        # int or None (unbounded)
    status: str          # isomorphism, vanishing, UNRESOLVED
    assumptions: tuple


@dataclass(frozen=True)
class IndexReport:
    index: object        # even int, or None when some piece is unresolved
    lower: int
    upper: object
    per_weight: tuple

    @property
    def resolved(self):
        return self.index is not None


def _chi(ctx, comps):
    return sum(chi_bundle(ctx, c.rank, c.degree) for c in comps)


def _h0_upper(ctx, comps):
    total = 0
    for c in comps:
        if c.rank != 1:
            return None
        total += h0_line_bundle(ctx, c.degree).upper
    return total


def _h1_upper(ctx, comps):
    total = 0
    for c in comps:
        if c.rank != 1:
            return None
        total += h1_line_bundle(ctx, c.degree).upper
    return total


def _piece_h1(h, piece, ctx):
    if piece_is_isomorphism(h, piece):
        return WeightEntry(piece.weight, 0, 0, 0, "isomorphism", ("ad(phi) iso on this piece",))
    chi = _chi(ctx, piece.source) - _chi(ctx, piece.target)
    h0_zero = all(c.rank == 1 and c.degree < 0 for c in piece.source)
    h2_zero = all(c.rank == 1 and c.degree > ctx.canonical_degree for c in piece.target)
    notes = []
    if h0_zero:
        notes.append("H0=0: negative-degree source lines")
    if h2_zero:
        notes.append("H2=0: target empty or of degree > 2g-2")
    if h0_zero and h2_zero:
        return WeightEntry(piece.weight, -chi, -chi, -chi, "vanishing", tuple(notes))
    h0u = 0 if h0_zero else _h0_upper(ctx, piece.source)
    h2u = 0 if h2_zero else _h1_upper(ctx, piece.target)
    upper = None if h0u is None or h2u is None else -chi + h0u + h2u
    return WeightEntry(piece.weight, None, max(0, -chi), upper, "UNRESOLVED", tuple(notes))


def morse_index(h, ctx):
    """Real index 2 * sum over mu > 0 of dim H^1(C_mu)."""
    if not check_hodge_fixed_point(h):
        raise ValidationError("Morse index needs an S^1-fixed Hodge type")
    entries = [_piece_h1(h, p, ctx) for p in deformation_pieces(h, ctx) if p.weight > 0]
    lower = 2 * sum(e.lower for e in entries)
    if all(e.h1 is not None for e in entries):
        idx = 2 * sum(e.h1 for e in entries)
        return IndexReport(idx, idx, idx, tuple(entries))
    upper = None if any(e.upper is None for e in entries) else 2 * sum(e.upper for e in entries)
    return IndexReport(None, lower, upper, tuple(entries))


@dataclass(frozen=True)
class MinimumCertificate:
    is_minimum: bool
    rows: tuple          # (mu, source rank, target rank, source degree, target degree, generic)

    def __bool__(self):
        return self.is_minimum


def is_local_minimum(h, ctx):
    rows = []
    ok = True
    for p in deformation_pieces(h, ctx):
        if p.weight <= 0:
            continue
        generic = piece_is_generic(h, p)
        rows.append((p.weight, p.source_rank, p.target_rank, p.source_degree,
                     p.target_degree, generic))
        if not (p.source_rank == p.target_rank and p.source_degree == p.target_degree and generic):
            ok = False
    return MinimumCertificate(ok, tuple(rows))


# ---------------------------------------------------------------- rank two

def negative_normal_dimension(l, deg_e, ctx):
    """2l - deg E + g - 1 + h^0(L1* L2 K), as an interval over the h^0 range."""
    base = 2 * l - deg_e + ctx.genus - 1
    h0 = h0_line_bundle(ctx, deg_e - 2 * l + ctx.canonical_degree)
    return SectionCount(base + h0.lower, base + h0.upper, base + h0.generic)


def poincare_assemble(strata):
    total = Polynomial(())
    for index, poly in strata:
        if index < 0 or index % 2:
            raise ValidationError(f"Morse index {index} must be even and non-negative")
        total = poly_add(total, shift_poly(poly, index))
    return total


def gl2_stratum_poincare(l, d, ctx):
    """P_t of the (l)-stratum: pairs (L1, divisor of phi) = S^m X x Jac."""
    m = d - 2 * l + ctx.canonical_degree
    return poly_mul(sym_product_poincare(ctx, m), jacobian_poincare(ctx))


def gl2_assembly_terms(g, d, n0_poly, ctx=None):
    from .critical import enumerate_gl2_critical
    from .curve import CurveContext
    ctx = ctx or CurveContext(g)
    terms = []
    for st in enumerate_gl2_critical(g, d):
        if st.is_phi_zero:
            terms.append((0, n0_poly))
            continue
        rep = morse_index(st.hodge, ctx)
        if not rep.resolved:
            raise ValidationError(f"unresolved index on stratum {st.params}")
        terms.append((rep.index, gl2_stratum_poincare(st.param("l"), d, ctx)))
    return terms


@dataclass(frozen=True)
class DWWWSeries:
    first: TruncatedSeries
    second: TruncatedSeries
    difference: TruncatedSeries
    shift: int


def dwww_difference(l, deg_e, ctx, order):
    """The two Thom-isomorphism contributions to P(X_d) - P(X_{d-1}).

    first  = t^s (1+t)^{4g} / (1-t^2)^2
    second = t^s P(S^m X) (1+t)^{2g} / (1-t^2)
    with s = 2l - deg E + g - 1 and m = 2g - 2 + deg E - 2l.
    """
    g = ctx.genus
    s = 2 * l - deg_e + g - 1
    m = ctx.canonical_degree + deg_e - 2 * l
    if s < 0:
        raise ValidationError(f"negative shift {s}")
    if m < 0:
        raise ValidationError(f"negative symmetric product index {m}")
    if order < s:
        raise ValidationError(f"truncation order {order} is below the shift {s}")
    geo = series_geometric(2, order)
    one_plus_t = Polynomial((1, 1))
    first = series_mul(series_from_poly(poly_pow(one_plus_t, 4 * g), order), series_mul(geo, geo))
    second = series_mul(
        series_from_poly(poly_mul(sym_product_poincare(ctx, m), poly_pow(one_plus_t, 2 * g)), order),
        geo)
    first, second = series_shift(first, s), series_shift(second, s)
    return DWWWSeries(first, second, first - second, s)


def admissible_l(g, deg_e):
    """Integer l with deg E / 2 < l and 2g - 2 + deg E - 2l >= 0."""
    return [l for l in range(deg_e // 2 - 1, deg_e // 2 + g + 1)
            if 2 * l > deg_e and 2 * g - 2 + deg_e - 2 * l >= 0]
