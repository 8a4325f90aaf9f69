"""S^1-fixed critical strata (Hodge bundles) and their stability constraints.

A Hodge type is a chain of summands V_i of the standard bundle, each with a
rank, a degree and a rational weight, plus the Higgs-field components that
connect them.  The circle acts on the Higgs field with weight one, so every
component has to raise the weight by exactly one.

For GL-type groups a route ``s -> t`` is a map V_s -> V_t (x) K.  For Sp(2n,R)
the Higgs field lives on W = V + V*, where (V_i)* carries weight -w_i:

* a beta route joins V_s, V_t with beta: (V_s)* -> V_t (x) K, so w_s + w_t = 1;
* a gamma route joins V_s, V_t with gamma: V_s -> (V_t)* (x) K, so w_s + w_t = -1.

Both components are symmetric, so a route between s and t is stored once with
s <= t.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .curve import CurveContext
from .errors import ValidationError
from .groups import group_datum

SP_TAGS = ("beta", "gamma")
GL_TAGS = ("phi",)
GL12_RANGE_NOTE = "type-(1,2) degree range read as d/3 < deg L < d/3 + g - 1"


@dataclass(frozen=True)
class Summand:
    rank: int
    degree: int
    weight: Fraction


@dataclass(frozen=True)
class Route:
    source: int
    target: int
    tag: str


@dataclass(frozen=True)
class HodgeType:
    group: object
    summands: tuple
    routes: tuple
    total_degree: int

    def validate(self, distinct_weights=True):
        if sum(s.rank for s in self.summands) != self.group.bundle_rank:
            raise ValidationError(f"summand ranks do not add up to {self.group.bundle_rank}")
        if sum(s.degree for s in self.summands) != self.total_degree:
            raise ValidationError("summand degrees do not add up to the total degree")
        if distinct_weights:
            ws = [s.weight for s in self.summands]
            if len(set(ws)) != len(ws):
                raise ValidationError(f"repeated weights {ws}")
        for r in self.routes:
            if not (0 <= r.source < len(self.summands) and 0 <= r.target < len(self.summands)):
                raise ValidationError(f"route {r} points outside the summand list")
        return self

    @property
    def is_sp(self):
        return self.group.family == "sp"


@dataclass(frozen=True)
class CriticalStratum:
    hodge: HodgeType
    is_phi_zero: bool
    description: str
    params: tuple = ()
    flags: tuple = ()

    def param(self, key, default=None):
        return dict(self.params).get(key, default)

    @property
    def sort_key(self):
        return (self.description, tuple(s.degree for s in self.hodge.summands), self.params)


def make_hodge(group, summands, routes, validate=True):
    summands = tuple(Summand(r, d, Fraction(w)) for r, d, w in summands)
    routes = tuple(Route(*r) for r in routes)
    h = HodgeType(group, summands, routes, sum(s.degree for s in summands))
    return h.validate() if validate else h


def route_weight_gap(h, route):
    """Weight of the target minus weight of the source, read on W = V + V*
    for Sp routes."""
    ws, wt = h.summands[route.source].weight, h.summands[route.target].weight
    if route.tag == "phi":
        return wt - ws
    if route.tag == "beta":
        return wt + ws
    if route.tag == "gamma":
        return -wt - ws
    raise ValidationError(f"unknown route tag {route.tag!r}")


def check_hodge_fixed_point(h):
    allowed = SP_TAGS if h.is_sp else GL_TAGS
    for r in h.routes:
        if r.tag not in allowed:
            return False
        if route_weight_gap(h, r) != 1:
            return False
    return True


# ---------------------------------------------------------------- stability

def slope(rank, degree):
    return Fraction(degree, rank)


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    borderline: bool
    sub_slope: object
    slope: object

    def __bool__(self):
        return self.stable


def _check_invariant(h, sub):
    for r in h.routes:
        if r.source in sub and r.target not in sub:
            raise ValidationError(
                f"subchain {sorted(sub)} is not Higgs-invariant: route "
                f"{r.source}->{r.target} ({r.tag}) leaves it")


def slope_stability_check(chain, subchain):
    """Strict slope test for one Higgs-invariant subchain of a GL-type chain.

    Returns a verdict that is truthy when the subchain does not destabilise;
    equal slopes give a falsy verdict flagged as borderline (polystable
    candidate).  The empty and the full subchain pass vacuously.
    """
    if chain.is_sp:
        raise ValidationError("Sp chains are tested on their doubled chain, see doubled_chain")
    sub = set(subchain)
    if not sub.issubset(range(len(chain.summands))):
        raise ValidationError(f"subchain {sorted(sub)} has indices outside the chain")
    _check_invariant(chain, sub)
    total = slope(sum(s.rank for s in chain.summands), chain.total_degree)
    if not sub or len(sub) == len(chain.summands):
        return StabilityVerdict(True, False, None, total)
    r = sum(chain.summands[i].rank for i in sub)
    d = sum(chain.summands[i].degree for i in sub)
    mu = slope(r, d)
    return StabilityVerdict(mu < total, mu == total, mu, total)


def invariant_subchains(h):
    """All proper nonempty summand subsets closed under the routes."""
    k = len(h.summands)
    out = []
    for size in range(1, k):
        for sub in itertools.combinations(range(k), size):
            s = set(sub)
            if all(r.target in s for r in h.routes if r.source in s):
                out.append(sub)
    return out


def route_bundle(h, route, ctx):
    """(rank, degree) of the bundle the Higgs component is a section of."""
    a, b = h.summands[route.source], h.summands[route.target]
    kd = ctx.canonical_degree
    if route.tag == "phi":
        rank = a.rank * b.rank
        return rank, a.rank * b.degree - b.rank * a.degree + rank * kd
    sign = 1 if route.tag == "beta" else -1
    if route.source == route.target:
        rank = a.rank * (a.rank + 1) // 2
        return rank, sign * (a.rank + 1) * a.degree + rank * kd
    rank = a.rank * b.rank
    return rank, sign * (a.rank * b.degree + b.rank * a.degree) + rank * kd


def nonzero_maps_possible(h, ctx):
    """Each Higgs component needs a bundle of non-negative degree to have a
    nonzero section (necessary, and sufficient for line bundles)."""
    return all(route_bundle(h, r, ctx)[1] >= 0 for r in h.routes)


def _saturation_subobjects(h, ctx):
    """Extra invariant subsheaves of two-step chains with a rank-2 end.

    For phi: L -> V_2 K the saturated image I of L in V_2 has degree at least
    deg L - (2g-2), and L + I is invariant.  For phi: V_1 -> L K the kernel of
    phi is an invariant line subbundle of degree at least
    deg V_1 - deg L - (2g-2).  Returns (rank, least degree) pairs.
    """
    out = []
    kd = ctx.canonical_degree
    for r in h.routes:
        a, b = h.summands[r.source], h.summands[r.target]
        downstream = [x for x in h.routes if x.source == r.target]
        if downstream:
            continue
        if a.rank == 1 and b.rank >= 2:
            out.append((2, a.degree + a.degree - kd))
        if a.rank == 2 and b.rank == 1:
            out.append((1, a.degree - b.degree - kd))
    return out


def is_stable_chain(h, ctx, advisories=None):
    """Stability of a GL-type chain from summand subchains and saturations."""
    total = slope(sum(s.rank for s in h.summands), h.total_degree)
    for sub in invariant_subchains(h):
        v = slope_stability_check(h, sub)
        if v.borderline and advisories is not None:
            advisories.append((h, sub))
        if not v:
            return False
    for rank, least in _saturation_subobjects(h, ctx):
        if slope(rank, least) >= total:
            return False
    return True


# ---------------------------------------------------------------- GL(2), GL(3)

def _coprime_or_raise(n, d):
    if gcd(n, d) != 1:
        raise ValidationError(f"degree {d} is not coprime to rank {n}; singular moduli are out of scope")


def _phi_zero(group, rank, d, label):
    h = make_hodge(group, [(rank, d, 0)], [])
    return CriticalStratum(h, True, "N0_moduli_of_bundles", (("moduli", label),))


def enumerate_gl2_critical(g, d):
    ctx = CurveContext(g).require_moduli()
    _coprime_or_raise(2, d)
    grp = group_datum("gl", n=2)
    out = [_phi_zero(grp, 2, d, f"M(2,{d})")]
    # any stable split type has d/2 < l; a nonzero phi needs l <= d/2 + g - 1
    for l in range(d // 2 - 1, d // 2 + g + 2):
        h = make_hodge(grp, [(1, l, 0), (1, d - l, 1)], [(0, 1, "phi")])
        if nonzero_maps_possible(h, ctx) and is_stable_chain(h, ctx):
            out.append(CriticalStratum(h, False, "type_11",
                                       (("l", l), ("m", d - 2 * l + 2 * g - 2))))
    return out


def enumerate_gl3_critical(g, d):
    ctx = CurveContext(g).require_moduli()
    _coprime_or_raise(3, d)
    grp = group_datum("gl", n=3)
    out = [_phi_zero(grp, 3, d, f"M(3,{d})")]
    window = range(-abs(d) - 3 * g - 3, abs(d) + 3 * g + 4)

    for l in window:
        # the literal reading "3d < deg L" is empty for d >= 1; see GL12_RANGE_NOTE
        if not (Fraction(d, 3) < l < Fraction(d, 3) + g - 1):
            continue
        h = make_hodge(grp, [(1, l, 0), (2, d - l, 1)], [(0, 1, "phi")])
        if nonzero_maps_possible(h, ctx) and is_stable_chain(h, ctx):
            out.append(CriticalStratum(h, False, "type_12", (("l", l),), (GL12_RANGE_NOTE,)))

    for l in window:
        h = make_hodge(grp, [(2, d - l, 0), (1, l, 1)], [(0, 1, "phi")])
        if nonzero_maps_possible(h, ctx) and is_stable_chain(h, ctx):
            out.append(CriticalStratum(h, False, "type_21", (("l", l),)))

    for l1 in window:
        for l2 in window:
            l3 = d - l1 - l2
            h = make_hodge(grp, [(1, l1, 0), (1, l2, 1), (1, l3, 2)],
                           [(0, 1, "phi"), (1, 2, "phi")])
            if nonzero_maps_possible(h, ctx) and is_stable_chain(h, ctx):
                out.append(CriticalStratum(h, False, "type_111",
                                           (("l1", l1), ("l2", l2), ("l3", l3))))
    return out


def gl3_type12_range(g, d):
    """Integer deg L allowed for type (1,2) strata (closed form)."""
    return [l for l in range(d // 3 - 1, d // 3 + g + 1)
            if Fraction(d, 3) < l < Fraction(d, 3) + g - 1]


# ---------------------------------------------------------------- Sp(2n,R)

def milnor_wood_bound(n, g):
    return n * (g - 1)


def _check_sp_args(n, g, d):
    ctx = CurveContext(g).require_moduli()
    if n < 1:
        raise ValidationError(f"Sp(2n,R) needs n >= 1, got {n}")
    bound = milnor_wood_bound(n, g)
    if abs(d) > bound:
        raise ValidationError(f"Toledo invariant {d} violates the Milnor-Wood bound |d| <= n(g-1) = {bound}")
    return ctx


def _norm_routes(routes):
    return [(min(a, b), max(a, b), tag) for a, b, tag in routes]


def _sp_hodge(grp, summands, routes):
    """Sort summands by weight and renumber the routes to match."""
    order = sorted(range(len(summands)), key=lambda i: Fraction(summands[i][2]))
    pos = {old: new for new, old in enumerate(order)}
    s2 = [summands[i] for i in order]
    r2 = _norm_routes([(pos[a], pos[b], t) for a, b, t in routes])
    return make_hodge(grp, s2, sorted(set(r2)))


def sp_routes_for(summands):
    """Every symmetric component allowed by the weights: beta where
    w_a + w_b = 1, gamma where w_a + w_b = -1."""
    routes = []
    for a in range(len(summands)):
        for b in range(a, len(summands)):
            s = Fraction(summands[a][2]) + Fraction(summands[b][2])
            if s == 1:
                routes.append((a, b, "beta"))
            elif s == -1:
                routes.append((a, b, "gamma"))
    return routes


def dual_sp_hodge(h):
    """(V, beta, gamma) -> (V*, gamma^t, beta^t)."""
    swap = {"beta": "gamma", "gamma": "beta"}
    summands = [(s.rank, -s.degree, -s.weight) for s in h.summands]
    routes = [(r.source, r.target, swap[r.tag]) for r in h.routes]
    return _sp_hodge(h.group, summands, routes)


def _dual_stratum(st):
    return CriticalStratum(dual_sp_hodge(st.hodge), st.is_phi_zero, st.description,
                           st.params, st.flags)


def nd_stratum(n, g, d):
    """The family N_d of global minima, as a single-weight Hodge type.

    For d > 0 it is beta = 0 (gamma: V -> V* K, weight -1/2); for d < 0 it is
    gamma = 0 (beta: V* -> V K, weight 1/2); for d = 0 the Higgs field
    vanishes.
    """
    grp = group_datum("sp", n=n)
    if d > 0:
        h = make_hodge(grp, [(n, d, Fraction(-1, 2))], [(0, 0, "gamma")])
        vanishing = "beta"
    elif d < 0:
        h = make_hodge(grp, [(n, d, Fraction(1, 2))], [(0, 0, "beta")])
        vanishing = "gamma"
    else:
        h = make_hodge(grp, [(n, 0, 0)], [])
        vanishing = "beta,gamma"
    return CriticalStratum(h, d == 0, "Nd_sp", (("d", d), ("vanishing", vanishing)))


def isolated_point_summands(n, g):
    """Line summands (rank, degree, weight) of the isolated minima at
    d = -n(g-1): L^-1 K^-2j (n odd) or L K^-2j (n even), deg L = g-1."""
    if n % 2 == 1:
        q = (n - 1) // 2
        return [(1, -(g - 1) * (1 + 4 * j), Fraction(4 * j + 1, 2)) for j in range(-q, q + 1)]
    q = (n - 2) // 2
    return [(1, (g - 1) * (1 - 4 * j), Fraction(4 * j - 1, 2)) for j in range(-q, q + 2)]


def enumerate_sp2nR_minima(n, g, d):
    ctx = _check_sp_args(n, g, d)
    bound = milnor_wood_bound(n, g)
    if n == 2 and abs(d) == bound:
        types = sp4_maximal_types(g)
        return types if d > 0 else [_dual_stratum(s) for s in types]
    out = [nd_stratum(n, g, d)]
    if abs(d) == bound:
        grp = group_datum("sp", n=n)
        summ = isolated_point_summands(n, ctx.genus)
        h = _sp_hodge(grp, summ, sp_routes_for(summ))
        if d > 0:
            h = dual_sp_hodge(h)
        for root in range(2 ** (2 * g)):
            out.append(CriticalStratum(h, False, "isolated_hodge_point",
                                       (("root", root), ("roots", 2 ** (2 * g)))))
    return out


def sp4_maximal_types(g):
    """Hodge strata of the minima on each component of maximal Sp(4,R), d = 2g-2.

    Type 1 is V = L + L^-1 K with deg L = l in [g-1, 3g-3]; the component
    index l - (g-1) runs over [0, 2g-2] and is reported next to l with the
    offset.  At l = 3g-3 there is one stratum per square root L^2 = K^3.
    Type 2 carries the Stiefel-Whitney labels (w1 != 0, w2).  Type 3 is the
    decomposable locus, flagged as polystable.
    """
    ctx = CurveContext(g).require_moduli()
    grp = group_datum("sp", n=2)
    kd = ctx.canonical_degree
    half = Fraction(1, 2)
    beta_zero = make_hodge(grp, [(2, kd, -half)], [(0, 0, "gamma")])
    out = []
    for l in range(g - 1, 3 * g - 2):
        base = (("l", l), ("l_index", l - (g - 1)), ("offset", g - 1))
        if l == g - 1:
            out.append(CriticalStratum(beta_zero, False, "O2_type_1", base + (("minimum", "beta=0"),)))
            continue
        h = make_hodge(grp, [(1, l, -3 * half), (1, kd - l, half)],
                       [(0, 1, "gamma"), (1, 1, "beta")])
        if l < 3 * g - 3:
            out.append(CriticalStratum(h, False, "O2_type_1", base + (("minimum", "beta1=beta3=0"),)))
        else:
            for root in range(2 ** (2 * g)):
                out.append(CriticalStratum(h, False, "O2_type_1",
                                           base + (("minimum", "hitchin"), ("root", root))))
    for w1 in range(1, 2 ** (2 * g)):
        for w2 in (0, 1):
            out.append(CriticalStratum(beta_zero, False, "O2_type_2",
                                       (("w1", w1), ("w2", w2), ("minimum", "beta=0"))))
    out.append(CriticalStratum(beta_zero, False, "O2_type_3", (("minimum", "beta=0"),),
                               ("decomposable", "polystable_not_stable")))
    return out


def doubled_chain(h):
    """GL(2n) chain on W = V + V* carried by an Sp Hodge type.  Summand i of V
    sits at index i, its dual at index k + i."""
    k = len(h.summands)
    grp = group_datum("gl", n=2 * h.group.n)
    summands = [(s.rank, s.degree, s.weight) for s in h.summands]
    summands += [(s.rank, -s.degree, -s.weight) for s in h.summands]
    routes = set()
    for r in h.routes:
        a, b = r.source, r.target
        if r.tag == "beta":
            routes |= {(k + a, b, "phi"), (k + b, a, "phi")}
        else:
            routes |= {(a, k + b, "phi"), (b, k + a, "phi")}
    return make_hodge(grp, summands, sorted(routes), validate=False)


def sp_chain_admissible(h, ctx, advisories=None):
    if not nonzero_maps_possible(h, ctx):
        return False
    w = doubled_chain(h)
    total = Fraction(0)
    for sub in invariant_subchains(w):
        v = slope_stability_check(w, sub)
        if v.borderline and advisories is not None:
            advisories.append((h, sub))
        if v.sub_slope is not None and v.sub_slope >= total:
            return False
    return True


def enumerate_sp2nR_chains(n, g, d, advisories=None):
    """Sp Hodge strata whose doubled bundle is a single chain of 2n line bundles.

    The weights on W run over -(2n-1)/2, ..., (2n-1)/2 and must alternate
    between V and V*, which leaves two weight patterns for V.  Degrees are
    scanned within the a priori bound |deg| < (2n-1)(2g-2) that follows from
    the chain inequalities.
    """
    ctx = _check_sp_args(n, g, d)
    if n < 2:
        return []
    grp = group_datum("sp", n=n)
    chain = [Fraction(2 * k - (2 * n - 1), 2) for k in range(2 * n)]
    bound = (2 * n - 1) * ctx.canonical_degree
    out = []
    for parity in (0, 1):
        weights = sorted(chain[parity::2])
        for degs in itertools.product(range(-bound, bound + 1), repeat=n - 1):
            last = d - sum(degs)
            if abs(last) > bound:
                continue
            summ = [(1, x, w) for x, w in zip(degs + (last,), weights)]
            h = _sp_hodge(grp, summ, sp_routes_for(summ))
            if sp_chain_admissible(h, ctx, advisories):
                out.append(CriticalStratum(h, False, "sp_hodge_chain",
                                           (("degrees", tuple(s.degree for s in h.summands)),)))
    return out


# ---------------------------------------------------------------- records

def format_stratum_record(st, index=None, extra=()):
    """One stratum as a block of 'key: value' lines closed by 'end'."""
    h = st.hodge
    lines = ["stratum"]
    if index is not None:
        lines.append(f"index: {index}")
    lines.append(f"group: {h.group.name}")
    lines.append(f"label: {st.description}")
    lines.append(f"total_degree: {h.total_degree}")
    lines.append(f"phi_zero: {str(st.is_phi_zero).lower()}")
    for k, v in st.params:
        lines.append(f"param: {k}={v}")
    for f in st.flags:
        lines.append(f"flag: {f}")
    for i, s in enumerate(h.summands):
        lines.append(f"summand: {i} rank={s.rank} degree={s.degree} weight={s.weight}")
    for r in h.routes:
        lines.append(f"route: {r.source}->{r.target} {r.tag}")
    for k, v in extra:
        lines.append(f"{k}: {v}")
    lines.append("end")
    return "\n".join(lines)


def stratum_to_dict(st):
    h = st.hodge
    return {
        "group": h.group.name,
        "label": st.description,
        "total_degree": h.total_degree,
        "phi_zero": st.is_phi_zero,
        "params": {k: (list(v) if isinstance(v, tuple) else v) for k, v in st.params},
        "flags": list(st.flags),
        "summands": [{"rank": s.rank, "degree": s.degree, "weight": str(s.weight)}
                     for s in h.summands],
        "routes": [{"source": r.source, "target": r.target, "tag": r.tag} for r in h.routes],
    }


def parse_stratum_records(text):
    """Read back the summand and route tables of format_stratum_record output."""
    out, cur = [], None
    for line in text.splitlines():
        line = line.strip()
        if line == "stratum":
            cur = {"summands": [], "routes": [], "params": {}, "flags": []}
        elif line == "end":
            out.append(cur)
            cur = None
        elif cur is not None and ": " in line:
            key, val = line.split(": ", 1)
            if key == "summand":
                parts = dict(p.split("=") for p in val.split()[1:])
                cur["summands"].append((int(parts["rank"]), int(parts["degree"]),
                                        Fraction(parts["weight"])))
            elif key == "route":
                ends, tag = val.split()
                a, b = ends.split("->")
                cur["routes"].append((int(a), int(b), tag))
            elif key == "param":
                k, v = val.split("=", 1)
                cur["params"][k] = v
            elif key == "flag":
                cur["flags"].append(val)
            else:
                cur[key] = val
    return out
