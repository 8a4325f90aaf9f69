from fractions import Fraction

import pytest

from higgsmorse.critical import (GL12_RANGE_NOTE, check_hodge_fixed_point, doubled_chain,
                                 enumerate_gl2_critical, enumerate_gl3_critical,
                                 enumerate_sp2nR_chains, enumerate_sp2nR_minima,
                                 format_stratum_record, invariant_subchains, make_hodge,
                                 nonzero_maps_possible, parse_stratum_records,
                                 slope_stability_check, sp4_maximal_types)
from higgsmorse.curve import CurveContext
from higgsmorse.errors import ValidationError
from higgsmorse.groups import group_datum

GL2 = group_datum("gl", n=2)
SP4 = group_datum("sp", n=2)


def _l_values(strata, key="l"):
    return sorted(s.param(key) for s in strata if not s.is_phi_zero)


# ---------------------------------------------------------------- fixed points

def test_fixed_point_examples():
    up = make_hodge(GL2, [(1, 1, 0), (1, 0, 1)], [(0, 1, "phi")])
    down = make_hodge(GL2, [(1, 1, 0), (1, 0, 1)], [(1, 0, "phi")])
    assert check_hodge_fixed_point(up)
    assert not check_hodge_fixed_point(down)
    # gamma: V_{1/2} -> (V_{-3/2})^* K raises the weight on V + V* from 1/2 to 3/2
    sp = make_hodge(SP4, [(1, 0, Fraction(1, 2)), (1, 0, Fraction(-3, 2))], [(0, 1, "gamma")])
    assert check_hodge_fixed_point(sp)
    wrong_tag = make_hodge(SP4, [(1, 0, Fraction(1, 2)), (1, 0, Fraction(-3, 2))], [(0, 1, "phi")])
    assert not check_hodge_fixed_point(wrong_tag)


def test_hodge_validation():
    with pytest.raises(ValidationError):
        make_hodge(GL2, [(1, 0, 0), (1, 1, 0)], [])          # repeated weight
    with pytest.raises(ValidationError):
        make_hodge(GL2, [(1, 0, 0)], [])                     # rank 1 != 2


# ---------------------------------------------------------------- stability

def test_slope_examples():
    h = make_hodge(GL2, [(1, 1, 0), (1, 0, 1)], [(0, 1, "phi")])
    v = slope_stability_check(h, {1})
    assert v and v.sub_slope == 0 and v.slope == Fraction(1, 2)
    assert slope_stability_check(h, {0, 1})
    assert slope_stability_check(h, set())


def test_borderline_is_flagged():
    h = make_hodge(GL2, [(1, 1, 0), (1, 1, 1)], [(0, 1, "phi")])
    v = slope_stability_check(h, {1})
    assert not v and v.borderline


def test_non_invariant_subchain_rejected():
    h = make_hodge(GL2, [(1, 1, 0), (1, 0, 1)], [(0, 1, "phi")])
    with pytest.raises(ValidationError, match="0->1"):
        slope_stability_check(h, {0})


# ---------------------------------------------------------------- GL(2)

def _gl2_oracle(g, d):
    return [l for l in range(-20, 40) if 2 * l > d and d - 2 * l + 2 * g - 2 >= 0]


@pytest.mark.parametrize("g", range(2, 7))
@pytest.mark.parametrize("d", [-3, -1, 1, 3])
def test_gl2_matches_scan_oracle(g, d):
    strata = enumerate_gl2_critical(g, d)
    assert _l_values(strata) == _gl2_oracle(g, d)
    assert sum(s.is_phi_zero for s in strata) == 1
    # N0 plus the g-1 admissible values of l
    assert len(strata) == g


def test_gl2_examples():
    assert _l_values(enumerate_gl2_critical(2, 1)) == [1]
    assert _l_values(enumerate_gl2_critical(3, 1)) == [1, 2]
    assert 3 not in _l_values(enumerate_gl2_critical(2, 1))
    with pytest.raises(ValidationError):
        enumerate_gl2_critical(2, 2)
    with pytest.raises(ValidationError):
        enumerate_gl2_critical(1, 1)


# ---------------------------------------------------------------- GL(3)

def _gl3_oracle(g, d):
    """Closed-form stability ranges, written out independently."""
    third = Fraction(d, 3)
    t12 = [l for l in range(-30, 30) if third < l < third + g - 1]
    t21 = [l for l in range(-30, 30) if third - (g - 1) < l < third]
    t111 = []
    for l1 in range(-30, 30):
        for l2 in range(-30, 30):
            l3 = d - l1 - l2
            if (l3 < third and l2 + l3 < 2 * third
                    and l2 - l1 + 2 * g - 2 >= 0 and l3 - l2 + 2 * g - 2 >= 0):
                t111.append((l1, l2, l3))
    return t12, t21, sorted(t111)


@pytest.mark.parametrize("g", [2, 3, 4])
@pytest.mark.parametrize("d", [-4, -2, -1, 1, 2, 4, 5])
def test_gl3_matches_closed_form(g, d):
    strata = enumerate_gl3_critical(g, d)
    t12, t21, t111 = _gl3_oracle(g, d)
    by = lambda lab: [s for s in strata if s.description == lab]
    assert _l_values(by("type_12")) == t12
    assert _l_values(by("type_21")) == t21
    got = sorted((s.param("l1"), s.param("l2"), s.param("l3")) for s in by("type_111"))
    assert got == t111
    assert {s.description for s in strata if not s.is_phi_zero} <= {"type_12", "type_21", "type_111"}
    assert all(GL12_RANGE_NOTE in s.flags for s in by("type_12"))


def test_gl3_examples():
    strata = enumerate_gl3_critical(2, 1)
    assert _l_values([s for s in strata if s.description == "type_12"]) == [1]
    n0 = [s for s in strata if s.is_phi_zero]
    assert len(n0) == 1 and n0[0].param("moduli") == "M(3,1)"
    with pytest.raises(ValidationError):
        enumerate_gl3_critical(2, 3)


# ---------------------------------------------------------------- Sp(2n,R)

def test_nonmaximal_sp_is_nd_only():
    strata = enumerate_sp2nR_minima(2, 2, 1)
    assert len(strata) == 1
    assert strata[0].description == "Nd_sp" and strata[0].param("vanishing") == "beta"
    assert enumerate_sp2nR_minima(3, 3, -2)[0].param("vanishing") == "gamma"


def test_isolated_points_n3():
    strata = enumerate_sp2nR_minima(3, 2, -3)
    iso = [s for s in strata if s.description == "isolated_hodge_point"]
    assert len(iso) == 16
    degs = sorted(x.degree for x in iso[0].hodge.summands)
    # L^-1 K^2, L^-1, L^-1 K^-2 with deg L = g-1 = 1, deg K = 2
    assert degs == [-5, -1, 3]
    assert sum(degs) == -3


@pytest.mark.parametrize("n", [1, 3, 4, 5])
@pytest.mark.parametrize("g", [2, 3])
@pytest.mark.parametrize("sign", [1, -1])
def test_isolated_point_degree_sums(n, g, sign):
    d = sign * n * (g - 1)
    iso = [s for s in enumerate_sp2nR_minima(n, g, d) if s.description == "isolated_hodge_point"]
    assert len(iso) == 2 ** (2 * g)
    assert all(s.hodge.total_degree == d for s in iso)
    assert all(check_hodge_fixed_point(s.hodge) for s in iso)


def test_sp_redirects_and_bounds():
    assert enumerate_sp2nR_minima(2, 2, -2)[0].description.startswith("O2_type")
    with pytest.raises(ValidationError, match="Milnor-Wood"):
        enumerate_sp2nR_minima(2, 2, 3)


def test_sp4_maximal_families():
    types = sp4_maximal_types(2)
    t1 = [s for s in types if s.description == "O2_type_1"]
    assert sorted({s.param("l") for s in t1}) == [1, 2, 3]
    assert sum(1 for s in t1 if s.param("l") == 3) == 16
    assert sorted({s.param("l_index") for s in t1}) == [0, 1, 2]
    assert all(s.param("offset") == 1 for s in t1)
    t2 = [s for s in types if s.description == "O2_type_2"]
    assert len(t2) == 30 and len({(s.param("w1"), s.param("w2")) for s in t2}) == 30
    t3 = [s for s in types if s.description == "O2_type_3"]
    assert t3 and "polystable_not_stable" in t3[0].flags
    with pytest.raises(ValidationError):
        sp4_maximal_types(1)


@pytest.mark.parametrize("g", [2, 3, 4])
def test_sp4_minima_count_matches_component_count(g):
    # one minimum stratum per component: type 1 and type 2 strata
    types = [s for s in sp4_maximal_types(g) if s.description != "O2_type_3"]
    assert len(types) == 3 * 2 ** (2 * g) + 2 * g - 4


# ---------------------------------------------------------------- invariants

def _all_strata():
    out = []
    for g in (2, 3):
        for d in (-1, 1, 3):
            out += enumerate_gl2_critical(g, d)
        for d in (1, 2):
            out += enumerate_gl3_critical(g, d)
        for n in (1, 2, 3):
            for d in range(-n * (g - 1), n * (g - 1) + 1):
                out += enumerate_sp2nR_minima(n, g, d)
                out += enumerate_sp2nR_chains(n, g, d)
    return out


ALL = _all_strata()


def test_every_stratum_is_a_fixed_point_with_consistent_degrees():
    for s in ALL:
        assert check_hodge_fixed_point(s.hodge)
        assert sum(x.degree for x in s.hodge.summands) == s.hodge.total_degree
        if s.is_phi_zero:
            assert not s.hodge.routes


def test_every_phi_nonzero_stratum_is_stable_on_all_invariant_subchains():
    for s in ALL:
        if s.is_phi_zero or "polystable_not_stable" in s.flags:
            continue
        h = doubled_chain(s.hodge) if s.hodge.is_sp else s.hodge
        for sub in invariant_subchains(h):
            v = slope_stability_check(h, sub)
            assert v.sub_slope < v.slope


def test_chains_include_sp4_exceptional_minima():
    ctx = CurveContext(2)
    chains = enumerate_sp2nR_chains(2, 2, 2)
    degs = sorted(tuple(x.degree for x in s.hodge.summands) for s in chains)
    # L at weight -3/2 with g-1 < deg L <= 3g-3, M = L^-1 K at weight 1/2
    assert degs == [(2, 0), (3, -1)]
    assert all(nonzero_maps_possible(s.hodge, ctx) for s in chains)


def test_record_roundtrip():
    strata = enumerate_gl3_critical(2, 1)
    text = "\n".join(format_stratum_record(s, i) for i, s in enumerate(strata))
    back = parse_stratum_records(text)
    assert len(back) == len(strata)
    for rec, s in zip(back, strata):
        assert rec["label"] == s.description
        assert rec["summands"] == [(x.rank, x.degree, x.weight) for x in s.hodge.summands]
        assert rec["routes"] == [(r.source, r.target, r.tag) for r in s.hodge.routes]
