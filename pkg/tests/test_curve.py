import itertools
from math import comb

import pytest
from hypothesis import given, strategies as st

from higgsmorse.algebra import Polynomial, poly_mul
from higgsmorse.curve import (CurveContext, chi_bundle, h0_line_bundle, h1_line_bundle,
                              jacobian_poincare, sym_product_poincare)
from higgsmorse.errors import ValidationError


def test_riemann_roch():
    ctx = CurveContext(3)
    assert chi_bundle(ctx, 1, 0) == -2
    assert chi_bundle(ctx, 2, 5) == 1
    with pytest.raises(ValidationError):
        chi_bundle(ctx, 0, 1)


def test_h0_examples():
    ctx = CurveContext(2)
    assert h0_line_bundle(ctx, -1).exact and h0_line_bundle(ctx, -1).upper == 0
    assert h0_line_bundle(ctx, 0, "trivial").upper == 1
    assert h0_line_bundle(ctx, 2, "canonical").upper == 2
    assert h0_line_bundle(ctx, 5).lower == 4
    r = h0_line_bundle(ctx, 1)
    assert (r.lower, r.upper) == (0, 1)
    with pytest.raises(ValidationError):
        h0_line_bundle(ctx, 1, "canonical")


@given(st.integers(0, 7), st.integers(-4, 20))
def test_h0_interval_contains_rr_and_clifford(g, d):
    ctx = CurveContext(g)
    r = h0_line_bundle(ctx, d)
    assert 0 <= r.lower <= r.generic <= r.upper
    # h0 - h1 = chi on both ends of the interval pair
    h1 = h1_line_bundle(ctx, d)
    assert r.lower - h1.lower == chi_bundle(ctx, 1, d)
    if 0 <= d <= 2 * g - 2:
        assert r.upper <= d // 2 + 1


def _sym_oracle(g, m):
    """Graded dimension of Sym^m of H*(X) counted basis monomial by monomial:
    even classes 1, w repeat, the 2g odd classes appear at most once."""
    out = {}
    odd = range(2 * g)
    for k in range(0, min(m, 2 * g) + 1):
        for _subset in itertools.combinations(odd, k):
            for evens in itertools.combinations_with_replacement((0, 2), m - k):
                deg = k + sum(evens)
                out[deg] = out.get(deg, 0) + 1
    return Polynomial(tuple(out.get(i, 0) for i in range(max(out) + 1)))


@pytest.mark.parametrize("g", [0, 1, 2, 3])
@pytest.mark.parametrize("m", [0, 1, 2, 3, 4, 5])
def test_sym_product_matches_monomial_count(g, m):
    assert sym_product_poincare(CurveContext(g), m) == _sym_oracle(g, m)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_sym_product_stabilises_to_jacobian_times_projective(g):
    # for m > 2g-2, S^m X is a P^{m-g} bundle over the Jacobian
    ctx = CurveContext(g)
    m = 2 * g + 1
    proj = Polynomial((1, 0) * (m - g) + (1,))
    assert sym_product_poincare(ctx, m) == poly_mul(jacobian_poincare(ctx), proj)


@pytest.mark.parametrize("g", [0, 1, 2, 4])
def test_jacobian_kunneth(g):
    # product of 2g circles: count subsets of circles by size
    counts = [0] * (2 * g + 1)
    for bits in itertools.product((0, 1), repeat=2 * g):
        counts[sum(bits)] += 1
    assert jacobian_poincare(CurveContext(g)) == Polynomial(counts)
    assert jacobian_poincare(CurveContext(g))(1) == 4 ** g


def test_euler_characteristic_of_sym_product():
    # chi(S^m X) = coefficient of q^m in (1-q)^{2g-2}
    for g in (2, 3):
        for m in range(6):
            chi = sym_product_poincare(CurveContext(g), m)(-1)
            assert chi == (-1) ** m * comb(2 * g - 2, m)


def test_genus_validation():
    with pytest.raises(ValidationError):
        CurveContext(-1)
    with pytest.raises(ValidationError):
        CurveContext(1).require_moduli()
