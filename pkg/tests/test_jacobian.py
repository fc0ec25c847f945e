import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from scatter import dp2
from scatter.jacobian import (
    DimensionError,
    Ideal,
    Poly,
    critical_ideal,
    groebner,
    reduce,
    torus_critical_ideal,
)

XY = ("x", "y")
XYZ = ("x", "y", "z")

monos = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
polys = st.dictionaries(monos, st.integers(-3, 3).filter(bool), min_size=1, max_size=4).map(lambda t: Poly(t, XYZ))
ideals = st.lists(polys, min_size=1, max_size=3)


def _sympy_basis(gens):
    syms = sympy.symbols(XYZ)
    exprs = [sympy.sympify(str(g).replace("^", "**"), locals=dict(zip(XYZ, syms))) for g in gens]
    G = sympy.groebner(exprs, *syms, order="grevlex")
    out = set()
    for g in G.exprs:
        lc = sympy.LC(g, *syms, order="grevlex")
        p = sympy.Poly(sympy.expand(g / lc), *syms)
        out.add(tuple(sorted((m, Fraction(int(c.p), int(c.q))) for m, c in p.terms())))
    return out


def _ours(basis):
    return {tuple(sorted((e, Fraction(c)) for e, c in g.monic().terms.items())) for g in basis}


@settings(max_examples=30, deadline=None)
@given(ideals)
def test_groebner_matches_sympy(gens):
    assert _ours(groebner(gens)) == _sympy_basis(gens)


@settings(max_examples=30, deadline=None)
@given(ideals)
def test_generators_reduce_to_zero(gens):
    basis = groebner(gens)
    for g in gens:
        assert not reduce(g, basis)


@settings(max_examples=30, deadline=None)
@given(ideals)
def test_basis_idempotent(gens):
    basis = groebner(gens)
    assert groebner(basis) == basis


def _zero_dim(rng_coeffs, a, b):
    x, y = Poly.gens(XY)
    lower = [x * y, x, y, Poly.const(1, XY)]
    f = x ** a + sum((Poly.const(c, XY) * m for c, m in zip(rng_coeffs[:4], lower)), Poly.const(0, XY))
    g = y ** b + sum((Poly.const(c, XY) * m for c, m in zip(rng_coeffs[4:], lower)), Poly.const(0, XY))
    return f, g


def _span_dimension(ideal, degree):
    """Rank of the normal forms of all monomials of degree <= degree."""
    nfs = []
    for e in itertools.product(range(degree + 1), repeat=len(ideal.vars)):
        if sum(e) <= degree:
            nfs.append(ideal.normal_form(Poly({e: 1}, ideal.vars)))
    support = sorted({m for p in nfs for m in p.terms})
    M = sympy.Matrix([[sympy.Rational(p.terms.get(m, 0)) for m in support] for p in nfs])
    return M.rank()


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=8, max_size=8), st.integers(-2, 2).filter(bool))
def test_dimension_invariant_under_linear_change(coeffs, t):
    f, g = _zero_dim(coeffs, 3, 3)
    ideal = Ideal([f, g])
    x, y = Poly.gens(XY)
    change = {"x": x + Poly.const(t, XY) * y, "y": y}
    moved = Ideal([f.subs(change), g.subs(change)])
    dim = ideal.quotient_dimension()
    assert dim == 9
    assert moved.quotient_dimension() == dim
    assert _span_dimension(moved, 6) == dim


def test_monomial_ideal():
    assert Ideal([Poly.parse("x^2", XY), Poly.parse("y^2", XY)]).quotient_dimension() == 4


def test_positive_dimensional_ideal():
    assert Ideal([Poly.parse("x*y", XY)]).quotient_dimension() == float("inf")


@pytest.mark.parametrize(
    "W,rank",
    [("x + y + 1/(x*y)", 3), ("x + 1/x + y + 1/y", 4)],
)
def test_torus_ranks(W, rank):
    # the rank of the Jacobian ring is 12 - d for the degree-d del Pezzo
    assert torus_critical_ideal(Poly.parse(W, XY)).quotient_dimension() == rank


def test_dp2_fibre_rank():
    ideal = dp2.jacobian_fibre_ideal()
    assert ideal.quotient_dimension() == 12 - 2
    report = ideal.report()
    assert report["dimension"] == 10
    assert len(report["standardMonomials"]) == 10


def test_dp2_fibre_rank_independent_of_presentation():
    f1, f2 = dp2.family_fibre()
    W = Poly.parse("tC + tL", f1.vars)
    a = critical_ideal([f1, f2], W).quotient_dimension()
    b = critical_ideal([f1, f2 + f1.scale(4)], W).quotient_dimension()
    assert a == b == 10


def test_critical_ideal_needs_enough_variables():
    with pytest.raises(DimensionError):
        critical_ideal([Poly.parse("x", ("x",))], Poly.parse("x", ("x",)))


def test_parser():
    p = Poly.parse(" 2*x^2 - x*y/3 + 1 ", XY)
    assert p.terms == {(2, 0): 2, (1, 1): Fraction(-1, 3), (0, 0): 1}
    assert Poly.parse("x/(x*y)", XY).terms == {(0, -1): 1}
