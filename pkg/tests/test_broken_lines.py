from functools import lru_cache

import pytest

from scatter.base import minus_one_curves
from scatter.broken_lines import (
    InconsistentDiagram,
    enumerate_broken_lines,
    multiply_expansions,
    theta_product,
)
from scatter.relations import surface_pipeline
from scatter.scattering import initial_diagram
from scatter.series import TruncatedSeries


@lru_cache(maxsize=None)
def diagram(name, order):
    return surface_pipeline(name, order)


def _effective_test(s):
    gens = [tuple(g) for g in minus_one_curves(s)] + [tuple(b) for b in s.boundary]
    ample = (10,) + (-1,) * (s.rank - 1)

    @lru_cache(maxsize=None)
    def eff(c):
        if not any(c):
            return True
        if s.intersect(ample, c) <= 0:
            return False
        return any(eff(tuple(x - y for x, y in zip(c, g))) for g in gens)

    return eff


CASES = [("dP5", 4), ("dP4", 5)]


@pytest.mark.parametrize("name,order", CASES)
def test_symmetry(name, order):
    d = diagram(name, order)
    rays = d.base.rays
    for i in range(len(rays)):
        for j in range(len(rays)):
            assert theta_product(d, rays[i], rays[j]) == theta_product(d, rays[j], rays[i])


@pytest.mark.parametrize("name,order", CASES)
@pytest.mark.parametrize("u0", [(1, 1000033), (-999983, 7), (3, -1000037)])
def test_endpoint_independence(name, order, u0):
    d = diagram(name, order)
    rays = d.base.rays
    for i in range(len(rays)):
        for j in range(i, len(rays)):
            assert theta_product(d, rays[i], rays[j]) == theta_product(d, rays[i], rays[j], u0=u0)


@pytest.mark.parametrize("name,order", CASES)
def test_positivity(name, order):
    d = diagram(name, order)
    eff = _effective_test(d.base.surface)
    rays = d.base.rays
    for i in range(len(rays)):
        for j in range(len(rays)):
            for R, s in theta_product(d, rays[i], rays[j]).items():
                for e, c in s.terms.items():
                    assert c > 0
                    assert eff(e[2:]), (R, e)


def test_dp5_associativity():
    order = 4
    d = diagram("dP5", order)
    one = TruncatedSeries.one(d.nvars, order, d.grading)
    rays = [tuple(v) for v in d.base.rays]
    for a, b, c in [(0, 1, 2), (0, 2, 4), (1, 3, 4), (0, 0, 2), (2, 3, 0)]:
        ta, tb, tc = ({rays[k]: one} for k in (a, b, c))
        left = multiply_expansions(d, multiply_expansions(d, ta, tb, order), tc, order)
        right = multiply_expansions(d, ta, multiply_expansions(d, tb, tc, order), order)
        assert left == right


def _phi(d, p):
    return d.base.phi_at(p) if p != (0, 0) else (0,) * (d.nvars - 2)


@pytest.mark.parametrize("name", ["P2", "P1xP1"])
def test_toric_single_term_rule(name):
    d = diagram(name, 1)
    rays = [tuple(v) for v in d.base.rays]
    for P in rays + [(1, 1), (2, -1)]:
        for Q in rays + [(-1, 2)]:
            R = (P[0] + Q[0], P[1] + Q[1])
            prod = theta_product(d, P, Q)
            assert list(prod) == [R]
            (series,) = prod.values()
            assert len(series.terms) == 1
            ((exp, coeff),) = series.terms.items()
            assert coeff == 1
            want = tuple(x + y - z for x, y, z in zip(_phi(d, P), _phi(d, Q), _phi(d, R)))
            assert exp[2:] == want


def test_p2_boundary_product():
    d = diagram("P2", 1)
    s = d.base.surface
    prod = theta_product(d, (1, 1), (-1, -1))
    assert list(prod) == [(0, 0)]
    assert prod[(0, 0)].terms == {(0, 0) + s.parse("H"): 1}


@pytest.mark.parametrize("name,order", CASES)
def test_lines_are_well_formed(name, order):
    d = diagram(name, order)
    for v in d.base.rays:
        for line in enumerate_broken_lines(d, v, order):
            assert line.check()
            assert line.grade < order


def test_inconsistent_diagram_rejected():
    d = diagram("dP5", 3)
    raw = initial_diagram(d.base, order=3)
    with pytest.raises(InconsistentDiagram):
        theta_product(raw, d.base.rays[0], d.base.rays[2])
