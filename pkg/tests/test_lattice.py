from hypothesis import given, strategies as st

from scatter.lattice import (
    SpecError,
    anticanonical_degree,
    group_order,
    intersect,
    load_surface,
    orbit_expand,
    parse_class,
)

vec = st.lists(st.integers(-5, 5), min_size=4, max_size=4)


@given(vec, vec, vec, st.integers(-4, 4))
def test_intersect_bilinear_and_symmetric(a, b, c, k):
    assert intersect(a, b) == intersect(b, a)
    ab = [x + y for x, y in zip(a, b)]
    assert intersect(ab, c) == intersect(a, c) + intersect(b, c)
    assert intersect([k * x for x in a], c) == k * intersect(a, c)


@given(vec, vec)
def test_anticanonical_degree_additive(a, b):
    ab = [x + y for x, y in zip(a, b)]
    assert anticanonical_degree(ab) == anticanonical_degree(a) + anticanonical_degree(b)


@given(st.lists(st.integers(-2, 3), min_size=8, max_size=8))
def test_orbit_expand_sizes(template):
    template = [abs(template[0])] + template[1:]
    blocks = [[1, 2], [3, 4, 5, 6, 7]]
    orbit = orbit_expand(template, blocks)
    assert group_order(blocks) % len(orbit) == 0
    assert len({anticanonical_degree(c) for c in orbit}) == 1
    assert {c[0] for c in orbit} == {template[0]}


def test_parse_and_fixture_checks():
    s = load_surface("dP5")
    assert parse_class("2H-E1-E3", s) == (2, -1, 0, -1, 0)
    assert s.parse("[D1]+[D2]") == tuple(x + y for x, y in zip(s.boundary[0], s.boundary[1]))
    for name in ("P2", "P1xP1", "dP7", "dP5", "dP4", "dP3", "dP2"):
        load_surface(name).check()


def test_unknown_surface():
    try:
        load_surface("no-such-surface")
    except SpecError as exc:
        assert "dP5" in str(exc)
    else:
        raise AssertionError("expected SpecError")
