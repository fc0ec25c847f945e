from fractions import Fraction

from hypothesis import given, settings, strategies as st

from scatter.series import Grading, TruncatedSeries

G = Grading("total", (1, 1))
ORDER = 5

exps = st.tuples(st.integers(0, 3), st.integers(0, 3))
coeffs = st.integers(-3, 3)
series = st.dictionaries(exps, coeffs, max_size=4).map(lambda t: TruncatedSeries(t, ORDER, G))
unit = series.map(lambda s: s + TruncatedSeries.one(2, ORDER, G) - TruncatedSeries({(0, 0): s.constant_term()}, ORDER, G))


@settings(max_examples=60)
@given(series, series, series)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a


@settings(max_examples=40)
@given(unit, st.integers(0, 4), st.integers(0, 4))
def test_int_pow_adds_exponents(a, m, n):
    assert a.int_pow(m) * a.int_pow(n) == a.int_pow(m + n)


@settings(max_examples=40)
@given(unit, st.integers(1, 4))
def test_negative_powers_and_inverse(a, n):
    one = TruncatedSeries.one(2, ORDER, G)
    assert a * a.inverse() == one
    assert a.int_pow(-n) * a.int_pow(n) == one


@settings(max_examples=40)
@given(series)
def test_exp_log_round_trip(a):
    x = a - TruncatedSeries({(0, 0): a.constant_term()}, ORDER, G)
    assert x.exp_series().log_series() == x


@settings(max_examples=40)
@given(series, series)
def test_exact_coefficients(a, b):
    for c in (a * b).terms.values():
        assert isinstance(c, (int, Fraction))


def test_truncation_drops_high_degree():
    s = TruncatedSeries({(0, 0): 1, (2, 2): 1, (4, 1): 3}, ORDER, G)
    assert s.terms == {(0, 0): 1, (2, 2): 1}


def test_text_round_trip():
    s = TruncatedSeries({(0, 0): 1, (1, 2): Fraction(-3, 2)}, ORDER, G)
    assert TruncatedSeries.from_text(s.to_text(), ORDER, G) == s
