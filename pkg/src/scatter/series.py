"""Truncated power series over the monoid algebra of (direction, class) exponents.

An exponent is a flat integer tuple ``(a, b, v0, ..., vk)``: the first two
entries are the tangent direction in Z^2, the rest the curve-class part.
Series are truncated by a linear :class:`Grading`; every term whose degree is
``>= order`` is dropped.  Coefficients are exact (``int`` or ``Fraction``).
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from operator import add

__all__ = [
    "Grading",
    "TruncatedSeries",
    "GradingError",
    "InversionError",
    "DomainError",
    "power_cache",
    "power_cache_stats",
    "format_term",
    "parse_term",
]


class GradingError(ValueError):
    pass


class InversionError(ArithmeticError):
    pass


class DomainError(ValueError):
    pass


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


@dataclass(frozen=True)
class Grading:
    """Linear functional on exponents used for truncation."""

    name: str
    weights: tuple

    def degree(self, exp) -> int:
        return sum(w * x for w, x in zip(self.weights, exp) if w)


class PowerCache:
    """Hit/miss bookkeeping for cached integer powers.

    The cached values live on each series (``series._powers``); this object
    only counts and can switch caching off globally.
    """

    def __init__(self):
        self.enabled = True
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def record(self, hit: bool):
        with self._lock:
            if hit:
                self.hits += 1
            else:
                self.misses += 1

    def reset(self):
        with self._lock:
            self.hits = 0
            self.misses = 0

    def stats(self) -> dict:
        return {"enabled": self.enabled, "hits": self.hits, "misses": self.misses}


power_cache = PowerCache()


def power_cache_stats() -> dict:
    return power_cache.stats()


class TruncatedSeries:
    __slots__ = ("terms", "order", "grading", "_graded", "_powers")

    def __init__(self, terms, order: int, grading: Grading, _trusted: bool = False):
        if order < 1:
            raise ValueError("truncation order must be >= 1")
        self.order = order
        self.grading = grading
        if _trusted:
            self.terms = terms
        else:
            deg = grading.degree
            self.terms = {
                tuple(e): _norm(c) for e, c in terms.items() if c != 0 and deg(e) < order
            }
        self._graded = None
        self._powers = {}

    # -- constructors ---------------------------------------------------------

    @classmethod
    def one(cls, nvars: int, order: int, grading: Grading) -> "TruncatedSeries":
        return cls({(0,) * nvars: 1}, order, grading)

    @classmethod
    def zero(cls, order: int, grading: Grading) -> "TruncatedSeries":
        return cls({}, order, grading, _trusted=True)

    @classmethod
    def monomial(cls, exp, order: int, grading: Grading, coeff=1) -> "TruncatedSeries":
        return cls({tuple(exp): coeff}, order, grading)

    # -- basic protocol -------------------------------------------------------

    @property
    def nvars(self):
        for e in self.terms:
            return len(e)
        return len(self.grading.weights)

    def graded_terms(self):
        """Terms as ``(exp, coeff, degree)`` sorted by degree."""
        if self._graded is None:
            deg = self.grading.degree
            self._graded = sorted(
                ((e, c, deg(e)) for e, c in self.terms.items()), key=lambda t: (t[2], t[0])
            )
        return self._graded

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.terms == other.terms and self.order == other.order
        return NotImplemented

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.order))

    def coefficient(self, exp):
        return self.terms.get(tuple(exp), 0)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.constant_term() == 1

    def min_positive_degree(self):
        degs = [g for _, _, g in self.graded_terms() if g > 0]
        return min(degs) if degs else None

    def _check(self, other):
        if self.grading != other.grading:
            raise GradingError(f"grading mismatch: {self.grading.name} vs {other.grading.name}")
        return min(self.order, other.order)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.terms, min(order, self.order), self.grading)

    # -- ring operations ------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self._const(other)
        order = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return TruncatedSeries(out, order, self.grading)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries({e: -c for e, c in self.terms.items()}, self.order, self.grading, True)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self._const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _const(self, c):
        return TruncatedSeries({(0,) * self.nvars: c}, self.order, self.grading)

    def scale(self, c) -> "TruncatedSeries":
        if c == 0:
            return TruncatedSeries.zero(self.order, self.grading)
        return TruncatedSeries(
            {e: _norm(v * c) for e, v in self.terms.items()}, self.order, self.grading, True
        )

    def shift(self, exp, coeff=1) -> "TruncatedSeries":
        """Multiply by the monomial ``coeff * z^exp``."""
        return self * TruncatedSeries.monomial(exp, self.order, self.grading, coeff)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        order = self._check(other)
        a, b = self.graded_terms(), other.graded_terms()
        if len(a) > len(b):
            a, b = b, a
        out = {}
        get = out.get
        for ea, ca, ga in a:
            lim = order - ga
            for eb, cb, gb in b:
                if gb >= lim:
                    break
                e = tuple(map(add, ea, eb))
                out[e] = get(e, 0) + ca * cb
        return TruncatedSeries(
            {e: _norm(c) for e, c in out.items() if c != 0}, order, self.grading, True
        )

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedSeries":
        """Inverse of a series with constant term 1 by geometric expansion."""
        if self.constant_term() != 1:
            raise InversionError("inversion needs constant term 1")
        u = self - 1
        if any(g <= 0 for _, _, g in u.graded_terms()):
            raise InversionError("non-constant terms must have positive degree")
        result = TruncatedSeries.one(self.nvars, self.order, self.grading)
        term = result
        neg_u = -u
        while True:
            term = term * neg_u
            if not term.terms:
                return result
            result = result + term

    def __pow__(self, n: int):
        return self.int_pow(n)

    def int_pow(self, n: int) -> "TruncatedSeries":
        """``self ** n`` for any integer n, memoized on this series."""
        if n == 0:
            return TruncatedSeries.one(self.nvars, self.order, self.grading)
        if n == 1:
            return self
        cache = power_cache.enabled
        if cache:
            hit = self._powers.get(n)
            power_cache.record(hit is not None)
            if hit is not None:
                return hit
        if n < 0:
            inv = self._powers.get(-1) if cache else None
            if inv is None:
                inv = self.inverse()
                if cache:
                    self._powers[-1] = inv
            result = inv if n == -1 else inv.int_pow(-n)
        else:
            step = 1 if n > 0 else -1
            prev = self._powers.get(n - step) if cache else None
            if prev is not None:
                result = prev * self
            else:
                half = self.int_pow(n // 2)
                result = half * half
                if n % 2:
                    result = result * self
        if cache:
            self._powers[n] = result
        return result

    def exp_series(self) -> "TruncatedSeries":
        """``exp(self)`` for a series without constant term."""
        if self.constant_term() != 0:
            raise DomainError("exp needs zero constant term")
        if any(g <= 0 for _, _, g in self.graded_terms()):
            raise DomainError("exp needs terms of positive degree")
        result = TruncatedSeries.one(self.nvars, self.order, self.grading)
        power = result
        k = 0
        while True:
            k += 1
            power = power * self
            if not power.terms:
                return result
            result = result + power.scale(Fraction(1, factorial(k)))

    def log_series(self) -> "TruncatedSeries":
        """``log(self)`` for a series with constant term 1."""
        if self.constant_term() != 1:
            raise DomainError("log needs constant term 1")
        u = self - 1
        result = TruncatedSeries.zero(self.order, self.grading)
        power = TruncatedSeries.one(self.nvars, self.order, self.grading)
        k = 0
        while True:
            k += 1
            power = power * u
            if not power.terms:
                return result
            result = result + power.scale(Fraction((-1) ** (k + 1), k))

    def homogeneous_part(self, degree: int) -> "TruncatedSeries":
        return TruncatedSeries(
            {e: c for e, c, g in self.graded_terms() if g == degree}, self.order, self.grading, True
        )

    def map_terms(self, fn) -> "TruncatedSeries":
        """Apply ``fn(exp) -> exp`` to every exponent, summing collisions."""
        out = {}
        for e, c in self.terms.items():
            f = tuple(fn(e))
            out[f] = out.get(f, 0) + c
        return TruncatedSeries(out, self.order, self.grading)

    # -- text -----------------------------------------------------------------

    def to_text(self) -> list:
        return [format_term(e, c) for e, c in sorted(self.terms.items())]

    @classmethod
    def from_text(cls, lines, order: int, grading: Grading) -> "TruncatedSeries":
        terms = {}
        for line in lines:
            e, c = parse_term(line)
            terms[e] = terms.get(e, 0) + c
        return cls(terms, order, grading)

    def __repr__(self):
        body = " + ".join(self.to_text()) or "0"
        return f"TruncatedSeries({body}; order={self.order}, grading={self.grading.name})"


def format_coeff(c) -> str:
    c = _norm(c)
    return str(c)


def format_term(exp, coeff) -> str:
    """Canonical text ``c * z^(a,b) * t^[v0,...,vk]``."""
    d = f"{exp[0]},{exp[1]}"
    cls = ",".join(str(x) for x in exp[2:])
    return f"{format_coeff(coeff)} * z^({d}) * t^[{cls}]"


_TERM_RE = re.compile(
    r"^\s*(-?\d+(?:/\d+)?)\s*\*\s*z\^\((-?\d+),(-?\d+)\)\s*\*\s*t\^\[((?:-?\d+(?:,-?\d+)*)?)\]\s*$"
)


def parse_term(text: str):
    m = _TERM_RE.match(text)
    if not m:
        raise ValueError(f"not a canonical term: {text!r}")
    coeff = _norm(Fraction(m.group(1)))
    cls = tuple(int(x) for x in m.group(4).split(",")) if m.group(4) else ()
    return (int(m.group(2)), int(m.group(3))) + cls, coeff
