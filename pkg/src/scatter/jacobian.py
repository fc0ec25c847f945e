"""Exact polynomials, Buchberger bases and Jacobian-ring dimensions.

Monomial order is degree reverse lexicographic with variables ordered as given
(the first variable is the largest).  Laurent polynomials are allowed as
intermediate objects; the torus helper clears denominators and saturates with
an extra variable ``u`` satisfying ``u * x1 * ... * xn = 1``.
"""

from __future__ import annotations

import ast
import itertools
from fractions import Fraction
from math import inf

__all__ = [
    "Poly",
    "Ideal",
    "DimensionError",
    "ORDER_NAME",
    "groebner",
    "reduce",
    "critical_ideal",
    "torus_critical_ideal",
    "quotient_dimension",
    "standard_monomials",
    "determinant",
]

ORDER_NAME = "grevlex"


class DimensionError(ValueError):
    pass


def _key(e):
    """Sort key realising grevlex: larger key means larger monomial."""
    return (sum(e), tuple(-x for x in reversed(e)))


def _norm(c):
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


class Poly:
    __slots__ = ("vars", "terms")

    def __init__(self, terms, vars):
        self.vars = tuple(vars)
        self.terms = {tuple(e): _norm(c) for e, c in terms.items() if c != 0}

    # -- constructors ---------------------------------------------------------

    @classmethod
    def const(cls, c, vars):
        return cls({(0,) * len(vars): c}, vars)

    @classmethod
    def var(cls, name, vars):
        i = list(vars).index(name)
        return cls({tuple(1 if j == i else 0 for j in range(len(vars))): 1}, vars)

    @classmethod
    def gens(cls, vars):
        return [cls.var(v, vars) for v in vars]

    @classmethod
    def parse(cls, text, vars):
        """Parse ``+ - * ** /`` expressions in the given variables."""
        env = {v: cls.var(v, vars) for v in vars}

        def ev(node):
            if isinstance(node, ast.Expression):
                return ev(node.body)
            if isinstance(node, ast.Constant) and isinstance(node.value, int):
                return cls.const(node.value, vars)
            if isinstance(node, ast.Name):
                if node.id not in env:
                    raise ValueError(f"unknown variable {node.id!r}")
                return env[node.id]
            if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
                v = ev(node.operand)
                return -v if isinstance(node.op, ast.USub) else v
            if isinstance(node, ast.BinOp):
                a, b = ev(node.left), ev(node.right)
                if isinstance(node.op, ast.Add):
                    return a + b
                if isinstance(node.op, ast.Sub):
                    return a - b
                if isinstance(node.op, ast.Mult):
                    return a * b
                if isinstance(node.op, ast.Pow):
                    if not b.is_constant():
                        raise ValueError("exponents must be integers")
                    return a ** int(b.constant())
                if isinstance(node.op, ast.Div):
                    if b.is_constant():
                        return a.scale(Fraction(1) / b.constant())
                    if len(b.terms) == 1:
                        (e, c), = b.terms.items()
                        return a * Poly({tuple(-x for x in e): Fraction(1) / c}, vars)
                    raise ValueError("can only divide by monomials")
            raise ValueError(f"unsupported expression: {ast.dump(node)}")

        return ev(ast.parse(text.strip().replace("^", "**"), mode="eval"))

    # -- protocol -------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self.vars)
        return isinstance(other, Poly) and self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant(self):
        return self.terms.get((0,) * len(self.vars), 0)

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise ValueError("polynomials over different variables")
            return other
        return Poly.const(other, self.vars)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(out, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return Poly({e: -c for e, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c):
        return Poly({e: v * c for e, v in self.terms.items()}, self.vars)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._lift(other)
        out = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return Poly(out, self.vars)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("negative powers only for monomials")
            (e, c), = self.terms.items()
            return Poly({tuple(-n * x for x in e): Fraction(1) / c ** -n}, self.vars)
        out = Poly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def diff(self, name):
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = out.get(tuple(f), 0) + c * e[i]
        return Poly(out, self.vars)

    def subs(self, mapping):
        """Substitute polynomials (or numbers) for variables."""
        idx = {self.vars.index(k): v for k, v in mapping.items()}
        cache = {}

        def power(i, k):
            if (i, k) not in cache:
                v = idx[i]
                cache[(i, k)] = v ** k if isinstance(v, Poly) else Poly.const(Fraction(v) ** k, self.vars)
            return cache[(i, k)]

        out = Poly({}, self.vars)
        for e, c in self.terms.items():
            rest = tuple(0 if i in idx else x for i, x in enumerate(e))
            term = Poly({rest: c}, self.vars)
            for i, x in enumerate(e):
                if i in idx and x:
                    term = term * power(i, x)
            out = out + term
        return out

    def degree_in(self, name):
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=0)

    def coefficient_in(self, name, k):
        """Coefficient of ``name**k`` as a polynomial in the other variables."""
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                f = list(e)
                f[i] = 0
                out[tuple(f)] = c
        return Poly(out, self.vars)

    def clear_denominators(self):
        """Multiply by the smallest monomial making every exponent >= 0."""
        low = [min((e[i] for e in self.terms), default=0) for i in range(len(self.vars))]
        shift = tuple(-min(0, x) for x in low)
        return Poly({tuple(x + s for x, s in zip(e, shift)): c for e, c in self.terms.items()}, self.vars)

    def with_vars(self, vars):
        """Re-embed into a larger (or reordered) variable list."""
        pos = [list(vars).index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            f = [0] * len(vars)
            for p, x in zip(pos, e):
                f[p] = x
            out[tuple(f)] = c
        return Poly(out, vars)

    # -- monomial order -------------------------------------------------------

    def lead(self):
        e = max(self.terms, key=_key)
        return e, self.terms[e]

    def monic(self):
        _, c = self.lead()
        return self.scale(Fraction(1) / c)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if x == 1 else f"{v}^{x}" for v, x in zip(self.vars, e) if x
            )
            if mono:
                coef = "" if c == 1 else "-" if c == -1 else f"{c}*"
                parts.append(f"{coef}{mono}")
            else:
                parts.append(str(c))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def reduce(f: Poly, basis) -> Poly:
    """Full normal form of f modulo the list of polynomials ``basis``."""
    leads = [(g.lead(), g) for g in basis if g]
    rem = {}
    p = dict(f.terms)
    while p:
        e = max(p, key=_key)
        c = p[e]
        for (le, lc), g in leads:
            if _divides(le, e):
                q = c / Fraction(lc)
                shift = tuple(x - y for x, y in zip(e, le))
                for ge, gc in g.terms.items():
                    t = tuple(x + y for x, y in zip(ge, shift))
                    v = p.get(t, 0) - q * gc
                    if v:
                        p[t] = v
                    else:
                        p.pop(t, None)
                break
        else:
            rem[e] = c
            del p[e]
    return Poly(rem, f.vars)


def _spoly(f, g):
    (ef, cf), (eg, cg) = f.lead(), g.lead()
    l = _lcm(ef, eg)
    a = Poly({tuple(x - y for x, y in zip(l, ef)): Fraction(1) / cf}, f.vars)
    b = Poly({tuple(x - y for x, y in zip(l, eg)): Fraction(1) / cg}, f.vars)
    return a * f - b * g


def groebner(polys) -> list:
    """Reduced Groebner basis (grevlex), sorted by decreasing leading monomial.

    Buchberger's algorithm with the product criterion (coprime leading
    monomials) and the chain criterion.
    """
    basis = [p.monic() for p in polys if p]
    if not basis:
        return []
    pairs = set(itertools.combinations(range(len(basis)), 2))
    while pairs:
        i, j = min(pairs, key=lambda ij: (_key(_lcm(basis[ij[0]].lead()[0], basis[ij[1]].lead()[0])), ij))
        pairs.discard((i, j))
        li, lj = basis[i].lead()[0], basis[j].lead()[0]
        l = _lcm(li, lj)
        if all(min(x, y) == 0 for x, y in zip(li, lj)):
            continue
        if any(
            k not in (i, j)
            and _divides(basis[k].lead()[0], l)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(basis))
        ):
            continue
        r = reduce(_spoly(basis[i], basis[j]), basis)
        if r:
            basis.append(r.monic())
            n = len(basis) - 1
            pairs |= {(k, n) for k in range(n)}
    # minimise and inter-reduce
    basis = [g for g in basis if g]
    minimal = []
    for g in sorted(basis, key=lambda p: _key(p.lead()[0])):
        if not any(_divides(h.lead()[0], g.lead()[0]) for h in minimal):
            minimal.append(g)
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        reduced.append(reduce(g, others).monic())
    return sorted(reduced, key=lambda p: _key(p.lead()[0]), reverse=True)


class Ideal:
    def __init__(self, generators, vars=None):
        gens = [g for g in generators if g]
        self.vars = tuple(vars) if vars else (gens[0].vars if gens else ())
        self.generators = [g.with_vars(self.vars) if g.vars != self.vars else g for g in gens]
        self._basis = None

    @property
    def groebner(self):
        if self._basis is None:
            self._basis = groebner(self.generators)
        return self._basis

    def contains(self, f: Poly) -> bool:
        return not reduce(f, self.groebner)

    def normal_form(self, f: Poly) -> Poly:
        return reduce(f, self.groebner)

    def leading_monomials(self):
        return [g.lead()[0] for g in self.groebner]

    def quotient_dimension(self):
        return quotient_dimension(self)

    def report(self) -> dict:
        dim = self.quotient_dimension()
        std = standard_monomials(self) if dim != inf else None
        return {
            "order": ORDER_NAME,
            "variables": list(self.vars),
            "basis": [str(g) for g in self.groebner],
            "staircase": [list(e) for e in self.leading_monomials()],
            "standardMonomials": [list(e) for e in std] if std is not None else None,
            "dimension": "infinite" if dim == inf else dim,
        }


def _bounds(ideal: Ideal):
    n = len(ideal.vars)
    bounds = [None] * n
    for e in ideal.leading_monomials():
        support = [i for i, x in enumerate(e) if x]
        if len(support) == 1:
            i = support[0]
            bounds[i] = e[i] if bounds[i] is None else min(bounds[i], e[i])
        elif not support:
            return [0] * n  # the unit ideal
    return bounds


def standard_monomials(ideal: Ideal):
    """Monomials not divisible by any leading monomial; None if infinitely many."""
    bounds = _bounds(ideal)
    if any(b is None for b in bounds):
        return None
    leads = ideal.leading_monomials()
    out = []
    for e in itertools.product(*(range(b) for b in bounds)):
        if not any(_divides(l, e) for l in leads):
            out.append(e)
    return sorted(out, key=_key)


def quotient_dimension(ideal: Ideal):
    """Dimension of k[x]/I as a vector space, or ``math.inf``."""
    std = standard_monomials(ideal)
    return inf if std is None else len(std)


def determinant(rows):
    """Laplace expansion; entries are polynomials."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * determinant(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def critical_ideal(surface_eqs, W: Poly, vars=None) -> Ideal:
    """Surface equations plus all maximal minors of the Jacobian of (eqs, W)."""
    vars = tuple(vars or W.vars)
    rows = list(surface_eqs) + [W]
    k = len(rows)
    if len(vars) < k:
        raise DimensionError(f"{k} rows need at least {k} variables, got {len(vars)}")
    matrix = [[f.diff(v) for v in vars] for f in rows]
    minors = []
    for cols in itertools.combinations(range(len(vars)), k):
        m = determinant([[row[c] for c in cols] for row in matrix])
        if m:
            minors.append(m)
    return Ideal(list(surface_eqs) + minors, W.vars)


def torus_critical_ideal(W: Poly, saturate: str = "u") -> Ideal:
    """Critical points of a Laurent polynomial on the torus.

    Uses the log derivatives ``x_i dW/dx_i`` with denominators cleared, plus
    ``u * x_1 * ... * x_n - 1`` in an extra variable.
    """
    vars = W.vars + (saturate,)
    gens = []
    for v in W.vars:
        g = (W.diff(v) * Poly.var(v, W.vars)).clear_denominators()
        gens.append(g.with_vars(vars))
    prod = Poly.var(saturate, vars)
    for v in W.vars:
        prod = prod * Poly.var(v, vars)
    gens.append(prod - 1)
    return Ideal(gens, vars)
