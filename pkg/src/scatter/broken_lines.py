"""Broken lines on a flattened scattering diagram and theta-function products.

All walls are rays through the origin, so a broken line is determined by
angular data.  A segment with velocity ``u = -r(m)`` entered at angular
position ``a`` sweeps the open arc from ``a`` to ``u`` in a fixed rotation
sense ``sigma`` (angular momentum is conserved at bends because the kink is
parallel to the wall).  A bend on ray ``w`` inside that arc replaces ``m`` by
``m + term`` for a non-constant term of ``f_w ** k`` with
``k = |w x r(m)|``.  Lines are enumerated depth first with the wall-order
budget; the endpoint is ``R + eps * u0`` with ``eps`` symbolic.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .base import cross
from .scattering import ScatteringDiagram, is_identity, default_start
from .series import TruncatedSeries

__all__ = [
    "BrokenLine",
    "InconsistentDiagram",
    "DEFAULT_PERTURBATION",
    "enumerate_broken_lines",
    "lines_to",
    "theta_product",
    "relation_set",
    "Relation",
]

DEFAULT_PERTURBATION = (1000003, 1)


class InconsistentDiagram(ValueError):
    pass


def _sgn(x):
    return (x > 0) - (x < 0)


def _side(a, p, u0):
    """Sign of cross(a, p + eps*u0) for infinitesimal eps > 0."""
    s = _sgn(cross(a, p))
    return s if s else _sgn(cross(a, u0))


@dataclass(frozen=True)
class BrokenLine:
    initial: tuple
    sigma: int
    bends: tuple  # ((ray direction, term exponent, term coefficient), ...)
    final_exp: tuple
    coeff: object
    arc_start: tuple
    grade: int

    @property
    def final_dir(self):
        return self.final_exp[:2]

    @property
    def velocity(self):
        return (-self.final_exp[0], -self.final_exp[1])

    def ends_at(self, p, u0=DEFAULT_PERTURBATION) -> bool:
        """Whether ``p + eps*u0`` lies strictly inside the final arc."""
        a, u = self.arc_start, self.velocity
        return self.sigma * _side(a, p, u0) > 0 and self.sigma * -_side(u, p, u0) > 0

    def tangents(self):
        """Velocities of the successive segments, reconstructed from the bends."""
        m = self.initial_exp
        out = [(-m[0], -m[1])]
        for _, e, _ in self.bends:
            m = tuple(x + y for x, y in zip(m, e))
            out.append((-m[0], -m[1]))
        return out

    @property
    def initial_exp(self):
        e = self.final_exp
        for _, t, _ in self.bends:
            e = tuple(x - y for x, y in zip(e, t))
        return e

    def check(self):
        """Tangent recurrence and conservation of the rotation sense."""
        tangents = self.tangents()
        m = self.initial_exp
        if m[:2] != tuple(self.initial):
            raise AssertionError("initial monomial does not lift the initial direction")
        pos = self.initial
        for (w, e, _), u_before, u_after in zip(self.bends, tangents, tangents[1:]):
            if cross(e[:2], w) != 0:
                raise AssertionError("bend term not tangent to its wall")
            if self.sigma * cross(pos, w) <= 0 or self.sigma * cross(w, u_before) <= 0:
                raise AssertionError("bend outside the swept arc")
            if cross(w, u_after) != cross(w, u_before):
                raise AssertionError("rotation sense changed at a bend")
            pos = w
        if tangents[-1] != self.velocity:
            raise AssertionError("final tangent is not -r(m(0))")
        return True


def initial_exponent(d: ScatteringDiagram, v):
    """Lift of v lying on the graph of phi (the boundary of the monoid)."""
    v = tuple(v)
    if d.base is None:
        return v + (0,) * (d.nvars - 2)
    return v + tuple(d.base.phi_at(v))


def enumerate_broken_lines(d: ScatteringDiagram, v, budget: int = None):
    """All broken lines with initial direction v and total wall order < budget.

    Results are cached on the diagram.  Lines are returned for both rotation
    senses and carry their final arc, so endpoint filtering is a cheap test.
    """
    budget = budget or d.order
    key = ("lines", tuple(v), budget)
    cache = d.meta.setdefault("_line_cache", {})
    if key in cache:
        return cache[key]
    if tuple(v) == (0, 0):
        raise ValueError("broken lines need a non-zero initial direction")
    start = initial_exponent(d, v)
    rays = [(w, r) for w, r in d.rays.items()]
    out = []

    def rec(sigma, a, m, coeff, used, bends):
        u = (-m[0], -m[1])
        out.append(BrokenLine(tuple(v), sigma, tuple(bends), m, coeff, a, used))
        for w, ray in rays:
            if sigma * cross(a, w) <= 0 or sigma * cross(w, u) <= 0:
                continue
            k = abs(cross(w, m))
            power = ray.fn.int_pow(k)
            for e, c, g in power.graded_terms():
                if g <= 0:
                    continue
                if used + g >= budget:
                    break
                nm = tuple(x + y for x, y in zip(m, e))
                rec(sigma, w, nm, coeff * c, used + g, bends + [(w, e, c)])

    for sigma in (1, -1):
        rec(sigma, tuple(v), start, 1, 0, [])
    cache[key] = out
    return out


def lines_to(d: ScatteringDiagram, v, p, budget=None, u0=DEFAULT_PERTURBATION):
    return [l for l in enumerate_broken_lines(d, v, budget) if l.ends_at(p, u0)]


def _require_consistent(d: ScatteringDiagram, order):
    if d.consistent_to >= order:
        return
    if d.rays and not is_identity(d, default_start(d), order):
        raise InconsistentDiagram("theta products need a consistent diagram")
    d.consistent_to = max(d.consistent_to, order)


def _height_series(d: ScatteringDiagram, order):
    return lambda terms: TruncatedSeries(terms, order, d.grading)


def theta_product(d: ScatteringDiagram, P, Q, order: int = None, u0=DEFAULT_PERTURBATION):
    """Structure constants of theta_P * theta_Q as {R: series in heights}.

    A height is stored as an exponent with zero tangent part, so
    ``coefficient((0, 0) + beta)`` reads off the coefficient of ``z^beta``.
    """
    order = order or d.order
    _require_consistent(d, order)
    lp = enumerate_broken_lines(d, P, order)
    lq = enumerate_broken_lines(d, Q, order)
    by_dir = {}
    for l in lq:
        by_dir.setdefault(l.final_dir, []).append(l)
    acc = {}
    phi_cache = {}
    for a in lp:
        for dq, group in by_dir.items():
            R = (a.final_dir[0] + dq[0], a.final_dir[1] + dq[1])
            if not a.ends_at(R, u0):
                continue
            for b in group:
                if a.grade + b.grade >= order or not b.ends_at(R, u0):
                    continue
                if R not in phi_cache:
                    phi_cache[R] = _phi_point(d, R)
                cls = tuple(x + y - z for x, y, z in zip(a.final_exp[2:], b.final_exp[2:], phi_cache[R]))
                key = (0, 0) + cls
                slot = acc.setdefault(R, {})
                slot[key] = slot.get(key, 0) + a.coeff * b.coeff
    make = _height_series(d, order)
    out = {}
    for R in sorted(acc):
        s = make(acc[R])
        if s.terms:
            out[R] = s
    return out


def _phi_point(d: ScatteringDiagram, R):
    if d.base is None or R == (0, 0):
        return (0,) * (d.nvars - 2)
    return tuple(d.base.phi_at(R))


def multiply_expansions(d: ScatteringDiagram, x: dict, y: dict, order: int, u0=DEFAULT_PERTURBATION):
    """Product of two theta expansions {P: coeff series} using theta_product."""
    out = {}
    for P, cp in x.items():
        for Q, cq in y.items():
            if P == (0, 0) or Q == (0, 0):
                R = Q if P == (0, 0) else P
                term = cp * cq
                out[R] = out[R] + term if R in out else term
                continue
            for R, c in theta_product(d, P, Q, order, u0).items():
                term = cp * cq * c
                out[R] = out[R] + term if R in out else term
    return {R: s for R, s in sorted(out.items()) if s.terms}


@dataclass
class Relation:
    lhs: tuple
    rhs: dict

    def describe(self, labels=None, names=None):
        names = names or {}
        lhs = " ".join(f"theta{names.get(p, p)}" for p in self.lhs)
        parts = []
        for R, s in self.rhs.items():
            parts.append(f"({len(s)} terms) theta{names.get(R, R)}")
        return f"{lhs} = " + " + ".join(parts)


def relation_set(d: ScatteringDiagram, generators=None, order: int = None, threads: int = 1):
    """Products theta_{v_i} theta_{v_{i+2}} (n >= 4, each pair once) or the triple product (n = 3)."""
    order = order or d.order
    rays = list(generators or d.base.rays)
    n = len(rays)
    pairs = []
    if n >= 4:
        seen = set()
        for i in range(n):
            p, q = rays[i], rays[(i + 2) % n]
            if frozenset((p, q)) not in seen:
                seen.add(frozenset((p, q)))
                pairs.append((p, q))
    else:
        pairs = None
    _require_consistent(d, order)
    if pairs is not None:
        # broken lines are cached per direction, so enumerate them first
        for v in rays:
            enumerate_broken_lines(d, v, order)
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                prods = list(pool.map(lambda pq: theta_product(d, pq[0], pq[1], order), pairs))
        else:
            prods = [theta_product(d, p, q, order) for p, q in pairs]
        return [Relation(lhs=(p, q), rhs=c) for (p, q), c in zip(pairs, prods)]
    one = TruncatedSeries.one(d.nvars, order, d.grading)
    prod = {rays[0]: one}
    for v in rays[1:]:
        prod = multiply_expansions(d, prod, {v: one}, order)
    return [Relation(lhs=tuple(rays), rhs=prod)]
