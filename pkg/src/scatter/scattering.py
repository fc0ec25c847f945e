"""Wall crossing, path-ordered loops and the order-by-order consistency completion.

Exponents are flat tuples ``(a, b, c0, ..., ck)``.  A ray of primitive
direction ``w`` carries a series whose terms all have tangent part an integer
multiple of ``w``; crossing it along a path with tangent ``t`` acts on a
monomial by ``z^p -> z^p f^<n, r(p)>`` with ``n`` the primitive normal to ``w``
that is negative on ``t``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import gcd

from .base import DualComplex, LocationError, ToricModel, cross, primitive
from .series import Grading, TruncatedSeries

__all__ = [
    "Ray",
    "ScatteringDiagram",
    "ConsistencyError",
    "NormalError",
    "cross_wall",
    "loop_automorphism",
    "make_consistent",
    "initial_diagram",
    "ks_basic_diagram",
    "angle_sorted",
    "loop_images",
    "is_identity",
    "default_start",
    "canonical_wall_function",
    "incoming_part",
    "wall_exponent",
]


class ConsistencyError(RuntimeError):
    pass


class NormalError(ValueError):
    pass


def ray_kind(direction, series) -> str:
    signs = set()
    for e in series.terms:
        m = e[:2]
        if m == (0, 0):
            continue
        if cross(m, direction) != 0:
            raise ValueError(f"term direction {m} is not tangent to the ray {direction}")
        signs.add(1 if m[0] * direction[0] + m[1] * direction[1] > 0 else -1)
    if signs == {1}:
        return "incoming"
    if signs == {-1}:
        return "outgoing"
    return "mixed" if signs else "trivial"


class Ray:
    """A wall on the ray R>=0 * direction."""

    def __init__(self, direction, fn: TruncatedSeries, kind: str = None):
        self.direction = primitive(direction)
        self.fn = fn
        derived = ray_kind(self.direction, fn)
        if kind is not None and kind != derived:
            raise ValueError(f"declared kind {kind} but terms say {derived}")
        self.kind = derived
        self._trunc = {}

    def truncated(self, order: int) -> TruncatedSeries:
        if order >= self.fn.order:
            return self.fn
        t = self._trunc.get(order)
        if t is None:
            t = self.fn.truncate(order)
            self._trunc[order] = t
        return t

    def normal_for(self, tangent):
        w = self.direction
        n = (w[1], -w[0])
        s = n[0] * tangent[0] + n[1] * tangent[1]
        if s == 0:
            raise NormalError(f"path tangent {tuple(tangent)} is parallel to the wall {w}")
        return n if s < 0 else (-n[0], -n[1])

    def __repr__(self):
        return f"Ray({self.direction}, {self.kind}, {len(self.fn)} terms)"


def cross_wall(ray: Ray, exp, coeff, tangent, order: int = None) -> TruncatedSeries:
    """Image of ``coeff * z^exp`` under the wall-crossing automorphism of ``ray``."""
    f = ray.fn if order is None else ray.truncated(order)
    n = ray.normal_for(tangent)
    k = n[0] * exp[0] + n[1] * exp[1]
    return f.int_pow(k).shift(exp, coeff)


def apply_wall(f: TruncatedSeries, n, series: TruncatedSeries, pool=None) -> TruncatedSeries:
    """Apply ``z^q -> z^q f^<n, r(q)>`` termwise to a series."""
    groups = {}
    for e, c in series.terms.items():
        k = n[0] * e[0] + n[1] * e[1]
        groups.setdefault(k, {})[e] = c
    ks = sorted(groups)

    def part(k):
        g = TruncatedSeries(groups[k], series.order, series.grading, _trusted=True)
        return g if k == 0 else g * f.int_pow(k)

    if pool is not None and len(ks) > 1:
        parts = list(pool.map(part, ks))
    else:
        parts = [part(k) for k in ks]
    out = {}
    for p in parts:
        for e, c in p.terms.items():
            out[e] = out.get(e, 0) + c
    return TruncatedSeries(out, series.order, series.grading)


def _half(v, start):
    """0 if v lies at an angle in [0, pi) measured anticlockwise from start, else 1."""
    c = cross(start, v)
    if c > 0 or (c == 0 and start[0] * v[0] + start[1] * v[1] > 0):
        return 0
    return 1


def angle_sorted(directions, start):
    """Sort directions anticlockwise beginning just after ``start``."""

    def cmp(a, b):
        ha, hb = _half(a, start), _half(b, start)
        if ha != hb:
            return ha - hb
        c = cross(a, b)
        return -1 if c > 0 else (1 if c < 0 else 0)

    return sorted(directions, key=cmp_to_key(cmp))


@dataclass
class ScatteringDiagram:
    rays: dict
    order: int
    grading: Grading
    nvars: int
    base: DualComplex = None
    labels: tuple = ()
    consistent_to: int = 0
    meta: dict = field(default_factory=dict)

    def copy(self) -> "ScatteringDiagram":
        return ScatteringDiagram(
            rays={w: Ray(w, r.fn) for w, r in self.rays.items()},
            order=self.order,
            grading=self.grading,
            nvars=self.nvars,
            base=self.base,
            labels=self.labels,
            consistent_to=self.consistent_to,
            meta={k: v for k, v in self.meta.items() if not k.startswith("_")},
        )

    def one(self, order=None) -> TruncatedSeries:
        return TruncatedSeries.one(self.nvars, order or self.order, self.grading)

    def add_factor(self, direction, factor: TruncatedSeries):
        w = primitive(direction)
        self.meta.pop("_line_cache", None)
        ray = self.rays.get(w)
        fn = factor if ray is None else ray.fn * factor
        if fn.is_one():
            self.rays.pop(w, None)
        else:
            self.rays[w] = Ray(w, fn)

    def sorted_directions(self, start=(1, 0)):
        return angle_sorted(list(self.rays), start)

    def to_json(self) -> dict:
        rays = []
        for w in self.sorted_directions((1, -1000003)):
            r = self.rays[w]
            rays.append({"dir": list(w), "kind": r.kind, "terms": r.fn.to_text()})
        doc = {
            "order": self.order,
            "consistentTo": self.consistent_to,
            "grading": self.grading.name,
            "gradingWeights": list(self.grading.weights),
            "rays": rays,
        }
        if self.labels:
            doc["classLabels"] = list(self.labels)
        return doc

    @classmethod
    def from_json(cls, doc: dict, base: DualComplex = None) -> "ScatteringDiagram":
        grading = Grading(doc["grading"], tuple(doc["gradingWeights"]))
        order = doc["order"]
        d = cls(
            rays={},
            order=order,
            grading=grading,
            nvars=len(grading.weights),
            base=base,
            labels=tuple(doc.get("classLabels", ())),
            consistent_to=doc.get("consistentTo", 0),
        )
        for r in doc["rays"]:
            fn = TruncatedSeries.from_text(r["terms"], order, grading)
            d.rays[primitive(r["dir"])] = Ray(r["dir"], fn)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"


def loop_automorphism(d: ScatteringDiagram, start, order: int = None, threads: int = 1):
    """Anticlockwise loop from ``start``; returns (G1, G2) with theta(z^e_i) = z^e_i G_i."""
    start = tuple(start)
    order = order or d.order
    for w in d.rays:
        if cross(w, start) == 0 and w[0] * start[0] + w[1] * start[1] > 0:
            raise LocationError(f"start point {start} lies on the ray {w}")
    gs = [d.one(order), d.one(order)]
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for w in angle_sorted(list(d.rays), start):
            ray = d.rays[w]
            f = ray.truncated(order)
            n = (w[1], -w[0])  # negative on the anticlockwise tangent (-w1, w0)
            new = []
            for i, g in enumerate(gs):
                h = apply_wall(f, n, g, pool) if len(g) > 1 else g
                if n[i]:
                    h = h * f.int_pow(n[i])
                new.append(h)
            gs = new
    finally:
        if pool is not None:
            pool.shutdown()
    return gs[0], gs[1]


def loop_images(d: ScatteringDiagram, start, order=None):
    """Images of the coordinate monomials z^(1,0) and z^(0,1)."""
    g1, g2 = loop_automorphism(d, start, order)
    e1 = (1, 0) + (0,) * (d.nvars - 2)
    e2 = (0, 1) + (0,) * (d.nvars - 2)
    return g1.shift(e1), g2.shift(e2)


def is_identity(d: ScatteringDiagram, start, order=None) -> bool:
    g1, g2 = loop_automorphism(d, start, order)
    return g1.is_one() and g2.is_one()


def default_start(d: ScatteringDiagram):
    """A start direction off every wall.

    Rays added during completion have small entries at feasible orders, so a
    direction with large coprime entries stays off them.
    """
    dirs = d.sorted_directions((1, 0))
    if not dirs:
        return (-1009, -2003)
    for cand in ((-1009, -2003), (-2003, -1009), (1009, 2003), (2003, -1009), (-3001, 7001)):
        if all(cross(w, cand) != 0 for w in dirs):
            return cand
    a, b = dirs[0], dirs[1 % len(dirs)]
    return (a[0] + b[0], a[1] + b[1])


def make_consistent(d: ScatteringDiagram, max_order: int = None, threads: int = 1, start=None):
    """Add outgoing rays until the loop is the identity modulo ``max_order``.

    At degree ``n`` the loop is ``1 + delta`` in both coordinates (lower degrees
    already vanish).  Each term ``a z^m`` of the defect is cancelled by a factor
    ``exp(c z^m)`` on the outgoing ray of direction ``-m/gcd(m)``.
    """
    out = d.copy()
    max_order = max_order or d.order
    if max_order > out.order:
        raise ValueError("cannot complete beyond the diagram's truncation order")
    start = tuple(start) if start else default_start(out)
    degrees = sorted({g for r in out.rays.values() for _, _, g in r.fn.graded_terms() if g > 0})
    if degrees and degrees[0] <= 0:
        raise ConsistencyError("wall functions must have terms of positive degree")
    for n in range(1, max_order):
        g1, g2 = loop_automorphism(out, start, n + 1, threads)
        defect = {}
        for i, g in enumerate((g1, g2)):
            for e, c, deg in g.graded_terms():
                if deg == 0:
                    if e != (0,) * out.nvars or c != 1:
                        raise ConsistencyError(f"degree-zero defect {e}: {c}")
                    continue
                if deg < n:
                    raise ConsistencyError(f"defect of degree {deg} survived below order {n}")
                defect.setdefault(e, [0, 0])[i] = c
        for e in sorted(defect):
            a1, a2 = defect[e]
            m = e[:2]
            if m == (0, 0):
                raise ConsistencyError(f"defect term {e} has zero tangent part")
            g = gcd(m[0], m[1])
            if a1 * m[0] + a2 * m[1] != 0:
                raise ConsistencyError(f"defect at {e} is not a wall term: {a1}, {a2}")
            c = Fraction(g * a1, m[1]) if m[1] else Fraction(-g * a2, m[0])
            w = (-m[0] // g, -m[1] // g)
            term = TruncatedSeries({e: c}, out.order, out.grading)
            factor = term.exp_series()
            out.add_factor(w, factor)
            if out.rays[w].kind == "incoming":
                raise ConsistencyError(f"outgoing correction produced an incoming ray at {w}")
    if not is_identity(out, start, max_order):
        raise ConsistencyError("loop is not the identity after completion")
    out.consistent_to = max_order
    return out


# -- initial diagrams -------------------------------------------------------------


def ks_basic_diagram(order: int) -> ScatteringDiagram:
    """Two incoming walls (1+x) on (1,0) and (1+y) on (0,1)."""
    g = Grading("wall-order", (1, 1))
    d = ScatteringDiagram(rays={}, order=order, grading=g, nvars=2)
    d.add_factor((1, 0), TruncatedSeries({(0, 0): 1, (1, 0): 1}, order, g))
    d.add_factor((0, 1), TruncatedSeries({(0, 0): 1, (0, 1): 1}, order, g))
    return d


def wall_exponent(base: DualComplex, i: int, e):
    """Exponent of the incoming wall term for the curve e blown down onto ray i."""
    v = base.rays[i]
    c = tuple(x - y for x, y in zip(base.phi_at(v), e))
    return tuple(v) + c


def initial_diagram(base: DualComplex, model: ToricModel = None, order: int = 4) -> ScatteringDiagram:
    """One incoming factor ``1 + z^(v_i, phi(v_i) - E_ij)`` per blown-down curve."""
    if not base.flattened:
        raise ValueError("initial diagrams live on a flattened complex")
    model = model or base.model
    if model is None:
        raise ValueError("no toric model given")
    grading = Grading("wall-order", base.wall_order_weights())
    nvars = 2 + base.surface.rank
    d = ScatteringDiagram(
        rays={}, order=order, grading=grading, nvars=nvars, base=base, labels=base.surface.labels
    )
    zero = (0,) * nvars
    for i, e in model.walls():
        exp = wall_exponent(base, i, e)
        d.add_factor(base.rays[i], TruncatedSeries({zero: 1, exp: 1}, order, grading))
    return d


def incoming_part(d: ScatteringDiagram, direction) -> TruncatedSeries:
    """Product of the initial wall factors on a ray (the toric-model correction)."""
    base = d.base
    w = primitive(direction)
    out = d.one()
    if base is None or base.model is None:
        return out
    zero = (0,) * d.nvars
    for i, e in base.model.walls():
        if tuple(base.rays[i]) == w:
            out = out * TruncatedSeries({zero: 1, wall_exponent(base, i, e): 1}, d.order, d.grading)
    return out


def canonical_wall_function(d: ScatteringDiagram, direction) -> TruncatedSeries:
    """Wall function with the incoming toric-model factors divided out."""
    w = primitive(direction)
    ray = d.rays.get(w)
    fn = ray.fn if ray else d.one()
    return fn * incoming_part(d, w).inverse()
