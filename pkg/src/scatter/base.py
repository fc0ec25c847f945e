"""Dual intersection complex of a Looijenga pair, PL functions and toric models.

The complex is "developed" into the plane: ``v1 = (1,0)``, ``v2 = (0,1)`` and
``v_{i+1} = -v_{i-1} - D_i^2 v_i``, which is the chart relation
``v_{i-1} -> (1,0), v_i -> (0,1), v_{i+1} -> (-1, -D_i^2)`` read in one global
frame.  After ``n`` steps the developed vectors come back to ``(v1, v2)`` up to
the monodromy; the complex is flat (genuinely R^2) exactly when the monodromy
is trivial and the cones wind once around the origin.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .lattice import SurfaceData, SpecError, add, scale, sub

__all__ = [
    "StructureError",
    "ModelError",
    "LocationError",
    "DualComplex",
    "PLFunction",
    "ToricModel",
    "build_dual_complex",
    "flatten_by_toric_model",
    "locate",
    "find_toric_models",
    "cross",
    "primitive",
]


class StructureError(ValueError):
    pass


class ModelError(ValueError):
    pass


class LocationError(ValueError):
    pass


def cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def primitive(v):
    g = gcd(int(v[0]), int(v[1]))
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return (v[0] // g, v[1] // g)


def in_cone(p, a, b) -> bool:
    """Closed membership of p in the cone spanned by a then b (anticlockwise)."""
    if cross(a, b) > 0:
        return cross(a, p) >= 0 and cross(p, b) >= 0
    # a cone of angle >= pi never occurs in a complete simplicial fan
    raise StructureError(f"cone ({a}, {b}) is not strictly convex")


def develop(selfints):
    """Developed ray vectors w_1..w_{n+2} for the given self-intersections."""
    w = [(1, 0), (0, 1)]
    for i in range(1, len(selfints) + 1):
        d2 = selfints[i % len(selfints)]
        prev, cur = w[i - 1], w[i]
        w.append((-prev[0] - d2 * cur[0], -prev[1] - d2 * cur[1]))
    return w


def winding(vectors) -> int:
    """Number of full anticlockwise turns made by a closed chain of vectors."""
    from math import atan2, pi

    total = 0.0
    for a, b in zip(vectors, vectors[1:]):
        total += atan2(cross(a, b), dot(a, b))
    return round(total / (2 * pi))


@dataclass
class PLFunction:
    """Piecewise linear function on the cells with values in the class lattice.

    ``reps[i]`` is the pair ``(phi(1,0), phi(0,1))`` of the linear function on
    cell ``i`` (the cone from ray ``i`` to ray ``i+1``) in developed coordinates.
    """

    bends: tuple
    reps: tuple
    rank: int

    def rep_value(self, i, p):
        a, b = self.reps[i]
        return tuple(p[0] * x + p[1] * y for x, y in zip(a, b))

    def closes(self) -> bool:
        return self.reps[0] == self.reps[-1]


def make_pl_function(rays, bends, rank, gauge=None) -> PLFunction:
    """Build phi from its bends.

    Crossing ray ``i+1`` anticlockwise the representative changes by
    ``n (x) bend`` with ``n(x) = cross(w, x)``, which is primitive, vanishes on
    the ray and is positive on the cell being entered.  ``gauge`` is the linear
    function used on the first cell (zero by default).
    """
    zero = (0,) * rank
    rep = gauge if gauge is not None else (zero, zero)
    reps = [rep]
    n = len(bends)
    for i in range(1, n + 1):
        w = rays[i]
        bend = bends[i % n]
        # n(x) = w0*x1 - w1*x0, so n(e1) = -w1, n(e2) = w0
        a = add(rep[0], scale(-w[1], bend))
        b = add(rep[1], scale(w[0], bend))
        rep = (a, b)
        reps.append(rep)
    return PLFunction(bends=tuple(bends), reps=tuple(reps), rank=rank)


@dataclass
class ToricModel:
    """Blow-downs per boundary ray (0-based) as curve classes."""

    curves: dict

    @classmethod
    def from_spec(cls, spec, surface: SurfaceData) -> "ToricModel":
        curves = {}
        for k, items in (spec or {}).items():
            i = int(k)
            if not 0 <= i < surface.n:
                raise SpecError(f"toric model names ray {i + 1}, surface has {surface.n}")
            out = []
            for it in items:
                out.append(surface.parse(it) if isinstance(it, str) else tuple(it))
            curves[i] = out
        return cls(curves)

    def walls(self):
        for i in sorted(self.curves):
            for e in self.curves[i]:
                yield i, e

    def all_classes(self):
        return [e for _, e in self.walls()]

    def is_empty(self) -> bool:
        return not any(self.curves.values())


@dataclass
class DualComplex:
    surface: SurfaceData
    selfints: tuple
    developed: tuple
    bends: tuple
    phi: PLFunction
    flattened: bool
    model: ToricModel = None
    monodromy: tuple = None
    turns: int = 0
    e_values: tuple = field(default=())

    @property
    def n(self):
        return len(self.selfints)

    @property
    def rays(self):
        """Primitive generators v_1..v_n in developed coordinates."""
        return self.developed[: self.n]

    def cell(self, i):
        return self.developed[i], self.developed[i + 1]

    def charts(self):
        """For each ray i the chart images of (v_{i-1}, v_i, v_{i+1})."""
        out = []
        for i in range(self.n):
            out.append(((1, 0), (0, 1), (-1, -self.selfints[i])))
        return out

    def chart_transition(self, i):
        """Integer matrix sending developed coordinates to the chart of ray i.

        The chart sends v_{i-1} to (1,0) and v_i to (0,1); v_{i-1} is recovered
        from the relation v_{i-1} + v_{i+1} = -D_i^2 v_i.
        """
        w_cur, w_next = self.developed[i], self.developed[i + 1]
        d2 = self.selfints[i]
        w_prev = (-w_next[0] - d2 * w_cur[0], -w_next[1] - d2 * w_cur[1])
        if cross(w_prev, w_cur) != 1:
            raise StructureError("developed cones must be unimodular")
        # inverse of the matrix with columns w_prev, w_cur
        return ((w_cur[1], -w_cur[0]), (-w_prev[1], w_prev[0]))

    # -- PL data ---------------------------------------------------------------

    def locate(self, p):
        return locate(self, p)

    def phi_at(self, p):
        """phi evaluated at a point of the developed plane."""
        kind, idx = self.locate(p)
        return self.phi.rep_value(idx if kind == "cell" else _cell_of_ray(self, idx), p)

    def e_at(self, p) -> Fraction:
        """The E-function, linear on each cell with E(v_i) = -K.D_i."""
        kind, idx = self.locate(p)
        if kind == "ray":
            a = self.developed[idx]
            k = Fraction(p[0], a[0]) if a[0] else Fraction(p[1], a[1])
            return k * self.e_values[idx % self.n]
        a, b = self.cell(idx)
        det = cross(a, b)
        s = Fraction(cross(p, b), det)
        t = Fraction(cross(a, p), det)
        return s * self.e_values[idx % self.n] + t * self.e_values[(idx + 1) % self.n]

    def wall_order_weights(self):
        """Linear functional counting blown-down exceptional classes.

        A class c at direction m has order ``sum_E <c - phi(m), E>``; the phi
        part is linear because every bend pairs to zero with the E's.
        """
        if self.model is None:
            raise ModelError("wall-order grading needs a toric model")
        form = self.surface.form
        es = self.model.all_classes()
        cls_w = [0] * self.surface.rank
        for e in es:
            for a in range(self.surface.rank):
                cls_w[a] += sum(form[a][b] * e[b] for b in range(self.surface.rank))
        # a wall term has class phi(v) - E, and <-E, E> = 1
        lam = []
        for basis in ((1, 0), (0, 1)):
            val = self.phi.rep_value(0, basis)
            lam.append(-sum(w * x for w, x in zip(cls_w, val)))
        return tuple(lam) + tuple(cls_w)

    def to_json(self) -> dict:
        return {
            "surface": self.surface.name,
            "flattened": self.flattened,
            "rays": [list(v) for v in self.rays],
            "selfIntersections": list(self.selfints),
            "bends": [self.surface.format(b) for b in self.bends],
            "phi": [
                [self.surface.format(r[0]), self.surface.format(r[1])] for r in self.phi.reps[: self.n]
            ],
            "monodromy": [list(r) for r in self.monodromy],
            "turns": self.turns,
        }


def _cell_of_ray(c: DualComplex, i):
    return i % c.n


def _assemble(surface, selfints, bends, model, gauge=None) -> DualComplex:
    n = len(selfints)
    w = develop(selfints)
    mono = _monodromy(w, n)
    turns = winding(w[: n + 1])
    flat = mono == ((1, 0), (0, 1)) and turns == 1
    phi = make_pl_function(w, bends, surface.rank, gauge)
    evals = tuple(surface.anticanonical_degree(d) for d in surface.boundary)
    c = DualComplex(
        surface=surface,
        selfints=tuple(selfints),
        developed=tuple(w),
        bends=tuple(bends),
        phi=phi,
        flattened=flat,
        model=model,
        monodromy=mono,
        turns=turns,
        e_values=evals,
    )
    return c


def _monodromy(w, n):
    """Linear map sending (w_1, w_2) to (w_{n+1}, w_{n+2})."""
    a, b = w[n], w[n + 1]
    # w_1 = e1, w_2 = e2, so the matrix has columns a and b
    return ((a[0], b[0]), (a[1], b[1]))


def build_dual_complex(s: SurfaceData, gauge=None) -> DualComplex:
    """The dual intersection complex with phi bending by [D_i] along ray i."""
    if s.n < 3:
        raise StructureError(
            f"{s.name} has a boundary cycle of length {s.n}; blow up the nodes and "
            "use the blown-up fixture instead"
        )
    s.check()
    return _assemble(s, s.self_intersections, list(s.boundary), None, gauge)


def flatten_by_toric_model(c: DualComplex, model, gauge=None) -> DualComplex:
    """Replace D_i by its image in the toric model and check flatness.

    ``model`` is a :class:`ToricModel` or a JSON-style spec.  The bends become
    ``D_i + sum_j E_ij`` (the pull-back of the toric boundary divisor).
    """
    s = c.surface
    if not isinstance(model, ToricModel):
        model = ToricModel.from_spec(model, s)
    bends, selfints = [], []
    for i in range(s.n):
        es = model.curves.get(i, [])
        for e in es:
            if s.intersect(e, e) != -1:
                raise ModelError(f"{s.format(e)} is not a (-1)-curve")
            for j in range(s.n):
                m = s.intersect(e, s.boundary[j])
                if m != (1 if j == i else 0):
                    raise ModelError(f"{s.format(e)} meets D{j + 1} with multiplicity {m}")
        for e1, e2 in itertools.combinations(model.all_classes(), 2):
            if s.intersect(e1, e2) != 0:
                raise ModelError(f"{s.format(e1)} and {s.format(e2)} intersect")
        dbar = s.boundary[i]
        for e in es:
            dbar = add(dbar, e)
        bends.append(dbar)
        selfints.append(s.self_intersections[i] + len(es))
    out = _assemble(s, selfints, bends, model, gauge)
    if not out.flattened:
        raise ModelError(
            f"blow-downs leave self-intersections {selfints}: monodromy {out.monodromy}, "
            f"{out.turns} turns"
        )
    if not out.phi.closes():
        raise ModelError("phi does not close up around the origin")
    return out


def locate(c: DualComplex, p):
    """Return ("ray", i) or ("cell", i) for the cone containing p."""
    if p[0] == 0 and p[1] == 0:
        raise LocationError("the origin lies in every cone")
    for i in range(c.n if c.flattened else c.n + 1):
        a = c.developed[i]
        if cross(a, p) == 0 and dot(a, p) > 0:
            return "ray", i % c.n
    for i in range(c.n):
        a, b = c.cell(i)
        if cross(a, b) > 0 and cross(a, p) > 0 and cross(p, b) > 0:
            return "cell", i
    raise LocationError(f"point {tuple(p)} lies outside the developed cones")


# -- toric model search ----------------------------------------------------------


def minus_one_curves(s: SurfaceData, max_degree: int = 3):
    """(-1)-classes dH - sum a_i E_i with d <= max_degree in the blow-up basis."""
    k = s.rank - 1
    out = []
    for i in range(1, k + 1):
        out.append(s.basis(s.labels[i]))
    for d in range(1, max_degree + 1):
        # a_i in 0..d, d^2 - sum a^2 = -1, 3d - sum a = 1
        target_sum, target_sq = 3 * d - 1, d * d + 1
        for combo in itertools.combinations_with_replacement(range(d, -1, -1), k):
            if sum(combo) != target_sum or sum(x * x for x in combo) != target_sq:
                continue
            for perm in set(itertools.permutations(combo)):
                out.append((d,) + tuple(-x for x in perm))
    return sorted(set(out))


def find_toric_models(s: SurfaceData, max_degree: int = 2, limit: int = 1):
    """Search for sets of disjoint interior (-1)-curves flattening the complex."""
    n = s.n
    cands = []
    boundary = set(s.boundary)
    for e in minus_one_curves(s, max_degree):
        if e in boundary:
            continue
        meets = [s.intersect(e, d) for d in s.boundary]
        if sorted(meets) == [0] * (n - 1) + [1]:
            cands.append((meets.index(1), e))
    need = s.rank - (n - 2)  # a toric surface with n boundary curves has Picard rank n - 2
    found = []

    def rec(start, chosen):
        if len(found) >= limit:
            return
        if len(chosen) == need:
            spec = {}
            for i, e in chosen:
                spec.setdefault(i, []).append(e)
            try:
                base = _assemble(s, s.self_intersections, list(s.boundary), None)
                flatten_by_toric_model(base, ToricModel(spec))
            except ModelError:
                return
            found.append(ToricModel(spec))
            return
        for j in range(start, len(cands)):
            i, e = cands[j]
            if all(s.intersect(e, f) == 0 for _, f in chosen):
                rec(j + 1, chosen + [(i, e)])

    rec(0, [])
    return found
