"""The mirror family of the degree two del Pezzo surface.

Coefficients ``B_i(X)`` are the ``t^i`` coefficients of ``prod_k N_k(X, t^k)``
where each ``N_k`` is a product of ``(1 + c t z^beta)`` over orbits of
``beta`` under ``C2 x S5`` (swapping E1, E2 and permuting E3..E7).  The
orbit lists ship as fixture data.  The family equation for
``(theta_E8 - theta_E9)^2`` comes from the six relations by solving the
triangular ones for ``theta_2C, theta_3C, theta_2L, theta_3L``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from math import comb, factorial

from .jacobian import Poly, critical_ideal
from .lattice import SurfaceData, load_surface, orbit_expand

__all__ = [
    "IntegrityError",
    "OrbitProduct",
    "load_orbits",
    "n_product",
    "b_coefficient",
    "b_value",
    "b_values",
    "b_values_oracle",
    "family_relations",
    "eliminate_to_family",
    "restrict_base",
    "printed_family",
    "family_fibre",
    "jacobian_fibre_ideal",
    "LABELS",
    "set_orbit_source",
    "family_differences",
    "known_deviations",
]

LABELS = ("C", "L", "E8", "E9")


class IntegrityError(ValueError):
    pass


_SOURCE = {"path": None}


@lru_cache(maxsize=None)
def _doc():
    if _SOURCE["path"]:
        with open(_SOURCE["path"]) as fh:
            return json.load(fh)
    return json.loads(resources.files("scatter.data").joinpath("dp2_orbits.json").read_text())


def set_orbit_source(path=None):
    """Read orbit data from ``path`` instead of the bundled fixture (None resets)."""
    _SOURCE["path"] = path
    _doc.cache_clear()


@dataclass(frozen=True)
class OrbitProduct:
    """``prod (1 + c t z^beta)`` over the orbits of the listed templates."""

    factors: tuple  # (coefficient, template class)
    blocks: tuple

    def orbit_terms(self):
        """(coefficient, class) for every orbit element, in a fixed order."""
        out = []
        for c, beta in self.factors:
            for b in orbit_expand(beta, self.blocks):
                out.append((c, b))
        return out

    def expand(self, tpow: int = 1, max_t: int = 3) -> dict:
        """Polynomial ``{(t-degree, class): coeff}`` for ``prod (1 + c t^tpow z^beta)``."""
        zero = tuple(0 for _ in self.factors[0][1]) if self.factors else ()
        poly = {(0, zero): 1}
        for c, b in self.orbit_terms():
            new = dict(poly)
            for (d, cls), v in poly.items():
                if d + tpow > max_t:
                    continue
                key = (d + tpow, tuple(x + y for x, y in zip(cls, b)))
                new[key] = new.get(key, 0) + v * c
            poly = {k: v for k, v in new.items() if v}
        return poly

    def t_coefficient(self, j: int = 1) -> dict:
        """Coefficient of ``t^j`` as ``{class: coeff}``."""
        return {cls: v for (d, cls), v in self.expand(1, j).items() if d == j}


@lru_cache(maxsize=None)
def surface() -> SurfaceData:
    return load_surface("dP2")


def load_orbits(corrected: bool = True) -> dict:
    """``{label: {k: OrbitProduct}}`` from the fixture.

    With ``corrected=False`` the classes are taken exactly as printed.
    """
    doc = _doc()
    s = surface()
    blocks = tuple(tuple(b) for b in doc["blocks"])
    fixes = {(f["label"], f["k"], f["index"]): f["used"] for f in doc["corrections"]} if corrected else {}
    out = {}
    for label, ks in doc["N"].items():
        out[label] = {}
        for k, lst in ks.items():
            factors = []
            for idx, (c, text) in enumerate(lst):
                text = fixes.get((label, int(k), idx), text)
                factors.append((c, s.parse(text)))
            out[label][int(k)] = OrbitProduct(tuple(factors), blocks)
    return out


def n_product(label: str, k: int, corrected: bool = True) -> OrbitProduct:
    orbits = load_orbits(corrected)
    if label not in orbits:
        raise KeyError(f"unknown class label {label!r}; expected one of {', '.join(LABELS)}")
    return orbits[label][k]


def b_coefficient(label: str, k: int, corrected: bool = True) -> dict:
    """``B_k(label)`` as ``{class: coeff}``: the ``t^k`` part of ``prod_j N_j(label, t^j)``."""
    if not 1 <= k <= 3:
        raise ValueError("B_k is available for k = 1, 2, 3")
    orbits = load_orbits(corrected)
    if label not in orbits:
        raise KeyError(f"unknown class label {label!r}; expected one of {', '.join(LABELS)}")
    zero = surface().zero()
    total = {(0, zero): 1}
    for j, prod in sorted(orbits[label].items()):
        part = prod.expand(j, k)
        new = {}
        for (d1, c1), v1 in total.items():
            for (d2, c2), v2 in part.items():
                if d1 + d2 <= k:
                    key = (d1 + d2, tuple(x + y for x, y in zip(c1, c2)))
                    new[key] = new.get(key, 0) + v1 * v2
        total = {kk: v for kk, v in new.items() if v}
    return {cls: v for (d, cls), v in sorted(total.items()) if d == k}


def b_value(label: str, k: int, corrected: bool = True) -> int:
    """``B_k(label)`` with every monomial set to 1."""
    return sum(b_coefficient(label, k, corrected).values())


def b_values(corrected: bool = True) -> dict:
    """The eight numbers in the order B3(C), B2(C), B1(C), B3(L), B2(L), B1(L), B1(E8), B1(E9)."""
    out = {}
    for label in ("C", "L"):
        for k in (3, 2, 1):
            out[f"B{k}({label})"] = b_value(label, k, corrected)
    out["B1(E8)"] = b_value("E8", 1, corrected)
    out["B1(E9)"] = b_value("E9", 1, corrected)
    return out


# -- independent oracle ---------------------------------------------------------


def _orbit_size(template, blocks) -> int:
    """Multinomial count of distinct rearrangements inside each block."""
    size = 1
    for block in blocks:
        counts = Counter(template[i] for i in block)
        n = factorial(len(block))
        for m in counts.values():
            n //= factorial(m)
        size *= n
    return size


def _elementary(weights: Counter, m: int) -> int:
    """e_m of the multiset of weights, summed with binomials per distinct weight."""
    items = sorted(weights.items())

    def rec(i, left):
        if left == 0:
            return 1
        if i == len(items):
            return 0
        w, mult = items[i]
        return sum(comb(mult, j) * w**j * rec(i + 1, left - j) for j in range(0, min(mult, left) + 1))

    return rec(0, m)


def _partitions(n, parts):
    """Multiplicity vectors (m_1, ..., m_r) with sum k * m_k = n."""
    if not parts:
        if n == 0:
            yield ()
        return
    k = parts[0]
    for m in range(n // k + 1):
        for rest in _partitions(n - k * m, parts[1:]):
            yield (m,) + rest


def b_values_oracle(corrected: bool = True) -> dict:
    """The eight numbers from orbit sizes and elementary symmetric functions only."""
    doc = _doc()
    s = surface()
    blocks = [[i for i in b] for b in doc["blocks"]]
    fixes = {(f["label"], f["k"], f["index"]): f["used"] for f in doc["corrections"]} if corrected else {}

    def weights(label, k):
        w = Counter()
        for idx, (c, text) in enumerate(doc["N"][label].get(str(k), [])):
            w[c] += _orbit_size(s.parse(fixes.get((label, k, idx), text)), blocks)
        return w

    def value(label, n):
        ks = sorted(int(k) for k in doc["N"][label])
        total = 0
        for ms in _partitions(n, ks):
            term = 1
            for k, m in zip(ks, ms):
                term *= _elementary(weights(label, k), m)
            total += term
        return total

    out = {}
    for label in ("C", "L"):
        for k in (3, 2, 1):
            out[f"B{k}({label})"] = value(label, k)
    out["B1(E8)"] = value("E8", 1)
    out["B1(E9)"] = value("E9", 1)
    return out


# -- the family ---------------------------------------------------------------


def family_vars():
    v = _doc()["variables"]
    return tuple(v["theta"]) + tuple(v["base"])


def _equation(text, vars):
    lhs, rhs = text.split("=")
    return Poly.parse(lhs, vars) - Poly.parse(rhs, vars)


def family_relations() -> list:
    """The six relations as polynomials ``lhs - rhs`` in the theta and base variables."""
    vars = family_vars()
    return [_equation(t, vars) for t in _doc()["relations"]]


def restrict_base(eq: Poly, assignments: dict) -> Poly:
    """Substitute values (or polynomials, or variable names) for base variables."""
    vars = eq.vars
    mapping = {}
    for k, v in assignments.items():
        if k not in vars:
            raise KeyError(f"unknown variable {k!r}")
        mapping[k] = Poly.var(v, vars) if isinstance(v, str) else v
    return eq.subs(mapping)


E_LOCUS = {"z8": 1, "z9": 1, "B1E9": "B1E8"}


def _solve_linear(rel: Poly, var: str) -> Poly:
    """Solve ``rel = 0`` for a variable that occurs with coefficient +-1 and degree 1."""
    if rel.degree_in(var) != 1:
        raise IntegrityError(f"{var} is not linear in the relation")
    coeff = rel.coefficient_in(var, 1)
    if not coeff.is_constant() or coeff.constant() not in (1, -1):
        raise IntegrityError(f"{var} does not have a unit coefficient")
    rest = rel - coeff * Poly.var(var, rel.vars)
    return rest.scale(-1) if coeff.constant() == 1 else rest


def eliminate_to_family(relations=None, restrict=E_LOCUS) -> Poly:
    """Right-hand side of the equation for ``(t8 - t9)^2``.

    The relations are first restricted to ``z8 = z9 = 1`` (which also
    identifies B1(E9) with B1(E8)); the result is checked to have integer
    coefficients and no remaining dependence on t8, t9.
    """
    rels = list(relations or family_relations())
    if restrict:
        rels = [restrict_base(r, restrict) for r in rels]
    vars = rels[0].vars
    tC, tL = Poly.var("tC", vars), Poly.var("tL", vars)
    t8, t9 = Poly.var("t8", vars), Poly.var("t9", vars)
    r1, r2, r3, r4, r5, r6 = rels
    # triangular part: t2C, t2L from the squares; t3C, t3L from the cubes
    sol = {"t2C": _solve_linear(r5, "t2C"), "t2L": _solve_linear(r6, "t2L")}
    sol["t3C"] = _solve_linear(r3, "t3C").subs(sol)
    sol["t3L"] = _solve_linear(r4, "t3L").subs(sol)
    # theta_8 theta_9 from the second relation
    prod_term = Poly.var("t8", vars) * Poly.var("t9", vars)
    p = (prod_term - r2).subs(sol)
    if p.coefficient_in("t8", 1).coefficient_in("t9", 1):
        raise IntegrityError("relation for t8*t9 is not of the expected shape")
    # t8 + t9 from the first relation (equal unit coefficients after restriction)
    s_expr = t8 + t9 + r1
    if s_expr.degree_in("t8") or s_expr.degree_in("t9"):
        raise IntegrityError("t8 and t9 do not enter the first relation as t8 + t9")
    # in p, t8 and t9 may only enter through t8 + t9
    p_s = p.subs({"t8": Poly.var("t8", vars) - t9})
    if p_s.degree_in("t9"):
        raise IntegrityError("t8, t9 enter the product relation asymmetrically")
    p_final = p_s.subs({"t8": s_expr})
    family = s_expr * s_expr - p_final.scale(4)
    for c in family.terms.values():
        if getattr(c, "denominator", 1) != 1:
            raise IntegrityError(f"non-integer coefficient {c} in the family equation")
    del tC, tL
    return family


def printed_family() -> Poly:
    """The printed right-hand side, parsed in the same variables."""
    lhs, rhs = _doc()["family"].split("=")
    return Poly.parse(rhs, family_vars())


def family_fibre(values=None) -> tuple:
    """Equations of the fibre over all monomials 1, in variables tC, tL, t8, t9.

    Returns ``(f1, f2)`` where f1 is the first relation and f2 the product
    relation, both with t2C, t3C, t2L, t3L eliminated.
    """
    if values is None:
        values = {"zC": 1, "zL": 1, "z8": 1, "z9": 1}
        for label in ("C", "L"):
            for k in (1, 2, 3):
                values[f"B{k}{label}"] = b_value(label, k)
        values["B1E8"] = b_value("E8", 1)
        values["B1E9"] = b_value("E9", 1)
    rels = [r.subs(values) for r in family_relations()]
    r1, r2, r3, r4, r5, r6 = rels
    sol = {"t2C": _solve_linear(r5, "t2C"), "t2L": _solve_linear(r6, "t2L")}
    sol["t3C"] = _solve_linear(r3, "t3C").subs(sol)
    sol["t3L"] = _solve_linear(r4, "t3L").subs(sol)
    f2 = r2.subs(sol)
    small = ("tC", "tL", "t8", "t9")
    return tuple(_shrink(f, small) for f in (r1, f2))


def _shrink(f: Poly, vars) -> Poly:
    pos = [f.vars.index(v) for v in vars]
    out = {}
    for e, c in f.terms.items():
        if any(x for i, x in enumerate(e) if i not in pos):
            raise IntegrityError("polynomial still involves eliminated variables")
        key = tuple(e[i] for i in pos)
        out[key] = out.get(key, 0) + c
    return Poly(out, vars)


def jacobian_fibre_ideal(potential: str = "tC + tL"):
    """Critical ideal of the potential on the all-monomials-1 fibre."""
    f1, f2 = family_fibre()
    W = Poly.parse(potential, f1.vars)
    return critical_ideal([f1, f2], W)


def family_differences(derived: Poly = None, printed: Poly = None) -> list:
    """Terms where the derived and printed equations differ: (monomial, derived, printed)."""
    derived = derived if derived is not None else eliminate_to_family()
    printed = printed if printed is not None else printed_family()
    out = []
    for e in sorted(set(derived.terms) | set(printed.terms)):
        a, b = derived.terms.get(e, 0), printed.terms.get(e, 0)
        if a != b:
            mono = str(Poly({e: 1}, derived.vars))
            out.append((mono, a, b))
    return out


def known_deviations() -> list:
    """Documented differences between the derived and printed family equations."""
    return [(d["monomial"], d["derived"], d["printed"]) for d in _doc().get("familyDeviations", [])]
