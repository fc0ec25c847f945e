"""Expected theta relations for the del Pezzo fixtures and pipelines that check them.

An expected relation is a list of :class:`Term` objects ``coeff * z^class *
theta_{i} * theta_{j} ...``.  Products of several theta functions on the right
are expanded in the theta basis with the same diagram, so the comparison with a
computed product is exact modulo the truncation order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .base import build_dual_complex, flatten_by_toric_model
from .broken_lines import multiply_expansions, relation_set, theta_product
from .lattice import load_surface
from .scattering import ScatteringDiagram, initial_diagram, make_consistent
from .series import Grading, TruncatedSeries


@dataclass(frozen=True)
class Term:
    coeff: int
    cls: str
    thetas: tuple = ()


@dataclass(frozen=True)
class ExpectedRelation:
    lhs: tuple  # 1-based boundary indices
    terms: tuple
    printed: str
    note: str = ""


def _t(cls, *thetas, coeff=1):
    return Term(coeff, cls, tuple(thetas))


_ALL_E = "E1-E2-E3-E4-E5-E6"


def _dp3(corrected=False):
    """The cubic relation.

    With ``corrected`` the two conics ``2H - sum E + E_k`` meeting each D_i
    join the (-1)-curves in the theta_i coefficient and the constant
    ``z^[D]`` enters with coefficient +4; this is what the engine computes.
    """
    terms = [_t("[D1]", 1, 1), _t("[D2]", 2, 2), _t("[D3]", 3, 3)]
    pads = {
        1: ["E1", "E2", "H-E3-E5", "H-E3-E6", "H-E4-E5", "H-E4-E6"],
        2: ["E3", "E4", "H-E1-E5", "H-E1-E6", "H-E2-E5", "H-E2-E6"],
        3: ["E5", "E6", "H-E1-E3", "H-E1-E4", "H-E2-E3", "H-E2-E4"],
    }
    for i, extra in pads.items():
        if corrected:
            extra = extra + [f"2H-{_ALL_E}+E{k}" for k in (2 * i - 1, 2 * i)]
        terms += [_t(f"[D{i}]+{c}", i) for c in extra]
    terms.append(_t("H"))
    for a, b, c in itertools.product((1, 2), (3, 4), (5, 6)):
        for lead in ("2H", "4H-E1-E2-E3-E4-E5-E6"):
            terms.append(_t(f"{lead}-E{a}-E{b}-E{c}"))
    for x, y in ((1, 2), (2, 1), (3, 4), (4, 3), (5, 6), (6, 5)):
        terms.append(_t(f"3H-E1-E2-E3-E4-E5-E6+E{y}-E{x}"))
    terms.append(_t("5H-2E1-2E2-2E3-2E4-2E5-2E6"))
    terms.append(_t("D", coeff=4 if corrected else -4))
    note = "the printed list repeats z^(E6-E5); the symmetric pair z^(E5-E6), z^(E6-E5) is used"
    if corrected:
        note += "; conic terms added to each theta_i coefficient and +4 z^[D] in place of -4 z^[D]"
    return [
        ExpectedRelation(
            (1, 2, 3),
            tuple(terms),
            "theta1 theta2 theta3 = sum z^[Di] theta_i^2 + ... + z^(5H-2sum E) - 4 z^[D]",
            note,
        )
    ]


TABLE = {
    "dP5": {
        "order": 3,
        "relations": [
            ExpectedRelation((1, 3), (_t("[D2]", 2), _t("[D4]+[D5]")), "theta1 theta3 = z^[D2] theta2 + z^([D4]+[D5])"),
            ExpectedRelation(
                (2, 4),
                (_t("[D3]", 3), _t("[D5]+[D1]")),
                "theta2 theta4 = z^[D3] theta3 + z^([D1]+[D4])",
                "printed z^([D1]+[D4]) breaks the cyclic pattern z^([D(i+2)]+[D(i+3)]) of the other four rows; "
                "z^([D5]+[D1]) is expected",
            ),
            ExpectedRelation((3, 5), (_t("[D4]", 4), _t("[D1]+[D2]")), "theta3 theta5 = z^[D4] theta4 + z^([D1]+[D2])"),
            ExpectedRelation((4, 1), (_t("[D5]", 5), _t("[D2]+[D3]")), "theta4 theta1 = z^[D5] theta5 + z^([D2]+[D3])"),
            ExpectedRelation((5, 2), (_t("[D1]", 1), _t("[D3]+[D4]")), "theta5 theta2 = z^[D1] theta1 + z^([D3]+[D4])"),
        ],
    },
    "dP4": {
        "order": 5,
        "relations": [
            ExpectedRelation(
                (1, 3),
                (_t("[D2]", 2), _t("[D4]", 4), _t("H-E1"), _t("2H-E1-E2-E3-E5"), _t("2H-E1-E2-E4-E5")),
                "theta1 theta3 = z^[D2] theta2 + z^[D4] theta4 + z^(H-E1) + z^(2H-E1-E2-E3-E5) + z^(2H-E1-E2-E4-E5)",
            ),
            ExpectedRelation(
                (2, 4),
                (_t("[D1]", 1), _t("[D3]", 3), _t("H-E3"), _t("H-E4"), _t("2H-E2-E3-E4-E5")),
                "theta2 theta4 = z^[D1] theta1 + z^[D3] theta3 + z^(H-E3) + z^(H-E4) + z^(2H-E2-E3-E4-E5)",
            ),
        ],
    },
    "dP3": {"order": 13, "relations": _dp3()},
}

CORRECTED = {"dP3": {"order": 13, "relations": _dp3(corrected=True)}}


def surface_pipeline(name: str, order: int, threads: int = 1) -> ScatteringDiagram:
    """Fixture -> flattened complex -> initial diagram -> consistent diagram."""
    s = load_surface(name)
    c = build_dual_complex(s)
    if s.toric_model is None:
        if not c.flattened:
            raise ValueError(f"{name} has no toric model and is not flat")
        return toric_diagram(c)
    c = flatten_by_toric_model(c, s.toric_model)
    d = initial_diagram(c, order=order)
    return make_consistent(d, order, threads)


def toric_diagram(c) -> ScatteringDiagram:
    """The empty diagram on a toric base (no truncation is needed)."""
    nvars = 2 + c.surface.rank
    g = Grading("trivial", (0,) * nvars)
    d = ScatteringDiagram(rays={}, order=1, grading=g, nvars=nvars, base=c, labels=c.surface.labels)
    d.consistent_to = 1
    return d


def expected_expansion(d: ScatteringDiagram, rel: ExpectedRelation, order: int) -> dict:
    """Right-hand side of an expected relation in the theta basis."""
    s = d.base.surface
    rays = d.base.rays
    one = TruncatedSeries.one(d.nvars, order, d.grading)
    out = {}
    for term in rel.terms:
        mono = TruncatedSeries({(0, 0) + s.parse(term.cls): term.coeff}, order, d.grading)
        if not term.thetas:
            expansion = {(0, 0): one}
        else:
            expansion = {tuple(rays[term.thetas[0] - 1]): one}
            for i in term.thetas[1:]:
                expansion = multiply_expansions(d, expansion, {tuple(rays[i - 1]): one}, order)
        for R, c in expansion.items():
            piece = mono * c
            out[R] = out[R] + piece if R in out else piece
    return {R: v for R, v in sorted(out.items()) if v.terms}


def compare(computed: dict, expected: dict) -> list:
    """Differences as (R, height exponent, computed, expected); empty when equal."""
    diffs = []
    for R in sorted(set(computed) | set(expected)):
        a = computed[R].terms if R in computed else {}
        b = expected[R].terms if R in expected else {}
        for e in sorted(set(a) | set(b)):
            if a.get(e, 0) != b.get(e, 0):
                diffs.append((R, e, a.get(e, 0), b.get(e, 0)))
    return diffs


@dataclass
class RelationCheck:
    expected: ExpectedRelation
    computed: dict
    diffs: list

    @property
    def ok(self):
        return not self.diffs


def check_table(
    name: str, order: int = None, threads: int = 1, diagram: ScatteringDiagram = None, corrected=False
) -> list:
    """Compute the relations of a fixture and compare them with the table.

    Only terms below the truncation order are compared, so a lower order gives
    a partial check of every relation.
    """
    entry = CORRECTED.get(name, TABLE[name]) if corrected else TABLE[name]
    order = order or entry["order"]
    d = diagram or surface_pipeline(name, order, threads)
    rays = [tuple(v) for v in d.base.rays]
    computed = {}
    for rel in relation_set(d, order=order, threads=threads):
        computed[frozenset(rays.index(p) + 1 for p in rel.lhs)] = rel.rhs
    out = []
    for exp in entry["relations"]:
        got = computed.get(frozenset(exp.lhs))
        if got is None:
            got = _product(d, exp.lhs, order)
        out.append(RelationCheck(exp, got, compare(got, expected_expansion(d, exp, order))))
    return out


def _product(d, lhs, order):
    rays = d.base.rays
    one = TruncatedSeries.one(d.nvars, order, d.grading)
    if len(lhs) == 2:
        return theta_product(d, rays[lhs[0] - 1], rays[lhs[1] - 1], order)
    prod = {tuple(rays[lhs[0] - 1]): one}
    for i in lhs[1:]:
        prod = multiply_expansions(d, prod, {tuple(rays[i - 1]): one}, order)
    return prod
