"""Command-line front end.

Commands::

    scatter consistent --surface NAME|FILE --order N [--threads T] [--out FILE]
    scatter theta --surface NAME --order N [--pairs all|i,j] [--out FILE] [--latex FILE]
    scatter dp2-family [--check-b-values] [--out FILE]
    scatter jacobian [--family FILE] [--potential W] [--torus W --vars x,y] [--ideal g1;g2 --vars x,y]
    scatter verify [--only b-values|family|jacobian|tables] [--orbits FILE]
    scatter fixtures list

Exit codes: 0 success, 1 a verification check failed, 2 configuration error,
3 internal consistency failure.  JSON output is canonical (sorted keys, no
timestamps), so runs with different thread counts give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import dp2
from .base import build_dual_complex, flatten_by_toric_model
from .broken_lines import InconsistentDiagram, relation_set, theta_product
from .jacobian import DimensionError, Ideal, Poly, critical_ideal, torus_critical_ideal
from .lattice import SpecError, fixture_names, format_class, load_surface
from .relations import TABLE, check_table, surface_pipeline
from .scattering import (
    ConsistencyError,
    ScatteringDiagram,
    default_start,
    is_identity,
    ks_basic_diagram,
    make_consistent,
)

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_CONFIG = 2
EXIT_CONSISTENCY = 3

KS_BASIC = "ks-basic"


class ConfigError(ValueError):
    pass


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# -- diagrams -----------------------------------------------------------------


def _check_order(order, threads=1):
    if order is None or order < 1:
        raise ConfigError("--order must be at least 1")
    if threads < 1:
        raise ConfigError("--threads must be at least 1")


def _base(name):
    s = load_surface(name)
    c = build_dual_complex(s)
    if s.toric_model is None:
        return c
    return flatten_by_toric_model(c, s.toric_model)


def _cache_path(name, order):
    root = os.environ.get("SCATTER_CACHE_DIR")
    if not root or os.path.exists(name):
        return None
    return os.path.join(root, f"{name}-order{order}.json")


def consistent_diagram(name: str, order: int, threads: int = 1) -> ScatteringDiagram:
    """Consistent diagram for a fixture, a surface file or ``ks-basic``.

    With SCATTER_CACHE_DIR set, finished diagrams are stored there and
    reused; a cached diagram is re-checked before it is trusted.
    """
    _check_order(order, threads)
    if name == KS_BASIC:
        return make_consistent(ks_basic_diagram(order), order, threads)
    try:
        load_surface(name)
    except (SpecError, KeyError, FileNotFoundError, ValueError) as exc:
        raise ConfigError(f"unknown surface {name!r}: {exc}") from exc
    path = _cache_path(name, order)
    if path and os.path.exists(path):
        with open(path) as fh:
            d = ScatteringDiagram.from_json(json.load(fh), base=_base(name))
        if d.order == order and (not d.rays or is_identity(d, default_start(d), order)):
            d.consistent_to = order
            return d
    d = surface_pipeline(name, order, threads)
    if path:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w") as fh:
            fh.write(d.dumps())
    return d


def diagram_document(d: ScatteringDiagram, surface: str) -> dict:
    doc = d.to_json()
    doc["surface"] = surface
    return doc


def cmd_consistent(args):
    d = consistent_diagram(args.surface, args.order, args.threads)
    _write(dumps(diagram_document(d, args.surface)), args.out)
    return EXIT_OK


# -- theta relations ----------------------------------------------------------


def _height_terms(series, labels):
    out = []
    for e, c in sorted(series.terms.items()):
        out.append({"coeff": str(c), "class": format_class(e[2:], labels)})
    return out


def _theta_name(R, rays):
    if R == (0, 0):
        return "1"
    if R in rays:
        return f"theta{rays.index(R) + 1}"
    return f"theta({R[0]},{R[1]})"


def relation_document(lhs, rhs, rays, labels):
    return {
        "lhs": [_theta_name(tuple(p), rays) for p in lhs],
        "rhs": [
            {"theta": _theta_name(R, rays), "dir": list(R), "coefficient": _height_terms(s, labels)}
            for R, s in sorted(rhs.items())
        ],
    }


def theta_relations(name, order, pairs="all", threads=1):
    d = consistent_diagram(name, order, threads) if name != KS_BASIC else None
    if d is None:
        raise ConfigError("theta functions need a surface fixture")
    rays = [tuple(v) for v in d.base.rays]
    labels = d.base.surface.labels
    if pairs == "all":
        rels = [(r.lhs, r.rhs) for r in relation_set(d, order=order, threads=threads)]
    else:
        try:
            i, j = (int(x) for x in pairs.split(","))
            P, Q = rays[i - 1], rays[j - 1]
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"--pairs expects 'all' or i,j with 1 <= i, j <= {len(rays)}") from exc
        rels = [((P, Q), theta_product(d, P, Q, order))]
    return d, [relation_document(lhs, rhs, rays, labels) for lhs, rhs in rels]


def _latex_class(cls):
    return cls.replace("[", "").replace("]", "")


def _latex_coefficient(terms):
    parts = []
    for t in terms:
        c = int(t["coeff"]) if "/" not in t["coeff"] else t["coeff"]
        mono = "" if t["class"] == "0" else f"z^{{{_latex_class(t['class'])}}}"
        if c == 1:
            s = mono or "1"
        elif c == -1:
            s = "-" + (mono or "1")
        else:
            s = f"{c}{mono}"
        parts.append(s)
    body = " + ".join(parts).replace("+ -", "- ")
    return body if len(parts) == 1 else f"({body})"


def latex_table(surface, relations) -> str:
    """Rows ``surface & relation`` in the layout of the published table."""
    lines = ["\\begin{tabular}{ll}", "\\hline", "Surface & Relations \\\\", "\\hline"]
    for k, rel in enumerate(relations):
        lhs = " ".join("\\vartheta_{%s}" % t[len("theta") :] for t in rel["lhs"])
        rhs = []
        parts = sorted(rel["rhs"], key=lambda p: (p["theta"] == "1", p["theta"]))
        for part in parts:
            coeff = _latex_coefficient(part["coefficient"])
            if part["theta"] == "1":
                rhs.append(coeff)
            else:
                idx = part["theta"][len("theta") :]
                rhs.append(f"{'' if coeff == '1' else coeff}\\vartheta_{{{idx}}}")
        first = surface if k == 0 else ""
        lines.append(f"{first} & ${lhs} = {' + '.join(rhs) or '0'}$ \\\\")
    lines += ["\\hline", "\\end{tabular}", ""]
    return "\n".join(lines)


def cmd_theta(args):
    if args.surface not in TABLE and args.order is None:
        raise ConfigError("--order is required for surfaces without a reference table")
    order = args.order or TABLE[args.surface]["order"]
    _, rels = theta_relations(args.surface, order, args.pairs, args.threads)
    doc = {"surface": args.surface, "order": order, "relations": rels}
    _write(dumps(doc), args.out)
    if args.latex:
        _write(latex_table(args.surface, rels), args.latex)
    return EXIT_OK


# -- dP2 ----------------------------------------------------------------------


def family_document():
    derived = dp2.eliminate_to_family()
    f1, f2 = dp2.family_fibre()
    return {
        "variables": list(derived.vars),
        "restriction": {k: v for k, v in dp2.E_LOCUS.items()},
        "family": "(t8 - t9)^2 = " + str(derived),
        "printed": "(t8 - t9)^2 = " + str(dp2.printed_family()),
        "differences": [
            {"monomial": m, "derived": str(a), "printed": str(b)} for m, a, b in dp2.family_differences(derived)
        ],
        "fibre": {"variables": list(f1.vars), "equations": [str(f1), str(f2)]},
    }


def b_value_document():
    vals = dp2.b_values()
    oracle = dp2.b_values_oracle()
    expected = {}
    for label, vals_k in dp2._doc().get("bValues", {}).items():
        for k, v in enumerate(vals_k, start=1):
            expected[f"B{k}({label})"] = v
    return {
        "values": vals,
        "oracle": oracle,
        "expected": expected,
        "ok": vals == oracle and all(vals.get(k) == v for k, v in expected.items()),
    }


def cmd_dp2_family(args):
    doc = {"family": family_document()}
    status = EXIT_OK
    if args.check_b_values:
        doc["bValues"] = b = b_value_document()
        if not b["ok"]:
            status = EXIT_CHECK
    _write(dumps(doc), args.out)
    return status


# -- Jacobian rings -----------------------------------------------------------


def _vars(text):
    if not text:
        raise ConfigError("--vars is required")
    return tuple(v.strip() for v in text.split(",") if v.strip())


def jacobian_ideal(args) -> Ideal:
    if args.torus:
        return torus_critical_ideal(Poly.parse(args.torus, _vars(args.vars)))
    if args.ideal:
        vars = _vars(args.vars)
        return Ideal([Poly.parse(g, vars) for g in args.ideal.split(";")], vars)
    if args.family:
        with open(args.family) as fh:
            doc = json.load(fh)
        fibre = doc.get("family", doc)["fibre"]
        vars = tuple(fibre["variables"])
        eqs = [Poly.parse(e, vars) for e in fibre["equations"]]
        return critical_ideal(eqs, Poly.parse(args.potential, vars))
    return dp2.jacobian_fibre_ideal(args.potential)


def cmd_jacobian(args):
    try:
        ideal = jacobian_ideal(args)
    except (SyntaxError, KeyError) as exc:
        raise ConfigError(f"cannot parse the input: {exc}") from exc
    _write(dumps(ideal.report()), args.out)
    return EXIT_OK


# -- verify -------------------------------------------------------------------


def _check(name, fn):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a broken fixture must show up as a named failure
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return {"check": name, "ok": ok, "detail": detail, "seconds": round(time.perf_counter() - t0, 3)}


def _verify_b_values():
    b = b_value_document()
    return b["ok"], b["values"]


def _verify_family():
    diffs = dp2.family_differences()
    known = dp2.known_deviations()
    detail = {"differences": [list(map(str, d)) for d in diffs], "documented": [list(map(str, d)) for d in known]}
    return [tuple(map(str, d)) for d in diffs] == [tuple(map(str, d)) for d in known], detail


def _verify_jacobian():
    dims = {
        "dP2 fibre": dp2.jacobian_fibre_ideal().quotient_dimension(),
        "P2 torus": torus_critical_ideal(Poly.parse("x + y + 1/(x*y)", ("x", "y"))).quotient_dimension(),
        "<x^2, y^2>": Ideal([Poly.parse("x^2", ("x", "y")), Poly.parse("y^2", ("x", "y"))]).quotient_dimension(),
    }
    return dims == {"dP2 fibre": 10, "P2 torus": 3, "<x^2, y^2>": 4}, dims


def _verify_tables():
    detail = {}
    ok = True
    for name in ("dP5", "dP4"):
        checks = check_table(name)
        detail[name] = [c.ok for c in checks]
        ok = ok and all(detail[name])
    return ok, detail


CHECKS = {
    "b-values": _verify_b_values,
    "family": _verify_family,
    "jacobian": _verify_jacobian,
    "tables": _verify_tables,
}


def cmd_verify(args):
    if args.orbits:
        if not os.path.exists(args.orbits):
            raise ConfigError(f"no such orbit file {args.orbits!r}")
        dp2.set_orbit_source(args.orbits)
    try:
        names = [args.only] if args.only else list(CHECKS)
        results = [_check(n, CHECKS[n]) for n in names]
    finally:
        if args.orbits:
            dp2.set_orbit_source(None)
    for r in results:
        print(f"{'PASS' if r['ok'] else 'FAIL'} {r['check']}: {json.dumps(r['detail'], sort_keys=True)}")
    if args.out:
        _write(dumps([{k: v for k, v in r.items() if k != "seconds"} for r in results]), args.out)
    return EXIT_OK if all(r["ok"] for r in results) else EXIT_CHECK


def cmd_fixtures(args):
    for name in [KS_BASIC] + fixture_names():
        print(name)
    return EXIT_OK


# -- entry point --------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="scatter", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("consistent", help="complete a scattering diagram")
    c.add_argument("--surface", required=True)
    c.add_argument("--order", type=int, required=True)
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--out")
    c.set_defaults(func=cmd_consistent)

    t = sub.add_parser("theta", help="theta function relations")
    t.add_argument("--surface", required=True)
    t.add_argument("--order", type=int)
    t.add_argument("--pairs", default="all")
    t.add_argument("--threads", type=int, default=1)
    t.add_argument("--out")
    t.add_argument("--latex")
    t.set_defaults(func=cmd_theta)

    f = sub.add_parser("dp2-family", help="the dP2 mirror family")
    f.add_argument("--check-b-values", action="store_true")
    f.add_argument("--out")
    f.set_defaults(func=cmd_dp2_family)

    j = sub.add_parser("jacobian", help="Jacobian ring dimensions")
    j.add_argument("--family")
    j.add_argument("--potential", default="tC + tL")
    j.add_argument("--torus")
    j.add_argument("--ideal")
    j.add_argument("--vars")
    j.add_argument("--out")
    j.set_defaults(func=cmd_jacobian)

    v = sub.add_parser("verify", help="bundled checks")
    v.add_argument("--only", choices=sorted(CHECKS))
    v.add_argument("--orbits")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    x = sub.add_parser("fixtures", help="fixture registry")
    x.add_argument("action", choices=["list"])
    x.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, DimensionError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConsistencyError, InconsistentDiagram, dp2.IntegrityError) as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY


if __name__ == "__main__":
    sys.exit(main())
