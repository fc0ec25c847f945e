"""Curve classes on del Pezzo surfaces.

A curve class is a tuple of integers in the basis ``(H, E1, ..., Ek)``.  The
intersection form defaults to ``diag(1, -1, ..., -1)``; surfaces that are not
blow-ups of the plane (``P1xP1``) carry their own Gram matrix.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

CurveClass = tuple


class DimensionError(ValueError):
    pass


class SpecError(ValueError):
    pass


def diagonal_form(k: int) -> tuple:
    n = k + 1
    return tuple(
        tuple((1 if i == 0 else -1) if i == j else 0 for j in range(n)) for i in range(n)
    )


@dataclass(frozen=True)
class SurfaceData:
    name: str
    degree: int
    labels: tuple
    boundary: tuple
    self_intersections: tuple
    form: tuple = None
    anticanonical: tuple = None
    toric_model: dict = field(default=None, compare=False)
    notes: str = field(default="", compare=False)

    def __post_init__(self):
        n = len(self.labels)
        if self.form is None:
            object.__setattr__(self, "form", diagonal_form(n - 1))
        if self.anticanonical is None:
            object.__setattr__(self, "anticanonical", (3,) + (-1,) * (n - 1))
        for b in self.boundary:
            if len(b) != n:
                raise DimensionError(f"boundary class {b} has length {len(b)}, expected {n}")

    @property
    def rank(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.boundary)

    def zero(self) -> CurveClass:
        return (0,) * self.rank

    def basis(self, label: str) -> CurveClass:
        i = self.labels.index(label)
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def intersect(self, a: Sequence[int], b: Sequence[int]) -> int:
        return intersect(a, b, self.form)

    def anticanonical_degree(self, a: Sequence[int]) -> int:
        return self.intersect(self.anticanonical, a)

    def parse(self, text: str) -> CurveClass:
        return parse_class(text, self)

    def format(self, cls: Sequence[int]) -> str:
        return format_class(cls, self.labels)

    def check(self) -> None:
        """Raise SpecError unless the boundary is an anticanonical cycle."""
        total = tuple(map(sum, zip(*self.boundary)))
        if total != tuple(self.anticanonical):
            raise SpecError(f"{self.name}: boundary sums to {total}, not -K")
        for i, (b, s) in enumerate(zip(self.boundary, self.self_intersections)):
            if self.intersect(b, b) != s:
                raise SpecError(f"{self.name}: D{i + 1}^2 = {self.intersect(b, b)} != {s}")
        n = self.n
        if n >= 3:
            for i in range(n):
                m = self.intersect(self.boundary[i], self.boundary[(i + 1) % n])
                if m != 1:
                    raise SpecError(f"{self.name}: D{i + 1}.D{(i + 1) % n + 1} = {m}")


def intersect(a: Sequence[int], b: Sequence[int], form=None) -> int:
    if len(a) != len(b):
        raise DimensionError(f"classes of different length: {len(a)} vs {len(b)}")
    if form is None:
        return a[0] * b[0] - sum(x * y for x, y in zip(a[1:], b[1:]))
    return sum(a[i] * form[i][j] * b[j] for i in range(len(a)) for j in range(len(b)) if form[i][j])


def anticanonical_degree(a: Sequence[int]) -> int:
    """Degree against ``3H - sum E_i`` in the blow-up basis."""
    return 3 * a[0] + sum(a[1:])


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def scale(k, a):
    return tuple(k * x for x in a)


_TERM = re.compile(r"([+-]?)\s*(\d*)\s*\*?\s*(\[?[A-Za-z][A-Za-z0-9_]*\]?)")


def parse_class(text: str, surface: SurfaceData) -> CurveClass:
    """Parse expressions like ``2H - E1 - E2``, ``[D2] + [D4]`` or ``-K``."""
    text = text.replace(" ", "")
    if not text or text == "0":
        return surface.zero()
    pos = 0
    out = [0] * surface.rank
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise SpecError(f"cannot parse class {text!r} at {text[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        mult = int(m.group(2)) if m.group(2) else 1
        name = m.group(3).strip("[]")
        if name in surface.labels:
            vec = surface.basis(name)
        elif name in ("K", "D"):
            vec = tuple(-x for x in surface.anticanonical) if name == "K" else tuple(surface.anticanonical)
        elif re.fullmatch(r"D\d+", name):
            idx = int(name[1:]) - 1
            if not 0 <= idx < surface.n:
                raise SpecError(f"no boundary component {name}")
            vec = surface.boundary[idx]
        else:
            raise SpecError(f"unknown label {name!r}")
        for i, x in enumerate(vec):
            out[i] += sign * mult * x
        pos = m.end()
    return tuple(out)


def format_class(cls: Sequence[int], labels: Sequence[str]) -> str:
    parts = []
    for c, lab in zip(cls, labels):
        if c == 0:
            continue
        mag = "" if abs(c) == 1 else str(abs(c))
        parts.append(("-" if c < 0 else "+") + mag + lab)
    if not parts:
        return "0"
    s = "".join(parts)
    return s[1:] if s[0] == "+" else s


def _blocks_ok(blocks, k):
    seen = set()
    for block in blocks:
        for i in block:
            if not 1 <= i <= k:
                raise SpecError(f"block index E{i} out of range 1..{k}")
            if i in seen:
                raise SpecError(f"block index E{i} appears twice")
            seen.add(i)


def orbit_expand(template: Sequence[int], blocks: Iterable[Iterable[int]]) -> list:
    """Orbit of a class under permutations of exceptional indices within blocks.

    ``blocks`` lists disjoint sets of exceptional indices (1-based, so ``[1, 2]``
    swaps E1 and E2).  The orbit is returned sorted lexicographically.
    """
    blocks = [list(b) for b in blocks]
    _blocks_ok(blocks, len(template) - 1)
    choices = []
    for block in blocks:
        coeffs = [template[i] for i in block]
        choices.append(sorted(set(itertools.permutations(coeffs))))
    orbit = set()
    for combo in itertools.product(*choices):
        v = list(template)
        for block, perm in zip(blocks, combo):
            for i, c in zip(block, perm):
                v[i] = c
        orbit.add(tuple(v))
    return sorted(orbit)


def group_order(blocks) -> int:
    out = 1
    for b in blocks:
        for i in range(2, len(list(b)) + 1):
            out *= i
    return out


# -- fixtures -----------------------------------------------------------------


def surface_from_json(doc: dict, name: str = None) -> SurfaceData:
    labels = tuple(doc["labels"])
    stub = SurfaceData(
        name=name or doc.get("name", "surface"),
        degree=doc["degree"],
        labels=labels,
        boundary=(),
        self_intersections=(),
        form=tuple(map(tuple, doc["form"])) if doc.get("form") else None,
        anticanonical=tuple(doc["anticanonical"]) if doc.get("anticanonical") else None,
    )
    boundary = tuple(
        tuple(b) if isinstance(b, list) else parse_class(b, stub) for b in doc["boundary"]
    )
    selfint = doc.get("selfIntersections")
    if selfint is None:
        selfint = [stub.intersect(b, b) for b in boundary]
    model = doc.get("toricModel")
    if model is not None:
        model = {int(k) - 1: list(v) for k, v in model.items()}
    surf = SurfaceData(
        name=stub.name,
        degree=stub.degree,
        labels=labels,
        boundary=boundary,
        self_intersections=tuple(selfint),
        form=stub.form,
        anticanonical=stub.anticanonical,
        toric_model=model,
        notes=doc.get("notes", ""),
    )
    surf.check()
    return surf


def surface_to_json(s: SurfaceData) -> dict:
    doc = {
        "degree": s.degree,
        "labels": list(s.labels),
        "boundary": [list(b) for b in s.boundary],
        "selfIntersections": list(s.self_intersections),
    }
    if s.form != diagonal_form(s.rank - 1):
        doc["form"] = [list(r) for r in s.form]
    if tuple(s.anticanonical) != (3,) + (-1,) * (s.rank - 1):
        doc["anticanonical"] = list(s.anticanonical)
    if s.toric_model is not None:
        doc["toricModel"] = {str(k + 1): v for k, v in sorted(s.toric_model.items())}
    return doc


def _fixture_docs() -> dict:
    text = resources.files("scatter.data").joinpath("surfaces.json").read_text()
    return json.loads(text)


def fixture_names() -> list:
    return sorted(_fixture_docs())


def load_surface(name_or_path: str) -> SurfaceData:
    docs = _fixture_docs()
    if name_or_path in docs:
        return surface_from_json(docs[name_or_path], name_or_path)
    try:
        with open(name_or_path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise SpecError(f"unknown surface {name_or_path!r}; fixtures: {', '.join(sorted(docs))}")
    return surface_from_json(doc, doc.get("name", name_or_path))
