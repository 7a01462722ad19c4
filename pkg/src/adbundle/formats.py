"""JSON corpus loaders and bit-exact dumps.

Rationals are always strings (``str(Fraction)``: ``"2"``, ``"-1/3"``).  A
scalar of a base field of degree 1 is one string, otherwise a list of
coordinate strings.  Dumps use fixed key order and ``indent=1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .grp import FiniteGroup, cycles_to_perm, group_from_generators
from .hopf import CharacterData, HopfAlgebra, hopf_from_dense
from .numfield import FieldElement, NumberField, Subfield, build_tower
from .profinite import EtaleAlgebra, FiniteTower, linear_tower


class CorpusError(ValueError):
    pass


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{path}: {exc}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=False) + "\n"


def _resolve(ref, where: Path | None):
    """Inline object or a path relative to the referring file."""
    if isinstance(ref, dict):
        return ref
    p = Path(ref)
    if where is not None and not p.is_absolute():
        p = where / p
    return read_json(p)


# ---------------------------------------------------------------------------
# groups


def group_from_json(doc: dict) -> FiniteGroup:
    if "table" in doc:
        return FiniteGroup.from_table(doc["table"])
    if "points" in doc:
        n = int(doc["points"])
        gens = [cycles_to_perm(n, g) for g in doc.get("generators", [])]
        return group_from_generators(n, gens)
    raise CorpusError("group file needs 'table' or 'points'")


def load_group(path) -> FiniteGroup:
    return group_from_json(read_json(path))


# ---------------------------------------------------------------------------
# fields and extensions


def field_from_json(doc: dict) -> tuple[NumberField, dict]:
    try:
        steps = [(s.get("label", f"x{k}"), s["minpoly"]) for k, s in enumerate(doc["tower"])]
    except (KeyError, TypeError) as exc:
        raise CorpusError(f"bad tower description: {exc}") from exc
    base = int(doc.get("base_degree", 1))
    L = build_tower(steps, base_degree=base)
    roots = {int(k): v for k, v in doc.get("roots", {}).items()}
    return L, roots


def load_field(path) -> tuple[NumberField, dict]:
    return field_from_json(read_json(path))


def subfield_from_spec(L: NumberField, spec, action=None) -> Subfield:
    """``{"level": k}`` (tower prefix), ``{"generators": [[coords]]}``, or the
    string forms ``level:k`` / ``gen:c0,c1,...``."""
    from .numfield import generated_subfield

    if isinstance(spec, str):
        kind, _, rest = spec.partition(":")
        if kind == "level":
            spec = {"level": int(rest)}
        elif kind == "gen":
            spec = {"generators": [rest.split(",")]}
        else:
            raise CorpusError(f"unknown subfield spec {spec!r}")
    if "level" in spec:
        levels = L.tower_degrees()
        k = int(spec["level"])
        if not 0 <= k < len(levels):
            raise CorpusError(f"no tower level {k}")
        d = levels[k]
        return Subfield(L, [L.basis_element(i).c for i in range(d)])
    if "generators" in spec:
        return generated_subfield(L, [L.elem(v) for v in spec["generators"]])
    raise CorpusError(f"unknown subfield spec {spec!r}")


def subfields_from_spec(L: NumberField, spec: str) -> list:
    return [subfield_from_spec(L, s.strip()) for s in spec.split(";") if s.strip()]


# ---------------------------------------------------------------------------
# other inputs


def characters_from_json(doc: dict, G: FiniteGroup | None = None) -> CharacterData:
    if G is None:
        G = group_from_json(doc["group"])
    return CharacterData(G, [int(x) for x in doc["dims"]],
                         [[int(i) for i in o] for o in doc["galois_orbits"]])


def etale_from_json(doc: dict, where: Path | None = None) -> EtaleAlgebra:
    K, _ = field_from_json(_resolve(doc["base"], where))
    factors = [field_from_json(_resolve(f, where))[0] for f in doc["factors"]]
    return EtaleAlgebra(K, factors)


def settower_from_json(doc: dict) -> FiniteTower:
    return linear_tower(doc["levels"], [tuple(m) for m in doc["maps"]])


# ---------------------------------------------------------------------------
# cases


@dataclass
class CorpusCase:
    name: str
    path: Path
    kind: str
    doc: dict
    expected: dict = field(default_factory=dict)

    @property
    def where(self) -> Path:
        return self.path.parent


def load_case(path) -> CorpusCase:
    path = Path(path)
    doc = read_json(path)
    kind = doc.get("kind", "case")
    name = doc.get("name", path.stem)
    return CorpusCase(name, path, kind, doc, doc.get("expected", {}))


# ---------------------------------------------------------------------------
# dumps


def scalar_out(x: FieldElement):
    if x.field.degree == 1:
        return str(x.c[0])
    return [str(a) for a in x.c]


def scalar_in(F: NumberField, v) -> FieldElement:
    if isinstance(v, list):
        return F.elem(v)
    return F.scalar(Fraction(v))


def field_dump(F: NumberField) -> dict:
    d = F.degree
    return {
        "degree": d,
        "base_degree": F.base_degree,
        "basis_labels": list(F.basis_labels),
        "mult": [[[str(F.mult[i][j][k]) for k in range(d)] for j in range(d)] for i in range(d)],
    }


def field_from_dump(doc: dict) -> NumberField:
    return NumberField(doc["mult"], doc["basis_labels"], (), int(doc.get("base_degree", 1)),
                       check=doc["degree"] > 1)


def hopf_dump(H: HopfAlgebra) -> dict:
    S = H.antipode_matrix()
    return {
        "basis_labels": list(H.basis_labels),
        "base": field_dump(H.base),
        "unit": [scalar_out(x) for x in H.unit_vector()],
        "mult": [[[scalar_out(x) for x in row] for row in plane] for plane in H.mult_tensor()],
        "comult": [[scalar_out(x) for x in row] for row in H.comult_tensor()],
        "counit": [scalar_out(x) for x in H.counit],
        "antipode": [[scalar_out(x) for x in row] for row in S],
    }


def hopf_from_dump(doc: dict) -> HopfAlgebra:
    try:
        F = field_from_dump(doc["base"])
        sc = lambda v: scalar_in(F, v)  # noqa: E731
        n = len(doc["basis_labels"])
        mult = [[[sc(x) for x in row] for row in plane] for plane in doc["mult"]]
        comult = [[sc(x) for x in row] for row in doc["comult"]]
        if len(mult) != n or len(comult) != n or any(len(r) != n * n for r in comult):
            raise CorpusError("tensor shapes do not match the basis")
        unit = doc.get("unit")
        unit = [sc(x) for x in unit] if unit is not None else [F.one()] + [F.zero()] * (n - 1)
        return hopf_from_dense(F, doc["basis_labels"], mult, unit, comult,
                               [sc(x) for x in doc["counit"]],
                               [[sc(x) for x in row] for row in doc["antipode"]])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CorpusError):
            raise
        raise CorpusError(f"bad Hopf dump: {exc}") from exc


def matrix_dump(M) -> list:
    return [[scalar_out(x) for x in row] for row in M]


def adjoint_dump(ad) -> dict:
    pts = []
    for p, b in zip(ad.points, ad.residue_bases):
        pts.append({
            "rep": p.rep,
            "class_size": p.size,
            "centralizer": list(p.centralizer),
            "residue_degree": p.degree,
            "residue_basis": [[str(a) for a in x.c] for x in b],
        })
    return {"kind": "adjoint", "group_order": ad.ext.G.order, "points": pts,
            "hopf": hopf_dump(ad.hopf)}


def cartier_dump(n: int, zeta: FieldElement, phi) -> dict:
    inv = phi.inverse()
    return {"kind": "cartier", "n": n, "zeta": [str(a) for a in zeta.c],
            "matrix": matrix_dump(phi.matrix), "inverse": matrix_dump(inv.matrix),
            "source": hopf_dump(phi.source), "target": hopf_dump(phi.target)}
