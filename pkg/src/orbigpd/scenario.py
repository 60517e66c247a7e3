"""Scenario documents: JSON with ``"schema": 1``.

A scenario names groups, complexes, equivariant maps, coefficient systems
and optional character tables. Parsing normalizes the document, builds every
entity and checks its invariants; serializing writes the normalized document
back, so parse -> serialize -> parse is the identity.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import _kernels
from .abgrp import FGAbGroup, as_int_matrix
from .bredon import (CoefficientSystem, build_orbit_category, constant_system, explicit_system,
                     representation_system, zero_system)
from .errors import InputError, OrbiError, ParseError, ValidationError
from .grp import FiniteGroup, GroupHom, Subgroup, build_group, group_from_permutations
from .gspace import EquivariantMap, GComplex, action_from_generators

SCHEMA = 1
SECTIONS = ("groups", "complexes", "maps", "systems", "character_tables")


@dataclass
class Scenario:
    document: dict
    groups: dict[str, FiniteGroup] = field(default_factory=dict)
    generators: dict[str, list[int]] = field(default_factory=dict)
    complexes: dict[str, GComplex] = field(default_factory=dict)
    maps: dict[str, EquivariantMap] = field(default_factory=dict)
    systems: dict[str, CoefficientSystem] = field(default_factory=dict)
    characters: dict[str, dict[tuple[int, ...], list]] = field(default_factory=dict)

    def __eq__(self, other):
        return isinstance(other, Scenario) and self.document == other.document

    # -- lookups -----------------------------------------------------------

    def _get(self, table: dict, kind: str, name):
        if not isinstance(name, str) or name not in table:
            raise InputError(f"unknown {kind} {name!r}")
        return table[name]

    def group(self, name) -> FiniteGroup:
        return self._get(self.groups, "group", name)

    def complex(self, name) -> GComplex:
        return self._get(self.complexes, "complex", name)

    def map(self, name) -> EquivariantMap:
        return self._get(self.maps, "map", name)

    def system(self, name) -> CoefficientSystem:
        return self._get(self.systems, "system", name)

    def group_name(self, G: FiniteGroup) -> str:
        return next(n for n, H in self.groups.items() if H is G)

    def complex_name(self, X: GComplex) -> str | None:
        return next((n for n, Y in self.complexes.items() if Y is X), None)

    def subgroup(self, group: FiniteGroup, members) -> Subgroup:
        """Subgroup from a list of element indices or element names."""
        if not isinstance(members, list):
            raise InputError("subgroup must be a list of elements")
        idx = [_element(group, m) for m in members]
        S = Subgroup(group, idx)
        if not _kernels.closure(group.table, _mask(group, idx)).sum() == len(S):
            raise InputError("elements do not form a subgroup", witness=members)
        return S


def _mask(G: FiniteGroup, idx):
    m = np.zeros(G.order, dtype=np.bool_)
    m[list(idx)] = True
    return m


def _element(G: FiniteGroup, e) -> int:
    if isinstance(e, bool):
        raise InputError("element must be an index or a name", witness=e)
    if isinstance(e, int):
        if not 0 <= e < G.order:
            raise InputError("element index out of range", witness=e)
        return e
    if isinstance(e, str) and G.element_names and e in G.element_names:
        return list(G.element_names).index(e)
    raise InputError("unknown group element", witness=e)


# -- parsing -------------------------------------------------------------

def _reject_float(text):
    raise ValueError(f"non-integer number {text}")


def load_json(text: str) -> Any:
    try:
        return json.loads(text, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise ParseError(str(exc), 0, 0) from None


def parse_scenario(text: str) -> Scenario:
    return build_scenario(load_json(text))


def serialize_scenario(s: Scenario) -> str:
    return json.dumps(s.document, indent=1, sort_keys=True) + "\n"


def _need(cond, entity, invariant, witness=None):
    if not cond:
        raise ValidationError(entity, invariant, witness)


def _int_list(v, entity, what):
    _need(isinstance(v, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in v),
          entity, f"{what} must be a list of integers", v)
    return v


def _matrix(v, entity):
    _need(isinstance(v, list) and all(isinstance(r, list) for r in v), entity, "matrix must be a list of rows", v)
    for r in v:
        _int_list(r, entity, "matrix row")
    return v


def normalize(doc: Any) -> dict:
    """Fill defaults and check the shape of the document (not the mathematics)."""
    _need(isinstance(doc, dict), "scenario", "document must be an object")
    unknown = set(doc) - set(SECTIONS) - {"schema"}
    _need(not unknown, "scenario", "unknown top-level keys", sorted(unknown))
    schema = doc.get("schema", SCHEMA)
    _need(schema == SCHEMA, "scenario", f"unsupported schema version (expected {SCHEMA})", schema)
    out = {"schema": SCHEMA}
    for sec in SECTIONS:
        body = doc.get(sec, {})
        _need(isinstance(body, dict), sec, "section must be an object")
        for name, entry in body.items():
            _need(isinstance(entry, dict), f"{sec}.{name}", "entry must be an object")
        out[sec] = body
    return out


def build_scenario(doc: Any) -> Scenario:
    doc = normalize(doc)
    s = Scenario(json.loads(json.dumps(doc)))
    for name, entry in doc["groups"].items():
        _build_group(s, name, entry)
    for name, entry in doc["character_tables"].items():
        _build_characters(s, name, entry)
    for name, entry in doc["complexes"].items():
        _build_complex(s, name, entry)
    for name, entry in doc["maps"].items():
        _build_map(s, name, entry)
    for name, entry in doc["systems"].items():
        _build_system(s, name, entry)
    return s


def _wrap(entity, fn):
    try:
        return fn()
    except ValidationError:
        raise
    except OrbiError as exc:
        raise ValidationError(entity, str(exc), exc.witness) from None


def _build_group(s: Scenario, name, entry):
    ent = f"groups.{name}"
    names = entry.get("names")
    if names is not None:
        _need(isinstance(names, list) and all(isinstance(n, str) for n in names), ent, "names must be strings")
        _need(len(set(names)) == len(names), ent, "names must be distinct")
    if "table" in entry:
        table = _matrix(entry["table"], ent)
        G = _wrap(ent, lambda: build_group(table, names))
        gens = entry.get("generators")
        s.generators[name] = None if gens is None else _int_list(gens, ent, "generators")
    elif "generators" in entry:
        perms = entry["generators"]
        _need(isinstance(perms, list), ent, "generators must be a list of permutations")
        for p in perms:
            _int_list(p, ent, "generator")
        _need(len({len(p) for p in perms}) <= 1, ent, "generators must have equal degree")
        G, elems = _wrap(ent, lambda: group_from_permutations(perms, names))
        index = {p: i for i, p in enumerate(elems)}
        s.generators[name] = [index[tuple(p)] for p in perms] if perms else []
    else:
        raise ValidationError(ent, "group needs a table or permutation generators")
    if names is not None:
        _need(len(names) == G.order, ent, "one name per element", len(names))
    s.groups[name] = G


def _build_characters(s: Scenario, name, entry):
    ent = f"character_tables.{name}"
    G = s.group(name) if name in s.groups else None
    _need(G is not None, ent, "character table for an unknown group", name)
    rows = entry.get("subgroups")
    _need(isinstance(rows, list), ent, "subgroups must be a list")
    table = {}
    for r in rows:
        _need(isinstance(r, dict) and "members" in r and "characters" in r, ent, "entries need members and characters")
        S = _wrap(ent, lambda: s.subgroup(G, r["members"]))
        _need(isinstance(r["characters"], list), ent, "characters must be a list of rows")
        for row in r["characters"]:
            _need(isinstance(row, list) and len(row) == len(S), ent, "one character value per member", S.members)
            for v in row:
                ok = isinstance(v, int) or (isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) for x in v))
                _need(ok, ent, "character values are integers or [re, im] integer pairs", v)
        # rows are given over the listed members; reorder to the sorted member order
        order = [_element(G, m) for m in r["members"]]
        perm = [order.index(m) for m in S.members]
        table[S.members] = [[row[k] for k in perm] for row in r["characters"]]
    s.characters[name] = table


def _build_complex(s: Scenario, name, entry):
    ent = f"complexes.{name}"
    G = _wrap(ent, lambda: s.group(entry.get("group")))
    n = entry.get("vertices")
    _need(isinstance(n, int) and n >= 0, ent, "vertices must be a count", n)
    simplices = entry.get("simplices", [])
    _need(isinstance(simplices, list), ent, "simplices must be a list")
    for sm in simplices:
        _int_list(sm, ent, "simplex")
        _need(len(set(sm)) == len(sm) and sm, ent, "simplex vertices must be distinct", sm)
    gens = entry.get("generators", s.generators[entry["group"]])
    _need(gens is not None, ent, "table groups need explicit generator elements for the action")
    gens = [_wrap(ent, lambda g=g: _element(G, g)) for g in gens]
    action = entry.get("action", [list(range(n)) for _ in gens])
    _need(isinstance(action, list) and len(action) == len(gens), ent, "one permutation per generator")
    for p in action:
        _int_list(p, ent, "action")
        _need(len(p) == n, ent, "permutation length must equal the vertex count", p)
    X = _wrap(ent, lambda: GComplex(G, n, tuple(tuple(sm) for sm in simplices),
                                     action_from_generators(G, gens, action, n)))
    s.complexes[name] = X


def _build_map(s: Scenario, name, entry):
    ent = f"maps.{name}"
    X = _wrap(ent, lambda: s.complex(entry.get("source")))
    Y = _wrap(ent, lambda: s.complex(entry.get("target")))
    hom = _int_list(entry.get("hom"), ent, "hom")
    verts = _int_list(entry.get("vertices"), ent, "vertices")
    phi = _wrap(ent, lambda: GroupHom(X.group, Y.group, tuple(hom)))
    s.maps[name] = _wrap(ent, lambda: EquivariantMap(X, Y, phi, tuple(verts)))


def _value(entry, ent) -> FGAbGroup:
    _need(isinstance(entry, dict) and isinstance(entry.get("label"), str), ent, "values need a string label", entry)
    rank = entry.get("rank", 0)
    torsion = _int_list(entry.get("torsion", []), ent, "torsion")
    _need(isinstance(rank, int) and not isinstance(rank, bool), ent, "rank must be an integer", rank)
    return _wrap(ent, lambda: FGAbGroup(entry["label"], rank, tuple(torsion)))


def _build_system(s: Scenario, name, entry):
    ent = f"systems.{name}"
    gname = entry.get("group")
    G = _wrap(ent, lambda: s.group(gname))
    cat = build_orbit_category(G)
    kind = entry.get("kind", "explicit")
    if kind == "constant":
        A = constant_system(cat, _value(entry.get("value", {"label": "Z", "rank": 1}), ent), name)
    elif kind == "zero":
        A = zero_system(cat, name)
    elif kind == "representation":
        A = _wrap(ent, lambda: representation_system(G, s.characters.get(gname)))
        A.name = name
    elif kind == "explicit":
        values = {}
        for v in entry.get("values", []):
            _need(isinstance(v, dict), ent, "values entries must be objects")
            S = _wrap(ent, lambda: s.subgroup(G, v.get("subgroup")))
            _need(S not in values, ent, "value given twice", S.members)
            values[S] = _value(v, ent)
        gens = {}
        for m in entry.get("maps", []):
            _need(isinstance(m, dict), ent, "maps entries must be objects")
            H1 = _wrap(ent, lambda: s.subgroup(G, m.get("source")))
            H2 = _wrap(ent, lambda: s.subgroup(G, m.get("target")))
            a = _wrap(ent, lambda: _element(G, m.get("element", 0)))
            mor = _wrap(ent, lambda: cat.morphism(cat.index[H1], cat.index[H2], a))
            M = _matrix(m.get("matrix"), ent)
            A1, A2 = values.get(H1), values.get(H2)
            shape = (A1.ngens if A1 else 0, A2.ngens if A2 else 0)
            arr = as_int_matrix(M) if M else np.zeros(shape, dtype=object)
            _need(arr.shape == shape, ent, "matrix shape must be ngens(source) x ngens(target)", cat.describe(mor))
            gens[mor] = arr
        A = explicit_system(cat, values, gens, name)
    else:
        raise ValidationError(ent, "unknown system kind", kind)
    s.systems[name] = A.check()
