"""Command-line driver: load a scenario, run commands, print reports.

Exit codes: 0 success, 1 mathematical failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import grp
from .abgrp import FGAbGroup
from .bredon import (BredonInput, OrbitCategory, bredon_cohomology, build_orbit_category,
                     compare_presentations, hom_oracle, is_orbifold_system, representation_system)
from .errors import InputError, MathFailure, OrbiError, UnknownCommand
from .gpd import (GeneralizedMap, compose_generalized, decompose_essential_equivalence, fibre_product,
                  identity_span, is_essential_equivalence, span_from_map)
from .grp import FiniteGroup, GroupHom, Subgroup
from .gspace import EquivariantMap, GComplex, fixed_subcomplex, induce_space, quotient_complex
from .hs import bundle_from_hom, is_morita, span_roundtrip
from .scenario import Scenario, load_json, parse_scenario

EXIT_OK, EXIT_MATH, EXIT_INPUT = 0, 1, 2


@dataclass
class Report:
    command: dict
    status: str = "ok"
    result: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return {"ok": EXIT_OK, "failure": EXIT_MATH, "error": EXIT_INPUT}[self.status]

    def as_dict(self) -> dict:
        return {"command": self.command, "status": self.status, "result": self.result,
                "violations": self.violations}


# -- JSON helpers --------------------------------------------------------

def jsonable(obj: Any) -> Any:
    if isinstance(obj, Subgroup):
        return [obj.parent.name(m) for m in obj.members]
    if isinstance(obj, FGAbGroup):
        return group_record(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def group_record(A: FGAbGroup) -> dict:
    return {"group": A.describe(), "rank": A.rank, "torsion": list(A.torsion)}


def complex_record(X: GComplex) -> dict:
    return {"group_order": X.group.order, "vertices": X.n_vertices,
            "simplices": [list(s) for s in X.simplices if len(s) > 1],
            "action": X.vertex_action.tolist()}


def map_record(m: EquivariantMap) -> dict:
    return {"source": complex_record(m.source), "target": complex_record(m.target),
            "hom": list(m.hom.map), "vertices": list(m.vertex_map)}


# -- command context -----------------------------------------------------

class Context:
    def __init__(self, scenario: Scenario, cmd: dict, oracle: bool):
        self.s = scenario
        self.cmd = cmd
        self.oracle = oracle

    def arg(self, key, default=InputError):
        if key in self.cmd:
            return self.cmd[key]
        if default is InputError:
            raise InputError(f"command needs {key!r}")
        return default

    def group(self, key="group") -> FiniteGroup:
        return self.s.group(self.arg(key))

    def complex(self, key="groupoid") -> GComplex:
        return self.s.complex(self.arg(key))

    def map(self, key="map") -> EquivariantMap:
        return self.s.map(self.arg(key))

    def subgroup(self, G: FiniteGroup, key="subgroup") -> Subgroup:
        return self.s.subgroup(G, self.arg(key))

    def bredon_input(self, entry: dict | None = None) -> BredonInput:
        entry = self.cmd if entry is None else entry
        if not isinstance(entry, dict):
            raise InputError("expected an object with groupoid and system")
        X = self.s.complex(entry.get("groupoid"))
        A = self.s.system(entry.get("system"))
        return BredonInput(X, A)

    def top(self) -> int | None:
        t = self.arg("top", None)
        if t is not None and (not isinstance(t, int) or t < 0):
            raise InputError("top must be a non-negative integer")
        return t

    def span(self, entry) -> GeneralizedMap:
        if not isinstance(entry, dict):
            raise InputError("a span is an object with left and right map names")
        left, right = entry.get("left"), entry.get("right")
        if left is None and right is None:
            if "space" not in entry:
                raise InputError("identity span needs a space")
            return identity_span(self.s.complex(entry["space"]))
        if left is None:
            return span_from_map(self.s.map(right))
        lm = self.s.map(left)
        rm = self.s.map(right) if right is not None else EquivariantMap.identity(lm.source)
        return GeneralizedMap(lm, rm)


# -- commands ------------------------------------------------------------

def cmd_validate(c: Context) -> Report:
    from . import _kernels
    target = c.arg("target", "all")
    s = c.s
    checked, violations = [], []
    for name, G in s.groups.items():
        if target in ("all", name):
            checked.append(f"groups.{name}")
            w = _kernels.assoc_violation(G.table)
            if w is not None:
                violations.append({"entity": f"groups.{name}", "invariant": "associativity", "witness": w})
    for name in s.complexes:
        if target in ("all", name):
            checked.append(f"complexes.{name}")
    for name in s.maps:
        if target in ("all", name):
            checked.append(f"maps.{name}")
    for name, A in s.systems.items():
        if target in ("all", name):
            checked.append(f"systems.{name}")
            v = A.violation()
            if v is not None:
                violations.append({"entity": f"systems.{name}", "invariant": v[0], "witness": v[1]})
    if not checked:
        raise InputError(f"unknown target {target!r}")
    return Report(c.cmd, result={"checked": checked}, violations=violations)


def cmd_subgroups(c: Context) -> Report:
    G = c.group()
    subs = [{"members": S, "order": len(S), "normal": S.is_normal} for S in G.subgroups()]
    return Report(c.cmd, result={"order": G.order, "subgroups": subs})


def cmd_fixed(c: Context) -> Report:
    X = c.complex()
    F = fixed_subcomplex(X, c.subgroup(X.group))
    return Report(c.cmd, result={"vertices": list(F.vertices), "simplices": [list(s) for s in F.simplices if len(s) > 1]})


def cmd_quotient(c: Context) -> Report:
    X = c.complex()
    Y, q = quotient_complex(X, c.subgroup(X.group))
    everything = Y.group.whole
    fixed = list(fixed_subcomplex(Y, everything).vertices)
    return Report(c.cmd, result={"quotient": complex_record(Y), "vertex_map": list(q.vertex_map),
                                 "hom": list(q.hom.map), "fixed_vertices": fixed})


def cmd_induce(c: Context) -> Report:
    Z = c.complex()
    G = c.group("group")
    images = c.arg("hom")
    i = GroupHom(Z.group, G, tuple(images))
    W, j = induce_space(i, Z)
    return Report(c.cmd, result={"induced": complex_record(W), "inclusion": list(j.vertex_map)})


def cmd_ess_check(c: Context) -> Report:
    cert = is_essential_equivalence(c.map())
    return Report(c.cmd, result={"essential": cert.holds, "reason": cert.reason, "witness": cert.witness})


def cmd_decompose(c: Context) -> Report:
    m = c.map()
    d = decompose_essential_equivalence(m)
    r = d.recompose()
    return Report(c.cmd, result={"quotient": map_record(d.q), "inclusion": map_record(d.j),
                                 "iso": {"vertices": list(d.iso.vertex_map)},
                                 "recomposes": r.hom.map == m.hom.map and r.vertex_map == m.vertex_map})


def cmd_fibre_product(c: Context) -> Report:
    f, g = c.map("left"), c.map("right")
    P = fibre_product(f, g)
    return Report(c.cmd, result={
        "group_order": P.space.group.order, "vertices": P.space.n_vertices,
        "simplices": len(P.space.simplices), "triples": [list(t) for t in P.triples],
        "witness_valid": P.witness.is_valid(),
        "to_left_essential": is_essential_equivalence(P.to_y).holds,
        "to_right_essential": is_essential_equivalence(P.to_x).holds})


def cmd_compose_spans(c: Context) -> Report:
    a, b = c.span(c.arg("first")), c.span(c.arg("second"))
    ab = compose_generalized(a, b)
    return Report(c.cmd, result={
        "middle": {"group_order": ab.middle.group.order, "vertices": ab.middle.n_vertices,
                   "simplices": len(ab.middle.simplices)},
        "domain": c.s.complex_name(ab.domain), "codomain": c.s.complex_name(ab.codomain),
        "left_essential": is_essential_equivalence(ab.left).holds})


def cmd_hs_roundtrip(c: Context) -> Report:
    span = c.span(c.arg("span")) if "span" in c.cmd else span_from_map(c.map())
    R = bundle_from_hom(span.right)
    rt = span_roundtrip(span)
    return Report(c.cmd, result={"bundle_size": len(R), "bundle_valid": R.is_valid(), "morita": is_morita(R),
                                 "omega_theta": rt.omega_theta_ok, "psi_theta": rt.psi_theta_ok, "ok": rt.ok},
                  status="ok" if rt.ok else "failure")


def _morphism_record(cat: OrbitCategory, m):
    i, j, a = m
    return {"source": cat.objects[i], "target": cat.objects[j], "element": cat.group.name(a)}


def cmd_orbit_category(c: Context) -> Report:
    cat = build_orbit_category(c.group())
    return Report(c.cmd, result={"objects": list(cat.objects),
                                 "morphisms": [_morphism_record(cat, m) for m in cat.morphisms()]})


def cmd_coeff_check(c: Context) -> Report:
    inp = c.bredon_input()
    v = inp.system.violation()
    ok, bad = is_orbifold_system(inp.space, inp.system)
    violations = [] if v is None else [{"kind": "functor", "invariant": v[0], "witness": v[1]}]
    for w in bad:
        pair = list(w["pair"])
        violations.append({"kind": w["kind"], "normal_subgroup": Subgroup(inp.space.group, w["K"]),
                           "pair": pair})
    return Report(c.cmd, result={"functor": v is None, "orbifold": ok}, violations=violations)


def _degrees(groups: list[FGAbGroup]) -> list[dict]:
    return [dict(degree=n, **group_record(A)) for n, A in enumerate(groups)]


def cmd_bredon(c: Context, oracle: bool = False) -> Report:
    inp = c.bredon_input()
    engine = hom_oracle if (oracle or c.oracle) else bredon_cohomology
    return Report(c.cmd, result={"degrees": _degrees(engine(inp, c.top())),
                                 "engine": "oracle" if engine is hom_oracle else "assembled"})


def cmd_compare(c: Context) -> Report:
    p1, p2 = c.bredon_input(c.arg("left")), c.bredon_input(c.arg("right"))
    path = []
    for step in c.arg("path", []):
        if not isinstance(step, dict):
            raise InputError("path steps are objects with map and direction")
        path.append((step.get("map"), c.s.map(step.get("map")), step.get("direction", "forward")))
    top = c.top()
    reports = compare_presentations(p1, p2, path, top=2 if top is None else top, oracle=c.oracle)
    steps = [{"map": r.map, "direction": r.direction, "form": r.form,
              "left": _degrees(r.left), "right": _degrees(r.right)} for r in reports]
    return Report(c.cmd, result={"isomorphic": True, "steps": steps})


def cmd_rep_system(c: Context) -> Report:
    name = c.arg("group")
    G = c.group()
    R = representation_system(G, c.s.characters.get(name))
    cat = R.category
    return Report(c.cmd, result={
        "values": [{"subgroup": H, "label": v.label, "rank": v.rank} for H, v in zip(cat.objects, R.values)],
        "maps": [dict(matrix=R.maps[m].tolist(), **_morphism_record(cat, m)) for m in cat.morphisms()]})


COMMANDS: dict[str, Callable[[Context], Report]] = {
    "validate": cmd_validate,
    "subgroups": cmd_subgroups,
    "fixed": cmd_fixed,
    "quotient": cmd_quotient,
    "induce": cmd_induce,
    "ess-check": cmd_ess_check,
    "decompose": cmd_decompose,
    "fibre-product": cmd_fibre_product,
    "compose-spans": cmd_compose_spans,
    "hs-roundtrip": cmd_hs_roundtrip,
    "orbit-category": cmd_orbit_category,
    "coeff-check": cmd_coeff_check,
    "bredon": cmd_bredon,
    "bredon-oracle": lambda c: cmd_bredon(c, oracle=True),
    "compare": cmd_compare,
    "rep-system": cmd_rep_system,
}


def run_command(s: Scenario, cmd: dict, oracle: bool = False) -> Report:
    """Dispatch one command record; module errors become error or failure reports."""
    if not isinstance(cmd, dict):
        return _error_report({"cmd": None}, InputError("command must be an object"))
    try:
        name = cmd.get("cmd")
        if name not in COMMANDS:
            raise UnknownCommand(f"unknown command {name!r}", witness=sorted(COMMANDS))
        report = COMMANDS[name](Context(s, cmd, oracle))
    except OrbiError as exc:
        return _error_report(cmd, exc)
    report.result = jsonable(report.result)
    report.violations = jsonable(report.violations)
    return report


def _error_report(cmd, exc: OrbiError) -> Report:
    status = "failure" if isinstance(exc, MathFailure) else "error"
    return Report(cmd, status=status, result={"error": type(exc).__name__, "message": str(exc),
                                              "witness": jsonable(exc.witness)})


# -- rendering -----------------------------------------------------------

def render_machine(report: Report) -> str:
    """One JSON record per result: per degree for cohomology, otherwise one per report."""
    base = {"cmd": report.command.get("cmd"), "status": report.status}
    degrees = report.result.get("degrees") if report.status == "ok" else None
    if degrees is not None:
        records = [dict(base, **d) for d in degrees]
    else:
        records = [dict(base, result=report.result, violations=report.violations)]
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in records)


def _human(value, indent=0) -> list[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        out = []
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                out.append(f"{pad}{k}:")
                out += _human(v, indent + 1)
            else:
                out.append(f"{pad}{k}: {json.dumps(v)}")
        return out
    if isinstance(value, list):
        out = []
        for v in value:
            sub = _human(v, indent + 1)
            out.append(f"{pad}- " + sub[0].lstrip() if sub else f"{pad}-")
            out += sub[1:]
        return out
    return [f"{pad}{json.dumps(value)}"]


def _flat(v) -> bool:
    items = v.values() if isinstance(v, dict) else v
    return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x))
               for x in items) and isinstance(v, list)


def render_human(report: Report) -> str:
    lines = [f"command: {json.dumps(report.command, sort_keys=True)}", f"status: {report.status}"]
    degrees = report.result.get("degrees")
    if report.status == "ok" and degrees is not None:
        lines.append(f"engine: {report.result['engine']}")
        lines.append("degree  group")
        lines += [f"{d['degree']:>6}  {d['group']}" for d in degrees]
    else:
        lines += _human(report.result)
        if report.violations:
            lines.append("violations:")
            lines += _human(report.violations, 1)
        else:
            lines.append("violations: []")
    return "\n".join(lines) + "\n"


# -- entry point ---------------------------------------------------------

def _read_commands(arg: str) -> list:
    if arg.startswith("@"):
        with open(arg[1:], encoding="utf-8") as fh:
            arg = fh.read()
    data = load_json(arg)
    return data if isinstance(data, list) else [data]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orbigpd", description="Finite orbifold groupoids and Bredon cohomology.")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--command", required=True, help="JSON command record (or list), or @file")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("--max-group-order", type=int, default=64)
    p.add_argument("--oracle", action="store_true", help="use the brute-force cohomology pipeline")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_group_order < 1:
        print("error: --max-group-order must be positive", file=sys.stderr)
        return EXIT_INPUT
    previous = grp.max_order()
    grp.set_max_order(args.max_group_order)
    try:
        return _run(args)
    finally:
        grp.set_max_order(previous)


def _run(args) -> int:
    render = render_machine if args.format == "machine" else render_human
    chunks, code = [], EXIT_OK
    try:
        with open(args.scenario, encoding="utf-8") as fh:
            scenario = parse_scenario(fh.read())
        commands = _read_commands(args.command)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OrbiError as exc:
        report = _error_report({"cmd": "load"}, exc)
        chunks.append(render(report))
        code = report.exit_code
        commands = []
    for cmd in commands:
        report = run_command(scenario, cmd, oracle=args.oracle)
        chunks.append(render(report))
        code = max(code, report.exit_code)
    text = "".join(chunks)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
