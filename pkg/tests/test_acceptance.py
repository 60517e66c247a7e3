"""Acceptance suite: one check per criterion, reported as PASS/FAIL lines.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""
import sys

import pytest

from conftest import load
from orbigpd.bredon import (BredonInput, bredon_cohomology, compare_presentations, hom_oracle,
                            is_orbifold_system, pullback_inclusion, pullback_quotient, restrict_system,
                            systems_equal)
from orbigpd.gpd import (decompose_essential_equivalence, fibre_product, identity_span,
                         is_essential_equivalence, span_from_map, translation_groupoid, two_for_three)
from orbigpd.grp import GroupHom, Subgroup, cyclic_group
from orbigpd.gspace import EquivariantMap, GComplex, induce_space, isotropy_lineage, point, quotient_complex
from orbigpd.hs import bundle_from_hom, bundles_isomorphic, is_morita, span_roundtrip, tensor_compose, unit_bundle

RESULTS: dict[int, str] = {}


def classes(groups):
    return [g.iso_class for g in groups]


def both(X, A, top=None):
    inp = BredonInput(X, A)
    a, b = classes(bredon_cohomology(inp, top)), classes(hom_oracle(inp, top))
    assert a == b, (a, b)
    return a


def free_collapse():
    Z2 = cyclic_group(2)
    pair = GComplex(Z2, 2, (), [[0, 1], [1, 0]])
    return EquivariantMap(pair, point(Z2), GroupHom.trivial(Z2, Z2), (0, 0))


def corpus(d2):
    q = d2.map("q")
    _, j2 = induce_space(GroupHom(q.target.group, q.source.group, (0, 1)), q.target)
    maps = list(d2.maps.values()) + [j2, q.then(j2), free_collapse()]
    return maps + [EquivariantMap.identity(X) for X in d2.complexes.values()]


def equivariant(m):
    X, Y = m.source, m.target
    return all(Y.act(m.hom.map[g], m.vertex_map[v]) == m.vertex_map[X.act(g, v)]
               for g in range(X.group.order) for v in range(X.n_vertices))


def c1(d2, s3):
    X = d2.complex("d2_octagon")
    G = X.group
    assert [L.members for L in isotropy_lineage(X)] == [(0,), (0, 1), (0, 2)]
    Y, _ = quotient_complex(X, Subgroup(G, [0, 3]))
    assert Y.group.order == 2
    assert [v for v in range(Y.n_vertices) if Y.act(1, v) == v] == [0, 2]
    ok, violations = is_orbifold_system(X, d2.system("distinct_sigma"))
    assert not ok
    assert [tuple(L.members for L in v["pair"]) for v in violations] == [((0, 1), (0, 2))]
    for name in ("constZ_D2", "R_D2"):
        assert is_orbifold_system(X, d2.system(name))[0], name


def c2(d2, s3):
    q, j, ji, js = (d2.map(n) for n in ("q", "j", "j_interval", "j_square"))
    cases = [
        (BredonInput(q.source, d2.system("R_D2")), BredonInput(q.target, d2.system("R_Z2")), q),
        (BredonInput(q.source, d2.system("constZ_D2")), BredonInput(q.target, d2.system("constZ")), q),
        (BredonInput(j.source, d2.system("R_Z2")), BredonInput(j.target, d2.system("R_D2")), j),
        (BredonInput(ji.source, d2.system("R_Z2")), BredonInput(ji.target, d2.system("R_D2")), ji),
        (BredonInput(js.source, d2.system("constZ_E")), BredonInput(js.target, d2.system("constZ")), js),
    ]
    inclusions = 0
    for left, right, m in cases:
        for oracle in (False, True):
            (step,) = compare_presentations(left, right, [("m", m, "forward")], top=2, oracle=oracle)
            assert len(step.left) == 3 and classes(step.left) == classes(step.right)
        inclusions += step.form == "inclusion"
    assert inclusions >= 2


def fixture_pairs(*scenarios):
    return [(X, A) for sc in scenarios for X in sc.complexes.values() for A in sc.systems.values()
            if X.group is A.group]


def c3(d2, s3):
    pairs = fixture_pairs(d2, s3)
    assert len(pairs) >= 6
    for X, A in pairs:
        both(X, A, 2)


def c4(d2, s3):
    for X, A in fixture_pairs(d2, s3):
        assert both(X, A, 2) == both(X, restrict_system(A, X), 2)
    X = d2.complex("d2_octagon")
    A, B = d2.system("constZ_D2"), d2.system("lineage_constZ")
    assert not systems_equal(A, B)
    assert systems_equal(restrict_system(A, X), restrict_system(B, X))
    assert both(X, A, 2) == both(X, B, 2)


def c5(d2, s3):
    q = d2.map("q")
    _, j2 = induce_space(GroupHom(q.target.group, q.source.group, (0, 1)), q.target)
    maps = [q, d2.map("j"), d2.map("j_interval"), d2.map("j_square"), j2, q.then(j2)]
    for m in maps:
        assert is_essential_equivalence(m)
        r = decompose_essential_equivalence(m).recompose()
        assert r.hom.map == m.hom.map and r.vertex_map == m.vertex_map


def c6(d2, s3):
    maps = corpus(d2)
    assert any(not is_essential_equivalence(m) for m in maps)
    for m in maps:
        assert is_morita(bundle_from_hom(m)) == bool(is_essential_equivalence(m))
    X = d2.complex("d2_octagon")
    for span in (identity_span(X), span_from_map(d2.map("q")), span_from_map(d2.map("j")),
                 span_from_map(d2.map("j_square"))):
        rt = span_roundtrip(span)
        assert rt.omega_theta_ok and rt.psi_theta_ok


def c7(d2, s3):
    maps = corpus(d2)
    for m in maps:
        R = bundle_from_hom(m)
        UX = unit_bundle(translation_groupoid(m.source))
        UY = unit_bundle(translation_groupoid(m.target))
        assert bundles_isomorphic(tensor_compose(UX, R), R)
        assert bundles_isomorphic(tensor_compose(R, UY), R)
    for phi in maps:
        for psi in maps:
            if phi.target is psi.source:
                assert bundles_isomorphic(bundle_from_hom(phi.then(psi)),
                                          tensor_compose(bundle_from_hom(phi), bundle_from_hom(psi)))


def c8(d2, s3):
    maps = corpus(d2)
    pairs = [(f, g) for f in maps for g in maps if f.target is g.source]
    assert len(pairs) >= 10
    for f, g in pairs:
        r = two_for_three(f, g)
        assert [r.first, r.second, r.composite].count(False) != 1


def c9(d2, s3):
    maps = [m for m in corpus(d2) if m.degenerate_simplex() is None]
    cases = [(f, g) for f in maps for g in maps if f.target is g.target]
    assert len(cases) >= 10
    for f, g in cases:
        fp = fibre_product(f, g)
        G, H = g.source.group, f.source.group
        assert fp.space.group.order == G.order * H.order
        assert fp.to_x.hom.map == tuple(a for a in range(G.order) for _ in range(H.order))
        assert fp.to_y.hom.map == tuple(b for _ in range(G.order) for b in range(H.order))
        assert equivariant(fp.to_x) and equivariant(fp.to_y)
        assert fp.witness.is_valid()
        if is_essential_equivalence(g):
            assert is_essential_equivalence(fp.to_x)
        if is_essential_equivalence(f):
            assert is_essential_equivalence(fp.to_y)


def c10(d2, s3):
    X, q = d2.complex("d2_octagon"), d2.map("q")
    assert systems_equal(restrict_system(pullback_quotient(d2.system("R_Z2"), q.hom), X),
                         restrict_system(d2.system("R_D2"), X))
    assert systems_equal(pullback_inclusion(d2.system("R_D2"), d2.map("j").hom), d2.system("R_Z2"))


def c11(d2, s3):
    for sc, names in ((d2, ("constZ_D2", "R_D2", "constZ2_D2", "constZ", "R_Z2")), (s3, ("R_S3", "constZ_S3"))):
        for name in names:
            A = sc.system(name)
            assert both(point(A.group), A, 3) == [A.values[-1].iso_class] + [(0, ())] * 3
    assert both(d2.complex("e_square"), d2.system("constZ_E")) == [(1, ()), (1, ())]


CRITERIA = {1: c1, 2: c2, 3: c3, 4: c4, 5: c5, 6: c6, 7: c7, 8: c8, 9: c9, 10: c10, 11: c11}


def run_one(n, d2, s3):
    try:
        CRITERIA[n](d2, s3)
    except Exception as exc:
        RESULTS[n] = f"FAIL ({type(exc).__name__}: {exc})"
        raise
    RESULTS[n] = "PASS"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, d2, s3):
    run_one(n, d2, s3)


def summary_lines():
    return [f"criterion {n:2d}: {RESULTS.get(n, 'FAIL (not run)')}" for n in sorted(CRITERIA)]


if __name__ == "__main__":
    d2, s3 = load("d2_circle.json"), load("s3_hexagon.json")
    for n in sorted(CRITERIA):
        try:
            run_one(n, d2, s3)
        except Exception:
            pass
    print("\n".join(summary_lines()))
    sys.exit(0 if all(v == "PASS" for v in RESULTS.values()) else 1)
