import pytest
from hypothesis import given, settings, strategies as st

from orbigpd.errors import NotEssentialEquivalence, PreconditionFailed
from orbigpd.gpd import (compose_generalized, decompose_essential_equivalence,
                         exhibit_two_cell, fibre_product, identity_span, is_essential_equivalence,
                         span_from_map, two_for_three)
from orbigpd.grp import GroupHom, Subgroup, cyclic_group
from orbigpd.gspace import EquivariantMap, GComplex, induce_space, point, quotient_complex


@pytest.fixture(scope="module")
def tower(d2):
    """q: octagon -> square, then the inclusion-form map out of the square along Z/2 -> D2."""
    q = d2.map("q")
    i = GroupHom(q.target.group, q.source.group, (0, 1))
    W, j2 = induce_space(i, q.target)
    return q, j2


def free_collapse():
    """Z/2 swapping two points, sent to a Z/2-fixed point by the trivial hom: not essential."""
    Z2 = cyclic_group(2)
    pair = GComplex(Z2, 2, (), [[0, 1], [1, 0]])
    return EquivariantMap(pair, point(Z2), GroupHom.trivial(Z2, Z2), (0, 0))


def test_essential_examples(d2, tower):
    X = d2.complex("d2_octagon")
    assert is_essential_equivalence(EquivariantMap.identity(X))
    for name in ("q", "j", "j_interval", "j_square"):
        assert is_essential_equivalence(d2.map(name)), name
    assert is_essential_equivalence(tower[1])
    assert not is_essential_equivalence(d2.map("collapse"))
    cert = is_essential_equivalence(free_collapse())
    assert not cert and cert.reason == "not fully faithful"


def test_identity_fibre_product(d2):
    X = d2.complex("d2_octagon")
    ident = EquivariantMap.identity(X)
    fp = fibre_product(ident, ident)
    expected = sorted((x, g, X.act(g, x)) for x in range(8) for g in range(4))
    assert sorted(fp.triples) == expected
    assert fp.space.group.order == 16 and fp.witness.is_valid()


def test_quotient_fibre_product(d2):
    q = d2.map("q")
    Z = q.target
    fp = fibre_product(q, q)
    oracle = [(y, k, x) for y in range(8) for k in range(2) for x in range(8)
              if Z.act(k, q.vertex_map[y]) == q.vertex_map[x]]
    assert list(fp.triples) == oracle
    assert fp.space.group.order == 16
    assert fp.to_x.hom.map == tuple(a for a in range(4) for _ in range(4))
    assert fp.witness.is_valid()
    assert is_essential_equivalence(fp.to_x) and is_essential_equivalence(fp.to_y)


def test_pullbacks_of_essential_are_essential(d2):
    q = d2.map("q")
    Y = q.target
    for f in (EquivariantMap.identity(Y), q):
        fp = fibre_product(f, q)
        assert is_essential_equivalence(fp.to_y)


def test_degenerate_legs_are_rejected(d2):
    c = d2.map("collapse")
    with pytest.raises(PreconditionFailed):
        fibre_product(c, c)


def test_unit_laws(d2):
    a = span_from_map(d2.map("q"))
    for composite in (compose_generalized(identity_span(a.domain), a), compose_generalized(a, identity_span(a.codomain))):
        assert is_essential_equivalence(composite.left)
        cell = exhibit_two_cell(composite, a)
        assert cell is not None and cell.is_valid()


def test_quotient_then_inclusion(tower):
    q, j2 = tower
    ab = compose_generalized(span_from_map(q), span_from_map(j2))
    assert is_essential_equivalence(ab.left)
    assert ab.domain is q.source and ab.codomain is j2.target


def test_associativity_two_cell(d2, tower):
    q, j2 = tower
    a = span_from_map(q)
    b = span_from_map(j2)
    c = identity_span(j2.target)
    left = compose_generalized(compose_generalized(a, b), c)
    right = compose_generalized(a, compose_generalized(b, c))
    cell = exhibit_two_cell(left, right)
    assert cell is not None and cell.is_valid()


def test_decompositions(d2, tower):
    q, j2 = tower
    for m in (q, d2.map("j"), d2.map("j_interval"), d2.map("j_square"), q.then(j2)):
        d = decompose_essential_equivalence(m)
        r = d.recompose()
        assert r.hom.map == m.hom.map and r.vertex_map == m.vertex_map
    d = decompose_essential_equivalence(d2.map("j"))
    assert d.q.hom.map == (0, 1)
    with pytest.raises(NotEssentialEquivalence):
        decompose_essential_equivalence(d2.map("collapse"))


def test_two_for_three_examples(d2):
    X = d2.complex("d2_octagon")
    ident = EquivariantMap.identity(X)
    assert (lambda r: (r.first, r.second, r.composite))(two_for_three(ident, ident)) == (True, True, True)
    q = d2.map("q")
    r = two_for_three(q, EquivariantMap.identity(q.target))
    assert (r.first, r.second, r.composite) == (True, True, True)
    c = free_collapse()
    r = two_for_three(c, EquivariantMap.identity(c.target))
    assert (r.first, r.second, r.composite) == (False, True, False) and r.law_holds


def corpus_pairs(d2, tower):
    maps = list(d2.maps.values()) + [tower[1], free_collapse()]
    maps += [EquivariantMap.identity(X) for X in d2.complexes.values()]
    return [(f, g) for f in maps for g in maps if f.target is g.source]


def test_two_for_three_on_corpus(d2, tower):
    pairs = corpus_pairs(d2, tower)
    assert len(pairs) >= 10
    for f, g in pairs:
        assert two_for_three(f, g).law_holds


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 5), st.sampled_from([1, 2, 3]))
def test_free_quotients_are_essential(k, m):
    """Z/(k*m) rotating a (k*m)-gon; quotient by the order-m subgroup is an essential equivalence."""
    n = k * m
    G = cyclic_group(n)
    X = GComplex(G, n, tuple((v, (v + 1) % n) for v in range(n)), [[(v + g) % n for v in range(n)] for g in range(n)])
    K = Subgroup(G, [g for g in range(n) if g % k == 0])
    Y, q = quotient_complex(X, K)
    assert is_essential_equivalence(q)
    r = two_for_three(q, EquivariantMap.identity(Y))
    assert r.law_holds and r.composite
    d = decompose_essential_equivalence(q)
    assert d.recompose().vertex_map == q.vertex_map
