import pytest

from orbigpd.errors import InputError
from orbigpd.gpd import (GeneralizedMap, GroupoidHom, discretize, groupoid_hom, identity_span,
                         is_essential_equivalence, span_from_map, translation_groupoid)
from orbigpd.grp import GroupHom, Subgroup, build_group, cyclic_group
from orbigpd.gspace import EquivariantMap, GComplex, induce_space, point, quotient_complex
from orbigpd.hs import (bundle_from_hom, bundles_isomorphic, inverse_bundle, is_morita, span_from_bundle,
                        span_roundtrip, tensor_compose, transport_2cell, unit_bundle)
from test_gpd import free_collapse


def corpus_maps(d2):
    q = d2.map("q")
    W, j2 = induce_space(GroupHom(q.target.group, q.source.group, (0, 1)), q.target)
    return list(d2.maps.values()) + [j2, q.then(j2), free_collapse()]


def test_unit_laws(d2):
    q = d2.map("q")
    R = bundle_from_hom(q)
    UX = unit_bundle(translation_groupoid(q.source))
    UY = unit_bundle(translation_groupoid(q.target))
    assert UX.is_valid() and is_morita(UX)
    assert bundles_isomorphic(tensor_compose(UX, R), R)
    assert bundles_isomorphic(tensor_compose(R, UY), R)
    ident = bundle_from_hom(EquivariantMap.identity(q.source))
    assert bundles_isomorphic(ident, UX)


def test_one_object_source(d2):
    Y = d2.complex("z2_square")
    E = build_group([[0]])
    for y in range(Y.n_vertices):
        R = bundle_from_hom(EquivariantMap(point(E), Y, GroupHom.trivial(E, Y.group), (y,)))
        T = translation_groupoid(Y)
        assert len(R) == len(T.arrows_to(y)) == Y.group.order


def test_quotient_bundle_size(d2):
    q = d2.map("q")
    R = bundle_from_hom(q)
    T = translation_groupoid(q.target)
    oracle = sum(1 for s in range(len(q.source.simplices)) for h in range(T.n_arrows) if T.src(h) == q.simplex_map[s])
    assert len(R) == oracle == 32
    assert R.is_valid() and is_morita(R)


def test_tower_composite():
    """Z/4 -> Z/2 -> e acting freely on 4, 2 and 1 points."""
    Z4 = cyclic_group(4)
    X4 = GComplex(Z4, 4, (), [[(v + g) % 4 for v in range(4)] for g in range(4)])
    X2, q1 = quotient_complex(X4, Subgroup(Z4, [0, 2]))
    X1, q2 = quotient_complex(X2, X2.group.whole)
    R = tensor_compose(bundle_from_hom(q1), bundle_from_hom(q2))
    assert R.is_valid()
    assert bundles_isomorphic(R, bundle_from_hom(q1.then(q2)))


def test_morita_matches_essential(d2):
    for m in corpus_maps(d2):
        assert is_morita(bundle_from_hom(m)) == bool(is_essential_equivalence(m))
    assert not is_morita(bundle_from_hom(free_collapse()))


def test_inverse_is_a_morita_bundle_not_from_a_hom(d2):
    R = bundle_from_hom(d2.map("q"))
    Ri = inverse_bundle(R)
    assert Ri.is_valid() and is_morita(Ri)
    gm = span_from_bundle(Ri).generalized_map()
    assert is_essential_equivalence(gm.left)


def test_round_trips(d2):
    X = d2.complex("d2_octagon")
    for span in (identity_span(X), span_from_map(d2.map("q")), span_from_map(d2.map("j"))):
        rt = span_roundtrip(span)
        assert rt.omega_theta_ok and rt.psi_theta_ok


def test_theta_two_cell(d2):
    q = d2.map("q")
    sp = span_from_map(q)
    rt = span_roundtrip(sp)
    Kg = translation_groupoid(discretize(q.source))
    ident = GroupoidHom.identity(Kg)
    zeros = (0,) * Kg.n_objects
    assert transport_2cell(sp, sp, Kg, ident, ident, zeros, zeros).is_valid()
    rebuilt = GeneralizedMap(rt.rebuilt.omega, rt.rebuilt.psi)
    cell = transport_2cell(sp, rebuilt, Kg, ident, groupoid_hom(rt.theta), zeros, zeros)
    assert cell.is_valid()


def test_bad_natural_data_is_rejected(d2):
    q = d2.map("q")
    sp = span_from_map(q)
    Kg = translation_groupoid(discretize(q.source))
    ident = GroupoidHom.identity(Kg)
    ones = (1,) * Kg.n_objects
    with pytest.raises(InputError):
        transport_2cell(sp, sp, Kg, ident, ident, ones, (0,) * Kg.n_objects)
