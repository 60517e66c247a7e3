import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbigpd.errors import AxiomViolation, NeedsSubdivision, NotFree, NotSimplicial
from orbigpd.grp import GroupHom, Subgroup, build_group, cyclic_group
from orbigpd.gspace import (EquivariantMap, GComplex, fixed_subcomplex, induce_space, isotropy_lineage,
                            point, quotient_complex, regularize, unique_lift)


def members(lineage):
    return [L.members for L in lineage]


def test_octagon_structure(d2):
    X = d2.complex("d2_octagon")
    G = X.group
    assert X.is_admissible and regularize(X) is X
    assert members(isotropy_lineage(X)) == [(0,), (0, 1), (0, 2)]
    assert fixed_subcomplex(X, Subgroup(G, [0, 1])).vertices == (0, 4)
    assert len(fixed_subcomplex(X, G.trivial_subgroup).simplices) == 16
    assert fixed_subcomplex(X, G.whole).is_empty


def test_octagon_quotient(d2):
    X = d2.complex("d2_octagon")
    Y, q = quotient_complex(X, Subgroup(X.group, [0, 3]))
    assert Y.group.order == 2 and Y.n_vertices == 4 and len(Y.of_dim(1)) == 4
    assert fixed_subcomplex(Y, Y.group.whole).vertices == (0, 2)
    same, _ = quotient_complex(X, X.group.trivial_subgroup)
    assert same.simplices == X.simplices


def test_unique_lifts(d2):
    X = d2.complex("d2_octagon")
    K = Subgroup(X.group, [0, 3])
    Y, _ = quotient_complex(X, K)
    whole = Y.group.whole
    assert unique_lift(X, K, 0, whole).members == (0, 1)
    assert unique_lift(X, K, 2, whole).members == (0, 2)


def test_reflection_triangle_needs_subdivision():
    Z2 = cyclic_group(2)
    X = GComplex(Z2, 3, ((0, 1, 2),), [[0, 1, 2], [0, 2, 1]])
    assert not X.is_admissible
    Y = regularize(X)
    assert Y.is_admissible and Y.n_vertices == len(X.simplices)
    E = build_group([[0]])
    T = GComplex(E, 3, ((0, 1, 2),), [[0, 1, 2]])
    assert regularize(T) is T


def test_free_swap_of_two_edges():
    Z2 = cyclic_group(2)
    X = GComplex(Z2, 4, ((0, 1), (2, 3)), [[0, 1, 2, 3], [2, 3, 0, 1]])
    Y, _ = quotient_complex(X, Z2.whole)
    assert Y.n_vertices == 2 and len(Y.of_dim(1)) == 1
    assert members(isotropy_lineage(X)) == [(0,)]


def test_quotient_failures():
    Z2 = cyclic_group(2)
    fixed = GComplex(Z2, 2, (), [[0, 1], [0, 1]])
    with pytest.raises(NotFree):
        quotient_complex(fixed, Z2.whole)
    # free rotation of a square by a half turn collapses nothing but glues edges of one orbit
    Z4 = cyclic_group(4)
    sq = GComplex(Z4, 4, tuple((k, (k + 1) % 4) for k in range(4)), [[(k + g) % 4 for k in range(4)] for g in range(4)])
    with pytest.raises(NeedsSubdivision):
        quotient_complex(sq, Z4.whole)


def test_induction():
    Z2 = cyclic_group(2)
    E = build_group([[0]])
    pts, _ = induce_space(GroupHom(E, Z2, (0,)), point(E))
    assert pts.vertex_action.tolist() == [[0, 1], [1, 0]]
    X = point(Z2)
    same, inc = induce_space(GroupHom.identity(Z2), X)
    assert same.n_vertices == 1 and inc.vertex_map == (0,)


def test_induced_two_points_matches_fixture(d2):
    W = d2.complex("d2_two_points")
    j = d2.map("j")
    V, _ = induce_space(j.hom, j.source)
    assert (V.vertex_action == W.vertex_action).all()
    assert members(isotropy_lineage(W)) == [(0,), (0, 1)]


def test_point_lineage_is_everything(d2):
    X = d2.complex("d2_point")
    assert len(isotropy_lineage(X)) == 5


def test_bad_actions():
    Z2 = cyclic_group(2)
    with pytest.raises(AxiomViolation):
        GComplex(Z2, 2, (), [[1, 0], [1, 0]])
    with pytest.raises(NotSimplicial):
        GComplex(Z2, 3, ((0, 1),), [[0, 1, 2], [0, 2, 1]])
    swap = GComplex(Z2, 2, (), [[0, 1], [1, 0]])
    with pytest.raises(AxiomViolation):
        EquivariantMap(swap, swap, GroupHom.identity(Z2), (0, 0))


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.integers(1, 4))
def test_cyclic_rotation_quotients(n, step):
    """Z/m rotating an n-gon by multiples of n/m: fixed sets and quotients by free subgroups."""
    m = n // np.gcd(n, step)
    G = cyclic_group(m)
    act = [[(v + g * step) % n for v in range(n)] for g in range(m)]
    X = GComplex(G, n, tuple((k, (k + 1) % n) for k in range(n)), act)
    assert members(isotropy_lineage(X)) == [(0,)]
    for K in G.subgroups():
        orbit = n // len(K)
        if orbit >= 3:
            Y, q = quotient_complex(X, K)
            assert Y.n_vertices == orbit and len(Y.of_dim(1)) == orbit
            assert sorted(set(q.vertex_map)) == list(range(orbit))
