"""Finite simplicial complexes with simplicial group actions.

A ``GComplex`` stores its simplices as sorted vertex tuples ordered by
(dimension, vertices); since every vertex is a 0-simplex, simplex ``v`` is
the vertex ``v``.  The action is kept both on vertices and on simplices.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import (AxiomViolation, DomainMismatch, InputError, NeedsSubdivision, NoLift,
                     NotAdmissible, NotFree, NotNormal, NotSimplicial, PreconditionFailed,
                     SubgroupMismatch)
from .grp import FiniteGroup, GroupHom, Subgroup, enumerate_subgroups, normality_witness, quotient_group


def _face_closure(simplices: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    out = set()
    for s in simplices:
        s = tuple(sorted(int(v) for v in s))
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return sorted(out, key=lambda s: (len(s), s))


def _dimension_blocks(simplices):
    blocks = []
    for sm in simplices:
        if not blocks or len(blocks[-1][0]) != len(sm):
            blocks.append([])
        blocks[-1].append(sm)
    return blocks


def _encode(S: np.ndarray, n: int) -> np.ndarray:
    """Base-n code of each vertex tuple along the last axis."""
    code = np.zeros(S.shape[:-1], dtype=np.int64)
    for k in range(S.shape[-1]):
        code = code * n + S[..., k]
    return code


@dataclass(frozen=True)
class SimplicialComplex:
    """A plain (non-equivariant) complex, e.g. a fixed set."""

    vertices: tuple[int, ...]
    simplices: tuple[tuple[int, ...], ...]

    @property
    def is_empty(self) -> bool:
        return not self.simplices

    def of_dim(self, n: int) -> list[tuple[int, ...]]:
        return [s for s in self.simplices if len(s) == n + 1]


@dataclass(frozen=True, eq=False)
class GComplex:
    group: FiniteGroup
    n_vertices: int
    simplices: tuple[tuple[int, ...], ...]
    vertex_action: np.ndarray  # |G| x n_vertices

    def __post_init__(self):
        act = np.array(self.vertex_action, dtype=np.int64).reshape(self.group.order, self.n_vertices)
        act.setflags(write=False)
        object.__setattr__(self, "vertex_action", act)
        simp = tuple(_face_closure(list(self.simplices) + [(v,) for v in range(self.n_vertices)]))
        object.__setattr__(self, "simplices", simp)
        if any(v < 0 or v >= self.n_vertices for s in simp for v in s):
            raise InputError("simplex vertex out of range")
        self._check_action()

    def _check_action(self):
        G, act = self.group, self.vertex_action
        for g in range(G.order):
            if sorted(act[g].tolist()) != list(range(self.n_vertices)):
                raise AxiomViolation("action row is not a permutation", witness=g)
        if (act[G.identity] != np.arange(self.n_vertices)).any():
            raise AxiomViolation("identity does not act trivially")
        if self.n_vertices:
            w = _kernels.action_violation(act, G.table)
            if w is not None:
                raise AxiomViolation("action incompatible with multiplication", witness=w)
        self.simplex_action  # raises NotSimplicial when an image is missing

    # -- lookups ---------------------------------------------------------

    @cached_property
    def simplex_index(self) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.simplices)}

    @cached_property
    def simplex_action(self) -> np.ndarray:
        """|G| x |simplices| array of simplex indices."""
        act, n = self.vertex_action, max(self.n_vertices, 1)
        out = np.empty((self.group.order, len(self.simplices)), dtype=np.int64)
        start = 0
        for block in _dimension_blocks(self.simplices):
            S = np.array(block, dtype=np.int64)
            # sorted tuples in lexicographic order have increasing base-n codes
            keys = _encode(S, n)
            img = np.sort(act[:, S], axis=2)
            pos = np.searchsorted(keys, _encode(img, n))
            pos = np.minimum(pos, len(keys) - 1)
            bad = np.argwhere(keys[pos] != _encode(img, n))
            if len(bad):
                g, i = (int(v) for v in bad[0])
                raise NotSimplicial("image of a simplex is not a simplex", witness=(g, block[i]))
            out[:, start:start + len(block)] = pos + start
            start += len(block)
        out.setflags(write=False)
        return out

    @property
    def dim(self) -> int:
        return max((len(s) for s in self.simplices), default=0) - 1

    def of_dim(self, n: int) -> list[int]:
        return [i for i, s in enumerate(self.simplices) if len(s) == n + 1]

    def act(self, g: int, v: int) -> int:
        return int(self.vertex_action[g, v])

    def act_simplex(self, g: int, s: int) -> int:
        return int(self.simplex_action[g, s])

    def stabilizer(self, s: int) -> Subgroup:
        """Setwise stabilizer of simplex index ``s``."""
        col = self.simplex_action[:, s]
        return Subgroup(self.group, np.flatnonzero(col == s).tolist())

    @cached_property
    def orbit_reps(self) -> np.ndarray:
        """Least simplex index in each simplex's orbit."""
        return _kernels.orbit_labels(self.simplex_action)

    def orbit_representatives(self, n: int | None = None) -> list[int]:
        reps = sorted(set(self.orbit_reps.tolist()))
        return reps if n is None else [r for r in reps if len(self.simplices[r]) == n + 1]

    def admissibility_witness(self) -> tuple[int, tuple[int, ...]] | None:
        """(g, simplex) with g stabilizing the simplex setwise but not pointwise."""
        act, sact = self.vertex_action, self.simplex_action
        for i, s in enumerate(self.simplices):
            if len(s) < 2:
                continue
            for g in np.flatnonzero(sact[:, i] == i):
                if any(act[g, v] != v for v in s):
                    return int(g), s
        return None

    @cached_property
    def is_admissible(self) -> bool:
        return self.admissibility_witness() is None

    def require_admissible(self):
        w = self.admissibility_witness()
        if w is not None:
            raise NotAdmissible("action is not admissible", witness=w)

    def __repr__(self):
        return f"GComplex(|G|={self.group.order}, vertices={self.n_vertices}, simplices={len(self.simplices)})"


def action_from_generators(G: FiniteGroup, generators: Sequence[int], perms: Sequence[Sequence[int]],
                           n_vertices: int) -> np.ndarray:
    """Extend vertex permutations given for generating elements to all of G."""
    if len(generators) != len(perms):
        raise InputError("need one permutation per generator")
    act = {G.identity: tuple(range(n_vertices))}
    frontier = [G.identity]
    gens = [(int(s), tuple(int(v) for v in p)) for s, p in zip(generators, perms)]
    for s, p in gens:
        if sorted(p) != list(range(n_vertices)):
            raise AxiomViolation("generator action is not a permutation", witness=s)
    while frontier:
        nxt = []
        for a in frontier:
            pa = act[a]
            for s, p in gens:
                b = G.mul(s, a)
                img = tuple(p[pa[v]] for v in range(n_vertices))
                if b not in act:
                    act[b] = img
                    nxt.append(b)
                elif act[b] != img:
                    raise AxiomViolation("generator permutations do not define an action", witness=(s, a))
        frontier = nxt
    if len(act) != G.order:
        raise InputError("generators do not generate the group", witness=sorted(act))
    return np.array([act[g] for g in range(G.order)], dtype=np.int64).reshape(G.order, n_vertices)


def trivial_action(G: FiniteGroup, n_vertices: int) -> np.ndarray:
    return np.tile(np.arange(n_vertices, dtype=np.int64), (G.order, 1))


def point(G: FiniteGroup) -> GComplex:
    return GComplex(G, 1, ((0,),), trivial_action(G, 1))


# -- equivariant maps ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class EquivariantMap:
    """The pair (phi, f): f(g x) = phi(g) f(x), f simplicial on vertices."""

    source: GComplex
    target: GComplex
    hom: GroupHom
    vertex_map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", tuple(int(v) for v in self.vertex_map))
        X, Y, phi, f = self.source, self.target, self.hom, self.vertex_map
        if phi.domain is not X.group or phi.codomain is not Y.group:
            raise InputError("hom does not match the groups of the complexes")
        if len(f) != X.n_vertices or any(v < 0 or v >= Y.n_vertices for v in f):
            raise InputError("vertex map has wrong length or range")
        for s in X.simplices:
            if tuple(sorted({f[v] for v in s})) not in Y.simplex_index:
                raise NotSimplicial("image of a simplex is not a simplex", witness=s)
        fa = np.array(f, dtype=np.int64)
        lhs = fa[X.vertex_action]
        rhs = Y.vertex_action[np.array(phi.map)][:, fa]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            g, x = (int(v) for v in bad[0])
            raise AxiomViolation("map is not equivariant", witness=(g, x))

    @cached_property
    def simplex_map(self) -> np.ndarray:
        f, index = self.vertex_map, self.target.simplex_index
        return np.array([index[tuple(sorted({f[v] for v in s}))] for s in self.source.simplices],
                        dtype=np.int64)

    def degenerate_simplex(self) -> tuple[int, ...] | None:
        f = self.vertex_map
        for s in self.source.simplices:
            if len({f[v] for v in s}) != len(s):
                return s
        return None

    def then(self, other: "EquivariantMap") -> "EquivariantMap":
        """``other`` after ``self``."""
        if other.source is not self.target:
            raise DomainMismatch("maps are not composable")
        return EquivariantMap(self.source, other.target, self.hom.then(other.hom),
                              tuple(other.vertex_map[v] for v in self.vertex_map))

    def same_as(self, other: "EquivariantMap") -> bool:
        return (self.source is other.source and self.target is other.target
                and self.hom.map == other.hom.map and self.vertex_map == other.vertex_map)

    @staticmethod
    def identity(X: GComplex) -> "EquivariantMap":
        return EquivariantMap(X, X, GroupHom.identity(X.group), tuple(range(X.n_vertices)))

    def __repr__(self):
        return f"EquivariantMap({self.source!r} -> {self.target!r})"


# -- constructions -------------------------------------------------------

def regularize(X: GComplex) -> GComplex:
    """X itself when admissible, otherwise its barycentric subdivision."""
    if X.is_admissible:
        return X
    # vertices of the subdivision are simplices of X; simplices are flags
    S = X.simplices
    faces = {i: [j for j, t in enumerate(S) if len(t) < len(s) and set(t) <= set(s)]
             for i, s in enumerate(S)}
    chains = []

    def extend(chain):
        chains.append(tuple(sorted(chain)))
        for j in faces[chain[-1]]:
            extend(chain + [j])

    for i in range(len(S)):
        extend([i])
    return GComplex(X.group, len(S), tuple(chains), X.simplex_action)


def fixed_subcomplex(X: GComplex, H: Subgroup) -> SimplicialComplex:
    """Simplices all of whose vertices are fixed by H (the fixed set, for admissible X)."""
    if H.parent is not X.group:
        raise SubgroupMismatch("subgroup does not belong to the group of the complex")
    act = X.vertex_action[list(H.members)]
    fixed = np.flatnonzero((act == np.arange(X.n_vertices)).all(axis=0))
    fs = set(fixed.tolist())
    return SimplicialComplex(tuple(sorted(fs)), tuple(s for s in X.simplices if set(s) <= fs))


def quotient_complex(X: GComplex, K: Subgroup) -> tuple[GComplex, EquivariantMap]:
    """X/K as a G/K-complex, together with the quotient map over G -> G/K."""
    G = X.group
    if K.parent is not G:
        raise SubgroupMismatch("subgroup does not belong to the group of the complex")
    w = normality_witness(K)
    if w is not None:
        raise NotNormal("subgroup is not normal", witness=w)
    X.require_admissible()
    act = X.vertex_action
    for k in K.members:
        if k == G.identity:
            continue
        hit = np.flatnonzero(act[k] == np.arange(X.n_vertices))
        if len(hit):
            raise NotFree("subgroup does not act freely", witness=(k, int(hit[0])))
    Q, pi = quotient_group(G, K)
    korb = _kernels.orbit_labels(act[list(K.members)])
    reps = sorted(set(korb.tolist()))
    vidx = {r: i for i, r in enumerate(reps)}
    f = tuple(vidx[int(korb[v])] for v in range(X.n_vertices))
    # a simplex must keep its dimension, and K-orbits of simplices must match images
    image_of: dict[tuple[int, ...], int] = {}
    sorb = _kernels.orbit_labels(X.simplex_action[list(K.members)])
    for i, s in enumerate(X.simplices):
        img = tuple(sorted({f[v] for v in s}))
        if len(img) != len(s):
            raise NeedsSubdivision("simplex degenerates in the quotient", witness=s)
        prev = image_of.setdefault(img, int(sorb[i]))
        if prev != sorb[i]:
            raise NeedsSubdivision("distinct simplex orbits share an image", witness=(X.simplices[prev], s))
    qact = np.empty((Q.order, len(reps)), dtype=np.int64)
    for g in range(G.order):
        qg = pi(g)
        for i, r in enumerate(reps):
            qact[qg, i] = f[act[g, r]]
    Y = GComplex(Q, len(reps), tuple(image_of), qact)
    return Y, EquivariantMap(X, Y, pi, f)


def induce_space(i: GroupHom, Z: GComplex) -> tuple[GComplex, EquivariantMap]:
    """G x_H Z for an injective hom i: H -> G, with the inclusion z -> [e, z].

    Vertex ``c * |Z| + z`` is [g_c, z]: g_0 is the identity and the other g_c are
    the least elements of the remaining left cosets of i(H).
    """
    H, G = i.domain, i.codomain
    if Z.group is not H:
        raise InputError("complex is not over the domain of the hom")
    if not i.is_injective:
        raise PreconditionFailed("induction needs an injective hom")
    img = i.image_of(H.whole)
    reps = [G.identity] + [r for r in img.left_coset_reps() if r not in img]
    coset_of = {}
    for c, r in enumerate(reps):
        for h in range(H.order):
            coset_of[G.mul(r, i(h))] = (c, h)   # g = g_c * i(h)
    n = Z.n_vertices
    act = np.empty((G.order, len(reps) * n), dtype=np.int64)
    for g in range(G.order):
        for c, r in enumerate(reps):
            c2, h = coset_of[G.mul(g, r)]
            act[g, c * n:(c + 1) * n] = c2 * n + Z.vertex_action[h]
    simplices = tuple(tuple(c * n + v for v in s) for c in range(len(reps)) for s in Z.simplices)
    Y = GComplex(G, len(reps) * n, simplices, act)
    return Y, EquivariantMap(Z, Y, i, tuple(range(n)))


# -- isotropy ------------------------------------------------------------

@dataclass(frozen=True)
class IsotropyLineage:
    subgroups: tuple[Subgroup, ...]

    def __contains__(self, H):
        return H in self.subgroups

    def __iter__(self):
        return iter(self.subgroups)

    def __len__(self):
        return len(self.subgroups)


def isotropy_lineage(X: GComplex, max_order: int | None = None) -> IsotropyLineage:
    """Subgroups L with X^L nonempty: subgroups of simplex stabilizers."""
    stabs = {X.stabilizer(s).members for s in range(len(X.simplices))}
    kw = {} if max_order is None else {"max_order": max_order}
    subs = [L for L in enumerate_subgroups(X.group, **kw) if any(L._set <= set(m) for m in stabs)]
    return IsotropyLineage(tuple(subs))


def unique_lift(X: GComplex, K: Subgroup, x: int, Lbar: Subgroup) -> Subgroup:
    """The unique L inside the stabilizer of vertex x with LK/K = Lbar."""
    G = X.group
    Q, pi = quotient_group(G, K)
    if Lbar.parent is not Q:
        raise SubgroupMismatch("Lbar is not a subgroup of G/K")
    Gx = X.stabilizer(x)
    lifts = [L for L in enumerate_subgroups(G) if L <= Gx and pi.image_of(L) == Lbar]
    if not lifts:
        raise NoLift("no subgroup of the stabilizer projects onto Lbar", witness=(x, Lbar.members))
    if len(lifts) > 1:
        raise PreconditionFailed("lift is not unique; is K acting freely?", witness=[L.members for L in lifts])
    return lifts[0]
