"""Translation groupoids, essential equivalences, fibre products and spans.

Objects of ``G⋉X`` are the simplices of X (a simplex stands for its
barycenter); the arrow ``(g, s)`` goes from ``s`` to ``g·s`` and has index
``g * |simplices| + s``.  Generic finite groupoids are supported as well,
because the bundle calculus produces middle groupoids that are not
translation groupoids.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import (DomainMismatch, InputError, NotEssentialEquivalence, NotFree,
                     PreconditionFailed)
from .grp import GroupHom, analyze_hom, direct_product, product_projections
from .gspace import EquivariantMap, GComplex, induce_space, quotient_complex

__all__ = [
    "FiniteGroupoid", "TranslationGroupoid", "TableGroupoid", "GroupoidHom", "EquivariantMap",
    "Transformation", "GeneralizedMap", "TwoCell", "Certificate", "is_essential_equivalence",
    "is_essential_equivalence_hom", "fibre_product", "FibreProduct", "compose_generalized",
    "identity_span", "span_from_map", "decompose_essential_equivalence", "Decomposition",
    "two_for_three", "exhibit_two_cell", "discretize", "discretize_map", "groupoid_hom",
    "translation_groupoid",
]


# -- groupoids -----------------------------------------------------------

class FiniteGroupoid:
    """Interface: objects and arrows are integer indices."""

    n_objects: int
    n_arrows: int

    def src(self, a: int) -> int: ...
    def tgt(self, a: int) -> int: ...
    def compose(self, b: int, a: int) -> int: ...  # b after a, needs src(b) == tgt(a)
    def inv(self, a: int) -> int: ...
    def ident(self, x: int) -> int: ...

    def arrows_from(self, x: int) -> list[int]:
        return [a for a in range(self.n_arrows) if self.src(a) == x]

    def arrows_to(self, y: int) -> list[int]:
        return [a for a in range(self.n_arrows) if self.tgt(a) == y]

    def hom_set(self, x: int, y: int) -> list[int]:
        return [a for a in self.arrows_from(x) if self.tgt(a) == y]


class TranslationGroupoid(FiniteGroupoid):
    def __init__(self, space: GComplex):
        self.space = space
        self.group = space.group
        self.n_objects = len(space.simplices)
        self.n_arrows = self.group.order * self.n_objects

    def arrow(self, g: int, s: int) -> int:
        return g * self.n_objects + s

    def split(self, a: int) -> tuple[int, int]:
        return divmod(a, self.n_objects)

    def src(self, a):
        return a % self.n_objects

    def tgt(self, a):
        g, s = divmod(a, self.n_objects)
        return self.space.act_simplex(g, s)

    def compose(self, b, a):
        g2, s2 = self.split(b)
        g1, s1 = self.split(a)
        if s2 != self.space.act_simplex(g1, s1):
            raise PreconditionFailed("arrows are not composable", witness=(b, a))
        return self.arrow(self.group.mul(g2, g1), s1)

    def inv(self, a):
        g, s = self.split(a)
        return self.arrow(self.group.inv(g), self.space.act_simplex(g, s))

    def ident(self, x):
        return self.arrow(self.group.identity, x)

    def arrows_from(self, x):
        return [self.arrow(g, x) for g in range(self.group.order)]

    def arrows_to(self, y):
        G = self.group
        return [self.arrow(g, self.space.act_simplex(G.inv(g), y)) for g in range(G.order)]

    def __repr__(self):
        return f"TranslationGroupoid({self.space!r})"


class TableGroupoid(FiniteGroupoid):
    """Groupoid given by explicit arrow data; composition is a dict lookup."""

    def __init__(self, n_objects: int, src: Sequence[int], tgt: Sequence[int],
                 comp: dict[tuple[int, int], int], inv: Sequence[int], ident: Sequence[int],
                 labels: Sequence | None = None):
        self.n_objects = n_objects
        self.n_arrows = len(src)
        self._src, self._tgt = tuple(src), tuple(tgt)
        self._comp, self._inv, self._ident = dict(comp), tuple(inv), tuple(ident)
        self.labels = tuple(labels) if labels is not None else None
        self._out = [[] for _ in range(n_objects)]
        self._in = [[] for _ in range(n_objects)]
        for a, (s, t) in enumerate(zip(self._src, self._tgt)):
            self._out[s].append(a)
            self._in[t].append(a)

    def src(self, a):
        return self._src[a]

    def tgt(self, a):
        return self._tgt[a]

    def compose(self, b, a):
        try:
            return self._comp[(b, a)]
        except KeyError:
            raise PreconditionFailed("arrows are not composable", witness=(b, a)) from None

    def inv(self, a):
        return self._inv[a]

    def ident(self, x):
        return self._ident[x]

    def arrows_from(self, x):
        return list(self._out[x])

    def arrows_to(self, y):
        return list(self._in[y])


@dataclass(frozen=True, eq=False)
class GroupoidHom:
    source: FiniteGroupoid
    target: FiniteGroupoid
    obj_map: tuple[int, ...]
    arrow_map: tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.arrow_map[a]

    def check(self) -> None:
        S, T = self.source, self.target
        for a in range(S.n_arrows):
            b = self.arrow_map[a]
            if T.src(b) != self.obj_map[S.src(a)] or T.tgt(b) != self.obj_map[S.tgt(a)]:
                raise InputError("groupoid hom does not respect source/target", witness=a)
        for a in range(S.n_arrows):
            for b in S.arrows_from(S.tgt(a)):
                if self.arrow_map[S.compose(b, a)] != T.compose(self.arrow_map[b], self.arrow_map[a]):
                    raise InputError("groupoid hom does not respect composition", witness=(b, a))

    def then(self, other: "GroupoidHom") -> "GroupoidHom":
        if other.source is not self.target:
            raise DomainMismatch("groupoid homs are not composable")
        return GroupoidHom(self.source, other.target,
                           tuple(other.obj_map[x] for x in self.obj_map),
                           tuple(other.arrow_map[a] for a in self.arrow_map))

    @staticmethod
    def identity(G: FiniteGroupoid) -> "GroupoidHom":
        return GroupoidHom(G, G, tuple(range(G.n_objects)), tuple(range(G.n_arrows)))


def translation_groupoid(X: GComplex) -> TranslationGroupoid:
    """One groupoid object per complex, so homs built from maps share endpoints."""
    gpd = X.__dict__.get("_groupoid")
    if gpd is None:
        gpd = TranslationGroupoid(X)
        X.__dict__["_groupoid"] = gpd
    return gpd


def discretize(X: GComplex) -> GComplex:
    """The 0-dimensional complex on the simplices of X; it has the same translation groupoid."""
    D = X.__dict__.get("_discrete")
    if D is None:
        D = X if X.dim <= 0 else GComplex(X.group, len(X.simplices), (), X.simplex_action)
        X.__dict__["_discrete"] = D
    return D


def discretize_map(m: EquivariantMap) -> EquivariantMap:
    return EquivariantMap(discretize(m.source), discretize(m.target), m.hom,
                          tuple(int(v) for v in m.simplex_map))


def groupoid_hom(m: EquivariantMap) -> GroupoidHom:
    S, T = translation_groupoid(m.source), translation_groupoid(m.target)
    smap = m.simplex_map
    n = S.n_objects
    arrows = tuple(T.arrow(m.hom(g), int(smap[s])) for g in range(m.source.group.order) for s in range(n))
    return GroupoidHom(S, T, tuple(int(v) for v in smap), arrows)


# -- essential equivalences -----------------------------------------------

@dataclass(frozen=True)
class Certificate:
    holds: bool
    reason: str | None = None
    witness: object = None

    def __bool__(self):
        return self.holds


def is_essential_equivalence(m: EquivariantMap) -> Certificate:
    """Essentially surjective on simplices and fully faithful on pointwise transporters."""
    X, Y = m.source, m.target
    smap = m.simplex_map
    hit = set(Y.orbit_reps[smap].tolist())
    missing = [int(r) for r in Y.orbit_representatives() if r not in hit]
    if missing:
        return Certificate(False, "not essentially surjective", Y.simplices[missing[0]])
    w = _kernels.faithful_violation(X.simplex_action, Y.simplex_action, np.array(m.hom.map), smap)
    if w is not None:
        s, s2, h, count = w
        return Certificate(False, "not fully faithful",
                           {"from": X.simplices[s], "to": X.simplices[s2], "h": h, "preimages": count})
    return Certificate(True)


def is_essential_equivalence_hom(F: GroupoidHom) -> Certificate:
    """The same predicate for a homomorphism of generic finite groupoids."""
    S, T = F.source, F.target
    reach = set()
    for x in F.obj_map:
        reach.update(T.tgt(a) for a in T.arrows_from(x))
    missing = [y for y in range(T.n_objects) if y not in reach]
    if missing:
        return Certificate(False, "not essentially surjective", missing[0])
    for x in range(S.n_objects):
        out = S.arrows_from(x)
        for y in range(S.n_objects):
            images = sorted(F(a) for a in out if S.tgt(a) == y)
            expected = sorted(T.hom_set(F.obj_map[x], F.obj_map[y]))
            if images != expected:
                return Certificate(False, "not fully faithful", (x, y))
    return Certificate(True)


# -- transformations and spans -------------------------------------------

@dataclass(frozen=True, eq=False)
class Transformation:
    """first ⇒ second for maps L -> X: component s is a group element a with a·first(s) = second(s)."""

    first: EquivariantMap
    second: EquivariantMap
    components: tuple[int, ...]

    def witness(self):
        P1, P2, c = self.first, self.second, self.components
        L, X = P1.source, P1.target
        if P2.source is not L or P2.target is not X:
            return ("endpoints differ", None)
        if len(c) != len(L.simplices):
            return ("wrong number of components", len(c))
        G = X.group
        c = np.array(c, dtype=np.int64)
        s1, s2 = P1.simplex_map, P2.simplex_map
        bad = np.flatnonzero(X.simplex_action[c, s1] != s2)
        if len(bad):
            return ("source/target mismatch", L.simplices[int(bad[0])])
        h1, h2 = np.array(P1.hom.map)[:, None], np.array(P2.hom.map)[:, None]
        lhs = G.table[h2, c[None, :]]                 # P2(l) · c_s
        rhs = G.table[c[L.simplex_action], h1]        # c_{ls} · P1(l)
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            l, s = (int(v) for v in bad[0])
            return ("not natural", (l, L.simplices[s]))
        return None

    def is_valid(self) -> bool:
        return self.witness() is None


@dataclass(frozen=True, eq=False)
class GeneralizedMap:
    """A span G⋉X <- K⋉M -> H⋉Y whose left leg is an essential equivalence."""

    left: EquivariantMap
    right: EquivariantMap

    def __post_init__(self):
        if self.left.source is not self.right.source:
            raise InputError("span legs have different sources")
        cert = is_essential_equivalence(self.left)
        if not cert:
            raise NotEssentialEquivalence(f"left leg: {cert.reason}", witness=cert.witness)

    @property
    def middle(self) -> GComplex:
        return self.left.source

    @property
    def domain(self) -> GComplex:
        return self.left.target

    @property
    def codomain(self) -> GComplex:
        return self.right.target


def identity_span(X: GComplex) -> GeneralizedMap:
    i = EquivariantMap.identity(X)
    return GeneralizedMap(i, i)


def span_from_map(m: EquivariantMap) -> GeneralizedMap:
    return GeneralizedMap(EquivariantMap.identity(m.source), m)


@dataclass(frozen=True, eq=False)
class TwoCell:
    """Witness data for a 2-cell between spans: legs nu, nu_prime out of a
    common middle and transformations alpha1, alpha2 on the two sides."""

    source: GeneralizedMap
    target: GeneralizedMap
    nu: EquivariantMap
    nu_prime: EquivariantMap
    alpha1: tuple[int, ...]
    alpha2: tuple[int, ...]

    @property
    def middle(self) -> GComplex:
        return self.nu.source

    def witness(self):
        a, b = self.source, self.target
        if self.nu.source is not self.nu_prime.source:
            return ("legs have different sources", None)
        if self.nu.target is not a.middle or self.nu_prime.target is not b.middle:
            return ("legs do not land in the span middles", None)
        if a.domain is not b.domain or a.codomain is not b.codomain:
            return ("spans have different ends", None)
        for leg in (self.nu, self.nu_prime):
            cert = is_essential_equivalence(leg)
            if not cert:
                return ("leg is not an essential equivalence", cert.witness)
        t1 = Transformation(self.nu.then(a.left), self.nu_prime.then(b.left), self.alpha1)
        t2 = Transformation(self.nu.then(a.right), self.nu_prime.then(b.right), self.alpha2)
        for name, t in (("alpha1", t1), ("alpha2", t2)):
            w = t.witness()
            if w is not None:
                return (f"{name}: {w[0]}", w[1])
        return None

    def is_valid(self) -> bool:
        return self.witness() is None


# -- fibre products ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FibreProduct:
    space: GComplex                 # over G x H
    to_x: EquivariantMap            # over the projection to G
    to_y: EquivariantMap            # over the projection to H
    witness: Transformation         # f∘to_y ⇒ g∘to_x
    triples: tuple[tuple[int, int, int], ...]


def fibre_product(f: EquivariantMap, g: EquivariantMap) -> FibreProduct:
    """Weak fibre product of f: H⋉Y -> K⋉Z and g: G⋉X -> K⋉Z.

    Vertices are triples (y, k, x) with k·f(y) = g(x); a simplex is a set of
    such triples with a common k whose projections are simplices τ, σ with
    k·f(τ) = g(σ).  Both legs must be non-degenerate.
    """
    if f.target is not g.target:
        raise DomainMismatch("maps have different targets")
    for m in (f, g):
        s = m.degenerate_simplex()
        if s is not None:
            raise PreconditionFailed("fibre products need non-degenerate legs", witness=s)
    Y, X, Z = f.source, g.source, f.target
    H, G, K = Y.group, X.group, Z.group
    fv, gv = f.vertex_map, g.vertex_map
    zact = Z.vertex_action
    triples = [(y, k, x) for y in range(Y.n_vertices) for k in range(K.order) for x in range(X.n_vertices)
               if zact[k, fv[y]] == gv[x]]
    index = {t: i for i, t in enumerate(triples)}
    g_of = {}
    for x in range(X.n_vertices):
        g_of.setdefault(gv[x], []).append(x)
    simplices = []
    for tau in Y.simplices:
        for k in range(K.order):
            img = tuple(sorted(int(zact[k, fv[y]]) for y in tau))
            if img not in Z.simplex_index:
                continue
            # the unique sigma over img, vertex by vertex
            for xs in product(*(g_of.get(int(zact[k, fv[y]]), []) for y in tau)):
                if tuple(sorted(xs)) in X.simplex_index:
                    simplices.append(tuple(sorted(index[(y, k, x)] for y, x in zip(tau, xs))))
    GH = direct_product(G, H)
    pG, pH = product_projections(G, H, GH)
    # (a, b)·(y, k, x) = (b·y, g(a)·k·f(b)⁻¹, a·x), all group elements at once
    T = np.array(triples, dtype=np.int64).reshape(-1, 3)
    nk, nx = K.order, X.n_vertices
    lookup = np.full(Y.n_vertices * nk * nx, -1, dtype=np.int64)
    lookup[(T[:, 0] * nk + T[:, 1]) * nx + T[:, 2]] = np.arange(len(triples))
    a = np.repeat(np.arange(G.order), H.order)
    b = np.tile(np.arange(H.order), G.order)
    ga = np.array(g.hom.map)[a][:, None]
    fbinv = np.array(f.hom.map)[H.inverse[b]][:, None]
    y2 = Y.vertex_action[b[:, None], T[None, :, 0]]
    k2 = K.table[K.table[ga, T[None, :, 1]], fbinv]
    x2 = X.vertex_action[a[:, None], T[None, :, 2]]
    act = lookup[(y2 * nk + k2) * nx + x2]
    P = GComplex(GH, len(triples), tuple(simplices), act)
    to_x = EquivariantMap(P, X, pG, tuple(t[2] for t in triples))
    to_y = EquivariantMap(P, Y, pH, tuple(t[0] for t in triples))
    comps = tuple(triples[s[0]][1] for s in P.simplices)
    w = Transformation(to_y.then(f), to_x.then(g), comps)
    return FibreProduct(P, to_x, to_y, w, tuple(triples))


def compose_generalized(a: GeneralizedMap, b: GeneralizedMap) -> GeneralizedMap:
    """b ∘ a through the fibre product of a.right and b.left."""
    if a.codomain is not b.domain:
        raise DomainMismatch("codomain of the first span is not the domain of the second")
    fp = fibre_product(a.right, b.left)
    return GeneralizedMap(fp.to_y.then(a.left), fp.to_x.then(b.right))


def exhibit_two_cell(a: GeneralizedMap, b: GeneralizedMap) -> TwoCell | None:
    """Search for a 2-cell a ⇒ b over the fibre product of the left legs.

    alpha1 is the fibre-product witness; alpha2 is found orbit by orbit.
    Returns None when no such alpha2 exists.
    """
    if a.domain is not b.domain or a.codomain is not b.codomain:
        raise DomainMismatch("spans have different ends")
    fp = fibre_product(a.left, b.left)
    P = fp.space
    P1, P2 = fp.to_y.then(a.right), fp.to_x.then(b.right)
    Yt = a.codomain
    J = Yt.group
    s1, s2 = P1.simplex_map, P2.simplex_map
    comps = [None] * len(P.simplices)
    for rep in P.orbit_representatives():
        stab = P.stabilizer(rep).members
        choice = None
        for c in range(J.order):
            if Yt.act_simplex(c, int(s1[rep])) != s2[rep]:
                continue
            if all(J.mul(P2.hom(l), c) == J.mul(c, P1.hom(l)) for l in stab):
                choice = c
                break
        if choice is None:
            return None
        for l in range(P.group.order):
            s = P.act_simplex(l, rep)
            comps[s] = J.mul(J.mul(P2.hom(l), choice), J.inv(P1.hom(l)))
    cell = TwoCell(a, b, fp.to_y, fp.to_x, fp.witness.components, tuple(comps))
    return cell if cell.is_valid() else None


# -- decomposition -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Decomposition:
    q: EquivariantMap    # quotient form: G⋉X -> G/Ker⋉X/Ker
    j: EquivariantMap    # inclusion form: into H⋉(H x_{G/Ker} X/Ker)
    iso: EquivariantMap  # H x_{G/Ker} X/Ker -> Y

    def recompose(self) -> EquivariantMap:
        return self.q.then(self.j).then(self.iso)


def decompose_essential_equivalence(m: EquivariantMap) -> Decomposition:
    """Factor m as iso ∘ j ∘ q with q of quotient form and j of inclusion form."""
    cert = is_essential_equivalence(m)
    if not cert:
        raise NotEssentialEquivalence(cert.reason, witness=cert.witness)
    X, Y, phi = m.source, m.target, m.hom
    G, H = X.group, Y.group
    K, _ = analyze_hom(phi)
    for k in K.members:
        if k != G.identity:
            fixed = np.flatnonzero(X.vertex_action[k] == np.arange(X.n_vertices))
            if len(fixed):
                raise NotFree("kernel does not act freely", witness=(k, int(fixed[0])))
    Xq, q = quotient_complex(X, K)
    Q = Xq.group
    # phi factors through G/K; q.hom sends g to its coset index
    bar = [None] * Q.order
    for g in range(G.order):
        bar[q.hom(g)] = phi(g)
    phibar = GroupHom(Q, H, tuple(bar))
    W, j = induce_space(phibar, Xq)
    lift = [None] * Xq.n_vertices
    for x in range(X.n_vertices):
        if lift[q.vertex_map[x]] is None:
            lift[q.vertex_map[x]] = x
    img = phibar.image_of(Q.whole)
    reps = [H.identity] + [r for r in img.left_coset_reps() if r not in img]
    n = Xq.n_vertices
    iso_map = tuple(Y.act(reps[c], m.vertex_map[lift[z]]) for c in range(len(reps)) for z in range(n))
    iso = EquivariantMap(W, Y, GroupHom.identity(H), iso_map)
    if sorted(iso_map) != list(range(Y.n_vertices)) or \
            sorted(iso.simplex_map.tolist()) != list(range(len(Y.simplices))):
        raise PreconditionFailed("comparison map is not an isomorphism")
    out = Decomposition(q, j, iso)
    r = out.recompose()
    if r.hom.map != m.hom.map or r.vertex_map != m.vertex_map:
        raise PreconditionFailed("factors do not recompose to the input")
    return out


# -- 2-for-3 -------------------------------------------------------------

@dataclass(frozen=True)
class TwoForThree:
    first: bool
    second: bool
    composite: bool

    @property
    def law_holds(self) -> bool:
        return [self.first, self.second, self.composite].count(False) != 1


def two_for_three(phi: EquivariantMap, psi: EquivariantMap) -> TwoForThree:
    if phi.target is not psi.source:
        raise DomainMismatch("maps are not composable")
    return TwoForThree(bool(is_essential_equivalence(phi)), bool(is_essential_equivalence(psi)),
                       bool(is_essential_equivalence(phi.then(psi))))
