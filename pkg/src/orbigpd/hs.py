"""Hilsum-Skandalis bundles between finite groupoids.

A bundle R: 𝒢 -> ℋ is a finite set with a base map ``rho`` to the objects of
𝒢, an anchor ``anchor`` to the objects of ℋ, a left 𝒢-action (``g·x`` needs
``src(g) = rho(x)``) and a right ℋ-action (``x·h`` needs ``tgt(h) = anchor(x)``).
Elements are canonical tuples so bundles built twice compare syntactically.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputError, MiddleMismatch, NotEssentialEquivalence, NotMorita, NotTranslation
from .gpd import (FiniteGroupoid, GeneralizedMap, GroupoidHom, TranslationGroupoid, TwoCell,
                  discretize, discretize_map, groupoid_hom, is_essential_equivalence_hom,
                  translation_groupoid)
from .grp import GroupHom, direct_product, product_projections
from .gspace import EquivariantMap, GComplex


@dataclass(eq=False)
class HSBundle:
    source: FiniteGroupoid
    target: FiniteGroupoid
    elements: tuple
    rho: tuple[int, ...]
    anchor: tuple[int, ...]
    left: dict = field(repr=False)    # (arrow of source, i) -> i
    right: dict = field(repr=False)   # (i, arrow of target) -> i
    class_of: dict | None = field(default=None, repr=False)  # for tensor products: pair -> class index

    def __post_init__(self):
        self.index = {e: i for i, e in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def act_left(self, g: int, i: int) -> int:
        return self.left[(g, i)]

    def act_right(self, i: int, h: int) -> int:
        return self.right[(i, h)]

    # -- invariants ------------------------------------------------------

    def axiom_witness(self):
        """First violated bundle axiom, or None."""
        G, H = self.source, self.target
        n = len(self.elements)
        if set(self.rho) != set(range(G.n_objects)):
            return ("rho is not surjective", None)
        for i in range(n):
            if self.left.get((G.ident(self.rho[i]), i)) != i:
                return ("identity of source does not act trivially", i)
            if self.right.get((i, H.ident(self.anchor[i]))) != i:
                return ("identity of target does not act trivially", i)
            for g in G.arrows_from(self.rho[i]):
                gi = self.left[(g, i)]
                if self.rho[gi] != G.tgt(g) or self.anchor[gi] != self.anchor[i]:
                    return ("left action moves the wrong anchors", (g, i))
                for g2 in G.arrows_from(G.tgt(g)):
                    if self.left[(g2, gi)] != self.left[(G.compose(g2, g), i)]:
                        return ("left action is not associative", (g2, g, i))
                for h in H.arrows_to(self.anchor[i]):
                    if self.right[(gi, h)] != self.left[(g, self.right[(i, h)])]:
                        return ("actions do not commute", (g, i, h))
            for h in H.arrows_to(self.anchor[i]):
                ih = self.right[(i, h)]
                if self.anchor[ih] != H.src(h) or self.rho[ih] != self.rho[i]:
                    return ("right action moves the wrong anchors", (i, h))
                for h2 in H.arrows_to(H.src(h)):
                    if self.right[(ih, h2)] != self.right[(i, H.compose(h, h2))]:
                        return ("right action is not associative", (i, h, h2))
        return self.right_principal_witness()

    def right_principal_witness(self):
        """(x, h) -> (x, xh) must be a bijection onto pairs with equal rho."""
        fibres = {}
        for i, r in enumerate(self.rho):
            fibres.setdefault(r, set()).add(i)
        for i in range(len(self.elements)):
            img = [self.right[(i, h)] for h in self.target.arrows_to(self.anchor[i])]
            if len(set(img)) != len(img) or set(img) != fibres[self.rho[i]]:
                return ("right action is not principal", i)
        return None

    def left_principal_witness(self):
        if set(self.anchor) != set(range(self.target.n_objects)):
            return ("anchor is not surjective", None)
        fibres = {}
        for i, r in enumerate(self.anchor):
            fibres.setdefault(r, set()).add(i)
        for i in range(len(self.elements)):
            img = [self.left[(g, i)] for g in self.source.arrows_from(self.rho[i])]
            if len(set(img)) != len(img) or set(img) != fibres[self.anchor[i]]:
                return ("left action is not principal", i)
        return None

    def is_valid(self) -> bool:
        return self.axiom_witness() is None


def _as_hom(m) -> GroupoidHom:
    return groupoid_hom(m) if isinstance(m, EquivariantMap) else m


def bundle_from_hom(m) -> HSBundle:
    """R = {(x, h) : F(x) = tgt(h)}, with g·(x,h)·h' = (tgt(g), F(g) h h')."""
    F = _as_hom(m)
    G, H = F.source, F.target
    elements = [(x, h) for x in range(G.n_objects) for h in sorted(H.arrows_to(F.obj_map[x]))]
    index = {e: i for i, e in enumerate(elements)}
    left, right = {}, {}
    for i, (x, h) in enumerate(elements):
        for g in G.arrows_from(x):
            left[(g, i)] = index[(G.tgt(g), H.compose(F(g), h))]
        for h2 in H.arrows_to(H.src(h)):
            right[(i, h2)] = index[(x, H.compose(h, h2))]
    return HSBundle(G, H, tuple(elements), tuple(e[0] for e in elements),
                    tuple(H.src(e[1]) for e in elements), left, right)


def unit_bundle(G: FiniteGroupoid) -> HSBundle:
    return bundle_from_hom(GroupoidHom.identity(G))


def inverse_bundle(R: HSBundle) -> HSBundle:
    """Same set with the roles of the two sides swapped: h·x = x·h⁻¹, x·g = g⁻¹·x."""
    G, H = R.source, R.target
    left = {(H.inv(h), i): j for (i, h), j in R.right.items()}
    right = {(i, G.inv(g)): j for (g, i), j in R.left.items()}
    return HSBundle(H, G, tuple(("inv", e) for e in R.elements), R.anchor, R.rho, left, right)


def tensor_compose(R: HSBundle, Q: HSBundle) -> HSBundle:
    """(R x_K Q)/K with (x, y)k ~ (xk, k⁻¹y); least pair represents each class."""
    if R.target is not Q.source:
        raise MiddleMismatch("bundles do not share the middle groupoid")
    K = R.target
    canon = {}
    classes = []
    for i in range(len(R)):
        for j in range(len(Q)):
            if Q.rho[j] != R.anchor[i] or (i, j) in canon:
                continue
            orbit = {(R.right[(i, k)], Q.left[(K.inv(k), j)]) for k in K.arrows_to(R.anchor[i])}
            rep = min(orbit)
            for p in orbit:
                canon[p] = rep
            classes.append(rep)
    classes.sort()
    index = {p: n for n, p in enumerate(classes)}
    left, right = {}, {}
    for n, (i, j) in enumerate(classes):
        for g in R.source.arrows_from(R.rho[i]):
            left[(g, n)] = index[canon[(R.left[(g, i)], j)]]
        for h in Q.target.arrows_to(Q.anchor[j]):
            right[(n, h)] = index[canon[(i, Q.right[(j, h)])]]
    out = HSBundle(R.source, Q.target, tuple((R.elements[i], Q.elements[j]) for i, j in classes),
                   tuple(R.rho[i] for i, _ in classes), tuple(Q.anchor[j] for _, j in classes),
                   left, right,
                   {(R.elements[i], Q.elements[j]): index[rep] for (i, j), rep in canon.items()})
    return out


def is_morita(R: HSBundle) -> bool:
    return R.right_principal_witness() is None and R.left_principal_witness() is None


def bundle_isomorphism(R: HSBundle, S: HSBundle) -> tuple[int, ...] | None:
    """An equivariant bijection R -> S over both anchors, by exhaustive search."""
    if R.source is not S.source or R.target is not S.target or len(R) != len(S):
        return None
    G, H = R.source, R.target
    n = len(R)

    def orbit(i):
        seen, stack = {i}, [i]
        while stack:
            x = stack.pop()
            nbrs = [R.left[(g, x)] for g in G.arrows_from(R.rho[x])]
            nbrs += [R.right[(x, h)] for h in H.arrows_to(R.anchor[x])]
            for y in nbrs:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    reps, covered = [], set()
    for i in range(n):
        if i not in covered:
            reps.append(i)
            covered |= orbit(i)

    def propagate(beta, i, j):
        beta = dict(beta)
        beta[i] = j
        stack = [i]
        while stack:
            x = stack.pop()
            y = beta[x]
            moves = [(R.left[(g, x)], S.left.get((g, y))) for g in G.arrows_from(R.rho[x])]
            moves += [(R.right[(x, h)], S.right.get((y, h))) for h in H.arrows_to(R.anchor[x])]
            for x2, y2 in moves:
                if y2 is None:
                    return None
                if x2 in beta:
                    if beta[x2] != y2:
                        return None
                else:
                    if R.rho[x2] != S.rho[y2] or R.anchor[x2] != S.anchor[y2]:
                        return None
                    beta[x2] = y2
                    stack.append(x2)
        return beta

    def search(k, beta, used):
        if k == len(reps):
            return beta
        i = reps[k]
        for j in range(n):
            if j in used or S.rho[j] != R.rho[i] or S.anchor[j] != R.anchor[i]:
                continue
            b2 = propagate(beta, i, j)
            if b2 is None:
                continue
            new = {b2[x] for x in b2 if x not in beta}
            if new & used or len(new) != len(b2) - len(beta):
                continue
            out = search(k + 1, b2, used | new)
            if out is not None:
                return out
        return None

    beta = search(0, {}, set())
    return None if beta is None else tuple(beta[i] for i in range(n))


def bundles_isomorphic(R: HSBundle, S: HSBundle) -> bool:
    return bundle_isomorphism(R, S) is not None


# -- spans ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BundleSpan:
    """The span (G x H)⋉R with legs omega (base) and psi (anchor)."""

    bundle: HSBundle
    middle: GComplex
    omega: EquivariantMap
    psi: EquivariantMap

    def generalized_map(self) -> GeneralizedMap:
        return GeneralizedMap(self.omega, self.psi)


def span_from_bundle(R: HSBundle) -> BundleSpan:
    """Middle (G x H)⋉R with (g, h)·x = g·x·h⁻¹; legs land in the discretized ends."""
    Gg, Hg = R.source, R.target
    if not isinstance(Gg, TranslationGroupoid) or not isinstance(Hg, TranslationGroupoid):
        raise NotTranslation("span reconstruction needs translation groupoids on both sides")
    if R.right_principal_witness() is not None:
        raise NotMorita("bundle is not a principal right bundle", witness=R.right_principal_witness())
    G, H = Gg.group, Hg.group
    X, Y = discretize(Gg.space), discretize(Hg.space)
    GH = direct_product(G, H)
    pG, pH = product_projections(G, H, GH)
    n = len(R)
    act = []
    for gh in range(GH.order):
        a, b = divmod(gh, H.order)
        binv = H.inv(b)
        row = []
        for i in range(n):
            x = R.left[(Gg.arrow(a, R.rho[i]), i)]
            row.append(R.right[(x, Hg.arrow(binv, Hg.space.act_simplex(b, R.anchor[x])))])
        act.append(row)
    M = GComplex(GH, n, (), act)
    omega = EquivariantMap(M, X, pG, R.rho)
    psi = EquivariantMap(M, Y, pH, R.anchor)
    return BundleSpan(R, M, omega, psi)


@dataclass(frozen=True, eq=False)
class RoundTrip:
    span: GeneralizedMap          # the input span, discretized
    rebuilt: BundleSpan
    theta: EquivariantMap         # middle of span -> middle of rebuilt
    omega_theta_ok: bool
    psi_theta_ok: bool

    @property
    def ok(self) -> bool:
        return self.omega_theta_ok and self.psi_theta_ok


def span_roundtrip(span: GeneralizedMap) -> RoundTrip:
    """span -> bundles -> tensor -> span, with the comparison map theta.

    theta sends z to the class of ((z, id), (z, id)); the identities
    omega∘theta = upsilon and psi∘theta = phi are checked elementwise.
    """
    ups, phi = discretize_map(span.left), discretize_map(span.right)
    Ru, Rp = bundle_from_hom(ups), bundle_from_hom(phi)
    Q = tensor_compose(inverse_bundle(Ru), Rp)
    rebuilt = span_from_bundle(Q)
    Gg, Hg = translation_groupoid(ups.target), translation_groupoid(phi.target)
    K = ups.source.group
    GH = rebuilt.middle.group
    hom = tuple(ups.hom(k) * phi.target.group.order + phi.hom(k) for k in range(K.order))
    theta_hom = GroupHom(K, GH, hom)
    vmap = []
    for z in range(ups.source.n_vertices):
        u = ("inv", (z, Gg.ident(ups.vertex_map[z])))
        p = (z, Hg.ident(phi.vertex_map[z]))
        vmap.append(Q.class_of[(u, p)])
    theta = EquivariantMap(ups.source, rebuilt.middle, theta_hom, tuple(vmap))
    ot, pt = theta.then(rebuilt.omega), theta.then(rebuilt.psi)
    return RoundTrip(GeneralizedMap(ups, phi), rebuilt, theta, ot.same_as(ups), pt.same_as(phi))


# -- 2-cell transport ----------------------------------------------------

def transport_2cell(a: GeneralizedMap, b: GeneralizedMap, M: FiniteGroupoid,
                    theta: GroupoidHom, theta_p: GroupoidHom,
                    alpha1: tuple[int, ...], alpha2: tuple[int, ...]) -> TwoCell:
    """Move 2-cell data over an arbitrary middle M to a translation middle.

    theta: M -> K⋉(middle of a) must be an essential equivalence, theta_p:
    M -> K'⋉(middle of b).  alpha1[m], alpha2[m] are the group elements of
    the natural transformations upsilon∘theta ⇒ upsilon'∘theta_p and
    phi∘theta ⇒ phi'∘theta_p.  The result is a TwoCell between the
    discretized spans over (K x K')⋉(R_theta⁻¹ ⊗_M R_theta_p).
    """
    cert = is_essential_equivalence_hom(theta)
    if not cert:
        raise NotEssentialEquivalence(f"theta: {cert.reason}", witness=cert.witness)
    ups, phi = discretize_map(a.left), discretize_map(a.right)
    ups2, phi2 = discretize_map(b.left), discretize_map(b.right)
    Kg, K2g = translation_groupoid(ups.source), translation_groupoid(ups2.source)
    if theta.target is not Kg or theta_p.target is not K2g or theta.source is not M:
        raise InputError("theta legs do not match the span middles")
    R = tensor_compose(inverse_bundle(bundle_from_hom(theta)), bundle_from_hom(theta_p))
    built = span_from_bundle(R)
    kappa, kappa_p = built.omega, built.psi
    G, H = ups.target.group, phi.target.group
    U, U2, P, P2 = groupoid_hom(ups), groupoid_hom(ups2), groupoid_hom(phi), groupoid_hom(phi2)
    _check_natural(theta.then(U), theta_p.then(U2), alpha1, ups.target)
    _check_natural(theta.then(P), theta_p.then(P2), alpha2, phi.target)

    def component(u, v, alpha, hom1, hom2, grp):
        # u = ("inv", (m, k)), v = (m, k'); k, k' arrows into theta(m), theta'(m)
        (m, k), (_, k2) = u[1], v
        ka, kb = Kg.split(k)[0], K2g.split(k2)[0]
        return grp.mul(grp.mul(grp.inv(hom2(kb)), alpha[m]), hom1(ka))

    a1, a2 = [], []
    for i, (u, v) in enumerate(R.elements):
        a1.append(component(u, v, alpha1, ups.hom, ups2.hom, G))
        a2.append(component(u, v, alpha2, phi.hom, phi2.hom, H))
    # well-definedness: every representative of a class gives the same value
    for (u, v), i in R.class_of.items():
        if component(u, v, alpha1, ups.hom, ups2.hom, G) != a1[i] or \
                component(u, v, alpha2, phi.hom, phi2.hom, H) != a2[i]:
            raise InputError("transported components depend on the representative", witness=i)
    cell = TwoCell(GeneralizedMap(ups, phi), GeneralizedMap(ups2, phi2), kappa, kappa_p, tuple(a1), tuple(a2))
    w = cell.witness()
    if w is not None:
        raise InputError(f"transported 2-cell is invalid: {w[0]}", witness=w[1])
    return cell


def _check_natural(F1: GroupoidHom, F2: GroupoidHom, alpha, X: GComplex):
    T = F1.target
    M = F1.source
    comps = [T.arrow(alpha[m], F1.obj_map[m]) for m in range(M.n_objects)]
    for m in range(M.n_objects):
        if T.tgt(comps[m]) != F2.obj_map[m]:
            raise InputError("component has the wrong target", witness=m)
        for mu in M.arrows_from(m):
            if T.compose(F2(mu), comps[m]) != T.compose(comps[M.tgt(mu)], F1(mu)):
                raise InputError("transformation is not natural", witness=mu)
