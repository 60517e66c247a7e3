"""Orbit categories, coefficient systems and Bredon cohomology.

A morphism ``R_a: G/H -> G/H'`` (with ``a⁻¹Ha ⊆ H'``) is the triple
``(i, j, a)`` of object indices and the least representative of ``aH'``.
Coefficient systems are contravariant: ``A(R_a)`` is a matrix of shape
``ngens(A(G/H)) x ngens(A(G/H'))`` and ``A(R_b ∘ R_a) = A(R_a) · A(R_b)``.
"""
from __future__ import annotations

import cmath
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .abgrp import (CochainComplex, CyclicSum, FGAbGroup, as_int_matrix, cohomology_of_complex,
                    direct_sum, identity, is_well_defined, kernel_mod, matmul, subquotient, zeros)
from .errors import (InputError, IsomorphismFailure, MissingCharacterData, NotExtendable,
                     NotOrbifoldSystem, PathInvalid, PreconditionFailed, SubgroupMismatch,
                     ValidationError)
from .grp import FiniteGroup, GroupHom, Subgroup, enumerate_subgroups, quotient_group
from .gspace import (GComplex, fixed_subcomplex, induce_space, isotropy_lineage, quotient_complex,
                     unique_lift)

Morphism = tuple[int, int, int]


# -- orbit category ------------------------------------------------------

class OrbitCategory:
    """Full subcategory of O_G on the given subgroups (all of them by default)."""

    def __init__(self, G: FiniteGroup, objects: Sequence[Subgroup] | None = None):
        self.group = G
        subs = enumerate_subgroups(G) if objects is None else sorted(objects, key=lambda s: s.sort_key)
        self.objects = tuple(subs)
        self.index = {H: i for i, H in enumerate(self.objects)}
        self.is_full = len(self.objects) == len(enumerate_subgroups(G))
        self._homs: dict[tuple[int, int], list[int]] = {}

    def __len__(self):
        return len(self.objects)

    def hom(self, i: int, j: int) -> list[int]:
        """Least representatives a of the cosets aH_j with a⁻¹ H_i a ⊆ H_j."""
        key = (i, j)
        if key not in self._homs:
            G, H, H2 = self.group, self.objects[i], self.objects[j]
            self._homs[key] = [a for a in H2.left_coset_reps()
                               if all(G.conj(G.inv(a), h) in H2 for h in H.members)]
        return self._homs[key]

    def morphism(self, i: int, j: int, a: int) -> Morphism:
        a = self.objects[j].coset_rep(a)
        if a not in self.hom(i, j):
            raise InputError("not a morphism of the orbit category", witness=(i, j, a))
        return (i, j, a)

    def morphisms(self) -> list[Morphism]:
        n = len(self.objects)
        return [(i, j, a) for i in range(n) for j in range(n) for a in self.hom(i, j)]

    def compose(self, second: Morphism, first: Morphism) -> Morphism:
        """second ∘ first, i.e. R_b ∘ R_a = R_ab."""
        i, j, a = first
        j2, k, b = second
        if j != j2:
            raise InputError("morphisms are not composable")
        return (i, k, self.objects[k].coset_rep(self.group.mul(a, b)))

    def identity(self, i: int) -> Morphism:
        return (i, i, self.objects[i].coset_rep(self.group.identity))

    def describe(self, m: Morphism) -> str:
        i, j, a = m
        return f"R_{self.group.name(a)}: G/{self.objects[i]!r} -> G/{self.objects[j]!r}"


def build_orbit_category(G: FiniteGroup) -> OrbitCategory:
    cache = G.__dict__.setdefault("_orbit_category", None)
    if cache is None:
        cache = OrbitCategory(G)
        G.__dict__["_orbit_category"] = cache
    return cache


# -- coefficient systems -------------------------------------------------

class CoefficientSystem:
    def __init__(self, category: OrbitCategory, values: Sequence[FGAbGroup],
                 maps: Mapping[Morphism, np.ndarray], name: str | None = None):
        self.category = category
        self.values = tuple(values)
        self.maps = {m: as_int_matrix(M) for m, M in maps.items()}
        self.name = name
        if len(self.values) != len(category):
            raise InputError("need one value per object")

    @property
    def group(self) -> FiniteGroup:
        return self.category.group

    def value(self, H: Subgroup) -> FGAbGroup:
        return self.values[self.category.index[H]]

    def matrix(self, m: Morphism) -> np.ndarray:
        return self.maps[m]

    def matrix_for(self, H: Subgroup, H2: Subgroup, a: int) -> np.ndarray:
        cat = self.category
        return self.maps[cat.morphism(cat.index[H], cat.index[H2], a)]

    def violation(self):
        """First failed invariant as (invariant, witness), or None."""
        cat = self.category
        labels = {}
        for H, v in zip(cat.objects, self.values):
            if v.label in labels and labels[v.label] != v.iso_class:
                return ("equal labels must carry equal groups", (H.members, v.label))
            labels[v.label] = v.iso_class
        for m in cat.morphisms():
            i, j, _ = m
            M = self.maps.get(m)
            if M is None:
                return ("missing structure map", cat.describe(m))
            if not is_well_defined(M, self.values[j], self.values[i]):
                return ("structure map shape or relations", cat.describe(m))
        for i in range(len(cat)):
            e = cat.identity(i)
            if not self.values[i].equal_maps(self.maps[e], identity(self.values[i].ngens)):
                return ("identity", cat.describe(e))
        for m1 in cat.morphisms():
            i, j, _ = m1
            for b in range(len(cat)):
                for a2 in cat.hom(j, b):
                    m2 = (j, b, a2)
                    comp = cat.compose(m2, m1)
                    lhs = self.maps[comp]
                    rhs = matmul(self.maps[m1], self.maps[m2])
                    if not self.values[i].equal_maps(lhs, rhs):
                        return ("functoriality", (cat.describe(m1), cat.describe(m2)))
        return None

    def check(self) -> "CoefficientSystem":
        v = self.violation()
        if v is not None:
            raise ValidationError(self.name or "system", v[0], v[1])
        return self


def _zero_map(A: FGAbGroup, B: FGAbGroup) -> np.ndarray:
    return zeros(B.ngens, A.ngens)


def constant_system(category: OrbitCategory, value: FGAbGroup | None = None, name: str = "const") -> CoefficientSystem:
    value = value or FGAbGroup("Z", 1)
    maps = {m: identity(value.ngens) for m in category.morphisms()}
    return CoefficientSystem(category, [value] * len(category), maps, name)


def zero_system(category: OrbitCategory, name: str = "zero") -> CoefficientSystem:
    z = FGAbGroup("0", 0)
    return CoefficientSystem(category, [z] * len(category), {m: zeros(0, 0) for m in category.morphisms()}, name)


def explicit_system(category: OrbitCategory, values: Mapping[Subgroup, FGAbGroup],
                    generators: Mapping[Morphism, np.ndarray], name: str = "system") -> CoefficientSystem:
    """Close generating structure maps under composition; missing values are 0."""
    vals = [values.get(H, FGAbGroup("0", 0)) for H in category.objects]
    maps: dict[Morphism, np.ndarray] = {}
    for i in range(len(category)):
        maps[category.identity(i)] = identity(vals[i].ngens)

    def put(m, M):
        i, j, _ = m
        M = vals[i].reduce(as_int_matrix(M)) if M.size else as_int_matrix(M)
        if m in maps:
            if not vals[i].equal_maps(maps[m], M):
                raise ValidationError(name, "structure maps conflict under composition", category.describe(m))
            return False
        maps[m] = M
        return True

    for m, M in generators.items():
        i, j, _ = m
        M = as_int_matrix(M)
        if M.shape != (vals[i].ngens, vals[j].ngens):
            raise ValidationError(name, "structure map shape", category.describe(m))
        put(m, M)
    # anything touching a zero group is forced
    for m in category.morphisms():
        i, j, _ = m
        if (vals[i].ngens == 0 or vals[j].ngens == 0) and m not in maps:
            maps[m] = zeros(vals[i].ngens, vals[j].ngens)
    frontier = list(maps)
    while frontier:
        nxt = []
        known = list(maps.items())
        for m1 in frontier:
            for m2, M2 in known:
                for first, second in ((m1, m2), (m2, m1)):
                    if first[1] != second[0]:
                        continue
                    comp = category.compose(second, first)
                    if put(comp, matmul(maps[first], maps[second])):
                        nxt.append(comp)
        frontier = nxt
    missing = [m for m in category.morphisms() if m not in maps]
    if missing:
        raise ValidationError(name, "structure maps do not generate every morphism", category.describe(missing[0]))
    return CoefficientSystem(category, vals, maps, name).check()


def systems_equal(A: CoefficientSystem, B: CoefficientSystem) -> bool:
    """Label-exact equality: same objects, same labels, same matrices."""
    if A.group is not B.group or A.category.objects != B.category.objects:
        return False
    for a, b in zip(A.values, B.values):
        if a.label != b.label or a.iso_class != b.iso_class:
            return False
    for m in A.category.morphisms():
        if not A.values[m[0]].equal_maps(A.maps[m], B.maps[m]):
            return False
    return True


def restrict_to(A: CoefficientSystem, objects: Iterable[Subgroup]) -> CoefficientSystem:
    sub = OrbitCategory(A.group, list(objects))
    idx = [A.category.index[H] for H in sub.objects]
    vals = [A.values[i] for i in idx]
    maps = {(i, j, a): A.maps[(idx[i], idx[j], a)] for (i, j, a) in sub.morphisms()}
    return CoefficientSystem(sub, vals, maps, A.name)


def restrict_system(A: CoefficientSystem, X: GComplex) -> CoefficientSystem:
    """Restriction to the full subcategory on the isotropy lineage of X."""
    if A.group is not X.group:
        raise SubgroupMismatch("system and complex have different groups")
    lineage = _lineage(X)
    return restrict_to(A, lineage)


def _lineage(X: GComplex) -> tuple[Subgroup, ...]:
    cached = X.__dict__.get("_lineage")
    if cached is None:
        cached = isotropy_lineage(X).subgroups
        X.__dict__["_lineage"] = cached
    return cached


# -- Bredon cochains -----------------------------------------------------

def _perm_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        while seq[i] != sorted(seq)[i]:
            j = sorted(seq).index(seq[i])
            seq[i], seq[j] = seq[j], seq[i]
            sign = -sign
    return sign


def _oriented(X: GComplex, g: int, s: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """g·s as a sorted simplex together with the orientation sign."""
    img = [X.act(g, v) for v in s]
    return tuple(sorted(img)), _perm_sign(img)


@dataclass(frozen=True)
class BredonInput:
    space: GComplex
    system: CoefficientSystem

    def __post_init__(self):
        if self.space.group is not self.system.group:
            raise SubgroupMismatch("system and complex have different groups")


def bredon_cochain_complex(inp: BredonInput, top: int | None = None) -> CochainComplex:
    """C^n = ⊕ over orbit representatives σ of A(G/G_σ), differentials from faces."""
    X, A = inp.space, inp.system
    X.require_admissible()
    top = X.dim if top is None else max(top, X.dim)
    cat = A.category
    reps = [X.orbit_representatives(n) for n in range(top + 2)]
    stab = {r: X.stabilizer(r) for rs in reps for r in rs}
    for r, S in stab.items():
        if S not in cat.index:
            raise InputError("system is not defined on a stabilizer", witness=S.members)
    vals = {r: A.value(stab[r]) for r in stab}
    offsets = []
    for n in range(top + 2):
        off, pos = {}, 0
        for r in reps[n]:
            off[r] = pos
            pos += vals[r].ngens
        offsets.append((off, pos))
    groups = [direct_sum([vals[r] for r in reps[n]]) for n in range(top + 1)]
    diffs = []
    for n in range(top):
        (off_n, size_n), (off_m, size_m) = offsets[n], offsets[n + 1]
        D = zeros(size_m, size_n)
        for rho in reps[n + 1]:
            verts = X.simplices[rho]
            for i in range(len(verts)):
                face = verts[:i] + verts[i + 1:]
                t = X.simplex_index[face]
                sigma = int(X.orbit_reps[t])
                a = next(g for g in range(X.group.order) if X.simplex_action[g, sigma] == t)
                _, eps = _oriented(X, a, X.simplices[sigma])
                M = A.matrix_for(stab[rho], stab[sigma], a)
                sign = (-1) ** i * eps
                r0, c0 = off_m[rho], off_n[sigma]
                D[r0:r0 + M.shape[0], c0:c0 + M.shape[1]] += sign * M
        diffs.append(D)
    return CochainComplex(tuple(groups), tuple(diffs))


def bredon_cohomology(inp: BredonInput, top: int | None = None) -> list[FGAbGroup]:
    return cohomology_of_complex(bredon_cochain_complex(inp, top))


@dataclass(frozen=True)
class OracleDegree:
    unknowns: int
    naturality: np.ndarray
    coboundary: np.ndarray | None
    orders: tuple[int, ...]


def _oracle_layout(X: GComplex, A: CoefficientSystem, n: int):
    cat = A.category
    blocks, pos = {}, 0
    orders: list[int] = []
    fixed = [fixed_subcomplex(X, H) for H in cat.objects]
    for o in range(len(cat)):
        for s in fixed[o].of_dim(n):
            blocks[(o, s)] = pos
            pos += A.values[o].ngens
            orders += A.values[o].orders()
    return blocks, pos, orders, fixed


class _HomCochains:
    """Hom_{O_G}(C_n(X^-), A) as solutions of the naturality equations.

    An n-cochain picks x(H, τ) in A(G/H) for every τ in X^H_n; a morphism
    R_a: G/H_i -> G/H_j sends τ in X^{H_j} to aτ in X^{H_i}, and naturality
    reads ε·x(H_i, aτ) = A(R_a)·x(H_j, τ) with ε the orientation sign.
    """

    def __init__(self, X: GComplex, A: CoefficientSystem, top: int):
        self.X, self.A, self.top = X, A, top
        self.layouts = [_oracle_layout(X, A, n) for n in range(top + 2)]

    def naturality(self, n):
        X, A = self.X, self.A
        blocks, size, _, fixed = self.layouts[n]
        rows, row_orders = [], []
        for (i, j, a) in A.category.morphisms():
            Mi = A.maps[(i, j, a)]
            for s in fixed[j].of_dim(n):
                img, eps = _oriented(X, a, s)
                block = zeros(A.values[i].ngens, size)
                c = blocks[(i, img)]
                block[:, c:c + A.values[i].ngens] += eps * identity(A.values[i].ngens)
                c = blocks[(j, s)]
                block[:, c:c + A.values[j].ngens] -= Mi
                rows.append(block)
                row_orders += A.values[i].orders()
        N = np.concatenate(rows, axis=0) if rows else zeros(0, size)
        return N, row_orders

    def coboundary(self, n):
        b0, s0, _, _ = self.layouts[n]
        b1, s1, _, _ = self.layouts[n + 1]
        D = zeros(s1, s0)
        for (o, rho), r in b1.items():
            k = self.A.values[o].ngens
            for i in range(len(rho)):
                c = b0[(o, rho[:i] + rho[i + 1:])]
                D[r:r + k, c:c + k] += (-1) ** i * identity(k)
        return D

    def orders(self, n):
        return self.layouts[n][2]


def _relations(orders) -> np.ndarray:
    return CyclicSum(tuple(orders)).relations()


def hom_cochains(inp: BredonInput, n: int) -> FGAbGroup:
    """The group of natural n-cochains, computed from the naturality equations."""
    H = _HomCochains(inp.space, inp.system, max(n, inp.space.dim))
    N, n_orders = H.naturality(n)
    Z = kernel_mod(N, _relations(n_orders))
    return subquotient(Z, _relations(H.orders(n)), label=f"C{n}")


def hom_oracle(inp: BredonInput, top: int | None = None) -> list[FGAbGroup]:
    """Cohomology of Hom_{O_G}(C_*(X^-), A), without any equivariant assembly."""
    X = inp.space
    top = X.dim if top is None else max(top, X.dim)
    H = _HomCochains(X, inp.system, top)
    nat = [H.naturality(n) for n in range(top + 1)]
    cob = [H.coboundary(n) for n in range(top)]
    out = []
    prev = None   # basis of natural (n-1)-cochains
    for n in range(top + 1):
        N, n_orders = nat[n]
        parts, rel_orders = [N], list(n_orders)
        if n < top:
            parts.append(cob[n])
            rel_orders += H.orders(n + 1)
        Z = kernel_mod(np.concatenate(parts, axis=0), _relations(rel_orders))
        B = [_relations(H.orders(n))]
        if n > 0:
            B.append(matmul(cob[n - 1], prev))
        out.append(subquotient(Z, np.concatenate(B, axis=1), label=f"H{n}"))
        prev = kernel_mod(N, _relations(n_orders))
    return out


# -- orbifold condition --------------------------------------------------

def _free_normal_subgroups(X: GComplex) -> list[Subgroup]:
    G = X.group
    act = X.vertex_action
    out = []
    for K in enumerate_subgroups(G):
        if not K.is_normal:
            continue
        if all(not (act[k] == np.arange(X.n_vertices)).any() for k in K.members if k != G.identity):
            out.append(K)
    return out


def is_orbifold_system(X: GComplex, A: CoefficientSystem) -> tuple[bool, list[dict]]:
    """Check literal equality of values and maps across lineage subgroups with equal image mod K,
    for every normal K acting freely on X."""
    G = X.group
    cat = A.category
    lineage = [L for L in _lineage(X) if L in cat.index]
    violations: list[dict] = []
    seen_pairs = set()
    for K in _free_normal_subgroups(X):
        if len(K) == 1:
            continue
        Q, pi = quotient_group(G, K)
        img = {L: pi.image_of(L) for L in lineage}
        for x, L in enumerate(lineage):
            for L2 in lineage[x + 1:]:
                if img[L] == img[L2] and A.value(L).label != A.value(L2).label:
                    key = ("label", L.members, L2.members)
                    if key not in seen_pairs:
                        seen_pairs.add(key)
                        violations.append({"kind": "label", "K": K.members, "pair": (L, L2)})
        # maps between lineage objects projecting to the same O_{G/K} morphism
        buckets: dict = {}
        for L1 in lineage:
            for L2 in lineage:
                i, j = cat.index[L1], cat.index[L2]
                for a in cat.hom(i, j):
                    key = (img[L1], img[L2], img[L2].coset_rep(pi(a)))
                    buckets.setdefault(key, []).append((i, j, a))
        for key, ms in sorted(buckets.items(), key=lambda kv: kv[1][0]):
            m0 = ms[0]
            for m in ms[1:]:
                if A.values[m[0]].label != A.values[m0[0]].label or A.values[m[1]].label != A.values[m0[1]].label:
                    continue
                if not A.values[m0[0]].equal_maps(A.maps[m0], A.maps[m]):
                    violations.append({"kind": "map", "K": K.members,
                                       "pair": (cat.describe(m0), cat.describe(m))})
    return (not violations, violations)


# -- change of group -----------------------------------------------------

def pullback_quotient(A: CoefficientSystem, phi: GroupHom) -> CoefficientSystem:
    """phi*A for a surjective phi: G -> Q: value A(Q/phi(H)) at G/H, maps A(R_phi(a))."""
    if phi.codomain is not A.group:
        raise InputError("hom does not land in the group of the system")
    if not phi.is_surjective:
        raise PreconditionFailed("quotient pullback needs a surjective hom")
    G = phi.domain
    cat = build_orbit_category(G)
    qcat = A.category
    obj = [qcat.index[phi.image_of(H)] for H in cat.objects]
    vals = [A.values[o] for o in obj]
    maps = {}
    for (i, j, a) in cat.morphisms():
        maps[(i, j, a)] = A.maps[qcat.morphism(obj[i], obj[j], phi(a))]
    return CoefficientSystem(cat, vals, maps, f"pullback({A.name})")


def pullback_inclusion(A: CoefficientSystem, i: GroupHom) -> CoefficientSystem:
    """i*A for an injective i: H -> G: value A(G/i(L)) at H/L."""
    if i.codomain is not A.group:
        raise InputError("hom does not land in the group of the system")
    if not i.is_injective:
        raise PreconditionFailed("inclusion pullback needs an injective hom")
    H = i.domain
    cat = build_orbit_category(H)
    gcat = A.category
    obj = [gcat.index[i.image_of(L)] for L in cat.objects]
    vals = [A.values[o] for o in obj]
    maps = {(p, q, b): A.maps[gcat.morphism(obj[p], obj[q], i(b))] for (p, q, b) in cat.morphisms()}
    return CoefficientSystem(cat, vals, maps, f"restriction({A.name})")


def transfer_system(A: CoefficientSystem, iso: GroupHom) -> CoefficientSystem:
    """Move A along a group isomorphism iso: G -> G'."""
    if not (iso.is_injective and iso.is_surjective):
        raise PreconditionFailed("transfer needs an isomorphism")
    inv = [0] * iso.codomain.order
    for g, h in enumerate(iso.map):
        inv[h] = g
    return pullback_quotient(A, GroupHom(iso.codomain, iso.domain, tuple(inv)))


def pushforward_inclusion(A: CoefficientSystem, i: GroupHom, Z: GComplex) -> CoefficientSystem:
    """B over G with i*B agreeing with A on the lineage of Z.

    B(G/L) = A(H/i⁻¹(c⁻¹Lc)) for the least fixed vertex [c, z] of G x_H Z,
    and 0 when L fixes nothing.
    """
    H, G = i.domain, i.codomain
    if A.group is not H or Z.group is not H:
        raise InputError("system and complex must live over the domain of the inclusion")
    W, _ = induce_space(i, Z)
    img = i.image_of(H.whole)
    reps = [G.identity] + [r for r in img.left_coset_reps() if r not in img]
    n = Z.n_vertices
    pre = {i(h): h for h in range(H.order)}
    hcat, cat = A.category, build_orbit_category(G)
    zero = FGAbGroup("0", 0)
    chosen = []
    for L in cat.objects:
        fixed = fixed_subcomplex(W, L).vertices
        if not fixed:
            chosen.append(None)
            continue
        c = reps[fixed[0] // n]
        M = Subgroup(H, (pre[G.conj(G.inv(c), l)] for l in L.members))
        chosen.append((c, M))
    vals = [zero if ch is None else A.value(ch[1]) for ch in chosen]
    maps = {}
    for (p, q, a) in cat.morphisms():
        if chosen[p] is None or chosen[q] is None:
            maps[(p, q, a)] = zeros(vals[p].ngens, vals[q].ngens)
            continue
        (c1, M1), (c2, M2) = chosen[p], chosen[q]
        b = G.mul(G.mul(G.inv(c1), a), c2)
        if b in pre:
            h = pre[b]
        else:
            # some h in H inducing the same conjugation on M1
            target = [G.conj(G.inv(b), i(m)) for m in M1.members]
            h = next((h for h in range(H.order)
                      if [G.conj(G.inv(i(h)), i(m)) for m in M1.members] == target), None)
            if h is None:
                raise NotExtendable("no element of H realizes the conjugation", witness=cat.describe((p, q, a)))
        maps[(p, q, a)] = A.maps[hcat.morphism(hcat.index[M1], hcat.index[M2], h)]
    B = CoefficientSystem(cat, vals, maps, f"pushforward({A.name})")
    v = B.violation()
    if v is not None:
        raise NotExtendable(f"pushed-forward system fails {v[0]}", witness=v[1])
    if not systems_equal(restrict_system(pullback_inclusion(B, i), Z), restrict_system(A, Z)):
        raise NotExtendable("restriction of the pushforward differs from A on the lineage")
    return B


def pushforward_quotient(A: CoefficientSystem, K: Subgroup, X: GComplex,
                         profile: str = "least") -> CoefficientSystem:
    """B over G/K with π*B agreeing with A on the lineage of X.

    Values come from unique lifts at a chosen point; ``profile`` picks least
    or greatest indices for every choice (both must give the same B).
    """
    G = X.group
    if A.group is not G:
        raise InputError("system and complex have different groups")
    ok, violations = is_orbifold_system(X, A)
    if not ok:
        v = violations[0]
        raise NotOrbifoldSystem("system is not an orbifold system", witness=_describe_violation(v))
    Y, q = quotient_complex(X, K)
    Q, pi = quotient_group(G, K)
    pick = min if profile == "least" else max
    qcat = build_orbit_category(Q)
    zero = FGAbGroup("0", 0)
    lifts = []
    for Lb in qcat.objects:
        fixed = fixed_subcomplex(Y, Lb).vertices
        if not fixed:
            lifts.append(None)
            continue
        yb = pick(fixed)
        x = pick(v for v in range(X.n_vertices) if q.vertex_map[v] == yb)
        lifts.append(unique_lift(X, K, x, Lb))
    vals = [zero if L is None else A.value(L) for L in lifts]

    def preimage(gb):
        return pick(g for g in range(G.order) if pi(g) == gb)

    def sub_lift(L2, Lb):
        return next(S for S in enumerate_subgroups(G) if S <= L2 and pi.image_of(S) == Lb)

    maps = {}
    for (p, r, ab) in qcat.morphisms():
        if lifts[p] is None or lifts[r] is None:
            maps[(p, r, ab)] = zeros(vals[p].ngens, vals[r].ngens)
            continue
        L1, L2 = lifts[p], lifts[r]
        a = preimage(ab)
        L3 = L1.conjugate(G.inv(a))          # a⁻¹ L1 a
        conj = A.matrix_for(L1, L3, a)
        L3b = pi.image_of(L3)
        proj = A.matrix_for(sub_lift(L2, L3b), L2, G.identity)
        maps[(p, r, ab)] = vals[p].reduce(matmul(conj, proj))
    B = CoefficientSystem(qcat, vals, maps, f"pushforward({A.name})")
    v = B.violation()
    if v is not None:
        raise NotExtendable(f"pushed-forward system fails {v[0]}", witness=v[1])
    if not systems_equal(restrict_system(pullback_quotient(B, pi), X), restrict_system(A, X)):
        raise NotExtendable("pullback of the pushforward differs from A on the lineage")
    return B


def _describe_violation(v: dict):
    if v["kind"] == "label":
        return {"kind": "label", "K": list(v["K"]), "pair": [list(L.members) for L in v["pair"]]}
    return {"kind": "map", "K": list(v["K"]), "pair": list(v["pair"])}


# -- representation rings ------------------------------------------------

def _abelian_characters(H: FiniteGroup) -> list[tuple[Fraction, ...]]:
    """All homs H -> Q/Z, as value tuples over the elements of H; trivial first."""
    n = H.order
    gens: list[int] = []
    span = {H.identity}
    for g in range(n):
        if g not in span:
            gens.append(g)
            span = set(_closure(H, span | {g}))
    chars = []

    def extend(k, assign):
        if k == len(gens):
            values = {H.identity: Fraction(0)}
            frontier = [H.identity]
            while frontier:
                nxt = []
                for x in frontier:
                    for s, v in zip(gens, assign):
                        y = H.mul(s, x)
                        val = (values[x] + v) % 1
                        if y not in values:
                            values[y] = val
                            nxt.append(y)
                        elif values[y] != val:
                            return
                frontier = nxt
            if all((values[H.mul(a, b)] - values[a] - values[b]) % 1 == 0 for a in range(n) for b in range(n)):
                chars.append(tuple(values[g] for g in range(n)))
            return
        o = H.element_order(gens[k])
        for e in range(o):
            extend(k + 1, assign + [Fraction(e, o)])

    extend(0, [])
    return sorted(set(chars))


def _closure(H: FiniteGroup, elems):
    out = set(elems)
    frontier = list(out)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(out):
                for c in (H.mul(a, b), H.mul(b, a)):
                    if c not in out:
                        out.add(c)
                        nxt.append(c)
        frontier = nxt
    return out


@dataclass(frozen=True)
class CharacterTable:
    label: str
    values: tuple[tuple[complex, ...], ...]   # one row per irreducible, over subgroup members in order


def character_table(H: Subgroup, supplied: Mapping[tuple[int, ...], Sequence[Sequence]] | None = None) -> CharacterTable:
    """Computed for abelian subgroups, otherwise taken from ``supplied``."""
    K, _ = H.as_group()
    if supplied is not None and H.members in supplied:
        rows = [tuple(_to_complex(v) for v in row) for row in supplied[H.members]]
        canon = [[(round(z.real, 6) + 0.0, round(z.imag, 6) + 0.0) for z in row] for row in rows]
        return CharacterTable("R" + json.dumps(canon, separators=(",", ":")), tuple(rows))
    if not K.is_abelian:
        raise MissingCharacterData("no character table for a non-abelian subgroup", witness=H.members)
    chars = _abelian_characters(K)
    label = "R" + json.dumps([[str(v) for v in row] for row in chars], separators=(",", ":"))
    return CharacterTable(label, tuple(tuple(cmath.exp(2j * cmath.pi * float(v)) for v in row) for row in chars))


def _to_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def representation_system(G: FiniteGroup, characters: Mapping | None = None,
                          category: OrbitCategory | None = None) -> CoefficientSystem:
    """R_G: G/H -> R(H), maps by restriction and conjugation of characters."""
    cat = category or build_orbit_category(G)
    tables = [character_table(H, characters) for H in cat.objects]
    vals = [FGAbGroup(t.label, len(t.values)) for t in tables]
    maps = {}
    for (i, j, a) in cat.morphisms():
        H, H2 = cat.objects[i], cat.objects[j]
        pos2 = {m: k for k, m in enumerate(H2.members)}
        ainv = G.inv(a)
        M = zeros(len(tables[i].values), len(tables[j].values))
        for c, chi2 in enumerate(tables[j].values):
            # chi2 pulled back along h -> a⁻¹ h a, restricted to H
            psi = [chi2[pos2[G.conj(ainv, h)]] for h in H.members]
            for r, chi in enumerate(tables[i].values):
                ip = sum(p * z.conjugate() for p, z in zip(psi, chi)) / len(H)
                m = round(ip.real)
                if abs(ip - m) > 1e-6 or m < 0:
                    raise MissingCharacterData("character data is not consistent", witness=(H.members, H2.members))
                M[r, c] = m
        maps[(i, j, a)] = M
    return CoefficientSystem(cat, vals, maps, "R").check()


# -- presentation comparison ----------------------------------------------

@dataclass(frozen=True)
class StepReport:
    map: str
    direction: str
    form: str
    left: list[FGAbGroup]
    right: list[FGAbGroup]


def map_form(m) -> str:
    if m.hom.is_injective:
        return "inclusion"
    if m.hom.is_surjective:
        return "quotient"
    raise PathInvalid("map is neither of quotient nor of inclusion form")


def transport_along(m, A: CoefficientSystem, direction: str) -> tuple[GComplex, CoefficientSystem]:
    """Move (space, system) across one essential equivalence of quotient or inclusion form."""
    from .gpd import is_essential_equivalence
    cert = is_essential_equivalence(m)
    if not cert:
        raise PathInvalid(f"step is not an essential equivalence: {cert.reason}")
    form = map_form(m)
    if direction == "backward":
        if A.group is not m.target.group:
            raise PathInvalid("system does not live on the target of the step")
        B = pullback_quotient(A, m.hom) if form == "quotient" else pullback_inclusion(A, m.hom)
        return m.source, B
    if direction != "forward":
        raise PathInvalid(f"unknown direction {direction!r}")
    if A.group is not m.source.group:
        raise PathInvalid("system does not live on the source of the step")
    if form == "inclusion":
        return m.target, pushforward_inclusion(A, m.hom, m.source)
    K = Subgroup(m.source.group, (g for g in range(m.source.group.order) if m.hom(g) == m.target.group.identity))
    B = pushforward_quotient(A, K, m.source)
    Q, pi = quotient_group(m.source.group, K)
    bar = [0] * Q.order
    for g in range(m.source.group.order):
        bar[pi(g)] = m.hom(g)
    return m.target, transfer_system(B, GroupHom(Q, m.target.group, tuple(bar)))


def compare_presentations(p1: BredonInput, p2: BredonInput, path: Sequence[tuple[str, object, str]],
                          top: int = 2, oracle: bool = False) -> list[StepReport]:
    """Walk ``path`` (name, map, direction) from p1 to p2 and compare cohomology at each step."""
    engine = hom_oracle if oracle else bredon_cohomology
    X, A = p1.space, p1.system
    reports = []
    for name, m, direction in path:
        Y, B = transport_along(m, A, direction)
        left = engine(BredonInput(X, A), top)
        right = engine(BredonInput(Y, B), top)
        for n, (g1, g2) in enumerate(zip(left, right)):
            if g1.iso_class != g2.iso_class:
                raise IsomorphismFailure(f"degree {n} differs across {name}",
                                         witness={"degree": n, "left": g1.describe(), "right": g2.describe()})
        reports.append(StepReport(name, direction, map_form(m), left, right))
        X, A = Y, B
    if X is not p2.space:
        raise PathInvalid("path does not end at the right-hand groupoid")
    if not systems_equal(restrict_system(A, X), restrict_system(p2.system, X)):
        raise PathInvalid("transported system differs from the right-hand system on the lineage")
    if not path:
        left = engine(p1, top)
        right = engine(p2, top)
        for n, (g1, g2) in enumerate(zip(left, right)):
            if g1.iso_class != g2.iso_class:
                raise IsomorphismFailure(f"degree {n} differs", witness={"degree": n})
        reports.append(StepReport("identity", "forward", "identity", left, right))
    return reports
