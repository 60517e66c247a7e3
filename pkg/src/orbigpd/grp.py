"""Finite groups as multiplication tables.

Elements are integer indices ``0..order-1``. Everything here is immutable
and deterministic: subgroup lists, coset representatives and quotient
labellings always use least element indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import AxiomViolation, NotNormal, PreconditionFailed, ResourceLimit

DEFAULT_MAX_ORDER = 64
_max_order = DEFAULT_MAX_ORDER


def set_max_order(n: int) -> None:
    """Bound on group orders accepted by subgroup enumeration and permutation closure."""
    global _max_order
    _max_order = int(n)


def max_order() -> int:
    return _max_order


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    order: int
    table: np.ndarray
    identity: int
    element_names: tuple[str, ...] | None = None
    inverse: np.ndarray = field(repr=False, default=None)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def conj(self, g: int, h: int) -> int:
        """g h g^-1"""
        return int(self.table[self.table[g, h], self.inverse[g]])

    def name(self, a: int) -> str:
        return self.element_names[a] if self.element_names else str(a)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    @cached_property
    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    @cached_property
    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, (self.identity,))

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)))

    def subgroups(self) -> list["Subgroup"]:
        return enumerate_subgroups(self)

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


class Subgroup:
    """A subgroup given by its sorted member indices; equality is by parent identity and members."""

    __slots__ = ("parent", "members", "_set", "_hash", "_normal")

    def __init__(self, parent: FiniteGroup, members: Iterable[int]):
        self.parent = parent
        self.members = tuple(sorted(int(m) for m in set(members)))
        self._set = frozenset(self.members)
        self._hash = hash((id(parent), self.members))
        self._normal = None

    def __contains__(self, g):
        return g in self._set

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.parent is self.parent and other.members == self.members

    def __hash__(self):
        return self._hash

    def __le__(self, other: "Subgroup"):
        return self._set <= other._set

    def __lt__(self, other: "Subgroup"):
        return self._set < other._set

    def __repr__(self):
        if self.parent.element_names:
            return "<" + ",".join(self.parent.name(m) for m in self.members) + ">"
        return f"Subgroup{self.members}"

    @property
    def sort_key(self):
        return (len(self.members), self.members)

    @property
    def is_normal(self) -> bool:
        if self._normal is None:
            self._normal = normality_witness(self) is None
        return self._normal

    def conjugate(self, g: int) -> "Subgroup":
        """g S g^-1"""
        G = self.parent
        return Subgroup(G, (G.conj(g, s) for s in self.members))

    def intersect(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.parent, self._set & other._set)

    def join(self, other: "Subgroup") -> "Subgroup":
        return generated_subgroup(self.parent, self.members + other.members)

    def normalizer(self) -> "Subgroup":
        G = self.parent
        return Subgroup(G, (g for g in range(G.order) if self.conjugate(g) == self))

    def left_coset_reps(self) -> list[int]:
        """Least-index representative of each left coset gS, sorted."""
        G = self.parent
        seen, reps = set(), []
        for g in range(G.order):
            if g in seen:
                continue
            reps.append(g)
            seen.update(G.mul(g, s) for s in self.members)
        return reps

    def coset_rep(self, g: int) -> int:
        """Least element of gS."""
        G = self.parent
        return min(G.mul(g, s) for s in self.members)

    def as_group(self) -> tuple[FiniteGroup, "GroupHom"]:
        """The subgroup as a standalone group; element i is ``members[i]`` (order-preserving).

        Cached on the parent so repeated calls return the same group object.
        """
        G = self.parent
        cache = G.__dict__.setdefault("_as_group_cache", {})
        if self.members in cache:
            return cache[self.members]
        pos = {m: i for i, m in enumerate(self.members)}
        table = [[pos[G.mul(a, b)] for b in self.members] for a in self.members]
        names = tuple(G.name(m) for m in self.members) if G.element_names else None
        H = build_group(table, names)
        cache[self.members] = (H, GroupHom(H, G, self.members))
        return cache[self.members]


@dataclass(frozen=True, eq=False)
class GroupHom:
    domain: FiniteGroup
    codomain: FiniteGroup
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(v) for v in self.map))
        if len(self.map) != self.domain.order:
            raise AxiomViolation("hom map has wrong length", witness=len(self.map))
        D, C = self.domain, self.codomain
        arr = np.array(self.map)
        if arr.min(initial=0) < 0 or arr.max(initial=0) >= C.order:
            raise AxiomViolation("hom value out of range")
        bad = np.argwhere(arr[D.table] != C.table[np.ix_(arr, arr)])
        if len(bad):
            a, b = (int(v) for v in bad[0])
            raise AxiomViolation("not a homomorphism", witness=(a, b))

    def __call__(self, g: int) -> int:
        return self.map[g]

    def __eq__(self, other):
        return (isinstance(other, GroupHom) and other.domain is self.domain
                and other.codomain is self.codomain and other.map == self.map)

    def __hash__(self):
        return hash((id(self.domain), id(self.codomain), self.map))

    def then(self, other: "GroupHom") -> "GroupHom":
        """``other`` after ``self``."""
        if other.domain is not self.codomain:
            raise PreconditionFailed("homs not composable")
        return GroupHom(self.domain, other.codomain, tuple(other.map[v] for v in self.map))

    @property
    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.codomain.order

    def image_of(self, S: Subgroup) -> Subgroup:
        return Subgroup(self.codomain, (self.map[s] for s in S.members))

    def preimage_of(self, S: Subgroup) -> Subgroup:
        return Subgroup(self.domain, (g for g in range(self.domain.order) if self.map[g] in S))

    @staticmethod
    def identity(G: FiniteGroup) -> "GroupHom":
        return GroupHom(G, G, tuple(range(G.order)))

    @staticmethod
    def trivial(G: FiniteGroup, H: FiniteGroup) -> "GroupHom":
        return GroupHom(G, H, (H.identity,) * G.order)


def build_group(table: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> FiniteGroup:
    """Validate a multiplication table and wrap it.

    Raises AxiomViolation naming the failed axiom; the witness is the offending
    element or triple.
    """
    t = np.array(table, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise AxiomViolation("shape: table must be a non-empty square array", witness=t.shape)
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise AxiomViolation("range: entries must be element indices")
    if names is not None and len(names) != n:
        raise AxiomViolation("names: one name per element required", witness=len(names))
    ids = [e for e in range(n) if (t[e] == np.arange(n)).all() and (t[:, e] == np.arange(n)).all()]
    if not ids:
        raise AxiomViolation("identity: no two-sided identity")
    e = ids[0]
    inverse = np.full(n, -1, dtype=np.int64)
    for a in range(n):
        right = np.flatnonzero(t[a] == e)
        cands = [int(b) for b in right if t[b, a] == e]
        if not cands:
            raise AxiomViolation("inverse", witness=a)
        inverse[a] = cands[0]
    w = _kernels.assoc_violation(t)
    if w is not None:
        raise AxiomViolation("associativity", witness=w)
    return FiniteGroup(n, _frozen(t), e, tuple(names) if names is not None else None, _frozen(inverse))


def group_from_permutations(generators: Sequence[Sequence[int]], names: Sequence[str] | None = None,
                            max_order: int | None = None) -> tuple[FiniteGroup, list[tuple[int, ...]]]:
    """Close permutation generators into a table.

    Returns the group and the permutation of each element. Element 0 is the
    identity and generator ``i`` is the element reached first by BFS.
    """
    if max_order is None:
        max_order = _max_order
    if not generators:
        return build_group([[0]], names), [()]
    deg = len(generators[0])
    ident = tuple(range(deg))
    gens = [tuple(int(v) for v in g) for g in generators]
    for g in gens:
        if sorted(g) != list(ident):
            raise AxiomViolation("generator is not a permutation", witness=g)
    elems = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[p[i]] for i in range(deg))  # g after p
                if q not in index:
                    if len(elems) >= max_order:
                        raise ResourceLimit(f"group order exceeds bound {max_order}")
                    index[q] = len(elems)
                    elems.append(q)
                    nxt.append(q)
        frontier = nxt
    n = len(elems)
    table = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            table[i, j] = index[tuple(a[b[k]] for k in range(deg))]
    return build_group(table, names), elems


def cyclic_group(n: int) -> FiniteGroup:
    return build_group([[(a + b) % n for b in range(n)] for a in range(n)])


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Element ``g * |H| + h`` is the pair (g, h). Cached per (G, H) pair."""
    cache = G.__dict__.setdefault("_product_cache", {})
    if id(H) in cache:
        return cache[id(H)][1]
    n, m = G.order, H.order
    g, h = np.divmod(np.arange(n * m), m)
    table = G.table[g[:, None], g[None, :]] * m + H.table[h[:, None], h[None, :]]
    inverse = G.inverse[g] * m + H.inverse[h]
    names = None
    if G.element_names or H.element_names:
        names = tuple(f"({G.name(a)},{H.name(b)})" for a in range(n) for b in range(m))
    # axioms hold by construction, so skip the cubic associativity check
    P = FiniteGroup(n * m, _frozen(table), G.identity * m + H.identity, names, _frozen(inverse))
    cache[id(H)] = (H, P)
    return cache[id(H)][1]


def product_projections(G: FiniteGroup, H: FiniteGroup, GH: FiniteGroup) -> tuple[GroupHom, GroupHom]:
    m = H.order
    return (GroupHom(GH, G, tuple(x // m for x in range(GH.order))),
            GroupHom(GH, H, tuple(x % m for x in range(GH.order))))


def generated_subgroup(G: FiniteGroup, elements: Iterable[int]) -> Subgroup:
    mask = np.zeros(G.order, dtype=np.bool_)
    mask[G.identity] = True
    for g in elements:
        mask[int(g)] = True
    return Subgroup(G, np.flatnonzero(_kernels.closure(G.table, mask)).tolist())


def enumerate_subgroups(G: FiniteGroup, max_order: int | None = None) -> list[Subgroup]:
    """All subgroups, each once, sorted by (size, members)."""
    if max_order is None:
        max_order = _max_order
    if G.order > max_order:
        raise ResourceLimit(f"group order {G.order} exceeds bound {max_order}", witness=G.order)
    cache = G.__dict__.setdefault("_subgroup_cache", None)
    if cache is not None:
        return list(cache)
    table = G.table
    start = np.zeros(G.order, dtype=np.bool_)
    start[G.identity] = True
    found = {start.tobytes(): start}
    frontier = [start]
    while frontier:
        nxt = []
        for mask in frontier:
            for g in range(G.order):
                if mask[g]:
                    continue
                ext = mask.copy()
                ext[g] = True
                ext = _kernels.closure(table, ext)
                key = ext.tobytes()
                if key not in found:
                    found[key] = ext
                    nxt.append(ext)
        frontier = nxt
    subs = sorted((Subgroup(G, np.flatnonzero(m).tolist()) for m in found.values()), key=lambda s: s.sort_key)
    G.__dict__["_subgroup_cache"] = tuple(subs)
    return subs


def normality_witness(K: Subgroup) -> int | None:
    """Some g with g K g^-1 != K, or None when K is normal."""
    for g in range(K.parent.order):
        if K.conjugate(g) != K:
            return g
    return None


def quotient_group(G: FiniteGroup, K: Subgroup) -> tuple[FiniteGroup, GroupHom]:
    """G/K with the projection. Cosets are ordered by their least element.

    Cached on G, so the same quotient object comes back for the same K.
    """
    cache = G.__dict__.setdefault("_quotient_cache", {})
    if K.members in cache:
        return cache[K.members]
    w = normality_witness(K)
    if w is not None:
        raise NotNormal("subgroup is not normal", witness=w)
    reps = K.left_coset_reps()
    index = {}
    for i, r in enumerate(reps):
        for k in K.members:
            index[G.mul(r, k)] = i
    table = [[index[G.mul(a, b)] for b in reps] for a in reps]
    names = [f"{G.name(r)}K" for r in reps] if G.element_names else None
    Q = build_group(table, names)
    cache[K.members] = (Q, GroupHom(G, Q, tuple(index[g] for g in range(G.order))))
    return cache[K.members]


def analyze_hom(phi: GroupHom) -> tuple[Subgroup, Subgroup]:
    """(kernel, image)."""
    e = phi.codomain.identity
    kernel = Subgroup(phi.domain, (g for g in range(phi.domain.order) if phi.map[g] == e))
    return kernel, Subgroup(phi.codomain, set(phi.map))


def check_conjugation_triviality(G: FiniteGroup, K: Subgroup, H: Subgroup) -> bool:
    """True iff every k in K normalizing H centralizes it.

    Under the preconditions (K normal, K and H meeting trivially) this always
    holds, so a False return is a counterexample to the underlying lemma.
    """
    if K.parent is not G or H.parent is not G:
        raise PreconditionFailed("subgroups must belong to G")
    if not K.is_normal:
        raise PreconditionFailed("K is not normal", witness=normality_witness(K))
    if len(K.intersect(H)) != 1:
        raise PreconditionFailed("K and H intersect nontrivially", witness=K.intersect(H).members)
    for k in K.members:
        if H.conjugate(k) != H:
            continue
        if any(G.conj(k, h) != h for h in H.members):
            return False
    return True
