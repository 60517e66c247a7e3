"""Finitely generated abelian groups, Smith normal form, integer cochain complexes.

Matrices are numpy ``object`` arrays of Python ints so nothing overflows.
A group ``Z^r + Z/t1 + ... + Z/tk`` is presented on ``r + k`` generators
(free ones first); homomorphisms are integer matrices on those generators,
columns indexed by the source.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError, NotAComplex


def int_matrix(rows, nrows: int | None = None, ncols: int | None = None) -> np.ndarray:
    """Object-dtype integer matrix; ``nrows``/``ncols`` fix the shape of empty input."""
    rows = [[int(v) for v in r] for r in rows]
    if nrows is None:
        nrows = len(rows)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    out = np.zeros((nrows, ncols), dtype=object)
    out[:, :] = 0
    for i, r in enumerate(rows):
        if len(r) != ncols:
            raise InputError("ragged matrix", witness=i)
        out[i, :] = r
    return out


def zeros(nrows: int, ncols: int) -> np.ndarray:
    out = np.empty((nrows, ncols), dtype=object)
    out[:, :] = 0
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def as_int_matrix(M) -> np.ndarray:
    if isinstance(M, np.ndarray) and M.dtype == object and M.ndim == 2:
        return M
    arr = np.asarray(M)
    if arr.ndim != 2:
        raise InputError("matrix must be 2-dimensional", witness=arr.shape)
    return int_matrix(arr.tolist(), arr.shape[0], arr.shape[1])


def matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape[1] != B.shape[0]:
        raise InputError("matrix shapes do not chain", witness=(A.shape, B.shape))
    if A.shape[0] == 0 or B.shape[1] == 0 or A.shape[1] == 0:
        return zeros(A.shape[0], B.shape[1])
    return A.dot(B)


def block_matrix(blocks: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    rows = [np.concatenate(r, axis=1) if r else None for r in blocks]
    return np.concatenate(rows, axis=0)


# -- Smith normal form ---------------------------------------------------

def _eye(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _snf(M, inverses: bool):
    A = [list(r) for r in M.tolist()] if M.size else [[] for _ in range(M.shape[0])]
    m, n = M.shape
    U, V = _eye(m), _eye(n)
    Ui = _eye(m) if inverses else None
    Vi = _eye(n) if inverses else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        if inverses:
            for r in Ui:
                r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        if inverses:
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        if q == 0:
            return
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]
        if inverses:
            for r in Ui:
                r[src] -= q * r[dst]

    def add_col(dst, src, q):
        # col_dst += q * col_src
        if q == 0:
            return
        for r in A:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]
        if inverses:
            Vi[src] = [a - q * b for a, b in zip(Vi[src], Vi[dst])]

    t = 0
    while t < min(m, n):
        while True:
            best = None
            for i in range(t, m):
                row = A[i]
                for j in range(t, n):
                    v = row[j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
            if any(A[i][t] for i in range(t + 1, m)) or any(A[t][j] for j in range(t + 1, n)):
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if best is None:
            break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
            if inverses:
                for r in Ui:
                    r[t] = -r[t]
        t += 1

    S = int_matrix(A, m, n)
    out = (S, int_matrix(U, m, m), int_matrix(V, n, n))
    if inverses:
        out += (int_matrix(Ui, m, m), int_matrix(Vi, n, n))
    return out


def smith_normal_form(M) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (S, U, V) with S = U M V, U and V unimodular, S diagonal with d1 | d2 | ...

    Pivot: smallest absolute nonzero entry of the remaining block, ties broken
    by row-major position.
    """
    return _snf(as_int_matrix(M), inverses=False)


def diagonal(S: np.ndarray) -> list[int]:
    return [int(S[i, i]) for i in range(min(S.shape)) if S[i, i] != 0]


def invariant_factors(M) -> list[int]:
    return diagonal(smith_normal_form(M)[0])


def rank(M) -> int:
    return len(invariant_factors(M))


def kernel_basis(M) -> np.ndarray:
    """Columns form a Z-basis of {x : M x = 0}."""
    M = as_int_matrix(M)
    S, U, V = smith_normal_form(M)
    r = len(diagonal(S))
    return V[:, r:].copy()


def lattice_basis(gens: np.ndarray) -> np.ndarray:
    """Columns form a Z-basis of the lattice spanned by the columns of ``gens``."""
    gens = as_int_matrix(gens)
    if gens.shape[1] == 0:
        return zeros(gens.shape[0], 0)
    S, U, V, Ui, Vi = _snf(gens, inverses=True)
    d = diagonal(S)
    out = zeros(gens.shape[0], len(d))
    for i, s in enumerate(d):
        out[:, i] = Ui[:, i] * s
    return out


def kernel_mod(M, R) -> np.ndarray:
    """Basis of {x : M x lies in the column span of R}."""
    M, R = as_int_matrix(M), as_int_matrix(R)
    c = M.shape[1]
    if M.shape[0] == 0:
        return identity(c)
    if R.shape[1] == 0:
        return kernel_basis(M)
    K = kernel_basis(np.concatenate([M, R], axis=1))
    return lattice_basis(K[:c, :])


def subquotient(Z, B, label=None) -> "FGAbGroup":
    """span(Z) / span(B) for a basis Z and generators B lying inside span(Z)."""
    Z, B = as_int_matrix(Z), as_int_matrix(B)
    k = Z.shape[1]
    if k == 0:
        return FGAbGroup.zero(label)
    if B.shape[1] == 0:
        return FGAbGroup(label, k, ())
    S, U, V = smith_normal_form(Z)
    d = diagonal(S)
    if len(d) != k:
        raise InputError("subquotient: Z columns are not independent")
    Y = matmul(U, B)
    if any(Y[i, j] != 0 for i in range(k, Y.shape[0]) for j in range(Y.shape[1])):
        raise InputError("subquotient: B is not contained in span(Z)")
    W = zeros(k, B.shape[1])
    for i, s in enumerate(d):
        for j in range(B.shape[1]):
            q, rem = divmod(Y[i, j], s)
            if rem:
                raise InputError("subquotient: B is not contained in span(Z)")
            W[i, j] = q
    C = matmul(V, W)
    return FGAbGroup.from_invariants(invariant_factors(C) + [0] * (k - rank(C)), label)


# -- groups --------------------------------------------------------------

@dataclass(frozen=True)
class FGAbGroup:
    """Z^rank + sum of Z/t. ``label`` is identity, (rank, torsion) is the iso class."""

    label: object
    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        t = tuple(int(v) for v in self.torsion)
        object.__setattr__(self, "torsion", t)
        if self.rank < 0:
            raise InputError("negative rank", witness=self.rank)
        for a, b in zip(t, t[1:]):
            if b % a:
                raise InputError("torsion must form a divisor chain", witness=(a, b))
        if any(v < 2 for v in t):
            raise InputError("torsion coefficients must be >= 2", witness=t)

    @staticmethod
    def zero(label=None) -> "FGAbGroup":
        return FGAbGroup(label, 0, ())

    @staticmethod
    def free(n: int, label=None) -> "FGAbGroup":
        return FGAbGroup(label, n, ())

    @staticmethod
    def from_invariants(diag: Sequence[int], label=None) -> "FGAbGroup":
        """Group presented as the cokernel of diag(d_i); zeros count toward the rank."""
        r = sum(1 for d in diag if d == 0)
        tors = sorted(abs(int(d)) for d in diag if abs(int(d)) > 1)
        # regroup to a divisor chain via SNF of the diagonal
        if tors:
            tors = [d for d in invariant_factors(_diag(tors)) if d > 1]
        return FGAbGroup(label, r, tuple(tors))

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def iso_class(self) -> tuple[int, tuple[int, ...]]:
        return (self.rank, self.torsion)

    @property
    def is_zero(self) -> bool:
        return self.ngens == 0

    def is_isomorphic(self, other: "FGAbGroup") -> bool:
        return self.iso_class == other.iso_class

    def orders(self) -> list[int]:
        """Order of each generator (0 for free)."""
        return [0] * self.rank + list(self.torsion)

    def relations(self) -> np.ndarray:
        R = zeros(self.ngens, len(self.torsion))
        for j, t in enumerate(self.torsion):
            R[self.rank + j, j] = t
        return R

    def reduce(self, M: np.ndarray) -> np.ndarray:
        """Canonical form of a matrix whose rows index this group's generators."""
        M = as_int_matrix(M).copy()
        for j, t in enumerate(self.torsion):
            M[self.rank + j, :] = [v % t for v in M[self.rank + j, :]]
        return M

    def equal_maps(self, M1, M2) -> bool:
        return bool((self.reduce(M1) == self.reduce(M2)).all())

    def describe(self) -> str:
        parts = ["Z" if self.rank == 1 else f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class CyclicSum:
    """Direct sum of cyclic groups, one per generator; order 0 means Z.

    Used for cochain groups, where summands keep their own generators and
    the torsion need not form a divisor chain.
    """

    orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(t) for t in self.orders))
        if any(t < 0 or t == 1 for t in self.orders):
            raise InputError("generator orders must be 0 or >= 2", witness=self.orders)

    @property
    def ngens(self) -> int:
        return len(self.orders)

    def relations(self) -> np.ndarray:
        tors = [(i, t) for i, t in enumerate(self.orders) if t]
        R = zeros(self.ngens, len(tors))
        for j, (i, t) in enumerate(tors):
            R[i, j] = t
        return R

    def reduce(self, M: np.ndarray) -> np.ndarray:
        M = as_int_matrix(M).copy()
        for i, t in enumerate(self.orders):
            if t:
                M[i, :] = [v % t for v in M[i, :]]
        return M

    def iso_class(self) -> tuple[int, tuple[int, ...]]:
        return FGAbGroup.from_invariants(self.orders).iso_class


def direct_sum(groups: Sequence) -> CyclicSum:
    orders: list[int] = []
    for g in groups:
        orders += list(g.orders() if isinstance(g, FGAbGroup) else g.orders)
    return CyclicSum(tuple(orders))


def _diag(values):
    D = zeros(len(values), len(values))
    for i, v in enumerate(values):
        D[i, i] = v
    return D


def is_well_defined(M, source: FGAbGroup, target: FGAbGroup) -> bool:
    """Whether the generator matrix M respects the relations of ``source``."""
    M = as_int_matrix(M)
    if M.shape != (target.ngens, source.ngens):
        return False
    for j, t in enumerate(source.torsion):
        col = M[:, source.rank + j] * t
        if not target.equal_maps(col.reshape(-1, 1), zeros(target.ngens, 1)):
            return False
    return True


# -- cochain complexes ---------------------------------------------------

@dataclass(frozen=True)
class CochainComplex:
    """C^0 -> C^1 -> ...; ``differentials[n]`` is d^n : C^n -> C^(n+1).

    Degrees are FGAbGroup or CyclicSum presentations.
    """

    groups: tuple
    differentials: tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        ds = tuple(as_int_matrix(d) for d in self.differentials)
        object.__setattr__(self, "differentials", ds)
        if len(ds) != max(len(self.groups) - 1, 0):
            raise InputError("need one differential between consecutive degrees")
        for n, d in enumerate(ds):
            if d.shape != (self.groups[n + 1].ngens, self.groups[n].ngens):
                raise InputError("differential shape does not chain", witness=(n, d.shape))

    @staticmethod
    def from_ranks(ranks: Sequence[int], differentials: Sequence) -> "CochainComplex":
        return CochainComplex(tuple(FGAbGroup.free(r) for r in ranks), tuple(differentials))

    @property
    def ranks(self) -> list[int]:
        return [g.ngens for g in self.groups]

    def check(self) -> None:
        for n in range(len(self.differentials) - 1):
            prod = matmul(self.differentials[n + 1], self.differentials[n])
            red = self.groups[n + 2].reduce(prod)
            nz = np.argwhere(red != 0)
            if len(nz):
                i, j = (int(v) for v in nz[0])
                raise NotAComplex(f"d^{n + 1} d^{n} != 0", witness=(n, i, j, int(prod[i, j])))


def cohomology_of_complex(C: CochainComplex) -> list[FGAbGroup]:
    """H^n = ker d^n / im d^(n-1), degree by degree."""
    C.check()
    out = []
    N = len(C.groups)
    for n in range(N):
        g = C.groups[n]
        if n < N - 1:
            Z = kernel_mod(C.differentials[n], C.groups[n + 1].relations())
        else:
            Z = identity(g.ngens)
        parts = [g.relations()]
        if n > 0:
            parts.append(C.differentials[n - 1])
        B = np.concatenate(parts, axis=1) if parts else zeros(g.ngens, 0)
        out.append(subquotient(Z, B, label=f"H{n}"))
    return out
