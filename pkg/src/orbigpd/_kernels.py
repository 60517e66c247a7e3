"""Hot integer kernels.

Each kernel has a numba ``@njit`` body and a pure-numpy twin with identical
output. Set ``ORBIGPD_DISABLE_NUMBA=1`` to force the numpy path (also used
automatically when numba cannot be imported). All inputs are int64 arrays.
"""
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("ORBIGPD_DISABLE_NUMBA", "") not in ("1", "true", "yes")


# -- associativity -------------------------------------------------------

def _assoc_violation_py(table):
    n = table.shape[0]
    for a in range(n):
        # (a*b)*c vs a*(b*c) over all (b, c) at once
        left = table[table[a]]          # left[b, c] = (a*b)*c
        right = table[a][table]         # right[b, c] = a*(b*c)
        bad = np.argwhere(left != right)
        if len(bad):
            b, c = bad[0]
            return np.array([a, b, c], dtype=np.int64)
    return np.array([-1, -1, -1], dtype=np.int64)


def _assoc_violation_nb(table):
    n = table.shape[0]
    out = np.full(3, -1, dtype=np.int64)
    for a in range(n):
        for b in range(n):
            ab = table[a, b]
            for c in range(n):
                if table[ab, c] != table[a, table[b, c]]:
                    out[0] = a
                    out[1] = b
                    out[2] = c
                    return out
    return out


# -- subgroup closure ----------------------------------------------------

def _closure_py(table, mask):
    mask = mask.copy()
    while True:
        members = np.flatnonzero(mask)
        prods = table[np.ix_(members, members)].ravel()
        new = mask.copy()
        new[prods] = True
        if new.sum() == mask.sum():
            return mask
        mask = new


def _closure_nb(table, mask):
    n = table.shape[0]
    mask = mask.copy()
    members = np.empty(n, dtype=np.int64)
    changed = True
    while changed:
        changed = False
        m = 0
        for i in range(n):
            if mask[i]:
                members[m] = i
                m += 1
        for i in range(m):
            for j in range(m):
                p = table[members[i], members[j]]
                if not mask[p]:
                    mask[p] = True
                    changed = True
    return mask


# -- orbits --------------------------------------------------------------

def _orbit_labels_py(action):
    n = action.shape[1]
    labels = np.full(n, -1, dtype=np.int64)
    for x in range(n):
        if labels[x] < 0:
            labels[np.unique(action[:, x])] = x
    return labels


def _orbit_labels_nb(action):
    ng, n = action.shape
    labels = np.full(n, -1, dtype=np.int64)
    for x in range(n):
        if labels[x] < 0:
            for g in range(ng):
                labels[action[g, x]] = x
    return labels


# -- action axioms -------------------------------------------------------

def _action_violation_py(action, table):
    # action[table[a, b]] == action[a][action[b]] for all a, b
    n = table.shape[0]
    for a in range(n):
        lhs = action[table[a]]           # lhs[b, x]
        rhs = action[a][action]          # rhs[b, x]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            b, x = bad[0]
            return np.array([a, b, x], dtype=np.int64)
    return np.array([-1, -1, -1], dtype=np.int64)


def _action_violation_nb(action, table):
    n = table.shape[0]
    m = action.shape[1]
    out = np.full(3, -1, dtype=np.int64)
    for a in range(n):
        for b in range(n):
            ab = table[a, b]
            for x in range(m):
                if action[ab, x] != action[a, action[b, x]]:
                    out[0] = a
                    out[1] = b
                    out[2] = x
                    return out
    return out


# -- full faithfulness ---------------------------------------------------

def _faithful_violation_py(src_action, tgt_action, hom, fmap):
    """First (x, x2, h, count) where |{g : g x = x2, hom(g) = h}| differs from
    [h f(x) = f(x2)]; all -1 when the transporter map is bijective everywhere."""
    nh = tgt_action.shape[0]
    nx = src_action.shape[1]
    for x in range(nx):
        counts = np.zeros((nx, nh), dtype=np.int64)
        np.add.at(counts, (src_action[:, x], hom), 1)
        expected = (tgt_action[:, fmap[x]][None, :] == fmap[:, None]).astype(np.int64)
        bad = np.argwhere(counts != expected)
        if len(bad):
            x2, h = bad[0]
            return np.array([x, x2, h, counts[x2, h]], dtype=np.int64)
    return np.array([-1, -1, -1, -1], dtype=np.int64)


def _faithful_violation_nb(src_action, tgt_action, hom, fmap):
    ng, nx = src_action.shape
    nh = tgt_action.shape[0]
    out = np.full(4, -1, dtype=np.int64)
    counts = np.zeros((nx, nh), dtype=np.int64)
    for x in range(nx):
        counts[:, :] = 0
        for g in range(ng):
            counts[src_action[g, x], hom[g]] += 1
        fx = fmap[x]
        for x2 in range(nx):
            fx2 = fmap[x2]
            for h in range(nh):
                exp = 1 if tgt_action[h, fx] == fx2 else 0
                if counts[x2, h] != exp:
                    out[0] = x
                    out[1] = x2
                    out[2] = h
                    out[3] = counts[x2, h]
                    return out
    return out


numpy_impl = {
    "assoc_violation": _assoc_violation_py,
    "closure": _closure_py,
    "orbit_labels": _orbit_labels_py,
    "action_violation": _action_violation_py,
    "faithful_violation": _faithful_violation_py,
}

if HAVE_NUMBA:
    numba_impl = {
        "assoc_violation": njit(cache=True)(_assoc_violation_nb),
        "closure": njit(cache=True)(_closure_nb),
        "orbit_labels": njit(cache=True)(_orbit_labels_nb),
        "action_violation": njit(cache=True)(_action_violation_nb),
        "faithful_violation": njit(cache=True)(_faithful_violation_nb),
    }
else:  # pragma: no cover
    numba_impl = dict(numpy_impl)

_active = numba_impl if USE_NUMBA else numpy_impl


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def assoc_violation(table):
    w = _active["assoc_violation"](_i64(table))
    return None if w[0] < 0 else tuple(int(v) for v in w)


def closure(table, mask):
    return _active["closure"](_i64(table), np.ascontiguousarray(mask, dtype=np.bool_))


def orbit_labels(action):
    return _active["orbit_labels"](_i64(action))


def action_violation(action, table):
    w = _active["action_violation"](_i64(action), _i64(table))
    return None if w[0] < 0 else tuple(int(v) for v in w)


def faithful_violation(src_action, tgt_action, hom, fmap):
    w = _active["faithful_violation"](_i64(src_action), _i64(tgt_action), _i64(hom), _i64(fmap))
    return None if w[0] < 0 else tuple(int(v) for v in w)
