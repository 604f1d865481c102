"""Hot inner loops: component labelling, s-t backbone, exhaustive connection tables.

Each kernel exists twice: a numba ``@njit`` version and a fallback that uses
only numpy (vectorised where the algorithm allows, plain Python loops where it
does not).  The fallback is selected when ``SLABPERC_DISABLE_NUMBA`` is set to
a truthy value or numba cannot be imported.  Both paths return identical
output, which ``tests/test_kernels.py`` checks and ``benchmarks/`` times.
"""
import os

import numpy as np

_DISABLED = os.environ.get("SLABPERC_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not _DISABLED


def _njit(fn):
    if not HAS_NUMBA:  # pragma: no cover
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# component labelling
# ---------------------------------------------------------------------------

def _label_loop(n, u, v, bond_open, site_mask):
    parent = np.arange(n)
    for j in range(u.shape[0]):
        if not bond_open[j]:
            continue
        a = u[j]
        b = v[j]
        if not (site_mask[a] and site_mask[b]):
            continue
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
    labels = np.full(n, -1, dtype=np.int64)
    rep = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        if not site_mask[i]:
            continue
        r = i
        while parent[r] != r:
            r = parent[r]
        if rep[r] < 0:
            rep[r] = i
        labels[i] = rep[r]
    return labels


_label_numba = _njit(_label_loop)


def _label_numpy(n, u, v, bond_open, site_mask):
    keep = bond_open & site_mask[u] & site_mask[v]
    a = u[keep]
    b = v[keep]
    lab = np.arange(n, dtype=np.int64)
    while True:
        la = lab[a]
        lb = lab[b]
        if np.array_equal(la, lb):
            break
        low = np.minimum(la, lb)
        new = lab.copy()
        # hook each current root onto the smallest root adjacent to it
        np.minimum.at(new, la, low)
        np.minimum.at(new, lb, low)
        while True:
            jumped = new[new]
            if np.array_equal(jumped, new):
                break
            new = jumped
        lab = new
    return np.where(site_mask, lab, -1)


def label_components(n, u, v, bond_open, site_mask):
    """Label the open clusters of the graph restricted to ``site_mask``.

    Returns an int64 array whose entry for a masked-in site is the smallest
    site index of its cluster, and -1 for masked-out sites.
    """
    u = np.ascontiguousarray(u, dtype=np.int64)
    v = np.ascontiguousarray(v, dtype=np.int64)
    bond_open = np.ascontiguousarray(bond_open, dtype=np.bool_)
    site_mask = np.ascontiguousarray(site_mask, dtype=np.bool_)
    if USE_NUMBA:
        return _label_numba(n, u, v, bond_open, site_mask)
    return _label_numpy(n, u, v, bond_open, site_mask)


# ---------------------------------------------------------------------------
# backbone: vertices on at least one simple s-t path
# ---------------------------------------------------------------------------

def _backbone_loop(n, u, v, s, t):
    m = u.shape[0]
    deg = np.zeros(n + 1, dtype=np.int64)
    for j in range(m):
        deg[u[j] + 1] += 1
        deg[v[j] + 1] += 1
    indptr = np.cumsum(deg)
    fill = indptr[:-1].copy()
    nbr = np.empty(2 * m, dtype=np.int64)
    eid = np.empty(2 * m, dtype=np.int64)
    for j in range(m):
        nbr[fill[u[j]]] = v[j]
        eid[fill[u[j]]] = j
        fill[u[j]] += 1
        nbr[fill[v[j]]] = u[j]
        eid[fill[v[j]]] = j
        fill[v[j]] += 1

    disc = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    parent_edge = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    nxt = indptr[:-1].copy()
    block = np.full(m, -1, dtype=np.int64)
    vstack = np.empty(n, dtype=np.int64)
    estack = np.empty(m, dtype=np.int64)
    vtop = 0
    etop = 0
    clock = 0
    nblocks = 0

    disc[s] = 0
    low[s] = 0
    vstack[0] = s
    vtop = 1
    while vtop > 0:
        x = vstack[vtop - 1]
        if nxt[x] < indptr[x + 1]:
            j = nxt[x]
            nxt[x] += 1
            w = nbr[j]
            e = eid[j]
            if e == parent_edge[x]:
                continue
            if disc[w] < 0:
                clock += 1
                disc[w] = clock
                low[w] = clock
                parent[w] = x
                parent_edge[w] = e
                estack[etop] = e
                etop += 1
                vstack[vtop] = w
                vtop += 1
            elif disc[w] < disc[x]:
                if disc[w] < low[x]:
                    low[x] = disc[w]
                estack[etop] = e
                etop += 1
        else:
            vtop -= 1
            p = parent[x]
            if p >= 0:
                if low[x] < low[p]:
                    low[p] = low[x]
                if low[x] >= disc[p]:
                    while True:
                        etop -= 1
                        e = estack[etop]
                        block[e] = nblocks
                        if e == parent_edge[x]:
                            break
                    nblocks += 1

    out = np.zeros(n, dtype=np.bool_)
    if disc[t] < 0:
        return out
    on_path = np.zeros(nblocks, dtype=np.bool_)
    x = t
    while x != s:
        on_path[block[parent_edge[x]]] = True
        x = parent[x]
    for j in range(m):
        if block[j] >= 0 and on_path[block[j]]:
            out[u[j]] = True
            out[v[j]] = True
    return out


_backbone_numba = _njit(_backbone_loop)
_backbone_python = _backbone_loop


def st_backbone(n, u, v, s, t):
    """Vertices lying on at least one simple s-t path of the graph (n nodes, edges u-v).

    Uses the block-cut tree: a vertex qualifies iff it belongs to a biconnected
    block crossed by the s-t path in that tree.  ``s`` and ``t`` themselves are
    included when connected.
    """
    u = np.ascontiguousarray(u, dtype=np.int64)
    v = np.ascontiguousarray(v, dtype=np.int64)
    if USE_NUMBA:
        return _backbone_numba(n, u, v, s, t)
    return _backbone_python(n, u, v, s, t)


# ---------------------------------------------------------------------------
# exhaustive X<->Y indicator over all 2^B bond states
# ---------------------------------------------------------------------------

def _table_loop(n, u, v, xmask, ymask, smask):
    nb = u.shape[0]
    total = 1 << nb
    out = np.zeros(total, dtype=np.bool_)
    parent = np.empty(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.bool_)
    direct = False
    for i in range(n):
        if xmask[i] and ymask[i] and smask[i]:
            direct = True
    if direct:
        out[:] = True
        return out
    for state in range(total):
        for i in range(n):
            parent[i] = i
        for j in range(nb):
            if (state >> j) & 1 == 0:
                continue
            a = u[j]
            b = v[j]
            if not (smask[a] and smask[b]):
                continue
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if a != b:
                parent[b] = a
        for i in range(n):
            mark[i] = False
        for i in range(n):
            if xmask[i] and smask[i]:
                r = i
                while parent[r] != r:
                    r = parent[r]
                mark[r] = True
        hit = False
        for i in range(n):
            if ymask[i] and smask[i]:
                r = i
                while parent[r] != r:
                    r = parent[r]
                if mark[r]:
                    hit = True
                    break
        out[state] = hit
    return out


_table_numba = _njit(_table_loop)


def _table_numpy(n, u, v, xmask, ymask, smask):
    nb = u.shape[0]
    total = 1 << nb
    states = np.arange(total, dtype=np.int64)
    lab = np.broadcast_to(np.arange(n, dtype=np.int64), (total, n)).copy()
    opened = [((states >> j) & 1).astype(bool) & smask[u[j]] & smask[v[j]] for j in range(nb)]
    changed = True
    while changed:
        changed = False
        for j in range(nb):
            rows = opened[j]
            a = lab[rows, u[j]]
            b = lab[rows, v[j]]
            low = np.minimum(a, b)
            if np.any(a != b):
                changed = True
                lab[rows, u[j]] = low
                lab[rows, v[j]] = low
    xs = np.flatnonzero(xmask & smask)
    ys = np.flatnonzero(ymask & smask)
    if xs.size == 0 or ys.size == 0:
        return np.zeros(total, dtype=bool)
    lx = lab[:, xs]
    ly = lab[:, ys]
    return (lx[:, :, None] == ly[:, None, :]).any(axis=(1, 2))


def connect_table(n, u, v, xmask, ymask, smask):
    """Indicator of 'X connected to Y inside smask' for every bond state.

    Bit j of the state index is the state of bond j.  Intended for small
    bond counts (the table has 2^B entries).
    """
    u = np.ascontiguousarray(u, dtype=np.int64)
    v = np.ascontiguousarray(v, dtype=np.int64)
    xmask = np.ascontiguousarray(xmask, dtype=np.bool_)
    ymask = np.ascontiguousarray(ymask, dtype=np.bool_)
    smask = np.ascontiguousarray(smask, dtype=np.bool_)
    if USE_NUMBA:
        return _table_numba(n, u, v, xmask, ymask, smask)
    return _table_numpy(n, u, v, xmask, ymask, smask)
