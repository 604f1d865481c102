"""Cluster and path queries on a configuration.

Site sets are accepted either as boolean masks over the configuration's
region or as iterables of site tuples; results are boolean masks.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels
from .sampling import Config


class ClusterIndex:
    """Open clusters of a configuration restricted to an allowed-site mask."""

    def __init__(self, config: Config, mask=None):
        region = config.region
        self.region = region
        self.mask = region.as_mask(mask)
        self.labels = _kernels.label_components(region.n_sites, region.bond_u, region.bond_v,
                                                config.state, self.mask)

    def same(self, i: int, j: int) -> bool:
        return self.labels[i] >= 0 and self.labels[i] == self.labels[j]

    def connects(self, X: np.ndarray, Y: np.ndarray) -> bool:
        lx = self.labels[X & self.mask]
        ly = self.labels[Y & self.mask]
        if lx.size == 0 or ly.size == 0:
            return False
        hit = np.zeros(self.region.n_sites, dtype=bool)
        hit[lx] = True
        return bool(hit[ly].any())

    def cluster_of(self, seeds: np.ndarray) -> np.ndarray:
        roots = self.labels[seeds & self.mask]
        hit = np.zeros(self.region.n_sites, dtype=bool)
        hit[roots] = True
        return self.mask & hit[np.maximum(self.labels, 0)] & (self.labels >= 0)


def connected(config: Config, X, Y, mask=None) -> bool:
    """True iff an open path inside mask joins X to Y (a shared site counts)."""
    r = config.region
    return ClusterIndex(config, mask).connects(r.as_mask(X), r.as_mask(Y))


def cluster(config: Config, seeds, mask=None) -> np.ndarray:
    """Sites of mask joined to seeds by open paths in mask, seeds included."""
    return ClusterIndex(config, mask).cluster_of(config.region.as_mask(seeds))


def outer_vertex_boundary(region, A, ambient=None) -> np.ndarray:
    """Sites of ambient outside A adjacent to A."""
    A = region.as_mask(A)
    ambient = region.as_mask(ambient)
    return region.outer_boundary(A, ambient)


def _open_edges(config: Config, mask: np.ndarray):
    r = config.region
    keep = config.state & mask[r.bond_u] & mask[r.bond_v]
    return r.bond_u[keep], r.bond_v[keep]


def backbone(config: Config, X, Y, mask=None) -> np.ndarray:
    """Sites on at least one open simple path from X to Y inside mask."""
    r = config.region
    mask = r.as_mask(mask)
    xs = np.flatnonzero(r.as_mask(X) & mask)
    ys = np.flatnonzero(r.as_mask(Y) & mask)
    n = r.n_sites
    if xs.size == 0 or ys.size == 0:
        return np.zeros(n, dtype=bool)
    eu, ev = _open_edges(config, mask)
    s, t = n, n + 1
    u = np.concatenate((eu, np.full(xs.size, s), ys))
    v = np.concatenate((ev, xs, np.full(ys.size, t)))
    return _kernels.st_backbone(n + 2, u, v, s, t)[:n]


def _adjacency(config: Config, mask: np.ndarray):
    r = config.region
    eu, ev = _open_edges(config, mask)
    axis = r.bond_axis[config.state & mask[r.bond_u] & mask[r.bond_v]]
    adj = {}
    for a, b, ax in zip(eu.tolist(), ev.tolist(), axis.tolist()):
        # direction rank: axis ascending, + before -
        adj.setdefault(a, []).append((2 * ax, b))
        adj.setdefault(b, []).append((2 * ax + 1, a))
    for lst in adj.values():
        lst.sort()
    return adj


def direction_rank(a, b) -> int:
    """Rank of the step a -> b in the fixed edge order +e1 < -e1 < +e2 < -e2 < ..."""
    diff = [y - x for x, y in zip(a, b)]
    axis = next(i for i, x in enumerate(diff) if x)
    return 2 * axis + (0 if diff[axis] > 0 else 1)


def min_sa_path(config: Config, X, Y, mask=None):
    """Order-minimal open self-avoiding path from X to Y inside mask, or None.

    Paths are compared by the index of the starting site, then by their step
    directions lexicographically, a proper prefix being smaller.  The minimum
    is found greedily: at each step take the smallest direction from which Y
    is still reachable without revisiting the path.
    """
    r = config.region
    mask = r.as_mask(mask)
    X = r.as_mask(X) & mask
    Y = r.as_mask(Y) & mask
    adj = _adjacency(config, mask)
    ys = set(np.flatnonzero(Y).tolist())

    def reachable(start, blocked):
        if start in ys:
            return True
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for _, w in adj.get(x, ()):
                if w in seen or w in blocked:
                    continue
                if w in ys:
                    return True
                seen.add(w)
                queue.append(w)
        return False

    for x0 in np.flatnonzero(X).tolist():
        if not reachable(x0, set()):
            continue
        path = [x0]
        on_path = {x0}
        while path[-1] not in ys:
            for _, w in adj.get(path[-1], ()):
                if w not in on_path and reachable(w, on_path):
                    path.append(w)
                    on_path.add(w)
                    break
        return [r.site(i) for i in path]
    return None


def dist1(A, B) -> float:
    """Minimum l1 distance between two site sets; infinity if either is empty."""
    a = np.asarray([tuple(s) for s in A], dtype=float)
    b = np.asarray([tuple(s) for s in B], dtype=float)
    if a.size == 0 or b.size == 0:
        return math.inf
    dist, _ = cKDTree(b).query(a, k=1, p=1)
    return int(round(float(np.min(dist))))
