import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from slabperc import _kernels
from slabperc.geometry import Region, SlabSpec

from conftest import small_regions

needs_numba = pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not installed")


def _graph(region, rng, p):
    return region.bond_u, region.bond_v, rng.random(region.n_bonds) < p


def _scipy_labels(n, u, v, bond_open, mask):
    keep = bond_open & mask[u] & mask[v]
    g = coo_matrix((np.ones(keep.sum()), (u[keep], v[keep])), shape=(n, n))
    _, comp = connected_components(g, directed=False)
    out = np.full(n, -1, dtype=np.int64)
    for c in np.unique(comp[mask]):
        members = np.flatnonzero(mask & (comp == c))
        out[members] = members.min()
    return out


@given(st.integers(0, 10 ** 6), st.floats(0, 1), st.floats(0.3, 1))
@settings(max_examples=60, deadline=None)
def test_labelling_matches_scipy(seed, p, q):
    rng = np.random.default_rng(seed)
    r = Region.box(int(rng.integers(1, 9)), int(rng.integers(1, 9)), SlabSpec(int(rng.integers(1, 4)), 3))
    u, v, bo = _graph(r, rng, p)
    mask = rng.random(r.n_sites) < q
    ref = _scipy_labels(r.n_sites, u, v, bo, mask)
    assert np.array_equal(_kernels._label_numpy(r.n_sites, u, v, bo, mask), ref)
    if _kernels.HAS_NUMBA:
        assert np.array_equal(_kernels._label_numba(r.n_sites, u, v, bo, mask), ref)
    assert np.array_equal(_kernels.label_components(r.n_sites, u, v, bo, mask), ref)


@needs_numba
def test_backbone_paths_agree():
    rng = np.random.default_rng(3)
    for _ in range(200):
        r = Region.box(int(rng.integers(1, 7)), int(rng.integers(1, 7)), SlabSpec(int(rng.integers(1, 3)), 3))
        u, v, bo = _graph(r, rng, rng.random())
        n = r.n_sites
        xs = rng.choice(n, size=min(n, 2), replace=False)
        ys = rng.choice(n, size=min(n, 2), replace=False)
        eu = np.concatenate((u[bo], np.full(xs.size, n), ys))
        ev = np.concatenate((v[bo], xs, np.full(ys.size, n + 1)))
        a = _kernels._backbone_numba(n + 2, eu, ev, n, n + 1)
        b = _kernels._backbone_python(n + 2, eu, ev, n, n + 1)
        assert np.array_equal(a, b)


@needs_numba
def test_connect_tables_agree():
    rng = np.random.default_rng(4)
    for r in small_regions():
        if r.n_bonds > 14:
            continue
        for _ in range(3):
            X = rng.random(r.n_sites) < 0.3
            Y = rng.random(r.n_sites) < 0.3
            M = rng.random(r.n_sites) < 0.8
            args = (r.n_sites, r.bond_u, r.bond_v, X, Y, M)
            assert np.array_equal(_kernels._table_numba(*args), _kernels._table_numpy(*args))


def test_connect_table_matches_labelling():
    rng = np.random.default_rng(5)
    r = Region.box(3, 3, SlabSpec(1, 2))
    X, Y = r.rect_mask(0, 1, 0, 3), r.rect_mask(2, 3, 0, 3)
    mask = np.ones(r.n_sites, dtype=bool)
    table = _kernels.connect_table(r.n_sites, r.bond_u, r.bond_v, X, Y, mask)
    for s in rng.choice(table.size, 200, replace=False):
        bo = ((int(s) >> np.arange(r.n_bonds)) & 1).astype(bool)
        lab = _kernels.label_components(r.n_sites, r.bond_u, r.bond_v, bo, mask)
        assert table[s] == bool(np.intersect1d(lab[X], lab[Y]).size)


def test_env_flag_selects_fallback():
    code = "from slabperc import _kernels; print(_kernels.USE_NUMBA)"
    env = dict(os.environ, SLABPERC_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
