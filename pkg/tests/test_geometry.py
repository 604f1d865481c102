import itertools

import pytest
from hypothesis import given, settings, strategies as st

from slabperc.geometry import Region, SegmentSpec, SlabSpec, describe, induced_bonds, lift, make_segment, reflect2, shadow

points = st.frozensets(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), max_size=12)
specs = st.builds(SlabSpec, st.integers(1, 3), st.integers(2, 4))


def test_slabspec_fiber():
    assert SlabSpec(2, 3).fibers() == [(0,), (1,)]
    assert SlabSpec(5, 2).fibers() == [()]
    assert SlabSpec(3, 4).fiber_size == 9
    with pytest.raises(ValueError):
        SlabSpec(0, 3)
    with pytest.raises(ValueError):
        SlabSpec(2, 1)


def test_lift_examples():
    assert lift({(0, 0)}, SlabSpec(2, 3)) == {(0, 0, 0), (0, 0, 1)}
    assert lift({(1, 2), (3, 4)}, SlabSpec(1, 2)) == {(1, 2), (3, 4)}
    assert len(lift({(0, 0), (1, 0), (2, 0)}, SlabSpec(3, 4))) == 27


def test_shadow_examples():
    spec = SlabSpec(2, 3)
    assert shadow({(1, 2, 0)}, spec) == {(1, 2, 0), (1, 2, 1)}
    assert shadow(set(), spec) == frozenset()


@given(points, specs)
def test_lift_shadow_properties(base, spec):
    A = lift(base, spec)
    assert len(A) == len(base) * spec.fiber_size
    assert shadow(A, spec) == A
    sub = frozenset(itertools.islice(A, len(A) // 2))
    assert shadow(shadow(sub, spec), spec) == shadow(sub, spec)
    assert shadow(sub, spec) <= shadow(A, spec)


@given(points, st.integers(-4, 4))
def test_reflect2_involution(base, c):
    c2 = c + 0.5
    A = lift(base, SlabSpec(2, 3))
    R = reflect2(A, c2)
    assert len(R) == len(A)
    assert reflect2(R, c2) == A


def test_reflect2_examples():
    assert reflect2({(5, 0)}, 1.5) == {(5, 3)}
    spec = SlabSpec(2, 3)
    for n in (1, 2):
        X = SegmentSpec.make("X", n=n).sites(spec)
        Xp = SegmentSpec.make("X_prime", n=n).sites(spec)
        assert reflect2(X, 2 * n - 0.5) == Xp
    with pytest.raises(ValueError):
        reflect2({(0, 0)}, 1.0)


def test_induced_bond_counts():
    assert len(induced_bonds(Region.box(2, 1, SlabSpec(2, 3)))) == 4
    assert len(induced_bonds(Region.box(3, 2, SlabSpec(1, 2)))) == 7
    assert len(induced_bonds(Region.box(1, 1, SlabSpec(1, 3)))) == 0


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("d", [2, 3, 4])
def test_bond_count_formula_by_scan(k, d):
    spec = SlabSpec(k, d)
    for M in range(1, 7):
        for N in range(1, 7):
            r = Region.box(M, N, spec)
            sites = r.sites()
            brute = sum(1 for a, b in itertools.combinations(sites, 2)
                        if sum(abs(x - y) for x, y in zip(a, b)) == 1)
            assert r.n_bonds == brute == r.expected_bond_count()
            if d == 3:
                assert r.n_bonds == (M - 1) * N * k + M * (N - 1) * k + M * N * (k - 1)


def test_bond_order_canonical():
    r = Region.box(3, 2, SlabSpec(1, 2))
    # sorted by lower endpoint, then axis
    assert r.bond_list() == [
        ((0, 0), (1, 0)), ((0, 0), (0, 1)), ((0, 1), (1, 1)), ((1, 0), (2, 0)),
        ((1, 0), (1, 1)), ((1, 1), (2, 1)), ((2, 0), (2, 1))]
    r2 = Region.box(3, 3, SlabSpec(2, 3))
    bonds = r2.bond_list()
    axis = [next(i for i, (x, y) in enumerate(zip(a, b)) if x != y) for a, b in bonds]
    keys = [(a, ax) for (a, _), ax in zip(bonds, axis)]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    assert Region.box(3, 3, SlabSpec(2, 3)).bond_list() == bonds
    for a, b in bonds:
        assert sum(abs(x - y) for x, y in zip(a, b)) == 1


def test_segments():
    assert make_segment("L", {"m": 3, "n": 2}, SlabSpec(1, 2)) == {(0, 0), (0, 1)}
    assert make_segment("R", {"m": 3, "n": 2}, SlabSpec(1, 2)) == {(2, 0), (2, 1)}
    S = make_segment("S_mid", {"n": 1}, SlabSpec(2, 3))
    assert len(S) == 8 and S == lift({(0, y) for y in range(20, 24)}, SlabSpec(2, 3))
    with pytest.raises(ValueError):
        make_segment("nope", {"n": 1}, SlabSpec())
    with pytest.raises(ValueError):
        make_segment("X", {"n": 0}, SlabSpec())


def test_segment_inside_region():
    r = Region.box(3, 2, SlabSpec(2, 3))
    L = SegmentSpec.make("L", m=3, n=2)
    assert r.sites_of(L.mask(r)) == L.sites(r.spec)
    seg = SegmentSpec.from_json(L.to_json())
    assert seg == L


def test_region_json_roundtrip():
    r = Region(0, 43, -16, 60, SlabSpec(2, 3))
    assert Region.from_json(r.to_json()) == r
    assert r.to_json() == {"k": 2, "d": 3, "base": [0, 43, -16, 60]}
    assert "43" in describe(r)


def test_region_masks():
    r = Region.box(4, 4, SlabSpec(2, 3))
    one = r.mask_of({(1, 1, 0)})
    assert r.sites_of(r.shadow_mask(one)) == {(1, 1, 0), (1, 1, 1)}
    assert r.sites_of(r.outer_boundary(one)) == {(0, 1, 0), (2, 1, 0), (1, 0, 0), (1, 2, 0), (1, 1, 1)}
    assert r.planar_within(one, r.mask_of({(3, 3, 1)}), 4)
    assert not r.planar_within(one, r.mask_of({(3, 3, 1)}), 3)
    assert r.touches_rows(one, [1]) and not r.touches_rows(one, [0, 3])
    empty = Region(2, 2, 0, 1, SlabSpec())
    assert empty.is_empty() and empty.n_sites == 0 and empty.n_bonds == 0
