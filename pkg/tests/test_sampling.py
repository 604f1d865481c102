import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slabperc.events import ev_a1, ev_lr, ev_step2
from slabperc.geometry import Region, SlabSpec
from slabperc.sampling import (Config, UniformSheet, derive_seed, export_config, import_config, resample_conditional,
                               rle_decode, rle_encode, sample, threshold)

REGION = Region.box(6, 5, SlabSpec(2, 3))


def test_degenerate_p():
    assert not sample(REGION, 0.0, 3).state.any()
    assert sample(REGION, 1.0, 3).state.all()
    with pytest.raises(ValueError):
        sample(REGION, 1.5, 0)


def test_determinism_and_seed_dependence():
    a, b = sample(REGION, 0.4, 99), sample(REGION, 0.4, 99)
    assert a == b
    assert not np.array_equal(a.state, sample(REGION, 0.4, 100).state)


def test_bond_state_depends_only_on_seed_and_index():
    big = Region.box(6, 6, SlabSpec(2, 3))
    sheet = UniformSheet.draw(big, 5)
    again = UniformSheet.draw(big, 5)
    assert np.array_equal(sheet.u, again.u)
    small = UniformSheet.draw(REGION, 5)
    assert np.array_equal(sheet.u[:REGION.n_bonds], small.u)


def test_derive_seed_paths():
    assert derive_seed(0, 1) == derive_seed(0, 1)
    assert len({derive_seed(0, i) for i in range(100)}) == 100
    assert derive_seed(0, 1, 0) != derive_seed(0, 1, 1)


def test_threshold_strict():
    r = Region.box(2, 1, SlabSpec(1, 2))
    sheet = UniformSheet(r, np.array([0.5]), 0)
    assert not threshold(sheet, 0.5).state[0]
    assert threshold(sheet, 0.50001).state[0]
    assert not threshold(sheet, 0.0).state.any()


@given(st.integers(0, 2 ** 32), st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=50, deadline=None)
def test_threshold_monotone(seed, p1, p2):
    p1, p2 = min(p1, p2), max(p1, p2)
    sheet = UniformSheet.draw(REGION, seed)
    lo, hi = threshold(sheet, p1).state, threshold(sheet, p2).state
    assert not (lo & ~hi).any()


def test_increasing_events_monotone_on_sheets():
    spec = SlabSpec(1, 2)
    events = [ev_lr(4, 3, spec), ev_lr(3, 5, SlabSpec(2, 3)), ev_step2(1, spec), ev_a1(1, spec)]
    for event in events:
        for seed in range(20):
            sheet = UniformSheet.draw(event.region, seed)
            vals = [event(threshold(sheet, p)) for p in np.linspace(0, 1, 11)]
            assert vals == sorted(vals)


def test_open_fraction_smoke():
    big = Region.box(80, 80, SlabSpec(2, 3))
    n = big.n_bonds
    assert n > 10_000
    for p, seed in ((0.3, 1), (0.5, 2), (0.9, 3)):
        frac = sample(big, p, seed).n_open
        assert abs(frac - p * n) <= 5 * np.sqrt(n * p * (1 - p))


def test_resample_conditional():
    w = sample(REGION, 0.5, 1)
    everything = np.ones(REGION.n_bonds, dtype=bool)
    assert np.array_equal(resample_conditional(w, everything, 7).state, w.state)
    nothing = ~everything
    fresh = resample_conditional(w, nothing, 7)
    assert np.array_equal(fresh.state, sample(REGION, 0.5, 7).state)
    frozen = np.zeros(REGION.n_bonds, dtype=bool)
    frozen[0] = True
    for s in range(1000):
        assert resample_conditional(w, frozen, s).state[0] == w.state[0]


@given(st.lists(st.booleans(), max_size=60))
def test_rle_roundtrip(bits):
    bits = np.array(bits, dtype=bool)
    runs = rle_encode(bits)
    assert sum(runs) == bits.size
    assert np.array_equal(rle_decode(runs, bits.size), bits)


def test_export_roundtrip():
    w = sample(REGION, 0.37, 11)
    obj = export_config(w)
    assert obj["k"] == 2 and obj["d"] == 3 and obj["p"] == 0.37 and obj["seed"] == 11
    assert import_config(obj) == w
    assert import_config(w.to_json()) == w
