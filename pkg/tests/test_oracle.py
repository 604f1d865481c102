import itertools
import random
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from slabperc.events import ConnectEvent, Event, ev_lr
from slabperc.geometry import Region, SlabSpec
from slabperc.oracle import (ABInstance, CapExceeded, ab_lemma_check, enumerate_simple_paths, exact_prob, fkg_check,
                             indicator_table, random_ab_instance)
from slabperc.sampling import Config

from conftest import PLANE, SLAB, random_config, small_regions


class Negated(Event):
    tag = "not"

    def __init__(self, inner):
        super().__init__(inner.region)
        self.inner = inner

    def evaluate(self, config):
        return not self.inner.evaluate(config)


class AllOpen(Event):
    tag = "all_open"

    def evaluate(self, config):
        return bool(config.state.all())


def test_exact_anchors():
    single = ev_lr(2, 1, PLANE)
    assert exact_prob(single, 0.3).probability == Fraction(0.3)
    # values frozen from an independent networkx enumeration
    assert exact_prob(ev_lr(3, 2, PLANE), 0.5).probability == Fraction(1, 2)
    assert exact_prob(ev_lr(2, 2, PLANE), 0.5).probability == Fraction(3, 4)
    assert exact_prob(ev_lr(3, 1, PLANE), 0.5).probability == Fraction(1, 4)
    res = exact_prob(ev_lr(3, 2, PLANE), 0.5)
    assert res.bond_count == 7 and res.config_count == 128


def test_complement_sums_to_one():
    for event in (ev_lr(3, 2, PLANE), ev_lr(2, 2, SLAB)):
        for p in (0.1, 0.37, 0.5):
            total = exact_prob(event, p).probability + exact_prob(Negated(event), p).probability
            assert total == 1


def test_generic_path_matches_fast_table():
    event = ev_lr(3, 2, SLAB)
    slow = Negated(Negated(event))
    assert np.array_equal(indicator_table(slow), indicator_table(event))


def test_cap():
    with pytest.raises(CapExceeded):
        exact_prob(ev_lr(6, 6, PLANE), 0.5)


def test_monotone_in_p():
    for event in (ev_lr(3, 2, PLANE), ev_lr(2, 3, SLAB), ev_lr(3, 3, PLANE)):
        vals = [exact_prob(event, p / 10).probability for p in range(1, 10)]
        assert vals == sorted(vals)


def test_lr_symmetries():
    # left-right reflection swaps L and R; fiber permutation fixes both
    r = Region.box(3, 2, SLAB)
    flipped = ConnectEvent(r, r.rect_mask(2, 3, 0, 2), r.rect_mask(0, 1, 0, 2))
    base = ev_lr(3, 2, SLAB)
    for p in (0.3, 0.5, 0.8):
        assert exact_prob(base, p).probability == exact_prob(flipped, p).probability
    # top-bottom reflection: L, R are invariant, the table permutes bonds
    t = indicator_table(base)
    perm = _reflect_bonds(r)
    states = np.arange(t.size)
    bits = (states[:, None] >> np.arange(r.n_bonds)) & 1
    mapped = (bits[:, perm] << np.arange(r.n_bonds)).sum(axis=1)
    assert np.array_equal(t, t[mapped])


def _reflect_bonds(r):
    index = {tuple(map(tuple, b)): j for j, b in enumerate(r.bond_list())}
    perm = []
    for a, b in r.bond_list():
        fa = (a[0], r.y1 - 1 - a[1]) + tuple(a[2:])
        fb = (b[0], r.y1 - 1 - b[1]) + tuple(b[2:])
        perm.append(index[tuple(sorted((fa, fb)))])
    return perm


def test_fkg_examples():
    r = Region.box(2, 2, PLANE)
    lr = ev_lr(2, 2, PLANE)
    tb = ConnectEvent(r, r.rect_mask(0, 2, 0, 1), r.rect_mask(0, 2, 1, 2))
    rep = fkg_check(lr, lr, 0.5)
    assert rep.ok and rep.margin == Fraction(3, 4) - Fraction(9, 16)
    rep = fkg_check(lr, tb, 0.5)
    # the two crossings use disjoint bonds of the 2x2 box, so they are independent
    assert rep.ok and rep.margin == 0 and rep.p_ef == Fraction(9, 16)
    rep = fkg_check(AllOpen(r), tb, 0.3)
    assert rep.ok and rep.p_ef == rep.p_e


def test_fkg_flags_non_increasing():
    lr = ev_lr(2, 2, PLANE)
    rep = fkg_check(Negated(lr), lr, 0.5)
    assert not rep.increasing_e and not rep.ok


def test_ab_lemma_examples():
    A = frozenset({0b101, 0b011})
    rep = ab_lemma_check(ABInstance(3, A, A, {w: w for w in A}, 0), 0.3)
    assert rep.ok and rep.factor == 1
    rep = ab_lemma_check(ABInstance(1, frozenset({1}), frozenset({0}), {1: 0}, 1), 0.5)
    assert rep.ok and rep.p_a == Fraction(1, 2) and rep.factor == 4 and rep.p_b == Fraction(1, 2)


def test_ab_lemma_hypothesis_violation_reported():
    inst = ABInstance(3, frozenset({0b111}), frozenset({0}), {0b111: 0}, 1)
    rep = ab_lemma_check(inst, 0.5)
    assert not rep.hypothesis_ok and rep.conclusion_ok is None and rep.worst_support == 3


def test_ab_random_instances():
    rng = random.Random(7)
    for _ in range(100):
        inst = random_ab_instance(rng)
        assert inst.n <= 12
        for p in (0.3, 0.5):
            rep = ab_lemma_check(inst, p)
            assert rep.hypothesis_ok and rep.conclusion_ok


def test_simple_paths_examples():
    r = Region.box(4, 1, PLANE)
    w = Config.all_open(r)
    assert enumerate_simple_paths(w, {(0, 0)}, {(3, 0)}) == [[0, 1, 2, 3]]
    assert enumerate_simple_paths(Config.all_closed(r), {(0, 0)}, {(3, 0)}) == []
    sq = Region.box(2, 2, PLANE)
    assert len(enumerate_simple_paths(Config.all_open(sq), {(0, 0)}, {(1, 1)})) == 2
    with pytest.raises(CapExceeded):
        enumerate_simple_paths(Config.all_open(Region.box(4, 4, PLANE)), {(0, 0)}, {(3, 3)})


def test_simple_paths_match_networkx():
    rng = np.random.default_rng(11)
    regions = small_regions()
    for i in range(120):
        r = regions[i % len(regions)]
        w = random_config(r, rng, 0.7)
        g = nx.Graph()
        g.add_nodes_from(range(r.n_sites))
        g.add_edges_from((int(a), int(b)) for a, b, s in zip(r.bond_u, r.bond_v, w.state) if s)
        x, y = rng.choice(r.n_sites, 2)
        got = sorted(map(tuple, enumerate_simple_paths(w, r.as_mask([r.site(x)]), r.as_mask([r.site(y)]))))
        if x == y:
            assert got == [(x,)]
            continue
        ref = sorted(tuple(p) for p in nx.all_simple_paths(g, int(x), int(y)))
        assert got == ref
