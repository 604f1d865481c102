"""Exact small-instance computations used as ground truth.

Probabilities are accumulated with ``fractions.Fraction``.  A float p is a
dyadic rational, so ``Fraction(p)`` is exact and so is every probability
computed from it; the float value is the correctly rounded result.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .connectivity import direction_rank
from .events import ConnectEvent
from .sampling import Config

DEFAULT_CAP = 25
PATH_SITE_CAP = 12


class CapExceeded(RuntimeError):
    """Instance too large for exhaustive enumeration."""


@dataclass
class ExactResult:
    probability: Fraction
    bond_count: int
    config_count: int
    open_counts: list = field(repr=False, default_factory=list)

    def __float__(self):
        return float(self.probability)

    @property
    def value(self) -> float:
        return float(self.probability)


def indicator_table(event, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Event indicator for every bond state of the event's region (bit j = bond j)."""
    region = event.region
    nb = region.n_bonds
    if nb > cap:
        raise CapExceeded(f"{nb} bonds exceeds the enumeration cap of {cap}")
    if isinstance(event, ConnectEvent):
        return np.asarray(event.table(), dtype=bool)
    total = 1 << nb
    bits = (np.arange(total, dtype=np.int64)[:, None] >> np.arange(nb, dtype=np.int64)) & 1
    out = np.empty(total, dtype=bool)
    for s in range(total):
        out[s] = event.evaluate(Config(region, bits[s].astype(bool), float("nan"), s))
    return out


def _popcounts(nb: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << nb, dtype=np.uint64)).astype(np.int64)


def prob_from_table(table: np.ndarray, nb: int, p) -> tuple[Fraction, list]:
    """Exact P_p of the set of states flagged in ``table``."""
    counts = np.bincount(_popcounts(nb)[table], minlength=nb + 1).tolist()
    q = Fraction(p)
    total = sum((c * q ** j * (1 - q) ** (nb - j) for j, c in enumerate(counts) if c), Fraction(0))
    return total, counts


def exact_prob(event, p, cap: int = DEFAULT_CAP) -> ExactResult:
    """Sum of P_p(omega) over all configurations omega in the event."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    table = indicator_table(event, cap)
    nb = event.region.n_bonds
    prob, counts = prob_from_table(table, nb, p)
    return ExactResult(prob, nb, 1 << nb, counts)


def is_increasing(table: np.ndarray, nb: int) -> bool:
    """True iff opening any single bond never switches the event off."""
    states = np.arange(table.size, dtype=np.int64)
    for j in range(nb):
        low = states[(states >> j) & 1 == 0]
        if np.any(table[low] & ~table[low | (1 << j)]):
            return False
    return True


@dataclass
class FKGReport:
    p: float
    increasing_e: bool
    increasing_f: bool
    p_e: Fraction
    p_f: Fraction
    p_ef: Fraction
    margin: Fraction
    ok: bool

    def to_json(self) -> dict:
        return {"p": self.p, "increasing_e": self.increasing_e, "increasing_f": self.increasing_f,
                "p_e": float(self.p_e), "p_f": float(self.p_f), "p_ef": float(self.p_ef),
                "margin": float(self.margin), "ok": self.ok}


def fkg_check(E, F, p, cap: int = DEFAULT_CAP, tol: float = 1e-12) -> FKGReport:
    """Exhaustively verify P[E n F] >= P[E] P[F] for two increasing events on one region."""
    if E.region != F.region:
        raise ValueError("FKG check needs both events on the same region")
    nb = E.region.n_bonds
    te = indicator_table(E, cap)
    tf = indicator_table(F, cap)
    inc_e, inc_f = is_increasing(te, nb), is_increasing(tf, nb)
    pe, _ = prob_from_table(te, nb, p)
    pf, _ = prob_from_table(tf, nb, p)
    pef, _ = prob_from_table(te & tf, nb, p)
    margin = pef - pe * pf
    ok = inc_e and inc_f and margin >= -Fraction(tol)
    return FKGReport(float(p), inc_e, inc_f, pe, pf, pef, margin, ok)


# ---------------------------------------------------------------------------
# local modification lemma
# ---------------------------------------------------------------------------

@dataclass
class ABInstance:
    """Sets A, B of n-bit strings (as ints), a map f: A -> B, and a modification budget s."""

    n: int
    A: frozenset
    B: frozenset
    f: dict
    s: int


@dataclass
class ABReport:
    hypothesis_ok: bool
    worst_support: int
    p_a: Fraction
    p_b: Fraction
    factor: Fraction
    conclusion_ok: bool | None
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.hypothesis_ok and bool(self.conclusion_ok)


def _set_prob(strings, n, q: Fraction) -> Fraction:
    counts = [0] * (n + 1)
    for w in strings:
        counts[int(w).bit_count()] += 1
    return sum((c * q ** j * (1 - q) ** (n - j) for j, c in enumerate(counts) if c), Fraction(0))


def ab_lemma_check(inst: ABInstance, p) -> ABReport:
    """Check the lemma's hypothesis on ``inst`` and, when it holds, its conclusion exactly.

    Hypothesis: for each w' in f(A), the coordinates where some preimage of w'
    differs from w' number at most s.  Conclusion:
    P_p[A] <= (2 / min(p, 1-p))^s P_p[B].
    """
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if inst.n > 20:
        raise CapExceeded(f"bit length {inst.n} exceeds 20")
    violations = []
    if set(inst.f) != set(inst.A):
        violations.append("f is not total on A")
    if not set(inst.f.values()) <= set(inst.B):
        violations.append("f(A) is not contained in B")
    support = {}
    for w, wp in inst.f.items():
        support[wp] = support.get(wp, 0) | (w ^ wp)
    worst = max((s.bit_count() for s in support.values()), default=0)
    if worst > inst.s:
        violations.append(f"a fibre of f differs from its image on {worst} > s = {inst.s} coordinates")
    q = Fraction(p)
    factor = (2 / min(q, 1 - q)) ** inst.s
    pa = _set_prob(inst.A, inst.n, q)
    pb = _set_prob(inst.B, inst.n, q)
    hyp = not violations
    return ABReport(hyp, worst, pa, pb, factor, (pa <= factor * pb) if hyp else None, violations)


def random_ab_instance(rng: random.Random, n_max: int = 12, s_max: int = 3) -> ABInstance:
    """A random instance satisfying the hypothesis by construction.

    Draw B; for each w' in B draw a modification set S of size <= s and a few
    preimages w' xor m with m supported in S; A is the union of the preimages,
    each mapped to the first w' that produced it.
    """
    n = rng.randint(1, n_max)
    s = rng.randint(0, min(s_max, n))
    size_b = rng.randint(1, min(1 << n, 40))
    B = rng.sample(range(1 << n), size_b)
    f = {}
    for wp in B:
        S = rng.sample(range(n), rng.randint(0, s))
        for _ in range(rng.randint(0, 4)):
            m = 0
            for i in S:
                if rng.random() < 0.5:
                    m |= 1 << i
            f.setdefault(wp ^ m, wp)
    return ABInstance(n, frozenset(f), frozenset(B), f, s)


# ---------------------------------------------------------------------------
# simple paths
# ---------------------------------------------------------------------------

def enumerate_simple_paths(config: Config, X, Y, mask=None, cap: int = PATH_SITE_CAP) -> list:
    """All open simple paths (lists of site indices) starting in X and ending in Y inside mask.

    Zero-length paths count for sites of X n Y.  Paths may pass through
    further sites of X or Y before ending.
    """
    r = config.region
    mask = r.as_mask(mask)
    if int(mask.sum()) > cap:
        raise CapExceeded(f"{int(mask.sum())} sites exceeds the path-enumeration cap of {cap}")
    X = r.as_mask(X) & mask
    Y = r.as_mask(Y) & mask
    nbrs = {i: [] for i in np.flatnonzero(mask).tolist()}
    for j in np.flatnonzero(config.state).tolist():
        a, b = int(r.bond_u[j]), int(r.bond_v[j])
        if mask[a] and mask[b]:
            nbrs[a].append(b)
            nbrs[b].append(a)
    out = []

    def walk(path, seen):
        x = path[-1]
        if Y[x]:
            out.append(list(path))
        for w in nbrs[x]:
            if w not in seen:
                seen.add(w)
                path.append(w)
                walk(path, seen)
                path.pop()
                seen.discard(w)

    for x0 in np.flatnonzero(X).tolist():
        walk([x0], {x0})
    return out


def path_order_key(region, path) -> tuple:
    """Sort key realising the path order: start index, then step directions, prefixes first."""
    steps = tuple(direction_rank(region.site(a), region.site(b)) for a, b in zip(path, path[1:]))
    return (path[0],) + steps


def oracle_backbone(config: Config, X, Y, mask=None) -> np.ndarray:
    out = np.zeros(config.region.n_sites, dtype=bool)
    for path in enumerate_simple_paths(config, X, Y, mask):
        out[path] = True
    return out


def oracle_min_path(config: Config, X, Y, mask=None):
    paths = enumerate_simple_paths(config, X, Y, mask)
    if not paths:
        return None
    best = min(paths, key=lambda pth: path_order_key(config.region, pth))
    return [config.region.site(i) for i in best]
