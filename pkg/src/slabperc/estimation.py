"""Monte Carlo estimation: Wilson intervals, nested and product-space estimators, sweeps.

Trial ``i`` of an estimate with seed ``s`` always uses the configuration
``sample(region, p, derive_seed(s, i))``, so results do not depend on how the
trials are split across worker processes.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .events import (A1Event, Step5Event, Truncation, a2_holds, a3_holds, conditional_samples, ev_lr,
                     s_cluster)
from .geometry import SlabSpec
from .sampling import derive_seed, sample

Z95 = 1.959963984540054


def wilson(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    phat = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (phat + z2 / (2 * trials)) / denom
    half = z / denom * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials))
    lo = 0.0 if successes == 0 else max(0.0, min(centre - half, phat))
    hi = 1.0 if successes == trials else min(1.0, max(centre + half, phat))
    return lo, hi


@dataclass
class Estimate:
    successes: int
    trials: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    seed: int
    event: dict
    p: float
    k: int
    d: int
    n: int | None = None
    boundary_hits: int = 0

    @classmethod
    def from_counts(cls, successes, trials, seed, event, p, spec, n=None, boundary_hits=0):
        lo, hi = wilson(successes, trials)
        return cls(int(successes), int(trials), successes / trials, lo, hi, int(seed), event, float(p),
                   spec.k, spec.d, n, int(boundary_hits))

    @property
    def half_width(self) -> float:
        return (self.ci_hi - self.ci_lo) / 2

    @property
    def sigma(self) -> float:
        return math.sqrt(self.p_hat * (1 - self.p_hat) / self.trials)

    def covers(self, value: float) -> bool:
        return self.ci_lo <= value <= self.ci_hi

    def to_json(self) -> dict:
        return asdict(self)


def _count_chunk(args):
    event, p, seed, lo, hi = args
    region = event.region
    hits = 0
    for i in range(lo, hi):
        if event(sample(region, p, derive_seed(seed, i))):
            hits += 1
    return hits


def _chunks(trials, workers):
    workers = max(1, min(workers, trials))
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def mc_estimate(event, p: float, trials: int, seed: int, workers: int = 1) -> Estimate:
    """Fraction of ``trials`` independent configurations in which ``event`` holds."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    jobs = [(event, p, seed, lo, hi) for lo, hi in _chunks(trials, workers)]
    if len(jobs) == 1:
        hits = _count_chunk(jobs[0])
    else:
        with ProcessPoolExecutor(len(jobs)) as pool:
            hits = sum(pool.map(_count_chunk, jobs))
    return Estimate.from_counts(hits, trials, seed, event.to_json(), p, event.region.spec,
                                n=event.params.get("n"))


def _pair_chunk(args):
    event, p, seed, lo, hi = args
    region = event.region
    hits = bhits = 0
    for i in range(lo, hi):
        w = sample(region, p, derive_seed(seed, i, 0))
        wp = sample(region, p, derive_seed(seed, i, 1))
        if hasattr(event, "outcome"):
            out = event.outcome(w, wp)
            hits += out.connected
            bhits += out.boundary_hit
        else:
            hits += bool(event(w, wp))
    return hits, bhits


def product_estimate(event, p: float, trials: int, seed: int, workers: int = 1) -> Estimate:
    """Estimate of P x P[(omega, omega') in event] over independent pairs."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = [(event, p, seed, lo, hi) for lo, hi in _chunks(trials, workers)]
    if len(jobs) == 1:
        parts = [_pair_chunk(jobs[0])]
    else:
        with ProcessPoolExecutor(len(jobs)) as pool:
            parts = list(pool.map(_pair_chunk, jobs))
    hits = sum(h for h, _ in parts)
    bhits = sum(b for _, b in parts)
    return Estimate.from_counts(hits, trials, seed, event.to_json(), p, event.region.spec,
                                n=event.params.get("n"), boundary_hits=bhits)


@dataclass
class MeanEstimate:
    mean: float
    stderr: float
    ci_lo: float
    ci_hi: float
    samples: int

    @classmethod
    def of(cls, values: np.ndarray) -> "MeanEstimate":
        values = np.asarray(values, dtype=float)
        n = values.size
        mean = math.fsum(values.tolist()) / n
        sd = float(np.std(values, ddof=1)) if n > 1 else 0.0
        se = sd / math.sqrt(n)
        return cls(mean, se, mean - Z95 * se, mean + Z95 * se, n)


@dataclass
class NestedRecord:
    n: int
    p: float
    c: float
    outer: int
    inner: int
    seed: int
    truncation: list
    k: int
    d: int
    p_a1: Estimate
    p_a1a2a3: Estimate
    e_term: MeanEstimate
    e_f_a1: MeanEstimate
    mean_inner_stderr: float
    bounds: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _nested_chunk(args):
    n, spec, p, c, inner, seed, tr, lo, hi = args
    a1_event = A1Event(n, spec, tr)
    region = a1_event.region
    rows = []
    for i in range(lo, hi):
        w = sample(region, p, derive_seed(seed, i))
        a1 = a1_event(w)
        f = g = 0.0
        if a1:
            cs = s_cluster(w, n)
            fh, gh = conditional_samples(w, n, inner, derive_seed(seed, i, 1), cs)
            f, g = float(fh.mean()), float(gh.mean())
        rows.append((a1, f, g))
    return rows


def nested_estimate(n: int, p: float, c: float, outer: int, inner: int, seed: int,
                    truncation: Truncation | None = None, spec: SlabSpec = SlabSpec(),
                    workers: int = 1) -> NestedRecord:
    """P[A1], P[A1 n A2 n A3] and E[1_{A1 n A2 n A3} (f^2 - 2g)] by nested sampling.

    f and g are only needed on A1 (both reported events and the expectation
    carry the A1 indicator), so inner sampling is skipped off A1.
    """
    if outer < 1 or inner < 1:
        raise ValueError("outer and inner must be >= 1")
    if not 0 < c <= 1:
        raise ValueError(f"c must lie in (0, 1], got {c}")
    tr = truncation or Truncation.default(n)
    jobs = [(n, spec, p, c, inner, seed, tr, lo, hi) for lo, hi in _chunks(outer, workers)]
    if len(jobs) == 1:
        rows = _nested_chunk(jobs[0])
    else:
        with ProcessPoolExecutor(len(jobs)) as pool:
            rows = [r for part in pool.map(_nested_chunk, jobs) for r in part]
    a1 = np.array([r[0] for r in rows], dtype=bool)
    f = np.array([r[1] for r in rows])
    g = np.array([r[2] for r in rows])
    good = a1 & np.array([a2_holds(x, c) for x in f]) & np.array([a3_holds(x, c) for x in g])
    term = np.where(good, f ** 2 - 2 * g, 0.0)
    inner_se = np.sqrt(f * (1 - f) / inner)[a1]
    event = {"tag": "nested", "params": {"n": n, "c": c, "inner": inner, "a": tr.a, "b": tr.b}}
    return NestedRecord(
        n=n, p=float(p), c=float(c), outer=outer, inner=inner, seed=int(seed), truncation=tr.to_json(),
        k=spec.k, d=spec.d,
        p_a1=Estimate.from_counts(int(a1.sum()), outer, seed, event, p, spec, n),
        p_a1a2a3=Estimate.from_counts(int(good.sum()), outer, seed, event, p, spec, n),
        e_term=MeanEstimate.of(term),
        e_f_a1=MeanEstimate.of(np.where(a1, f, 0.0)),
        mean_inner_stderr=float(inner_se.mean()) if inner_se.size else 0.0,
        bounds={"p_a1a2a3_lower": c ** 4 / 1e3},
    )


def step5_estimate(n: int, p: float, trials: int, seed: int, spec: SlabSpec = SlabSpec(),
                   truncation: Truncation | None = None, require_a1: bool = True, workers: int = 1) -> Estimate:
    return product_estimate(Step5Event(n, spec, truncation, require_a1), p, trials, seed, workers)


def sweep(rho: float, n_list, p: float, k: int, d: int, trials: int, seed: int, workers: int = 1) -> list:
    """One estimate of p(floor(rho n), n) per n."""
    if rho <= 0:
        raise ValueError(f"rho must be positive, got {rho}")
    spec = SlabSpec(k, d)
    out = []
    for j, n in enumerate(n_list):
        m = math.floor(rho * n)
        if m < 1:
            raise ValueError(f"floor({rho} * {n}) = {m}: rectangle is empty")
        out.append(mc_estimate(ev_lr(m, n, spec), p, trials, derive_seed(seed, j), workers))
    return out
