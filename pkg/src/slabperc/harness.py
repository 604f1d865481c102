"""Constants and inequality checks for crossing probabilities, plus the case tracer.

Right-hand sides such as c*^21 c^198 / 10^154 underflow doubles, so every
comparison carries ``log10_rhs`` and the float ``rhs`` is just its
(possibly zero) exponential.  A check passes when ``lhs >= rhs - slack``
(lower bounds) or ``lhs <= rhs + slack`` (upper bounds), with slack three
times the summed 95% half-widths of both sides.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .estimation import Estimate, mc_estimate, nested_estimate, product_estimate
from .events import (Step5Event, Truncation, ConnectEvent, ev_assumption3, ev_cross_connect, ev_extension,
                     ev_lr, ev_proximity2, ev_proximity4, ev_side_connect, ev_step2, ev_xx_prime)
from .geometry import Region, SlabSpec
from .sampling import derive_seed

SLACK_FACTOR = 3.0
NEG_INF = float("-inf")

log = logging.getLogger("slabperc")


def log10(x: float) -> float:
    return math.log10(x) if x > 0 else NEG_INF


def _pow10(x: float) -> float:
    if x == NEG_INF:
        return 0.0
    try:
        return 10.0 ** x
    except OverflowError:
        return math.inf


def _finite(x):
    return x if x is None or math.isfinite(x) else None


@dataclass(frozen=True)
class Constants:
    """Glueing constants C* = (2 / min(p, 1-p))^(49 d k^(d-2)) and c* = 1 / (1 + C*)."""

    p: float
    k: int
    d: int
    exponent: int
    log10_C_star: float
    log10_c_star: float

    def C_star_exact(self) -> Fraction:
        q = Fraction(self.p)
        return (2 / min(q, 1 - q)) ** self.exponent

    def C_star_mp(self, dps: int = 60):
        with mpmath.workdps(dps):
            q = mpmath.mpf(self.p)
            return (2 / min(q, 1 - q)) ** self.exponent

    def log10_C_star_mp(self, dps: int = 60) -> float:
        with mpmath.workdps(dps):
            return float(mpmath.log10(self.C_star_mp(dps)))

    @property
    def c_star(self) -> float:
        return _pow10(self.log10_c_star)

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "d": self.d, "exponent": self.exponent,
                "log10_C_star": self.log10_C_star, "log10_c_star": self.log10_c_star}


def constants(p: float, k: int, d: int) -> Constants:
    if not 0 < p < 1:
        raise ValueError(f"constants need p in (0, 1), got {p}")
    SlabSpec(k, d)
    exponent = d * 7 ** 2 * k ** (d - 2)
    lc = exponent * math.log10(2 / min(p, 1 - p))
    lcs = -lc - math.log1p(10.0 ** -lc) / math.log(10)
    return Constants(float(p), k, d, exponent, lc, lcs)


def log10_c_star(p: float, k: int, d: int) -> float:
    """log10 c*, extended by its limit -inf at p in {0, 1}."""
    if p <= 0 or p >= 1:
        return NEG_INF
    return constants(p, k, d).log10_c_star


@dataclass
class CheckReport:
    check: str
    params: dict
    lhs: float
    rhs: float
    log10_rhs: float
    slack: float
    direction: str
    passed: bool
    seeds: dict = field(default_factory=dict)
    estimates: list = field(default_factory=list)
    boundary_hit_fraction: float = 0.0
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.check, "params": self.params, "lhs": self.lhs, "rhs": self.rhs,
                "log10_rhs": _finite(self.log10_rhs), "slack": self.slack, "direction": self.direction,
                "pass": self.passed, "seeds": self.seeds, "estimates": self.estimates,
                "boundary_hit_fraction": self.boundary_hit_fraction, "notes": self.notes, "extra": self.extra}


def _lower_bound(name, params, lhs: Estimate, log10_rhs, rhs_halfwidth, seeds, estimates, notes=(), extra=None):
    rhs = _pow10(log10_rhs)
    slack = SLACK_FACTOR * (lhs.half_width + rhs_halfwidth)
    return CheckReport(name, params, lhs.p_hat, rhs, log10_rhs, slack, ">=", bool(lhs.p_hat >= rhs - slack),
                       seeds, [e.to_json() for e in estimates], notes=list(notes), extra=extra or {})


def _spec(k, d):
    return SlabSpec(k, d)


def check_recursive(n: int, L: int, p: float, trials: int, seed: int, k: int = 2, d: int = 3,
                    workers: int = 1) -> CheckReport:
    """P[LR(2n, 2nL)] <= ((3L - 1) P[LR(n, nL)])^2."""
    if n < 1 or L < 1:
        raise ValueError("n and L must be >= 1")
    spec = _spec(k, d)
    seeds = {"lhs": derive_seed(seed, 0), "rhs": derive_seed(seed, 1)}
    big = mc_estimate(ev_lr(2 * n, 2 * n * L, spec), p, trials, seeds["lhs"], workers)
    small = mc_estimate(ev_lr(n, n * L, spec), p, trials, seeds["rhs"], workers)
    a = 3 * L - 1
    rhs = (a * small.p_hat) ** 2
    rhs_hw = 2 * a * a * small.p_hat * small.half_width
    slack = SLACK_FACTOR * (big.half_width + rhs_hw)
    params = {"n": n, "L": L, "p": p, "k": k, "d": d, "trials": trials, "seed": seed}
    return CheckReport("recursive", params, big.p_hat, rhs, log10(rhs), slack, "<=",
                       bool(big.p_hat <= rhs + slack), seeds, [big.to_json(), small.to_json()])


# ---------------------------------------------------------------------------
# boundary arcs
# ---------------------------------------------------------------------------

def boundary_cycle(m: int, n: int) -> list:
    """Interior vertex boundary of [0,m) x [0,n), counter-clockwise from the origin."""
    if m < 2 or n < 2:
        raise ValueError("boundary arcs need m, n >= 2")
    cyc = [(x, 0) for x in range(m)]
    cyc += [(m - 1, y) for y in range(1, n)]
    cyc += [(x, n - 1) for x in range(m - 2, -1, -1)]
    cyc += [(0, y) for y in range(n - 2, 0, -1)]
    return cyc


def boundary_quarters(m: int, n: int) -> list:
    """Four consecutive arcs splitting the boundary cycle as evenly as possible."""
    cyc = boundary_cycle(m, n)
    cuts = [round(i * len(cyc) / 4) for i in range(5)]
    return [cyc[cuts[i]:cuts[i + 1]] for i in range(4)]


def validate_arcs(m: int, n: int, arcs) -> None:
    """Raise ValueError unless the arcs are disjoint boundary intervals in counter-clockwise order."""
    cyc = boundary_cycle(m, n)
    pos = {pt: i for i, pt in enumerate(cyc)}
    size = len(cyc)
    starts = []
    seen = set()
    for j, arc in enumerate(arcs):
        pts = {tuple(pt) for pt in arc}
        if not pts:
            raise ValueError(f"arc {j} is empty")
        if not pts <= set(pos):
            raise ValueError(f"arc {j} leaves the boundary of [0,{m}) x [0,{n})")
        if pts & seen:
            raise ValueError(f"arc {j} overlaps an earlier arc")
        seen |= pts
        idx = {pos[pt] for pt in pts}
        heads = [i for i in idx if (i - 1) % size not in idx]
        if len(heads) != 1:
            raise ValueError(f"arc {j} is not a single connected interval of the boundary")
        starts.append(heads[0])
    rel = [(s - starts[0]) % size for s in starts]
    if rel != sorted(rel):
        raise ValueError("arcs are not in counter-clockwise order")


def check_glue(m: int, n: int, X1, X2, Y1, Y2, p: float, trials: int, seed: int, k: int = 2, d: int = 3,
               workers: int = 1) -> CheckReport:
    """P[X1 <-> X2] >= c* P[X1 <-> Y1] P[X2 <-> Y2] in B(m, n), for lifted boundary arcs."""
    validate_arcs(m, n, [X1, X2, Y1, Y2])
    spec = _spec(k, d)
    region = Region.box(m, n, spec)

    def lifted(arc):
        fibers = spec.fibers()
        return [tuple(pt) + f for pt in arc for f in fibers]

    def conn(A, B):
        return ConnectEvent(region, lifted(A), lifted(B), params={"m": m, "n": n}, tag="arc_connect")

    seeds = {"x1x2": derive_seed(seed, 0), "x1y1": derive_seed(seed, 1), "x2y2": derive_seed(seed, 2)}
    e12 = mc_estimate(conn(X1, X2), p, trials, seeds["x1x2"], workers)
    e1 = mc_estimate(conn(X1, Y1), p, trials, seeds["x1y1"], workers)
    e2 = mc_estimate(conn(X2, Y2), p, trials, seeds["x2y2"], workers)
    lcs = log10_c_star(p, k, d)
    log_rhs = lcs + log10(e1.p_hat) + log10(e2.p_hat)
    cs = _pow10(lcs)
    rhs_hw = cs * (e2.p_hat * e1.half_width + e1.p_hat * e2.half_width)
    prod = e1.p_hat * e2.p_hat
    extra = {"effective_glue_constant": e12.p_hat / prod if prod > 0 else None, "log10_c_star": _finite(lcs)}
    params = {"m": m, "n": n, "p": p, "k": k, "d": d, "trials": trials, "seed": seed,
              "arcs": [[list(pt) for pt in arc] for arc in (X1, X2, Y1, Y2)]}
    return _lower_bound("glue", params, e12, log_rhs, rhs_hw, seeds, [e12, e1, e2], extra=extra)


def check_wide(m: int, n: int, p: float, trials: int, seed: int, k: int = 2, d: int = 3,
               workers: int = 1) -> CheckReport:
    """p(2m - n, n) >= c*^3 p(m, n)^4 / 4 for m > n."""
    if m <= n:
        raise ValueError(f"check_wide needs m > n, got m={m}, n={n}")
    spec = _spec(k, d)
    seeds = {"lhs": derive_seed(seed, 0), "rhs": derive_seed(seed, 1)}
    long = mc_estimate(ev_lr(2 * m - n, n, spec), p, trials, seeds["lhs"], workers)
    base = mc_estimate(ev_lr(m, n, spec), p, trials, seeds["rhs"], workers)
    lcs = log10_c_star(p, k, d)
    log_rhs = math.log10(0.25) + 3 * lcs + 4 * log10(base.p_hat)
    rhs_hw = _pow10(math.log10(0.25) + 3 * lcs) * 4 * base.p_hat ** 3 * base.half_width
    prod = base.p_hat ** 4
    extra = {"effective_constant": long.p_hat / prod if prod > 0 else None, "log10_c_star": _finite(lcs)}
    params = {"m": m, "n": n, "p": p, "k": k, "d": d, "trials": trials, "seed": seed}
    return _lower_bound("wide", params, long, log_rhs, rhs_hw, seeds, [long, base], extra=extra)


def log10_c_prime(c: float, lcs: float) -> float:
    """log10 of c*^21 c^198 / 10^154."""
    return 21 * lcs + 198 * log10(c) - 154


def check_shortlong(n: int, p: float, trials: int, seed: int, k: int = 2, d: int = 3,
                    workers: int = 1) -> CheckReport:
    """p(44n, 43n) >= c*^21 p(43n, 44n)^198 / 10^154."""
    spec = _spec(k, d)
    seeds = {"lhs": derive_seed(seed, 0), "rhs": derive_seed(seed, 1)}
    lhs = mc_estimate(ev_lr(44 * n, 43 * n, spec), p, trials, seeds["lhs"], workers)
    c = mc_estimate(ev_lr(43 * n, 44 * n, spec), p, trials, seeds["rhs"], workers)
    lcs = log10_c_star(p, k, d)
    log_rhs = log10_c_prime(c.p_hat, lcs)
    rhs = _pow10(log_rhs)
    rhs_hw = rhs * 198 * c.half_width / c.p_hat if c.p_hat > 0 else 0.0
    params = {"n": n, "p": p, "k": k, "d": d, "trials": trials, "seed": seed}
    return _lower_bound("shortlong", params, lhs, log_rhs, rhs_hw, seeds, [lhs, c],
                        extra={"c": c.p_hat, "log10_c_star": _finite(lcs)})


# ---------------------------------------------------------------------------
# case tracer
# ---------------------------------------------------------------------------

class _Tracer:
    def __init__(self, n, p, trials, inner, seed, spec, truncation, workers):
        self.n, self.p, self.trials, self.inner, self.seed = n, p, trials, inner, seed
        self.spec, self.tr, self.workers = spec, truncation, workers
        self.counter = 0
        self.checks = []

    def estimate(self, event) -> Estimate:
        self.counter += 1
        log.info("trace: %s", event.tag)
        return mc_estimate(event, self.p, self.trials, derive_seed(self.seed, self.counter), self.workers)

    def compare(self, name, est_lhs, log10_rhs, direction=">=", rhs_hw=0.0):
        """Record one comparison of an estimate against a (log-space) bound."""
        lhs = est_lhs if isinstance(est_lhs, float) else est_lhs.p_hat
        hw = 0.0 if isinstance(est_lhs, float) else est_lhs.half_width
        rhs = _pow10(log10_rhs)
        slack = SLACK_FACTOR * (hw + rhs_hw)
        ok = lhs >= rhs - slack if direction == ">=" else lhs <= rhs + slack
        row = {"name": name, "lhs": lhs, "rhs": rhs, "log10_rhs": _finite(log10_rhs), "slack": slack,
               "direction": direction, "pass": bool(ok)}
        self.checks.append(row)
        return row

    def log_compare(self, name, log_lhs, log_rhs):
        """Deterministic comparison of two bounds held in log10 form."""
        row = {"name": name, "log10_lhs": _finite(log_lhs), "log10_rhs": _finite(log_rhs),
               "direction": ">=", "pass": bool(log_lhs >= log_rhs)}
        self.checks.append(row)
        return row


def trace_proof(n: int, p: float, trials: int, inner: int, seed: int, truncation: Truncation | None = None,
                k: int = 2, d: int = 3, outer: int | None = None, workers: int = 1) -> dict:
    """Evaluate each assumption and case of the short-to-long crossing argument at (n, p).

    Returns a JSON-ready dict.  ``branch`` names the first case whose
    assumption fails empirically ("step1", "step2", "step3"), "main" when all
    three assumptions hold, or "degenerate" when c = 0.  The comparisons that
    branch relies on are listed under ``checks``; ``pass`` is their conjunction.
    """
    spec = _spec(k, d)
    tr = truncation or Truncation.default(n)
    tr5 = Truncation.mirrored(n)
    outer = trials if outer is None else outer
    T = _Tracer(n, p, trials, inner, seed, spec, tr, workers)
    lcs = log10_c_star(p, k, d)
    report = {
        "check": "trace_proof",
        "params": {"n": n, "p": p, "k": k, "d": d, "trials": trials, "inner": inner, "outer": outer,
                   "seed": seed, "truncation": tr.to_json(), "step5_truncation": tr5.to_json()},
        "notes": ["p is user supplied; the report shows which case fires at this p and does not certify criticality"],
        "constants": {"log10_c_star": _finite(lcs),
                      "log10_C_star": _finite(-lcs) if math.isfinite(lcs) else None},
    }

    c_est = T.estimate(ev_lr(43 * n, 44 * n, spec))
    c = c_est.p_hat
    log_cp = log10_c_prime(c, lcs)
    long_est = T.estimate(ev_lr(44 * n, 43 * n, spec))
    report["step0"] = {"c": c_est.to_json(), "log10_c_prime": _finite(log_cp),
                       "p_44n_43n": long_est.to_json()}

    # step 1
    e1 = T.estimate(ev_lr(43 * n, 42 * n, spec))
    a1_holds = e1.p_hat < c / 100
    step1 = {"p_43n_42n": e1.to_json(), "threshold": c / 100, "assumption_holds": bool(a1_holds)}
    report["step1"] = step1

    # step 2
    e2 = T.estimate(ev_step2(n, spec))
    a2_holds = e2.p_hat < c / 10
    report["step2"] = {"p_L_minus_S_to_R": e2.to_json(), "threshold": c / 10, "assumption_holds": bool(a2_holds)}

    # step 3: representative windows
    log_thr3 = lcs + 18 * log10(c) - 14
    windows = [Truncation(0, 12 * n), Truncation(-4 * n, 16 * n), tr]
    rows = []
    for w in windows:
        est = T.estimate(ev_assumption3(n, spec, w))
        rows.append({"window": w.to_json(), "estimate": est.to_json(),
                     "below_threshold": bool(log10(est.p_hat) < log_thr3)})
    a3_holds = all(r["below_threshold"] for r in rows)
    report["step3"] = {"windows": rows, "log10_threshold": _finite(log_thr3), "assumption_holds": bool(a3_holds)}

    # consequences of assumption (3), and of (2)+(3)
    cross = T.estimate(ev_cross_connect(n, spec, tr))
    prox2 = T.estimate(ev_proximity2(n, spec, tr))
    prox4 = T.estimate(ev_proximity4(n, spec, tr))
    cors = {
        "cross_connect": {"estimate": cross.to_json(), "log10_bound": _finite(9 * log10(c) - 7),
                          "requires": ["assumption3"]},
        "proximity2": {"estimate": prox2.to_json(), "log10_bound": _finite(math.log10(3) + 9 * log10(c) - 7),
                       "requires": ["assumption3"]},
        "proximity4": {"estimate": prox4.to_json(), "log10_bound": _finite(math.log10(12) + 8 * log10(c) - 7),
                       "requires": ["assumption2", "assumption3"]},
    }
    for name, est in (("cross_connect", cross), ("proximity2", prox2), ("proximity4", prox4)):
        entry = cors[name]
        needed = {"assumption2": a2_holds, "assumption3": a3_holds}
        entry["compared"] = all(needed[x] for x in entry["requires"])
        if entry["compared"]:
            bound = entry["log10_bound"]
            entry["pass"] = T.compare(name, est, NEG_INF if bound is None else bound, "<=")["pass"]
    report["corollaries"] = cors

    # step 4: nested estimate of the main event
    if c > 0:
        log.info("trace: nested estimate, %d outer x %d inner", outer, inner)
        rec = nested_estimate(n, p, min(c, 1.0), outer, inner, derive_seed(seed, 1000), tr, spec, workers)
        step4 = rec.to_json()
        step4["log10_bound"] = _finite(4 * log10(c) - 3)
        if a1_holds and a2_holds and a3_holds:
            step4["pass"] = T.compare("main_event", rec.p_a1a2a3, 4 * log10(c) - 3)["pass"]
        report["step4"] = step4
    else:
        rec = None
        report["step4"] = {"skipped": "c = 0"}

    # step 5: product-space estimate on the mirrored window
    log.info("trace: pair event")
    s5 = product_estimate(Step5Event(n, spec, tr5, require_a1=True), p, trials, derive_seed(seed, 2000), workers)
    xx = T.estimate(ev_xx_prime(n, spec, tr5))
    bh = s5.boundary_hits / s5.trials
    step5 = {"pair_event": s5.to_json(), "boundary_hit_fraction": bh, "xx_prime": xx.to_json(),
             "log10_bound": _finite(lcs + math.log10(8e-3) + 4 * log10(c) + 4 * log10(c) - 3),
             "log10_bound_window": _finite(lcs + 8 * log10(c) - 6)}
    if a1_holds and a2_holds and a3_holds:
        step5["pass"] = T.compare("xx_prime", xx, step5["log10_bound"] or NEG_INF)["pass"]
    report["step5"] = step5
    report["boundary_hit_fraction"] = bh

    # branch that fires and its chain of inequalities
    if c == 0:
        branch = "degenerate"
        T.compare("conclusion", long_est, NEG_INF)
    elif not a1_holds:
        branch = "step1"
        e44_42 = T.estimate(ev_lr(44 * n, 42 * n, spec))
        step1["p_44n_42n"] = e44_42.to_json()
        T.compare("p(44n,43n) >= p(44n,42n)", long_est, log10(e44_42.p_hat), rhs_hw=e44_42.half_width)
        wide = math.log10(0.25) + 3 * lcs + 4 * log10(e1.p_hat)
        T.compare("p(44n,42n) >= c*^3 p(43n,42n)^4 / 4", e44_42, wide)
        T.log_compare("c*^3 p(43n,42n)^4 / 4 >= c'", wide, log_cp)
        T.compare("conclusion", long_est, log_cp)
    elif not a2_holds:
        branch = "step2"
        upper = T.estimate(ev_side_connect(n, spec, 24 * n, 44 * n))
        report["step2"]["p_upper_to_R"] = upper.to_json()
        T.compare("P[upper part of L <-> R] >= c/20", upper, log10(c / 20))
        T.log_compare("c* (c/100)^2 >= c'", lcs + 2 * log10(c / 100), log_cp)
        T.compare("conclusion", long_est, log_cp)
    elif not a3_holds:
        branch = "step3"
        ext = T.estimate(ev_extension(n, 11, spec, tr))
        report["step3"]["extension_m11"] = ext.to_json()
        T.compare("extension m=11", ext, 21 * lcs + 198 * log10(c) - 154)
        T.compare("conclusion", long_est, log_cp)
    else:
        branch = "main"
        T.compare("conclusion", long_est, log_cp)

    report["branch"] = branch
    report["checks"] = T.checks
    report["pass"] = all(row["pass"] for row in T.checks)
    return report


def dumps(report) -> str:
    """Deterministic JSON text for a report (dict or CheckReport)."""
    obj = report.to_json() if hasattr(report, "to_json") else report
    return json.dumps(obj, sort_keys=True, allow_nan=False, default=_json_default)


def _json_default(x):
    import numpy as np
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, Fraction):
        return float(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


# ---------------------------------------------------------------------------
# exhaustive suites
# ---------------------------------------------------------------------------

FKG_BOXES = ((2, 2, 1, 2), (2, 1, 2, 3))


def fkg_catalog(region: Region) -> dict:
    """Five increasing connection events on a small box, keyed by name."""
    x0, x1, y0, y1 = region.x0, region.x1, region.y0, region.y1
    rm = region.rect_mask
    sides = {
        "left": rm(x0, x0 + 1, y0, y1), "right": rm(x1 - 1, x1, y0, y1),
        "bottom": rm(x0, x1, y0, y0 + 1), "top": rm(x0, x1, y1 - 1, y1),
        "origin": rm(x0, x0 + 1, y0, y0 + 1), "far": rm(x1 - 1, x1, y1 - 1, y1),
    }
    pairs = {"left_right": ("left", "right"), "bottom_top": ("bottom", "top"), "corners": ("origin", "far"),
             "left_top": ("left", "top"), "bottom_right": ("bottom", "right")}
    return {name: ConnectEvent(region, sides[a], sides[b], params={"pair": name}, tag="box_connect")
            for name, (a, b) in pairs.items()}


def fkg_suite(ps=(0.3, 0.5, 0.7), boxes=FKG_BOXES, tol: float = 1e-12) -> dict:
    """Exact FKG margins for every ordered pair of catalog events on each box and p."""
    from .oracle import fkg_check

    rows = []
    for m, n, k, d in boxes:
        region = Region.box(m, n, SlabSpec(k, d))
        events = fkg_catalog(region)
        names = sorted(events)
        for p in ps:
            for i, a in enumerate(names):
                for b in names[i:]:
                    rep = fkg_check(events[a], events[b], p, tol=tol)
                    row = rep.to_json()
                    row.update({"box": [m, n], "k": k, "d": d, "E": a, "F": b})
                    rows.append(row)
    worst = min(r["margin"] for r in rows)
    return {"check": "fkg", "params": {"ps": list(ps), "boxes": [list(b) for b in boxes], "tol": tol},
            "results": rows, "min_margin": worst, "pass": all(r["ok"] for r in rows)}


def ab_suite(count: int, ps=(0.3, 0.5), seed: int = 0, n_max: int = 12, s_max: int = 3) -> dict:
    """Check the local-modification bound exactly on ``count`` random admissible instances per p."""
    import random

    from .oracle import ab_lemma_check, random_ab_instance

    rng = random.Random(seed)
    instances = [random_ab_instance(rng, n_max, s_max) for _ in range(count)]
    rows = []
    for p in ps:
        for j, inst in enumerate(instances):
            rep = ab_lemma_check(inst, p)
            rows.append({"p": p, "instance": j, "n": inst.n, "s": inst.s, "size_a": len(inst.A),
                         "size_b": len(inst.B), "hypothesis_ok": rep.hypothesis_ok,
                         "p_a": float(rep.p_a), "bound": float(rep.factor * rep.p_b), "ok": rep.ok})
    return {"check": "ab-lemma", "params": {"count": count, "ps": list(ps), "seed": seed, "n_max": n_max,
                                            "s_max": s_max},
            "results": rows, "pass": all(r["ok"] for r in rows)}
