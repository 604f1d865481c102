"""Crossing, connection and proximity events on strips and rectangles.

Every event is a deterministic predicate of one configuration (pair events
take two).  Events built from the catalog are addressed by a JSON-able
``EventSpec(tag, params)``.

The infinite strip [0,43n) x Z is replaced by a window [0,43n) x [a,b); the
default window is [-16n, 60n).  The Q / V construction of the pair event uses
a window symmetric about x2 = 2n - 1/2 reaching 200n upwards, and reports a
``boundary_hit`` flag (V, Gamma or Gamma' meets a cutoff row) instead of
failing.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .connectivity import ClusterIndex, backbone
from .geometry import Region, SegmentSpec, SlabSpec
from .sampling import Config, derive_seed, resample_conditional

PROXIMITY_NEAR = 2
PROXIMITY_FAR = 4


@dataclass(frozen=True)
class Truncation:
    """Vertical cutoffs replacing -inf / +inf in the strip."""

    a: int
    b: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"truncation needs a < b, got ({self.a}, {self.b})")

    @classmethod
    def default(cls, n: int, mult: int = 1) -> "Truncation":
        return cls(-16 * n * mult, 60 * n * mult)

    @classmethod
    def mirrored(cls, n: int, mult: int = 1) -> "Truncation":
        """Window [4n - 200n, 200n), symmetric about x2 = 2n - 1/2 so reflections stay inside."""
        b = 200 * n * mult
        return cls(4 * n - b, b)

    def doubled(self) -> "Truncation":
        return Truncation(2 * self.a, 2 * self.b)

    def strip(self, n: int, spec: SlabSpec) -> Region:
        return Region(0, 43 * n, self.a, self.b, spec)

    def to_json(self) -> list:
        return [self.a, self.b]


def _seg(x0, x1, y0, y1):
    return SegmentSpec.make("custom", x=[x0, x1], y=[y0, y1])


class Event:
    """A predicate of one configuration on a fixed region."""

    tag = "event"
    increasing = True

    def __init__(self, region: Region, params: dict | None = None):
        self.region = region
        self.params = dict(params or {})

    def __call__(self, config: Config) -> bool:
        if config.region != self.region:
            raise ValueError(f"{self.tag}: configuration region {config.region} does not match {self.region}")
        return self.evaluate(config)

    def evaluate(self, config: Config) -> bool:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"tag": self.tag, "params": self.params, "region": self.region.to_json()}

    def __repr__(self):
        return f"{type(self).__name__}({json.dumps(self.params, sort_keys=True)})"


class ConnectEvent(Event):
    """X is connected to Y by an open path inside the allowed mask."""

    tag = "connect"

    def __init__(self, region, X, Y, mask=None, params=None, tag=None):
        super().__init__(region, params)
        if tag:
            self.tag = tag
        self.X = X.mask(region) if isinstance(X, SegmentSpec) else region.as_mask(X)
        self.Y = Y.mask(region) if isinstance(Y, SegmentSpec) else region.as_mask(Y)
        self.mask = region.as_mask(mask)

    def evaluate(self, config):
        return ClusterIndex(config, self.mask).connects(self.X, self.Y)

    def table(self) -> np.ndarray:
        """Indicator over all 2^B bond states (bit j = bond j)."""
        r = self.region
        return _kernels.connect_table(r.n_sites, r.bond_u, r.bond_v, self.X, self.Y, self.mask)


class ProximityEvent(Event):
    """Open paths from two sets come within planar l1 distance ``radius``.

    mode "backbone": X is connected to Y, and some site on an open simple X-Y
    path is within ``radius`` of some site joined to Z.
    mode "clusters": some site joined to X is within ``radius`` of some site
    joined to Z.  Distances are taken between shadows, i.e. in the base plane.
    """

    tag = "proximity"

    def __init__(self, region, X, Y, Z, radius, mode, params=None, tag=None):
        super().__init__(region, params)
        if tag:
            self.tag = tag
        if mode not in ("backbone", "clusters"):
            raise ValueError(f"unknown proximity mode {mode!r}")

        def m(A):
            if A is None:
                return None
            return A.mask(region) if isinstance(A, SegmentSpec) else region.as_mask(A)

        self.X, self.Y, self.Z = m(X), m(Y), m(Z)
        self.radius = int(radius)
        self.mode = mode

    def evaluate(self, config):
        idx = ClusterIndex(config)
        z_cluster = idx.cluster_of(self.Z)
        if self.mode == "clusters":
            return self.region.planar_within(idx.cluster_of(self.X), z_cluster, self.radius)
        if not idx.connects(self.X, self.Y):
            return False
        spine = backbone(config, self.X, self.Y)
        return self.region.planar_within(spine, z_cluster, self.radius)


# ---------------------------------------------------------------------------
# strip events
# ---------------------------------------------------------------------------

def strip_region(n: int, spec: SlabSpec, truncation: Truncation | None = None) -> Region:
    return (truncation or Truncation.default(n)).strip(n, spec)


def _strip_params(n, truncation):
    return {"n": n, "a": truncation.a, "b": truncation.b}


def ev_lr(m: int, n: int, spec: SlabSpec) -> ConnectEvent:
    """LR(m, n): L(m,n) joined to R(m,n) inside B(m,n)."""
    if m < 1 or n < 1:
        raise ValueError(f"LR needs m, n >= 1, got ({m}, {n})")
    region = Region.box(m, n, spec)
    return ConnectEvent(region, SegmentSpec.make("L", m=m, n=n), SegmentSpec.make("R", m=m, n=n),
                        params={"m": m, "n": n}, tag="lr")


def ev_connect(region: Region, X, Y, mask=None) -> ConnectEvent:
    params = {"base": [region.x0, region.x1, region.y0, region.y1]}
    for key, val in (("X", X), ("Y", Y)):
        if isinstance(val, SegmentSpec):
            params[key] = val.to_json()
    return ConnectEvent(region, X, Y, mask, params=params)


def ev_step2(n: int, spec: SlabSpec) -> ConnectEvent:
    """L minus S_mid is joined to R in B(43n, 44n)."""
    region = Region.box(43 * n, 44 * n, spec)
    L = region.rect_mask(0, 1, 0, 44 * n)
    S = SegmentSpec.make("S_mid", n=n).mask(region)
    return ConnectEvent(region, L & ~S, region.rect_mask(43 * n - 1, 43 * n, 0, 44 * n),
                        params={"n": n}, tag="step2")


def ev_side_connect(n: int, spec: SlabSpec, lo: int, hi: int) -> ConnectEvent:
    """lift({0} x [lo, hi)) joined to R(43n, 44n) in B(43n, 44n)."""
    region = Region.box(43 * n, 44 * n, spec)
    return ConnectEvent(region, _seg(0, 1, lo, hi), _seg(43 * n - 1, 43 * n, 0, 44 * n),
                        params={"n": n, "lo": lo, "hi": hi}, tag="side_connect")


def ev_assumption3(n: int, spec: SlabSpec, truncation: Truncation | None = None) -> ConnectEvent:
    """lift({0} x [0,4n)) joined to lift({0} x [8n,12n)) in T_ab."""
    tr = truncation or Truncation.default(n)
    return ConnectEvent(tr.strip(n, spec), _seg(0, 1, 0, 4 * n), _seg(0, 1, 8 * n, 12 * n),
                        params=_strip_params(n, tr), tag="assumption3")


def ev_cross_connect(n: int, spec: SlabSpec, truncation: Truncation | None = None) -> ConnectEvent:
    """lift({0} x [8n,12n)) joined to lift({43n-1} x [0,4n)) in T_ab."""
    tr = truncation or Truncation.default(n)
    return ConnectEvent(tr.strip(n, spec), _seg(0, 1, 8 * n, 12 * n), _seg(43 * n - 1, 43 * n, 0, 4 * n),
                        params=_strip_params(n, tr), tag="cross_connect")


def ev_extension(n: int, m: int, spec: SlabSpec, truncation: Truncation | None = None) -> ConnectEvent:
    """lift({0} x [0,4n)) joined to lift({0} x [4n(m+1), 4n(m+2))) in T."""
    tr = truncation or Truncation.default(n)
    if 4 * n * (m + 2) > tr.b:
        raise ValueError(f"truncation b={tr.b} is below the target segment top {4 * n * (m + 2)}")
    params = _strip_params(n, tr)
    params["m"] = m
    return ConnectEvent(tr.strip(n, spec), _seg(0, 1, 0, 4 * n), _seg(0, 1, 4 * n * (m + 1), 4 * n * (m + 2)),
                        params=params, tag="extension")


def ev_proximity2(n: int, spec: SlabSpec, truncation: Truncation | None = None) -> ProximityEvent:
    """Simple path lift({0}x[0,4n)) -> lift({43n-1}x[0,4n)) within distance 2 of a path from lift({0}x[8n,12n))."""
    tr = truncation or Truncation.default(n)
    return ProximityEvent(tr.strip(n, spec), _seg(0, 1, 0, 4 * n), _seg(43 * n - 1, 43 * n, 0, 4 * n),
                          _seg(0, 1, 8 * n, 12 * n), PROXIMITY_NEAR, "backbone",
                          params=_strip_params(n, tr), tag="proximity2")


def ev_proximity4(n: int, spec: SlabSpec, truncation: Truncation | None = None) -> ProximityEvent:
    """Paths from lift({0}x[0,4n)) and lift({0}x[16n,20n)) within distance 4."""
    tr = truncation or Truncation.default(n)
    return ProximityEvent(tr.strip(n, spec), _seg(0, 1, 0, 4 * n), None, _seg(0, 1, 16 * n, 20 * n),
                          PROXIMITY_FAR, "clusters", params=_strip_params(n, tr), tag="proximity4")


def _check_strip(n, truncation, need_lo, need_hi):
    if not (truncation.a < need_lo and truncation.b > need_hi):
        raise ValueError(f"truncation ({truncation.a}, {truncation.b}) too small: need a < {need_lo} and b > {need_hi}")


class A1Event(ConnectEvent):
    """S_mid is joined to the row lift([0,43n) x {2n}) in T."""

    def __init__(self, n, spec, truncation=None):
        tr = truncation or Truncation.default(n)
        _check_strip(n, tr, 2 * n, 24 * n)
        super().__init__(tr.strip(n, spec), SegmentSpec.make("S_mid", n=n), _seg(0, 43 * n, 2 * n, 2 * n + 1),
                         params=_strip_params(n, tr), tag="a1")
        self.n = n


def ev_a1(n: int, spec: SlabSpec, truncation: Truncation | None = None) -> A1Event:
    return A1Event(n, spec, truncation)


def ev_xx_prime(n: int, spec: SlabSpec, truncation: Truncation | None = None) -> ConnectEvent:
    """X = lift({0}x[4n,8n)) joined to X' = lift({0}x[-4n,0)) in T."""
    tr = truncation or Truncation.mirrored(n)
    _check_strip(n, tr, -4 * n + 1, 8 * n - 1)
    return ConnectEvent(tr.strip(n, spec), SegmentSpec.make("X", n=n), SegmentSpec.make("X_prime", n=n),
                        params=_strip_params(n, tr), tag="xx_prime")


# ---------------------------------------------------------------------------
# conditional functionals f and g
# ---------------------------------------------------------------------------

def _strip_n(region: Region) -> int:
    if region.x0 != 0 or region.width % 43:
        raise ValueError(f"region {region} is not a strip [0, 43n) x [a, b)")
    return region.width // 43


def s_cluster(config: Config, n: int) -> np.ndarray:
    """C_S: sites of the strip joined to S_mid by open paths in the strip."""
    r = config.region
    return ClusterIndex(config).cluster_of(SegmentSpec.make("S_mid", n=n).mask(r))


def conditional_samples(config: Config, n: int, inner: int, seed: int, cs: np.ndarray | None = None):
    """Inner-sample indicators behind f and g, sharing one fresh sample per index.

    Bonds touching C_S keep their state; every other bond is redrawn from
    ``derive_seed(seed, j)``.  Returns two bool arrays of length ``inner``:
    the f-indicator (X joined to the right side inside T minus shadow(C_S)) and
    the g-indicator (the open cluster of X, with C_S's outer bonds closed,
    comes within distance 4 of shadow(C_S)).
    """
    if inner < 1:
        raise ValueError("inner_samples must be >= 1")
    r = config.region
    if _strip_n(r) != n:
        raise ValueError(f"configuration strip has n={_strip_n(r)}, expected {n}")
    if cs is None:
        cs = s_cluster(config, n)
    u, v = r.bond_u, r.bond_v
    touching = cs[u] | cs[v]
    outer_edge = cs[u] ^ cs[v]
    allowed = ~r.shadow_mask(cs)
    X = SegmentSpec.make("X", n=n).mask(r)
    right = r.rect_mask(43 * n - 1, 43 * n, r.y0, r.y1)
    f_hits = np.zeros(inner, dtype=bool)
    g_hits = np.zeros(inner, dtype=bool)
    empty = not cs.any()
    for j in range(inner):
        w = resample_conditional(config, touching, derive_seed(seed, j))
        f_hits[j] = ClusterIndex(w, allowed).connects(X, right)
        if empty:
            continue
        state = w.state.copy()
        state[outer_edge] = False
        wg = Config(r, state, w.p, w.seed)
        g_hits[j] = r.planar_within(ClusterIndex(wg).cluster_of(X), cs, PROXIMITY_FAR)
    return f_hits, g_hits


def f_value(config: Config, n: int, inner_samples: int, seed: int, cs: np.ndarray | None = None) -> float:
    """Nested estimate of P[X joined to the right side in T minus shadow(C_S) | C_S].

    ``cs`` overrides the computed C_S (for instance an empty set).
    """
    f_hits, _ = conditional_samples(config, n, inner_samples, seed, cs)
    return float(f_hits.mean())


def g_value(config: Config, n: int, inner_samples: int, seed: int, cs: np.ndarray | None = None) -> float:
    """Nested estimate of P[an open path from X comes within distance 4 of shadow(C_S) | C_S]."""
    _, g_hits = conditional_samples(config, n, inner_samples, seed, cs)
    return float(g_hits.mean())


def a2_holds(f: float, c: float) -> bool:
    return f >= c ** 2 / 10


def a3_holds(g: float, c: float) -> bool:
    return g <= c ** 4 / 1000


class NestedEvent(Event):
    """A2 = {f >= c^2/10} or A3 = {g <= c^4/1000}, inner samples keyed by (seed, config.seed)."""

    def __init__(self, which, n, spec, c, inner, seed, truncation=None):
        tr = truncation or Truncation.default(n)
        if not 0 < c <= 1:
            raise ValueError(f"c must lie in (0, 1], got {c}")
        params = _strip_params(n, tr)
        params.update({"c": c, "inner": inner, "seed": seed})
        super().__init__(tr.strip(n, spec), params)
        self.tag = which
        self.increasing = False
        self.n, self.c, self.inner, self.seed = n, c, inner, seed

    def evaluate(self, config):
        inner_seed = derive_seed(self.seed, config.seed % (1 << 63))
        if self.tag == "a2":
            return a2_holds(f_value(config, self.n, self.inner, inner_seed), self.c)
        return a3_holds(g_value(config, self.n, self.inner, inner_seed), self.c)


def ev_a2(n, spec, c, inner, seed, truncation=None) -> NestedEvent:
    return NestedEvent("a2", n, spec, c, inner, seed, truncation)


def ev_a3(n, spec, c, inner, seed, truncation=None) -> NestedEvent:
    return NestedEvent("a3", n, spec, c, inner, seed, truncation)


# ---------------------------------------------------------------------------
# Step 5 pair event
# ---------------------------------------------------------------------------

@dataclass
class Step5Outcome:
    connected: bool
    boundary_hit: bool
    a1: bool = False
    v_size: int = 0
    gamma_size: int = 0


class Step5Event:
    """X joined to X' inside V(omega) by an open path of omega'.

    Q(omega) is the cluster of S_mid in the upper strip [0,43n) x [2n, b);
    Gamma the outer vertex boundary of shadow(Q) in T, Gamma' its reflection
    in x2 = 2n - 1/2, and V the component of the origin in T minus
    (Gamma u Gamma').  With ``require_a1`` the outcome also requires A1(omega).
    """

    tag = "step5"
    increasing = False

    def __init__(self, n: int, spec: SlabSpec, truncation: Truncation | None = None, require_a1: bool = False):
        tr = truncation or Truncation.mirrored(n)
        _check_strip(n, tr, -4 * n + 1, 24 * n)
        self.n, self.spec, self.truncation = n, spec, tr
        self.region = tr.strip(n, spec)
        self.require_a1 = require_a1
        self.params = _strip_params(n, tr)
        self.params["require_a1"] = require_a1
        r = self.region
        self._S = SegmentSpec.make("S_mid", n=n).mask(r)
        self._upper = r.rect_mask(0, 43 * n, 2 * n, tr.b)
        self._X = SegmentSpec.make("X", n=n).mask(r)
        self._Xp = SegmentSpec.make("X_prime", n=n).mask(r)
        self._origin = r.index((0, 0) + (0,) * (spec.d - 2))
        self._a1 = A1Event(n, spec, tr) if require_a1 else None
        self._all_open = np.ones(r.n_bonds, dtype=bool)

    def geometry(self, config: Config):
        """(Q, Gamma, Gamma', V) masks for a configuration."""
        r = self.region
        Q = ClusterIndex(config, self._upper).cluster_of(self._S)
        gamma = r.outer_boundary(r.shadow_mask(Q))
        gamma_p = r.reflect_mask(gamma, 2 * self.n - 0.5)
        free = ~(gamma | gamma_p)
        if free[self._origin]:
            labels = _kernels.label_components(r.n_sites, r.bond_u, r.bond_v, self._all_open, free)
            V = labels == labels[self._origin]
        else:
            V = np.zeros(r.n_sites, dtype=bool)
        return Q, gamma, gamma_p, V

    def outcome(self, omega: Config, omega_p: Config) -> Step5Outcome:
        r = self.region
        if omega.region != r or omega_p.region != r:
            raise ValueError("step5: both configurations must live on the event's strip")
        # off A1 the outcome is False and V need not be bounded, so no hit is recorded
        if self._a1 is not None and not self._a1(omega):
            return Step5Outcome(False, False, False)
        Q, gamma, gamma_p, V = self.geometry(omega)
        hit = r.touches_rows(V | gamma | gamma_p, (self.truncation.a, self.truncation.b - 1))
        ok = bool(V.any()) and ClusterIndex(omega_p, V).connects(self._X, self._Xp)
        return Step5Outcome(bool(ok), bool(hit), True, int(V.sum()), int(gamma.sum()))

    def __call__(self, omega: Config, omega_p: Config) -> bool:
        return self.outcome(omega, omega_p).connected

    def to_json(self) -> dict:
        return {"tag": self.tag, "params": self.params, "region": self.region.to_json()}


def ev_step5(omega: Config, omega_p: Config, n: int, truncation: Truncation | None = None):
    """Evaluate the Step 5 event; returns (connected, boundary_hit)."""
    tr = truncation
    if tr is None:
        tr = Truncation(omega.region.y0, omega.region.y1)
    out = Step5Event(n, omega.region.spec, tr).outcome(omega, omega_p)
    return out.connected, out.boundary_hit


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _trunc_from(params, n, mirrored=False):
    if "a" in params and "b" in params:
        return Truncation(int(params["a"]), int(params["b"]))
    mult = int(params.get("mult", 1))
    return Truncation.mirrored(n, mult) if mirrored else Truncation.default(n, mult)


def _segment(obj):
    return obj if isinstance(obj, SegmentSpec) else SegmentSpec.from_json(obj)


def _build_connect(p, spec):
    region = Region(*p["base"], spec)
    return ConnectEvent(region, _segment(p["X"]), _segment(p["Y"]), params=p)


def _build_proximity(p, spec, tag, radius, mode, fn):
    if "base" in p:
        region = Region(*p["base"], spec)
        Y = _segment(p["Y"]) if p.get("Y") is not None else None
        return ProximityEvent(region, _segment(p["X"]), Y, _segment(p["Z"]), p.get("radius", radius),
                              p.get("mode", mode), params=p, tag=tag)
    n = int(p["n"])
    return fn(n, spec, _trunc_from(p, n))


CATALOG = {
    "lr": lambda p, spec: ev_lr(int(p["m"]), int(p["n"]), spec),
    "connect": _build_connect,
    "step2": lambda p, spec: ev_step2(int(p["n"]), spec),
    "side_connect": lambda p, spec: ev_side_connect(int(p["n"]), spec, int(p["lo"]), int(p["hi"])),
    "assumption3": lambda p, spec: ev_assumption3(int(p["n"]), spec, _trunc_from(p, int(p["n"]))),
    "cross_connect": lambda p, spec: ev_cross_connect(int(p["n"]), spec, _trunc_from(p, int(p["n"]))),
    "extension": lambda p, spec: ev_extension(int(p["n"]), int(p["m"]), spec, _trunc_from(p, int(p["n"]))),
    "proximity2": lambda p, spec: _build_proximity(p, spec, "proximity2", PROXIMITY_NEAR, "backbone", ev_proximity2),
    "proximity4": lambda p, spec: _build_proximity(p, spec, "proximity4", PROXIMITY_FAR, "clusters", ev_proximity4),
    "a1": lambda p, spec: ev_a1(int(p["n"]), spec, _trunc_from(p, int(p["n"]))),
    "a2": lambda p, spec: ev_a2(int(p["n"]), spec, float(p["c"]), int(p["inner"]), int(p["seed"]),
                                _trunc_from(p, int(p["n"]))),
    "a3": lambda p, spec: ev_a3(int(p["n"]), spec, float(p["c"]), int(p["inner"]), int(p["seed"]),
                                _trunc_from(p, int(p["n"]))),
    "xx_prime": lambda p, spec: ev_xx_prime(int(p["n"]), spec, _trunc_from(p, int(p["n"]), mirrored=True)),
    "step5": lambda p, spec: Step5Event(int(p["n"]), spec, _trunc_from(p, int(p["n"]), mirrored=True),
                                        bool(p.get("require_a1", False))),
}


@dataclass
class EventSpec:
    """A catalog event by tag and parameters; serialises to {tag, params}."""

    tag: str
    params: dict = field(default_factory=dict)

    def build(self, spec: SlabSpec):
        try:
            builder = CATALOG[self.tag]
        except KeyError:
            raise ValueError(f"unknown event tag {self.tag!r}; known: {sorted(CATALOG)}") from None
        return builder(self.params, spec)

    def to_json(self) -> dict:
        return {"tag": self.tag, "params": self.params}

    @classmethod
    def from_json(cls, obj) -> "EventSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["tag"], dict(obj.get("params", {})))
