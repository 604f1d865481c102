"""Slab lattice geometry: sites, lifted rectangles, boundary segments, bonds.

A site of the slab Z^2 x {0..k-1}^(d-2) is a flat integer tuple
``(z1, z2, x3, ..., xd)``; for d = 2 it is just ``(z1, z2)``.

Finite regions are lifted axis-aligned rectangles ``[x0,x1) x [y0,y1)`` over the
full fiber.  Sites of a region are numbered lexicographically by
``(z1, z2, fiber)``, so the index of a site is
``((z1 - x0) * H + (z2 - y0)) * F + fiber_index``.  Bonds are listed by their
smaller endpoint in site order, then by axis (e1, e2, e3, ...).  Downstream
modules work with boolean masks over this site numbering.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy import ndimage

Site = tuple

SEGMENT_TAGS = ("L", "R", "S_mid", "X", "X_prime", "custom", "sites")


@dataclass(frozen=True)
class SlabSpec:
    k: int = 2
    d: int = 3

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"slab width k must be an integer >= 1, got {self.k}")
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"dimension d must be an integer >= 2, got {self.d}")

    @property
    def fiber_dim(self) -> int:
        return self.d - 2

    @property
    def fiber_size(self) -> int:
        return self.k ** (self.d - 2)

    def fibers(self) -> list[tuple]:
        """All fiber tuples in lexicographic order (a single empty tuple when d = 2)."""
        return list(itertools.product(range(self.k), repeat=self.d - 2))

    def fiber_index(self, fiber) -> int:
        idx = 0
        for x in fiber:
            idx = idx * self.k + x
        return idx

    def contains(self, site) -> bool:
        return len(site) == self.d and all(0 <= x < self.k for x in site[2:])


def lift(base: Iterable, spec: SlabSpec) -> frozenset:
    """Replicate planar points over the whole fiber."""
    fibers = spec.fibers()
    return frozenset((z1, z2) + f for (z1, z2) in base for f in fibers)


def shadow(A: Iterable, spec: SlabSpec) -> frozenset:
    """Close a site set under changes of the fiber coordinates."""
    return lift({(s[0], s[1]) for s in A}, spec)


def reflect2(A: Iterable, c2: float) -> frozenset:
    """Mirror sites in the hyperplane x2 = c2, where c2 is a half-integer."""
    twice = 2 * c2
    if twice != int(twice) or int(twice) % 2 == 0:
        raise ValueError(f"reflection axis must be a half-integer, got {c2}")
    t = int(twice)
    return frozenset((s[0], t - s[1]) + tuple(s[2:]) for s in A)


@dataclass(frozen=True)
class SegmentSpec:
    """A named lifted segment, resolved to a planar rectangle.

    ``tag`` is one of L, R (params m, n), S_mid, X, X_prime (param n),
    custom (params x=[x0,x1], y=[y0,y1]) or sites (params sites=[[...], ...],
    explicit, not lifted).
    """

    tag: str
    params: tuple = ()

    @classmethod
    def make(cls, tag: str, **params) -> "SegmentSpec":
        seg = cls(tag, tuple(sorted((key, _freeze(val)) for key, val in params.items())))
        seg.rect()  # validate early
        return seg

    @property
    def kwargs(self) -> dict:
        return dict(self.params)

    def rect(self):
        """Planar rectangle (x0, x1, y0, y1), or None for explicit site lists."""
        p = self.kwargs
        tag = self.tag
        if tag in ("L", "R"):
            m, n = _positive(p, "m"), _positive(p, "n")
            x = 0 if tag == "L" else m - 1
            return (x, x + 1, 0, n)
        if tag in ("S_mid", "X", "X_prime"):
            n = _positive(p, "n")
            lo, hi = {"S_mid": (20 * n, 24 * n), "X": (4 * n, 8 * n), "X_prime": (-4 * n, 0)}[tag]
            return (0, 1, lo, hi)
        if tag == "custom":
            x0, x1 = p["x"]
            y0, y1 = p["y"]
            return (int(x0), int(x1), int(y0), int(y1))
        if tag == "sites":
            return None
        raise ValueError(f"unknown segment tag {tag!r}; expected one of {SEGMENT_TAGS}")

    def sites(self, spec: SlabSpec) -> frozenset:
        r = self.rect()
        if r is None:
            return frozenset(tuple(s) for s in self.kwargs["sites"])
        x0, x1, y0, y1 = r
        return lift(((x, y) for x in range(x0, x1) for y in range(y0, y1)), spec)

    def mask(self, region: "Region") -> np.ndarray:
        r = self.rect()
        if r is None:
            return region.mask_of(self.sites(region.spec))
        return region.rect_mask(*r)

    def to_json(self) -> dict:
        return {"tag": self.tag, "params": _thaw(self.kwargs)}

    @classmethod
    def from_json(cls, obj: dict) -> "SegmentSpec":
        return cls.make(obj["tag"], **obj.get("params", {}))


def make_segment(tag: str, params: dict, spec: SlabSpec) -> frozenset:
    """Resolve a named boundary segment to its lifted site set."""
    return SegmentSpec.make(tag, **params).sites(spec)


def _positive(params, key):
    val = params.get(key)
    if val is None or int(val) != val or val < 1:
        raise ValueError(f"segment parameter {key} must be a positive integer, got {val}")
    return int(val)


def _freeze(val):
    if isinstance(val, (list, tuple)):
        return tuple(_freeze(x) for x in val)
    return val


def _thaw(val):
    if isinstance(val, dict):
        return {k: _thaw(v) for k, v in val.items()}
    if isinstance(val, tuple):
        return [_thaw(x) for x in val]
    return val


@dataclass(frozen=True)
class Region:
    """The lifted rectangle [x0,x1) x [y0,y1) of a slab."""

    x0: int
    x1: int
    y0: int
    y1: int
    spec: SlabSpec = SlabSpec()

    @classmethod
    def box(cls, m: int, n: int, spec: SlabSpec) -> "Region":
        """B(m, n) = lift([0,m) x [0,n))."""
        return cls(0, m, 0, n, spec)

    @property
    def width(self) -> int:
        return max(self.x1 - self.x0, 0)

    @property
    def height(self) -> int:
        return max(self.y1 - self.y0, 0)

    @property
    def shape(self) -> tuple:
        return (self.width, self.height, self.spec.fiber_size)

    @property
    def n_sites(self) -> int:
        return self.width * self.height * self.spec.fiber_size

    @property
    def n_bonds(self) -> int:
        return int(self.bond_u.size)

    def is_empty(self) -> bool:
        return self.n_sites == 0

    def expected_bond_count(self) -> int:
        W, H, F = self.shape
        if W == 0 or H == 0:
            return 0
        k, fd = self.spec.k, self.spec.fiber_dim
        fiber_bonds = fd * (k - 1) * k ** (fd - 1) if fd else 0
        return (W - 1) * H * F + W * (H - 1) * F + W * H * fiber_bonds

    @cached_property
    def coords(self) -> np.ndarray:
        """(n_sites, d) integer coordinates in canonical site order."""
        W, H, F = self.shape
        d = self.spec.d
        out = np.empty((W, H, F, d), dtype=np.int64)
        out[..., 0] = (self.x0 + np.arange(W))[:, None, None]
        out[..., 1] = (self.y0 + np.arange(H))[None, :, None]
        if d > 2:
            fib = np.array(self.spec.fibers(), dtype=np.int64).reshape(F, d - 2)
            out[..., 2:] = fib[None, None, :, :]
        return out.reshape(-1, d)

    @cached_property
    def _bonds(self):
        W, H, F = self.shape
        idx = np.arange(self.n_sites, dtype=np.int64).reshape(W, H, F)
        k, fd = self.spec.k, self.spec.fiber_dim
        us, vs, axes = [], [], []
        if W > 1:
            us.append(idx[:-1].ravel())
            vs.append(idx[1:].ravel())
            axes.append(np.zeros(us[-1].size, dtype=np.int64))
        if H > 1:
            us.append(idx[:, :-1].ravel())
            vs.append(idx[:, 1:].ravel())
            axes.append(np.ones(us[-1].size, dtype=np.int64))
        if fd and k > 1:
            fgrid = idx.reshape(W, H, *([k] * fd))
            for j in range(fd):
                lo = [slice(None)] * (2 + fd)
                hi = [slice(None)] * (2 + fd)
                lo[2 + j] = slice(None, -1)
                hi[2 + j] = slice(1, None)
                us.append(fgrid[tuple(lo)].ravel())
                vs.append(fgrid[tuple(hi)].ravel())
                axes.append(np.full(us[-1].size, 2 + j, dtype=np.int64))
        if not us:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, empty
        u = np.concatenate(us)
        v = np.concatenate(vs)
        ax = np.concatenate(axes)
        order = np.lexsort((ax, u))
        return u[order], v[order], ax[order]

    @property
    def bond_u(self) -> np.ndarray:
        return self._bonds[0]

    @property
    def bond_v(self) -> np.ndarray:
        return self._bonds[1]

    @property
    def bond_axis(self) -> np.ndarray:
        return self._bonds[2]

    def index(self, site) -> int:
        z1, z2 = site[0], site[1]
        if not (self.x0 <= z1 < self.x1 and self.y0 <= z2 < self.y1) or not self.spec.contains(site):
            raise KeyError(site)
        return ((z1 - self.x0) * self.height + (z2 - self.y0)) * self.spec.fiber_size + self.spec.fiber_index(site[2:])

    def site(self, i: int) -> Site:
        return tuple(int(x) for x in self.coords[i])

    def contains(self, site) -> bool:
        try:
            self.index(site)
        except KeyError:
            return False
        return True

    def sites(self) -> list:
        return [tuple(int(x) for x in row) for row in self.coords]

    def mask_of(self, sites: Iterable) -> np.ndarray:
        """Boolean mask of the given sites; sites outside the region are ignored."""
        mask = np.zeros(self.n_sites, dtype=bool)
        for s in sites:
            s = tuple(s)
            if self.contains(s):
                mask[self.index(s)] = True
        return mask

    def sites_of(self, mask: np.ndarray) -> frozenset:
        return frozenset(tuple(int(x) for x in self.coords[i]) for i in np.flatnonzero(mask))

    def as_mask(self, A) -> np.ndarray:
        """Accept either a boolean mask over this region or an iterable of sites."""
        if isinstance(A, np.ndarray) and A.dtype == bool:
            if A.shape != (self.n_sites,):
                raise ValueError(f"mask has shape {A.shape}, region has {self.n_sites} sites")
            return A
        if A is None:
            return np.ones(self.n_sites, dtype=bool)
        return self.mask_of(A)

    def rect_mask(self, x0: int, x1: int, y0: int, y1: int) -> np.ndarray:
        """Mask of lift([x0,x1) x [y0,y1)) intersected with the region."""
        grid = np.zeros(self.shape, dtype=bool)
        a0, a1 = max(x0, self.x0) - self.x0, min(x1, self.x1) - self.x0
        b0, b1 = max(y0, self.y0) - self.y0, min(y1, self.y1) - self.y0
        if a0 < a1 and b0 < b1:
            grid[a0:a1, b0:b1, :] = True
        return grid.ravel()

    def planar(self, mask: np.ndarray) -> np.ndarray:
        """(W, H) projection of a mask to the base rectangle."""
        return mask.reshape(self.shape).any(axis=2)

    def shadow_mask(self, mask: np.ndarray) -> np.ndarray:
        W, H, F = self.shape
        return np.repeat(self.planar(mask)[:, :, None], F, axis=2).ravel()

    def reflect_mask(self, mask: np.ndarray, c2: float) -> np.ndarray:
        """Mask of reflect2(mask, c2), cropped to the region."""
        t = 2 * c2
        if t != int(t) or int(t) % 2 == 0:
            raise ValueError(f"reflection axis must be a half-integer, got {c2}")
        t = int(t)
        grid = mask.reshape(self.shape)
        out = np.zeros_like(grid)
        ys = self.y0 + np.arange(self.height)
        src = t - ys
        ok = (src >= self.y0) & (src < self.y1)
        out[:, ok, :] = grid[:, src[ok] - self.y0, :]
        return out.ravel()

    def outer_boundary(self, A: np.ndarray, ambient: np.ndarray | None = None) -> np.ndarray:
        """Sites of ambient minus A that share a bond with A."""
        ambient = np.ones(self.n_sites, dtype=bool) if ambient is None else ambient
        u, v = self.bond_u, self.bond_v
        out = np.zeros(self.n_sites, dtype=bool)
        out[v[A[u] & ~A[v]]] = True
        out[u[A[v] & ~A[u]]] = True
        return out & ambient & ~A

    def planar_within(self, A: np.ndarray, B: np.ndarray, radius: int) -> bool:
        """True iff the shadows of A and B are at l1 distance <= radius."""
        pa = self.planar(A)
        pb = self.planar(B)
        if not pa.any() or not pb.any():
            return False
        if radius > 0:
            pa = ndimage.binary_dilation(pa, structure=ndimage.generate_binary_structure(2, 1), iterations=radius)
        return bool((pa & pb).any())

    def touches_rows(self, mask: np.ndarray, rows: Iterable[int]) -> bool:
        grid = self.planar(mask)
        for y in rows:
            if self.y0 <= y < self.y1 and grid[:, y - self.y0].any():
                return True
        return False

    def bond_list(self) -> list:
        coords = self.coords
        return [(tuple(int(x) for x in coords[a]), tuple(int(x) for x in coords[b]))
                for a, b in zip(self.bond_u, self.bond_v)]

    def to_json(self) -> dict:
        return {"k": self.spec.k, "d": self.spec.d, "base": [self.x0, self.x1, self.y0, self.y1]}

    @classmethod
    def from_json(cls, obj: dict) -> "Region":
        x0, x1, y0, y1 = obj["base"]
        return cls(x0, x1, y0, y1, SlabSpec(obj["k"], obj["d"]))


def induced_bonds(region: Region) -> list:
    """Bonds with both endpoints in the region, as (a, b) site pairs in canonical order."""
    return region.bond_list()


def describe(region: Region, segment: SegmentSpec | None = None) -> str:
    """JSON description {k, d, base, tag, params} used in result records."""
    obj = region.to_json()
    if segment is not None:
        obj.update(segment.to_json())
    return json.dumps(obj, sort_keys=True)
